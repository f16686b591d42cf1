"""Desk-scale search for homothetic pattern copies in finite approximations.

Membership at finite depth is a necessary condition only — a candidate pair
(x, lambda) passing depth k means every pattern point lambda*b + x lies in
the kept region of the depth-k approximation ("depth-k consistent"), nothing
more.  Checks are exact: box coordinates, scales, and translations are
rationals, and the grid scan works on integer index ranges per axis, so no
candidate is lost or spuriously admitted to rounding.

The kept region at depth k is, for cut-out members, the root box minus the
open interiors of all cuts at levels 1..k; for corner-digit members, the
union of the level-k component boxes.  Both shrink as k grows, so passing
the full query depth implies passing every shallower depth.
"""
from __future__ import annotations

import concurrent.futures as _futures
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

from .core import BoxRegion
from .families import RectangleSet

__all__ = [
    "PatternQuery",
    "ContainmentReport",
    "verify_containment_depth",
    "PatternCandidate",
    "find_homothety",
    "candidates_to_csv",
    "pattern_diameter",
    "scale_range_admissible",
]

_T = TypeVar("_T")
_R = TypeVar("_R")

ROOT = BoxRegion((Fraction(0), Fraction(0)), (Fraction(1), Fraction(1)))


def pattern_diameter(points: Sequence[Sequence[Fraction]]) -> Fraction:
    """Sup-metric diameter of the pattern (0 for a singleton)."""
    diam = Fraction(0)
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            for a, b in zip(points[i], points[j]):
                diam = max(diam, abs(Fraction(a) - Fraction(b)))
    return diam


@dataclass(frozen=True)
class PatternQuery:
    """A finite pattern, a scale interval, a depth, and a sampling step.

    `grid_resolution` is the translation step; None defers to half the
    smallest box half-width at the query depth (so no kept box can fall
    between grid points).  Scales are sampled from lambda_lo upward in
    grid_resolution steps; the low endpoint is always included, so a range
    thinner than one step still yields exactly one sample.
    """

    points: tuple[tuple[Fraction, ...], ...]
    lambda_lo: Fraction
    lambda_hi: Fraction
    depth: int
    grid_resolution: Fraction | None = None

    def __post_init__(self) -> None:
        if len(self.points) < 1:
            raise ValueError("pattern needs at least one point")
        object.__setattr__(
            self,
            "points",
            tuple(tuple(Fraction(x) for x in p) for p in self.points),
        )
        dims = {len(p) for p in self.points}
        if dims != {2}:
            raise ValueError("pattern points must be 2-vectors")
        object.__setattr__(self, "lambda_lo", Fraction(self.lambda_lo))
        object.__setattr__(self, "lambda_hi", Fraction(self.lambda_hi))
        if not 0 < self.lambda_lo <= self.lambda_hi:
            raise ValueError("scale range must satisfy 0 < lo <= hi")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if self.grid_resolution is not None:
            res = Fraction(self.grid_resolution)
            if res <= 0:
                raise ValueError("grid resolution must be positive")
            object.__setattr__(self, "grid_resolution", res)


def scale_range_admissible(query: PatternQuery, scale_coefficient: float) -> bool:
    """Range comparison against a certificate's admissible scale bound
    rho2 (1 - beta_max): the whole query interval must sit below
    scale_coefficient / diam(pattern).  Singletons admit every scale."""
    diam = pattern_diameter(query.points)
    if diam == 0:
        return True
    return float(query.lambda_hi) < scale_coefficient / float(diam)


# ------------------------------------------------------------- exact checks


def _kept_at_level(point: tuple[Fraction, Fraction], rect: RectangleSet,
                   family: str, level: int) -> bool:
    if level == 0:
        return ROOT.contains_point(point)
    if family == "rco":
        if not ROOT.contains_point(point):
            return False
        for entry in rect.of_kind("cut", level):
            box = entry.box
            if all(
                abs(point[j] - box.center[j]) < box.half[j] for j in range(2)
            ):
                return False
        return True
    if family == "rcd":
        return any(
            entry.box.contains_point(point)
            for entry in rect.of_kind("comp", level)
        )
    raise ValueError(f"unknown family {family!r}")


@dataclass(frozen=True)
class ContainmentReport:
    """Per-level membership of one placed pattern copy."""

    levels: tuple[bool, ...]     # index k: all pattern points kept at level k

    @property
    def max_depth_passed(self) -> int:
        """Deepest k with levels 0..k all true; -1 if level 0 already fails."""
        depth = -1
        for k, ok in enumerate(self.levels):
            if not ok:
                break
            depth = k
        return depth

    def consistent_to(self, depth: int) -> bool:
        return self.max_depth_passed >= depth


def verify_containment_depth(
    x: Sequence[Fraction],
    lam: Fraction,
    points: Sequence[Sequence[Fraction]],
    rect: RectangleSet,
) -> ContainmentReport:
    """Exact per-level check that every lambda*b + x is in the kept region.

    Level k of a cut-out member keeps what no cut of level <= k deletes
    (cuts delete open boxes, so boundaries stay kept); level k of a
    corner-digit member keeps the union of its level-k components.  Levels
    run 0..max generated level.
    """
    family = rect.meta.get("family")
    if family not in ("rco", "rcd"):
        raise ValueError("rectangle set lacks family metadata")
    lam = Fraction(lam)
    placed = [
        (Fraction(x[0]) + lam * Fraction(p[0]), Fraction(x[1]) + lam * Fraction(p[1]))
        for p in points
    ]
    levels: list[bool] = []
    for k in range(rect.max_level() + 1):
        ok = all(_kept_at_level(p, rect, family, k) for p in placed)
        if family == "rco" and k >= 1:
            # cuts accumulate: level k keeps only what level k-1 kept
            ok = ok and levels[k - 1]
        levels.append(ok)
    return ContainmentReport(tuple(levels))


# ---------------------------------------------------------------- grid scan


@dataclass(frozen=True)
class PatternCandidate:
    lam: Fraction
    x: tuple[Fraction, Fraction]
    max_depth_passed: int


def _ceil_div(num: Fraction, den: Fraction) -> int:
    q = num / den
    return -((-q.numerator) // q.denominator)


def _floor_div(num: Fraction, den: Fraction) -> int:
    q = num / den
    return q.numerator // q.denominator


def _default_resolution(rect: RectangleSet, depth: int) -> Fraction:
    halves = [
        Fraction(h)
        for entry in rect.entries
        if entry.level == depth
        for h in entry.box.half
    ]
    smallest = min(halves) if halves else Fraction(1)
    return smallest / 2


def _scan_one_scale(
    lam: Fraction,
    query: PatternQuery,
    rect: RectangleSet,
    family: str,
    res: Fraction,
) -> list[PatternCandidate]:
    # translation grid: x = (ix, iy) * res with every pattern point in the
    # root box; per axis x_j in [-1 - lam*min_b, 1 - lam*max_b]
    lo_idx = []
    hi_idx = []
    for j in range(2):
        coords = [p[j] for p in query.points]
        lo = Fraction(-1) - lam * min(coords)
        hi = Fraction(1) - lam * max(coords)
        if lo > hi:
            return []
        lo_idx.append(_ceil_div(lo, res))
        hi_idx.append(_floor_div(hi, res))
        if lo_idx[j] > hi_idx[j]:
            return []
    shape = (hi_idx[0] - lo_idx[0] + 1, hi_idx[1] - lo_idx[1] + 1)
    acc = np.ones(shape, dtype=bool)

    def clip(j: int, i_lo: int, i_hi: int) -> tuple[int, int]:
        return max(i_lo, lo_idx[j]) - lo_idx[j], min(i_hi, hi_idx[j]) - lo_idx[j]

    if family == "rco":
        # clear the open interior of every cut, per pattern point
        for level in range(1, query.depth + 1):
            for entry in rect.of_kind("cut", level):
                box = entry.box
                for p in query.points:
                    slab = []
                    for j in range(2):
                        lo = box.center[j] - box.half[j] - lam * p[j]
                        hi = box.center[j] + box.half[j] - lam * p[j]
                        # strict: i*res > lo and i*res < hi
                        i_lo = _floor_div(lo, res) + 1
                        i_hi = _ceil_div(hi, res) - 1
                        a, b = clip(j, i_lo, i_hi)
                        if a > b:
                            slab = None
                            break
                        slab.append((a, b))
                    if slab is not None:
                        acc[slab[0][0]:slab[0][1] + 1,
                            slab[1][0]:slab[1][1] + 1] = False
    else:
        if query.depth >= 1:
            # intersect per pattern point the union of level-depth components
            for p in query.points:
                mask = np.zeros(shape, dtype=bool)
                for entry in rect.of_kind("comp", query.depth):
                    box = entry.box
                    slab = []
                    for j in range(2):
                        lo = box.center[j] - box.half[j] - lam * p[j]
                        hi = box.center[j] + box.half[j] - lam * p[j]
                        i_lo = _ceil_div(lo, res)
                        i_hi = _floor_div(hi, res)
                        a, b = clip(j, i_lo, i_hi)
                        if a > b:
                            slab = None
                            break
                        slab.append((a, b))
                    if slab is not None:
                        mask[slab[0][0]:slab[0][1] + 1,
                             slab[1][0]:slab[1][1] + 1] = True
                acc &= mask

    out = []
    for ix, iy in np.argwhere(acc):
        out.append(PatternCandidate(
            lam,
            ((lo_idx[0] + int(ix)) * res, (lo_idx[1] + int(iy)) * res),
            query.depth,
        ))
    return out


def _ordered_map(
    fn: Callable[[_T], _R], items: Sequence[_T], threads: int
) -> list[_R]:
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with _futures.ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def find_homothety(
    query: PatternQuery,
    rect: RectangleSet,
    threads: int = 1,
    cross_check: int = 8,
) -> tuple[PatternCandidate, ...]:
    """Scan scales and grid translations for depth-consistent pattern copies.

    Returns every (x, lambda) on the grid whose placed pattern passes the
    full query depth — a necessary-condition filter, not a membership proof.
    Scales partition the work (deterministic merge order); the first few
    candidates are re-verified against the exact per-level checker as an
    internal consistency guard.
    """
    family = rect.meta.get("family")
    if family not in ("rco", "rcd"):
        raise ValueError("rectangle set lacks family metadata")
    if query.depth > rect.max_level():
        raise ValueError(
            f"query depth {query.depth} exceeds generated depth {rect.max_level()}"
        )
    res = (
        query.grid_resolution
        if query.grid_resolution is not None
        else _default_resolution(rect, query.depth)
    )
    lams = []
    lam = query.lambda_lo
    while lam <= query.lambda_hi:
        lams.append(lam)
        lam += res
    slices = _ordered_map(
        lambda lv: _scan_one_scale(lv, query, rect, family, res), lams, threads
    )
    out: list[PatternCandidate] = []
    for part in slices:
        out.extend(part)
    for cand in out[:cross_check]:
        report = verify_containment_depth(cand.x, cand.lam, query.points, rect)
        if not report.consistent_to(query.depth):
            raise AssertionError(
                f"grid scan admitted a candidate the exact checker rejects: {cand}"
            )
    return tuple(out)


def candidates_to_csv(candidates: Iterable[PatternCandidate]) -> str:
    lines = ["lambda,x1,x2,max_depth_passed"]
    for cand in candidates:
        lines.append(
            f"{cand.lam},{cand.x[0]},{cand.x[1]},{cand.max_depth_passed}"
        )
    return "\n".join(lines) + "\n"
