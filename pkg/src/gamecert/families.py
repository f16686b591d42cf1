"""Explicit planar self-affine families and their winning budget parameters.

Two families on B[0,1] = [-1,1]^2 under the contraction A = diag(1/U, 1/V):

* Rectangular cut-out family RCO(U, V, m, t): level-k cells are the grid of
  boxes with half-widths (U^-k, V^-k); from the interior of every level-k
  cell (k >= 1), m pairwise disjoint boxes with half-widths
  (U^-(k+t), V^-(k+t)) are removed.  The kept set is the complement of all
  removed boxes.  A member is a choice of removal positions; the certified
  budget rate

      rco_alpha(U, V, m, t, c) = (9m)^(1/c) * (UV)^-t

  wins for EVERY member: a test box the size of a level-k cell touches at
  most 3x3 cells, hence at most 9m removed boxes of exponent k + t.

* Rectangular corner-digit family RCD(U, V): each level-k component (half-
  widths (U^-k, V^-k)) splits into (U-1)(V-1) regions L_i with half-widths
  (1/(U^k(U-1)), 1/(V^k(V-1))); the member keeps, inside each region, one
  child box of half-widths (U^-(k+1), V^-(k+1)) flush in one of the four
  corners (the member's choice, per address).  Removing region-minus-child
  takes

      rcd_cover_count(U, V, t)

  boxes of half-widths (U^-(k+1+t), V^-(k+1+t)) per region — two slab
  orientations, the cheaper wins — and the certified rate is

      rcd_alpha(U, V, c, t)
          = (9 (U-1)(V-1) rcd_cover_count(U,V,t))^(1/c) * (UV)^-(1+t).

All generated geometry is exact (Fractions); budget rates are LogScalars.
"""
from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

import mpmath

from .core import BoxRegion, DiagonalContraction, GameParameters, LogScalar

__all__ = [
    "RcoSpec",
    "RcdSpec",
    "RectEntry",
    "RectangleSet",
    "StrategyLevel",
    "CoveringStrategy",
    "CoverCount",
    "rco_alpha",
    "rcd_cover_count",
    "rcd_alpha",
    "rco_params",
    "rcd_params",
    "generate_rco",
    "generate_rcd",
    "rcd_children",
    "covering_strategy_for_rco",
    "covering_strategy_for_rcd",
]


# --------------------------------------------------------------- family specs


@dataclass(frozen=True)
class RcoSpec:
    """Cut-out family descriptor.

    u, v: axis subdivision counts (cell half-widths shrink by 1/u, 1/v);
    m: removed boxes per cell; t: removal depth offset (removed boxes are
    t levels finer than their cell).  Generation requires integer t;
    the rate formula accepts real t >= 1 via rco_alpha directly.
    """

    u: int
    v: int
    m: int = 1
    t: int = 1

    def __post_init__(self) -> None:
        if self.u < 2 or self.v < 2:
            raise ValueError("subdivision counts must be >= 2")
        if self.m < 1:
            raise ValueError("need at least one removed box per cell")
        if self.t < 1:
            raise ValueError("removal depth offset must be >= 1")
        if self.m > (self.u ** self.t) * (self.v ** self.t):
            raise ValueError(
                f"{self.m} disjoint removals cannot fit in a cell "
                f"({self.u ** self.t * self.v ** self.t} slots)"
            )

    def contraction(self) -> DiagonalContraction:
        return DiagonalContraction.from_denominators((self.u, self.v))


@dataclass(frozen=True)
class RcdSpec:
    """Corner-digit family descriptor.

    corner_rule decides, per child address, which of the four corners the
    kept child box occupies: "fixed" pins the high corner everywhere, "hash"
    derives it deterministically from (corner_seed, address).
    """

    u: int
    v: int
    corner_rule: Literal["fixed", "hash"] = "fixed"
    corner_seed: int = 0

    def __post_init__(self) -> None:
        if self.u < 2 or self.v < 2:
            raise ValueError("subdivision counts must be >= 2")
        if self.corner_rule not in ("fixed", "hash"):
            raise ValueError(f"unknown corner rule {self.corner_rule!r}")

    def contraction(self) -> DiagonalContraction:
        return DiagonalContraction.from_denominators((self.u, self.v))

    def corner_signs(self, address: str) -> tuple[int, int]:
        """(+-1, +-1): which corner of its region the child at `address` takes."""
        if self.corner_rule == "fixed":
            return (1, 1)
        rnd = random.Random(f"{self.corner_seed}|{address}")
        bits = rnd.randrange(4)
        return (1 if bits & 1 else -1, 1 if bits & 2 else -1)


# ------------------------------------------------------------- budget rates


def rco_alpha(u: int, v: int, m: int, t: float, c: float) -> LogScalar:
    """(9m)^(1/c) * (uv)^-t as a LogScalar.  Any real t > 0 is allowed."""
    if not (0.0 < c < 1.0):
        raise ValueError(f"exponent c must lie in (0,1), got {c!r}")
    if t <= 0:
        raise ValueError("removal depth offset must be positive")
    if m < 1 or u < 2 or v < 2:
        raise ValueError("invalid family parameters")
    return LogScalar(math.log(9 * m) / c - t * (math.log(u) + math.log(v)))


@dataclass(frozen=True)
class CoverCount:
    """Number of equal boxes covering one region-minus-child slab pair."""

    value: int
    tag: str              # "exact" | "approximate" (ceiling args >= 2^53)
    option: int           # 1 = x-strip full height first, 2 = transposed

    def __post_init__(self) -> None:
        if self.tag not in ("exact", "approximate"):
            raise ValueError(f"unknown tag {self.tag!r}")
        if self.option not in (1, 2):
            raise ValueError("option must be 1 or 2")
        if self.value < 2:
            raise ValueError("a slab pair always needs at least two boxes")


def _ceil_int_pow(base: int, num_exp: int, den: int) -> int:
    """ceil(base^num_exp / den) exactly (integers)."""
    return -((-(base ** num_exp)) // den)


def _guarded_ceil(base: int, exponent: float, den: int) -> tuple[int, bool]:
    """ceil(base^exponent / den) with an exactness guarantee where possible.

    Every float exponent is exactly a rational p/q; when q and the magnitude
    are modest the ceiling is settled by big-integer comparison
    (z*den)^q >= base^p, which is exact even when base^exponent is itself an
    integer.  Otherwise mpmath evaluates at (magnitude + 40) digits and
    brackets with x*(1 +- eps): agreement certifies the value, disagreement
    returns the upper one with exact=False (larger cover counts only weaken
    the certificate, so rounding up is the conservative direction).
    """
    frac = Fraction(exponent)
    p, q = frac.numerator, frac.denominator
    digits = int(exponent * math.log10(base)) + 40
    if q <= 64 and p * math.log10(base) <= 20000:
        target = base ** p
        with mpmath.workdps(max(30, digits)):
            z = int(mpmath.ceil(mpmath.power(base, exponent) / den))
        while z >= 1 and ((z - 1) * den) ** q >= target:
            z -= 1
        while (z * den) ** q < target:
            z += 1
        return (z, True)
    with mpmath.workdps(max(30, digits)):
        x = mpmath.power(base, exponent) / den
        eps = mpmath.mpf(10) ** (-(digits - 15))
        lo = int(mpmath.ceil(x * (1 - eps)))
        hi = int(mpmath.ceil(x * (1 + eps)))
    return (hi, lo == hi)


def rcd_cover_count(u: int, v: int, t: float) -> CoverCount:
    """Boxes of half-widths (u^-(k+1+t), v^-(k+1+t)) needed per region slab pair.

    Option 1 covers the x-strip at full region height and the remaining
    y-strip at child width; option 2 transposes the roles:

        n1 = ceil(u^t/(u-1)) * ceil(v^(t+1)/(v-1)) + ceil(u^t) * ceil(v^t/(v-1))
        n2 = ceil(u^(t+1)/(u-1)) * ceil(v^t/(v-1)) + ceil(v^t) * ceil(u^t/(u-1))

    The smaller wins; ties go to option 1.
    """
    if u < 2 or v < 2:
        raise ValueError("subdivision counts must be >= 2")
    if t <= 0:
        raise ValueError("cover depth offset must be positive")
    if float(t).is_integer():
        ti = int(t)
        a = _ceil_int_pow(u, ti, u - 1)
        b = _ceil_int_pow(v, ti + 1, v - 1)
        cc = u ** ti
        d = _ceil_int_pow(v, ti, v - 1)
        n1 = a * b + cc * d
        a2 = _ceil_int_pow(u, ti + 1, u - 1)
        c2 = v ** ti
        n2 = a2 * d + c2 * a
        exact = True
    else:
        a, ea = _guarded_ceil(u, t, u - 1)
        b, eb = _guarded_ceil(v, t + 1, v - 1)
        cc, ec = _guarded_ceil(u, t, 1)
        d, ed = _guarded_ceil(v, t, 1)
        dd, edd = _guarded_ceil(v, t, v - 1)
        a2, ea2 = _guarded_ceil(u, t + 1, u - 1)
        n1 = a * b + cc * dd
        n2 = a2 * dd + d * a
        exact = all((ea, eb, ec, ed, edd, ea2))
    value, option = (n1, 1) if n1 <= n2 else (n2, 2)
    tag = "exact" if exact and value < 2 ** 53 else "approximate"
    return CoverCount(value, tag, option)


def rcd_alpha(
    u: int, v: int, c: float, t: float, cover_count: CoverCount | None = None
) -> LogScalar:
    """(9 (u-1)(v-1) rcd_cover_count(u,v,t))^(1/c) * (uv)^-(1+t), real t > 0.

    Only the touch count is raised to 1/c; the (uv)^-(1+t) scale factor is
    the per-move mass ratio and stays outside the power.
    """
    if not (0.0 < c < 1.0):
        raise ValueError(f"exponent c must lie in (0,1), got {c!r}")
    nt = cover_count if cover_count is not None else rcd_cover_count(u, v, t)
    count = 9 * (u - 1) * (v - 1) * nt.value
    return LogScalar(math.log(count) / c - (1 + t) * (math.log(u) + math.log(v)))


def rco_params(spec: RcoSpec, c: float, t: float | None = None) -> GameParameters:
    """Winning tuple for every member of the cut-out family at exponent c."""
    return GameParameters(
        rco_alpha(spec.u, spec.v, spec.m, spec.t if t is None else t, c),
        spec.contraction(),
        c,
    )


def rcd_params(spec: RcdSpec, c: float, t: float) -> GameParameters:
    """Winning tuple for every member of the corner-digit family at (c, t)."""
    return GameParameters(
        rcd_alpha(spec.u, spec.v, c, t), spec.contraction(), c
    )


# ----------------------------------------------------------- rectangle sets


@dataclass(frozen=True)
class RectEntry:
    level: int
    address: str        # "kind:path", kind in {cell, cut, comp, cover}
    box: BoxRegion

    @property
    def kind(self) -> str:
        return self.address.split(":", 1)[0]


@dataclass
class RectangleSet:
    """A finite collection of labelled planar boxes, CSV/PBM serializable."""

    entries: list[RectEntry]
    meta: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.entries.sort(key=lambda e: (e.level, e.address))

    def of_kind(self, kind: str, level: int | None = None) -> list[RectEntry]:
        return [
            e
            for e in self.entries
            if e.kind == kind and (level is None or e.level == level)
        ]

    def max_level(self) -> int:
        return max(e.level for e in self.entries)

    # -- CSV ------------------------------------------------------------

    @staticmethod
    def _fmt(x: Fraction | float) -> str:
        if isinstance(x, Fraction):
            return f"{x.numerator}/{x.denominator}"
        return "%.17g" % x

    @staticmethod
    def _parse(s: str) -> Fraction | float:
        if "/" in s:
            num, den = s.split("/")
            return Fraction(int(num), int(den))
        return float(s)

    def to_csv(self) -> str:
        out = io.StringIO()
        for key in sorted(self.meta):
            out.write(f"# {key} = {self.meta[key]}\n")
        out.write("level,address,cx,cy,hx,hy\n")
        for e in self.entries:
            cx, cy = e.box.center
            hx, hy = e.box.half
            out.write(
                f"{e.level},{e.address},{self._fmt(cx)},{self._fmt(cy)},"
                f"{self._fmt(hx)},{self._fmt(hy)}\n"
            )
        return out.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "RectangleSet":
        meta: dict[str, str] = {}
        rows: list[str] = []
        for line in text.splitlines():
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, val = body.split("=", 1)
                    meta[key.strip()] = val.strip()
            elif line.strip():
                rows.append(line)
        if not rows or rows[0] != "level,address,cx,cy,hx,hy":
            raise ValueError("missing rectangle-set CSV header")
        entries = []
        for row in csv.reader(rows[1:]):
            level, address, cx, cy, hx, hy = row
            entries.append(
                RectEntry(
                    int(level),
                    address,
                    BoxRegion(
                        (cls._parse(cx), cls._parse(cy)),
                        (cls._parse(hx), cls._parse(hy)),
                    ),
                )
            )
        return cls(entries, meta)

    # -- PBM (visualization only; float arithmetic) ----------------------

    def to_pbm(self, width: int = 256, height: int = 256) -> str:
        """P1 bitmap of the kept region at the deepest generated level.

        Cut-out sets render as the root box minus all removed boxes;
        corner-digit sets as the union of the deepest components.  Pixels
        are sampled at their centers over [-1,1]^2; 1 = kept (black).
        """
        import numpy as np

        xs = np.linspace(-1 + 1 / width, 1 - 1 / width, width)
        ys = np.linspace(1 - 1 / height, -1 + 1 / height, height)
        gx, gy = np.meshgrid(xs, ys)
        cuts = self.of_kind("cut")
        if cuts:
            keep = np.ones((height, width), dtype=bool)
            for e in cuts:
                cx, cy = (float(c) for c in e.box.center)
                hx, hy = (float(h) for h in e.box.half)
                keep &= ~((np.abs(gx - cx) <= hx) & (np.abs(gy - cy) <= hy))
        else:
            deepest = self.max_level()
            keep = np.zeros((height, width), dtype=bool)
            for e in self.of_kind("comp", deepest):
                cx, cy = (float(c) for c in e.box.center)
                hx, hy = (float(h) for h in e.box.half)
                keep |= (np.abs(gx - cx) <= hx) & (np.abs(gy - cy) <= hy)
        lines = [f"P1\n{width} {height}"]
        for row in keep.astype(int):
            lines.append(" ".join(map(str, row)))
        return "\n".join(lines) + "\n"


# ----------------------------------------------------------------- generators


def _rco_slots(spec: RcoSpec, level: int, address: str, seed: int) -> list[tuple[int, int]]:
    """Removal slot indices inside one cell (sub-grid of u^t x v^t slots)."""
    nx, ny = spec.u ** spec.t, spec.v ** spec.t
    rnd = random.Random(f"{seed}|{level}|{address}")
    picked: set[tuple[int, int]] = set()
    while len(picked) < spec.m:
        picked.add((rnd.randrange(nx), rnd.randrange(ny)))
    return sorted(picked)


def generate_rco(
    spec: RcoSpec,
    depth: int,
    placement: Literal["corner", "hash"] = "corner",
    seed: int = 0,
) -> RectangleSet:
    """Exact geometry of one cut-out member down to `depth` levels.

    Emits the level-k cells (kind "cell") and removed boxes (kind "cut") for
    k = 1..depth.  placement="corner" packs the m removals row-major against
    the cell's low corner (the adversarial arrangement for touch counts);
    "hash" draws distinct slots deterministically from `seed`.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    u, v, m, t = spec.u, spec.v, spec.m, spec.t
    entries: list[RectEntry] = []
    for k in range(1, depth + 1):
        chx, chy = Fraction(1, u ** k), Fraction(1, v ** k)
        cutx, cuty = Fraction(1, u ** (k + t)), Fraction(1, v ** (k + t))
        for i in range(u ** k):
            for j in range(v ** k):
                path = f"{i}_{j}"
                cx = -1 + (2 * i + 1) * chx
                cy = -1 + (2 * j + 1) * chy
                entries.append(
                    RectEntry(k, f"cell:{path}", BoxRegion((cx, cy), (chx, chy)))
                )
                if placement == "corner":
                    slots = [(s % u ** t, s // u ** t) for s in range(m)]
                else:
                    slots = _rco_slots(spec, k, path, seed)
                for ordinal, (a, b) in enumerate(slots):
                    ox = cx - chx + (2 * a + 1) * cutx
                    oy = cy - chy + (2 * b + 1) * cuty
                    entries.append(
                        RectEntry(
                            k,
                            f"cut:{path}/{ordinal}",
                            BoxRegion((ox, oy), (cutx, cuty)),
                        )
                    )
    meta = {
        "family": "rco",
        "u": str(u),
        "v": str(v),
        "m": str(m),
        "t": str(t),
        "depth": str(depth),
        "placement": placement,
        "seed": str(seed),
    }
    return RectangleSet(entries, meta)


def rcd_children(
    spec: RcdSpec, level: int, address: str, component: BoxRegion
) -> list[tuple[int, BoxRegion, BoxRegion]]:
    """(digit, region L_i, kept child box) for one level-`level` component.

    Children are indexed i = s + (tt-1)(u-1), s = 1..u-1, tt = 1..v-1; region
    centers sit at component_center + ((2s-u)/(u^level (u-1)),
    (2tt-v)/(v^level (v-1))) with half-widths (1/(u^level (u-1)),
    1/(v^level (v-1))); the child box (half-widths (u^-(level+1), v^-(level+1)))
    is flush in the corner chosen by the member's corner rule.
    """
    u, v = spec.u, spec.v
    k = level
    lhx = Fraction(1, u ** k * (u - 1))
    lhy = Fraction(1, v ** k * (v - 1))
    chx = Fraction(1, u ** (k + 1))
    chy = Fraction(1, v ** (k + 1))
    out = []
    for tt in range(1, v):
        for s in range(1, u):
            digit = s + (tt - 1) * (u - 1)
            lcx = component.center[0] + Fraction(2 * s - u, u ** k * (u - 1))
            lcy = component.center[1] + Fraction(2 * tt - v, v ** k * (v - 1))
            sx, sy = spec.corner_signs(f"{address}/{digit}")
            ccx = lcx + sx * (lhx - chx)
            ccy = lcy + sy * (lhy - chy)
            out.append(
                (
                    digit,
                    BoxRegion((lcx, lcy), (lhx, lhy)),
                    BoxRegion((ccx, ccy), (chx, chy)),
                )
            )
    return out


def generate_rcd(spec: RcdSpec, depth: int) -> RectangleSet:
    """Exact geometry of one corner-digit member: components of levels 1..depth."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    entries: list[RectEntry] = []
    root = BoxRegion((Fraction(0), Fraction(0)), (Fraction(1), Fraction(1)))
    frontier: list[tuple[str, BoxRegion]] = [("r", root)]
    for k in range(depth):
        next_frontier: list[tuple[str, BoxRegion]] = []
        for address, comp in frontier:
            for digit, _region, child in rcd_children(spec, k, address, comp):
                child_addr = f"{address}/{digit}"
                entries.append(RectEntry(k + 1, f"comp:{child_addr}", child))
                next_frontier.append((child_addr, child))
        frontier = next_frontier
    meta = {
        "family": "rcd",
        "u": str(spec.u),
        "v": str(spec.v),
        "corner_rule": spec.corner_rule,
        "corner_seed": str(spec.corner_seed),
        "depth": str(depth),
    }
    return RectangleSet(entries, meta)


# ----------------------------------------------------- covering strategies


@dataclass(frozen=True)
class StrategyLevel:
    """One response set: boxes of exponent `exponent`, budgeted at rate a_k.

    `preamble` marks a set that precedes any numbered move (the corner-digit
    strategy's level-0 covers; see covering_strategy_for_rcd).
    """

    level: int
    exponent: int
    budget_rate_log: float       # ln(a_k)
    preamble: bool
    boxes: tuple[BoxRegion, ...]


@dataclass(frozen=True)
class CoveringStrategy:
    """A deletion plan certifying a winning tuple for one family member.

    Soundness contract (checked by the gamesim oracles):
      1. completeness — everything the member removes between consecutive
         levels is inside the union of that level's boxes;
      2. budget — any test box A^k(B[0, rho1]) + z touches level-k boxes of
         total mass at most (a_k * prod_j beta_j^k)^c.
    The certified rate is alpha = sup_k a_k.
    """

    params: GameParameters
    kind: str                    # "rco" | "rcd"
    levels: tuple[StrategyLevel, ...]

    def level(self, k: int) -> StrategyLevel | None:
        for lv in self.levels:
            if lv.level == k:
                return lv
        return None


def covering_strategy_for_rco(
    member: RectangleSet, c: float
) -> CoveringStrategy:
    """Deletion plan for a generated cut-out member: delete its own removals.

    Level k (k >= 1, a game move each) deletes the member's level-k removed
    boxes with exponent q = k + t; a test box of level-k cell size touches at
    most 3x3 cells and so at most 9m boxes, which is exactly the budget at
    rate a_k = (9m)^(1/c) (uv)^-t, uniformly in k.
    """
    meta = member.meta
    if meta.get("family") != "rco":
        raise ValueError("expected a generated cut-out member")
    u, v, m, t = (int(meta[key]) for key in ("u", "v", "m", "t"))
    spec = RcoSpec(u, v, m, t)
    alpha = rco_alpha(u, v, m, t, c)
    params = GameParameters(alpha, spec.contraction(), c)
    levels = []
    for k in range(1, member.max_level() + 1):
        boxes = tuple(e.box for e in member.of_kind("cut", k))
        levels.append(StrategyLevel(k, k + t, alpha.log, False, boxes))
    return CoveringStrategy(params, "rco", tuple(levels))


def _tile_axis(lo: Fraction, hi: Fraction, h: Fraction) -> list[Fraction]:
    """Centers of boxes of half-width h covering [lo, hi], flush-trimmed.

    Boxes march from lo; the last is pulled back flush to hi so every box
    stays inside [lo, hi] whenever hi - lo >= 2h.  (For slabs thinner than
    one box — possible only for non-integer cover depths — the single box
    is centered and overhangs both sides.)
    """
    width = hi - lo
    if width <= 2 * h:
        return [(lo + hi) / 2]
    count = -((-width) // (2 * h))  # ceil(width / (2h))
    centers = [lo + (2 * i + 1) * h for i in range(count - 1)]
    centers.append(hi - h)
    return centers


def _cover_piece(
    region: BoxRegion, child: BoxRegion, hx: Fraction, hy: Fraction
) -> tuple[list[BoxRegion], int]:
    """Cover region-minus-child with boxes of half-widths (hx, hy).

    Returns (boxes, option): option 1 runs the x-strip at full region
    height plus the leftover y-strip at child width; option 2 transposes.
    The cheaper option wins, ties to option 1.
    """
    sx = 1 if child.center[0] > region.center[0] else -1
    sy = 1 if child.center[1] > region.center[1] else -1
    # x-strip: region minus the child's x-span; child-span strip likewise in y
    if sx > 0:
        xs_lo, xs_hi = region.low(0), child.low(0)
    else:
        xs_lo, xs_hi = child.high(0), region.high(0)
    if sy > 0:
        ys_lo, ys_hi = region.low(1), child.low(1)
    else:
        ys_lo, ys_hi = child.high(1), region.high(1)
    cx_lo, cx_hi = child.low(0), child.high(0)
    cy_lo, cy_hi = child.low(1), child.high(1)

    def rect_cover(x0, x1, y0, y1) -> list[BoxRegion]:
        return [
            BoxRegion((cx, cy), (hx, hy))
            for cx in _tile_axis(x0, x1, hx)
            for cy in _tile_axis(y0, y1, hy)
        ]

    opt1 = rect_cover(xs_lo, xs_hi, region.low(1), region.high(1)) + rect_cover(
        cx_lo, cx_hi, ys_lo, ys_hi
    )
    opt2 = rect_cover(region.low(0), region.high(0), ys_lo, ys_hi) + rect_cover(
        xs_lo, xs_hi, cy_lo, cy_hi
    )
    if len(opt1) <= len(opt2):
        return opt1, 1
    return opt2, 2


def covering_strategy_for_rcd(
    spec: RcdSpec, c: float, t: int, depth: int
) -> CoveringStrategy:
    """Deletion plan for a corner-digit member down to `depth` levels.

    Level k (k = 0..depth-1) covers, for every level-k component, each
    region-minus-child slab pair with rcd_cover_count(u, v, t) boxes of
    exponent q = k + 1 + t.  A test box of level-k component size touches
    at most 3x3 components, hence at most 9 (u-1)(v-1) rcd_cover_count
    boxes: rate a_k = (9 (u-1)(v-1) count)^(1/c) (uv)^-(1+t) uniformly.

    Level 0 precedes any numbered move (the numbered response at move m is
    the level-m set); the simulator grants its deletions up front and
    accounts for them separately.  Exact cover geometry needs integer t.
    """
    if not isinstance(t, int) or t < 1:
        raise ValueError("exact cover geometry requires integer t >= 1")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    u, v = spec.u, spec.v
    count = rcd_cover_count(u, v, t)
    alpha = rcd_alpha(u, v, c, t, count)
    params = GameParameters(alpha, spec.contraction(), c)
    root = BoxRegion((Fraction(0), Fraction(0)), (Fraction(1), Fraction(1)))
    frontier: list[tuple[str, BoxRegion]] = [("r", root)]
    levels = []
    for k in range(depth):
        q = k + 1 + t
        hx, hy = Fraction(1, u ** q), Fraction(1, v ** q)
        boxes: list[BoxRegion] = []
        next_frontier: list[tuple[str, BoxRegion]] = []
        for address, comp in frontier:
            for digit, region, child in rcd_children(spec, k, address, comp):
                piece_boxes, option = _cover_piece(region, child, hx, hy)
                if len(piece_boxes) != count.value:
                    raise AssertionError(
                        f"cover construction produced {len(piece_boxes)} boxes, "
                        f"count formula says {count.value}"
                    )
                boxes.extend(piece_boxes)
                next_frontier.append((f"{address}/{digit}", child))
        levels.append(StrategyLevel(k, q, alpha.log, k == 0, tuple(boxes)))
        frontier = next_frontier
    return CoveringStrategy(params, "rcd", tuple(levels))
