"""Search for winning parameters: best witness, largest pattern count, best dim.

Everything here is glorified grid search over the few free knobs the
certificates leave open:

* the witness delta — `delta_max` finds the largest admissible witness for a
  given combined budget rate by walking the free-step lattice (the admissible
  region is a union of per-N slices, each cut off where condition (2) loses
  its margin); the best dimension usually sits strictly below the largest
  witness, so `_sweep_delta` then scans a geometric grid with zoom passes;
* the budget exponent c — geometric grid in s = 1 - c, refined around the
  winner (the optimum c typically sits close to 1);
* the depth offset t of corner families — uniform grid plus probes just
  below each integer, where the ceiling counts in the slab cover drop and
  the budget rate improves discontinuously.

All searches are deterministic: fixed grids from the config, sequential
reduction in grid order, ties broken toward smaller (c, delta, t).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Sequence

from .certify import (
    Certificate,
    PatternBound,
    _pack_constant,
    condition2_parts,
    intersect_certificate,
    pattern_certificate,
    pattern_dim_bound,
    pattern_feasible,
)
from .core import (
    REL_MARGIN,
    DiagonalContraction,
    LogScalar,
    combine_alphas,
    safe_floor_ratio,
)
from .families import CoverCount, RcdSpec, RcoSpec, rcd_alpha, rcd_cover_count, rco_alpha

__all__ = [
    "SearchConfig",
    "DeltaChoice",
    "SearchResult",
    "SmallestU",
    "delta_max",
    "optimize_pattern_count",
    "optimize_dimension",
    "optimize_intersection",
    "smallest_u_for_patterns",
    "DEFAULT_CONFIG",
]


@dataclass(frozen=True)
class SearchConfig:
    """Deterministic search grids; every field has a reproducible default."""

    c_count: int = 32                     # points in the coarse 1-c grid
    c_s_lo: float = 1e-4                  # smallest 1-c
    c_s_hi: float = 0.6                   # largest 1-c
    refine_passes: int = 2                # zoom passes around the winner
    refine_points: int = 9                # points per refined axis
    delta_samples: int = 24               # witness sweep resolution
    delta_floor_factor: float = 1e-6      # sweep starts at delta_max * this
    delta_head_factor: float = 1e-9       # sweep ends at delta_max * (1-this)
    t_lo: float = 0.25
    t_hi: float = 6.0
    t_step: float = 0.25
    t_integer_offsets: tuple[float, ...] = (1e-5, 1e-8)
    pattern_cap: int = 1 << 40            # never search beyond this count
    threads: int = 1
    trace_path: str | None = None


DEFAULT_CONFIG = SearchConfig()


@dataclass(frozen=True)
class DeltaChoice:
    """Largest admissible witness for one combined rate (condition (2) only)."""

    delta: float
    free_steps: int
    tag: str                              # floor tag: "exact" | "approximate"


def _flat_steps(contraction: DiagonalContraction) -> int:
    """Smallest N beyond which every 5 beta_j^N sits below 2^-60.

    Past this point the left side of condition (2) is saturated to within
    one part in 2^57, far inside the 2^-40 margin we demand anyway.
    """
    n = 1
    for b in contraction.betas:
        n = max(n, int(math.ceil((60.0 * math.log(2.0) + math.log(5.0)) / -math.log(b))))
    return n


def _admit(
    contraction: DiagonalContraction, combined_alpha: LogScalar, delta: float
) -> DeltaChoice | None:
    """Accept a candidate only if the report's own margin test passes on it.

    The analytic cap rounds through a multiply and a divide, which can leave
    the final margin one ulp short; stepping down a few ulps restores it
    without measurably moving the witness.
    """
    for _ in range(8):
        check = safe_floor_ratio(LogScalar.from_value(delta), combined_alpha)
        if not check.usable or check.value < 1:
            return None
        lhs, rhs = condition2_parts(contraction, delta, check.value)
        if rhs <= lhs * (1.0 - REL_MARGIN):
            return DeltaChoice(delta, check.value, check.tag)
        delta = math.nextafter(delta, 0.0)
    return None


def delta_max(
    contraction: DiagonalContraction, combined_alpha: LogScalar
) -> DeltaChoice | None:
    """Largest delta whose condition (2) holds with margin at N = floor(delta/rate).

    The admissible set is a union of slices: on the slice with free-step
    count N the witness ranges over [N*rate, (N+1)*rate) capped at
    lhs2(N) * (1 - margin) / pack.  The cap saturates once beta^N dies out,
    so only the first `_flat_steps` slices need individual attention; the
    tail is handled by one floor computation against the saturated cap.
    """
    if combined_alpha.is_zero() or combined_alpha.log >= 0.0:
        return None
    n = contraction.n
    pack = _pack_constant(n)
    margin = 1.0 - REL_MARGIN

    def cap(steps: int) -> float:
        lhs, _ = condition2_parts(contraction, 1.0, steps)
        return lhs * margin / pack

    best: DeltaChoice | None = None
    flat = _flat_steps(contraction)
    if combined_alpha.log > -650.0:
        rate = math.exp(combined_alpha.log)
        for steps in range(1, flat + 1):
            hi = min(cap(steps), (steps + 1) * rate * (1.0 - 2.0 ** -40))
            if hi <= steps * rate or hi <= 0.0 or hi >= 1.0:
                continue
            check = safe_floor_ratio(LogScalar.from_value(hi), combined_alpha)
            if not check.usable or check.value < 1:
                continue
            if hi > cap(check.value):
                continue
            choice = _admit(contraction, combined_alpha, hi)
            if choice is None:
                continue
            if best is None or choice.delta > best.delta:
                best = choice
    saturated = cap(flat)
    if 0.0 < saturated < 1.0:
        check = safe_floor_ratio(LogScalar.from_value(saturated), combined_alpha)
        if check.usable and check.value > flat:
            choice = _admit(contraction, combined_alpha, saturated)
            if choice is not None and (best is None or choice.delta > best.delta):
                best = choice
    return best


# ------------------------------------------------------------ grid builders


def _c_grid(config: SearchConfig) -> tuple[float, ...]:
    if config.c_count < 2:
        return (1.0 - config.c_s_lo,)
    ratio = (config.c_s_hi / config.c_s_lo) ** (1.0 / (config.c_count - 1))
    values = []
    for i in range(config.c_count):
        s = config.c_s_lo * ratio ** i
        c = 1.0 - s
        if 0.0 < c < 1.0:
            values.append(c)
    return tuple(sorted(set(values)))


def _t_grid(config: SearchConfig) -> tuple[float, ...]:
    values: set[float] = set()
    steps = int(round((config.t_hi - config.t_lo) / config.t_step))
    for i in range(steps + 1):
        values.add(config.t_lo + i * config.t_step)
    for j in range(1, int(config.t_hi) + 1):
        for off in config.t_integer_offsets:
            if j - off > 0.0:
                values.add(j - off)
    return tuple(sorted(values))


def _geom(lo: float, hi: float, count: int) -> tuple[float, ...]:
    if count < 2 or lo >= hi:
        return (hi,)
    ratio = (hi / lo) ** (1.0 / (count - 1))
    return tuple(lo * ratio ** i for i in range(count))


def _refine_c(best_c: float, grid: Sequence[float], count: int) -> tuple[float, ...]:
    """Geometric sub-grid in s = 1-c between the winner's grid neighbours."""
    s_vals = sorted(1.0 - c for c in grid)
    s_best = 1.0 - best_c
    idx = min(range(len(s_vals)), key=lambda i: abs(s_vals[i] - s_best))
    lo = s_vals[idx - 1] if idx > 0 else s_vals[idx] * 0.5
    hi = s_vals[idx + 1] if idx + 1 < len(s_vals) else s_vals[idx] * 2.0
    hi = min(hi, 0.999999)
    return tuple(sorted(1.0 - s for s in _geom(lo, hi, count) if 0.0 < 1.0 - s < 1.0))


def _refine_t(best_t: float, grid: Sequence[float], count: int) -> tuple[float, ...]:
    """Neighbourhood of the winning depth offset.

    Near-integer winners refine along a ladder approaching the integer from
    below (the cover count is piecewise constant there and drops at the
    integer itself); otherwise a uniform span between grid neighbours.
    """
    j = math.ceil(best_t - 1e-12)
    if 0.0 < j - best_t < 0.01:
        ladder = [j - off for off in
                  (1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6, 1e-6, 1e-7, 1e-8)]
        return tuple(sorted(t for t in ladder if t > 0.0))
    ordered = sorted(set(grid))
    idx = min(range(len(ordered)), key=lambda i: abs(ordered[i] - best_t))
    lo = ordered[idx - 1] if idx > 0 else max(ordered[idx] * 0.5, 1e-3)
    hi = ordered[idx + 1] if idx + 1 < len(ordered) else ordered[idx] * 1.5
    if count < 2:
        return (best_t,)
    step = (hi - lo) / (count + 1)
    return tuple(lo + step * (i + 1) for i in range(count))


# ----------------------------------------------------------------- engine


def _best_pattern_count(
    alpha: LogScalar,
    contraction: DiagonalContraction,
    c: float,
    cap: int,
) -> tuple[int, DeltaChoice | None]:
    """Largest certifiable pattern count at (alpha, c), each M given its own
    best witness.  Feasibility is antitone in M in practice; a short upward
    walk after the binary search guards the few boundary cases."""

    def attempt(m: int) -> DeltaChoice | None:
        combined = LogScalar(math.log(m) / c + alpha.log)
        if combined.log >= 0.0:
            return None
        choice = delta_max(contraction, combined)
        if choice is None:
            return None
        if pattern_feasible(alpha, contraction, c, choice.delta, m).feasible:
            return choice
        return None

    first = attempt(1)
    if first is None:
        return 0, None
    lo, lo_choice = 1, first
    while lo < cap:
        probe = attempt(lo * 2)
        if probe is None:
            break
        lo, lo_choice = lo * 2, probe
    hi = min(lo * 2, cap + 1)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        probe = attempt(mid)
        if probe is not None:
            lo, lo_choice = mid, probe
        else:
            hi = mid
    for _ in range(8):                       # non-monotone boundary guard
        if lo >= cap:
            break
        probe = attempt(lo + 1)
        if probe is None:
            break
        lo, lo_choice = lo + 1, probe
    return lo, lo_choice


def _sweep_delta(
    alpha: LogScalar,
    contraction: DiagonalContraction,
    c: float,
    pattern_count: int,
    choice: DeltaChoice,
    config: SearchConfig,
) -> PatternBound | None:
    """Best stated dimension bound over witnesses below the maximum one."""
    lo = choice.delta * config.delta_floor_factor
    hi = choice.delta * (1.0 - config.delta_head_factor)
    best: PatternBound | None = None
    best_delta = hi
    points = _geom(lo, hi, config.delta_samples)
    for _ in range(config.refine_passes + 1):
        for d in points:
            bound = pattern_dim_bound(alpha, contraction, c, d, pattern_count)
            if bound.report.feasible and (best is None or bound.stated > best.stated):
                best, best_delta = bound, d
        if best is None:
            return None
        ratio = (hi / lo) ** (1.0 / max(config.delta_samples - 1, 1))
        lo = best_delta / ratio
        hi = min(best_delta * ratio, choice.delta * (1.0 - config.delta_head_factor))
        points = _geom(lo, hi, config.delta_samples)
    return best


@dataclass(frozen=True)
class _Point:
    pattern_count: int
    dim: float
    dim_combined: float
    c: float
    t: float
    delta: float
    free_steps: int
    alpha_log: float


@dataclass(frozen=True)
class SearchResult:
    """Outcome of a parameter search, with the certificate of the winner."""

    kind: str                             # "cutout" | "corner" | "intersection"
    feasible: bool
    pattern_count: int
    c: float
    t: float | None
    delta: float
    free_steps: int
    alpha_log: float
    dim_bound: float                      # stated (per-set rate) bound
    dim_bound_combined: float
    probes: int
    certificate: Certificate | None
    trace: tuple[str, ...] = ()


def _parallel_map(fn: Callable, items: Sequence, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _better(a: _Point | None, b: _Point | None) -> _Point | None:
    if a is None:
        return b
    if b is None:
        return a
    ka = (a.pattern_count, a.dim, -a.c, -a.delta, -a.t)
    kb = (b.pattern_count, b.dim, -b.c, -b.delta, -b.t)
    return a if ka >= kb else b


def _search(
    contraction: DiagonalContraction,
    alpha_fn: Callable[[float, float], LogScalar | None],
    t_values: Sequence[float],
    config: SearchConfig,
    want_patterns: bool,
) -> tuple[_Point | None, int, list[str]]:
    cap = config.pattern_cap if want_patterns else 1
    probes = 0
    trace: list[str] = []

    def eval_cell(cell: tuple[float, float]) -> _Point | None:
        t, c = cell
        alpha = alpha_fn(c, t)
        if alpha is None or alpha.log >= 0.0:
            return None
        count, choice = _best_pattern_count(alpha, contraction, c, cap)
        if count < 1 or choice is None:
            return None
        bound = _sweep_delta(alpha, contraction, c, count, choice, config)
        if bound is None:
            return None
        return _Point(
            count, bound.stated, bound.combined, c, t,
            bound.report.delta, bound.report.free_steps.value, alpha.log,
        )

    def run_grid(ts: Sequence[float], cs: Sequence[float]) -> _Point | None:
        nonlocal probes
        cells = [(t, c) for t in ts for c in cs]
        probes += len(cells)
        results = _parallel_map(eval_cell, cells, config.threads)
        local: _Point | None = None
        for point in results:
            if point is not None and config.trace_path is not None:
                trace.append(
                    "t=%.17g c=%.17g count=%d dim=%.17g delta=%.17g"
                    % (point.t, point.c, point.pattern_count, point.dim, point.delta)
                )
            local = _better(local, point)
        return local

    best = run_grid(t_values, _c_grid(config))
    if best is None:
        return None, probes, trace
    c_grid = list(_c_grid(config))
    t_grid = list(t_values)
    for _ in range(config.refine_passes):
        cs = _refine_c(best.c, c_grid, config.refine_points)
        if len(t_grid) > 1:
            ts = _refine_t(best.t, t_grid, config.refine_points)
        else:
            ts = tuple(t_grid)
        candidate = run_grid(ts, cs)
        best = _better(best, candidate)
        c_grid = sorted(set(c_grid) | set(cs))
        t_grid = sorted(set(t_grid) | set(ts))
    return best, probes, trace


def _write_trace(config: SearchConfig, lines: Sequence[str]) -> None:
    if config.trace_path is not None:
        with open(config.trace_path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + ("\n" if lines else ""))


def _family_extras(family: RcoSpec | RcdSpec) -> dict[str, str]:
    if isinstance(family, RcoSpec):
        return {
            "family.kind": "cutout",
            "family.u": str(family.u),
            "family.v": str(family.v),
            "family.m": str(family.m),
            "family.t": str(family.t),
        }
    return {
        "family.kind": "corner",
        "family.u": str(family.u),
        "family.v": str(family.v),
    }


def _result_from_point(
    kind: str,
    point: _Point | None,
    probes: int,
    trace: list[str],
    contraction: DiagonalContraction,
    alpha_fn: Callable[[float, float], LogScalar | None],
    rho2: float,
    extras: dict[str, str],
    member_alphas: Callable[[float, float], list[LogScalar]] | None = None,
) -> SearchResult:
    if point is None:
        return SearchResult(
            kind, False, 0, 0.0, None, 0.0, 0, -math.inf,
            0.0, 0.0, probes, None, tuple(trace),
        )
    alpha = alpha_fn(point.c, point.t)
    assert alpha is not None
    if member_alphas is not None and point.pattern_count == 1:
        cert = intersect_certificate(
            member_alphas(point.c, point.t), contraction, point.c,
            point.delta, rho2, extras,
        )
    else:
        cert = pattern_certificate(
            alpha, contraction, point.c, point.delta,
            point.pattern_count, rho2, extras,
        )
    return SearchResult(
        kind, True, point.pattern_count, point.c, point.t, point.delta,
        point.free_steps, point.alpha_log, point.dim, point.dim_combined,
        probes, cert, tuple(trace),
    )


def _rcd_alpha_fn(
    spec: RcdSpec, covers: dict[float, CoverCount]
) -> Callable[[float, float], LogScalar | None]:
    def fn(c: float, t: float) -> LogScalar | None:
        cover = covers.get(t)
        if cover is None:
            cover = rcd_cover_count(spec.u, spec.v, t)
            covers[t] = cover
        alpha = rcd_alpha(spec.u, spec.v, c, t, cover_count=cover)
        return alpha if alpha.log < 0.0 else None
    return fn


def optimize_pattern_count(
    family: RcoSpec | RcdSpec,
    config: SearchConfig = DEFAULT_CONFIG,
    rho2: float = 1.0,
) -> SearchResult:
    """Largest certifiable pattern count for one family, with best dimension
    among the parameter choices attaining it."""
    contraction = family.contraction()
    if isinstance(family, RcoSpec):
        t_values: tuple[float, ...] = (float(family.t),)

        def alpha_fn(c: float, t: float) -> LogScalar | None:
            alpha = rco_alpha(family.u, family.v, family.m, t, c)
            return alpha if alpha.log < 0.0 else None

        kind = "cutout"
    else:
        t_values = _t_grid(config)
        alpha_fn = _rcd_alpha_fn(family, {})
        kind = "corner"
    point, probes, trace = _search(contraction, alpha_fn, t_values, config, True)
    _write_trace(config, trace)
    return _result_from_point(
        kind, point, probes, trace, contraction, alpha_fn, rho2,
        _family_extras(family),
    )


def optimize_dimension(
    family: RcoSpec | RcdSpec,
    config: SearchConfig = DEFAULT_CONFIG,
    rho2: float = 1.0,
) -> SearchResult:
    """Best certified dimension bound (pattern count pinned to 1)."""
    contraction = family.contraction()
    if isinstance(family, RcoSpec):
        t_values: tuple[float, ...] = (float(family.t),)

        def alpha_fn(c: float, t: float) -> LogScalar | None:
            alpha = rco_alpha(family.u, family.v, family.m, t, c)
            return alpha if alpha.log < 0.0 else None

        kind = "cutout"
    else:
        t_values = _t_grid(config)
        alpha_fn = _rcd_alpha_fn(family, {})
        kind = "corner"
    point, probes, trace = _search(contraction, alpha_fn, t_values, config, False)
    _write_trace(config, trace)
    return _result_from_point(
        kind, point, probes, trace, contraction, alpha_fn, rho2,
        _family_extras(family),
    )


def optimize_intersection(
    members: Sequence[RcoSpec | RcdSpec],
    config: SearchConfig = DEFAULT_CONFIG,
    want_patterns: bool = False,
    rho2: float = 1.0,
) -> SearchResult:
    """Search shared (c, t) for the intersection of the members' sets.

    All members must share the same cell ratios (the same diagonal part);
    corner members share one depth offset t.  The combined budget rate
    (sum_i alpha_i^c)^(1/c) must come out below 1 to certify anything.
    """
    if not members:
        raise ValueError("need at least one member")
    contraction = members[0].contraction()
    for m in members[1:]:
        if m.contraction().betas != contraction.betas:
            raise ValueError("intersection members must share cell ratios")
    covers: dict[float, CoverCount] = {}
    has_corner = any(isinstance(m, RcdSpec) for m in members)
    t_values = _t_grid(config) if has_corner else (0.0,)

    def member_alphas(c: float, t: float) -> list[LogScalar]:
        out = []
        for sp in members:
            if isinstance(sp, RcoSpec):
                out.append(rco_alpha(sp.u, sp.v, sp.m, sp.t, c))
            else:
                cover = covers.get(t)
                if cover is None:
                    cover = rcd_cover_count(sp.u, sp.v, t)
                    covers[t] = cover
                out.append(rcd_alpha(sp.u, sp.v, c, t, cover_count=cover))
        return out

    def alpha_fn(c: float, t: float) -> LogScalar | None:
        alphas = member_alphas(c, t)
        if any(a.log >= 0.0 for a in alphas):
            return None
        combined = combine_alphas(alphas, c)
        return combined if combined.log < 0.0 else None

    point, probes, trace = _search(
        contraction, alpha_fn, t_values, config, want_patterns
    )
    _write_trace(config, trace)
    extras = {"member_count": str(len(members))}
    for i, sp in enumerate(members, start=1):
        for key, value in _family_extras(sp).items():
            extras[f"member.{i}.{key.removeprefix('family.')}"] = value
    return _result_from_point(
        "intersection", point, probes, trace, contraction, alpha_fn, rho2,
        extras, member_alphas=member_alphas if not want_patterns else None,
    )


SMALLEST_U_CONFIG = SearchConfig(
    c_count=12,
    refine_passes=1,
    refine_points=7,
    delta_samples=12,
    t_lo=0.5,
    t_hi=3.0,
    t_step=0.5,
)


@dataclass(frozen=True)
class SmallestU:
    """Bracketed answer: `u` certifies, `u - 1` was checked and does not."""

    u: int
    result: SearchResult
    below: SearchResult
    probes: int


def smallest_u_for_patterns(
    pattern_count: int,
    gap: int,
    config: SearchConfig = SMALLEST_U_CONFIG,
) -> SmallestU:
    """Least denominator u (bracket sense) with corner family (u, u+gap)
    certifying the requested pattern count.

    Certifiability is monotone in u throughout the regime of interest (the
    budget rate falls roughly like u^(2t-2) times the slab count), so the
    doubling/bisection bracket [largest failing, smallest passing] is the
    true threshold; both endpoints' searches are returned.
    """
    if pattern_count < 1 or gap < 0:
        raise ValueError("pattern count must be >= 1 and gap >= 0")
    cache: dict[int, SearchResult] = {}
    probes = 0

    def run(u: int) -> SearchResult:
        nonlocal probes
        if u not in cache:
            cache[u] = optimize_pattern_count(RcdSpec(u, u + gap), config)
            probes += 1
        return cache[u]

    def certifies(u: int) -> bool:
        if u < 2 or u + gap < 2:
            return False
        return run(u).pattern_count >= pattern_count

    lo, hi = 2, 4
    while not certifies(hi):
        lo, hi = hi, hi * 2
        if hi > 1 << 60:
            raise RuntimeError("no certifying denominator below 2^60")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if certifies(mid):
            hi = mid
        else:
            lo = mid
    below = run(hi - 1) if hi - 1 >= 2 else SearchResult(
        "corner", False, 0, 0.0, None, 0.0, 0, -math.inf, 0.0, 0.0, 0, None
    )
    return SmallestU(hi, run(hi), below, probes)
