"""Finite-depth game runs and the counting machinery behind the dimension bound.

Two grids organize everything, both anchored at a base point with cell
half-widths rho * beta_j^k at level k:

* the fine grid: centers on (rho/2) A^k(Z^n) + y (an overlapping cover);
* the coarse grid: centers on 3 rho A^k(Z^n) + y (pairwise disjoint cells);
  every coarse center is a fine center whose index is divisible by 6.

The level-to-level projection maps a level-(k+1) fine cell to a containing
level-k cell: normally the one with the per-axis nearest center (ties to the
smaller index), but on levels congruent to 1 mod N it targets the containing
coarse cell when one exists.  Everything here works in integer index space,
which keeps the verification sweeps exact and vectorizable: the only step
that couples axes is the coarse-targeting branch, and the chain from level
(k+1)N+1 down to kN+1 meets such a level exactly once, at its final step.

The remaining oracles realize the counting facts the dimension argument
rests on: the symmetric grid of coarse children inside a half-shrunk cell,
the volume bound on how many fine coarse-grid cells one deleted box can
touch, the min-term transfer inequality, and the per-level deletion-budget
audit for materialized covering strategies.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import BoxRegion, DiagonalContraction, LogScalar
from .families import CoveringStrategy

__all__ = [
    "Lattice",
    "round_half_down",
    "project_index",
    "project_chain",
    "ProjectionAudit",
    "verify_projection_return",
    "HalfShrinkAudit",
    "verify_half_shrink",
    "MoveRecord",
    "DeletionRecord",
    "PlayTranscript",
    "constant_policy",
    "steering_policy",
    "play_game",
    "PotentialRow",
    "PotentialLedger",
    "potential_phi",
    "potential_chain",
    "ChildGridReport",
    "child_cover_grid",
    "OverlapReport",
    "tuple_overlap_bound",
    "potential_transfer_bound",
    "BudgetLevelReport",
    "BudgetAudit",
    "verify_covering_budget",
]

BUDGET_TOL = 1e-12          # log-domain slack when auditing budget legality


# ------------------------------------------------------------------ lattices


@dataclass(frozen=True)
class Lattice:
    """One level of the fine or coarse grid, exact when ratios are 1/U.

    kind "fine": centers (rho/2) A^k(Z^n) + origin; kind "coarse": centers
    3 rho A^k(Z^n) + origin (a subgrid of the fine one, indices times 6).
    Cells are boxes A^k(B[0, rho]) + center either way.
    """

    kind: str
    contraction: DiagonalContraction
    level: int
    rho: Fraction = Fraction(1)
    origin: tuple[Fraction, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("fine", "coarse"):
            raise ValueError(f"kind must be 'fine' or 'coarse', got {self.kind!r}")
        if self.level < 0:
            raise ValueError("level must be >= 0")
        if self.origin is None:
            object.__setattr__(
                self, "origin", tuple(Fraction(0) for _ in self.contraction.betas)
            )

    def _ratio_pow(self, j: int) -> Fraction | float:
        if self.contraction.is_exact:
            assert self.contraction.denominators is not None
            return Fraction(1, self.contraction.denominators[j] ** self.level)
        return self.contraction.betas[j] ** self.level

    def spacing(self, j: int) -> Fraction | float:
        step = self._ratio_pow(j)
        if self.kind == "fine":
            return self.rho * step / 2
        return 3 * self.rho * step

    def cell_center(self, z: Sequence[int]) -> tuple[Fraction | float, ...]:
        assert self.origin is not None
        return tuple(
            self.origin[j] + self.spacing(j) * z[j] for j in range(self.contraction.n)
        )

    def cell_box(self, z: Sequence[int]) -> BoxRegion:
        half = tuple(self.rho * self._ratio_pow(j) for j in range(self.contraction.n))
        return BoxRegion(self.cell_center(z), half)


def round_half_down(num: int, den: int) -> int:
    """Nearest integer to num/den (den > 0), ties toward the smaller integer."""
    if den <= 0:
        raise ValueError("denominator must be positive")
    return -((den - 2 * num) // (2 * den))


def project_index(
    u: Sequence[int],
    level: int,
    child: Sequence[int],
    block: int,
    coarse_branch: bool = True,
) -> tuple[int, ...]:
    """Parent fine-grid index at `level` of the level+1 fine cell `child`.

    `u` holds the integer reciprocals of the contraction ratios, `block` the
    free-step count N controlling which levels target the coarse grid.  On
    those levels (level = 1 mod N) the containing coarse cell is chosen when
    one exists jointly across axes — index test |y - 6 u m| <= 2(u - 1) —
    and its fine index 6m is returned; otherwise, and on every other level,
    the per-axis nearest parent center wins, ties toward the smaller index.
    """
    if coarse_branch and level % block == 1 % block:
        coarse = []
        for y, uj in zip(child, u):
            m = round_half_down(y, 6 * uj)
            if abs(y - 6 * uj * m) <= 2 * (uj - 1):
                coarse.append(6 * m)
            else:
                break
        else:
            return tuple(coarse)
    return tuple(round_half_down(y, uj) for y, uj in zip(child, u))


def project_chain(
    u: Sequence[int],
    from_level: int,
    index: Sequence[int],
    to_level: int,
    block: int,
    coarse_branch: bool = True,
) -> tuple[int, ...]:
    """Compose projections from `from_level` down to `to_level` (inclusive)."""
    if to_level > from_level:
        raise ValueError("target level must not exceed start level")
    idx = tuple(index)
    for lvl in range(from_level - 1, to_level - 1, -1):
        idx = project_index(u, lvl, idx, block, coarse_branch)
    return idx


# -------------------------------------------- exhaustive projection sweeps


def _rhd_array(num: np.ndarray, den: int) -> np.ndarray:
    return -((den - 2 * num) // (2 * den))


@dataclass(frozen=True)
class _AxisTable:
    """Per-axis chain outcomes over the (coarse index, child offset) grid."""

    window: np.ndarray        # final-step coarse window admits a cell
    coarse_ok: np.ndarray     # window holds and the coarse result hits target
    nearest_ok: np.ndarray    # nearest-fallback result hits the target
    r_values: np.ndarray
    l_values: np.ndarray


def _axis_table(u: int, block: int, k: int, radius: int) -> _AxisTable:
    gamma_floor = (u ** block - 2) // 6
    r = np.arange(-radius, radius + 1, dtype=np.int64)
    l = np.arange(-gamma_floor, gamma_floor + 1, dtype=np.int64)
    idx = 6 * (u ** block * r[:, None] + l[None, :])
    target = np.broadcast_to(6 * r[:, None], idx.shape)
    coarse_level = k * block + 1
    for _level in range((k + 1) * block, coarse_level, -1):
        # strictly between the coarse anchors: never 1 mod N, nearest only
        idx = _rhd_array(idx, u)
    m = _rhd_array(idx, 6 * u)
    window = np.abs(idx - 6 * u * m) <= 2 * (u - 1)
    coarse_ok = window & (6 * m == target)
    nearest_ok = _rhd_array(idx, u) == target
    return _AxisTable(window, coarse_ok, nearest_ok, r, l)


@dataclass(frozen=True)
class ProjectionAudit:
    """Exhaustive check that chains return to the coarse cell they started in."""

    u: tuple[int, ...]
    block: int
    k: int
    radius: int
    checked: int
    failures: int
    witness: tuple | None

    @property
    def passed(self) -> bool:
        return self.failures == 0


def _first_index(mask: np.ndarray) -> tuple[int, int] | None:
    hits = np.argwhere(mask)
    if len(hits) == 0:
        return None
    return int(hits[0][0]), int(hits[0][1])


def _prod(xs: Iterable[int]) -> int:
    out = 1
    for x in xs:
        out *= x
    return out


def verify_projection_return(
    u: Sequence[int],
    block: int,
    k: int = 0,
    radius: int = 50,
    coarse_branch: bool = True,
) -> ProjectionAudit:
    """For every coarse cell T at level kN+1 (index within `radius`) and every
    coarse-grid cell T' at level (k+1)N+1 inside the half-shrunk T, verify
    that the projection chain maps T' back to T.

    Axes only interact at the final chain step (the coarse-targeting level),
    so per-axis outcome tables plus exact pair counting give the exhaustive
    answer over the full product range at vector speed.  With the coarse
    branch disabled (negative control) the chain is purely per-axis nearest
    and is expected to miss.
    """
    for uj in u:
        if uj < 6:
            raise ValueError("exhaustive sweep needs all ratio denominators >= 6")
    if block < 1 or k < 0 or radius < 0:
        raise ValueError("block >= 1, k >= 0, radius >= 0 required")
    tables = [_axis_table(uj, block, k, radius) for uj in u]
    checked = _prod(t.window.size for t in tables)

    if not coarse_branch:
        good = _prod(int(t.nearest_ok.sum()) for t in tables)
        failures = checked - good
        witness = None
        if failures:
            for axis, tab in enumerate(tables):
                pos = _first_index(~tab.nearest_ok)
                if pos is not None:
                    witness = (
                        "axis", axis,
                        "coarse_index", int(tab.r_values[pos[0]]),
                        "child_offset", int(tab.l_values[pos[1]]),
                    )
                    break
        return ProjectionAudit(tuple(u), block, k, radius, checked, failures, witness)

    # Joint semantics: when the final-step window admits a coarse cell on
    # every axis the chain lands on the per-axis coarse result; otherwise
    # every axis falls back to nearest.  Count failing tuples exactly.
    W = [int(t.window.sum()) for t in tables]                 # window ok
    A = [int(t.coarse_ok.sum()) for t in tables]              # window ok, on target
    O = [int(t.nearest_ok.sum()) for t in tables]             # nearest on target
    E = [int((t.window & t.nearest_ok).sum()) for t in tables]

    fail_coarse = _prod(W) - _prod(A)
    not_all_window = checked - _prod(W)
    fail_nearest = not_all_window - (_prod(O) - _prod(E))
    failures = fail_coarse + fail_nearest

    witness = None
    if failures:
        probes = (
            lambda t: t.window & ~t.coarse_ok,
            lambda t: ~t.window & ~t.nearest_ok,
            lambda t: t.window & ~t.nearest_ok,
        )
        for probe in probes:
            for axis, tab in enumerate(tables):
                pos = _first_index(probe(tab))
                if pos is not None:
                    witness = (
                        "axis", axis,
                        "coarse_index", int(tab.r_values[pos[0]]),
                        "child_offset", int(tab.l_values[pos[1]]),
                    )
                    break
            if witness is not None:
                break
    return ProjectionAudit(tuple(u), block, k, radius, checked, failures, witness)


@dataclass(frozen=True)
class HalfShrinkAudit:
    """Exhaustive check that cells sit inside the half-shrunk nearest parent."""

    u: tuple[int, ...]
    level: int
    block: int
    checked: int
    failures: int
    witness: tuple | None

    @property
    def passed(self) -> bool:
        return self.failures == 0


def verify_half_shrink(
    u: Sequence[int], level: int, block: int, radius: int = 50
) -> HalfShrinkAudit:
    """On levels off the coarse-targeting residue, every level+1 fine cell
    lies inside its projection parent shrunk to half size: the containment
    reduces to the per-axis index test |y - u w| <= u - 2, so the exhaustive
    n-dimensional sweep is a product of per-axis sweeps.
    """
    if level % block == 1 % block:
        raise ValueError(
            "half-shrink containment is only claimed off the coarse levels"
        )
    checked = 1
    failures = 0
    witness = None
    for axis, uj in enumerate(u):
        y = np.arange(-radius, radius + 1, dtype=np.int64)
        w = _rhd_array(y, uj)
        bad = np.abs(y - uj * w) > uj - 2
        checked *= y.size
        axis_failures = int(bad.sum())
        if axis_failures and witness is None:
            witness = ("axis", axis, "child_index", int(y[np.argmax(bad)]))
        failures += axis_failures
    return HalfShrinkAudit(tuple(u), level, block, checked, failures, witness)


# ------------------------------------------------------------------ the game


@dataclass(frozen=True)
class DeletionRecord:
    """One deleted box A^q(B[0,r]) + y with its charged mass (prod beta^q)^c."""

    move: int                 # move the deletion was charged to; 0 = preamble
    exponent: int
    box: BoxRegion
    mass_log: float


@dataclass(frozen=True)
class MoveRecord:
    move: int
    box: BoxRegion            # the nested box played this move
    deletions: tuple[DeletionRecord, ...]
    budget_spent_log: float   # ln of the summed deleted mass (-inf if none)
    budget_cap_log: float     # ln((alpha prod beta^move)^c)
    skipped: bool             # empty response (nothing intersected, or illegal)


@dataclass(frozen=True)
class PlayTranscript:
    """Full record of one finite play: boxes, deletions, budgets, outcome."""

    radius: Fraction
    c: float
    alpha_log: float
    betas: tuple[Fraction, ...]
    preamble: tuple[DeletionRecord, ...]
    moves: tuple[MoveRecord, ...]

    @property
    def outcome_box(self) -> BoxRegion:
        return self.moves[-1].box

    def all_deletions(self) -> tuple[DeletionRecord, ...]:
        out = list(self.preamble)
        for move in self.moves:
            out.extend(move.deletions)
        return tuple(out)

    def outcome_intersects_deleted(self) -> DeletionRecord | None:
        for rec in self.all_deletions():
            if self.outcome_box.intersects(rec.box):
                return rec
        return None

    def outcome_inside_deleted(self) -> DeletionRecord | None:
        for rec in self.all_deletions():
            if rec.box.contains_box(self.outcome_box):
                return rec
        return None

    @staticmethod
    def _fmt(value) -> str:
        if isinstance(value, Fraction):
            return str(value)
        return "%.17g" % value

    def to_text(self) -> str:
        """Line-delimited: one move per line, exact rationals where present."""
        lines = [
            "transcript radius=%s c=%.17g alpha_log=%.17g betas=%s"
            % (self._fmt(self.radius), self.c, self.alpha_log,
               ",".join(self._fmt(b) for b in self.betas))
        ]
        for rec in self.preamble:
            lines.append(
                "preamble q=%d center=%s half=%s mass_log=%.17g"
                % (rec.exponent,
                   ",".join(self._fmt(x) for x in rec.box.center),
                   ",".join(self._fmt(x) for x in rec.box.half),
                   rec.mass_log)
            )
        for move in self.moves:
            lines.append(
                "move m=%d center=%s half=%s deletions=%d spent_log=%.17g "
                "cap_log=%.17g skipped=%s"
                % (move.move,
                   ",".join(self._fmt(x) for x in move.box.center),
                   ",".join(self._fmt(x) for x in move.box.half),
                   len(move.deletions), move.budget_spent_log,
                   move.budget_cap_log, "true" if move.skipped else "false")
            )
        return "\n".join(lines) + "\n"


Policy = Callable[[int, BoxRegion], tuple[Fraction, ...]]


def constant_policy(center: Sequence[Fraction | int]) -> Policy:
    """Nesting player keeps one center forever (always legal)."""
    fixed = tuple(Fraction(x) for x in center)
    return lambda move, previous: fixed


def steering_policy(target: Sequence[Fraction | int]) -> Policy:
    """Nesting player asks for the target center every move; the game clamps
    the request onto the nested range, which drives the box toward the
    target as fast as the shrinking half-widths allow."""
    goal = tuple(Fraction(x) for x in target)
    return lambda move, previous: goal


def _clamp_center(
    desired: Sequence[Fraction],
    previous: BoxRegion,
    half: Sequence[Fraction],
) -> tuple[Fraction, ...]:
    out = []
    for j in range(previous.n):
        slack = previous.half[j] - half[j]
        lo = previous.center[j] - slack
        hi = previous.center[j] + slack
        out.append(min(max(desired[j], lo), hi))
    return tuple(out)


def play_game(
    policy: Policy,
    strategy: CoveringStrategy,
    depth: int,
    radius: Fraction | int = 1,
    grant_preamble: bool = True,
    clamp: bool = True,
) -> PlayTranscript:
    """Run the game to `depth` moves.

    The nesting player's policy proposes a center each move; with clamp=True
    the proposal is projected onto the legal (nested) range, otherwise an
    illegal proposal raises.  The deleting player answers move m with every
    level-m strategy box that intersects the current play box, provided the
    summed mass fits the budget (alpha prod beta^m)^c; an over-budget answer
    degrades to a recorded skip.  Strategy levels flagged as preamble are
    granted before move 1 (recorded without a budget charge).
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    params = strategy.params
    contraction = params.contraction
    if not contraction.is_exact:
        raise ValueError("game runs require exact contraction ratios")
    r = Fraction(radius)
    betas = contraction.exact_betas()
    c = params.c
    log_det = contraction.log_det()

    preamble: list[DeletionRecord] = []
    if grant_preamble:
        for lvl in strategy.levels:
            if lvl.preamble:
                mass_log = c * lvl.exponent * log_det
                for box in lvl.boxes:
                    preamble.append(DeletionRecord(0, lvl.exponent, box, mass_log))

    by_level = {lvl.level: lvl for lvl in strategy.levels if not lvl.preamble}
    current = BoxRegion(tuple(Fraction(0) for _ in betas), tuple(r for _ in betas))
    moves: list[MoveRecord] = []
    for m in range(1, depth + 1):
        half = tuple(r * b ** m for b in betas)
        desired = tuple(Fraction(x) for x in policy(m, current))
        center = _clamp_center(desired, current, half)
        if not clamp and center != desired:
            raise ValueError(f"illegal play at move {m}: box not nested")
        box = BoxRegion(center, half)
        level = by_level.get(m)
        cap_log = c * (params.alpha.log + m * log_det)
        deletions: list[DeletionRecord] = []
        if level is not None:
            mass_log = c * level.exponent * log_det
            for sbox in level.boxes:
                if box.intersects(sbox):
                    deletions.append(DeletionRecord(m, level.exponent, sbox, mass_log))
        if deletions:
            spent = LogScalar.sum(LogScalar(d.mass_log) for d in deletions)
            if spent.log <= cap_log + BUDGET_TOL:
                moves.append(
                    MoveRecord(m, box, tuple(deletions), spent.log, cap_log, False)
                )
            else:
                moves.append(MoveRecord(m, box, (), -math.inf, cap_log, True))
        else:
            moves.append(MoveRecord(m, box, (), -math.inf, cap_log, True))
        current = box
    return PlayTranscript(r, c, params.alpha.log, betas, tuple(preamble), tuple(moves))


# ---------------------------------------------------------------- potential


@dataclass(frozen=True)
class PotentialRow:
    level: int
    cell: BoxRegion
    phi_log: float
    threshold_log: float      # ln((delta prod beta^level)^c)

    @property
    def surviving(self) -> bool:
        return self.phi_log <= self.threshold_log


@dataclass(frozen=True)
class PotentialLedger:
    rows: tuple[PotentialRow, ...]
    cumulative: tuple[tuple[int, float], ...]   # (move, mass so far) for rows[-1]

    def surviving_levels(self) -> tuple[int, ...]:
        return tuple(row.level for row in self.rows if row.surviving)


def potential_phi(
    transcript: PlayTranscript,
    cell: BoxRegion,
    level: int,
    delta: float,
) -> PotentialRow:
    """Accumulated deleted mass charged to `cell` at `level`.

    Sums the recorded masses of every deletion from moves strictly before
    `level` whose box intersects the cell; level 1 is always zero.  The cell
    survives while the total stays at or below (delta prod beta^level)^c.
    """
    masses: list[LogScalar] = []
    for move in transcript.moves:
        if move.move >= level:
            break
        for rec in move.deletions:
            if cell.intersects(rec.box):
                masses.append(LogScalar(rec.mass_log))
    phi = LogScalar.sum(masses) if masses else LogScalar.zero()
    log_det = sum(math.log(float(b)) for b in transcript.betas)
    threshold = transcript.c * (math.log(delta) + level * log_det)
    return PotentialRow(level, cell, phi.log, threshold)


def potential_chain(
    transcript: PlayTranscript,
    u: Sequence[int],
    fine_index: Sequence[int],
    fine_level: int,
    block: int,
    delta: float,
    rho: Fraction | int = 1,
) -> PotentialLedger:
    """Potential along the projection chain of one fine cell, plus the
    move-by-move cumulative mass hitting the finest cell (nondecreasing)."""
    contraction = DiagonalContraction.from_denominators([int(uj) for uj in u])
    rows: list[PotentialRow] = []
    idx = tuple(fine_index)
    for level in range(fine_level, 0, -1):
        lattice = Lattice("fine", contraction, level, Fraction(rho))
        cell = lattice.cell_box(idx)
        rows.append(potential_phi(transcript, cell, level, delta))
        if level > 1:
            idx = project_index(u, level - 1, idx, block)
    rows.reverse()
    fine_cell = rows[-1].cell
    cumulative: list[tuple[int, float]] = []
    running: list[LogScalar] = []
    for move in transcript.moves:
        for rec in move.deletions:
            if fine_cell.intersects(rec.box):
                running.append(LogScalar(rec.mass_log))
        total = LogScalar.sum(running) if running else LogScalar.zero()
        cumulative.append((move.move, total.log))
    return PotentialLedger(tuple(rows), tuple(cumulative))


# ----------------------------------------------------------- counting oracles


@dataclass(frozen=True)
class ChildGridReport:
    """Grid of coarse children inside a half-shrunk coarse cell.

    The construction places, per axis, offsets l with |l| <= gamma_j around
    the scaled parent index, gamma_j = (u_j^N - 2) / 6.  The exhaustive
    enumeration finds every level-(k+1)N+1 coarse-grid cell geometrically
    contained in the half-shrunk parent; in this exact unit-fraction setting
    the two sets coincide and their size is prod_j (2 floor(gamma_j) + 1) —
    at least prod_j floor(gamma_j), the coarser stated form.
    """

    gammas: tuple[Fraction, ...]
    count: int
    formula_count: int          # prod (2 floor(gamma_j) + 1)
    floor_product: int          # prod floor(gamma_j)
    all_inside_half_parent: bool
    matches_enumeration: bool


def child_cover_grid(
    u: Sequence[int],
    block: int,
    parent: Sequence[int],
    k: int = 0,
    rho: Fraction | int = 1,
) -> ChildGridReport:
    """Construct and exhaustively verify the child grid of the level-kN+1
    coarse cell with index `parent`, at level (k+1)N+1.

    Geometric checks run in exact rational arithmetic: every constructed
    child must be contained in the parent shrunk to half size, and the
    construction must list exactly the coarse-grid cells with that property.
    """
    if block < 1 or k < 0:
        raise ValueError("block >= 1 and k >= 0 required")
    rho = Fraction(rho)
    contraction = DiagonalContraction.from_denominators([int(uj) for uj in u])
    n = contraction.n
    coarse_level = k * block + 1
    fine_level = (k + 1) * block + 1
    parent_lat = Lattice("coarse", contraction, coarse_level, rho)
    child_lat = Lattice("coarse", contraction, fine_level, rho)
    half_parent = parent_lat.cell_box(parent).shrink(Fraction(1, 2))

    gammas = tuple(Fraction(uj ** block - 2, 6) for uj in u)
    floors = tuple(g.numerator // g.denominator for g in gammas)
    formula = _prod(2 * f + 1 for f in floors)
    floor_prod = _prod(max(f, 0) for f in floors)

    # constructed grid: anchor at the scaled parent index, symmetric offsets
    anchors = tuple(
        uj ** block * parent[j] for j, uj in enumerate(u)
    )
    grid: set[tuple[int, ...]] = set()

    def build(prefix: tuple[int, ...]) -> None:
        if len(prefix) == n:
            grid.add(prefix)
            return
        j = len(prefix)
        for l in range(-floors[j], floors[j] + 1):
            build(prefix + (anchors[j] + l,))

    build(())
    all_inside = all(
        half_parent.contains_box(child_lat.cell_box(p)) for p in grid
    )

    # exhaustive enumeration: scan one extra ring beyond the construction
    found: set[tuple[int, ...]] = set()

    def scan(prefix: tuple[int, ...]) -> None:
        if len(prefix) == n:
            if half_parent.contains_box(child_lat.cell_box(prefix)):
                found.add(prefix)
            return
        j = len(prefix)
        for p in range(anchors[j] - floors[j] - 2, anchors[j] + floors[j] + 3):
            scan(prefix + (p,))

    scan(())
    return ChildGridReport(
        gammas, len(found), formula, floor_prod, all_inside, found == grid
    )


@dataclass(frozen=True)
class OverlapReport:
    """Exact number of level-L coarse-grid cells one deleted box touches,
    against the volume bound 4^n prod_j (beta_j^q + beta_j^L) / beta_j^L."""

    exact_count: int
    bound: Fraction
    ok: bool


def tuple_overlap_bound(
    u: Sequence[int],
    fine_level: int,
    exponent: int,
    center: Sequence[Fraction | int],
    rho: Fraction | int = 1,
) -> OverlapReport:
    if exponent < 1 or fine_level < 1:
        raise ValueError("exponent and fine level must be >= 1")
    rho = Fraction(rho)
    count = 1
    bound = Fraction(4) ** len(u)
    for j, uj in enumerate(u):
        beta_l = Fraction(1, uj ** fine_level)
        beta_q = Fraction(1, uj ** exponent)
        # coarse centers 3 rho beta_l p within distance rho (beta_q + beta_l)
        window = rho * (beta_q + beta_l)
        spacing = 3 * rho * beta_l
        cj = Fraction(center[j])
        lo = -((-(cj - window)) // spacing)   # ceil
        hi = (cj + window) // spacing         # floor
        count *= max(0, hi - lo + 1)
        bound *= (beta_q + beta_l) / beta_l
    return OverlapReport(int(count), bound, count <= bound)


def potential_transfer_bound(
    x: float, y: float, a: float, b: float, gamma: float, c: float
) -> tuple[float, float]:
    """(lhs, rhs) of min(1, x^c/(gamma y)^c) (a x + b y)
    <= (a + b) x^c max(x^(1-c), y^(1-c) / gamma^c); holds for all positive
    inputs with c in (0,1), with equality e.g. at x = y = gamma = 1."""
    if min(x, y, a, b, gamma) <= 0.0 or not 0.0 < c < 1.0:
        raise ValueError("inputs must be positive with c in (0,1)")
    lhs = min(1.0, (x / (gamma * y)) ** c) * (a * x + b * y)
    rhs = (a + b) * x ** c * max(x ** (1.0 - c), y ** (1.0 - c) / gamma ** c)
    return lhs, rhs


# ------------------------------------------------------------- budget audits


@dataclass(frozen=True)
class BudgetLevelReport:
    level: int
    exponent: int
    preamble: bool
    test_boxes: int
    strategy_boxes: int
    worst_hits: int
    worst_center: tuple[Fraction, ...] | None
    spent_log: float          # worst-case summed mass, ln
    cap_log: float            # ln((a_k prod beta^k)^c)
    legal: bool


@dataclass(frozen=True)
class BudgetAudit:
    levels: tuple[BudgetLevelReport, ...]

    @property
    def all_legal(self) -> bool:
        return all(lvl.legal for lvl in self.levels)

    @property
    def worst_hits(self) -> int:
        return max((lvl.worst_hits for lvl in self.levels), default=0)


def verify_covering_budget(
    strategy: CoveringStrategy,
    levels: Sequence[int] | None = None,
    extent: Fraction | int = 1,
    rho1: Fraction | int = 1,
) -> BudgetAudit:
    """Audit the per-level deletion budget of a materialized strategy.

    For each audited level k, sweeps every test box A^k(B[0, rho1]) + z with
    z on the half-spacing grid (spacing rho1 beta_j^k / 2, |z_j| <= extent),
    counts the strategy boxes each test box intersects, and compares the
    worst summed mass against (a_k prod beta^k)^c.  Counting is exact and
    linear: per-axis coordinates are rescaled to integers and every strategy
    box scatters its intersecting index range onto the test grid through a
    difference array.
    """
    params = strategy.params
    contraction = params.contraction
    if not contraction.is_exact:
        raise ValueError("budget audits require exact contraction ratios")
    assert contraction.denominators is not None
    dens = contraction.denominators
    n = contraction.n
    if n not in (1, 2):
        raise ValueError("budget audits support 1 or 2 axes")
    extent = Fraction(extent)
    rho1 = Fraction(rho1)
    c = params.c
    log_det = contraction.log_det()
    reports: list[BudgetLevelReport] = []
    for lvl in strategy.levels:
        if levels is not None and lvl.level not in levels:
            continue
        k = lvl.level
        test_half = [rho1 * Fraction(1, d ** k) for d in dens]
        spacing = [h / 2 for h in test_half]
        max_index = [int((extent + test_half[j]) / spacing[j]) for j in range(n)]
        cap_log = c * (lvl.budget_rate_log + k * log_det)
        if not lvl.boxes:
            reports.append(BudgetLevelReport(
                k, lvl.exponent, lvl.preamble, 0, 0, 0, None,
                -math.inf, cap_log, True,
            ))
            continue
        # per-axis integer rescale: every coordinate shares the axis LCM
        scales = []
        for j in range(n):
            pool = [spacing[j].denominator, test_half[j].denominator]
            for box in lvl.boxes:
                pool.append(Fraction(box.center[j]).denominator)
                pool.append(Fraction(box.half[j]).denominator)
            scales.append(math.lcm(*pool))
        shape = tuple(2 * m + 1 for m in max_index)
        diff = np.zeros(tuple(s + 1 for s in shape), dtype=np.int64)
        sp = [int(spacing[j] * scales[j]) for j in range(n)]
        th = [int(test_half[j] * scales[j]) for j in range(n)]
        for box in lvl.boxes:
            slab: list[tuple[int, int]] | None = []
            for j in range(n):
                bc = int(Fraction(box.center[j]) * scales[j])
                bh = int(Fraction(box.half[j]) * scales[j])
                reach = th[j] + bh
                # test centers i * sp with |i * sp - bc| <= reach
                i_lo = max(-((reach - bc) // sp[j]), -max_index[j])
                i_hi = min((bc + reach) // sp[j], max_index[j])
                if i_lo > i_hi:
                    slab = None
                    break
                slab.append((i_lo + max_index[j], i_hi + max_index[j]))
            if slab is None:
                continue
            if n == 1:
                (x0, x1), = slab
                diff[x0] += 1
                diff[x1 + 1] -= 1
            else:
                (x0, x1), (y0, y1) = slab
                diff[x0, y0] += 1
                diff[x1 + 1, y0] -= 1
                diff[x0, y1 + 1] -= 1
                diff[x1 + 1, y1 + 1] += 1
        if n == 1:
            hits = diff.cumsum()[:-1]
        else:
            hits = diff.cumsum(axis=0).cumsum(axis=1)[:-1, :-1]
        worst = int(hits.max())
        where = np.unravel_index(int(hits.argmax()), hits.shape)
        worst_center = tuple(
            (int(where[j]) - max_index[j]) * spacing[j] for j in range(n)
        )
        mass_one = c * lvl.exponent * log_det
        spent_log = math.log(worst) + mass_one if worst else -math.inf
        legal = spent_log <= cap_log + BUDGET_TOL
        reports.append(BudgetLevelReport(
            k, lvl.exponent, lvl.preamble,
            int(np.prod(shape)), len(lvl.boxes),
            worst, worst_center, spent_log, cap_log, legal,
        ))
    return BudgetAudit(tuple(reports))
