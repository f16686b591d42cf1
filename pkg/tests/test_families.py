"""Family geometry and budget-rate formulas against independently derived values."""
from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gamecert.core import BoxRegion
from gamecert.families import (
    CoverCount,
    RcdSpec,
    RcoSpec,
    RectangleSet,
    covering_strategy_for_rcd,
    covering_strategy_for_rco,
    generate_rcd,
    generate_rco,
    rcd_alpha,
    rcd_children,
    rcd_cover_count,
    rco_alpha,
)


# ------------------------------------------------------------- budget rates


def test_rco_alpha_frozen_value():
    # (9*2)^(1/0.5) * 20^-1 = 324/20 = 16.2, derived by hand before coding
    assert rco_alpha(4, 5, 2, 1, 0.5).value == pytest.approx(16.2, rel=1e-12)


def test_rco_alpha_monotone_in_m_and_t():
    assert rco_alpha(4, 5, 3, 1, 0.5).log > rco_alpha(4, 5, 2, 1, 0.5).log
    assert rco_alpha(4, 5, 2, 2, 0.5).log < rco_alpha(4, 5, 2, 1, 0.5).log


def test_rco_alpha_rejects_bad_exponents():
    for c in (0.0, 1.0, -0.5):
        with pytest.raises(ValueError):
            rco_alpha(4, 5, 2, 1, c)
    with pytest.raises(ValueError):
        rco_alpha(4, 5, 2, 0.0, 0.5)
    # real t > 0 is fine
    assert rco_alpha(4, 5, 2, 0.5, 0.5).log == pytest.approx(
        2 * math.log(18) - 0.5 * math.log(20)
    )


def test_rcd_cover_count_frozen_values():
    got = rcd_cover_count(7, 4, 1)
    # option 1: ceil(7/6)*ceil(16/3) + 7*ceil(4/3) = 2*6 + 7*2 = 26
    # option 2: ceil(49/6)*ceil(4/3) + 4*ceil(7/6) = 9*2 + 4*2 = 26 (tie)
    assert got == CoverCount(26, "exact", 1)
    # square case u = v: both options 2(2u+2)
    assert rcd_cover_count(7, 7, 1).value == 2 * (2 * 7 + 2)


def test_rcd_cover_count_drops_just_below_integer_t():
    # At t slightly below 1 the strip ceilings collapse to 1:
    # count -> u^t + v^t-ish instead of ~2(u+v).
    at_1 = rcd_cover_count(2 ** 37, 2 ** 38, 1).value
    below = rcd_cover_count(2 ** 37, 2 ** 38, 1 - 1e-9).value
    assert below < at_1
    assert at_1 == 2 * (2 ** 37 + 2 ** 38 + 2)
    # just below: 1*ceil(v^(t+1)/(v-1)) + ceil(u^t)*1 vs transposed
    assert below <= 2 ** 38 + 2 ** 37 + 3


def test_rcd_cover_count_real_t_brackets_are_exact_for_small_args():
    exact_int = rcd_cover_count(7, 4, 2).value
    via_real = rcd_cover_count(7, 4, 2.0 + 0.0).value
    assert exact_int == via_real
    near = rcd_cover_count(7, 4, 1.5)
    # ceil(7^1.5/6)*ceil(4^2.5/3) + ceil(7^1.5)*ceil(4^1.5/3)
    # = ceil(3.086)*ceil(10.67) + ceil(18.52)*ceil(2.667) = 4*11 + 19*3 = 101
    # option 2: ceil(7^2.5/6)*ceil(4^1.5/3) + ceil(4^1.5)*ceil(7^1.5/6)
    # = ceil(21.6)*3 + 8*4 = 66 + 32 = 98
    assert near.value == 98
    assert near.option == 2


def test_rcd_alpha_frozen_value():
    # (9*6*3*26)^(1/0.5) * 28^-2 = 4212^2 / 784: only the touch count is
    # raised to 1/c — verified against the budget identity
    # touch_count * (mass at exponent k+1+t)^c == (a_k * mass at k)^c.
    got = rcd_alpha(7, 4, 0.5, 1)
    assert got.value == pytest.approx(4212 ** 2 / 28 ** 2, rel=1e-12)
    # budget identity at k = 1, c = 0.5:
    c = 0.5
    mass = lambda q: (1 / 28) ** q  # prod beta^q
    lhs = 9 * 6 * 3 * 26 * mass(1 + 1 + 1) ** c
    rhs = (got.value * mass(1)) ** c
    assert lhs == pytest.approx(rhs, rel=1e-9)


def test_rcd_alpha_huge_u_stays_finite_in_log_domain():
    a = rcd_alpha(900019043105, 999921083009, 0.9, 1 - 1e-5)
    assert math.isfinite(a.log)
    assert a.log < 0


# ---------------------------------------------------------------- generators


def test_generate_rco_frozen_census():
    member = generate_rco(RcoSpec(4, 5, 2, 1), depth=1)
    cells = member.of_kind("cell", 1)
    cuts = member.of_kind("cut", 1)
    assert len(cells) == 20
    assert len(cuts) == 40
    for e in cuts:
        assert e.box.half == (Fraction(1, 16), Fraction(1, 25))
    for e in cells:
        assert e.box.half == (Fraction(1, 4), Fraction(1, 5))


def test_generate_rco_cutouts_stay_inside_their_cells_and_disjoint():
    member = generate_rco(RcoSpec(3, 3, 4, 1), depth=2, placement="hash", seed=7)
    for k in (1, 2):
        cells = {e.address.split(":", 1)[1]: e.box for e in member.of_kind("cell", k)}
        by_cell: dict[str, list[BoxRegion]] = {}
        for e in member.of_kind("cut", k):
            path = e.address.split(":", 1)[1].rsplit("/", 1)[0]
            assert cells[path].contains_box(e.box)
            by_cell.setdefault(path, []).append(e.box)
        for boxes in by_cell.values():
            assert len(boxes) == 4
            for i in range(len(boxes)):
                for j in range(i + 1, len(boxes)):
                    a, b = boxes[i], boxes[j]
                    overlap = all(
                        abs(a.center[ax] - b.center[ax]) < a.half[ax] + b.half[ax]
                        for ax in range(2)
                    )
                    assert not overlap


def test_generate_rco_hash_placement_is_deterministic():
    a = generate_rco(RcoSpec(4, 5, 2, 1), 1, placement="hash", seed=3)
    b = generate_rco(RcoSpec(4, 5, 2, 1), 1, placement="hash", seed=3)
    c = generate_rco(RcoSpec(4, 5, 2, 1), 1, placement="hash", seed=4)
    assert a.to_csv() == b.to_csv()
    assert a.to_csv() != c.to_csv()


def test_generate_rcd_frozen_census():
    member = generate_rcd(RcdSpec(7, 4), depth=1)
    comps = member.of_kind("comp", 1)
    assert len(comps) == 18  # (7-1)*(4-1)
    for e in comps:
        assert e.box.half == (Fraction(1, 7), Fraction(1, 4))
    # children tile flush into the corners of their regions: every child box
    # must be inside the root box
    root = BoxRegion((Fraction(0), Fraction(0)), (Fraction(1), Fraction(1)))
    for e in comps:
        assert root.contains_box(e.box)


def test_generate_rcd_children_are_disjoint_and_nested():
    spec = RcdSpec(7, 4, corner_rule="hash", corner_seed=11)
    member = generate_rcd(spec, depth=2)
    level1 = {e.address.split(":", 1)[1]: e.box for e in member.of_kind("comp", 1)}
    level2 = member.of_kind("comp", 2)
    assert len(level2) == 18 * 18
    for e in level2:
        parent = e.address.split(":", 1)[1].rsplit("/", 1)[0]
        assert level1[parent].contains_box(e.box)
    boxes = [e.box for e in member.of_kind("comp", 1)]
    for i in range(len(boxes)):
        for j in range(i + 1, len(boxes)):
            a, b = boxes[i], boxes[j]
            assert not all(
                abs(a.center[ax] - b.center[ax]) < a.half[ax] + b.half[ax]
                for ax in range(2)
            )


def test_rcd_children_regions_tile_the_component():
    spec = RcdSpec(7, 4)
    root = BoxRegion((Fraction(0), Fraction(0)), (Fraction(1), Fraction(1)))
    kids = rcd_children(spec, 0, "r", root)
    assert len(kids) == 18
    area = sum(4 * r.half[0] * r.half[1] for _, r, _ in kids)
    assert area == 4  # regions partition the component (area [-1,1]^2 = 4)
    for _, region, child in kids:
        assert region.contains_box(child)
        # child is flush: one corner of the child coincides with the region's
        assert any(
            abs(region.center[0] - child.center[0]) == region.half[0] - child.half[0]
            for _ in (0,)
        )


@given(st.integers(2, 9), st.integers(2, 9), st.integers(0, 3))
@settings(max_examples=25, deadline=None)
def test_rcd_census_property(u, v, seed):
    member = generate_rcd(RcdSpec(u, v, "hash", seed), depth=1)
    assert len(member.of_kind("comp", 1)) == (u - 1) * (v - 1)


# ------------------------------------------------------------- serialization


def test_rectangle_set_csv_roundtrip_exact():
    member = generate_rco(RcoSpec(4, 5, 2, 1), depth=1)
    text = member.to_csv()
    assert text.splitlines()[len(member.meta)] == "level,address,cx,cy,hx,hy"
    back = RectangleSet.from_csv(text)
    assert back.meta == member.meta
    assert len(back.entries) == len(member.entries)
    for a, b in zip(back.entries, member.entries):
        assert a.level == b.level and a.address == b.address
        assert a.box == b.box  # Fractions survive the p/q round-trip exactly


def test_rectangle_set_csv_rejects_garbage():
    with pytest.raises(ValueError):
        RectangleSet.from_csv("not,a,header\n1,2,3\n")


def test_pbm_render_shapes():
    member = generate_rco(RcoSpec(4, 5, 2, 1), depth=1)
    pbm = member.to_pbm(32, 16)
    lines = pbm.splitlines()
    assert lines[0] == "P1"
    assert lines[1] == "32 16"
    assert len(lines) == 2 + 16
    body = " ".join(lines[2:]).split()
    assert set(body) <= {"0", "1"}
    assert "0" in body and "1" in body  # something removed, something kept


# ------------------------------------------------------- covering strategies


def test_rco_strategy_mirrors_member_cutouts():
    member = generate_rco(RcoSpec(4, 5, 2, 1), depth=2)
    strat = covering_strategy_for_rco(member, c=0.5)
    assert strat.kind == "rco"
    assert [lv.level for lv in strat.levels] == [1, 2]
    assert all(not lv.preamble for lv in strat.levels)
    for lv in strat.levels:
        assert lv.exponent == lv.level + 1
        assert len(lv.boxes) == 2 * 20 ** lv.level
        assert lv.budget_rate_log == strat.params.alpha.log


def test_rcd_strategy_cover_counts_match_formula():
    strat = covering_strategy_for_rcd(RcdSpec(7, 4), c=0.5, t=1, depth=2)
    assert strat.kind == "rcd"
    count = rcd_cover_count(7, 4, 1).value
    lv0 = strat.level(0)
    lv1 = strat.level(1)
    assert lv0 is not None and lv0.preamble and lv0.exponent == 2
    assert lv1 is not None and not lv1.preamble and lv1.exponent == 3
    assert len(lv0.boxes) == 18 * count
    assert len(lv1.boxes) == 18 * 18 * count


def test_rcd_strategy_covers_exactly_the_removed_slabs():
    """Completeness at level 0: region minus child is inside the cover union,
    and covers stay inside the region (slab decomposition, exact arithmetic)."""
    spec = RcdSpec(7, 4, corner_rule="hash", corner_seed=5)
    strat = covering_strategy_for_rcd(spec, c=0.5, t=1, depth=1)
    root = BoxRegion((Fraction(0), Fraction(0)), (Fraction(1), Fraction(1)))
    kids = rcd_children(spec, 0, "r", root)
    count = rcd_cover_count(7, 4, 1).value
    boxes = strat.level(0).boxes
    for idx, (digit, region, child) in enumerate(kids):
        cover = boxes[idx * count : (idx + 1) * count]
        for b in cover:
            assert region.contains_box(b)
        # slab decomposition of region by all cover edges and child edges
        xs = sorted(
            {region.low(0), region.high(0), child.low(0), child.high(0)}
            | {b.low(0) for b in cover}
            | {b.high(0) for b in cover}
        )
        ys = sorted(
            {region.low(1), region.high(1), child.low(1), child.high(1)}
            | {b.low(1) for b in cover}
            | {b.high(1) for b in cover}
        )
        for x0, x1 in zip(xs, xs[1:]):
            for y0, y1 in zip(ys, ys[1:]):
                mid = ((x0 + x1) / 2, (y0 + y1) / 2)
                in_child = child.contains_point(mid)
                in_cover = any(b.contains_point(mid) for b in cover)
                if not in_child:
                    assert in_cover, f"uncovered slab at {mid} in child {digit}"


def test_rcd_strategy_requires_integer_t():
    with pytest.raises(ValueError):
        covering_strategy_for_rcd(RcdSpec(7, 4), c=0.5, t=1.5, depth=1)  # type: ignore[arg-type]
