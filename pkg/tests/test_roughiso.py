import math

import numpy as np
import pytest

from percoscale.graphs import box, cycle, torus
from percoscale.roughiso import (
    RoughMap,
    RoughMapInvalidError,
    check_rough_isometry,
    compose,
    cycle_rotation,
    format_map,
    identity_map,
    image_size_lower_bound,
    inverse_closeness,
    parse_map,
    rough_inverse,
    torus_translation,
)

# Hand-built 2-rough isometry from the 6-cycle onto the 3-path: antipodal
# pairs collapse, distance-2 pairs keep distinct images.
C6_TO_P3 = (0, 0, 1, 1, 2, 2)


def hand_built_map():
    return RoughMap(cycle(6), box(1, 3), C6_TO_P3, 2.0)


class TestCheck:
    def test_identity_holds(self):
        for g in [cycle(8), torus(2, 5), box(2, 4)]:
            rep = check_rough_isometry(identity_map(g))
            assert rep.holds and rep.exhaustive
            assert rep.covering_radius == 0

    def test_torus_translation_holds(self):
        g = torus(2, 6)
        rep = check_rough_isometry(torus_translation(g, (2, 3)))
        assert rep.holds
        assert rep.worst_pair_slack >= 0  # upper inequality may be tight

    def test_constant_map_violates_lower_bound(self):
        # Constant map on a graph of diameter >= 2C(1+1): left inequality
        # fails for far pairs since d(images) = 0.
        g = cycle(20)  # diameter 10 >= 2*2*(1+1)
        m = RoughMap(g, g, tuple(0 for _ in range(g.n)), 2.0)
        rep = check_rough_isometry(m)
        assert not rep.distortion_ok
        x, y = rep.worst_pair
        assert g.distance(x, y) > 2 * (0 + 1)

    def test_hand_built_map_holds(self):
        rep = check_rough_isometry(hand_built_map())
        assert rep.holds

    def test_surjectivity_violation_detected(self):
        # Map a long path onto one end of itself; far vertices are uncovered.
        g = box(1, 12)
        m = RoughMap(g, g, tuple(v // 2 for v in range(g.n)), 1.0)
        rep = check_rough_isometry(m)
        assert not rep.surjectivity_ok
        assert rep.worst_uncovered == 11

    def test_strict_lower_inequality(self):
        # d_src = C*(d_img + 1) makes the lower bound exactly tight:
        # (1/C) d_src - 1 == d_img must NOT count as satisfied.
        from percoscale.roughiso import _pair_ok, _pair_slacks
        assert not _pair_ok(*_pair_slacks(4, 1, 2.0))
        assert _pair_ok(*_pair_slacks(3, 1, 2.0))
        # The upper inequality is non-strict: equality is allowed.
        assert _pair_ok(*_pair_slacks(3, 6, 2.0))


class TestRoughInverse:
    def test_bijective_isometry_inverts_exactly(self):
        g = torus(2, 5)
        m = torus_translation(g, (1, 2))
        inv = rough_inverse(m)
        assert inv.C == 4.0
        expected = torus_translation(g, (-1, -2))
        assert inv.mapping == expected.mapping
        assert check_rough_isometry(inv).holds

    def test_cycle_rotation_inverse(self):
        g = cycle(9)
        m = cycle_rotation(g, 4)
        inv = rough_inverse(m)
        assert inv.mapping == cycle_rotation(g, -4).mapping

    def test_hand_built_inverse_verified_at_4C2(self):
        m = hand_built_map()
        inv = rough_inverse(m)
        assert inv.C == 16.0
        rep = check_rough_isometry(inv)
        assert rep.holds
        assert inverse_closeness(m, inv) <= m.C

    def test_closeness_bound_on_random_translations(self):
        rng = np.random.default_rng(5)
        g = torus(2, 6)
        for _ in range(10):
            shift = rng.integers(0, 6, size=2)
            m = torus_translation(g, shift)
            inv = rough_inverse(m)
            assert check_rough_isometry(inv).holds
            assert inverse_closeness(m, inv) <= m.C

    def test_invalid_input_rejected(self):
        g = cycle(20)
        bad = RoughMap(g, g, tuple(0 for _ in range(g.n)), 2.0)
        with pytest.raises(RoughMapInvalidError):
            rough_inverse(bad)

    def test_tie_breaking_smallest_source(self):
        # Both source vertices of the hand-built map hit each path vertex;
        # the inverse must pick the smaller id.
        m = hand_built_map()
        inv = rough_inverse(m)
        assert inv.mapping == (0, 2, 4)


class TestCompose:
    def test_upper_inequality_of_composition(self):
        g = torus(2, 5)
        m1 = torus_translation(g, (1, 0))
        m2 = torus_translation(g, (0, 2))
        comp = compose(m1, m2)
        # Assert only the derivable upper bound d <= C1*C2*d + C2.
        for x in range(g.n):
            dx = g.distances_from(x)
            cx = g.distances_from(comp.mapping[x])
            for y in range(x + 1, g.n):
                d_img = int(cx[comp.mapping[y]])
                assert d_img <= m1.C * m2.C * int(dx[y]) + m2.C

    def test_composition_with_collapse(self):
        m1 = cycle_rotation(cycle(6), 1)
        m2 = hand_built_map()
        comp = compose(m1, m2)
        for x in range(6):
            for y in range(6):
                d_src = m1.source.distance(x, y)
                d_img = m2.target.distance(comp.mapping[x], comp.mapping[y])
                assert d_img <= m1.C * m2.C * d_src + m2.C


class TestImageBound:
    def test_injective_map(self):
        g = cycle(7)
        rep = image_size_lower_bound(identity_map(g), range(5))
        assert rep.image_size == 5
        assert rep.holds

    def test_empty_set(self):
        rep = image_size_lower_bound(hand_built_map(), [])
        assert rep.image_size == 0 and rep.bound == 0.0 and rep.holds

    def test_collapsing_map_against_direct_count(self):
        m = hand_built_map()
        rep = image_size_lower_bound(m, range(6))
        # Direct enumeration oracle.
        assert rep.image_size == len({C6_TO_P3[v] for v in range(6)}) == 3
        # v_bar at radius floor(2) = 2 on C6 is 5.
        assert rep.bound == pytest.approx(6 / 5)
        assert rep.holds

    def test_bound_never_fails_on_verified_maps(self):
        rng = np.random.default_rng(11)
        g = torus(2, 5)
        for _ in range(10):
            m = torus_translation(g, rng.integers(0, 5, size=2))
            a = rng.choice(g.n, size=int(rng.integers(1, g.n)), replace=False)
            assert image_size_lower_bound(m, a).holds


class TestMapFormat:
    def test_roundtrip(self):
        m = hand_built_map()
        text = format_map(m)
        m2 = parse_map(text, m.source, m.target, m.C)
        assert m2.mapping == m.mapping

    def test_partial_map_rejected(self):
        with pytest.raises(ValueError):
            parse_map("0 0\n1 1\n", cycle(3), cycle(3), 1.0)
