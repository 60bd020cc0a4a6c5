import math
from collections import deque

import numpy as np
import pytest

from percoscale.graphs import (
    Graph,
    GraphValidationError,
    NoGeodesicError,
    ball,
    boundary,
    box,
    check_isoperimetry,
    complete,
    cycle,
    enumerate_connected_subsets,
    find_geodesic_segment,
    format_adjacency,
    gen_graph,
    growth_profile,
    ladder,
    parse_adjacency,
    set_diameter,
    sphere,
    torus,
    verify_geodesic_segment,
)


def bfs_distances_oracle(g, source):
    """Reference BFS, independent of Graph internals."""
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in g.adj[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def box_vertex(side, i, j):
    return i + j * side


class TestGenerators:
    def test_torus_2d_side4(self):
        g = torus(2, 4)
        assert g.n == 16
        assert g.is_regular == 4
        assert g.edge_count == 32

    def test_cycle_5(self):
        g = cycle(5)
        assert g.n == 5
        assert all(g.degree(v) == 2 for v in range(5))

    def test_box_2d_side3(self):
        g = box(2, 3)
        assert g.n == 9
        assert g.degree(box_vertex(3, 0, 0)) == 2
        assert g.degree(box_vertex(3, 1, 1)) == 4

    def test_ladder_and_complete(self):
        g = ladder(5)
        assert g.n == 10 and g.edge_count == 5 + 2 * 4
        k = complete(4)
        assert k.is_regular == 3 and k.edge_count == 6

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            torus(0, 5)
        with pytest.raises(ValueError):
            torus(2, 2)
        with pytest.raises(ValueError):
            cycle(2)
        with pytest.raises(ValueError):
            gen_graph("nonsense", n=3)

    def test_generators_connected_and_simple(self):
        for g in [torus(2, 5), torus(3, 3), box(2, 4), box(1, 7),
                  cycle(9), ladder(4), complete(5)]:
            # Validation runs in the constructor; re-run it explicitly.
            Graph(g.adj, g.generator_tag, g.params)


class TestBallSphere:
    def test_ball_interior_r1(self):
        g = box(2, 11)
        x = box_vertex(11, 5, 5)
        assert len(ball(g, x, 1)) == 5

    def test_ball_r0(self):
        g = cycle(7)
        assert list(ball(g, 3, 0)) == [3]

    def test_ball_cycle_arc(self):
        g = cycle(10)
        assert len(ball(g, 0, 3)) == 7

    def test_sphere_r0_and_neighbors(self):
        g = box(2, 11)
        x = box_vertex(11, 5, 5)
        assert list(sphere(g, x, 0)) == [x]
        assert set(sphere(g, x, 1)) == set(g.adj[x])

    def test_sphere_empty_beyond_eccentricity(self):
        g = cycle(10)
        assert len(sphere(g, 0, 6)) == 0
        assert not g.has_sphere(0, 6)
        assert g.has_sphere(0, 5)

    def test_ball_decomposition_identity(self):
        rng = np.random.default_rng(7)
        for g in [torus(2, 6), box(2, 7), cycle(13), ladder(6)]:
            for _ in range(5):
                x = int(rng.integers(g.n))
                r = int(rng.integers(1, 5))
                b_r = set(ball(g, x, r))
                b_prev = set(ball(g, x, r - 1))
                s_r = set(sphere(g, x, r))
                assert b_r == b_prev | s_r
                assert not (b_prev & s_r)

    def test_ball_matches_bfs_oracle(self):
        g = torus(2, 7)
        dist = bfs_distances_oracle(g, 10)
        for r in range(5):
            expected = {v for v, d in dist.items() if d <= r}
            assert set(ball(g, 10, r)) == expected


class TestBoundary:
    def test_square_deep_inside_box(self):
        g = box(2, 15)
        block = [box_vertex(15, 5 + i, 5 + j) for i in range(5) for j in range(5)]
        edges = boundary(g, block, "edge")
        # Oracle: enumerate all graph edges and count crossings directly.
        a = set(block)
        crossing = [tuple(e) for e in g.edges
                    if (e[0] in a) != (e[1] in a)]
        assert len(edges) == 20
        assert sorted(edges) == sorted(crossing)

    def test_single_interior_vertex(self):
        g = box(2, 9)
        x = box_vertex(9, 4, 4)
        assert len(boundary(g, [x], "edge")) == 4
        assert list(boundary(g, [x], "internal_vertex")) == [x]

    def test_whole_torus_has_empty_boundary(self):
        g = torus(2, 4)
        assert boundary(g, range(g.n), "edge") == []
        assert len(boundary(g, range(g.n), "internal_vertex")) == 0

    def test_internal_boundary_subset_of_A(self):
        g = torus(2, 6)
        rng = np.random.default_rng(3)
        for _ in range(10):
            a = rng.choice(g.n, size=10, replace=False)
            internal = boundary(g, a, "internal_vertex")
            assert set(internal) <= set(int(v) for v in a)
            for u, v in boundary(g, a, "edge"):
                assert (u in set(a)) != (v in set(a))


class TestSetDiameter:
    def test_singleton(self):
        assert set_diameter(cycle(8), [2]) == 0

    def test_path_graph(self):
        g = box(1, 6)
        assert set_diameter(g, range(6)) == 5

    def test_3x3_square_oracle(self):
        g = box(2, 9)
        block = [box_vertex(9, 3 + i, 3 + j) for i in range(3) for j in range(3)]
        # Oracle: all-pairs BFS distances.
        expected = max(bfs_distances_oracle(g, a)[b] for a in block for b in block)
        assert expected == 4
        assert set_diameter(g, block) == 4

    def test_empty_set_rejected(self):
        with pytest.raises(ValueError):
            set_diameter(cycle(5), [])


class TestGrowthProfile:
    def test_z2_interior_cu(self):
        # Box big enough that the sup ball at every sampled r is the full
        # Z^2 ball 2r^2+2r+1; the minimal c_u against r^2 is then 5 at r=1.
        r_max = 4
        g = box(2, 2 * r_max + 3)
        rep = growth_profile(g, r_max, d_u=2.0, d_l=1.0)
        assert rep.v_bar == [2 * r * r + 2 * r + 1 for r in range(1, r_max + 1)]
        assert rep.c_u_min == pytest.approx(5.0)

    def test_vbar_r1_is_one_plus_max_degree(self):
        for g in [torus(2, 5), box(2, 4), cycle(9), complete(5)]:
            rep = growth_profile(g, 1, d_u=1.0, d_l=1.0)
            max_deg = max(g.degree(v) for v in range(g.n))
            assert rep.v_bar[0] == 1 + max_deg

    def test_cycle_cl(self):
        r_max = 5
        g = cycle(30)
        rep = growth_profile(g, r_max, d_u=1.0, d_l=1.0)
        # Arc arithmetic oracle: |B(x, r)| = 2r + 1 on a long cycle.
        expected = min((2 * r + 1) / r for r in range(1, r_max + 1))
        assert rep.c_l_max == pytest.approx(expected)
        assert rep.c_l_max >= 2.0

    def test_vbar_nondecreasing(self):
        rep = growth_profile(torus(2, 7), 5, 2.0, 1.0)
        assert all(a <= b for a, b in zip(rep.v_bar, rep.v_bar[1:]))

    def test_rmax_validation(self):
        with pytest.raises(ValueError):
            growth_profile(cycle(8), 0, 1.0, 1.0)
        with pytest.raises(ValueError):
            growth_profile(cycle(8), 5, 1.0, 1.0)  # ecc is 4


def connected_subsets_oracle(g, s_max):
    """Powerset filter; usable only for tiny graphs."""
    from itertools import combinations
    out = set()
    for size in range(1, s_max + 1):
        for combo in combinations(range(g.n), size):
            seen = {combo[0]}
            queue = deque([combo[0]])
            cset = set(combo)
            while queue:
                v = queue.popleft()
                for w in g.adj[v]:
                    if w in cset and w not in seen:
                        seen.add(w)
                        queue.append(w)
            if seen == cset:
                out.add(combo)
    return out


class TestIsoperimetry:
    def test_enumeration_matches_bruteforce(self):
        for g in [cycle(9), box(2, 3), complete(4), ladder(5)]:
            assert g.n <= 12
            got = set(enumerate_connected_subsets(g, 4, budget=1_000_000))
            assert got == connected_subsets_oracle(g, 4)

    def test_cycle20_violates_I_1_2(self):
        g = cycle(20)
        rep = check_isoperimetry(g, c_i=1.0, d_i=2.0, s_max=10)
        assert not rep.holds
        # Worst set is a 10-arc: boundary 2, ratio 2 / sqrt(10).
        assert len(rep.worst_set) == 10
        assert rep.worst_ratio == pytest.approx(2.0 / math.sqrt(10.0))

    def test_single_vertex_holds_when_ci_below_min_degree(self):
        g = torus(2, 5)
        rep = check_isoperimetry(g, c_i=1.0, d_i=2.0, s_max=1)
        assert rep.holds  # |boundary| = 4 >= 1 for every singleton

    def test_z2_box_holds_exhaustively(self):
        g = box(2, 5)
        rep = check_isoperimetry(g, c_i=1.0, d_i=2.0, s_max=6)
        assert rep.holds and rep.exhaustive

    def test_budget_guard(self):
        from percoscale.graphs import BudgetExceededError
        with pytest.raises(BudgetExceededError):
            check_isoperimetry(torus(2, 6), 1.0, 2.0, s_max=10, budget=50)

    def test_sampled_mode_reported(self):
        g = cycle(30)
        rep = check_isoperimetry(g, 1.0, 2.0, s_max=3, n_samples=20,
                                 sample_size=12, seed=1)
        assert rep.sampled_sizes == 20
        assert not rep.holds  # a sampled 12-arc has ratio 2/sqrt(12) < 1


class TestGeodesicSegments:
    def test_path_graph_full_length(self):
        g = box(1, 8)
        seg = find_geodesic_segment(g, 7)
        assert len(seg) == 8
        assert verify_geodesic_segment(g, seg)

    def test_cycle_half(self):
        g = cycle(10)
        seg = find_geodesic_segment(g, 5)
        assert len(seg) == 6
        assert verify_geodesic_segment(g, seg)

    def test_torus_half_side(self):
        g = torus(2, 8)
        seg = find_geodesic_segment(g, 4)
        assert verify_geodesic_segment(g, seg)

    def test_too_long_raises(self):
        with pytest.raises(NoGeodesicError):
            find_geodesic_segment(cycle(10), 6)

    def test_verify_rejects_non_geodesic(self):
        g = cycle(6)
        assert not verify_geodesic_segment(g, [0, 1, 2, 3, 4])  # d(0,4)=2


class TestAdjacencyFormat:
    def test_roundtrip(self):
        g = torus(2, 4)
        text = format_adjacency(g)
        h = parse_adjacency(text)
        assert h.n == g.n
        assert [h.adj[v] for v in range(h.n)] == [g.adj[v] for v in range(g.n)]

    def test_disconnected_rejected(self):
        with pytest.raises(GraphValidationError):
            parse_adjacency("4 2\n0 1\n2 3\n")

    def test_self_loop_rejected(self):
        with pytest.raises(GraphValidationError):
            parse_adjacency("2 1\n0 0\n")

    def test_bad_header_rejected(self):
        with pytest.raises(GraphValidationError):
            parse_adjacency("3\n0 1\n")
