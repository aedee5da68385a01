import itertools

import pytest
from hypothesis import given

import oracles
from conftest import algebras, tree_algebras
from medalg import bits
from medalg.algebra import MedianAlgebraError, make_chain, make_grid, make_hypercube, make_starlet
from medalg.topology import (
    FiniteTopology,
    branch_subbase,
    degree,
    gate_initial_topology,
    geometric_branching_check,
    halfspace_topology,
    halfspaces,
    lipschitz_median_check,
    local_convexity_check,
    metric_checks,
    min_isolating_branches,
    shadow_subbase,
    small_star_leaf_bound,
    tau_m,
    wall_metric,
)


def test_finite_topology_from_subbase():
    top = FiniteTopology.from_subbase(3, [0b011, 0b110])
    assert top.min_nbhd == (0b011, 0b010, 0b110)
    assert top.is_open(0b011) and not top.is_open(0b001)
    assert not top.is_discrete()
    assert FiniteTopology.from_subbase(2, [0b01, 0b10]).is_discrete()


@pytest.mark.parametrize("alg,x,count", [
    (make_chain(3), 1, 2), (make_chain(3), 0, 1), (make_hypercube(3), 0, 3),
    (make_starlet(4), 0, 4), (make_starlet(7), 0, 7), (make_grid(3, 3), 4, 4),
])
def test_min_isolating_branches(alg, x, count):
    res = min_isolating_branches(alg, x)
    assert res.count == count
    meet = alg.carrier
    for b in res.branches:
        meet &= b
    assert meet == 1 << x


def test_degree_examples():
    assert degree(make_starlet(5), 0) == 5
    assert degree(make_hypercube(3), 0) == 3
    assert degree(make_chain(4), 0) == 1


def test_geometric_branching_on_starlet():
    s = make_starlet(6)
    assert geometric_branching_check(s, 0, 1).count == 6
    assert geometric_branching_check(s, 0, 2).count == 0       # ball holds everything
    with pytest.raises(MedianAlgebraError):
        geometric_branching_check(s, 0, 0)


def test_geometric_branching_at_diameter():
    c = make_chain(5)
    diam = int(wall_metric(c).max())
    # balls are strict, so eps equal to the diameter still misses the far end
    assert geometric_branching_check(c, 0, diam).count == 1
    assert geometric_branching_check(c, 0, diam + 1).count == 0


@pytest.mark.parametrize("n", range(2, 9))
def test_small_stars_keep_leaves(n):
    s = make_starlet(n)
    assert [small_star_leaf_bound(s, 0, k) for k in range(n + 1)] == [n - k for k in range(n + 1)]


def test_wall_metric_on_cube_is_hamming():
    q = make_hypercube(3)
    d = wall_metric(q)
    for x, y in itertools.product(range(q.n), repeat=2):
        assert d[x, y] == sum(a != b for a, b in zip(q.labels[x], q.labels[y]))


def test_halfspaces_of_chain():
    assert len(halfspaces(make_chain(4))) == 6


def test_lipschitz_sampled_mode():
    rep = lipschitz_median_check(make_grid(3, 3), exhaustive_limit=2, samples=500, seed=1)
    assert rep.holds and rep.mode == "sampled" and rep.samples == 500


# -- properties ------------------------------------------------------------------------

@given(algebras())
def test_finite_intrinsic_topology_is_discrete(alg):
    top = tau_m(alg)
    assert top.is_discrete()
    assert top == halfspace_topology(alg)
    assert gate_initial_topology(alg) == top
    assert gate_initial_topology(alg, all_intervals=True) == top
    assert local_convexity_check(alg)


@given(algebras())
def test_branches_are_halfspaces(alg):
    assert set(branch_subbase(alg)) == set(halfspaces(alg))


@given(algebras())
def test_metric_properties(alg):
    assert metric_checks(alg).holds
    assert lipschitz_median_check(alg).holds
    d = wall_metric(alg)
    oracle = oracles.graph_distance(range(alg.n),
                                    [(a, b) for a, b in itertools.combinations(range(alg.n), 2)
                                     if bits.count(alg.interval_mask(a, b)) == 2])
    for x, y in itertools.product(range(alg.n), repeat=2):
        assert d[x, y] == oracle[x, y]


def _oracle_isolation(alg, x):
    med = oracles.table_median(alg)
    pts = range(alg.n)
    full = frozenset(pts)
    branches = {full - oracles.shadow(pts, med, u, v)
                for u, v in itertools.permutations(pts, 2)
                if oracles.is_chain_interval(pts, med, u, v)}
    at_x = [b for b in branches if x in b]
    for r in range(len(at_x) + 1):
        for combo in itertools.combinations(at_x, r):
            if frozenset.intersection(full, *combo) == {x}:
                return r
    return None


@given(algebras(max_seeds=3))
def test_isolation_matches_brute_force(alg):
    for x in range(min(alg.n, 4)):
        res = min_isolating_branches(alg, x)
        assert res.degree_lower <= res.count <= res.greedy_upper
        assert res.count == _oracle_isolation(alg, x)


@given(tree_algebras())
def test_tree_isolation_equals_degree(alg):
    for x in range(alg.n):
        assert min_isolating_branches(alg, x).count == degree(alg, x)


@given(tree_algebras())
def test_tree_shadow_topology_is_intrinsic(alg):
    assert FiniteTopology.from_subbase(alg.n, shadow_subbase(alg)) == tau_m(alg)
