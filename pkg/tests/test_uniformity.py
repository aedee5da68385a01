import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import algebras, coord_algebras
from medalg import bits
from medalg.algebra import (
    Automorphism,
    MedianAlgebraError,
    NotConvexError,
    automorphisms,
    make_chain,
    make_grid,
    make_hypercube,
    make_starlet,
)
from medalg.uniformity import (
    Cover,
    CoverError,
    NotChainInterval,
    adjacent_subbase,
    branch,
    branch_convexity_check,
    branch_equivalence_check,
    chain_solvable_check,
    chain_subbase,
    chain_witness_from_t2m,
    convex_restriction_check,
    equivariance_check,
    equivariance_group_check,
    initial_uniformity_check,
    is_hausdorff_Um,
    lots_check,
    median_uniform_continuity_check,
    preimage_rays_check,
    product_uniformity_check,
    refines,
    same_filter,
    shadow,
    star,
    star_cover,
    star_refines,
    star_trichotomy_check,
    subbasic_cover,
    t2m_check,
    total_wedge,
    uniformity_contains,
    verify_chain_witness,
    wedge,
)


def _sets(mask_seq):
    return {frozenset(bits.to_list(m)) for m in mask_seq}


def test_cube3_shadows_and_branches():
    q = make_hypercube(3)
    x, y, z = q.index_of((0, 0, 0)), q.index_of((1, 1, 0)), q.index_of((1, 0, 0))
    lab = lambda m: {q.labels[i] for i in bits.members(m)}   # noqa: E731
    assert lab(shadow(q, y, x)) == {(1, 1, 0), (1, 1, 1)}
    assert len(lab(branch(q, y, x))) == 6
    assert lab(shadow(q, y, z)) == {(0, 1, 0), (1, 1, 0), (0, 1, 1), (1, 1, 1)}
    assert lab(branch(q, y, z)) == {(0, 0, 0), (1, 0, 0), (0, 0, 1), (1, 0, 1)}


def test_branch_of_degenerate_pair_raises():
    with pytest.raises(MedianAlgebraError):
        branch(make_chain(3), 1, 1)


def test_subbasic_cover_on_three_chain():
    c = subbasic_cover(make_chain(3), 0, 2)
    assert _sets(c.members) == {frozenset({0, 1}), frozenset({1, 2})}


def test_subbasic_cover_rejects_non_chain():
    q = make_hypercube(3)
    with pytest.raises(NotChainInterval):
        subbasic_cover(q, q.index_of((0, 0, 0)), q.index_of((1, 1, 0)))
    with pytest.raises(MedianAlgebraError):
        subbasic_cover(q, 0, 0)


def test_chain_subbase_sizes():
    # opposite edges of the square give the same cover, so only two survive
    assert len(chain_subbase(make_hypercube(2))) == 2
    assert len(chain_subbase(make_hypercube(3))) == 3
    assert len(chain_subbase(make_chain(4))) == 6
    assert len(chain_subbase(make_chain(1))) == 0


def test_chain_subbase_size_matches_oracle():
    for alg in (make_chain(5), make_starlet(4), make_grid(2, 3), make_hypercube(2)):
        med = oracles.table_median(alg)
        pts = range(alg.n)
        covers = set()
        for u, v in itertools.permutations(pts, 2):
            if oracles.is_chain_interval(pts, med, u, v):
                s_u = frozenset(pts) - oracles.shadow(pts, med, u, v)
                s_v = frozenset(pts) - oracles.shadow(pts, med, v, u)
                covers.add(frozenset((s_u, s_v)))
        assert len(chain_subbase(alg)) == len(covers)


def test_cover_construction_errors():
    with pytest.raises(CoverError):
        Cover.of(0b111, [0b011])
    with pytest.raises(CoverError):
        Cover.of(0b011, [0b111])
    c = Cover.of(0b111, [0b011, 0b001, 0b110, 0])
    assert c.members == (0b011, 0b110)


def test_star_and_refinement_basics():
    carrier = 0b1111
    c = Cover.of(carrier, [0b0011, 0b0110, 0b1100])
    assert star(c, 1) == 0b0111
    assert star_cover(c).members == (0b1111,)     # the middle member meets both others
    assert refines(Cover.singletons(carrier), c)
    assert not refines(Cover.trivial(carrier), c)
    assert star_refines(Cover.singletons(carrier), Cover.of(carrier, [0b0011, 0b1100])) is True
    assert wedge(c, Cover.trivial(carrier)) == c


def test_finite_uniformity_is_discrete():
    for alg in (make_chain(4), make_hypercube(3), make_starlet(5)):
        sb = chain_subbase(alg)
        assert total_wedge(alg.carrier, sb.covers) == Cover.singletons(alg.carrier)
        assert uniformity_contains(sb, Cover.singletons(alg.carrier))


def test_adjacent_and_chain_subbases_agree():
    for alg in (make_chain(5), make_grid(3, 3), make_starlet(3)):
        assert same_filter(alg.carrier, chain_subbase(alg).covers, adjacent_subbase(alg).covers)


def test_same_filter_detects_difference():
    c = make_chain(4)
    assert not same_filter(c.carrier, chain_subbase(c).covers, [Cover.trivial(c.carrier)])


def test_chain_reversal_equivariance():
    c = make_chain(5)
    assert equivariance_check(c, Automorphism((4, 3, 2, 1, 0)))
    assert not equivariance_check(c, Automorphism((1, 0, 2, 3, 4)))


def test_full_group_equivariance_on_cube():
    q = make_hypercube(3)
    assert equivariance_group_check(q, automorphisms(q))


def test_lots_check_needs_chain():
    assert lots_check(make_chain(6))
    with pytest.raises(MedianAlgebraError):
        lots_check(make_hypercube(2))


def test_convex_restriction_errors():
    q = make_hypercube(2)
    with pytest.raises(NotConvexError):
        convex_restriction_check(q, 0b1001)   # two opposite corners
    with pytest.raises(MedianAlgebraError):
        convex_restriction_check(q, 0)


def test_chain_witness_transform_on_grid():
    g = make_grid(3, 3)
    rep = t2m_check(g)
    for (x, y), sep in rep.witnesses.items():
        c, d = chain_witness_from_t2m(g, x, y, sep)
        assert verify_chain_witness(g, x, y, c, d)


# -- properties --------------------------------------------------------------------------

def _oracle_hausdorff(alg):
    med = oracles.table_median(alg)
    pts = range(alg.n)
    for x, y in itertools.combinations(pts, 2):
        if not any(oracles.is_chain_interval(pts, med, u, v)
                   and {med(u, x, v), med(u, y, v)} == {u, v}
                   for u, v in itertools.permutations(pts, 2)):
            return False
    return True


@given(algebras())
def test_shadow_matches_oracle(alg):
    med = oracles.table_median(alg)
    for u, v in itertools.product(range(alg.n), repeat=2):
        assert shadow(alg, u, v) == bits.from_indices(oracles.shadow(range(alg.n), med, u, v))


@given(algebras())
def test_separation_three_way_agreement(alg):
    t2 = t2m_check(alg).holds
    cs = chain_solvable_check(alg).holds
    assert t2 == cs == is_hausdorff_Um(alg) == _oracle_hausdorff(alg)


@given(algebras())
def test_uniformity_theorems_hold(alg):
    assert branch_convexity_check(alg)
    assert branch_equivalence_check(alg)
    assert star_trichotomy_check(alg)
    assert preimage_rays_check(alg)
    assert initial_uniformity_check(alg)
    assert median_uniform_continuity_check(alg)


@given(coord_algebras(max_factors=2), st.integers(1, 3))
def test_product_uniformity(alg, k):
    assert product_uniformity_check(alg, make_chain(k))


@given(algebras(), st.data())
def test_convex_restriction(alg, data):
    x = data.draw(st.integers(0, alg.n - 1))
    y = data.draw(st.integers(0, alg.n - 1))
    assert convex_restriction_check(alg, alg.interval_mask(x, y))


@given(algebras())
def test_equivariance_under_full_group(alg):
    assert equivariance_group_check(alg, automorphisms(alg))
