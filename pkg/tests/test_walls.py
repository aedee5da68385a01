import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import algebras, coord_algebras
from medalg import bits
from medalg.algebra import make_chain, make_grid, make_hypercube, make_product, make_starlet
from medalg.walls import (
    Wall,
    brute_force_walls,
    crossing,
    cube_embedding_rank,
    dilworth_colouring,
    interval_chain_embedding,
    oriented_separators,
    rank,
    separating_walls,
    wall_fingerprint,
    walls,
)


def _as_oracle(ws):
    return {frozenset((frozenset(bits.to_list(w.side_a)), frozenset(bits.to_list(w.side_b))))
            for w in ws}


@pytest.mark.parametrize("alg,count", [
    (make_chain(2), 1), (make_chain(5), 4), (make_hypercube(3), 3),
    (make_starlet(3), 3), (make_starlet(6), 6), (make_grid(3, 4), 5),
])
def test_wall_counts(alg, count):
    assert len(walls(alg)) == count


@pytest.mark.parametrize("alg,r", [
    (make_chain(1), 0), (make_chain(6), 1), (make_hypercube(3), 3),
    (make_grid(3, 3), 2), (make_starlet(5), 1), (make_hypercube(4), 4),
])
def test_rank_values(alg, r):
    assert rank(alg) == r


def test_product_rank_is_additive_on_example():
    assert rank(make_product(make_starlet(3), make_grid(2, 3))) == 3


def test_wall_sides_hold_element_zero_first():
    for w in walls(make_hypercube(3)):
        assert w.side_a & 1
        assert Wall.from_side(w.side_b, w.side_a | w.side_b) == w


def test_separating_walls_count_is_distance_on_cube():
    q = make_hypercube(4)
    for x, y in itertools.combinations(range(q.n), 2):
        hamming = sum(a != b for a, b in zip(q.labels[x], q.labels[y]))
        assert len(separating_walls(q, x, y)) == hamming


def test_crossing_in_square_and_chain():
    assert crossing(*walls(make_hypercube(2)))
    w = walls(make_chain(3))
    assert not crossing(w[0], w[1])


def test_dilworth_on_grid_interval():
    g = make_grid(3, 4)
    x, y = g.index_of((0, 0)), g.index_of((2, 3))
    classes = dilworth_colouring(g, x, y)
    assert sorted(len(c) for c in classes) == [2, 3]
    emb = interval_chain_embedding(g, x, y)
    assert emb.injective and emb.median_preserving
    assert sorted(emb.chain_lengths) == [3, 4]


def test_dilworth_on_starlet_interval_is_one_chain():
    s = make_starlet(4)
    classes = dilworth_colouring(s, 1, 2)
    assert len(classes) == 1 and len(classes[0]) == 2


def test_oriented_separators_minus_side_holds_x():
    q = make_hypercube(3)
    for ow in oriented_separators(q, 0, 7):
        assert ow.minus & 1 and not ow.plus & 1
        assert ow.plus >> 7 & 1


def test_fingerprint_injective_on_cube():
    fp = wall_fingerprint(make_hypercube(3), 0)
    assert fp.is_injective()
    assert fp[0] == frozenset()


# -- oracle agreement -------------------------------------------------------------------

@given(algebras())
def test_walls_match_definition(alg):
    want = oracles.walls(range(alg.n), oracles.table_median(alg))
    assert _as_oracle(walls(alg)) == want
    assert _as_oracle(brute_force_walls(alg)) == want


@given(algebras())
def test_rank_matches_crossing_family_and_cube_search(alg):
    ws = oracles.walls(range(alg.n), oracles.table_median(alg))
    assert rank(alg) == oracles.rank_from_walls(ws) == cube_embedding_rank(alg)


@given(coord_algebras(), st.data())
def test_dilworth_classes_are_chains_of_rank_size(alg, data):
    x = data.draw(st.integers(0, alg.n - 1))
    y = data.draw(st.integers(0, alg.n - 1))
    if x == y:
        return
    classes = dilworth_colouring(alg, x, y)
    assert len(classes) == rank(alg.induced(alg.interval_mask(x, y)))
    assert sum(len(c) for c in classes) == len(separating_walls(alg, x, y))
    for cls in classes:
        for p, q in zip(cls, cls[1:]):
            assert p <= q
    emb = interval_chain_embedding(alg, x, y)
    assert emb.injective and emb.median_preserving
