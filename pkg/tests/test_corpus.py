import pytest

import oracles
from medalg.algebra import MedianAlgebraError, make_chain, make_grid, make_hypercube, SizeBoundError
from medalg.corpus import (
    CorpusSpec,
    default_corpus,
    enumerate_subalgebras,
    instances_by_id,
    random_subalgebra,
    random_tree,
)
from medalg.walls import walls


def _oracle_count(k):
    pts = oracles.cube_points(k)
    return len(oracles.subalgebras(pts, oracles.coord_median))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_cube_subalgebra_counts(k):
    found = enumerate_subalgebras(make_hypercube(k))
    assert len(found) == _oracle_count(k)


def test_frozen_subalgebra_counts():
    # frozen from the brute-force oracle; every subset of the square is closed
    assert [len(enumerate_subalgebras(make_hypercube(k))) for k in (1, 2, 3)] == [3, 15, 165]


def test_enumeration_limit():
    with pytest.raises(SizeBoundError):
        enumerate_subalgebras(make_chain(11))


def test_random_subalgebra_is_deterministic():
    spec = CorpusSpec()
    g = make_grid(3, 3, 3)
    a = random_subalgebra(spec, g, 7, stream=1)
    b = random_subalgebra(spec, g, 7, stream=1)
    assert a.labels == b.labels
    assert random_subalgebra(spec, g, 0, k=1).n == 1


def test_two_seed_closure_is_the_pair():
    g = make_grid(3, 3, 3)
    assert random_subalgebra(CorpusSpec(), g, 3, k=2).n == 2


def test_random_tree_is_a_tree():
    spec = CorpusSpec()
    for i in range(5):
        t = random_tree(spec, i)
        assert len(walls(t)) == t.n - 1
        lo, hi = spec.tree_sizes
        assert lo <= t.n <= hi


@pytest.fixture(scope="module")
def corpus():
    return default_corpus()


def test_default_corpus_shape(corpus):
    assert len(corpus) >= 500
    ids = [inst.id for inst in corpus]
    assert len(set(ids)) == len(ids)
    fams = {inst.family for inst in corpus}
    assert fams == {"cube3-sub", "cube-closure", "grid-closure", "tree", "starlet", "product"}
    assert max(inst.algebra.n for inst in corpus) <= CorpusSpec().cap
    assert all(inst.parts is not None for inst in corpus if inst.family == "product")
    assert "starlet-8" in instances_by_id(corpus)


def test_corpus_is_reproducible(corpus):
    again = default_corpus()
    assert [(i.id, i.algebra.n) for i in again] == [(i.id, i.algebra.n) for i in corpus]
    other = default_corpus(CorpusSpec(seed=7))
    assert [i.algebra.n for i in other] != [i.algebra.n for i in corpus]


def test_tiny_spec_rejects_impossible_products():
    spec = CorpusSpec(cap=1, products=1, cube_closures=0, grid_closures=0, trees=1,
                      enumerate_cube3=False, starlets=())
    with pytest.raises(MedianAlgebraError):
        default_corpus(spec)
