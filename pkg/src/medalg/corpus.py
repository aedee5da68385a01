"""Seeded corpus of finite median algebras."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import networkx as nx
import numpy as np

from . import bits
from .algebra import (
    FiniteMedianAlgebra,
    MedianAlgebraError,
    SizeBoundError,
    closure_mask,
    make_chain,
    make_grid,
    make_hypercube,
    make_product,
    make_starlet,
    median_graph_from_edges,
)

ENUMERATION_LIMIT = 10
RETRIES = 20


@dataclass(frozen=True)
class CorpusSpec:
    seed: int = 42
    cube_dim: int = 5
    cube_closures: int = 200
    grid_shape: tuple[int, ...] = (3, 3, 3)
    grid_closures: int = 200
    seed_counts: tuple[int, ...] = (2, 3, 4, 5)
    trees: int = 40
    tree_sizes: tuple[int, int] = (2, 14)
    starlets: tuple[int, ...] = (2, 3, 4, 5, 6, 7, 8)
    products: int = 60
    enumerate_cube3: bool = True
    cap: int = 128


@dataclass
class Instance:
    id: str
    algebra: FiniteMedianAlgebra
    family: str
    parts: tuple[FiniteMedianAlgebra, FiniteMedianAlgebra] | None = field(default=None)


def enumerate_subalgebras(ambient: FiniteMedianAlgebra) -> list[FiniteMedianAlgebra]:
    """Every nonempty median-closed subset, by scanning all subsets."""
    if ambient.n > ENUMERATION_LIMIT:
        raise SizeBoundError(f"subset scan limited to n <= {ENUMERATION_LIMIT}")
    t = ambient.table
    out = []
    for mask in range(1, 1 << ambient.n):
        idx = np.array(bits.to_list(mask))
        produced = np.unique(t[np.ix_(idx, idx, idx)])
        if bits.from_indices(produced.tolist()) & ~mask == 0:
            out.append(ambient.induced(mask, provenance="closure"))
    return out


def _rng(spec: CorpusSpec, stream: int, index: int) -> np.random.Generator:
    return np.random.default_rng([spec.seed, stream, index])


def random_subalgebra(spec: CorpusSpec, ambient: FiniteMedianAlgebra, index: int,
                      stream: int = 0, k: int | None = None) -> FiniteMedianAlgebra:
    """Median closure of ``k`` seeded points; resampled while larger than the cap."""
    rng = _rng(spec, stream, index)
    for _ in range(RETRIES):
        size = k if k is not None else int(rng.choice(spec.seed_counts))
        seeds = rng.choice(ambient.n, size=min(size, ambient.n), replace=False)
        try:
            mask = closure_mask(ambient, seeds.tolist(), max_size=spec.cap)
        except SizeBoundError:
            continue
        return ambient.induced(mask, provenance="closure")
    raise MedianAlgebraError(f"closure retries exhausted for index {index}")


def random_tree(spec: CorpusSpec, index: int) -> FiniteMedianAlgebra:
    """Random spanning tree of a random connected graph, as a median graph."""
    rng = _rng(spec, 2, index)
    lo, hi = spec.tree_sizes
    m = int(rng.integers(lo, hi + 1))
    gseed = int(rng.integers(0, 2**31 - 1))
    g = nx.gnp_random_graph(m, 0.4, seed=gseed)
    # join components so a spanning tree exists
    comps = [sorted(c) for c in nx.connected_components(g)]
    for a, b in zip(comps, comps[1:]):
        g.add_edge(a[0], b[0])
    for u, v in g.edges:
        g.edges[u, v]["weight"] = float(rng.random())
    tree = nx.minimum_spanning_tree(g)
    return median_graph_from_edges(m, sorted(tree.edges), provenance="graph")


def default_corpus(spec: CorpusSpec = CorpusSpec()) -> list[Instance]:
    out: list[Instance] = []
    if spec.enumerate_cube3:
        for i, alg in enumerate(enumerate_subalgebras(make_hypercube(3))):
            out.append(Instance(f"cube3-sub-{i:03d}", alg, "cube3-sub"))
    cube = make_hypercube(spec.cube_dim)
    for i in range(spec.cube_closures):
        out.append(Instance(f"cube{spec.cube_dim}-closure-{i:03d}",
                            random_subalgebra(spec, cube, i, stream=0), "cube-closure"))
    grid = make_grid(*spec.grid_shape)
    shape = "x".join(map(str, spec.grid_shape))
    for i in range(spec.grid_closures):
        out.append(Instance(f"grid{shape}-closure-{i:03d}",
                            random_subalgebra(spec, grid, i, stream=1), "grid-closure"))
    trees = [random_tree(spec, i) for i in range(spec.trees)]
    for i, t in enumerate(trees):
        out.append(Instance(f"tree-{i:03d}", t, "tree"))
    for n in spec.starlets:
        out.append(Instance(f"starlet-{n}", make_starlet(n), "starlet"))
    pool = ([make_chain(k) for k in range(1, 6)] + trees[:10]
            + [make_starlet(n) for n in (2, 3, 4)]
            + [random_subalgebra(spec, cube, i, stream=3, k=3) for i in range(8)]
            + [make_hypercube(2)])
    for i in range(spec.products):
        rng = _rng(spec, 4, i)
        for _ in range(RETRIES):
            a, b = (pool[j] for j in rng.integers(0, len(pool), size=2))
            if a.n * b.n <= spec.cap:
                break
        else:
            raise MedianAlgebraError(f"no product pair fits the cap for index {i}")
        out.append(Instance(f"product-{i:03d}", make_product(a, b), "product", (a, b)))
    return out


def instances_by_id(instances: Sequence[Instance]) -> dict[str, Instance]:
    return {inst.id: inst for inst in instances}
