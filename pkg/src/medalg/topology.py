"""Finite topologies on median algebras, the wall-count metric and branching counts."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import bits
from .algebra import (
    FiniteMedianAlgebra,
    MedianAlgebraError,
    adjacent_pairs,
    chain_pairs,
    convex_violation,
    graph_distance_matrix,
)
from .uniformity import branch
from .walls import walls

LIPSCHITZ_EXHAUSTIVE_LIMIT = 16
LIPSCHITZ_SAMPLES = 100_000


class NotIsolated(MedianAlgebraError):
    pass


@dataclass(frozen=True)
class FiniteTopology:
    """A finite topology stored as the minimal open neighbourhood of each point."""

    min_nbhd: tuple[int, ...]

    @classmethod
    def from_subbase(cls, n: int, subbase: Sequence[int]) -> "FiniteTopology":
        nb = [bits.full(n)] * n
        for s in subbase:
            for x in bits.members(s):
                nb[x] &= s
        return cls(tuple(nb))

    def is_discrete(self) -> bool:
        return all(m == 1 << x for x, m in enumerate(self.min_nbhd))

    def is_open(self, mask: int) -> bool:
        return all(self.min_nbhd[x] & ~mask == 0 for x in bits.members(mask))

    def coarser_or_equal(self, other: "FiniteTopology") -> bool:
        """Every open set of ``self`` is open in ``other``."""
        return all(o & ~s == 0 for s, o in zip(self.min_nbhd, other.min_nbhd))


def branch_subbase(alg: FiniteMedianAlgebra) -> list[int]:
    """Distinct branches of all nontrivial chain intervals, both directions."""
    out = set()
    for u, v in chain_pairs(alg):
        out.add(branch(alg, u, v))
        out.add(branch(alg, v, u))
    return sorted(out)


def tau_m(alg: FiniteMedianAlgebra) -> FiniteTopology:
    cached = alg._cache.get("tau_m")
    if cached is None:
        cached = FiniteTopology.from_subbase(alg.n, branch_subbase(alg))
        alg._cache["tau_m"] = cached
    return cached


def halfspaces(alg: FiniteMedianAlgebra) -> list[int]:
    return sorted({side for w in walls(alg) for side in (w.side_a, w.side_b)})


def halfspace_topology(alg: FiniteMedianAlgebra) -> FiniteTopology:
    return FiniteTopology.from_subbase(alg.n, halfspaces(alg))


def gate_initial_topology(alg: FiniteMedianAlgebra, all_intervals: bool = False,
                          targets: Sequence[tuple[int, int]] | None = None) -> FiniteTopology:
    """Initial topology of the gate maps onto chain intervals (or all intervals,
    or the explicit ``targets``), each target carrying its own intrinsic topology."""
    n = alg.n
    t = alg.table
    if targets is None:
        if all_intervals:
            targets = [(u, v) for u in range(n) for v in range(u + 1, n)]
        else:
            targets = chain_pairs(alg)
    per_interval: dict[int, list[int]] = {}
    nb = [bits.full(n)] * n
    for u, v in targets:
        span = alg.interval_mask(u, v)
        lifted = per_interval.get(span)
        if lifted is None:
            members = bits.to_list(span)
            sub = tau_m(alg.induced(span))
            lifted = [0] * n
            for i, z in enumerate(members):
                lifted[z] = bits.from_indices(members[j] for j in bits.members(sub.min_nbhd[i]))
            per_interval[span] = lifted
        g = t[u, :, v]
        for x in range(n):
            target_nbhd = bits.to_bool(lifted[int(g[x])], n)
            nb[x] &= bits.from_bool(target_nbhd[g])
    return FiniteTopology(tuple(nb))


def local_convexity_check(alg: FiniteMedianAlgebra) -> bool:
    return all(convex_violation(alg, m) is None for m in tau_m(alg).min_nbhd)


# -- branch counting ------------------------------------------------------------------

def _min_cover(universe: int, sets: Sequence[int]) -> list[int]:
    """Fewest ``sets`` whose union contains ``universe`` (exact, iterative deepening)."""
    if not universe:
        return []
    useful = sorted({s & universe for s in sets if s & universe}, key=bits.count, reverse=True)
    covering = {e: [s for s in useful if s >> e & 1] for e in bits.members(universe)}
    if any(not v for v in covering.values()):
        raise MedianAlgebraError("universe cannot be covered")

    def search(left: int, depth: int, chosen: list[int]) -> list[int] | None:
        if not left:
            return list(chosen)
        if depth == 0:
            return None
        biggest = max(bits.count(s & left) for s in useful)
        if biggest * depth < bits.count(left):
            return None
        e = bits.lowest(left)
        for s in covering[e]:
            chosen.append(s)
            found = search(left & ~s, depth - 1, chosen)
            chosen.pop()
            if found is not None:
                return found
        return None

    for depth in itertools.count(1):
        found = search(universe, depth, [])
        if found is not None:
            return found
    raise AssertionError("unreachable")


def _greedy_cover(universe: int, sets: Sequence[int]) -> list[int]:
    chosen = []
    left = universe
    while left:
        best = max(sets, key=lambda s: bits.count(s & left))
        if not best & left:
            raise MedianAlgebraError("universe cannot be covered")
        chosen.append(best)
        left &= ~best
    return chosen


def _branches_at(alg: FiniteMedianAlgebra, x: int) -> list[int]:
    return [b for b in branch_subbase(alg) if b >> x & 1]


def degree(alg: FiniteMedianAlgebra, x: int) -> int:
    return sum(1 for a, b in adjacent_pairs(alg) if x in (a, b))


@dataclass(frozen=True)
class IsolationResult:
    point: int
    count: int
    branches: tuple[int, ...]
    greedy_upper: int
    degree_lower: int


def min_isolating_branches(alg: FiniteMedianAlgebra, x: int) -> IsolationResult:
    """Fewest subbasic branches whose intersection is ``{x}``.

    The degree of ``x`` is a lower bound: a convex branch holding ``x`` leaves
    out at most one neighbour, since ``x`` lies between any two neighbours.
    """
    if tau_m(alg).min_nbhd[x] != 1 << x:
        raise NotIsolated(f"{alg.name(x)} is not isolated in the intrinsic topology")
    outside = alg.carrier & ~(1 << x)
    complements = [alg.carrier & ~b for b in _branches_at(alg, x)]
    greedy = _greedy_cover(outside, complements) if outside else []
    lower = degree(alg, x)
    for c in complements:
        nbrs = [y for a, b in adjacent_pairs(alg) if x in (a, b) for y in (a, b) if y != x]
        if sum(1 for y in nbrs if c >> y & 1) > 1:
            raise MedianAlgebraError("a convex branch excludes two neighbours")
    exact = greedy if len(greedy) == lower else _min_cover(outside, complements)
    if not lower <= len(exact) <= len(greedy):
        raise MedianAlgebraError("branch count outside its bounds")
    chosen = tuple(alg.carrier & ~c for c in exact)
    return IsolationResult(x, len(exact), chosen, len(greedy), lower)


# -- wall-count metric ------------------------------------------------------------------

def wall_metric(alg: FiniteMedianAlgebra) -> np.ndarray:
    cached = alg._cache.get("wall_metric")
    if cached is None:
        ws = walls(alg)
        if not ws:
            cached = np.zeros((alg.n, alg.n), dtype=np.int64)
        else:
            side = np.array([bits.to_bool(w.side_a, alg.n) for w in ws], dtype=np.int64)
            cached = side.T @ (1 - side) + (1 - side).T @ side
        alg._cache["wall_metric"] = cached
    return cached


@dataclass(frozen=True)
class MetricReport:
    holds: bool
    clause: str = ""
    witness: tuple = ()
    mode: str = "exhaustive"
    samples: int = 0


def metric_checks(alg: FiniteMedianAlgebra) -> MetricReport:
    """Metric axioms, interval additivity, and agreement with graph distance."""
    d = wall_metric(alg)
    n = alg.n
    if (np.diag(d) != 0).any() or (d != d.T).any():
        return MetricReport(False, "symmetry/zero diagonal")
    off = d + np.eye(n, dtype=np.int64)
    if (off <= 0).any():
        return MetricReport(False, "separation")
    tri = d[:, :, None] + d[None, :, :] >= d[:, None, :]      # d(x,y)+d(y,z) >= d(x,z)
    if not tri.all():
        x, y, z = (int(v) for v in np.argwhere(~tri)[0])
        return MetricReport(False, "triangle", (x, y, z))
    rows = alg.interval_rows()
    # additive[x, z, y] : d(x,z) + d(z,y) == d(x,y)
    additive = d[:, :, None] + d[None, :, :] == d[:, None, :]
    for x in range(n):
        for y in range(n):
            want = bits.from_bool(additive[x, :, y])
            if want != rows[x][y]:
                return MetricReport(False, "interval additivity", (x, y))
    if (graph_distance_matrix(alg) != d).any():
        return MetricReport(False, "graph distance")
    return MetricReport(True)


def lipschitz_median_check(alg: FiniteMedianAlgebra, *, exhaustive_limit: int = LIPSCHITZ_EXHAUSTIVE_LIMIT,
                           samples: int = LIPSCHITZ_SAMPLES, seed: int = 0) -> MetricReport:
    """``d(m(x1,y1,z1), m(x2,y2,z2)) <= d(x1,x2) + d(y1,y2) + d(z1,z2)``."""
    d = wall_metric(alg)
    t = alg.table
    n = alg.n
    if n <= exhaustive_limit:
        ar = np.arange(n)
        for x1, x2 in itertools.product(range(n), repeat=2):
            y1, z1, y2, z2 = np.meshgrid(ar, ar, ar, ar, indexing="ij", sparse=True)
            lhs = d[t[x1, y1, z1], t[x2, y2, z2]]
            rhs = d[x1, x2] + d[y1, y2] + d[z1, z2]
            bad = lhs > rhs
            if bad.any():
                w = tuple(int(v) for v in np.argwhere(bad)[0])
                return MetricReport(False, "lipschitz", (x1, x2) + w)
        return MetricReport(True)
    rng = np.random.default_rng(seed)
    pts = rng.integers(0, n, size=(samples, 6))
    x1, y1, z1, x2, y2, z2 = pts.T
    lhs = d[t[x1, y1, z1], t[x2, y2, z2]]
    rhs = d[x1, x2] + d[y1, y2] + d[z1, z2]
    bad = np.flatnonzero(lhs > rhs)
    if len(bad):
        return MetricReport(False, "lipschitz", tuple(int(v) for v in pts[bad[0]]), "sampled", samples)
    return MetricReport(True, mode="sampled", samples=samples)


@dataclass(frozen=True)
class BranchingResult:
    point: int
    eps: int
    ball: int
    count: int
    branches: tuple[int, ...]


def geometric_branching_check(alg: FiniteMedianAlgebra, x: int, eps: int) -> BranchingResult:
    """Fewest subbasic branches whose intersection holds ``x`` and sits inside
    the open ball ``{y : d(x, y) < eps}``."""
    if eps <= 0:
        raise MedianAlgebraError("eps must be a positive integer")
    d = wall_metric(alg)
    ball = bits.from_bool(d[x] < eps)
    outside = alg.carrier & ~ball
    complements = [alg.carrier & ~b for b in _branches_at(alg, x)]
    chosen = _min_cover(outside, complements)
    return BranchingResult(x, eps, ball, len(chosen), tuple(alg.carrier & ~c for c in chosen))


def small_star_leaf_bound(alg: FiniteMedianAlgebra, centre: int, k: int) -> int:
    """Least number of neighbours of ``centre`` kept by any intersection of at
    most ``k`` subbasic branches through ``centre``."""
    nbrs = bits.from_indices(y for a, b in adjacent_pairs(alg) if centre in (a, b)
                             for y in (a, b) if y != centre)
    at = _branches_at(alg, centre)
    best = bits.count(nbrs)
    for size in range(1, min(k, len(at)) + 1):
        for combo in itertools.combinations(at, size):
            o = alg.carrier
            for b in combo:
                o &= b
            best = min(best, bits.count(o & nbrs))
    return best


def shadow_subbase(alg: FiniteMedianAlgebra) -> list[int]:
    """Branches over every pair of distinct points (the pretree shadow topology)."""
    return sorted({branch(alg, u, v) for u in range(alg.n) for v in range(alg.n) if u != v})
