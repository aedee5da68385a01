"""Finite median algebras: representations, constructors and the elementary calculus.

Two backends share one interface.  A *table* algebra stores the full ``n**3``
median table.  A *coordinate* algebra is a median-closed set of points in a
product of finite chains; its median is the coordinatewise middle value and a
table is only materialised on demand for ``n <= TABLE_LIMIT``.
"""
from __future__ import annotations

import hashlib
import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import bits

TABLE_LIMIT = 256
EXHAUSTIVE_AXIOM_LIMIT = 64
AXIOM_SAMPLES = 1_000_000
MAX_HYPERCUBE_DIM = 16
MAX_CARRIER = 4096
AUTOMORPHISM_LIMIT = 64


class MedianAlgebraError(ValueError):
    """Base class for invalid algebras and invalid queries."""


class AxiomViolation(MedianAlgebraError):
    def __init__(self, axiom: str, witness: tuple[int, ...]):
        self.axiom = axiom
        self.witness = witness
        super().__init__(f"axiom {axiom} violated at {witness}")


class SizeBoundError(MedianAlgebraError):
    pass


class NotMedianGraph(MedianAlgebraError):
    def __init__(self, message: str, witness: tuple[int, ...] = ()):
        self.witness = witness
        super().__init__(message)


class NotConvexError(MedianAlgebraError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteMedianAlgebra:
    """Carrier ``0..n-1`` with a total ternary median operation.

    ``factors`` and ``labels`` are set for the coordinate backend only; labels
    are then lexicographically sorted, which fixes the canonical element order.
    ``verification`` records how the axioms were established: ``exhaustive``,
    ``sampled`` or ``construction`` (subalgebras of products of chains).
    """

    n: int
    provenance: str
    factors: tuple[int, ...] | None = None
    labels: tuple[tuple[int, ...], ...] | None = None
    _table: np.ndarray | None = field(default=None, repr=False)
    verification: str = "exhaustive"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    # -- basic access -------------------------------------------------------

    @property
    def is_coords(self) -> bool:
        return self.labels is not None

    @property
    def carrier(self) -> int:
        return bits.full(self.n)

    @property
    def has_table(self) -> bool:
        return self._table is not None or self.n <= TABLE_LIMIT

    @property
    def table(self) -> np.ndarray:
        if self._table is not None:
            return self._table
        t = self._cache.get("table")
        if t is None:
            if self.n > TABLE_LIMIT:
                raise SizeBoundError(
                    f"median table for n={self.n} exceeds limit {TABLE_LIMIT}"
                )
            t = _coords_table(self)
            self._cache["table"] = t
        return t

    def med(self, a: int, b: int, c: int) -> int:
        if self.has_table:
            return int(self.table[a, b, c])
        la, lb, lc = self.labels[a], self.labels[b], self.labels[c]
        m = tuple(sorted(t)[1] for t in zip(la, lb, lc))
        return self.index_of(m)

    def index_of(self, label: Sequence[int]) -> int:
        idx = self._cache.get("index")
        if idx is None:
            idx = {lab: i for i, lab in enumerate(self.labels or ())}
            self._cache["index"] = idx
        try:
            return idx[tuple(label)]
        except KeyError:
            raise MedianAlgebraError(f"no element with label {tuple(label)}") from None

    def name(self, i: int) -> str:
        if self.labels is not None:
            return "(" + ",".join(str(c) for c in self.labels[i]) + ")"
        return str(i)

    def names(self, mask: int) -> list[str]:
        return [self.name(i) for i in bits.members(mask)]

    def label_array(self) -> np.ndarray:
        arr = self._cache.get("label_array")
        if arr is None:
            arr = np.array(self.labels, dtype=np.int64).reshape(self.n, -1)
            self._cache["label_array"] = arr
        return arr

    # -- intervals ----------------------------------------------------------

    def interval_rows(self) -> list[list[int]]:
        """``rows[x][y]`` is the member mask of ``[x, y]``."""
        rows = self._cache.get("intervals")
        if rows is None:
            t = self.table
            ar = np.arange(self.n)
            rows = [bits.rows_from_bool(t[x] == ar[None, :]) for x in range(self.n)]
            self._cache["intervals"] = rows
        return rows

    def interval_mask(self, x: int, y: int) -> int:
        if self.has_table:
            return self.interval_rows()[x][y]
        lab = self.label_array()
        lo = np.minimum(lab[x], lab[y])
        hi = np.maximum(lab[x], lab[y])
        inside = np.all((lab >= lo) & (lab <= hi), axis=1)
        return bits.from_bool(inside)

    def induced(self, mask: int, provenance: str | None = None) -> "FiniteMedianAlgebra":
        """The subalgebra on ``mask`` as a standalone algebra (elements renumbered)."""
        idx = bits.to_list(mask)
        if not idx:
            raise MedianAlgebraError("empty subset")
        prov = provenance or self.provenance
        if self.is_coords:
            return from_points(self.factors, [self.labels[i] for i in idx], prov,
                               verify=True)
        sub = self.table[np.ix_(idx, idx, idx)]
        inverse = np.full(self.n, -1, dtype=np.int64)
        inverse[idx] = np.arange(len(idx))
        mapped = inverse[sub]
        if (mapped < 0).any():
            a, b, c = (int(v) for v in np.argwhere(mapped < 0)[0])
            raise MedianAlgebraError(
                f"subset not median-closed at ({idx[a]},{idx[b]},{idx[c]})"
            )
        return FiniteMedianAlgebra(len(idx), prov, _table=mapped.astype(self.table.dtype),
                                   verification=self.verification)

    def __repr__(self) -> str:
        return f"FiniteMedianAlgebra(n={self.n}, provenance={self.provenance!r})"


@dataclass(frozen=True)
class Interval:
    x: int
    y: int
    members: int

    def __contains__(self, z: int) -> bool:
        return bool(self.members >> z & 1)

    def __len__(self) -> int:
        return bits.count(self.members)


@dataclass(frozen=True)
class Automorphism:
    perm: tuple[int, ...]

    def __call__(self, i: int) -> int:
        return self.perm[i]

    def image(self, mask: int) -> int:
        return bits.from_indices(self.perm[i] for i in bits.members(mask))

    def inverse(self) -> "Automorphism":
        inv = [0] * len(self.perm)
        for i, j in enumerate(self.perm):
            inv[j] = i
        return Automorphism(tuple(inv))

    def compose(self, other: "Automorphism") -> "Automorphism":
        """``self`` after ``other``."""
        return Automorphism(tuple(self.perm[j] for j in other.perm))


def _dtype_for(n: int):
    return np.uint8 if n <= 256 else np.uint16


# -- coordinate backend --------------------------------------------------------

def _codes(factors: Sequence[int], labels: np.ndarray) -> np.ndarray:
    strides = np.ones(len(factors), dtype=np.int64)
    for i in range(len(factors) - 2, -1, -1):
        strides[i] = strides[i + 1] * factors[i + 1]
    return labels @ strides if len(factors) else np.zeros(len(labels), dtype=np.int64)


def _coords_table(alg: FiniteMedianAlgebra) -> np.ndarray:
    lab = alg.label_array()
    n = alg.n
    codes = _codes(alg.factors, lab)
    out = np.empty((n, n, n), dtype=_dtype_for(n))
    for a in range(n):
        la = lab[a]
        lo = np.minimum(la[None, :], lab)           # (n, d) over b
        hi = np.maximum(la[None, :], lab)
        m = np.maximum(lo[:, None, :], np.minimum(hi[:, None, :], lab[None, :, :]))
        mc = _codes(alg.factors, m.reshape(-1, lab.shape[1])) if lab.shape[1] else \
            np.zeros(n * n, dtype=np.int64)
        pos = np.searchsorted(codes, mc)
        pos = np.clip(pos, 0, n - 1)
        bad = codes[pos] != mc
        if bad.any():
            k = int(np.argmax(bad))
            b, c = divmod(k, n)
            raise MedianAlgebraError(
                f"point set not median-closed: med of {alg.name(a)}, {alg.name(b)}, "
                f"{alg.name(c)} missing"
            )
        out[a] = pos.reshape(n, n)
    return out


def from_points(factors: Sequence[int], points: Iterable[Sequence[int]],
                provenance: str = "closure", verify: bool = True) -> FiniteMedianAlgebra:
    """Coordinate algebra on ``points`` inside the product of chains ``factors``.

    With ``verify`` the set is checked to be median-closed (required whenever
    the table can be materialised).
    """
    factors = tuple(int(k) for k in factors)
    if any(k < 1 for k in factors):
        raise MedianAlgebraError(f"chain lengths must be positive: {factors}")
    pts = sorted({tuple(int(c) for c in p) for p in points})
    if not pts:
        raise MedianAlgebraError("empty point set")
    if len(pts) > MAX_CARRIER:
        raise SizeBoundError(f"{len(pts)} points exceed carrier bound {MAX_CARRIER}")
    for p in pts:
        if len(p) != len(factors) or any(not 0 <= c < k for c, k in zip(p, factors)):
            raise MedianAlgebraError(f"point {p} outside product of chains {factors}")
    alg = FiniteMedianAlgebra(len(pts), provenance, factors, tuple(pts),
                              verification="construction")
    if verify and alg.n <= TABLE_LIMIT:
        alg.table  # raises if not closed
    return alg


# -- constructors ----------------------------------------------------------------

def make_hypercube(k: int) -> FiniteMedianAlgebra:
    if not 0 <= k <= MAX_HYPERCUBE_DIM:
        raise MedianAlgebraError(f"dimension-out-of-range: {k} not in 0..{MAX_HYPERCUBE_DIM}")
    pts = itertools.product((0, 1), repeat=k)
    return from_points((2,) * k, pts, "hypercube", verify=False)


def make_chain(k: int) -> FiniteMedianAlgebra:
    if k < 1:
        raise MedianAlgebraError(f"chain length must be >= 1, got {k}")
    if k > MAX_CARRIER:
        raise SizeBoundError(f"chain length {k} exceeds {MAX_CARRIER}")
    return from_points((k,), ((i,) for i in range(k)), "chain", verify=False)


def make_grid(*lengths: int) -> FiniteMedianAlgebra:
    """Full product of chains ``C_{l1} x C_{l2} x ...``."""
    total = int(np.prod(lengths)) if lengths else 1
    if total > MAX_CARRIER:
        raise SizeBoundError(f"grid of {total} points exceeds {MAX_CARRIER}")
    pts = itertools.product(*(range(k) for k in lengths))
    return from_points(lengths, pts, "product", verify=False)


def make_product(a: FiniteMedianAlgebra, b: FiniteMedianAlgebra) -> FiniteMedianAlgebra:
    """Coordinatewise product; element ``(i, j)`` gets index ``i * b.n + j``."""
    n = a.n * b.n
    if n > MAX_CARRIER:
        raise SizeBoundError(f"product of size {n} exceeds {MAX_CARRIER}")
    if a.is_coords and b.is_coords:
        pts = [la + lb for la in a.labels for lb in b.labels]
        return from_points(a.factors + b.factors, pts, "product", verify=False)
    if n > TABLE_LIMIT:
        raise SizeBoundError(f"table product of size {n} exceeds {TABLE_LIMIT}")
    ta = a.table.astype(np.int64)
    tb = b.table.astype(np.int64)
    t = ta[:, None, :, None, :, None] * b.n + tb[None, :, None, :, None, :]
    t = t.reshape(n, n, n).astype(_dtype_for(n))
    return FiniteMedianAlgebra(n, "product", _table=t, verification="construction")


def make_starlet(n_leaves: int) -> FiniteMedianAlgebra:
    """Star ``K_{1,n}``: element 0 is the centre, ``1..n`` the leaves."""
    if n_leaves < 1:
        raise MedianAlgebraError("starlet needs at least one leaf")
    return median_graph_from_edges(n_leaves + 1, [(0, i) for i in range(1, n_leaves + 1)],
                                   provenance="graph")


def verify_axioms(n: int, table: np.ndarray, *, samples: int = AXIOM_SAMPLES,
                  seed: int = 0) -> str:
    """Check M1-M3; return ``"exhaustive"`` or ``"sampled"`` (M3 only is sampled
    above the exhaustive limit).

    Raises :class:`AxiomViolation` with the first witnessing triple/quadruple.
    """
    t = np.asarray(table)
    ar = np.arange(n)
    # M2 first: always exhaustive, cheap.
    m2 = t[:, ar, ar] != ar[None, :]
    if m2.any():
        a, b = (int(v) for v in np.argwhere(m2)[0])
        raise AxiomViolation("M2", (a, b, b))
    # M1 is n^3 work, so it stays exhaustive at every size.
    for perm in itertools.permutations(range(3)):
        bad = t != t.transpose(perm)
        if bad.any():
            raise AxiomViolation("M1", tuple(int(v) for v in np.argwhere(bad)[0]))
    if n <= EXHAUSTIVE_AXIOM_LIMIT:
        ti = t.astype(np.int64)
        for d in range(n):
            x = ti[:, :, d]                       # x[a, b] = abd
            left = ti[x[:, :, None], ar[None, None, :], d]     # (abd)cd  [a,b,c]
            right = ti[x[:, None, :], ar[None, :, None], d]    # (acd)bd  [a,b,c]
            bad = left != right
            if bad.any():
                a, b, c = (int(v) for v in np.argwhere(bad)[0])
                raise AxiomViolation("M3", (a, b, c, d))
        return "exhaustive"
    rng = np.random.default_rng(seed)
    q = rng.integers(0, n, size=(samples, 4))
    a, b, c, d = q.T
    ti = t.astype(np.int64)
    left = ti[ti[a, b, d], c, d]
    right = ti[ti[a, c, d], b, d]
    bad = left != right
    if bad.any():
        k = int(np.argmax(bad))
        raise AxiomViolation("M3", (int(a[k]), int(b[k]), int(c[k]), int(d[k])))
    return "sampled"


def from_median_table(n: int, table, provenance: str = "table") -> FiniteMedianAlgebra:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise MedianAlgebraError(f"malformed table: n must be a positive integer, got {n!r}")
    if n > TABLE_LIMIT:
        raise SizeBoundError(f"table algebra of size {n} exceeds {TABLE_LIMIT}")
    arr = np.asarray(table)
    if arr.size != n ** 3:
        raise MedianAlgebraError(f"malformed table: expected {n ** 3} entries, got {arr.size}")
    if not np.issubdtype(arr.dtype, np.integer):
        raise MedianAlgebraError("malformed table: entries must be integers")
    arr = arr.reshape(n, n, n)
    if arr.min() < 0 or arr.max() >= n:
        bad = np.argwhere((arr < 0) | (arr >= n))[0]
        raise MedianAlgebraError(f"malformed table: entry at {tuple(int(v) for v in bad)} "
                                 f"out of range")
    arr = arr.astype(_dtype_for(n))
    verdict = verify_axioms(n, arr)
    return FiniteMedianAlgebra(int(n), provenance, _table=arr, verification=verdict)


def graph_distances(n: int, adjacency: list[list[int]]) -> np.ndarray:
    dist = np.full((n, n), -1, dtype=np.int64)
    for s in range(n):
        dist[s, s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in adjacency[u]:
                if dist[s, w] < 0:
                    dist[s, w] = dist[s, u] + 1
                    queue.append(w)
    return dist


def median_graph_from_edges(n: int, edges: Iterable[Sequence[int]],
                            provenance: str = "graph") -> FiniteMedianAlgebra:
    """Median algebra of a median graph on vertices ``0..n-1``."""
    if n < 1:
        raise MedianAlgebraError("graph needs at least one vertex")
    if n > TABLE_LIMIT:
        raise SizeBoundError(f"graph of {n} vertices exceeds {TABLE_LIMIT}")
    adjacency: list[set[int]] = [set() for _ in range(n)]
    for e in edges:
        if len(e) != 2:
            raise MedianAlgebraError(f"malformed edge {list(e)}")
        a, b = int(e[0]), int(e[1])
        if not (0 <= a < n and 0 <= b < n):
            raise MedianAlgebraError(f"edge {[a, b]} references a vertex outside 0..{n - 1}")
        if a == b:
            raise MedianAlgebraError(f"edge {[a, b]} is a self-loop")
        adjacency[a].add(b)
        adjacency[b].add(a)
    dist = graph_distances(n, [sorted(s) for s in adjacency])
    if (dist < 0).any():
        a, b = (int(v) for v in np.argwhere(dist < 0)[0])
        raise NotMedianGraph(f"disconnected input: no path from {a} to {b}", (a, b))
    # between[u, v, z]: z on a geodesic from u to v
    between = (dist[:, None, :] + dist.T[None, :, :]) == dist[:, :, None]
    table = np.empty((n, n, n), dtype=_dtype_for(n))
    for u in range(n):
        common = between[u][:, None, :] & between[u][None, :, :] & between
        counts = common.sum(axis=2)
        if (counts != 1).any():
            v, w = (int(t) for t in np.argwhere(counts != 1)[0])
            kind = "empty" if counts[v, w] == 0 else "multi-point"
            raise NotMedianGraph(
                f"not-median-graph: triple ({u},{v},{w}) has {kind} interval intersection",
                (u, v, w),
            )
        table[u] = common.argmax(axis=2)
    return FiniteMedianAlgebra(n, provenance, _table=table, verification="exhaustive")


def median_closure(ambient: FiniteMedianAlgebra, seeds: Sequence[int],
                   max_size: int = MAX_CARRIER) -> FiniteMedianAlgebra:
    """Smallest median-closed subset containing ``seeds``, as a standalone algebra."""
    return ambient.induced(closure_mask(ambient, seeds, max_size), provenance="closure")


def closure_mask(ambient: FiniteMedianAlgebra, seeds: Sequence[int],
                 max_size: int = MAX_CARRIER) -> int:
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise MedianAlgebraError("seeds must be nonempty")
    for s in seeds:
        if not 0 <= s < ambient.n:
            raise MedianAlgebraError(f"seed {s} not in algebra of size {ambient.n}")
    current = sorted(set(seeds))
    frontier = list(current)
    while frontier:
        if ambient.has_table:
            t = ambient.table
            cur = np.array(current)
            fr = np.array(frontier)
            produced = np.unique(t[np.ix_(fr, cur, cur)])
        else:
            produced = np.unique([ambient.med(a, b, c) for a in frontier
                                  for b in current for c in current])
        new = sorted(set(int(p) for p in produced) - set(current))
        current = sorted(set(current) | set(new))
        frontier = new
        if len(current) > max_size:
            raise SizeBoundError(f"closure exceeds size bound {max_size}")
    return bits.from_indices(current)


# -- elementary calculus ------------------------------------------------------------

def interval(alg: FiniteMedianAlgebra, x: int, y: int) -> Interval:
    return Interval(x, y, alg.interval_mask(x, y))


def gate(alg: FiniteMedianAlgebra, u: int, v: int, z: int) -> int:
    """Canonical retraction of ``z`` onto ``[u, v]``."""
    return alg.med(u, z, v)


def between(alg: FiniteMedianAlgebra, x: int, z: int, y: int) -> bool:
    return alg.med(x, y, z) == z


def leq(alg: FiniteMedianAlgebra, base: int, a: int, b: int) -> bool:
    """``a <=_base b``."""
    return alg.med(base, a, b) == a


def is_convex(alg: FiniteMedianAlgebra, mask: int) -> bool:
    return convex_violation(alg, mask) is None


def convex_violation(alg: FiniteMedianAlgebra, mask: int) -> tuple[int, int] | None:
    """A pair of members whose interval leaves ``mask``, or ``None``."""
    elems = bits.to_list(mask)
    for i, x in enumerate(elems):
        for y in elems[i + 1:]:
            if alg.interval_mask(x, y) & ~mask:
                return x, y
    return None


def convex_hull(alg: FiniteMedianAlgebra, mask: int) -> int:
    hull = mask
    while True:
        grown = hull
        elems = bits.to_list(hull)
        for i, x in enumerate(elems):
            for y in elems[i + 1:]:
                grown |= alg.interval_mask(x, y)
        if grown == hull:
            return hull
        hull = grown


def is_chain_subset(alg: FiniteMedianAlgebra, mask: int) -> bool:
    """Whether the members form a chain: some member ``e`` makes ``<=_e`` total."""
    elems = bits.to_list(mask)
    if len(elems) <= 2:
        return True
    idx = np.array(elems)
    t = alg.table
    for e in elems:
        sub = t[e][np.ix_(idx, idx)]
        if ((sub == idx[:, None]) | (sub == idx[None, :])).all():
            return True
    return False


def is_chain_interval(alg: FiniteMedianAlgebra, x: int, y: int) -> bool:
    cache = alg._cache.setdefault("chain_pairs", {})
    key = (min(x, y), max(x, y))
    hit = cache.get(key)
    if hit is None:
        members = alg.interval_mask(x, y)
        if bits.count(members) <= 2:
            hit = True
        else:
            idx = np.array(bits.to_list(members))
            sub = alg.table[x][np.ix_(idx, idx)]
            hit = bool(((sub == idx[:, None]) | (sub == idx[None, :])).all())
        cache[key] = hit
    return hit


def chain_order(alg: FiniteMedianAlgebra, u: int, v: int) -> list[int]:
    """Members of the chain interval ``[u, v]`` listed from ``u`` to ``v``."""
    members = bits.to_list(alg.interval_mask(u, v))
    # position along the chain = size of [u, z]
    return sorted(members, key=lambda z: bits.count(alg.interval_mask(u, z)))


def adjacent_pairs(alg: FiniteMedianAlgebra) -> list[tuple[int, int]]:
    cached = alg._cache.get("adjacent")
    if cached is None:
        rows = alg.interval_rows()
        cached = [(a, b) for a in range(alg.n) for b in range(a + 1, alg.n)
                  if bits.count(rows[a][b]) == 2]
        alg._cache["adjacent"] = cached
    return list(cached)


def chain_pairs(alg: FiniteMedianAlgebra) -> list[tuple[int, int]]:
    """Unordered pairs ``u < v`` whose interval is a nontrivial chain."""
    cached = alg._cache.get("chain_pair_list")
    if cached is None:
        cached = [(u, v) for u in range(alg.n) for v in range(u + 1, alg.n)
                  if is_chain_interval(alg, u, v)]
        alg._cache["chain_pair_list"] = cached
    return list(cached)


def median_graph(alg: FiniteMedianAlgebra):
    import networkx as nx

    g = nx.Graph()
    g.add_nodes_from(range(alg.n))
    g.add_edges_from(adjacent_pairs(alg))
    return g


def is_homomorphism(src: FiniteMedianAlgebra, dst: FiniteMedianAlgebra,
                    f: Sequence[int]) -> bool:
    return bool(homomorphism_mask(src, dst, [f])[0])


def homomorphism_mask(src: FiniteMedianAlgebra, dst: FiniteMedianAlgebra,
                      maps: Sequence[Sequence[int]]) -> np.ndarray:
    """For each map ``f`` (as an index sequence), whether ``f(abc) = f(a)f(b)f(c)``
    on every triple of ``src``."""
    ts = src.table.astype(np.intp)
    td = dst.table
    out = np.zeros(len(maps), dtype=bool)
    for k, f in enumerate(maps):
        fa = np.asarray(f, dtype=np.intp)
        out[k] = (fa[ts] == td[fa][:, fa][:, :, fa]).all()
    return out


def _profile(alg: FiniteMedianAlgebra) -> list[tuple[int, ...]]:
    rows = alg.interval_rows()
    return [tuple(sorted(bits.count(m) for m in rows[x])) for x in range(alg.n)]


def graph_distance_matrix(alg: FiniteMedianAlgebra) -> np.ndarray:
    """Shortest-path distances in the median graph (adjacent pairs as edges)."""
    d = alg._cache.get("graph_distance")
    if d is None:
        adj: list[list[int]] = [[] for _ in range(alg.n)]
        for a, b in adjacent_pairs(alg):
            adj[a].append(b)
            adj[b].append(a)
        d = graph_distances(alg.n, adj)
        alg._cache["graph_distance"] = d
    return d


def _isometries(a: FiniteMedianAlgebra, b: FiniteMedianAlgebra):
    """Backtracking over median-graph isometries ``a -> b``.

    Vertices of ``a`` are placed in BFS order; a candidate image must carry
    the same interval-size profile and reproduce the distances to every vertex
    already placed.
    """
    n = a.n
    da, db = graph_distance_matrix(a), graph_distance_matrix(b)
    pa, pb = _profile(a), _profile(b)
    if sorted(pa) != sorted(pb):
        return
    order = list(np.argsort(da[0], kind="stable"))
    parent = {}
    for v in order[1:]:
        parent[v] = next(w for w in order if da[0, w] == da[0, v] - 1 and da[v, w] == 1)
    nbrs_b = [np.flatnonzero(db[x] == 1) for x in range(n)]
    order_arr = np.array(order)
    pa_arr = np.array([hash(p) for p in pa])
    pb_arr = np.array([hash(p) for p in pb])
    image = np.full(n, -1, dtype=np.int64)
    used = np.zeros(n, dtype=bool)

    def candidates(v: int, depth: int) -> list[int]:
        if depth == 0:
            return [x for x in range(n) if pb[x] == pa[v]]
        pool = nbrs_b[image[parent[v]]]
        pool = pool[~used[pool] & (pb_arr[pool] == pa_arr[v])]
        if len(pool) == 0:
            return []
        placed = order_arr[:depth]
        ok = (db[pool][:, image[placed]] == da[v, placed][None, :]).all(axis=1)
        return [int(x) for x in pool[ok]]

    def extend(depth: int):
        if depth == n:
            yield tuple(int(x) for x in image)
            return
        v = int(order[depth])
        for x in candidates(v, depth):
            image[v] = x
            used[x] = True
            yield from extend(depth + 1)
            used[x] = False
            image[v] = -1

    yield from extend(0)


def find_isomorphism(a: FiniteMedianAlgebra, b: FiniteMedianAlgebra) -> tuple[int, ...] | None:
    """A median isomorphism ``a -> b`` or ``None``.

    Candidates come from median-graph isometries (a median bijection maps
    adjacent pairs to adjacent pairs); each candidate is re-verified on all
    triples.
    """
    if a.n != b.n:
        return None
    if a.n == 1:
        return (0,)
    if len(adjacent_pairs(a)) != len(adjacent_pairs(b)):
        return None
    for f in _isometries(a, b):
        if is_homomorphism(a, b, f):
            return f
    return None


def is_isomorphic(a: FiniteMedianAlgebra, b: FiniteMedianAlgebra) -> bool:
    return find_isomorphism(a, b) is not None


_AUTOMORPHISM_MEMO: dict[bytes, list[Automorphism]] = {}


def table_digest(alg: FiniteMedianAlgebra) -> bytes:
    return hashlib.sha1(np.ascontiguousarray(alg.table).tobytes()).digest()


def automorphisms(alg: FiniteMedianAlgebra) -> list[Automorphism]:
    """Every median-preserving permutation, sorted lexicographically."""
    if alg.n > AUTOMORPHISM_LIMIT:
        raise SizeBoundError(f"automorphism search limited to n <= {AUTOMORPHISM_LIMIT}")
    key = table_digest(alg)
    cached = _AUTOMORPHISM_MEMO.get(key)
    if cached is None:
        if alg.n == 1:
            cached = [Automorphism((0,))]
        else:
            maps = sorted(_isometries(alg, alg))
            ok = homomorphism_mask(alg, alg, maps)
            cached = [Automorphism(f) for f, good in zip(maps, ok) if good]
        _AUTOMORPHISM_MEMO[key] = cached
    return list(cached)


def is_conservative(alg: FiniteMedianAlgebra) -> bool:
    t = alg.table
    ar = np.arange(alg.n)
    return bool(((t == ar[:, None, None]) | (t == ar[None, :, None])
                 | (t == ar[None, None, :])).all())


def find_square(alg: FiniteMedianAlgebra) -> tuple[int, int, int, int] | None:
    """Four points ``(a, b, c, d)`` forming a 2-cube with diagonal ``a``-``d``."""
    rows = alg.interval_rows()
    for a in range(alg.n):
        for d in range(a + 1, alg.n):
            inner = bits.to_list(rows[a][d] & ~(1 << a) & ~(1 << d))
            for i, b in enumerate(inner):
                for c in inner[i + 1:]:
                    if alg.med(b, c, a) == a and alg.med(b, c, d) == d:
                        return a, b, c, d
    return None
