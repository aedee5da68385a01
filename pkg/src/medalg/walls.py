"""Walls, crossing, rank and the chain-product embedding of intervals."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import bits
from .algebra import (
    FiniteMedianAlgebra,
    MedianAlgebraError,
    SizeBoundError,
    adjacent_pairs,
    convex_violation,
    is_convex,
)

MAX_CLIQUE_WALLS = 64
BRUTE_FORCE_WALL_LIMIT = 12
CUBE_ORACLE_LIMIT = 16


class ComparabilityViolation(MedianAlgebraError):
    pass


@dataclass(frozen=True)
class Wall:
    """Partition of the carrier into two nonempty convex halfspaces.

    ``side_a`` is the side holding element 0, so equal walls compare equal.
    """

    side_a: int
    side_b: int

    @classmethod
    def from_side(cls, side: int, carrier: int) -> "Wall":
        other = carrier & ~side
        if side & 1:
            return cls(side, other)
        return cls(other, side)

    def separates(self, x: int, y: int) -> bool:
        return bool((self.side_a >> x & 1) != (self.side_a >> y & 1))

    def side_of(self, x: int) -> int:
        return self.side_a if self.side_a >> x & 1 else self.side_b


@dataclass(frozen=True)
class OrientedWall:
    wall: Wall
    minus: int

    @property
    def plus(self) -> int:
        return self.wall.side_a if self.minus == self.wall.side_b else self.wall.side_b

    def __le__(self, other: "OrientedWall") -> bool:
        return bits.is_subset(self.minus, other.minus)


@dataclass(frozen=True)
class WallFingerprint:
    basepoint: int
    separating: tuple[frozenset[int], ...]

    def __getitem__(self, x: int) -> frozenset[int]:
        return self.separating[x]

    def is_injective(self) -> bool:
        return len(set(self.separating)) == len(self.separating)


def walls(alg: FiniteMedianAlgebra) -> list[Wall]:
    """All walls, one per class of adjacent pairs, in first-discovery order."""
    cached = alg._cache.get("walls")
    if cached is not None:
        return list(cached)
    carrier = alg.carrier
    seen: dict[int, Wall] = {}
    t = alg.table
    for a, b in adjacent_pairs(alg):
        g = t[a, :, b]
        near_a = bits.from_bool(g == a)
        near_b = bits.from_bool(g == b)
        if near_a | near_b != carrier or near_a & near_b:
            raise MedianAlgebraError(f"adjacent pair ({a},{b}) does not split the carrier")
        wall = Wall.from_side(near_a, carrier)
        if wall.side_a in seen:
            continue
        for side in (near_a, near_b):
            bad = convex_violation(alg, side)
            if bad is not None:
                raise MedianAlgebraError(
                    f"internal consistency: side of adjacent pair ({a},{b}) not convex at {bad}"
                )
        seen[wall.side_a] = wall
    result = list(seen.values())
    alg._cache["walls"] = result
    return list(result)


def brute_force_walls(alg: FiniteMedianAlgebra) -> list[Wall]:
    """Every convex/co-convex bipartition, by subset enumeration (oracle)."""
    if alg.n > BRUTE_FORCE_WALL_LIMIT:
        raise SizeBoundError(f"subset enumeration limited to n <= {BRUTE_FORCE_WALL_LIMIT}")
    carrier = alg.carrier
    found = []
    # side_a always holds element 0
    for rest in range(1 << (alg.n - 1)):
        side = 1 | (rest << 1)
        if side == carrier:
            continue
        if is_convex(alg, side) and is_convex(alg, carrier & ~side):
            found.append(Wall(side, carrier & ~side))
    return found


def separating_walls(alg: FiniteMedianAlgebra, x: int, y: int) -> list[Wall]:
    return [w for w in walls(alg) if w.separates(x, y)]


def crossing(w1: Wall, w2: Wall) -> bool:
    return all(p & q for p in (w1.side_a, w1.side_b) for q in (w2.side_a, w2.side_b))


def crossing_matrix(ws: list[Wall]) -> list[int]:
    """``adj[i]`` is the bitset of walls crossing wall ``i``."""
    adj = [0] * len(ws)
    for i, j in itertools.combinations(range(len(ws)), 2):
        if crossing(ws[i], ws[j]):
            adj[i] |= 1 << j
            adj[j] |= 1 << i
    return adj


def max_clique(adj: list[int]) -> list[int]:
    """Exact maximum clique on a bitset adjacency (greedy-colouring bound)."""
    best: list[int] = []

    def colour_bound(cand: int) -> list[tuple[int, int]]:
        # vertices with the colour number of a greedy sequential colouring
        order = []
        colour = 0
        uncoloured = cand
        while uncoloured:
            colour += 1
            avail = uncoloured
            while avail:
                v = bits.lowest(avail)
                avail &= ~(1 << v) & ~adj[v]
                uncoloured &= ~(1 << v)
                order.append((v, colour))
        return order

    def expand(clique: list[int], cand: int) -> None:
        nonlocal best
        for v, c in reversed(colour_bound(cand)):
            if len(clique) + c <= len(best):
                return
            clique.append(v)
            nxt = cand & adj[v]
            if nxt:
                expand(clique, nxt)
            elif len(clique) > len(best):
                best = list(clique)
            clique.pop()
            cand &= ~(1 << v)

    if adj:
        expand([], bits.full(len(adj)))
    return sorted(best)


def rank(alg: FiniteMedianAlgebra) -> int:
    """Largest pairwise-crossing wall family; 0 for carriers of size <= 1."""
    cached = alg._cache.get("rank")
    if cached is not None:
        return cached
    ws = walls(alg)
    if len(ws) > MAX_CLIQUE_WALLS:
        raise SizeBoundError(f"{len(ws)} walls exceed exact clique bound {MAX_CLIQUE_WALLS}")
    value = len(max_clique(crossing_matrix(ws))) if ws else 0
    alg._cache["rank"] = value
    return value


def cube_embedding_rank(alg: FiniteMedianAlgebra) -> int:
    """Largest ``k`` with ``{0,1}^k`` median-embedded, by direct search (oracle).

    A candidate embedding is fixed by the images ``p`` of 0...0, ``q`` of 1...1
    and ``a_i`` of the unit vectors; every other vertex is the join
    ``m(f(S), a_i, q)``.  The assembled map is checked for injectivity and
    median preservation on all triples of the cube.
    """
    if alg.n > CUBE_ORACLE_LIMIT:
        raise SizeBoundError(f"cube embedding search limited to n <= {CUBE_ORACLE_LIMIT}")
    if alg.n <= 1:
        return 0
    t = alg.table
    best = 0
    k = 1
    while (1 << k) <= alg.n and _embeds_cube(alg, t, k):
        best = k
        k += 1
    return best


def _cube_table(k: int) -> np.ndarray:
    size = 1 << k
    v = np.arange(size)
    a, b, c = np.meshgrid(v, v, v, indexing="ij")
    return (a & b) | (b & c) | (a & c)


def _embeds_cube(alg: FiniteMedianAlgebra, t: np.ndarray, k: int) -> bool:
    size = 1 << k
    cube = _cube_table(k)
    for p in range(alg.n):
        for q in range(alg.n):
            if p == q:
                continue
            inside = [z for z in range(alg.n) if t[p, q, z] == z and z not in (p, q)]
            if len(inside) + 2 < size:
                continue
            if k == 1:
                return True
            for units in itertools.combinations(inside, k):
                image = np.empty(size, dtype=np.int64)
                image[0] = p
                for s in range(1, size):
                    top = s.bit_length() - 1
                    rest = s & ~(1 << top)
                    image[s] = units[top] if rest == 0 else t[image[rest], units[top], q]
                if len(set(image.tolist())) != size:
                    continue
                if (image[cube] == t[np.ix_(image, image, image)]).all():
                    return True
    return False


def wall_fingerprint(alg: FiniteMedianAlgebra, x0: int) -> WallFingerprint:
    ws = walls(alg)
    sep = tuple(frozenset(i for i, w in enumerate(ws) if w.separates(x0, x))
                for x in range(alg.n))
    return WallFingerprint(x0, sep)


def oriented_separators(alg: FiniteMedianAlgebra, x: int, y: int) -> list[OrientedWall]:
    """Walls separating ``x`` from ``y``, minus side holding ``x``."""
    return [OrientedWall(w, w.side_of(x)) for w in separating_walls(alg, x, y)]


def _max_bipartite_matching(succ: list[list[int]], m: int) -> list[int]:
    """Augmenting-path matching; ``match_right[j]`` is the left partner of ``j``."""
    match_right = [-1] * m

    def augment(i: int, seen: list[bool]) -> bool:
        for j in succ[i]:
            if not seen[j]:
                seen[j] = True
                if match_right[j] < 0 or augment(match_right[j], seen):
                    match_right[j] = i
                    return True
        return False

    for i in range(m):
        augment(i, [False] * m)
    return match_right


def dilworth_colouring(alg: FiniteMedianAlgebra, x: int, y: int) -> list[list[OrientedWall]]:
    """Minimum partition of the walls separating ``x`` and ``y`` into chains.

    Each class is listed in increasing orientation order (minus sides growing).
    """
    if x == y:
        raise MedianAlgebraError("dilworth_colouring needs x != y")
    ows = oriented_separators(alg, x, y)
    m = len(ows)
    succ: list[list[int]] = [[] for _ in range(m)]
    for i, j in itertools.permutations(range(m), 2):
        wi, wj = ows[i], ows[j]
        if crossing(wi.wall, wj.wall):
            continue
        if wi <= wj:
            succ[i].append(j)
        elif not wj <= wi:
            raise ComparabilityViolation(
                f"separating walls {i} and {j} neither cross nor nest"
            )
    match_right = _max_bipartite_matching(succ, m)
    nxt = [-1] * m
    has_pred = [False] * m
    for j, i in enumerate(match_right):
        if i >= 0:
            nxt[i] = j
            has_pred[j] = True
    classes = []
    for start in range(m):
        if has_pred[start]:
            continue
        chain = []
        v = start
        while v >= 0:
            chain.append(ows[v])
            v = nxt[v]
        classes.append(chain)
    return classes


@dataclass(frozen=True)
class ChainEmbedding:
    x: int
    y: int
    classes: tuple[tuple[OrientedWall, ...], ...]
    coords: dict
    chain_lengths: tuple[int, ...]
    injective: bool
    median_preserving: bool


def interval_chain_embedding(alg: FiniteMedianAlgebra, x: int, y: int) -> ChainEmbedding:
    """Map ``[x, y]`` into a product of chains, one coordinate per colour class.

    Coordinate ``i`` of ``z`` counts the walls of class ``i`` whose plus side
    holds ``z``.
    """
    classes = dilworth_colouring(alg, x, y)
    members = bits.to_list(alg.interval_mask(x, y))
    coords = {z: tuple(sum(1 for w in cls if w.plus >> z & 1) for cls in classes)
              for z in members}
    injective = len(set(coords.values())) == len(coords)
    arr = np.array([coords[z] for z in members], dtype=np.int64).reshape(len(members), -1)
    idx = np.array(members)
    sub = alg.table[np.ix_(idx, idx, idx)]
    pos = {z: i for i, z in enumerate(members)}
    remap = np.vectorize(pos.__getitem__)(sub) if len(members) else sub
    image_of_med = arr[remap]                                     # (k, k, k, d)
    lo = np.minimum(arr[:, None, :], arr[None, :, :])
    hi = np.maximum(arr[:, None, :], arr[None, :, :])
    med_of_image = np.maximum(lo[:, :, None, :], np.minimum(hi[:, :, None, :],
                                                            arr[None, None, :, :]))
    mp = bool((image_of_med == med_of_image).all())
    return ChainEmbedding(x, y, tuple(tuple(c) for c in classes), coords,
                          tuple(len(c) + 1 for c in classes), injective, mp)
