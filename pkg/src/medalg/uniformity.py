"""Shadows, branches, finite covers and the intrinsic uniformity they generate.

Notation: ``branch(A, u, v)`` is the set of points whose gate onto ``[u, v]``
is not ``u``; ``shadow(A, u, v)`` is its complement.  The subbasic cover of a
chain pair is ``{branch(v, u), branch(u, v)}``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import bits
from .algebra import (
    Automorphism,
    FiniteMedianAlgebra,
    MedianAlgebraError,
    NotConvexError,
    adjacent_pairs,
    chain_order,
    chain_pairs,
    convex_violation,
    is_chain_interval,
    is_chain_subset,
    leq,
    make_product,
)

EXHAUSTIVE_TRIPLE_LIMIT = 32
BOX_SAMPLES = 256


class CoverError(MedianAlgebraError):
    pass


class NotChainInterval(MedianAlgebraError):
    pass


# -- shadows and branches ------------------------------------------------------------

def _shadow_rows(alg: FiniteMedianAlgebra) -> list[list[int]]:
    """``rows[u][v]`` is the shadow mask of ``(u, v)``."""
    cached = alg._cache.get("shadows")
    if cached is None:
        t = alg.table
        # t[u, x, v] == u, viewed with rows v and columns x
        cached = [bits.rows_from_bool((t[u] == u).T) for u in range(alg.n)]
        alg._cache["shadows"] = cached
    return cached


def shadow(alg: FiniteMedianAlgebra, u: int, v: int) -> int:
    return _shadow_rows(alg)[u][v]


def branch(alg: FiniteMedianAlgebra, u: int, v: int) -> int:
    if u == v:
        raise MedianAlgebraError(f"branch of the degenerate pair ({u},{u}) is empty")
    return alg.carrier & ~_shadow_rows(alg)[u][v]


# -- covers ---------------------------------------------------------------------------

def _antichain(masks: Iterable[int]) -> tuple[int, ...]:
    uniq = sorted({m for m in masks if m}, key=lambda m: (-bits.count(m), m))
    kept: list[int] = []
    for m in uniq:
        if not any(m & ~k == 0 for k in kept):
            kept.append(m)
    return tuple(sorted(kept))


@dataclass(frozen=True)
class Cover:
    """Finite cover in canonical form: no empty members, no member inside another."""

    carrier: int
    members: tuple[int, ...]

    @classmethod
    def of(cls, carrier: int, masks: Iterable[int]) -> "Cover":
        masks = list(masks)
        union = 0
        for m in masks:
            if m & ~carrier:
                raise CoverError("cover member leaves the carrier")
            union |= m
        if union != carrier:
            raise CoverError("members do not cover the carrier")
        return cls(carrier, _antichain(masks))

    @classmethod
    def trivial(cls, carrier: int) -> "Cover":
        return cls(carrier, (carrier,) if carrier else ())

    @classmethod
    def singletons(cls, carrier: int) -> "Cover":
        return cls(carrier, tuple(1 << i for i in bits.members(carrier)))

    def is_partition(self) -> bool:
        return all(not (a & b) for a, b in itertools.combinations(self.members, 2))

    def restrict(self, sub: int) -> "Cover":
        return Cover.of(sub, (m & sub for m in self.members))

    def __len__(self) -> int:
        return len(self.members)


def _same_carrier(c1: Cover, c2: Cover) -> None:
    if c1.carrier != c2.carrier:
        raise CoverError("covers live on different carriers")


def star(cover: Cover, x: int) -> int:
    out = 0
    for m in cover.members:
        if m >> x & 1:
            out |= m
    return out


def star_of_set(cover: Cover, s: int) -> int:
    out = 0
    for m in cover.members:
        if m & s:
            out |= m
    return out


def star_cover(cover: Cover) -> Cover:
    return Cover.of(cover.carrier, (star_of_set(cover, m) for m in cover.members))


def wedge(c1: Cover, c2: Cover) -> Cover:
    _same_carrier(c1, c2)
    return Cover(c1.carrier, _antichain(a & b for a in c1.members for b in c2.members))


def refines(c1: Cover, c2: Cover) -> bool:
    _same_carrier(c1, c2)
    return all(any(a & ~b == 0 for b in c2.members) for a in c1.members)


def star_refines(c1: Cover, c2: Cover) -> bool:
    return refines(star_cover(c1), c2)


def total_wedge(carrier: int, covers: Sequence[Cover]) -> Cover:
    """Wedge of every cover; partitions go first so intermediate covers stay small."""
    acc = Cover.trivial(carrier)
    for c in sorted(covers, key=lambda c: (not c.is_partition(), c.members)):
        acc = wedge(acc, c)
    return acc


def same_filter(carrier: int, gens_a: Sequence[Cover], gens_b: Sequence[Cover]) -> bool:
    """Whether two finite families of covers generate the same uniformity.

    On a finite carrier the total wedge is the finest element of the
    generated filter, so each generator of one family must be refined by the
    total wedge of the other.
    """
    wa = total_wedge(carrier, gens_a)
    wb = total_wedge(carrier, gens_b)
    return all(refines(wa, c) for c in gens_b) and all(refines(wb, c) for c in gens_a)


# -- subbases -------------------------------------------------------------------------

def subbasic_cover(alg: FiniteMedianAlgebra, u: int, v: int) -> Cover:
    if u == v:
        raise MedianAlgebraError("subbasic cover needs u != v")
    if not is_chain_interval(alg, u, v):
        raise NotChainInterval(f"[{alg.name(u)}, {alg.name(v)}] is not a chain interval")
    return Cover.of(alg.carrier, (branch(alg, v, u), branch(alg, u, v)))


@dataclass(frozen=True)
class UniformSubbase:
    carrier: int
    entries: tuple[tuple[tuple[int, int], Cover], ...] = field(default=())

    @property
    def covers(self) -> list[Cover]:
        return [c for _, c in self.entries]

    def __len__(self) -> int:
        return len(self.entries)


def _subbase(alg: FiniteMedianAlgebra, pairs: Iterable[tuple[int, int]]) -> UniformSubbase:
    seen: dict[Cover, tuple[int, int]] = {}
    for u, v in pairs:
        c = subbasic_cover(alg, u, v)
        seen.setdefault(c, (u, v))
    return UniformSubbase(alg.carrier, tuple((p, c) for c, p in seen.items()))


def chain_subbase(alg: FiniteMedianAlgebra) -> UniformSubbase:
    cached = alg._cache.get("chain_subbase")
    if cached is None:
        cached = _subbase(alg, chain_pairs(alg))
        alg._cache["chain_subbase"] = cached
    return cached


def adjacent_subbase(alg: FiniteMedianAlgebra) -> UniformSubbase:
    return _subbase(alg, adjacent_pairs(alg))


def uniformity_contains(sb: UniformSubbase, c: Cover) -> bool:
    return refines(total_wedge(sb.carrier, sb.covers), c)


def c3_star_refinement_check(sb: UniformSubbase) -> bool:
    """Every subbasic cover has a star-refinement inside the generated filter."""
    finest = total_wedge(sb.carrier, sb.covers)
    return all(star_refines(finest, c) for c in sb.covers)


# -- Hausdorff, T2^m, chain-solvability --------------------------------------------------

def _cover_separation(alg: FiniteMedianAlgebra, covers: Sequence[Cover]) -> np.ndarray:
    """``sep[x, y]`` is true when some cover has ``y`` outside the star of ``x``."""
    n = alg.n
    if not covers:
        return np.zeros((n, n), dtype=bool)
    only = []
    for c in covers:
        for m in c.members:
            others = 0
            for o in c.members:
                if o != m:
                    others |= o
            only.append(bits.to_bool(m & ~others, n))
    # covers have two members here, so "only-in-one" sides come in pairs
    sides = np.array(only, dtype=np.int32).reshape(len(covers), -1, n)
    sep = np.zeros((n, n), dtype=np.int64)
    k = sides.shape[1]
    for i in range(k):
        for j in range(k):
            if i != j:
                sep += sides[:, i, :].T.astype(np.int64) @ sides[:, j, :].astype(np.int64)
    return sep > 0


def is_hausdorff_Um(alg: FiniteMedianAlgebra) -> bool:
    """Intersection of the subbasic stars at each point is that point alone."""
    if alg.n == 1:
        return True
    covers = chain_subbase(alg).covers
    for c in covers:
        if len(c) != 2:
            raise CoverError("subbasic covers have exactly two members")
    sep = _cover_separation(alg, covers)
    np.fill_diagonal(sep, True)
    return bool(sep.all())


@dataclass(frozen=True)
class SeparationReport:
    holds: bool
    witnesses: dict
    failure: tuple[int, int] | None = None


def t2m_check(alg: FiniteMedianAlgebra) -> SeparationReport:
    """For every ``x != y`` find a chain pair whose gate sends them to both ends."""
    n = alg.n
    t = alg.table
    owner = np.full((n, n), -1, dtype=np.int64)
    np.fill_diagonal(owner, -2)
    pairs = chain_pairs(alg)
    for idx, (u, v) in enumerate(pairs):
        g = t[u, :, v]
        at_u = g == u
        at_v = g == v
        hit = (at_u[:, None] & at_v[None, :]) | (at_v[:, None] & at_u[None, :])
        owner[hit & (owner == -1)] = idx
        if not (owner == -1).any():
            break
    missing = np.argwhere(owner == -1)
    if len(missing):
        x, y = (int(a) for a in missing[0])
        return SeparationReport(False, {}, (x, y))
    witnesses = {}
    for x in range(n):
        for y in range(x + 1, n):
            u, v = pairs[owner[x, y]]
            if {int(t[u, x, v]), int(t[u, y, v])} != {u, v}:
                raise MedianAlgebraError(f"t2m witness for ({x},{y}) failed re-verification")
            witnesses[(x, y)] = (u, v)
    return SeparationReport(True, witnesses)


def chain_solvable_check(alg: FiniteMedianAlgebra) -> SeparationReport:
    """For every ``x != y`` find ``c <_x d`` in ``[x, y]`` spanning a nontrivial chain.

    The search walks ``[x, y]`` in increasing ``<=_x`` order from ``x`` and
    takes the first ``d`` with ``[x, d]`` a chain.
    """
    n = alg.n
    rows = alg.interval_rows()
    witnesses = {}
    for x in range(n):
        for y in range(n):
            if x == y:
                continue
            inner = sorted(bits.members(rows[x][y] & ~(1 << x)),
                           key=lambda z: bits.count(rows[x][z]))
            found = None
            for d in inner:
                if is_chain_interval(alg, x, d):
                    found = (x, d)
                    break
            if found is None:
                return SeparationReport(False, {}, (x, y))
            c, d = found
            if not (rows[x][y] >> c & 1 and rows[x][y] >> d & 1 and leq(alg, x, c, d)
                    and c != d):
                raise MedianAlgebraError(f"chain-solvable witness for ({x},{y}) failed")
            witnesses[(x, y)] = found
    return SeparationReport(True, witnesses)


def chain_witness_from_t2m(alg: FiniteMedianAlgebra, x: int, y: int,
                           sep: tuple[int, int]) -> tuple[int, int]:
    """Turn a gate-separating chain ``sep`` for ``(x, y)`` into ``c <_x d`` in ``[x, y]``."""
    a, b = sep
    xp, yp = alg.med(a, x, b), alg.med(a, y, b)
    c, d = alg.med(x, xp, y), alg.med(x, yp, y)
    if not leq(alg, x, c, d):
        c, d = d, c
    return c, d


def verify_chain_witness(alg: FiniteMedianAlgebra, x: int, y: int, c: int, d: int) -> bool:
    span = alg.interval_mask(x, y)
    return (c != d and bool(span >> c & 1) and bool(span >> d & 1)
            and leq(alg, x, c, d) and is_chain_interval(alg, c, d))


# -- theorem checks -------------------------------------------------------------------

@dataclass(frozen=True)
class CheckOutcome:
    holds: bool
    witness: object = None
    mode: str = "exhaustive"
    samples: int = 0

    def __bool__(self) -> bool:
        return self.holds


def _masks_bool(masks: Sequence[int], n: int) -> np.ndarray:
    return np.array([bits.to_bool(m, n) for m in masks], dtype=bool).reshape(len(masks), n)


def median_uniform_continuity_check(alg: FiniteMedianAlgebra, *, seed: int = 0,
                                    samples: int = BOX_SAMPLES) -> CheckOutcome:
    """Every box ``H_a x H_b x H_c`` of a subbasic cover has its medians in one member."""
    n = alg.n
    t = alg.table
    exhaustive = n <= EXHAUSTIVE_TRIPLE_LIMIT
    rng = np.random.default_rng(seed)
    for (u, v), cover in chain_subbase(alg).entries:
        sides = _masks_bool(cover.members, n)
        for combo in itertools.product(range(len(cover)), repeat=3):
            a, b, c = (np.flatnonzero(sides[k]) for k in combo)
            if exhaustive:
                image = t[np.ix_(a, b, c)].ravel()
            else:
                image = t[rng.choice(a, samples), rng.choice(b, samples), rng.choice(c, samples)]
            if not any(sides[k][image].all() for k in range(len(cover))):
                bad = image[0]
                return CheckOutcome(False, {"pair": (u, v), "box": combo, "image": int(bad)})
    mode = "exhaustive" if exhaustive else "sampled"
    return CheckOutcome(True, mode=mode, samples=0 if exhaustive else samples)


def _ray_pullbacks(alg: FiniteMedianAlgebra, u: int, v: int) -> list[tuple[int, int, int, int]]:
    """For a chain ``[u, v]``: ``(c, d, pre(L_d), pre(R_c))`` for all ``c <_u d`` in it."""
    order = chain_order(alg, u, v)
    pos = {z: i for i, z in enumerate(order)}
    g = alg.table[u, :, v]
    rank_of = np.array([pos[int(z)] for z in g])
    out = []
    for i, c in enumerate(order):
        for j in range(i + 1, len(order)):
            d = order[j]
            left = bits.from_bool(rank_of < j)
            right = bits.from_bool(rank_of > i)
            out.append((c, d, left, right))
    return out


def preimage_rays_check(alg: FiniteMedianAlgebra) -> CheckOutcome:
    """Gate preimages of open rays are the branches toward the ray's far end."""
    for u, v in chain_pairs(alg):
        for a, b in ((u, v), (v, u)):
            for c, d, left, right in _ray_pullbacks(alg, a, b):
                if left != branch(alg, d, a):
                    return CheckOutcome(False, {"chain": (a, b), "ray": "L", "d": d})
                if right != branch(alg, c, b):
                    return CheckOutcome(False, {"chain": (a, b), "ray": "R", "c": c})
    return CheckOutcome(True)


def initial_uniformity_check(alg: FiniteMedianAlgebra) -> CheckOutcome:
    """Subbasic covers and gate pullbacks of two-ray covers generate one filter.

    Each pullback is also matched against the subbasic cover of its ray pair.
    """
    sb = chain_subbase(alg)
    subbasic = set(sb.covers)
    pullbacks = []
    for u, v in chain_pairs(alg):
        for c, d, left, right in _ray_pullbacks(alg, u, v):
            cover = Cover.of(alg.carrier, (left, right))
            if cover not in subbasic:
                return CheckOutcome(False, {"chain": (u, v), "rays": (c, d)})
            pullbacks.append(cover)
    if not same_filter(alg.carrier, sb.covers, pullbacks):
        return CheckOutcome(False, {"filter": "mismatch"})
    return CheckOutcome(True)


def branch_equivalence_check(alg: FiniteMedianAlgebra) -> CheckOutcome:
    """Branches of a chain are unchanged when the far endpoint slides along it."""
    rows = alg.interval_rows()
    for x, y in chain_pairs(alg):
        for a, b in ((x, y), (y, x)):
            ref = branch(alg, b, a)
            for z in bits.members(rows[a][b] & ~(1 << b)):
                if branch(alg, b, z) != ref:
                    return CheckOutcome(False, {"chain": (a, b), "z": z})
    return CheckOutcome(True)


def branch_convexity_check(alg: FiniteMedianAlgebra) -> CheckOutcome:
    for u, v in chain_pairs(alg):
        for a, b in ((u, v), (v, u)):
            br = branch(alg, a, b)
            for side in (br, alg.carrier & ~br):
                bad = convex_violation(alg, side)
                if bad is not None:
                    return CheckOutcome(False, {"pair": (a, b), "violation": bad})
    return CheckOutcome(True)


def star_trichotomy_check(alg: FiniteMedianAlgebra) -> CheckOutcome:
    """Stars of a subbasic cover follow the gate value; disjoint iff adjacent."""
    t = alg.table
    adjacent = set(adjacent_pairs(alg))
    for u, v in chain_pairs(alg):
        b_u = branch(alg, v, u)      # gate != v
        b_v = branch(alg, u, v)      # gate != u
        cover = Cover(alg.carrier, tuple(sorted({b_u, b_v})))
        for x in range(alg.n):
            g = int(t[u, x, v])
            want = b_u if g == u else b_v if g == v else alg.carrier
            if star(cover, x) != want:
                return CheckOutcome(False, {"pair": (u, v), "x": x})
        if (not (b_u & b_v)) != ((u, v) in adjacent):
            return CheckOutcome(False, {"pair": (u, v), "clause": "disjoint iff adjacent"})
    return CheckOutcome(True)


def lots_check(alg: FiniteMedianAlgebra, *, seed: int = 0, trials: int = 20) -> CheckOutcome:
    """On a chain, subbasic covers are the two-ray covers, and ray covers of a
    finite set wedge to its star-cover."""
    if not is_chain_subset(alg, alg.carrier):
        raise MedianAlgebraError("lots_check needs a chain")
    n = alg.n
    if n == 1:
        return CheckOutcome(len(chain_subbase(alg)) == 0)
    ends = next((a, b) for a in range(n) for b in range(n)
                if alg.interval_mask(a, b) == alg.carrier)
    order = chain_order(alg, *ends)
    prefix = [bits.from_indices(order[:i]) for i in range(n + 1)]
    below = lambda i: prefix[i]                        # noqa: E731  L_{order[i]}
    above = lambda i: alg.carrier & ~prefix[i + 1]     # noqa: E731  R_{order[i]}
    rays = {Cover.of(alg.carrier, (below(j), above(i)))
            for i in range(n) for j in range(i + 1, n)}
    if rays != set(chain_subbase(alg).covers):
        return CheckOutcome(False, {"clause": "subbase equals two-ray covers"})
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        k = int(rng.integers(1, n + 1))
        chosen = sorted(rng.choice(n, size=k, replace=False).tolist())
        ray_wedge = Cover.trivial(alg.carrier)
        for i, j in zip(chosen, chosen[1:]):
            ray_wedge = wedge(ray_wedge, Cover.of(alg.carrier, (below(j), above(i))))
        ext = [None] + chosen + [None]
        star_members = []
        for p in range(1, len(ext) - 1):
            lo, hi = ext[p - 1], ext[p + 1]
            m = alg.carrier
            if lo is not None:
                m &= above(lo)
            if hi is not None:
                m &= below(hi)
            star_members.append(m)
        if ray_wedge != Cover.of(alg.carrier, star_members):
            return CheckOutcome(False, {"F": [order[i] for i in chosen]})
    return CheckOutcome(True)


def product_uniformity_check(a: FiniteMedianAlgebra, b: FiniteMedianAlgebra,
                             product: FiniteMedianAlgebra | None = None) -> CheckOutcome:
    """Chain intervals of ``a x b`` vary in one coordinate, and the product
    subbase generates the same filter as the pulled-back factor subbases."""
    p = product if product is not None else make_product(a, b)
    nb = b.n
    for u in range(p.n):
        for v in range(u + 1, p.n):
            (ua, ub), (va, vb) = divmod(u, nb), divmod(v, nb)
            moving = [(alg, s, e) for alg, s, e in ((a, ua, va), (b, ub, vb)) if s != e]
            expect = len(moving) <= 1 and all(is_chain_interval(alg, s, e)
                                              for alg, s, e in moving)
            if is_chain_interval(p, u, v) != expect:
                return CheckOutcome(False, {"clause": "chain intervals", "pair": (u, v)})
    col_a = [bits.from_indices(i * nb + j for j in range(nb)) for i in range(a.n)]
    col_b = [bits.from_indices(i * nb + j for i in range(a.n)) for j in range(nb)]

    def pull(masks: list[int], cover: Cover) -> Cover:
        return Cover.of(p.carrier, (_union(masks, m) for m in cover.members))

    pulled = [pull(col_a, c) for c in chain_subbase(a).covers]
    pulled += [pull(col_b, c) for c in chain_subbase(b).covers]
    own = chain_subbase(p).covers
    if set(own) != set(pulled):
        return CheckOutcome(False, {"clause": "subbasic covers are factor pullbacks"})
    if not same_filter(p.carrier, own, pulled):
        return CheckOutcome(False, {"clause": "filter equality"})
    return CheckOutcome(True)


def _union(masks: list[int], selector: int) -> int:
    out = 0
    for i in bits.members(selector):
        out |= masks[i]
    return out


def convex_restriction_check(alg: FiniteMedianAlgebra, conv: int) -> CheckOutcome:
    """The intrinsic uniformity of a convex subset is the trace of the ambient one."""
    if not conv:
        raise MedianAlgebraError("convex_restriction_check needs a nonempty set")
    bad = convex_violation(alg, conv)
    if bad is not None:
        raise NotConvexError(f"set is not convex: [{bad[0]}, {bad[1]}] leaves it")
    members = bits.to_list(conv)
    sub = alg.induced(conv)

    def lift(mask: int) -> int:
        return bits.from_indices(members[i] for i in bits.members(mask))

    inner = [Cover.of(conv, (lift(m) for m in c.members)) for c in chain_subbase(sub).covers]
    traces = [c.restrict(conv) for c in chain_subbase(alg).covers]
    inner_set = set(inner)
    for c in traces:
        if conv not in c.members and c not in inner_set:
            return CheckOutcome(False, {"clause": "trace is subbasic", "cover": c.members})
    if not inner_set <= set(traces):
        return CheckOutcome(False, {"clause": "subbasic is a trace"})
    if not same_filter(conv, inner, traces):
        return CheckOutcome(False, {"clause": "filter equality"})
    return CheckOutcome(True)


def _ordered_chain_branches(alg: FiniteMedianAlgebra):
    cached = alg._cache.get("ordered_branches")
    if cached is None:
        n = alg.n
        pairs = [(u, v) for u, v in chain_pairs(alg)] + [(v, u) for u, v in chain_pairs(alg)]
        index = np.full((n, n), -1, dtype=np.int64)
        for i, (u, v) in enumerate(pairs):
            index[u, v] = i
        mat = _masks_bool([branch(alg, u, v) for u, v in pairs], n)
        cached = (pairs, index, mat)
        alg._cache["ordered_branches"] = cached
    return cached


def equivariance_check(alg: FiniteMedianAlgebra, g: Automorphism) -> CheckOutcome:
    """``g`` carries the branch of ``(u, v)`` onto the branch of ``(g u, g v)``."""
    pairs, index, mat = _ordered_chain_branches(alg)
    if not pairs:
        return CheckOutcome(True)
    perm = np.array(g.perm)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm))
    src = np.array(pairs)
    target = index[perm[src[:, 0]], perm[src[:, 1]]]
    if (target < 0).any():
        i = int(np.flatnonzero(target < 0)[0])
        return CheckOutcome(False, {"pair": pairs[i], "clause": "image is not a chain pair"})
    image = mat[:, inv]                   # image[k, y] = mat[k, g^-1(y)]
    ok = (image == mat[target]).all(axis=1)
    if not ok.all():
        i = int(np.flatnonzero(~ok)[0])
        return CheckOutcome(False, {"pair": pairs[i], "perm": list(g.perm)})
    return CheckOutcome(True)


def subbase_permutation(alg: FiniteMedianAlgebra, g: Automorphism) -> list[int]:
    """Index permutation induced by ``g`` on the deduplicated chain subbase."""
    sb = chain_subbase(alg)
    pos = {c: i for i, c in enumerate(sb.covers)}
    return [pos[Cover.of(alg.carrier, (g.image(m) for m in c.members))] for c in sb.covers]


def equivariance_group_check(alg: FiniteMedianAlgebra, group: Sequence[Automorphism],
                             chunk: int = 4096) -> CheckOutcome:
    """:func:`equivariance_check` for a whole group, vectorised over its elements."""
    pairs, index, mat = _ordered_chain_branches(alg)
    if not pairs or not group:
        return CheckOutcome(True)
    src = np.array(pairs)
    for start in range(0, len(group), chunk):
        perms = np.array([g.perm for g in group[start:start + chunk]])      # (G, n)
        inv = np.argsort(perms, axis=1)
        target = index[perms[:, src[:, 0]], perms[:, src[:, 1]]]            # (G, P)
        if (target < 0).any():
            gi, k = (int(v) for v in np.argwhere(target < 0)[0])
            return CheckOutcome(False, {"pair": pairs[k], "perm": list(group[start + gi].perm),
                                        "clause": "image is not a chain pair"})
        image = mat[:, inv].transpose(1, 0, 2)                              # (G, P, n)
        ok = (image == mat[target]).all(axis=2)
        if not ok.all():
            gi, k = (int(v) for v in np.argwhere(~ok)[0])
            return CheckOutcome(False, {"pair": pairs[k], "perm": list(group[start + gi].perm)})
    return CheckOutcome(True)
