"""Theorem registry: executable predicates over the corpus, with their anchors."""
from __future__ import annotations

import itertools
import json
import os
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import bits
from .algebra import (
    AxiomViolation,
    FiniteMedianAlgebra,
    adjacent_pairs,
    automorphisms,
    chain_pairs,
    find_square,
    is_chain_interval,
    is_chain_subset,
    is_conservative,
    is_convex,
    is_isomorphic,
    make_hypercube,
    make_starlet,
    verify_axioms,
)
from .corpus import Instance
from .io import algebra_to_dict
from .roller import (
    IntegerLine,
    FiniteChain,
    PeriodicBiSequence,
    StarletCompactification,
    consistent_orientations,
    parse_point,
    parse_symbolic,
    periodic_interval_is_chain,
    periodic_square_witness,
    roller_embedding,
    symbolic_axiom_check,
    truncation_consistency,
    verify_periodic_square,
)
from .topology import (
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
    small_star_leaf_bound,
    tau_m,
    wall_metric,
)
from .uniformity import (
    CheckOutcome,
    branch,
    branch_convexity_check,
    branch_equivalence_check,
    c3_star_refinement_check,
    chain_solvable_check,
    chain_subbase,
    adjacent_subbase,
    chain_witness_from_t2m,
    convex_restriction_check,
    equivariance_group_check,
    initial_uniformity_check,
    is_hausdorff_Um,
    lots_check,
    median_uniform_continuity_check,
    preimage_rays_check,
    product_uniformity_check,
    same_filter,
    shadow,
    star,
    star_trichotomy_check,
    t2m_check,
    uniformity_contains,
    verify_chain_witness,
    wedge,
)
from .walls import (
    BRUTE_FORCE_WALL_LIMIT,
    CUBE_ORACLE_LIMIT,
    brute_force_walls,
    cube_embedding_rank,
    dilworth_colouring,
    interval_chain_embedding,
    rank,
    wall_fingerprint,
    walls,
)

# Statements covered by the registry.  Every one must be carried by exactly one check.
STATEMENT_ANCHORS = (
    "M1-M3", "d:MedianRank", "l:HomImageChain", "d:cov-unif", "f:DedekindUniformityInternal",
    "l:LOTSSubbase", "d:median-compatible", "ex:MedianMetric",
    "d:MedianBranch", "l:ConvexFibers", "r:chain_essential", "d:StarMedianUniformity",
    "l:SubbasicStars", "l:compositionOFgates", "lem:branch_equiv", "ex:ChainEssentiality",
    "l:PreimageRays", "t:InitialUniformity", "l:BranchesSubbaseTauM", "d:medT2",
    "l:medT2Hausdorff", "ex:PERIODIC",
    "t:UniformMedian", "t:MMC", "p:LOTS_case", "p:MMCconvex", "t:MedPretreeMMC",
    "d:chain-solvable", "thm:chain_solvable", "t:FiniteRankHausd", "t:DISCRETEisCV",
    "d:WallOrientation", "r:EMBEDDING", "thm:unique_compactification",
    "prop:topologically_discrete_criterion", "rem:topology_equivalence", "ex:starlet",
    "p:RFandMMC",
    "p:UmProduct", "p:T2product", "c:MMCProduct", "cor:Rn", "p:MetrizableCountableMMC",
    "d:FiniteBranching", "t:CoincidenceTopologies", "ex:MetricHedgehog",
    "t:Gcompactification",
)

GLOBAL_ID = "global"

# exhaustive/sampled switch-over points
GATE_EXHAUSTIVE_LIMIT = 20
GATE_SAMPLED_PAIRS = 32
GATE_ISO_PAIRS = 200
HOM_IMAGE_LIMIT = 64
SEPARATION_PAIR_LIMIT = 400
RF_ALL_INTERVAL_LIMIT = 48
RF_SAMPLED_INTERVALS = 300
EQUIVARIANCE_LIMIT = 32
ROLLER_WALL_LIMIT = 40
LIPSCHITZ_REGISTRY_SAMPLES = 20_000
DILWORTH_PAIRS = 2
PERIODIC_PAIRS = 100
PERIODIC_MAX_PERIOD = 6
TRUNCATION_RADII = (1, 2, 3, 4)
STARLET_RANGE = tuple(range(2, 9))


def _seed(*parts: object) -> int:
    return zlib.crc32("|".join(map(str, parts)).encode())


# -- report type -------------------------------------------------------------------------

@dataclass
class TheoremReport:
    check_id: str
    anchors: tuple[str, ...]
    instance_id: str
    verdict: str                      # pass | fail | error | n/a
    witness: object = None
    mode: str = "exhaustive"
    samples: int = 0
    seconds: float = 0.0
    algebra: dict | None = None

    @property
    def failed(self) -> bool:
        return self.verdict in ("fail", "error")

    def to_dict(self) -> dict:
        return {
            "check": self.check_id,
            "anchors": list(self.anchors),
            "instance": self.instance_id,
            "verdict": self.verdict,
            "witness": jsonable(self.witness),
            "mode": self.mode,
            "samples": self.samples,
            "seconds": round(self.seconds, 6),
            "algebra": self.algebra,
        }


def jsonable(obj):
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if v == float("inf"):
            return "+inf"
        if v == float("-inf"):
            return "-inf"
        return v
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        return sorted(jsonable(v) for v in obj)
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    return str(obj)


def reports_to_json(reports: Sequence[TheoremReport], *, timing: bool = True) -> str:
    rows = [r.to_dict() for r in reports]
    if not timing:
        for row in rows:
            row.pop("seconds")
    return json.dumps(rows, indent=1, sort_keys=True)


# -- check definitions --------------------------------------------------------------------

Outcome = CheckOutcome | None          # None means not applicable


@dataclass(frozen=True)
class Check:
    id: str
    anchors: tuple[str, ...]
    run: Callable[..., Outcome]
    scope: str = "instance"            # instance | global
    doc: str = ""


def _fail(**witness) -> CheckOutcome:
    return CheckOutcome(False, witness)


def check_axioms(inst: Instance, seed: int) -> Outcome:
    a = inst.algebra
    try:
        mode = verify_axioms(a.n, a.table, seed=seed)
    except AxiomViolation as exc:
        return _fail(violation=str(exc))
    return CheckOutcome(True, mode=mode)


def check_walls_oracle(inst: Instance, seed: int) -> Outcome:
    a = inst.algebra
    if a.n > BRUTE_FORCE_WALL_LIMIT:
        return None
    fast, slow = set(walls(a)), set(brute_force_walls(a))
    if fast != slow:
        return _fail(missing=[w.side_a for w in slow - fast], extra=[w.side_a for w in fast - slow])
    return CheckOutcome(True)


def check_rank_oracle(inst: Instance, seed: int) -> Outcome:
    a = inst.algebra
    if a.n > CUBE_ORACLE_LIMIT:
        return None
    r, oracle = rank(a), cube_embedding_rank(a)
    return CheckOutcome(r == oracle, {"rank": r, "cube_oracle": oracle})


def _gate_pairs(a: FiniteMedianAlgebra, seed: int) -> tuple[list[tuple[int, int]], str]:
    every = [(u, v) for u in range(a.n) for v in range(a.n)]
    if a.n <= GATE_EXHAUSTIVE_LIMIT:
        return every, "exhaustive"
    rng = np.random.default_rng(seed)
    pick = rng.choice(len(every), size=GATE_SAMPLED_PAIRS, replace=False)
    return [every[i] for i in sorted(pick)], "sampled"


def check_gate_retraction(inst: Instance, seed: int) -> Outcome:
    """Gates are median retractions; composition is the gate onto the projected
    interval; opposed pairs give mutually inverse isomorphisms of intervals."""
    a = inst.algebra
    t = a.table.astype(np.int64)
    n = a.n
    ar = np.arange(n)
    pairs, mode = _gate_pairs(a, seed)
    rows = a.interval_rows()
    for u, v in pairs:
        g = t[u, :, v]
        if bits.from_bool(g == ar) != rows[u][v] or not (g[g] == g).all():
            return _fail(clause="retraction", pair=(u, v))
        if not (g[t] == t[g[:, None, None], g[None, :, None], g[None, None, :]]).all():
            return _fail(clause="median preserving", pair=(u, v))
        # (1): g(m(x, z, y)) == m(g x, z, g y) for all x, y, z
        rhs = t[g[:, None, None], ar[None, None, :], g[None, :, None]]
        bad = g[t] != rhs
        if bad.any():
            x, y, z = (int(w) for w in np.argwhere(bad)[0])
            return _fail(clause="composition", pair=(u, v), x=x, y=y, z=z)
    # (2): opposed pairs
    rng = np.random.default_rng(seed + 1)
    xy = [(x, y) for x in range(n) for y in range(n) if x != y]
    if len(xy) > GATE_ISO_PAIRS:
        xy = [xy[i] for i in sorted(rng.choice(len(xy), GATE_ISO_PAIRS, replace=False))]
        mode = "sampled"
    checked = 0
    for x, y in xy:
        h = t[x, :, y]
        us = np.flatnonzero(h == x)
        vs = np.flatnonzero(h == y)
        for _ in range(2):
            u, v = int(rng.choice(us)), int(rng.choice(vs))
            c, d = int(t[u, x, v]), int(t[u, y, v])
            inner = np.array(bits.to_list(rows[x][y]))
            outer = np.array(bits.to_list(rows[c][d]))
            there = t[u, inner, v]
            back = t[x, outer, y]
            if (len(inner) != len(outer) or not (t[x, there, y] == inner).all()
                    or not (t[u, back, v] == outer).all()):
                return _fail(clause="interval isomorphism", xy=(x, y), uv=(u, v))
            checked += 1
    return CheckOutcome(True, mode=mode, samples=checked if mode == "sampled" else 0)


def _homomorphisms(inst: Instance, seed: int):
    """Gate retractions, automorphisms and product projections, as index arrays."""
    a = inst.algebra
    t = a.table
    pairs, _ = _gate_pairs(a, seed)
    rng = np.random.default_rng(seed)
    if len(pairs) > 16:
        pairs = [pairs[i] for i in sorted(rng.choice(len(pairs), 16, replace=False))]
    maps = [(a, t[u, :, v].astype(np.int64)) for u, v in pairs]
    if a.n <= EQUIVARIANCE_LIMIT:
        for g in automorphisms(a)[:8]:
            maps.append((a, np.array(g.perm)))
    if inst.parts is not None:
        pa, pb = inst.parts
        idx = np.arange(a.n)
        maps.append((pa, idx // pb.n))
        maps.append((pb, idx % pb.n))
    return maps


def check_hom_image_chain(inst: Instance, seed: int) -> Outcome:
    a = inst.algebra
    chains = [a.interval_mask(u, v) for u, v in chain_pairs(a)]
    if len(chains) > HOM_IMAGE_LIMIT:
        rng = np.random.default_rng(seed)
        chains = [chains[i] for i in sorted(rng.choice(len(chains), HOM_IMAGE_LIMIT, replace=False))]
    for k, (dst, f) in enumerate(_homomorphisms(inst, seed)):
        for c in chains:
            image = bits.from_indices(int(f[z]) for z in bits.members(c))
            if not is_chain_subset(dst, image):
                return _fail(map=k, chain=bits.to_list(c))
    return CheckOutcome(True)


def check_conservative(inst: Instance, seed: int) -> Outcome:
    """Conservative algebras are chains or the square."""
    a = inst.algebra
    if not is_conservative(a):
        return CheckOutcome(not is_chain_subset(a, a.carrier), {"clause": "chains are conservative"})
    ok = is_chain_subset(a, a.carrier) or is_isomorphic(a, make_hypercube(2))
    return CheckOutcome(ok, {"clause": "conservative implies chain or square"})


def check_branch_convexity(inst: Instance, seed: int) -> Outcome:
    a = inst.algebra
    for u, v in chain_pairs(a):
        for p, q in ((u, v), (v, u)):
            if branch(a, p, q) != a.carrier & ~shadow(a, p, q):
                return _fail(clause="branch is the shadow complement", pair=(p, q))
    return branch_convexity_check(a)


def check_branch_equiv(inst: Instance, seed: int) -> Outcome:
    return branch_equivalence_check(inst.algebra)


def check_subbasic_stars(inst: Instance, seed: int) -> Outcome:
    return star_trichotomy_check(inst.algebra)


def check_preimage_rays(inst: Instance, seed: int) -> Outcome:
    return preimage_rays_check(inst.algebra)


def check_initial_uniformity(inst: Instance, seed: int) -> Outcome:
    return initial_uniformity_check(inst.algebra)


def check_cover_axioms(inst: Instance, seed: int) -> Outcome:
    """Star refinement for subbasic covers; the filter contains pairwise wedges
    and their coarsenings."""
    a = inst.algebra
    sb = chain_subbase(a)
    if not c3_star_refinement_check(sb):
        return _fail(clause="star refinement")
    covers = sb.covers
    rng = np.random.default_rng(seed)
    for _ in range(min(10, len(covers) ** 2)):
        i, j = rng.integers(0, len(covers), size=2)
        w = wedge(covers[i], covers[j])
        if not uniformity_contains(sb, w):
            return _fail(clause="wedge closure", covers=(int(i), int(j)))
        coarse = type(w).of(a.carrier, (m | bits.from_bool(rng.random(a.n) < 0.3)
                                        for m in w.members))
        if not uniformity_contains(sb, coarse):
            return _fail(clause="coarsening", covers=(int(i), int(j)))
    return CheckOutcome(True, mode="sampled" if covers else "exhaustive")


def check_adjacent_subbase(inst: Instance, seed: int) -> Outcome:
    a = inst.algebra
    ok = same_filter(a.carrier, chain_subbase(a).covers, adjacent_subbase(a).covers)
    return CheckOutcome(ok, {"clause": "adjacent and chain subbases generate one filter"})


def check_uniform_median(inst: Instance, seed: int) -> Outcome:
    return median_uniform_continuity_check(inst.algebra, seed=seed)


def check_chain_solvable(inst: Instance, seed: int) -> Outcome:
    """Hausdorff, gate-separated and chain-solvable agree; witnesses convert."""
    a = inst.algebra
    h = is_hausdorff_Um(a)
    t2 = t2m_check(a)
    cs = chain_solvable_check(a)
    if not (h == t2.holds == cs.holds):
        return _fail(hausdorff=h, t2m=t2.holds, chain_solvable=cs.holds,
                     t2m_failure=t2.failure, cs_failure=cs.failure)
    items = sorted(t2.witnesses.items())
    mode = "exhaustive"
    if len(items) > SEPARATION_PAIR_LIMIT:
        rng = np.random.default_rng(seed)
        items = [items[i] for i in sorted(rng.choice(len(items), SEPARATION_PAIR_LIMIT,
                                                     replace=False))]
        mode = "sampled"
    for (x, y), sep in items:
        for p, q in ((x, y), (y, x)):
            c, d = chain_witness_from_t2m(a, p, q, sep)
            if not verify_chain_witness(a, p, q, c, d):
                return _fail(clause="witness transform", pair=(p, q), sep=sep, cd=(c, d))
    return CheckOutcome(h, mode=mode, samples=len(items) if mode == "sampled" else 0)


def _geodesic(a: FiniteMedianAlgebra, x: int, y: int, nbrs: list[list[int]]) -> list[int]:
    rows = a.interval_rows()
    path = [x]
    while path[-1] != y:
        z = path[-1]
        step = next(w for w in nbrs[z] if rows[w][y] >> w & 1 and rows[z][y] >> w & 1)
        path.append(step)
    return path


def check_discrete_cv(inst: Instance, seed: int) -> Outcome:
    """Maximal chains in ``[x, y]`` start with an adjacent pair whose gate separates x, y."""
    a = inst.algebra
    nbrs: list[list[int]] = [[] for _ in range(a.n)]
    for p, q in adjacent_pairs(a):
        nbrs[p].append(q)
        nbrs[q].append(p)
    pairs = [(x, y) for x in range(a.n) for y in range(a.n) if x != y]
    mode = "exhaustive"
    if len(pairs) > SEPARATION_PAIR_LIMIT:
        rng = np.random.default_rng(seed)
        pairs = [pairs[i] for i in sorted(rng.choice(len(pairs), SEPARATION_PAIR_LIMIT,
                                                     replace=False))]
        mode = "sampled"
    for x, y in pairs:
        try:
            path = _geodesic(a, x, y, nbrs)
        except StopIteration:
            return _fail(clause="no maximal chain", pair=(x, y))
        for p, q in zip(path, path[1:]):
            if a.interval_mask(p, q) != (1 << p) | (1 << q):
                return _fail(clause="consecutive points not adjacent", pair=(x, y))
        z1 = path[1]
        if a.med(x, x, z1) != x or a.med(x, y, z1) != z1:
            return _fail(clause="gate separation", pair=(x, y))
    return CheckOutcome(True, mode=mode, samples=len(pairs) if mode == "sampled" else 0)


def dilworth_interval_check(a: FiniteMedianAlgebra, x: int, y: int) -> CheckOutcome:
    if x == y:
        return CheckOutcome(True)
    classes = dilworth_colouring(a, x, y)
    sub_rank = rank(a.induced(a.interval_mask(x, y)))
    if len(classes) != sub_rank:
        return _fail(clause="class count equals interval rank", pair=(x, y),
                     classes=len(classes), rank=sub_rank)
    for cls in classes:
        if any(not (p <= q) for p, q in zip(cls, cls[1:])):
            return _fail(clause="classes totally ordered", pair=(x, y))
    emb = interval_chain_embedding(a, x, y)
    if not (emb.injective and emb.median_preserving):
        return _fail(clause="embedding", pair=(x, y), injective=emb.injective,
                     median_preserving=emb.median_preserving)
    return CheckOutcome(True)


def check_finite_rank(inst: Instance, seed: int) -> Outcome:
    a = inst.algebra
    if a.n < 2:
        return None
    rng = np.random.default_rng(seed)
    for _ in range(DILWORTH_PAIRS):
        x, y = (int(v) for v in rng.choice(a.n, 2, replace=False))
        out = dilworth_interval_check(a, x, y)
        if not out:
            return out
    return CheckOutcome(True, mode="sampled", samples=DILWORTH_PAIRS)


def check_lots(inst: Instance, seed: int) -> Outcome:
    a = inst.algebra
    if a.n < 2:
        return None
    if is_chain_subset(a, a.carrier):
        return lots_check(a, seed=seed)
    pairs = sorted(chain_pairs(a), key=lambda p: (-bits.count(a.interval_mask(*p)), p))[:4]
    for u, v in pairs:
        out = lots_check(a.induced(a.interval_mask(u, v)), seed=seed)
        if not out:
            return _fail(interval=(u, v), detail=out.witness)
    return CheckOutcome(True)


def _convex_samples(a: FiniteMedianAlgebra, seed: int) -> list[int]:
    rng = np.random.default_rng(seed)
    sets = [a.carrier]
    for _ in range(3):
        x, y = (int(v) for v in rng.integers(0, a.n, size=2))
        sets.append(a.interval_mask(x, y))
    hs = halfspaces(a)
    if hs:
        sets.extend(hs[int(i)] for i in rng.choice(len(hs), min(3, len(hs)), replace=False))
    return list(dict.fromkeys(sets))


def check_mmc_convex(inst: Instance, seed: int) -> Outcome:
    a = inst.algebra
    for conv in _convex_samples(a, seed):
        out = convex_restriction_check(a, conv)
        if not out:
            return _fail(set=bits.to_list(conv), detail=out.witness)
    return CheckOutcome(True, mode="sampled")


def _uniform_topology(a: FiniteMedianAlgebra) -> FiniteTopology:
    nb = [a.carrier] * a.n
    for c in chain_subbase(a).covers:
        for x in range(a.n):
            nb[x] &= star(c, x)
    return FiniteTopology(tuple(nb))


def check_topology_equivalence(inst: Instance, seed: int) -> Outcome:
    a = inst.algebra
    if set(branch_subbase(a)) != set(halfspaces(a)):
        return _fail(clause="branches are exactly the halfspaces")
    if tau_m(a) != halfspace_topology(a):
        return _fail(clause="convex topology")
    if tau_m(a) != _uniform_topology(a):
        return _fail(clause="topology of the uniformity")
    if not local_convexity_check(a):
        return _fail(clause="local convexity")
    return CheckOutcome(True)


def check_rf_comparison(inst: Instance, seed: int) -> Outcome:
    a = inst.algebra
    if gate_initial_topology(a) != tau_m(a):
        return _fail(clause="chain-gate initial topology")
    if a.n <= RF_ALL_INTERVAL_LIMIT:
        return CheckOutcome(gate_initial_topology(a, all_intervals=True) == tau_m(a),
                            {"clause": "all-interval initial topology"})
    rng = np.random.default_rng(seed)
    every = [(u, v) for u in range(a.n) for v in range(u + 1, a.n)]
    pick = [every[i] for i in sorted(rng.choice(len(every), RF_SAMPLED_INTERVALS, replace=False))]
    targets = sorted(set(pick) | set(chain_pairs(a)))
    return CheckOutcome(gate_initial_topology(a, targets=targets) == tau_m(a),
                        {"clause": "sampled-interval initial topology"},
                        "sampled", RF_SAMPLED_INTERVALS)


def check_discrete_criterion(inst: Instance, seed: int) -> Outcome:
    a = inst.algebra
    if not tau_m(a).is_discrete():
        return _fail(clause="discrete")
    nbrs: list[list[int]] = [[] for _ in range(a.n)]
    for p, q in adjacent_pairs(a):
        nbrs[p].append(q)
        nbrs[q].append(p)
    for x in range(a.n):
        o = a.carrier
        for v in nbrs[x]:
            o &= branch(a, v, x)
        if o != 1 << x:
            return _fail(clause="neighbour branches isolate", x=x)
        res = min_isolating_branches(a, x)
        if res.count != len(nbrs[x]):
            return _fail(clause="minimum equals degree", x=x, count=res.count, degree=len(nbrs[x]))
    return CheckOutcome(True)


def check_geometric_branching(inst: Instance, seed: int) -> Outcome:
    a = inst.algebra
    d = wall_metric(a)
    points = range(a.n)
    mode = "exhaustive"
    if a.n > 16:
        rng = np.random.default_rng(seed)
        points = sorted(int(v) for v in rng.choice(a.n, 16, replace=False))
        mode = "sampled"
    for x in points:
        for eps in (1, 2, int(d.max()) + 1):
            res = geometric_branching_check(a, x, eps)
            o = a.carrier
            for b in res.branches:
                o &= b
            if not (o >> x & 1) or o & ~res.ball:
                return _fail(x=x, eps=eps)
            if eps == 1 and res.count != degree(a, x):
                return _fail(clause="unit ball needs the degree", x=x, count=res.count)
            if eps > d.max() and res.count != 0:
                return _fail(clause="ball beyond the diameter", x=x)
    return CheckOutcome(True, mode=mode)


def check_metric(inst: Instance, seed: int) -> Outcome:
    a = inst.algebra
    rep = metric_checks(a)
    if not rep.holds:
        return _fail(clause=rep.clause, witness=rep.witness)
    lip = lipschitz_median_check(a, samples=LIPSCHITZ_REGISTRY_SAMPLES, seed=seed)
    return CheckOutcome(lip.holds, {"clause": lip.clause, "witness": lip.witness},
                        lip.mode, lip.samples)


def check_fingerprint(inst: Instance, seed: int) -> Outcome:
    a = inst.algebra
    fp = wall_fingerprint(a, 0)
    if not fp.is_injective():
        return _fail(clause="injective")
    d = wall_metric(a)
    for x in range(a.n):
        for y in range(a.n):
            if len(fp[x] ^ fp[y]) != d[x, y]:
                return _fail(clause="symmetric difference is the metric", pair=(x, y))
    return CheckOutcome(True)


def check_roller(inst: Instance, seed: int) -> Outcome:
    a = inst.algebra
    if len(walls(a)) > ROLLER_WALL_LIMIT:
        return None
    orients = consistent_orientations(a)
    emb = roller_embedding(a)
    images = sorted(tuple(int(b) for b in row) for row in emb.vectors)
    if len(orients) != a.n:
        return _fail(clause="orientation count", orientations=len(orients), n=a.n)
    if not (emb.injective and emb.median_preserving and images == orients):
        return _fail(clause="indicator map is an isomorphism onto the orientations")
    return CheckOutcome(True)


def check_product(inst: Instance, seed: int) -> Outcome:
    if inst.parts is None:
        return None
    pa, pb = inst.parts
    p = inst.algebra
    out = product_uniformity_check(pa, pb, p)
    if not out:
        return out
    if is_hausdorff_Um(p) != (is_hausdorff_Um(pa) and is_hausdorff_Um(pb)):
        return _fail(clause="product Hausdorff")
    if rank(p) != rank(pa) + rank(pb):
        return _fail(clause="rank is additive", rank=(rank(p), rank(pa), rank(pb)))
    if max(len(walls(x)) for x in (p, pa, pb)) <= ROLLER_WALL_LIMIT:
        counts = [len(consistent_orientations(x)) for x in (p, pa, pb)]
        if counts[0] != counts[1] * counts[2]:
            return _fail(clause="compactification of the product", counts=counts)
    return CheckOutcome(True)


def check_equivariance(inst: Instance, seed: int) -> Outcome:
    a = inst.algebra
    if a.n > EQUIVARIANCE_LIMIT:
        return None
    group = automorphisms(a)
    out = equivariance_group_check(a, group)
    if not out:
        return out
    return CheckOutcome(True, {"group_order": len(group)})


def check_chain_essential(inst: Instance, seed: int) -> Outcome:
    """Some branch over a non-chain interval fails convexity exactly when a square embeds."""
    a = inst.algebra
    square = find_square(a) is not None
    if square != (rank(a) >= 2):
        return _fail(clause="square iff rank >= 2")
    witness = None
    for u in range(a.n):
        for v in range(a.n):
            if u != v and not is_chain_interval(a, u, v) and not is_convex(a, branch(a, v, u)):
                witness = (u, v)
                break
        if witness:
            break
    if (witness is not None) != square:
        return _fail(clause="nonconvex non-chain branch iff square", witness=witness)
    return CheckOutcome(True, {"nonconvex_branch": witness})


# -- global checks --------------------------------------------------------------------------

def check_integer_line(seed: int) -> Outcome:
    comp = parse_symbolic("zline")
    report = comp.boundary_report()
    if report != "boundary: {-inf, +inf} (2 ends)":
        return _fail(clause="two ends", report=report)
    for r in TRUNCATION_RADII:
        rep = truncation_consistency([IntegerLine()], r)
        if not rep.holds:
            return _fail(clause=rep.clause, r=r)
    return CheckOutcome(True)


def check_integer_power(seed: int) -> Outcome:
    comp = parse_symbolic("zline^2")
    inf = float("inf")
    if not (comp.contains((inf, 0)) and comp.is_boundary((inf, 0))
            and not comp.is_boundary((3, -2)) and comp.is_boundary((-inf, inf))):
        return _fail(clause="boundary membership")
    got = comp.median(parse_point("(+inf,0)"), parse_point("(-inf,0)"), parse_point("(5,7)"))
    if tuple(got) != (5, 0):
        return _fail(clause="median query", got=got)
    if not symbolic_axiom_check(comp, samples=20_000, seed=seed):
        return _fail(clause="extended median axioms")
    for factors in ([IntegerLine()] * 2, [IntegerLine(), FiniteChain(3)]):
        for r in TRUNCATION_RADII:
            rep = truncation_consistency(factors, r)
            if not rep.holds:
                return _fail(clause=rep.clause, r=r, factors=[f.describe() for f in factors])
    return CheckOutcome(True)


def random_periodic_pairs(seed: int, count: int = PERIODIC_PAIRS,
                          max_period: int = PERIODIC_MAX_PERIOD):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        x, y = (PeriodicBiSequence.from_pattern(
            rng.integers(0, 2, size=int(rng.integers(1, max_period + 1))).tolist())
            for _ in range(2))
        if x != y:
            out.append((x, y))
    return out


def check_periodic(seed: int) -> Outcome:
    pairs = random_periodic_pairs(seed)
    for x, y in pairs:
        square = periodic_square_witness(x, y)
        if not verify_periodic_square(x, y, square):
            return _fail(pair=(str(x), str(y)))
        if periodic_interval_is_chain(x, y):
            return _fail(clause="interval is not a chain", pair=(str(x), str(y)))
    return CheckOutcome(True, mode="sampled", samples=len(pairs))


def check_starlet_scaling(seed: int) -> Outcome:
    for n in STARLET_RANGE:
        a = make_starlet(n)
        for i, j, k in itertools.combinations(range(1, n + 1), 3):
            if a.med(i, j, k) != 0:
                return _fail(clause="leaf medians", n=n)
        if min_isolating_branches(a, 0).count != n:
            return _fail(clause="isolating branches", n=n)
        if geometric_branching_check(a, 0, 1).count != n:
            return _fail(clause="unit ball branches", n=n)
        for k in range(n + 1):
            if small_star_leaf_bound(a, 0, k) != n - k:
                return _fail(clause="small stars keep leaves", n=n, k=k)
        StarletCompactification(n).verify()
    return CheckOutcome(True)


def check_worked_examples(seed: int) -> Outcome:
    bad = [r.check_id for r in worked_examples() if r.failed]
    return CheckOutcome(not bad, {"failed": bad})


def _registry() -> list[Check]:
    c = Check
    return [
        c("axioms", ("M1-M3",), check_axioms),
        c("walls-oracle", (), check_walls_oracle),
        c("rank-oracle", ("d:MedianRank",), check_rank_oracle),
        c("gate-retraction", ("l:compositionOFgates",), check_gate_retraction),
        c("hom-image-chain", ("l:HomImageChain",), check_hom_image_chain),
        c("conservative", ("r:linear",), check_conservative),
        c("branch-convexity", ("l:ConvexFibers", "d:MedianBranch"), check_branch_convexity),
        c("branch-equivalence", ("lem:branch_equiv",), check_branch_equiv),
        c("subbasic-stars", ("l:SubbasicStars",), check_subbasic_stars),
        c("preimage-rays", ("l:PreimageRays",), check_preimage_rays),
        c("initial-uniformity", ("t:InitialUniformity", "d:StarMedianUniformity"),
          check_initial_uniformity),
        c("cover-axioms", ("d:cov-unif",), check_cover_axioms),
        c("adjacent-subbase", (), check_adjacent_subbase),
        c("uniform-median", ("t:UniformMedian", "d:median-compatible"), check_uniform_median),
        c("chain-solvable", ("thm:chain_solvable", "l:medT2Hausdorff", "d:medT2",
                             "d:chain-solvable"), check_chain_solvable),
        c("discrete-cv", ("t:DISCRETEisCV",), check_discrete_cv),
        c("finite-rank", ("t:FiniteRankHausd", "r:EMBEDDING", "d:WallOrientation"),
          check_finite_rank),
        c("lots", ("p:LOTS_case", "l:LOTSSubbase", "f:DedekindUniformityInternal"), check_lots),
        c("mmc-convex", ("p:MMCconvex",), check_mmc_convex),
        c("topology-equivalence", ("rem:topology_equivalence", "l:BranchesSubbaseTauM"),
          check_topology_equivalence),
        c("rf-comparison", ("p:RFandMMC",), check_rf_comparison),
        c("discrete-criterion", ("prop:topologically_discrete_criterion",),
          check_discrete_criterion),
        c("geometric-branching", ("d:FiniteBranching", "t:CoincidenceTopologies"),
          check_geometric_branching),
        c("metric", ("ex:MedianMetric",), check_metric),
        c("fingerprint", ("p:MetrizableCountableMMC",), check_fingerprint),
        c("roller", ("thm:unique_compactification", "t:MMC"), check_roller),
        c("product", ("p:UmProduct", "p:T2product", "c:MMCProduct"), check_product),
        c("equivariance", ("t:Gcompactification",), check_equivariance),
        c("chain-essential", ("r:chain_essential",), check_chain_essential),
        c("integer-line", ("t:MedPretreeMMC",), check_integer_line, "global"),
        c("integer-power", ("cor:Rn",), check_integer_power, "global"),
        c("periodic", ("ex:PERIODIC",), check_periodic, "global"),
        c("starlet-scaling", ("ex:starlet", "ex:MetricHedgehog"), check_starlet_scaling, "global"),
        c("worked-examples", ("ex:ChainEssentiality",), check_worked_examples, "global"),
    ]


REGISTRY: tuple[Check, ...] = tuple(_registry())
CHECKS = {chk.id: chk for chk in REGISTRY}


def select_checks(names: Iterable[str] | None) -> list[Check]:
    if names is None:
        return list(REGISTRY)
    out = []
    for name in names:
        if name not in CHECKS:
            raise KeyError(f"unknown check {name!r}; known: {', '.join(CHECKS)}")
        out.append(CHECKS[name])
    return out


# -- execution -------------------------------------------------------------------------------

def _run_one(chk: Check, inst: Instance | None, seed: int) -> TheoremReport:
    inst_id = inst.id if inst is not None else GLOBAL_ID
    start = time.perf_counter()
    try:
        out = chk.run(inst, seed) if inst is not None else chk.run(seed)
    except Exception as exc:          # a broken instance must not take the run down
        out = CheckOutcome(False, {"error": f"{type(exc).__name__}: {exc}"}, "error")
        verdict = "error"
    else:
        verdict = "n/a" if out is None else ("pass" if out.holds else "fail")
    elapsed = time.perf_counter() - start
    if out is None:
        return TheoremReport(chk.id, chk.anchors, inst_id, verdict, seconds=elapsed)
    report = TheoremReport(chk.id, chk.anchors, inst_id, verdict,
                           out.witness if verdict != "pass" or out.witness else None,
                           "error" if verdict == "error" else out.mode, out.samples, elapsed)
    if report.failed and inst is not None:
        report.algebra = algebra_to_dict(inst.algebra)
    return report


def _run_instance(args) -> list[TheoremReport]:
    inst, check_ids, seed = args
    return [_run_one(CHECKS[cid], inst, _seed(seed, cid, inst.id)) for cid in check_ids]


def default_threads() -> int:
    env = os.environ.get("MEDALG_THREADS")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ValueError(f"MEDALG_THREADS must be a positive integer, got {env!r}") from None
        if value < 1:
            raise ValueError(f"MEDALG_THREADS must be a positive integer, got {env!r}")
        return value
    return os.cpu_count() or 1


def run_registry(corpus: Sequence[Instance], checks: Iterable[str] | None = None, *,
                 seed: int = 42, threads: int | None = None,
                 include_global: bool = True) -> list[TheoremReport]:
    """Run the selected checks over the corpus and merge by (check id, instance id).

    Global checks run once when the corpus is nonempty.
    """
    selected = select_checks(checks)
    if not corpus:
        return []
    per_instance = [c.id for c in selected if c.scope == "instance"]
    workers = threads if threads is not None else default_threads()
    tasks = [(inst, per_instance, seed) for inst in corpus]
    reports: list[TheoremReport] = []
    if per_instance:
        if workers <= 1 or len(tasks) == 1:
            for task in tasks:
                reports.extend(_run_instance(task))
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for part in pool.map(_run_instance, tasks, chunksize=8):
                    reports.extend(part)
    if include_global:
        for chk in selected:
            if chk.scope == "global":
                reports.append(_run_one(chk, None, _seed(seed, chk.id)))
    reports.sort(key=lambda r: (r.check_id, r.instance_id))
    return reports


@dataclass
class Summary:
    rows: dict = field(default_factory=dict)

    @property
    def failures(self) -> int:
        return sum(r["fail"] + r["error"] for r in self.rows.values())


def summarise(reports: Sequence[TheoremReport]) -> Summary:
    rows: dict[str, dict[str, int]] = {}
    for r in reports:
        row = rows.setdefault(r.check_id, {"pass": 0, "fail": 0, "error": 0, "n/a": 0})
        row[r.verdict] += 1
    return Summary(dict(sorted(rows.items())))


def format_summary(summary: Summary) -> str:
    width = max([len(k) for k in summary.rows] + [5])
    lines = [f"{'check':<{width}}  {'pass':>5} {'fail':>5} {'error':>5} {'n/a':>5}"]
    for cid, row in summary.rows.items():
        lines.append(f"{cid:<{width}}  {row['pass']:>5} {row['fail']:>5} "
                     f"{row['error']:>5} {row['n/a']:>5}")
    lines.append(f"failures: {summary.failures}")
    return "\n".join(lines)


def write_reproducers(reports: Sequence[TheoremReport], directory) -> list[str]:
    """One self-contained algebra file per failing (check, instance)."""
    from pathlib import Path
    out = []
    path = Path(directory)
    for r in reports:
        if r.failed and r.algebra is not None:
            path.mkdir(parents=True, exist_ok=True)
            target = path / f"{r.check_id}--{r.instance_id}.json"
            target.write_text(json.dumps({"check": r.check_id, "witness": jsonable(r.witness),
                                          "algebra": r.algebra}, indent=1, sort_keys=True))
            out.append(str(target))
    return out


# -- fixed worked examples -----------------------------------------------------------------------

def _labels(a: FiniteMedianAlgebra, mask: int) -> set[tuple[int, ...]]:
    return {a.labels[i] for i in bits.members(mask)}


def cube3_shadow_sets() -> dict[str, set[tuple[int, ...]]]:
    """Shadows and branches of ``y`` seen from ``x`` and from ``z`` in the 3-cube."""
    a = make_hypercube(3)
    x, y, z = a.index_of((0, 0, 0)), a.index_of((1, 1, 0)), a.index_of((1, 0, 0))
    return {
        "S(x,y)": _labels(a, shadow(a, y, x)),
        "B(x,y)": _labels(a, branch(a, y, x)),
        "S(z,y)": _labels(a, shadow(a, y, z)),
        "B(z,y)": _labels(a, branch(a, y, z)),
    }


CUBE3_EXPECTED = {
    "S(x,y)": {(1, 1, 0), (1, 1, 1)},
    "B(x,y)": {(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 0, 1), (0, 1, 1)},
    "S(z,y)": {(0, 1, 0), (1, 1, 0), (0, 1, 1), (1, 1, 1)},
    "B(z,y)": {(0, 0, 0), (1, 0, 0), (0, 0, 1), (1, 0, 1)},
}


def square_nonconvex() -> dict:
    a = make_hypercube(2)
    u, v = a.index_of((0, 0)), a.index_of((1, 1))
    x, y = a.index_of((1, 0)), a.index_of((0, 1))
    half_open = a.interval_mask(u, v) & ~(1 << v)
    return {
        "median": a.labels[a.med(x, v, y)],
        "half_open": _labels(a, half_open),
        "branch_is_half_open": branch(a, v, u) == half_open,
        "convex": is_convex(a, half_open),
    }


def worked_examples() -> list[TheoremReport]:
    out = []

    def record(cid: str, anchors: tuple[str, ...], ok: bool, witness=None) -> None:
        out.append(TheoremReport(cid, anchors, GLOBAL_ID, "pass" if ok else "fail",
                                 None if ok else witness))

    sets = cube3_shadow_sets()
    record("example:cube3-shadows", ("ex:ChainEssentiality",), sets == CUBE3_EXPECTED, sets)
    sq = square_nonconvex()
    ok = (sq["median"] == (1, 1) and sq["half_open"] == {(0, 0), (1, 0), (0, 1)}
          and sq["branch_is_half_open"] and not sq["convex"])
    record("example:square-nonconvex", ("r:chain_essential",), ok, sq)
    a = make_starlet(5)
    leaves = range(1, 6)
    ok = all(a.med(i, j, k) == 0 for i, j, k in itertools.combinations(leaves, 3))
    record("example:starlet-medians", ("ex:starlet",), ok)
    ok = all(bits.count(a.interval_mask(p, q)) <= 3 for p in range(a.n) for q in range(a.n))
    record("example:starlet-intervals", ("ex:starlet",), ok)
    # the three mutually exclusive star cases on a 3-chain and on the square
    ok = bool(star_trichotomy_check(a)) and bool(star_trichotomy_check(make_hypercube(2)))
    record("example:subbasic-star-cases", ("l:SubbasicStars",), ok)
    return sorted(out, key=lambda r: r.check_id)


# -- mutation testing ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MutationResult:
    instance_id: str
    entry: tuple[int, int, int]
    old: int
    new: int
    caught_by: str | None


def mutate_table(table: np.ndarray, rng: np.random.Generator) -> tuple[np.ndarray, tuple, int, int]:
    n = table.shape[0]
    t = table.copy()
    a, b, c = (int(v) for v in rng.integers(0, n, size=3))
    old = int(t[a, b, c])
    new = int(rng.integers(0, n - 1))
    new = new if new < old else new + 1
    t[a, b, c] = new
    return t, (a, b, c), old, new


def run_mutants(corpus: Sequence[Instance], count: int = 50, seed: int = 42) -> list[MutationResult]:
    """Corrupt one table entry per mutant; report which detector fired first."""
    rng = np.random.default_rng(seed)
    eligible = [inst for inst in corpus if inst.algebra.n >= 2]
    results = []
    for _ in range(count):
        inst = eligible[int(rng.integers(0, len(eligible)))]
        t, entry, old, new = mutate_table(inst.algebra.table, rng)
        caught = None
        try:
            verify_axioms(inst.algebra.n, t, seed=seed)
        except AxiomViolation as exc:
            caught = f"verify_axioms: {exc}"
        if caught is None:
            mutant = FiniteMedianAlgebra(inst.algebra.n, "table", _table=t)
            reports = run_registry([Instance(inst.id + "-mutant", mutant, inst.family)],
                                   seed=seed, threads=1, include_global=False)
            bad = [r.check_id for r in reports if r.failed]
            caught = bad[0] if bad else None
        results.append(MutationResult(inst.id, entry, old, new, caught))
    return results
