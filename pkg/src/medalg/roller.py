"""Roller coordinates, wall orientations, symbolic compactifications of
integer-line/chain products and starlets, and periodic bi-infinite sequences."""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import reduce
from typing import Sequence, Union

import numpy as np

from . import bits
from .algebra import (
    FiniteMedianAlgebra,
    MedianAlgebraError,
    SizeBoundError,
    closure_mask,
    convex_violation,
    from_median_table,
    from_points,
)
from .walls import Wall, walls

MAX_ORIENTATION_WALLS = 40
MAX_SYMBOLIC_FACTORS = 8
STARLET_TABLE_LIMIT = 8


# -- Roller coordinates -------------------------------------------------------------------

@dataclass(frozen=True)
class RollerEmbedding:
    walls: tuple[Wall, ...]
    vectors: np.ndarray          # vectors[x, i] = 1 when x lies on side_b of wall i
    injective: bool
    median_preserving: bool


def roller_embedding(alg: FiniteMedianAlgebra) -> RollerEmbedding:
    ws = walls(alg)
    n = alg.n
    vec = np.array([bits.to_bool(w.side_b, n) for w in ws], dtype=bool).T.reshape(n, len(ws))
    injective = len({row.tobytes() for row in vec}) == n
    t = alg.table
    mp = True
    for a in range(n):
        va = vec[a][None, None, :]
        vb = vec[:, None, :]
        vc = vec[None, :, :]
        maj = (va & vb) | (vb & vc) | (va & vc)
        if not (maj == vec[t[a]]).all():
            mp = False
            break
    return RollerEmbedding(tuple(ws), vec, injective, mp)


def consistent_orientations(alg: FiniteMedianAlgebra) -> list[tuple[int, ...]]:
    """Every choice of one side per wall with pairwise-meeting choices.

    Entry ``i`` of an orientation is 1 when side_b of wall ``i`` is chosen.
    Choosing a side forces, on every other wall, the side containing it.
    """
    ws = walls(alg)
    w = len(ws)
    if w > MAX_ORIENTATION_WALLS:
        raise SizeBoundError(f"{w} walls exceed orientation bound {MAX_ORIENTATION_WALLS}")
    sides = [(wl.side_a, wl.side_b) for wl in ws]
    found: list[tuple[int, ...]] = []

    def propagate(choice: list[int], i: int, s: int) -> list[int] | None:
        new = list(choice)
        new[i] = s
        queue = [i]
        while queue:
            j = queue.pop()
            chosen = sides[j][new[j]]
            for k in range(w):
                if new[k] >= 0:
                    if not chosen & sides[k][new[k]]:
                        return None
                    continue
                meets = [bool(chosen & sides[k][b]) for b in (0, 1)]
                if not any(meets):
                    return None
                if meets[0] != meets[1]:
                    new[k] = 0 if meets[0] else 1
                    queue.append(k)
        return new

    def extend(choice: list[int]) -> None:
        try:
            i = choice.index(-1)
        except ValueError:
            found.append(tuple(choice))
            return
        for s in (0, 1):
            nxt = propagate(choice, i, s)
            if nxt is not None:
                extend(nxt)

    if w == 0:
        return [()]
    extend([-1] * w)
    return sorted(found)


# -- symbolic compactifications ---------------------------------------------------------------

INF = math.inf
Coord = Union[int, float]


@dataclass(frozen=True)
class FiniteChain:
    length: int

    def contains(self, v: Coord) -> bool:
        return isinstance(v, int) and 0 <= v < self.length

    def describe(self) -> str:
        return f"chain:{self.length}"


@dataclass(frozen=True)
class IntegerLine:
    def contains(self, v: Coord) -> bool:
        return isinstance(v, int) or v in (INF, -INF)

    def describe(self) -> str:
        return "zline"


Factor = Union[FiniteChain, IntegerLine]


def _med1(a: Coord, b: Coord, c: Coord) -> Coord:
    return max(min(a, b), min(max(a, b), c))


def format_coord(v: Coord) -> str:
    if v == INF:
        return "+inf"
    if v == -INF:
        return "-inf"
    return str(v)


def format_point(p: Sequence[Coord]) -> str:
    inner = ",".join(format_coord(v) for v in p)
    return inner if len(p) == 1 else f"({inner})"


@dataclass(frozen=True)
class SymbolicCompactification:
    """Compactified product: integer lines gain the two ends, chains stay as they are."""

    factors: tuple[Factor, ...]

    def contains(self, p: Sequence[Coord]) -> bool:
        return len(p) == len(self.factors) and all(f.contains(v) for f, v in zip(self.factors, p))

    def _check(self, p: Sequence[Coord]) -> None:
        if not self.contains(p):
            raise MedianAlgebraError(f"{format_point(p)} is not a point of {self.describe()}")

    def is_boundary(self, p: Sequence[Coord]) -> bool:
        self._check(p)
        return any(isinstance(v, float) and math.isinf(v) for v in p)

    def median(self, a: Sequence[Coord], b: Sequence[Coord], c: Sequence[Coord]) -> tuple:
        for p in (a, b, c):
            self._check(p)
        return tuple(_med1(x, y, z) for x, y, z in zip(a, b, c))

    def describe(self) -> str:
        return " x ".join(f.describe() for f in self.factors)

    @property
    def infinite_axes(self) -> list[int]:
        return [i for i, f in enumerate(self.factors) if isinstance(f, IntegerLine)]

    def boundary_corners(self) -> list[tuple]:
        """Boundary points with every line coordinate infinite and chain coordinates at ends."""
        per_axis = []
        for f in self.factors:
            if isinstance(f, IntegerLine):
                per_axis.append((-INF, INF))
            else:
                per_axis.append(tuple(sorted({0, f.length - 1})))
        return [p for p in itertools.product(*per_axis) if self.infinite_axes]

    def boundary_report(self) -> str:
        axes = self.infinite_axes
        if not axes:
            return "boundary: {} (empty; every factor is a finite chain)"
        if len(self.factors) == 1:
            return "boundary: {-inf, +inf} (2 ends)"
        corners = self.boundary_corners()
        shown = ", ".join(format_point(p) for p in corners)
        return (f"boundary: points with a coordinate in {{-inf, +inf}} on axes "
                f"{', '.join(str(i) for i in axes)} (infinite set); "
                f"{len(corners)} corner points: {shown}")

    def sample_points(self, count: int, rng: np.random.Generator, span: int = 6) -> list[tuple]:
        pts = []
        for _ in range(count):
            p = []
            for f in self.factors:
                if isinstance(f, IntegerLine):
                    r = int(rng.integers(-span - 2, span + 3))
                    p.append(-INF if r < -span else INF if r > span else r)
                else:
                    p.append(int(rng.integers(0, f.length)))
            pts.append(tuple(p))
        return pts


def symbolic_mmc(factors: Sequence[Factor]) -> SymbolicCompactification:
    if not 1 <= len(factors) <= MAX_SYMBOLIC_FACTORS:
        raise MedianAlgebraError(f"need 1..{MAX_SYMBOLIC_FACTORS} factors, got {len(factors)}")
    return SymbolicCompactification(tuple(factors))


@dataclass(frozen=True)
class StarletCompactification:
    """Centre, ``n`` leaves and one extra point ``omega`` acting as the limit of leaves.

    Index 0 is the centre, 1..n the leaves, n+1 is omega.
    """

    leaves: int

    @property
    def size(self) -> int:
        return self.leaves + 2

    @property
    def omega(self) -> int:
        return self.leaves + 1

    def median(self, a: int, b: int, c: int) -> int:
        if a == b or a == c:
            return a
        if b == c:
            return b
        return 0

    def table(self) -> np.ndarray:
        s = self.size
        return np.array([[[self.median(a, b, c) for c in range(s)] for b in range(s)]
                         for a in range(s)], dtype=np.int64)

    def verify(self) -> FiniteMedianAlgebra:
        if self.leaves > STARLET_TABLE_LIMIT:
            raise SizeBoundError(f"exhaustive starlet check limited to n <= {STARLET_TABLE_LIMIT}")
        return from_median_table(self.size, self.table(), provenance="table")

    def boundary_report(self) -> str:
        return (f"boundary: {{omega}} (1 point); carrier = centre + {self.leaves} leaves + omega, "
                f"the one-point compactification of the leaf set")


_TOKEN = re.compile(r"^(zline|chain:(\d+))(?:\^(\d+))?$")


def parse_symbolic(spec: str) -> SymbolicCompactification | StarletCompactification:
    """Parse ``zline``, ``chain:k``, powers ``^n`` and ``x``-separated products,
    or ``starlet:n``."""
    text = spec.strip()
    m = re.fullmatch(r"starlet:(\d+)", text)
    if m:
        n = int(m.group(1))
        if n < 1:
            raise MedianAlgebraError("starlet needs at least one leaf")
        return StarletCompactification(n)
    factors: list[Factor] = []
    for part in re.split(r"\s+x\s+", text):
        tok = _TOKEN.match(part.strip())
        if not tok:
            raise MedianAlgebraError(f"cannot parse symbolic factor {part.strip()!r}")
        if tok.group(2) is not None:
            k = int(tok.group(2))
            if k < 1:
                raise MedianAlgebraError("chain length must be positive")
            factor: Factor = FiniteChain(k)
        else:
            factor = IntegerLine()
        power = int(tok.group(3)) if tok.group(3) else 1
        if power < 1:
            raise MedianAlgebraError("power must be positive")
        factors.extend([factor] * power)
    return symbolic_mmc(factors)


def parse_point(text: str) -> tuple:
    vals = []
    for tok in text.strip().strip("()").split(","):
        tok = tok.strip()
        if tok in ("+inf", "inf"):
            vals.append(INF)
        elif tok == "-inf":
            vals.append(-INF)
        else:
            try:
                vals.append(int(tok))
            except ValueError:
                raise MedianAlgebraError(f"bad coordinate {tok!r}") from None
    return tuple(vals)


def symbolic_axiom_check(comp: SymbolicCompactification, samples: int = 100_000,
                         seed: int = 0) -> bool:
    """M1-M3 of the coordinatewise extended median on random points."""
    rng = np.random.default_rng(seed)
    d = len(comp.factors)
    cols = []
    for f in comp.factors:
        if isinstance(f, IntegerLine):
            raw = rng.integers(-8, 9, size=(samples, 4)).astype(float)
            raw[raw == -8] = -INF
            raw[raw == 8] = INF
        else:
            raw = rng.integers(0, f.length, size=(samples, 4)).astype(float)
        cols.append(raw)
    pts = np.stack(cols, axis=2)                       # (samples, 4, d)
    a, b, c, e = (pts[:, i, :] for i in range(4))

    def med(x, y, z):
        return np.maximum(np.minimum(x, y), np.minimum(np.maximum(x, y), z))

    m = med(a, b, c)
    m1 = all((med(*p) == m).all() for p in itertools.permutations((a, b, c)))
    m2 = (med(a, b, b) == b).all()
    m3 = (med(med(a, b, e), c, e) == med(med(a, c, e), b, e)).all()
    return bool(m1 and m2 and m3 and d > 0)


# -- truncations ----------------------------------------------------------------------------

def truncation(factors: Sequence[Factor], r: int) -> FiniteMedianAlgebra:
    """The finite product with each integer line cut down to ``[-r, r]``.

    Labels are shifted so coordinates start at 0; ``truncation_label`` undoes it.
    """
    lengths = [2 * r + 1 if isinstance(f, IntegerLine) else f.length for f in factors]
    pts = list(itertools.product(*(range(k) for k in lengths)))
    return from_points(lengths, pts, provenance="product", verify=False)


def _shift(factors: Sequence[Factor], r: int, p: Sequence[Coord]) -> tuple:
    return tuple(v + r if isinstance(f, IntegerLine) else v for f, v in zip(factors, p))


def _clamp(factors: Sequence[Factor], r: int, p: Sequence[Coord]) -> tuple:
    out = []
    for f, v in zip(factors, p):
        if isinstance(f, IntegerLine):
            out.append(int(max(-r, min(r, v))))
        else:
            out.append(v)
    return tuple(out)


@dataclass(frozen=True)
class TruncationReport:
    holds: bool
    clause: str = ""
    detail: object = None


def truncation_consistency(factors: Sequence[Factor], r: int) -> TruncationReport:
    """Compare the ``r``- and ``(r+1)``-truncations and the traces of boundary points."""
    if r < 1:
        raise MedianAlgebraError("r must be at least 1")
    small = truncation(factors, r)
    big = truncation(factors, r + 1)
    embed = [big.index_of(_shift(factors, r + 1, _unshift(factors, r, small.labels[i])))
             for i in range(small.n)]
    image = bits.from_indices(embed)
    if closure_mask(big, embed) != image or convex_violation(big, image) is not None:
        return TruncationReport(False, "convex subalgebra")
    # halfspace traces
    small_walls = {w.side_a: w for w in walls(small)}
    pulled = set()
    back = {b: i for i, b in enumerate(embed)}
    for w in walls(big):
        trace = bits.from_indices(back[b] for b in bits.members(w.side_a & image))
        if trace in (0, small.carrier):
            continue
        key = trace if trace & 1 else small.carrier & ~trace
        if key not in small_walls:
            return TruncationReport(False, "wall trace", w)
        pulled.add(key)
    if pulled != set(small_walls):
        return TruncationReport(False, "every wall is a trace")
    rs, rb = roller_embedding(small), roller_embedding(big)
    if not (rs.injective and rs.median_preserving and rb.injective and rb.median_preserving):
        return TruncationReport(False, "roller embedding")
    # boundary points induce the orientation of the nearest corner
    comp = symbolic_mmc(factors)
    choices = []
    for f in factors:
        if isinstance(f, IntegerLine):
            choices.append((-INF, INF, 0, r + 2))
        else:
            choices.append(tuple(range(f.length)))
    for p in itertools.product(*choices):
        if not comp.is_boundary(p):
            continue
        for alg, rad in ((small, r), (big, r + 1)):
            corner = alg.index_of(_shift(factors, rad, _clamp(factors, rad, p)))
            shifted = _shift(factors, rad, p)
            for w in walls(alg):
                axis, cut, upper_side = _wall_cut(alg, w)
                if bool(upper_side >> corner & 1) != (shifted[axis] > cut):
                    return TruncationReport(False, "boundary trace", format_point(p))
        inner = small.index_of(_shift(factors, r, _clamp(factors, r, p)))
        outer = big.index_of(_shift(factors, r + 1, _clamp(factors, r + 1, p)))
        if big.med(embed[0], outer, embed[-1]) != embed[inner]:
            return TruncationReport(False, "corner gate", format_point(p))
    return TruncationReport(True)


def _unshift(factors: Sequence[Factor], r: int, label: Sequence[int]) -> tuple:
    return tuple(v - r if isinstance(f, IntegerLine) else v for f, v in zip(factors, label))


def _wall_cut(alg: FiniteMedianAlgebra, w: Wall) -> tuple[int, float, int]:
    """Axis, threshold and upper side of a wall of a full grid."""
    la = np.array([alg.labels[i] for i in bits.members(w.side_a)])
    lb = np.array([alg.labels[i] for i in bits.members(w.side_b)])
    for axis in range(la.shape[1]):
        if la[:, axis].max() < lb[:, axis].min():
            return axis, la[:, axis].max() + 0.5, w.side_b
        if lb[:, axis].max() < la[:, axis].min():
            return axis, lb[:, axis].max() + 0.5, w.side_a
    raise MedianAlgebraError("wall is not an axis cut")


# -- periodic bi-infinite sequences ------------------------------------------------------------

@dataclass(frozen=True)
class PeriodicBiSequence:
    """Bi-infinite 0/1 sequence ``s[i] = pattern[i mod p]`` with ``p`` minimal."""

    pattern: tuple[int, ...]

    def __post_init__(self):
        if not self.pattern or any(b not in (0, 1) for b in self.pattern):
            raise MedianAlgebraError("pattern must be a nonempty 0/1 sequence")
        if minimal_pattern(self.pattern) != self.pattern:
            raise MedianAlgebraError("pattern is not in minimal-period form")

    @classmethod
    def from_pattern(cls, pattern: Sequence[int] | str) -> "PeriodicBiSequence":
        if isinstance(pattern, str):
            if not pattern or set(pattern) - {"0", "1"}:
                raise MedianAlgebraError(f"bad bit pattern {pattern!r}")
            pattern = [int(ch) for ch in pattern]
        return cls(minimal_pattern(tuple(pattern)))

    @property
    def period(self) -> int:
        return len(self.pattern)

    def __getitem__(self, i: int) -> int:
        return self.pattern[i % self.period]

    def window(self, length: int) -> tuple[int, ...]:
        return tuple(self[i] for i in range(length))

    def __str__(self) -> str:
        return "".join(map(str, self.pattern))


def minimal_pattern(pattern: tuple[int, ...]) -> tuple[int, ...]:
    p = len(pattern)
    for d in range(1, p + 1):
        if p % d == 0 and pattern == pattern[:d] * (p // d):
            return pattern[:d]
    return pattern


def _lcm(*periods: int) -> int:
    return reduce(math.lcm, periods, 1)


def periodic_median(x: PeriodicBiSequence, y: PeriodicBiSequence,
                    z: PeriodicBiSequence) -> PeriodicBiSequence:
    n = _lcm(x.period, y.period, z.period)
    return PeriodicBiSequence.from_pattern(
        [1 if x[i] + y[i] + z[i] >= 2 else 0 for i in range(n)])


def periodic_interval_member(x: PeriodicBiSequence, y: PeriodicBiSequence,
                             z: PeriodicBiSequence) -> bool:
    n = _lcm(x.period, y.period, z.period)
    return all(z[i] == x[i] for i in range(n) if x[i] == y[i])


def periodic_square_witness(x: PeriodicBiSequence, y: PeriodicBiSequence
                            ) -> tuple[PeriodicBiSequence, ...]:
    """Four sequences in ``[x, y]`` forming a 2-cube, ordered ``z00, z01, z10, z11``."""
    if x == y:
        raise MedianAlgebraError("square witness needs distinct sequences")
    n = _lcm(x.period, y.period)
    diff = [i for i in range(n) if x[i] != y[i]]
    if len(diff) >= 2:
        i, j = diff[0], diff[1]
    else:
        n *= 2
        i, j = diff[0], diff[0] + n // 2
    square = []
    for a, b in ((0, 0), (0, 1), (1, 0), (1, 1)):
        w = list(x.window(n))
        if a:
            w[i] = y[i]
        if b:
            w[j] = y[j]
        square.append(PeriodicBiSequence.from_pattern(w))
    if not verify_periodic_square(x, y, square):
        raise MedianAlgebraError("square witness failed verification")
    return tuple(square)


def verify_periodic_square(x: PeriodicBiSequence, y: PeriodicBiSequence,
                           square: Sequence[PeriodicBiSequence]) -> bool:
    z00, z01, z10, z11 = square
    if len(set(square)) != 4:
        return False
    if not all(periodic_interval_member(x, y, z) for z in square):
        return False
    return (periodic_median(z01, z10, z00) == z00 and periodic_median(z01, z10, z11) == z11
            and periodic_median(z00, z11, z01) == z01 and periodic_median(z00, z11, z10) == z10)


def periodic_interval_is_chain(x: PeriodicBiSequence, y: PeriodicBiSequence) -> bool:
    """Chain test on ``[x, y]`` through its square witness: ``z01`` and ``z10``
    are incomparable in the order based at ``z00``."""
    if x == y:
        return True
    z00, z01, z10, _ = periodic_square_witness(x, y)
    m = periodic_median(z00, z01, z10)
    return m in (z01, z10)
