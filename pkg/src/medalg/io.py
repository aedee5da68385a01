"""Algebra file format (UTF-8 JSON).

Three kinds are accepted::

    {"kind": "table",  "n": 4, "median": [... n**3 ints, index i*n*n + j*n + k ...]}
    {"kind": "coords", "factors": [2, 3], "points": [[0, 0], [1, 2], ...]}
    {"kind": "graph",  "n": 4, "edges": [[0, 1], [1, 2], ...]}
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .algebra import (
    TABLE_LIMIT,
    FiniteMedianAlgebra,
    MedianAlgebraError,
    adjacent_pairs,
    from_median_table,
    from_points,
    median_graph_from_edges,
)

CLOSURE_SAMPLES = 100_000


class AlgebraFileError(MedianAlgebraError):
    pass


def _require(obj: dict, key: str):
    if key not in obj:
        raise AlgebraFileError(f"missing key {key!r}")
    return obj[key]


def _int(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise AlgebraFileError(f"{what} must be an integer, got {value!r}")
    return value


def algebra_from_dict(obj) -> FiniteMedianAlgebra:
    if not isinstance(obj, dict):
        raise AlgebraFileError("algebra file must hold a JSON object")
    kind = _require(obj, "kind")
    if kind == "table":
        n = _int(_require(obj, "n"), "n")
        median = _require(obj, "median")
        if not isinstance(median, list):
            raise AlgebraFileError("'median' must be an array")
        if n < 1:
            raise AlgebraFileError(f"n must be positive, got {n}")
        if len(median) != n ** 3:
            raise AlgebraFileError(f"'median' must have n^3 = {n ** 3} entries, "
                                   f"got {len(median)}")
        for pos, v in enumerate(median):
            if isinstance(v, bool) or not isinstance(v, int) or not 0 <= v < n:
                i, rest = divmod(pos, n * n)
                j, k = divmod(rest, n)
                raise AlgebraFileError(f"median entry for triple ({i},{j},{k}) is invalid: {v!r}")
        return from_median_table(n, np.array(median, dtype=np.int64))
    if kind == "coords":
        factors = _require(obj, "factors")
        points = _require(obj, "points")
        if not isinstance(factors, list) or not isinstance(points, list):
            raise AlgebraFileError("'factors' and 'points' must be arrays")
        factors = [_int(f, "chain length") for f in factors]
        pts = []
        for p in points:
            if not isinstance(p, list):
                raise AlgebraFileError(f"point {p!r} must be an array")
            pts.append(tuple(_int(c, "coordinate") for c in p))
        alg = from_points(factors, pts, "coords", verify=True)
        if alg.n > TABLE_LIMIT:
            _sampled_closure_check(alg)
        return alg
    if kind == "graph":
        n = _int(_require(obj, "n"), "n")
        edges = _require(obj, "edges")
        if not isinstance(edges, list):
            raise AlgebraFileError("'edges' must be an array")
        clean = []
        for e in edges:
            if not isinstance(e, list) or len(e) != 2:
                raise AlgebraFileError(f"edge {e!r} must be a pair")
            clean.append((_int(e[0], "vertex"), _int(e[1], "vertex")))
        return median_graph_from_edges(n, clean)
    raise AlgebraFileError(f"unknown kind {kind!r} (expected table, coords or graph)")


def _sampled_closure_check(alg: FiniteMedianAlgebra, seed: int = 0) -> None:
    rng = np.random.default_rng(seed)
    triples = rng.integers(0, alg.n, size=(CLOSURE_SAMPLES, 3))
    for a, b, c in triples:
        alg.med(int(a), int(b), int(c))  # raises on a missing median


def algebra_to_dict(alg: FiniteMedianAlgebra) -> dict:
    if alg.is_coords:
        return {"kind": "coords", "factors": list(alg.factors),
                "points": [list(p) for p in alg.labels]}
    if alg.provenance == "graph":
        return {"kind": "graph", "n": alg.n,
                "edges": [[a, b] for a, b in adjacent_pairs(alg)]}
    return {"kind": "table", "n": alg.n,
            "median": [int(v) for v in np.asarray(alg.table).ravel()]}


def dumps(alg: FiniteMedianAlgebra) -> str:
    return json.dumps(algebra_to_dict(alg), separators=(",", ":"), sort_keys=True)


def load(path: str | Path) -> FiniteMedianAlgebra:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise AlgebraFileError(f"cannot read {path}: {exc.strerror}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AlgebraFileError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return algebra_from_dict(obj)


def save(alg: FiniteMedianAlgebra, path: str | Path) -> None:
    Path(path).write_text(dumps(alg) + "\n", encoding="utf-8")
