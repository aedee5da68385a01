import json

import numpy as np
import pytest
from hypothesis import given

from conftest import algebras
from medalg import io
from medalg.algebra import (
    FiniteMedianAlgebra,
    is_isomorphic,
    make_grid,
    make_product,
    make_starlet,
)
from medalg.io import AlgebraFileError, algebra_from_dict, algebra_to_dict


def test_round_trip_kinds(tmp_path):
    table_alg = make_product(make_starlet(2), make_starlet(2))
    for alg, kind in ((make_grid(2, 3), "coords"), (make_starlet(3), "graph"),
                      (table_alg, "table")):
        d = algebra_to_dict(alg)
        assert d["kind"] == kind
        path = tmp_path / f"{kind}.json"
        io.save(alg, path)
        back = io.load(path)
        assert (back.table == alg.table).all()


@pytest.mark.parametrize("obj,match", [
    ([], "JSON object"),
    ({"n": 2}, "missing key 'kind'"),
    ({"kind": "blob"}, "unknown kind"),
    ({"kind": "table", "n": 2, "median": [0] * 7}, "n\\^3"),
    ({"kind": "table", "n": 0, "median": []}, "positive"),
    ({"kind": "table", "n": 1, "median": [3]}, "triple \\(0,0,0\\)"),
    ({"kind": "table", "n": True, "median": [0]}, "integer"),
    ({"kind": "coords", "factors": [2], "points": [[0], [5]]}, "outside"),
    ({"kind": "coords", "factors": [2], "points": [0]}, "array"),
    ({"kind": "graph", "n": 3, "edges": [[0, 1, 2]]}, "pair"),
    ({"kind": "graph", "n": 3, "edges": [[0, 1], [1, 2], [2, 0]]}, "not-median-graph"),
])
def test_bad_files(obj, match):
    with pytest.raises(Exception, match=match):
        algebra_from_dict(obj)


def test_table_m2_violation_in_file():
    with pytest.raises(Exception, match="M2"):
        algebra_from_dict({"kind": "table", "n": 2, "median": [0] * 8})


def test_load_errors(tmp_path):
    with pytest.raises(AlgebraFileError, match="cannot read"):
        io.load(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    with pytest.raises(AlgebraFileError, match="invalid JSON"):
        io.load(bad)


@given(algebras())
def test_dumps_round_trip(alg):
    back = algebra_from_dict(json.loads(io.dumps(alg)))
    assert back.n == alg.n
    assert is_isomorphic(back, alg)
    table_only = FiniteMedianAlgebra(alg.n, "table", _table=np.asarray(alg.table))
    again = algebra_from_dict(json.loads(io.dumps(table_only)))
    assert (again.table == alg.table).all()
