import json
import math

import numpy as np
import pytest

from medalg.algebra import FiniteMedianAlgebra, make_chain, make_hypercube
from medalg.corpus import CorpusSpec, Instance, default_corpus
from medalg.registry import (
    CHECKS,
    STATEMENT_ANCHORS,
    REGISTRY,
    CUBE3_EXPECTED,
    cube3_shadow_sets,
    default_threads,
    format_summary,
    jsonable,
    mutate_table,
    worked_examples,
    reports_to_json,
    run_mutants,
    run_registry,
    select_checks,
    square_nonconvex,
    summarise,
    write_reproducers,
)

SMALL = CorpusSpec(cube_closures=4, grid_closures=4, trees=3, products=3,
                   enumerate_cube3=False, starlets=(3,))


@pytest.fixture(scope="module")
def small_corpus():
    return default_corpus(SMALL)


def test_every_anchor_has_exactly_one_check():
    carried = [a for chk in REGISTRY for a in chk.anchors if a in STATEMENT_ANCHORS]
    assert sorted(carried) == sorted(STATEMENT_ANCHORS)


def test_check_ids_unique_and_scoped():
    assert len(CHECKS) == len(REGISTRY)
    assert {chk.scope for chk in REGISTRY} == {"instance", "global"}


def test_select_unknown_check():
    with pytest.raises(KeyError, match="unknown check"):
        select_checks(["nope"])
    assert [c.id for c in select_checks(["axioms"])] == ["axioms"]


def test_empty_corpus_gives_empty_report():
    assert run_registry([]) == []


def test_small_run_is_green_and_sorted(small_corpus):
    reports = run_registry(small_corpus, threads=1)
    assert not [r for r in reports if r.failed]
    keys = [(r.check_id, r.instance_id) for r in reports]
    assert keys == sorted(keys)
    assert sum(1 for r in reports if r.instance_id == "global") == sum(
        1 for c in REGISTRY if c.scope == "global")


def test_parallel_run_is_deterministic(small_corpus):
    one = run_registry(small_corpus, threads=1)
    two = run_registry(small_corpus, threads=2)
    assert reports_to_json(one, timing=False) == reports_to_json(two, timing=False)


def test_seed_reaches_sampled_checks(small_corpus):
    a = run_registry(small_corpus[:2], ["finite-rank"], seed=1, threads=1)
    b = run_registry(small_corpus[:2], ["finite-rank"], seed=1, threads=1)
    assert reports_to_json(a, timing=False) == reports_to_json(b, timing=False)


def test_failure_embeds_algebra_and_reproducer(tmp_path):
    t = make_chain(3).table.astype(np.int64).copy()
    t[0, 2, 2] = 0
    inst = Instance("broken", FiniteMedianAlgebra(3, "table", _table=t), "table")
    reports = run_registry([inst], ["axioms"], threads=1, include_global=False)
    (rep,) = reports
    assert rep.verdict == "fail" and rep.algebra["kind"] == "table"
    paths = write_reproducers(reports, tmp_path)
    saved = json.loads(open(paths[0]).read())
    assert saved["check"] == "axioms" and saved["algebra"]["n"] == 3
    assert summarise(reports).failures == 1
    assert format_summary(summarise(reports)).endswith("failures: 1")


def test_errors_become_error_verdicts():
    # a corrupted table makes downstream code raise instead of returning
    t = make_chain(3).table.astype(np.int64).copy()
    t[0, 1, 2] = 0
    t[1, 0, 2] = 0
    inst = Instance("bad", FiniteMedianAlgebra(3, "table", _table=t), "table")
    reports = run_registry([inst], threads=1, include_global=False)
    assert any(r.failed for r in reports)
    assert {r.verdict for r in reports} <= {"pass", "fail", "error", "n/a"}


def test_threads_env(monkeypatch):
    monkeypatch.setenv("MEDALG_THREADS", "3")
    assert default_threads() == 3
    monkeypatch.setenv("MEDALG_THREADS", "zero")
    with pytest.raises(ValueError):
        default_threads()
    monkeypatch.setenv("MEDALG_THREADS", "0")
    with pytest.raises(ValueError):
        default_threads()


def test_jsonable_infinities():
    assert jsonable({"p": (math.inf, -math.inf, 1)}) == {"p": ["+inf", "-inf", 1]}
    assert jsonable(frozenset({2, 1})) == [1, 2]


def test_worked_examples_pass():
    assert cube3_shadow_sets() == CUBE3_EXPECTED
    sq = square_nonconvex()
    assert sq["median"] == (1, 1) and not sq["convex"]
    assert all(r.verdict == "pass" for r in worked_examples())


def test_mutate_table_changes_one_entry():
    t = make_hypercube(2).table
    m, entry, old, new = mutate_table(t, np.random.default_rng(0))
    assert (m != t).sum() == 1 and m[entry] == new != old


def test_mutants_caught_on_small_corpus(small_corpus):
    results = run_mutants(small_corpus, count=10, seed=3)
    assert all(r.caught_by for r in results)
