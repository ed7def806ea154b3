import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nessgraph.criteria import (
    CRITERIA,
    AnalysisOptions,
    AnalysisReport,
    CriterionVerdict,
    evaluate_all,
    yoshida_verdict,
)
from nessgraph.errors import ModelFormatError
from nessgraph.lattice import chain, effective_generator, generator_set
from nessgraph.linalg import local_operator

from .conftest import random_generator_set

SM = local_operator("sigma_minus")
SX = local_operator("sigma_x")
SZ = local_operator("sigma_z")
Z2 = np.zeros((2, 2))


def statuses(report):
    return {v.name: v.status for v in report.verdicts}


def test_self_adjoint_jump():
    r = evaluate_all(effective_generator(SZ, [SX]))
    assert r.verdict("yoshida_graph").status == "satisfied"
    assert r.verdict("yoshida_graph").implies_faithful_uniqueness
    assert r.oracle["kernel_dim"] == 1
    assert np.allclose(r.oracle["state_eigenvalues"], [0.5, 0.5])
    assert r.consistent


def test_dephasing(dephasing):
    r = evaluate_all(dephasing)
    assert "satisfied" not in statuses(r).values()
    assert r.oracle["kernel_dim"] == 2
    assert r.consistent


def test_two_site_chain(chain2):
    r = evaluate_all(chain2)
    s = statuses(r)
    assert s["bicommutant"] == "satisfied"
    assert s["yoshida_graph"] == "satisfied"
    assert s["extended_commutant"] == "satisfied"
    assert r.oracle["kernel_dim"] == 1 and r.oracle["faithful"]
    assert r.digraph == {"vertices": 4, "edges": 10, "scc_count": 1}
    assert r.consistent


def test_verdict_order_and_vocabulary(chain2):
    r = evaluate_all(chain2)
    assert tuple(v.name for v in r.verdicts) == CRITERIA
    for v in r.verdicts:
        if v.status != "satisfied":
            assert not v.implies_uniqueness
            assert not v.implies_faithful_uniqueness
    with pytest.raises(ValueError):
        CriterionVerdict("kossakowski_kernel", "unique")
    with pytest.raises(ValueError):
        CriterionVerdict("criterion_4", "satisfied")


def test_extended_commutant_needs_oracle(chain2):
    r = evaluate_all(chain2, oracle="off")
    assert r.oracle is None and r.consistency is None
    v = r.verdict("extended_commutant")
    assert v.status == "inconclusive"
    assert v.evidence["commutant_dim"] == 1


def test_extended_commutant_without_faithful_state():
    r = evaluate_all(effective_generator(Z2, [SM]))
    assert r.verdict("extended_commutant").status == "inconclusive"
    assert r.verdict("bicommutant").status == "satisfied"
    assert not r.oracle["faithful"]
    assert r.consistent


def test_connected_graph_is_not_proof():
    # D({K, sigma_x}) is strongly connected and sigma_x is nonderogatory,
    # yet the set only generates the diagonal algebra in the x basis
    r = evaluate_all(effective_generator(Z2, [SX]))
    v = r.verdict("yoshida_graph")
    assert v.evidence["graph_strongly_connected"]
    assert v.evidence["nonderogatory_witness"]
    assert v.status == "not_satisfied"
    assert r.oracle["kernel_dim"] == 2
    assert r.consistent


def test_yoshida_without_nonderogatory_element():
    # the all-ones matrix has a complete digraph but eigenvalues (3, 0, 0),
    # so its span holds no nonderogatory element
    gs = effective_generator(np.ones((3, 3)), [])
    v = yoshida_verdict(gs)
    assert v.evidence["graph_strongly_connected"]
    assert not v.evidence["nonderogatory_witness"]
    assert v.status == "inconclusive"
    assert "nonderogatory" in v.evidence["reason"]
    assert v.evidence["generated_algebra_dim"] == 1
    assert not v.implies_uniqueness


def test_detuned_chain():
    r = evaluate_all(generator_set(chain(3, delta_x=0.0)))
    assert r.verdict("yoshida_graph").status == "not_satisfied"
    assert r.oracle["kernel_dim"] == 1 and not r.oracle["faithful"]
    assert r.consistent


def test_large_model_skips_oracle():
    r = evaluate_all(generator_set(chain(5)), oracle_limit=16)
    assert r.oracle is None
    assert r.verdict("bicommutant").status == "satisfied"
    assert r.verdict("yoshida_graph").status == "satisfied"


def test_failed_stage_is_recorded(chain2):
    r = evaluate_all(chain2, oracle="on", oracle_limit=2)
    assert r.oracle is None
    assert [e["stage"] for e in r.errors] == ["oracle"]
    assert "LimitError" in r.errors[0]["error"]
    assert r.verdict("bicommutant").status == "satisfied"


def test_report_round_trip(chain2):
    r = evaluate_all(chain2, timings=True)
    assert set(r.timings) >= {"oracle", "yoshida_graph"}
    again = AnalysisReport.loads(r.dumps())
    assert again == r
    assert again.dumps() == r.dumps()
    with pytest.raises(ModelFormatError, match="line"):
        AnalysisReport.loads(r.dumps()[:50])
    with pytest.raises(ModelFormatError, match="schema_version"):
        AnalysisReport.from_dict({**r.to_dict(), "schema_version": 99})


def test_report_deterministic(chain2):
    a = evaluate_all(chain2, seed=3).dumps()
    b = evaluate_all(chain2, seed=3).dumps()
    assert a == b
    assert "timings\": null" in a


def test_options_validation():
    with pytest.raises(ValueError):
        AnalysisOptions(oracle="maybe")


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2), st.booleans(),
       st.integers(0, 2 ** 32 - 1))
def test_monotone_consistency(d, k, sparse_pattern, seed):
    rng = np.random.default_rng(seed)
    gs = random_generator_set(rng, d, k)
    if sparse_pattern:
        # zero out entries to create reducible or degenerate models
        mask = rng.random((d, d)) < 0.5
        h = np.where(mask | mask.T, 0, gs.hamiltonian)
        jumps = [np.where(rng.random((d, d)) < 0.6, 0, l) for l in gs.jumps]
        gs = effective_generator(h, jumps)
    r = evaluate_all(gs, seed=seed % 1000)
    assert r.consistent, r.consistency
