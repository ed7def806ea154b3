"""
Uniqueness verdict pipeline.

Every criterion here is sufficient (criterion 3 is also necessary, given a
faithful state), so a verdict of ``not_satisfied`` never claims that the
stationary state is degenerate.  Only ``satisfied`` carries a claim, and
that claim is cross-checked against the Liouvillian oracle whenever the
oracle runs.
"""

from dataclasses import asdict, dataclass, field
import json
import time
from typing import Optional

import numpy as np

from . import __version__
from .algebra import (
    OperatorSet,
    commutant_dim,
    generated_algebra_dim,
    kossakowski_from_jumps,
    span_has_nonderogatory,
    simple_spectrum_witness,
)
from .errors import InconsistencyError, ModelFormatError, NessError
from .graph import SUPPORT_TOL, scc, support_digraph
from .linalg import dagger
from .oracle import (
    ORACLE_DIM_LIMIT,
    steady_states,
    vectorize_liouvillian,
    verify_against_criteria,
)

__all__ = [
    "REPORT_SCHEMA_VERSION",
    "CRITERIA",
    "CriterionVerdict",
    "AnalysisReport",
    "AnalysisOptions",
    "evaluate_all",
    "yoshida_verdict",
]

REPORT_SCHEMA_VERSION = 1
CRITERIA = ("kossakowski_kernel", "bicommutant", "extended_commutant",
            "yoshida_graph")
STATUSES = ("satisfied", "not_satisfied", "inconclusive")

# Above this dimension the d^2-dimensional algebra closure is skipped.
ALGEBRA_DIM_LIMIT = 16


@dataclass
class CriterionVerdict:
    name: str
    status: str
    implies_uniqueness: bool = False
    implies_faithful_uniqueness: bool = False
    evidence: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in CRITERIA:
            raise ValueError(f"unknown criterion {self.name!r}")
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")


@dataclass
class AnalysisOptions:
    tol: float = SUPPORT_TOL
    oracle: str = "auto"
    seed: int = 0
    trials: int = 8
    oracle_limit: int = ORACLE_DIM_LIMIT
    algebra_limit: int = ALGEBRA_DIM_LIMIT
    timings: bool = False
    strict: bool = False

    def __post_init__(self):
        if self.oracle not in ("auto", "on", "off"):
            raise ValueError("oracle must be 'auto', 'on' or 'off'")


@dataclass
class AnalysisReport:
    model: dict
    digraph: dict
    verdicts: list
    nonderogatory: dict
    oracle: Optional[dict] = None
    consistency: Optional[dict] = None
    errors: list = field(default_factory=list)
    parameters: dict = field(default_factory=dict)
    timings: Optional[dict] = None
    seed: int = 0
    tool_version: str = __version__
    schema_version: int = REPORT_SCHEMA_VERSION

    def verdict(self, name):
        for v in self.verdicts:
            if v.name == name:
                return v
        raise KeyError(name)

    @property
    def consistent(self):
        return self.consistency is None or self.consistency["consistent"]

    def to_dict(self):
        d = asdict(self)
        return _plain(d)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if d.get("schema_version") != REPORT_SCHEMA_VERSION:
            raise ModelFormatError(
                f"unsupported report schema_version "
                f"{d.get('schema_version')!r}")
        d["verdicts"] = [CriterionVerdict(**v) for v in d["verdicts"]]
        return cls(**d)

    def dumps(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def loads(cls, text):
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"invalid report: {exc.msg}",
                                   exc.lineno, exc.colno) from exc


def _plain(obj):
    # numpy scalars and tuples into JSON-native types
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    return obj


def _criterion1(gs):
    d = gs.dim
    if gs.jumps:
        kmat = kossakowski_from_jumps(gs.jumps)
        kernel = kmat.kernel_dim()
    else:
        kernel = d * d - 1
    ok = kernel < d / 2
    return CriterionVerdict(
        "kossakowski_kernel", "satisfied" if ok else "not_satisfied",
        implies_uniqueness=ok,
        evidence={"kernel_dim": kernel, "threshold": d / 2})


def _criterion2(gs):
    if gs.jumps:
        cdim = commutant_dim(OperatorSet.of(gs.jumps, with_adjoints=True))
    else:
        cdim = gs.dim * gs.dim
    ok = cdim == 1
    return CriterionVerdict(
        "bicommutant", "satisfied" if ok else "not_satisfied",
        implies_uniqueness=ok, evidence={"commutant_dim": cdim})


def _criterion3_commutant(gs):
    members = [gs.hamiltonian, *gs.jumps, *(dagger(l) for l in gs.jumps)]
    return commutant_dim(OperatorSet.of(members))


def _criterion3(cdim, oracle_result):
    ev = {"commutant_dim": cdim}
    if cdim != 1:
        return CriterionVerdict("extended_commutant", "not_satisfied",
                                evidence=ev)
    if oracle_result is None:
        ev["reason"] = ("trivial commutant, but no oracle confirmation of a "
                        "faithful stationary state")
        return CriterionVerdict("extended_commutant", "inconclusive",
                                evidence=ev)
    ev["oracle_faithful"] = oracle_result.faithful
    if not oracle_result.faithful:
        ev["reason"] = "no faithful stationary state; criterion does not apply"
        return CriterionVerdict("extended_commutant", "inconclusive",
                                evidence=ev)
    return CriterionVerdict("extended_commutant", "satisfied",
                            implies_uniqueness=True,
                            implies_faithful_uniqueness=True, evidence=ev)


def _eigenbasis_digraph(members, vecs, tol):
    inv = np.linalg.inv(vecs)
    return support_digraph([inv @ m @ vecs for m in members], tol)


def yoshida_verdict(gs, tol=SUPPORT_TOL, trials=8, seed=0,
                    algebra_limit=ALGEBRA_DIM_LIMIT):
    """Does ``{K, L_1, ..., L_m}`` generate the full matrix algebra?

    1. The support digraph in the given basis must be strongly connected;
       otherwise a coordinate subspace is invariant and the answer is no.
    2. Without a nonderogatory element in the span the verdict is
       inconclusive (the closure dimension is attached when cheap).
    3. A random combination of the generators with simple spectrum is
       diagonalizable, and every invariant subspace of the set is spanned by
       its eigenvectors.  So the digraph of the generators written in that
       eigenbasis decides the question exactly.
    4. Without such a witness, the algebra closure decides it when the
       dimension is small enough; else the verdict stays inconclusive.

    Strong connectivity in the original basis plus a nonderogatory element
    of the span is reported as evidence but is not taken as proof.
    """
    members = gs.yoshida_set
    d = gs.dim
    g = support_digraph(members, tol)
    part = scc(g)
    ev = {
        "graph_strongly_connected": part.component_count == 1,
        "scc_count": part.component_count,
        "nonderogatory_witness": bool(
            span_has_nonderogatory(members, trials=trials, seed=seed)),
    }
    if part.component_count != 1:
        return CriterionVerdict("yoshida_graph", "not_satisfied", evidence=ev)
    if d == 1:
        ev["certificate"] = "one-dimensional"
        return CriterionVerdict("yoshida_graph", "satisfied", True, True, ev)

    if not ev["nonderogatory_witness"]:
        if d <= algebra_limit:
            ev["generated_algebra_dim"] = generated_algebra_dim(
                OperatorSet.of(members))
        ev["reason"] = ("strongly connected, but no nonderogatory element "
                        "was found in the span of the generators")
        return CriterionVerdict("yoshida_graph", "inconclusive", evidence=ev)

    witness = simple_spectrum_witness(members, trials=trials, seed=seed)
    ev["simple_spectrum_witness"] = witness is not None
    if witness is not None:
        _, _, vecs = witness
        eg = _eigenbasis_digraph(members, vecs, 1e-8)
        count = scc(eg).component_count
        ev["eigenbasis_scc_count"] = count
        if count == 1:
            ev["certificate"] = "eigenbasis digraph strongly connected"
            return CriterionVerdict("yoshida_graph", "satisfied", True, True,
                                    ev)
        ev["certificate"] = "invariant subspace in witness eigenbasis"
        return CriterionVerdict("yoshida_graph", "not_satisfied", evidence=ev)

    if d <= algebra_limit:
        adim = generated_algebra_dim(OperatorSet.of(members))
        ev["generated_algebra_dim"] = adim
        if adim == d * d:
            ev["certificate"] = "generated algebra is full"
            return CriterionVerdict("yoshida_graph", "satisfied", True, True,
                                    ev)
        ev["certificate"] = "generated algebra is a proper subalgebra"
        return CriterionVerdict("yoshida_graph", "not_satisfied", evidence=ev)
    ev["reason"] = ("strongly connected with a nonderogatory element, but "
                    "no simple-spectrum witness and the algebra closure is "
                    "above the size limit")
    return CriterionVerdict("yoshida_graph", "inconclusive", evidence=ev)


def _oracle_section(lm, res):
    state = res.state
    herm = float(np.abs(state - dagger(state)).max())
    return {
        "kernel_dim": res.kernel_dim,
        "faithful": bool(res.faithful),
        "min_eigenvalue": res.min_eigenvalue,
        "state_eigenvalues": np.linalg.eigvalsh(state).tolist(),
        "state_trace": float(np.trace(state).real),
        "state_hermiticity_residual": herm,
        "kernel_residual": res.residual,
        "trace_erasure_residual": lm.trace_erasure_residual(),
        "relative_singular_gap": res.singular_gap,
    }


def evaluate_all(gs, options=None, model=None, **kw):
    """Run all criteria on a generator set and return an AnalysisReport.

    Keyword arguments override fields of :class:`AnalysisOptions`.  Stages
    that fail are recorded in ``report.errors`` and their verdicts marked
    inconclusive; the remaining stages still run.
    """
    opts = options or AnalysisOptions(**kw)
    timings = {}
    errors = []
    verdicts = {}

    def stage(name, fn):
        t0 = time.perf_counter()
        try:
            return fn()
        except (NessError, np.linalg.LinAlgError, ValueError) as exc:
            errors.append({"stage": name, "error": f"{type(exc).__name__}: "
                                                    f"{exc}"})
            return None
        finally:
            timings[name] = time.perf_counter() - t0

    verdicts["kossakowski_kernel"] = stage("kossakowski_kernel",
                                           lambda: _criterion1(gs))
    verdicts["bicommutant"] = stage("bicommutant", lambda: _criterion2(gs))
    c3dim = stage("extended_commutant", lambda: _criterion3_commutant(gs))
    verdicts["yoshida_graph"] = stage(
        "yoshida_graph",
        lambda: yoshida_verdict(gs, opts.tol, opts.trials, opts.seed,
                                opts.algebra_limit))
    span_nd = stage("nonderogatory", lambda: bool(span_has_nonderogatory(
        gs, trials=opts.trials, seed=opts.seed)))
    dg = stage("digraph", lambda: support_digraph(gs.yoshida_set, opts.tol))

    run_oracle = opts.oracle == "on" or (
        opts.oracle == "auto" and gs.dim <= opts.oracle_limit)
    oracle_res = oracle_section = None
    if run_oracle:
        def _run():
            lm = vectorize_liouvillian(gs, limit=opts.oracle_limit)
            return lm, steady_states(lm)
        out = stage("oracle", _run)
        if out is not None:
            oracle_res = out[1]
            oracle_section = _oracle_section(*out)

    if c3dim is not None:
        verdicts["extended_commutant"] = _criterion3(c3dim, oracle_res)
    for name in CRITERIA:
        if verdicts.get(name) is None:
            verdicts[name] = CriterionVerdict(
                name, "inconclusive", evidence={"reason": "stage failed"})
    ordered = [verdicts[n] for n in CRITERIA]

    consistency = None
    if oracle_res is not None:
        record = verify_against_criteria(oracle_res, ordered)
        consistency = record.to_dict()

    report = AnalysisReport(
        model=dict(model or {"dim": gs.dim, "jump_count": len(gs.jumps)}),
        digraph=({"vertices": dg.vertex_count, "edges": dg.edge_count,
                  "scc_count": scc(dg).component_count} if dg else {}),
        verdicts=ordered,
        nonderogatory={"span_has_nonderogatory": span_nd,
                       "trials": opts.trials},
        oracle=oracle_section,
        consistency=consistency,
        errors=errors,
        parameters={"tol": opts.tol, "oracle": opts.oracle,
                    "oracle_limit": opts.oracle_limit,
                    "algebra_limit": opts.algebra_limit,
                    "trials": opts.trials},
        timings=timings if opts.timings else None,
        seed=opts.seed,
    )
    report = AnalysisReport.from_dict(report.to_dict())
    if opts.strict and not report.consistent:
        raise InconsistencyError("criteria contradict the oracle",
                                 report.consistency)
    return report
