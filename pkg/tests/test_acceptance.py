"""
Acceptance gate: twelve end-to-end checks at their stated tolerances.

Each check prints one ``PASS``/``FAIL`` line.  Run with ``pytest -s`` or
directly with ``python3 tests/test_acceptance.py``.
"""

from math import factorial
import sys
import time

import numpy as np
import pytest

from nessgraph.algebra import (
    OperatorSet,
    commutant_dim,
    cyclic_vector,
    generated_algebra_dim,
    kossakowski_from_jumps,
    lie_closure_dim,
    nonderogatory_check,
)
from nessgraph.cli import main as cli_main
from nessgraph.criteria import evaluate_all
from nessgraph.fractal import (
    build_family,
    census,
    exact_power,
    verify_block_recursion,
    verify_nilpotency,
)
from nessgraph.graph import (
    Digraph,
    equivalence_suite,
    is_entrywise_positive,
    reachability_closure,
    scc,
    support_digraph,
)
from nessgraph.io import Model, dumps_model, loads_model
from nessgraph.lattice import (
    apply_gauge,
    chain,
    effective_generator,
    generator_set,
    mix_jumps,
)
from nessgraph.linalg import kron, kron_power, local_operator
from nessgraph.oracle import steady_states, vectorize_liouvillian

SM = local_operator("sigma_minus")
SP = local_operator("sigma_plus")
SX = local_operator("sigma_x")
SY = local_operator("sigma_y")
SZ = local_operator("sigma_z")


def _rand_gs(rng, d, k):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    ls = [rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
          for _ in range(k)]
    return effective_generator(a + a.conj().T, ls)


def _rand_unitary(rng, n):
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def criterion_1():
    t0 = time.perf_counter()
    ok = all(verify_nilpotency(build_family(n)) for n in range(1, 7))
    ok &= np.array_equal(exact_power(build_family(2).a, 2), 2 * kron(SM, SM))
    ok &= np.array_equal(exact_power(build_family(3).a, 3),
                         6 * kron_power(SM, 3))
    for n in range(1, 7):
        top = exact_power(build_family(n).a, n)
        ok &= np.array_equal(top, factorial(n) * kron_power(SM, n))
    dt = time.perf_counter() - t0
    return ok and dt < 5, f"N=1..6 exact, {dt:.2f}s (limit 5s)"


def criterion_2():
    t0 = time.perf_counter()
    ok = True
    t12 = 0.0
    for n in range(2, 13):
        t1 = time.perf_counter()
        fam = build_family(n)
        ga, gc = support_digraph([fam.a]), support_digraph([fam.c])
        ok &= scc(ga).component_count == 2 ** n
        ok &= scc(gc).component_count == 1
        ok &= is_entrywise_positive(reachability_closure(gc))
        if n == 12:
            t12 = time.perf_counter() - t1
    dt = time.perf_counter() - t0
    return ok and t12 < 10, f"N=2..12, N=12 in {t12:.2f}s, total {dt:.2f}s"


def criterion_3():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    agree = 0
    connected = 0
    trials = 240
    for _ in range(trials):
        d = int(rng.integers(1, 65))
        # densities around the connectivity threshold give both outcomes
        p = min(1.0, float(rng.uniform(0.2, 3.0)) * np.log(d + 1) / d)
        pattern = (rng.random((d, d)) < p).astype(float)
        res = equivalence_suite(pattern)
        agree += len(set(res)) == 1
        connected += res.strongly_connected
    dt = time.perf_counter() - t0
    ok = agree == trials and 0 < connected < trials and dt < 10
    return ok, (f"{agree}/{trials} agree ({connected} strongly connected), "
                f"{dt:.2f}s")


def criterion_4():
    ok = True
    for n in range(1, 6):
        fam_n, fam_up = build_family(n), build_family(n + 1)
        a = fam_n.a.toarray()
        big = fam_up.a.toarray()
        h = a.shape[0]
        ok &= np.array_equal(big, np.block([[a, np.zeros_like(a)],
                                            [np.eye(h, dtype=a.dtype), a]]))
        ok &= verify_block_recursion(n, max_power=n + 1)
    return ok, "N=1..5, P=1..N+1 exact, lower-left support = supp A^(P-1)"


def criterion_5():
    rows = []
    ok = True
    for n in range(2, 7):
        c = census(n)
        ok &= (c.lindblad_missing == 2 ** (n - 1)
               and c.hamiltonian_missing == 2 ** (n - 2)
               and c.lindblad_unidirectional and c.hamiltonian_symmetric
               and c.lindblad_antipodal and c.hamiltonian_antipodal)
        rows.append(f"{n}:{c.lindblad_missing}/{c.hamiltonian_missing}")
    return ok, "missing L/H links " + " ".join(rows)


def criterion_6():
    ok = True
    notes = []
    for n in (2, 3, 4):
        gs = generator_set(chain(n))
        t0 = time.perf_counter()
        res = steady_states(vectorize_liouvillian(gs))
        dt = time.perf_counter() - t0
        r = evaluate_all(gs, oracle="off")
        rho = res.state
        ok &= r.verdict("yoshida_graph").status == "satisfied"
        ok &= r.verdict("bicommutant").status == "satisfied"
        ok &= res.kernel_dim == 1
        ok &= np.abs(rho - rho.conj().T).max() <= 1e-8
        ok &= abs(np.trace(rho) - 1) <= 1e-8
        ok &= res.min_eigenvalue > 1e-8
        if n == 4:
            ok &= dt < 10
        notes.append(f"N={n} min eig {res.min_eigenvalue:.2e} ({dt:.2f}s)")
    return ok, "; ".join(notes)


def criterion_7():
    deph = evaluate_all(effective_generator(np.zeros((2, 2)), [SZ]))
    ok = all(v.status != "satisfied" for v in deph.verdicts)
    ok &= deph.oracle["kernel_dim"] == 2 and deph.consistent
    for n in (2, 3):
        r = evaluate_all(generator_set(chain(n, delta_x=0.0)))
        ok &= r.verdict("yoshida_graph").status == "not_satisfied"
        ok &= r.oracle["kernel_dim"] == 1
        ok &= not r.oracle["faithful"]
        ok &= r.consistent
    return ok, "dephasing kernel 2; dx=0 chains kernel 1, non-faithful"


def criterion_8():
    res = steady_states(vectorize_liouvillian(effective_generator(SZ, [SX])))
    err = np.abs(res.state - np.eye(2) / 2).max()
    return res.kernel_dim == 1 and err <= 1e-10, f"max |rho - I/2| = {err:.1e}"


def criterion_9():
    rng = np.random.default_rng(9)
    worst = 0.0
    trials = 60
    for _ in range(trials):
        d = int(rng.integers(1, 9))
        k = int(rng.integers(1, 4))
        gs = _rand_gs(rng, d, k)
        base = vectorize_liouvillian(gs).matrix
        a = rng.normal(size=k) + 1j * rng.normal(size=k)
        gauged = vectorize_liouvillian(
            apply_gauge(gs, a, float(rng.normal()))).matrix
        mixed = vectorize_liouvillian(
            mix_jumps(gs, _rand_unitary(rng, k))).matrix
        worst = max(worst, np.abs(gauged - base).max(),
                    np.abs(mixed - base).max())
    return worst <= 1e-10, f"{trials} trials each, max deviation {worst:.1e}"


def criterion_10():
    S = OperatorSet.of
    vals = (generated_algebra_dim(S([SM, SP])),
            lie_closure_dim(S([SX, SY])),
            generated_algebra_dim(S([SX, SY])),
            commutant_dim(S([SX, SY, SZ])),
            commutant_dim(S([SZ])),
            kossakowski_from_jumps([SM]).kernel_dim())
    return vals == (4, 3, 4, 1, 2, 2), f"values {vals}"


def criterion_11():
    c = cyclic_vector(SM)
    ok = c is not None and np.array_equal(c, [1, 0])
    ok &= np.array_equal(SM @ c, [0, 1]) and not np.any(SM @ SM @ c)
    ok &= nonderogatory_check(SM)
    ok &= not nonderogatory_check(np.eye(2))
    ok &= not nonderogatory_check(np.diag([1.0, 1.0, 2.0]))
    m = np.diag([1.0, 2.0, 3.0])
    misses = sum(not nonderogatory_check(m, trials=1, seed=s)
                 for s in range(1000))
    return ok and misses == 0, f"false negatives on diag(1,2,3): {misses}/1000"


def criterion_12(tmp):
    import contextlib
    import io as _io
    import os

    model_path = os.path.join(tmp, "chain2.json")
    with contextlib.redirect_stdout(_io.StringIO()):
        cli_main(["lattice", "--axes", "2", "-o", model_path])
        outputs = {}
        for tag in ("a", "b"):
            rep = os.path.join(tmp, f"report_{tag}.json")
            cli_main(["analyze", model_path, "--seed", "5", "-o", rep])
            figs = []
            for fmt in ("dot", "svg", "tikz"):
                fig = os.path.join(tmp, f"web_{tag}.{fmt}")
                cli_main(["web", model_path, "--format", fmt, "-o", fig])
                figs.append(fig)
            pbm = os.path.join(tmp, f"frac_{tag}.pbm")
            cli_main(["fractal", "--sites", "3", "-o", pbm])
            outputs[tag] = [open(p, "rb").read() for p in [rep, *figs, pbm]]
    identical = outputs["a"] == outputs["b"]

    gs = generator_set(chain(2))
    text = dumps_model(Model(gs, chain(2)))
    back = loads_model(text)
    lossless = (np.array_equal(back.generators.hamiltonian, gs.hamiltonian)
                and all(np.array_equal(x, y) for x, y in
                        zip(back.generators.jumps, gs.jumps))
                and dumps_model(back) == text)

    dot = outputs["a"][1].decode()
    edges = sorted(tuple(int(t) for t in line.strip(" ;").split(" -> "))
                   for line in dot.splitlines() if "->" in line)
    golden = edges == [(2, 1), (3, 1), (4, 2), (4, 3)]
    return (identical and lossless and golden,
            f"byte-identical={identical}, lossless={lossless}, "
            f"golden={golden}")


CRITERIA = {
    1: ("nilpotency identities", criterion_1),
    2: ("connectivity dichotomy", criterion_2),
    3: ("equivalence suite", criterion_3),
    4: ("block self-similarity", criterion_4),
    5: ("census", criterion_5),
    6: ("model verdict", criterion_6),
    7: ("negative controls", criterion_7),
    8: ("self-adjoint jump", criterion_8),
    9: ("symmetry invariances", criterion_9),
    10: ("algebra unit suite", criterion_10),
    11: ("nonderogatory suite", criterion_11),
    12: ("determinism and formats", criterion_12),
}


def _run(number, tmp):
    name, fn = CRITERIA[number]
    ok, detail = fn(tmp) if number == 12 else fn()
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {name}: {detail}"
    return bool(ok), line


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_acceptance(number, tmp_path, capsys):
    ok, line = _run(number, str(tmp_path))
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    import tempfile

    failed = 0
    with tempfile.TemporaryDirectory() as tmp:
        for number in sorted(CRITERIA):
            ok, line = _run(number, tmp)
            print(line)
            failed += not ok
    sys.exit(1 if failed else 0)
