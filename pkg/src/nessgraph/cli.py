"""
Command-line interface.

Exit codes: 0 success, 1 input or limit error, 2 the criteria contradict the
Liouvillian oracle (``analyze``) or a verification failed (``sweep``).
"""

from concurrent.futures import ProcessPoolExecutor
import json
import sys

import click

from . import __version__
from .criteria import AnalysisOptions, evaluate_all
from .errors import NessError
from .fractal import (
    PATTERN_LIMIT,
    EXACT_LIMIT,
    boolean_power,
    build_family,
    census,
    scc_counts,
    verify_block_recursion,
    verify_hamiltonian_self_similarity,
    verify_nilpotency,
    verify_reachability_positivity,
)
from .graph import SUPPORT_TOL
from .io import Model, dumps_model, read_model
from .lattice import LatticeSpec, generator_set
from .render import FORMATS, PARTS, pbm_text, render_web, web_digraph

CHECKS = ("connectivity", "selfsim", "nilpotency", "reachability", "census")

_tol_option = click.option(
    "--tol", type=float, default=SUPPORT_TOL, show_default=True,
    envvar="NESSGRAPH_TOL", help="Relative support tolerance.")


def _emit(text, out):
    if out in (None, "-"):
        click.echo(text, nl=False)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _floats(text, name):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers",
                                 param_hint=name)


@click.group()
@click.version_option(__version__, prog_name="nessgraph")
def cli():
    """Uniqueness criteria for stationary states of open spin lattices."""


@cli.command()
@click.argument("model_path", type=click.Path(dir_okay=False))
@_tol_option
@click.option("--oracle", type=click.Choice(["auto", "on", "off"]),
              default="auto", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--trials", type=int, default=8, show_default=True)
@click.option("--timings/--no-timings", default=False,
              help="Include wall-clock stage timings (not reproducible).")
@click.option("-o", "--out", "out_path", default=None,
              help="Report file (default stdout).")
def analyze(model_path, tol, oracle, seed, trials, timings, out_path):
    """Run all criteria on a model file and write a JSON report."""
    model = read_model(model_path)
    opts = AnalysisOptions(tol=tol, oracle=oracle, seed=seed, trials=trials,
                           timings=timings)
    report = evaluate_all(model.generators, opts, model=model.descriptor())
    _emit(report.dumps(), out_path)
    if not report.consistent:
        bad = [c for c in report.consistency["checks"] if not c["passed"]]
        for c in bad:
            click.echo(f"inconsistent: {c['criterion']}: {c['detail']}",
                       err=True)
        return 2
    return 0


@cli.command()
@click.option("--axes", default="2", show_default=True,
              help="Comma-separated axis lengths, e.g. 2,2.")
@click.option("--J", "J", type=float, default=1.0, show_default=True)
@click.option("--dx", type=float, default=0.5, show_default=True)
@click.option("--dz", type=float, default=0.3, show_default=True)
@click.option("--gamma", default="1", show_default=True,
              help="One decay rate, or one per site.")
@click.option("--boundary", type=click.Choice(["open", "periodic"]),
              default="open", show_default=True)
@click.option("-o", "--out", "out_path", default=None)
def lattice(axes, J, dx, dz, gamma, boundary, out_path):
    """Write the model file of a spin lattice."""
    try:
        axis_lengths = tuple(int(a) for a in axes.split(","))
    except ValueError:
        raise click.BadParameter("expected comma-separated integers",
                                 param_hint="--axes")
    gammas = _floats(gamma, "--gamma")
    sites = 1
    for a in axis_lengths:
        sites *= a
    if len(gammas) == 1:
        gammas = gammas * sites
    spec = LatticeSpec(axis_lengths, J=J, delta_x=dx, delta_z=dz,
                       gammas=tuple(gammas), boundary=boundary)
    _emit(dumps_model(Model(generator_set(spec), spec)), out_path)
    return 0


@cli.command()
@click.argument("model_path", type=click.Path(dir_okay=False))
@click.option("--part", type=click.Choice(PARTS), default="lindblad",
              show_default=True)
@click.option("--format", "fmt", default="dot", show_default=True,
              help=f"One of {', '.join(FORMATS)}.")
@click.option("--missing-link/--no-missing-link", default=True,
              help="Red first-to-last arrow on Lindblad-only svg/tikz webs.")
@_tol_option
@click.option("-o", "--out", "out_path", default=None)
def web(model_path, part, fmt, missing_link, tol, out_path):
    """Draw the connectivity web of a model on a ring."""
    if fmt not in FORMATS:
        raise click.BadParameter(f"unsupported format {fmt!r}",
                                 param_hint="--format")
    model = read_model(model_path)
    g = web_digraph(model.generators, part, tol)
    _emit(render_web(g, fmt, annotate=missing_link and part == "lindblad"),
          out_path)
    return 0


@cli.command()
@click.option("--sites", type=int, required=True)
@click.option("--power", type=int, default=1, show_default=True)
@click.option("--deformed", is_flag=True, help="Use C_N instead of A_N.")
@click.option("--format", "fmt", type=click.Choice(["pbm-text"]),
              default="pbm-text", show_default=True)
@click.option("-o", "--out", "out_path", default=None)
def fractal(sites, power, deformed, fmt, out_path):
    """Bitmap of the support of A_N^P (or C_N^P)."""
    if power < 0:
        raise click.BadParameter("power must be nonnegative",
                                 param_hint="--power")
    fam = build_family(sites, PATTERN_LIMIT)
    _emit(pbm_text(boolean_power(fam.c if deformed else fam.a, power)),
          out_path)
    return 0


def _run_check(n, check):
    if check == "connectivity":
        a_count, c_count = scc_counts(n)
        return a_count == 2 ** n and c_count == 1
    if check == "selfsim":
        return (verify_block_recursion(n)
                and verify_hamiltonian_self_similarity(n))
    if check == "nilpotency":
        return verify_nilpotency(build_family(n))
    if check == "reachability":
        return verify_reachability_positivity(n)
    if check == "census":
        return census(n).matches_pattern
    raise ValueError(check)


def _sweep_one(args):
    n, checks = args
    row = {"sites": n}
    for check in checks:
        row[check] = bool(_run_check(n, check))
    return row


def _parse_range(text):
    for sep in ("..", "-", ":"):
        if sep in text:
            lo, hi = text.split(sep, 1)
            return range(int(lo), int(hi) + 1)
    return range(int(text), int(text) + 1)


@cli.command()
@click.option("--sites", "sites_range", default="2..6", show_default=True,
              help="Range of N, e.g. 2..6.")
@click.option("--checks", default=",".join(CHECKS), show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True,
              help="Worker processes across N.")
@click.option("-o", "--out", "out_path", default=None)
def sweep(sites_range, checks, jobs, out_path):
    """Run fractal verifications over a range of N; nonzero exit on failure."""
    try:
        ns = list(_parse_range(sites_range))
    except ValueError:
        raise click.BadParameter("expected N or LO..HI",
                                 param_hint="--sites")
    chosen = tuple(c.strip() for c in checks.split(",") if c.strip())
    unknown = [c for c in chosen if c not in CHECKS]
    if unknown or not chosen:
        raise click.BadParameter(f"unknown checks {unknown}",
                                 param_hint="--checks")
    if not ns:
        raise click.BadParameter("empty range", param_hint="--sites")
    if "census" in chosen and ns[0] < 2:
        raise click.BadParameter("census is defined for N >= 2",
                                 param_hint="--sites")
    exact = {"selfsim": EXACT_LIMIT - 1, "nilpotency": EXACT_LIMIT}
    for c in chosen:
        top = exact.get(c, PATTERN_LIMIT)
        if ns[0] < 1 or ns[-1] > top:
            raise click.BadParameter(f"{c} supports N in [1, {top}]",
                                     param_hint="--sites")
    tasks = [(n, chosen) for n in ns]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_one, tasks))
    else:
        rows = [_sweep_one(t) for t in tasks]
    ok = all(row[c] for row in rows for c in chosen)
    _emit(json.dumps({"checks": list(chosen), "rows": rows, "passed": ok},
                     indent=2, sort_keys=True) + "\n", out_path)
    return 0 if ok else 2


def main(argv=None):
    try:
        rv = cli.main(args=argv, prog_name="nessgraph", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except (NessError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return rv or 0


if __name__ == "__main__":
    sys.exit(main())
