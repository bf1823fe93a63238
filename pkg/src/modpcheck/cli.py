"""Command line front end.

Exit codes: 0 all selected checks pass, 1 at least one failed, 2 the
configuration itself was rejected.
"""

import json
import sys

import click

from .errors import ConfigInvalid, GenericityViolation, RangeViolation
from .harness import SCHEMA, SUITES, Report, RunConfig, emit_report, list_params, run_suite

_CONFIG_ERRORS = (ConfigInvalid, GenericityViolation, RangeViolation)


def _config_error(msg):
    click.echo(f"config error: {msg}", err=True)
    sys.exit(2)


def _parse_ints(raw, what):
    try:
        return tuple(int(x) for x in raw.split(",") if x != "")
    except ValueError:
        _config_error(f"cannot parse {what}={raw!r}")


@click.group()
def main():
    """Exact-arithmetic verifier for the weight and matrix calculus."""


@main.command()
@click.option("--p", type=int, required=True, help="residue characteristic")
@click.option("--f", type=int, required=True, help="number of embeddings")
@click.option("--r", required=True, help="comma separated exponents, f of them")
@click.option("--jrho", default="all", show_default=True,
              help='"all", "none", or comma separated indices')
@click.option("--cutoff", type=int, default=None, help="truncation depth override")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--suite", "suites", multiple=True, type=click.Choice(SUITES),
              help="repeatable; default is every suite")
@click.option("--mutate", default=None,
              help="perturb one table cell (s, t, a, r, c, cprime, tJJp, aJn) or 'eps'")
@click.option("--units", type=int, default=20, show_default=True,
              help="sampled principal units per context")
@click.option("--thetas", type=int, default=50, show_default=True,
              help="random solver problems per parameter set")
@click.option("--format", "fmt", type=click.Choice(("json", "text")),
              default="json", show_default=True)
def verify(p, f, r, jrho, cutoff, seed, suites, mutate, units, thetas, fmt):
    """Run the selected suites and print a deterministic report."""
    r_tuple = _parse_ints(r, "r")
    if jrho == "all":
        jrho_val = "all"
    elif jrho == "none":
        jrho_val = ()
    else:
        jrho_val = _parse_ints(jrho, "jrho")
    try:
        config = RunConfig(
            p=p, f=f, r=r_tuple, jrho=jrho_val, cutoff=cutoff, seed=seed,
            suites=tuple(suites) or SUITES, mutate=mutate, units=units,
            thetas=thetas,
        )
        rep = run_suite(config)
    except _CONFIG_ERRORS as e:
        _config_error(e)
    sys.stdout.buffer.write(emit_report(rep, fmt))
    sys.stdout.buffer.flush()
    for label, dt in rep.timings.items():
        click.echo(f"timing {label} {dt:.3f}s", err=True)
    sys.exit(0 if rep.passed else 1)


@main.command()
@click.option("--f", "f_filter", type=int, default=None,
              help="restrict to one preset block")
def params(f_filter):
    """List the built-in verification presets."""
    try:
        configs = list_params(f_filter)
    except _CONFIG_ERRORS as e:
        _config_error(e)
    for cfg in configs:
        click.echo(
            f"p={cfg.p} f={cfg.f} r={','.join(str(x) for x in cfg.r)} "
            f"jrho=all cutoff={cfg.cutoff_value()}"
        )


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(("json", "text")),
              default="text", show_default=True)
def report(file, fmt):
    """Re-render a stored JSON report; exit code reflects its outcome."""
    with open(file, "rb") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as e:
            _config_error(f"not a report file: {e}")
    if not isinstance(payload, dict) or payload.get("schema") != SCHEMA:
        _config_error(f"unsupported schema {payload.get('schema') if isinstance(payload, dict) else None!r}")
    try:
        rep = Report(
            config=payload["config"],
            fingerprint=payload["fingerprint"],
            suites=payload["suites"],
            timings={},
        )
    except KeyError as e:
        _config_error(f"report missing field {e}")
    try:
        out = emit_report(rep, fmt)
    except _CONFIG_ERRORS as e:
        _config_error(e)
    sys.stdout.buffer.write(out)
    sys.exit(0 if rep.passed else 1)


if __name__ == "__main__":
    main()
