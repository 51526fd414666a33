"""Command line: one subcommand per scenario, plus ``all`` and ``run-script``."""
from __future__ import annotations

import sys

import click

from .scenarios import REGISTRY, ScenarioError, canon, emit_report, run_scenario
from .script import ScriptError, run_script_file

_FORMAT = click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text",
                       show_default=True)
_SEED = click.option("--seed", type=int, default=0, show_default=True, help="seed for sampling scenarios")
_TIMEOUT = click.option("--timeout", type=float, default=None, help="per-scenario limit in seconds")
_TIMING = click.option("--no-timing", is_flag=True, help="report elapsed_ms = 0 (byte-stable output)")


def _emit(reports, fmt: str) -> None:
    if fmt == "json" and len(reports) > 1:
        click.echo("[\n" + ",\n".join(emit_report(r, "json") for r in reports) + "\n]")
    else:
        click.echo("\n\n".join(emit_report(r, fmt) for r in reports))


def _run(names, fmt, seed, fixture, timeout, no_timing) -> None:
    reports = []
    try:
        for n in names:
            reports.append(run_scenario(n, seed=seed, fixture=fixture, timeout=timeout,
                                        timing=not no_timing))
    except ScenarioError as e:
        raise click.UsageError(str(e))
    _emit(reports, fmt)
    sys.exit(0 if all(r.passed for r in reports) else 1)


@click.group()
def main() -> None:
    """Exact intersection-theory and lattice computations for trivector loci."""


def _make_command(name: str):
    sc = REGISTRY[name]

    @_FORMAT
    @_SEED
    @click.option("--fixture", type=click.Path(exists=True, dir_okay=False), default=None,
                  help="replacement input file" if sc.takes_fixture else "not accepted")
    @_TIMEOUT
    @_TIMING
    def cmd(fmt, seed, fixture, timeout, no_timing):
        _run([name], fmt, seed, fixture, timeout, no_timing)

    cmd.__doc__ = sc.anchor + (" (slow)" if sc.slow else "")
    return click.command(name)(cmd)


for _name in REGISTRY:
    main.add_command(_make_command(_name))


@main.command("all")
@_FORMAT
@_SEED
@_TIMEOUT
@_TIMING
@click.option("--skip-slow", is_flag=True, help="leave out the multi-minute scenarios")
def run_all(fmt, seed, timeout, no_timing, skip_slow):
    """Run every registered scenario."""
    names = [n for n, s in REGISTRY.items() if not (skip_slow and s.slow)]
    _run(names, fmt, seed, None, timeout, no_timing)


@main.command("run-script")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
def run_script_cmd(path):
    """Evaluate a tower script and print its emitted values."""
    try:
        res = run_script_file(path)
    except ScriptError as e:
        raise click.ClickException(str(e))
    for k, v in res.values:
        click.echo(f"{k} = {canon(v)}")


@main.command("list")
def list_cmd():
    """List scenarios."""
    for n, s in REGISTRY.items():
        click.echo(f"{n:22s} {s.anchor}{'  [slow]' if s.slow else ''}")


if __name__ == "__main__":
    main()
