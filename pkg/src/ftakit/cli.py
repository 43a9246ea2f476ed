"""Command-line front end.

Every metric is a subcommand over a Galileo model file (``-`` reads
standard input).  Output is line-oriented CSV by default or a single
JSON object with ``--format json``.  Exit codes: 0 success, 1 usage or
input problem, 2 analysis failure (caps, divergence, undefined measures).
"""

from __future__ import annotations

import json
import sys

import click
import numpy as np

from . import __version__
from .analysis import (
    DEFAULT_CHUNK_SIZE,
    MTTF_DEFAULT_EPSILON,
    MTTF_DEFAULT_INITIAL_STEP,
    MTTF_DEFAULT_SAMPLES,
    ImportanceMeasure,
    minimal_cut_sets,
    mttf_limit,
    mttf_substitution,
    probabilities_at,
    unreliability,
    unreliability_curve,
)
from .bdd import DEFAULT_SOLUTION_CAP
from .ctmc import DEFAULT_STATE_CAP, build_ctmc, write_ctmc
from .errors import AnalysisError, FtaError, InputError
from .galileo import parse
from .model import FaultTree, is_static
from .modular import DftAnalyzer
from .ordering import VariableOrder, dfs_order, read_order_file, tdlr_order
from .translate import translate

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ANALYSIS = 2


def _read_model(path: str) -> FaultTree:
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(path, "r", encoding="utf-8", errors="surrogateescape") as handle:
                text = handle.read()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from exc
    return parse(text).fault_tree


def _resolve_order(ft: FaultTree, ordering: str) -> VariableOrder:
    if ordering == "dfs":
        return dfs_order(ft)
    if ordering == "tdlr":
        return tdlr_order(ft)
    try:
        with open(ordering, "r", encoding="utf-8") as handle:
            return read_order_file(ft, handle)
    except OSError as exc:
        raise InputError(f"cannot read order file {ordering}: {exc}") from exc


def _require_static(ft: FaultTree, metric: str) -> None:
    if not is_static(ft):
        raise InputError(f"{metric} requires a static fault tree; "
                         "this model contains dynamic nodes")


def _float_repr(x: float) -> str:
    return repr(float(x))


def _emit(fmt: str, metric: str, model: str, parameters: dict, results: dict,
          csv_lines: list[str]) -> None:
    if fmt == "json":
        doc = {"metric": metric, "model": model, "parameters": parameters,
               "results": results}
        click.echo(json.dumps(doc, sort_keys=True))
    else:
        for line in csv_lines:
            click.echo(line)


def _dump_bdd(result, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        result.manager.to_dot(result.root, handle)


_common = [
    click.argument("model", type=str),
    click.option("--ordering", default="dfs", show_default=True,
                 help="Variable order: dfs, tdlr, or a path to an order file."),
    click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
                 default="csv", show_default=True),
    click.option("--cache-gates", is_flag=True,
                 help="Keep every gate's BDD instead of releasing after use."),
    click.option("--dump-bdd", type=str, default=None,
                 help="Write the analysed BDD as DOT to this path."),
]


def _with_common(fn):
    for deco in reversed(_common):
        fn = deco(fn)
    return fn


@click.group()
@click.version_option(version=__version__, prog_name="ftakit")
def cli() -> None:
    """Fault tree analysis via BDDs and Markov-chain modularisation."""


@cli.command()
@_with_common
@click.option("--max-order", type=int, default=None,
              help="Only report cut sets of at most this cardinality.")
@click.option("--max-solutions", type=int, default=DEFAULT_SOLUTION_CAP,
              show_default=True, help="Abort if more cut sets would be emitted.")
def mcs(model, ordering, fmt, cache_gates, dump_bdd, max_order, max_solutions):
    """All minimal cut sets, one per line."""
    ft = _read_model(model)
    _require_static(ft, "mcs")
    order = _resolve_order(ft, ordering)
    if dump_bdd:
        _dump_bdd(translate(ft, order=order, cache_gates=cache_gates), dump_bdd)
    cuts = minimal_cut_sets(ft, order=order, max_order=max_order, cap=max_solutions)
    rows = [",".join(sorted(c)) for c in cuts]
    _emit(fmt, "mcs", model,
          {"ordering": ordering, "max_order": max_order},
          {"cut_sets": [sorted(c) for c in cuts], "count": len(cuts)},
          rows)


@cli.command("unreliability")
@_with_common
@click.option("--time", "time_", type=float, required=True,
              help="Time bound t.")
@click.option("--chunk-size", type=int, default=DEFAULT_CHUNK_SIZE, show_default=True)
@click.option("--no-modularisation", is_flag=True,
              help="Solve dynamic models as one monolithic Markov chain.")
@click.option("--state-cap", type=int, default=DEFAULT_STATE_CAP, show_default=True)
@click.option("--dump-ctmc", type=str, default=None,
              help="Write explored Markov chains to this path.")
def unreliability_cmd(model, ordering, fmt, cache_gates, dump_bdd, time_,
                      chunk_size, no_modularisation, state_cap, dump_ctmc):
    """Failure probability within one time bound."""
    ft = _read_model(model)
    value = _curve_values(ft, [time_], ordering, chunk_size, no_modularisation,
                          state_cap, dump_bdd, dump_ctmc, cache_gates)[0]
    _emit(fmt, "unreliability", model,
          {"time": time_, "ordering": ordering,
           "modularisation": not no_modularisation},
          {"time": time_, "unreliability": value},
          [f"{_float_repr(time_)},{_float_repr(value)}"])


@cli.command()
@_with_common
@click.option("--points", type=int, default=1000, show_default=True,
              help="Number of uniformly spaced time points.")
@click.option("--horizon", type=float, required=True,
              help="Curve covers (0, horizon] uniformly.")
@click.option("--chunk-size", type=int, default=DEFAULT_CHUNK_SIZE, show_default=True)
@click.option("--no-modularisation", is_flag=True)
@click.option("--state-cap", type=int, default=DEFAULT_STATE_CAP, show_default=True)
@click.option("--dump-ctmc", type=str, default=None)
def curve(model, ordering, fmt, cache_gates, dump_bdd, points, horizon,
          chunk_size, no_modularisation, state_cap, dump_ctmc):
    """Unreliability over a uniform time grid (CSV: time,probability)."""
    if points < 1:
        raise InputError("--points must be at least 1")
    if horizon <= 0:
        raise InputError("--horizon must be positive")
    ft = _read_model(model)
    times = np.linspace(horizon / points, horizon, points)
    values = _curve_values(ft, times, ordering, chunk_size, no_modularisation,
                           state_cap, dump_bdd, dump_ctmc, cache_gates)
    rows = ["time,probability"]
    rows += [f"{_float_repr(t)},{_float_repr(v)}" for t, v in zip(times, values)]
    _emit(fmt, "curve", model,
          {"points": points, "horizon": horizon, "ordering": ordering,
           "chunk_size": chunk_size, "modularisation": not no_modularisation},
          {"times": [float(t) for t in times], "values": [float(v) for v in values]},
          rows)


def _curve_values(ft, times, ordering, chunk_size, no_modularisation,
                  state_cap, dump_bdd, dump_ctmc, cache_gates):
    times = np.asarray(times, dtype=np.float64)
    if no_modularisation:
        chain = build_ctmc(ft, state_cap=state_cap)
        if dump_ctmc:
            with open(dump_ctmc, "w", encoding="utf-8") as handle:
                write_ctmc(chain, handle)
        from .ctmc import transient_failure_prob
        return transient_failure_prob(chain, times).values
    if is_static(ft):
        order = _resolve_order(ft, ordering)
        result = translate(ft, order=order, cache_gates=cache_gates)
        if dump_bdd:
            _dump_bdd(result, dump_bdd)
        return unreliability_curve(result.root, ft.distributions, times,
                                   chunk_size=chunk_size).values
    if ordering not in ("dfs", "tdlr"):
        raise InputError("explicit order files apply to static trees only; "
                         "use --ordering dfs or tdlr for dynamic models")
    analyzer = DftAnalyzer(ft, ordering=ordering, chunk_size=chunk_size,
                           state_cap=state_cap)
    curve_result = analyzer.curve(times)
    if dump_ctmc:
        with open(dump_ctmc, "w", encoding="utf-8") as handle:
            for key, chain in analyzer._chain_cache.items():
                handle.write(f"# module {key[0]}\n")
                write_ctmc(chain, handle)
    return curve_result.values


@cli.command()
@_with_common
@click.option("--measure", type=click.Choice([m.value for m in ImportanceMeasure]),
              default="birnbaum", show_default=True)
@click.option("--time", "time_", type=float, required=True)
def importance(model, ordering, fmt, cache_gates, dump_bdd, measure, time_):
    """An importance measure for every basic event (CSV: be,value)."""
    from .analysis import importance as importance_fn

    ft = _read_model(model)
    _require_static(ft, "importance")
    order = _resolve_order(ft, ordering)
    result = translate(ft, order=order, cache_gates=cache_gates)
    if dump_bdd:
        _dump_bdd(result, dump_bdd)
    probs = probabilities_at(ft.distributions, time_)
    rows = ["be,value"]
    values = {}
    for be in order:
        values[be] = importance_fn(result.root, be, probs, measure)
        rows.append(f"{be},{_float_repr(values[be])}")
    _emit(fmt, "importance", model,
          {"measure": measure, "time": time_, "ordering": ordering},
          {"measure": measure, "time": time_, "values": values},
          rows)


@cli.command()
@_with_common
@click.option("--method", type=click.Choice(["limit", "substitution"]),
              default="limit", show_default=True)
@click.option("--epsilon", type=float, default=MTTF_DEFAULT_EPSILON,
              show_default=True, help="Stopping threshold for the limit method.")
@click.option("--initial-step", type=float, default=MTTF_DEFAULT_INITIAL_STEP,
              show_default=True, help="First panel width for the limit method.")
@click.option("--samples", type=int, default=MTTF_DEFAULT_SAMPLES,
              show_default=True, help="Sample count for the substitution method.")
def mttf(model, ordering, fmt, cache_gates, dump_bdd, method, epsilon,
         initial_step, samples):
    """Mean time to failure of a static fault tree."""
    ft = _read_model(model)
    _require_static(ft, "mttf")
    order = _resolve_order(ft, ordering)
    result = translate(ft, order=order, cache_gates=cache_gates)
    if dump_bdd:
        _dump_bdd(result, dump_bdd)
    if method == "limit":
        value = mttf_limit(result.root, ft.distributions, epsilon=epsilon,
                           initial_step=initial_step)
    else:
        value = mttf_substitution(result.root, ft.distributions, samples=samples)
    _emit(fmt, "mttf", model,
          {"method": method, "epsilon": epsilon, "samples": samples,
           "ordering": ordering},
          {"method": method, "mttf": value},
          [f"mttf,{_float_repr(value)}"])


def main(argv: list[str] | None = None) -> int:
    """Entry point mapping errors onto the documented exit codes."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.exceptions.Abort:
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_USAGE
    except AnalysisError as exc:
        click.echo(f"analysis error: {exc}", err=True)
        return EXIT_ANALYSIS
    except FtaError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_ANALYSIS
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
