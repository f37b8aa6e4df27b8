"""Command line entry point."""

import argparse
import sys
from pathlib import Path
from typing import Callable, Dict, Optional, Sequence

import numpy as np
from loguru import logger
from pydantic import ValidationError

from .analysis.spectral import power_method
from .config import DEFAULT_DAMPING, SchemeParams, Settings, TerminationParams
from .errors import ConsistencyError, DistPageRankError, NonConvergenceError
from .graph.generator import random_web
from .graph.loader import dump_edge_list, load_edge_list_file
from .graph.webgraph import WebGraph, link_matrix, patch_dangling
from .harness.experiments import scaled_web_experiment
from .harness.montecarlo import mc_mean_square
from .harness.trace import OutputFormat, SimTrace, save_trace, write_summary_csv, write_trace_csv
from .harness.verify import run_checks
from .schemes.asynchronous import simulate_async
from .schemes.consensus import simulate_consensus
from .schemes.simultaneous import simulate_simul
from .schemes.single import simulate_single
from .schemes.state import Scheme
from .schemes.termination import run_with_termination

LOG_FORMAT = (
    "<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan> - <level>{message}</level>"
)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def configure_logging(level: str) -> None:
    """Send loguru output to stderr at ``level``."""
    logger.remove()
    logger.add(sys.stderr, level=level.upper(), format=LOG_FORMAT)


def _graph_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--graph", required=True, type=Path, help="Edge-list file")


def _scheme_args(parser: argparse.ArgumentParser, alpha: bool = False) -> None:
    parser.add_argument("--m", type=float, default=DEFAULT_DAMPING, help="Damping factor")
    if alpha:
        parser.add_argument("--alpha", type=float, default=0.5, help="Update probability")
    parser.add_argument("--seed", type=int, default=0, help="Base RNG seed")


def _output_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", type=Path, help="Output file; stdout when omitted")
    parser.add_argument(
        "--format",
        choices=[f.value for f in OutputFormat],
        default=OutputFormat.CSV.value,
        help="Output format",
    )


def _run_args(parser: argparse.ArgumentParser, steps: int, settings: Settings) -> None:
    parser.add_argument("--steps", type=int, default=steps, help="Number of steps K")
    parser.add_argument(
        "--sample-every", type=int, default=settings.sample_every, help="Trace sampling period"
    )
    parser.add_argument(
        "--track", type=int, nargs="*", default=[], help="Pages whose y_i paths are recorded"
    )


def build_parser(settings: Settings) -> argparse.ArgumentParser:
    """Build the ``dist-pagerank`` argument parser."""
    parser = argparse.ArgumentParser(
        prog="dist-pagerank",
        description="Simulate randomized distributed PageRank schemes.",
    )
    parser.add_argument("--log-level", default=settings.log_level, help="Log level")
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", help="Centralized power method")
    _graph_args(solve)
    solve.add_argument("--m", type=float, default=DEFAULT_DAMPING, help="Damping factor")
    solve.add_argument("--tol", type=float, default=1e-10, help="l1 step tolerance")
    solve.add_argument("--out", type=Path, help="Write page,value rows to this file")

    single = commands.add_parser("sim-single", help="One page updates per step")
    _graph_args(single)
    _scheme_args(single)
    _run_args(single, 50_000, settings)
    _output_args(single)

    simul = commands.add_parser("sim-simul", help="Pages update with probability alpha")
    _graph_args(simul)
    _scheme_args(simul, alpha=True)
    _run_args(simul, 50_000, settings)
    _output_args(simul)

    terminate = commands.add_parser("sim-terminate", help="Simultaneous updates with termination")
    _graph_args(terminate)
    _scheme_args(terminate, alpha=True)
    terminate.add_argument("--delta", type=float, default=0.01, help="Relative error level")
    terminate.add_argument("--ns", type=int, default=200, help="Stability window")
    _run_args(terminate, 1_000_000, settings)
    _output_args(terminate)

    asynchronous = commands.add_parser("sim-async", help="Randomized asynchronous iteration")
    _graph_args(asynchronous)
    _scheme_args(asynchronous, alpha=True)
    asynchronous.add_argument("--tol", type=float, default=1e-8, help="l-inf error target")
    _run_args(asynchronous, 1_000_000, settings)
    _output_args(asynchronous)

    consensus = commands.add_parser("consensus", help="Randomized averaging consensus")
    _graph_args(consensus)
    consensus.add_argument("--seed", type=int, default=0, help="Base RNG seed")
    consensus.add_argument(
        "--x0", type=float, nargs="+", help="Initial values; first unit vector when omitted"
    )
    consensus.add_argument("--tol", type=float, default=1e-8, help="Disagreement target")
    _run_args(consensus, 1_000_000, settings)
    _output_args(consensus)

    verify = commands.add_parser("verify", help="Matrix identity and bound checks")
    _graph_args(verify)
    verify.add_argument("--m", type=float, default=DEFAULT_DAMPING, help="Damping factor")
    verify.add_argument("--alpha", type=float, default=0.5, help="Update probability")

    mc = commands.add_parser("mc", help="Monte Carlo mean squared error")
    _graph_args(mc)
    mc.add_argument(
        "--scheme",
        choices=[Scheme.SINGLE.value, Scheme.SIMUL.value],
        default=Scheme.SINGLE.value,
        help="Scheme to run",
    )
    _scheme_args(mc, alpha=True)
    mc.add_argument("--runs", type=int, default=200, help="Number of runs")
    mc.add_argument("--steps", type=int, default=20_000, help="Steps per run")
    mc.add_argument(
        "--sample-every", type=int, default=settings.sample_every, help="Sampling period"
    )
    mc.add_argument("--workers", type=int, default=settings.workers, help="Worker processes")
    _output_args(mc)

    generate = commands.add_parser("generate", help="Write a random web as an edge list")
    generate.add_argument("--n", type=int, required=True, help="Page count")
    generate.add_argument("--hubs", type=int, default=0, help="Hub page count")
    generate.add_argument("--min-deg", type=int, default=2, help="Smallest out-degree")
    generate.add_argument("--max-deg", type=int, default=3, help="Largest out-degree")
    generate.add_argument("--seed", type=int, default=0, help="Generator seed")
    generate.add_argument("--out", type=Path, help="Output file; stdout when omitted")

    scaled = commands.add_parser("scaled", help="Large random-web termination run")
    scaled.add_argument("--seed", type=int, default=0, help="Base seed of graph and run")
    scaled.add_argument("--n", type=int, default=1000, help="Page count")
    scaled.add_argument("--steps", type=int, default=8000, help="Step cap K")
    scaled.add_argument("--alpha", type=float, default=0.01, help="Update probability")
    scaled.add_argument("--delta", type=float, default=0.01, help="Relative error level")
    scaled.add_argument("--ns", type=int, default=800, help="Stability window")
    scaled.add_argument("--sample-every", type=int, default=100, help="Sampling period")
    scaled.add_argument(
        "--track", type=int, nargs="*", default=[], help="Pages whose y_i paths are recorded"
    )
    scaled.add_argument("--out", type=Path, help="Write the JSON report to this file")
    return parser


def _load_graph(path: Path) -> WebGraph:
    graph = load_edge_list_file(path)
    patched = patch_dangling(graph)
    if patched is not graph:
        logger.info(f"Patched {len(graph.dangling_pages())} dangling pages of {path}")
    return patched


def _emit_trace(trace: SimTrace, args: argparse.Namespace) -> None:
    fmt = OutputFormat(args.format)
    if args.out is not None:
        save_trace(trace, args.out, fmt)
    elif fmt is OutputFormat.JSON:
        print(trace.model_dump_json(indent=2))
    else:
        write_trace_csv(trace, sys.stdout)


def _cmd_solve(args: argparse.Namespace, settings: Settings) -> int:
    params = SchemeParams(m=args.m)
    link = link_matrix(_load_graph(args.graph))
    result = power_method(link, params.m, tol=args.tol)
    print("x* = [" + ", ".join(f"{value:.3f}" for value in result.x_star) + "]")
    logger.info(f"{result.iterations} iterations, residual {result.residual:.3e}")
    if args.out is not None:
        rows = "".join(f"{page},{value!r}\n" for page, value in enumerate(result.x_star))
        args.out.write_text("page,value\n" + rows, encoding="utf-8")
    return EXIT_OK


def _cmd_single(args: argparse.Namespace, settings: Settings) -> int:
    params = SchemeParams(m=args.m, seed=args.seed, steps=args.steps)
    trace = simulate_single(
        _load_graph(args.graph),
        params,
        params.steps,
        sample_every=args.sample_every,
        track_pages=args.track,
        keep_states=False,
        reference_tol=settings.reference_tol,
    )
    _emit_trace(trace, args)
    return EXIT_OK


def _cmd_simul(args: argparse.Namespace, settings: Settings) -> int:
    params = SchemeParams(m=args.m, alpha=args.alpha, seed=args.seed, steps=args.steps)
    trace = simulate_simul(
        _load_graph(args.graph),
        params,
        params.steps,
        sample_every=args.sample_every,
        track_pages=args.track,
        keep_states=False,
        reference_tol=settings.reference_tol,
    )
    _emit_trace(trace, args)
    return EXIT_OK


def _cmd_terminate(args: argparse.Namespace, settings: Settings) -> int:
    params = SchemeParams(m=args.m, alpha=args.alpha, seed=args.seed, steps=args.steps)
    trace = run_with_termination(
        _load_graph(args.graph),
        params,
        TerminationParams(delta=args.delta, ns=args.ns),
        params.steps,
        sample_every=args.sample_every,
        track_pages=args.track,
        reference_tol=settings.reference_tol,
    )
    _emit_trace(trace, args)
    return EXIT_OK


def _cmd_async(args: argparse.Namespace, settings: Settings) -> int:
    params = SchemeParams(m=args.m, alpha=args.alpha, seed=args.seed, steps=args.steps)
    trace = simulate_async(
        _load_graph(args.graph),
        params,
        params.steps,
        tol=args.tol,
        sample_every=args.sample_every,
        track_pages=args.track,
        reference_tol=settings.reference_tol,
    )
    _emit_trace(trace, args)
    return EXIT_OK


def _cmd_consensus(args: argparse.Namespace, settings: Settings) -> int:
    params = SchemeParams(seed=args.seed, steps=args.steps)
    graph = _load_graph(args.graph)
    if args.x0 is None:
        x0 = np.zeros(graph.n)
        x0[0] = 1.0
    else:
        x0 = np.array(args.x0, dtype=float)
    trace = simulate_consensus(
        graph,
        x0,
        params.seed,
        params.steps,
        tol=args.tol,
        sample_every=args.sample_every,
        track_pages=args.track,
    )
    _emit_trace(trace, args)
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace, settings: Settings) -> int:
    results = run_checks(_load_graph(args.graph), m=args.m, alpha=args.alpha)
    width = max(len(r.name) for r in results)
    for r in results:
        status = "SKIP" if r.skipped else ("PASS" if r.passed else "FAIL")
        print(f"{r.name:<{width}}  {status}  {r.detail}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


def _cmd_mc(args: argparse.Namespace, settings: Settings) -> int:
    params = SchemeParams(m=args.m, alpha=args.alpha, seed=args.seed, steps=args.steps)
    summary = mc_mean_square(
        Scheme(args.scheme),
        _load_graph(args.graph),
        params,
        args.runs,
        params.steps,
        sample_every=args.sample_every,
        workers=args.workers,
        reference_tol=settings.reference_tol,
    )
    if OutputFormat(args.format) is OutputFormat.JSON:
        text = summary.model_dump_json(indent=2)
        if args.out is None:
            print(text)
        else:
            args.out.write_text(text, encoding="utf-8")
    elif args.out is None:
        write_summary_csv(summary, sys.stdout)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as handle:
            write_summary_csv(summary, handle)
    return EXIT_OK


def _cmd_generate(args: argparse.Namespace, settings: Settings) -> int:
    graph = random_web(
        args.n, args.seed, hub_count=args.hubs, min_deg=args.min_deg, max_deg=args.max_deg
    )
    text = dump_edge_list(graph)
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text, encoding="utf-8")
        logger.info(f"Wrote {graph.edge_count} links on {graph.n} pages to {args.out}")
    return EXIT_OK


def _cmd_scaled(args: argparse.Namespace, settings: Settings) -> int:
    params = SchemeParams(alpha=args.alpha, seed=args.seed, steps=args.steps)
    report = scaled_web_experiment(
        seed_base=params.seed,
        n=args.n,
        max_deg=max(2, args.n // 3),
        alpha=params.alpha,
        delta=args.delta,
        ns=args.ns,
        steps=params.steps,
        sample_every=args.sample_every,
        track_pages=args.track,
    )
    terminated = sum(t is not None for t in report.term_times)
    print(f"steps: {report.steps}")
    print(f"terminated pages: {terminated}/{report.n}")
    print(f"sum(y): {report.sum_y:.4f}")
    print(f"final l1 error: {report.err_l1[-1]:.4e}")
    print(f"final l-inf error: {report.err_linf[-1]:.4e}")
    print(f"pages within delta band: {report.band.fraction:.3f}")
    if args.out is not None:
        args.out.write_text(report.model_dump_json(indent=2), encoding="utf-8")
    return EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace, Settings], int]] = {
    "solve": _cmd_solve,
    "sim-single": _cmd_single,
    "sim-simul": _cmd_simul,
    "sim-terminate": _cmd_terminate,
    "sim-async": _cmd_async,
    "consensus": _cmd_consensus,
    "verify": _cmd_verify,
    "mc": _cmd_mc,
    "generate": _cmd_generate,
    "scaled": _cmd_scaled,
}


def _describe_validation(exc: ValidationError) -> str:
    first = exc.errors()[0]
    field = ".".join(str(part) for part in first["loc"])
    return f"invalid {field}: {first['msg']}"


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv`` and run one subcommand.

    Returns:
        0 on success, 1 when checks fail or a run cannot complete, 2 on
        usage and input errors
    """
    try:
        settings = Settings.from_env()
    except ValidationError as exc:
        print(f"error: {_describe_validation(exc)}", file=sys.stderr)
        return EXIT_USAGE
    parser = build_parser(settings)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    configure_logging(args.log_level)
    try:
        return COMMANDS[args.command](args, settings)
    except ValidationError as exc:
        print(f"error: {_describe_validation(exc)}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc.strerror or exc}: {exc.filename}", file=sys.stderr)
        return EXIT_USAGE
    except (NonConvergenceError, ConsistencyError) as exc:
        logger.error(f"{args.command} failed: {exc}")
        return EXIT_FAILED
    except (DistPageRankError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception:
        logger.exception(f"Unexpected error running {args.command}")
        return EXIT_FAILED


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
