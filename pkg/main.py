"""Entry point: argv -> subcommand -> files + console summary

Exit codes:
    0  success (sweeps: at least one network solved)
    2  invalid flags, config or input files
    3  measurement graph without edges
    4  solver numerical failure
    5  solver suspects infeasibility
    6  sweep in which every network failed
"""
import argparse
import sys
from typing import List, Optional

import numpy as np

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_EMPTY_GRAPH = 3
EXIT_NUMERICAL = 4
EXIT_INFEASIBLE = 5
EXIT_ALL_FAILED = 6

OBJECTIVE_CHOICES = ["biswas-ye", "ls", "qp", "qp-gamma"]
SWEEP_CHOICES = ["gamma", "noise", "range", "scale", "entropy"]


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose errors exit with the usage code"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser(cfg: dict) -> argparse.ArgumentParser:
    metrics = cfg.get("metrics", {})
    solver = cfg.get("solver", {})
    fig9 = cfg.get("experiments", {}).get("fig9", {})
    fmt = argparse.ArgumentDefaultsHelpFormatter

    parser = _Parser(prog="sdploc", description="SDP-relaxation sensor network localization", formatter_class=fmt)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="generate a random network instance", formatter_class=fmt)
    gen.add_argument("--sensors", type=int, default=80, help="number of sensors n")
    gen.add_argument("--anchors", type=int, default=5, help="number of anchors m")
    gen.add_argument("--radio-range", type=float, default=0.25, help="radio range r")
    gen.add_argument("--noise-std", type=float, default=0.05, help="noise standard deviation")
    gen.add_argument("--noise-model", choices=["additive", "multiplicative"],
                     default=cfg.get("netgen", {}).get("noise_model", "additive"), help="noise model")
    gen.add_argument("--max-degree", type=int, default=None, help="cap on sensor-sensor degree")
    gen.add_argument("--seed", type=int, default=0, help="network seed")
    gen.add_argument("--out", required=True, help="instance file to write")

    solve = sub.add_parser("solve", help="localize one instance", formatter_class=fmt)
    solve.add_argument("--in", dest="instance", required=True, help="instance file")
    solve.add_argument("--objective", choices=OBJECTIVE_CHOICES, default="qp", help="localization objective")
    solve.add_argument("--gamma", type=float, default=None, help="regularization coefficient (qp-gamma only)")
    solve.add_argument("--tol-gap", type=float, default=solver.get("tol_gap", 1e-7), help="relative gap tolerance")
    solve.add_argument("--tol-feas", type=float, default=solver.get("tol_feas", 1e-7), help="feasibility tolerance")
    solve.add_argument("--max-iters", type=int, default=solver.get("max_iters", 100), help="iteration limit")
    solve.add_argument("--out-positions", default=None, help="positions CSV (index,x,y)")
    solve.add_argument("--out-errors", default=None, help="errors CSV (edge_kind,i,j_or_k,error)")
    solve.add_argument("--dump-program", default=None, help="write the cone program as text")

    ev = sub.add_parser("eval", help="score estimated positions against the truth", formatter_class=fmt)
    ev.add_argument("--truth", required=True, help="instance file holding true sensor positions")
    ev.add_argument("--estimate", required=True, help="positions CSV written by solve")
    ev.add_argument("--errors", default=None, help="errors CSV written by solve (recomputed from positions if absent)")
    ev.add_argument("--bin-width", type=float, default=metrics.get("bin_width", 0.0049), help="histogram bin width")
    ev.add_argument("--sigma-ref", type=float, default=metrics.get("sigma_ref", 0.008), help="reference Gaussian sigma")
    ev.add_argument("--threshold", type=float, default=metrics.get("threshold", 0.022), help="tail threshold")
    ev.add_argument("--out-histogram", default="histogram.csv", help="histogram CSV (bin_lo,bin_hi,count,p,q)")

    sw = sub.add_parser("sweep", help="run a multi-network experiment", formatter_class=fmt)
    sw.add_argument("--kind", choices=SWEEP_CHOICES, required=True, help="sweep kind")
    sw.add_argument("--config", default=None, help="sweep config file (YAML or JSON)")
    sw.add_argument("--out-dir", default="results", help="directory for the CSV files")
    sw.add_argument("--quick", action="store_true", help="desk-scale run (fewer networks and sensors)")
    sw.add_argument("--networks", type=int, default=None, help="override the number of networks")
    sw.add_argument("--workers", type=int, default=None, help="override the worker count")
    sw.add_argument("--seed", type=int, default=None, help="override the master seed")
    sw.add_argument("--no-timing", action="store_true", help="record solve times as 0 (byte-stable CSVs)")

    dump = sub.add_parser("dump-fig9", help="true vs estimated coordinates of one small network", formatter_class=fmt)
    dump.add_argument("--out", default="fig9_positions.csv", help="positions CSV to write")
    dump.add_argument("--seed", type=int, default=fig9.get("seed", 9), help="network seed")
    dump.add_argument("--sensors", type=int, default=fig9.get("sensors", 20), help="number of sensors")
    dump.add_argument("--anchors", type=int, default=fig9.get("anchors", 5), help="number of anchors")
    dump.add_argument("--radio-range", type=float, default=fig9.get("radio_range", 0.4), help="radio range")
    dump.add_argument("--noise-std", type=float, default=fig9.get("noise_std", 0.01), help="noise standard deviation")
    return parser


def _gen(args, cfg, logger) -> int:
    from features.netgen import build_measurements, generate_network
    from loaders.instance import save_instance
    from type_defs import GenConfig, NoiseModel

    gen = GenConfig(
        n=args.sensors, m=args.anchors, radio_range=args.radio_range, noise_std=args.noise_std,
        noise_model=NoiseModel(args.noise_model), max_degree=args.max_degree, seed=args.seed,
        eps_distance=cfg.get("netgen", {}).get("eps_distance", 1e-8),
    )
    truth = generate_network(gen)
    graph = build_measurements(truth, gen)
    save_instance(args.out, graph, truth, gen)
    logger.info(f"Wrote instance {args.out} (v={graph.v})")
    print(f"v: {graph.v}")
    return EXIT_OK


def _solve(args, cfg, logger) -> int:
    from conic.program import dump_program
    from conic.solver import SolverSettings, SolveStatus
    from features.models import ObjectiveKind
    from features.pipeline import solve_instance
    from loaders.instance import load_instance
    from output import emit, write_errors, write_positions

    objective = ObjectiveKind.parse(args.objective, args.gamma)
    settings = SolverSettings.from_config(
        cfg.get("solver", {}), tol_gap=args.tol_gap, tol_feas=args.tol_feas, max_iters=args.max_iters,
    )
    problems = settings.errors()
    if problems:
        from utils.errors import ConfigError
        raise ConfigError(problems)

    graph, truth = load_instance(args.instance)
    outcome = solve_instance(graph, objective, settings, truth)
    result = outcome.result

    if args.dump_program:
        from pathlib import Path
        Path(args.dump_program).write_text(dump_program(outcome.model.program), encoding="utf-8")

    fields = {
        "status": result.status.value,
        "gap": result.gap,
        "iterations": result.iterations,
        "wall_time": result.wall_time,
        "objective_value": result.primal_objective,
    }
    if outcome.accuracy is not None:
        fields["pe"] = outcome.accuracy.pe
    emit(fields)

    if result.status == SolveStatus.NUMERICAL_FAILURE:
        logger.error(f"Solver failed: {result.message}")
        return EXIT_NUMERICAL
    if result.status == SolveStatus.SUSPECTED_INFEASIBLE:
        logger.error(f"Solver suspects infeasibility: {result.message}")
        return EXIT_INFEASIBLE

    if args.out_positions:
        write_positions(args.out_positions, outcome.positions.x_hat)
    if args.out_errors:
        write_errors(args.out_errors, outcome.model.edge_order, outcome.errors)
    return EXIT_OK


def _errors_from_positions(graph, X: np.ndarray) -> np.ndarray:
    """Model squared distance minus measured, from estimated coordinates"""
    A = graph.anchor_array()
    out = [float(np.sum((X[e.i] - X[e.j]) ** 2)) - e.d_hat ** 2 for e in graph.sensor_edges]
    out += [float(np.sum((A[e.k] - X[e.j]) ** 2)) - e.d_hat ** 2 for e in graph.anchor_edges]
    return np.asarray(out, dtype=float)


def _eval(args, cfg, logger) -> int:
    from features.metrics import entropy_report, histogram_frame, position_error, tail_fraction
    from loaders.instance import load_instance
    from output import emit, read_errors, read_positions, write_frame
    from utils.errors import ConfigError, LengthMismatch

    graph, truth = load_instance(args.truth)
    if truth is None:
        raise ConfigError(f"{args.truth} holds no true sensor positions")
    X = read_positions(args.estimate)
    if X.shape[0] != truth.n:
        raise LengthMismatch(f"estimate has {X.shape[0]} sensors, truth has {truth.n}")

    errors = read_errors(args.errors) if args.errors else _errors_from_positions(graph, X)
    if errors.size != graph.v:
        raise LengthMismatch(f"{errors.size} errors for {graph.v} measured edges")

    accuracy = position_error(truth, X, errors)
    report = entropy_report(errors, args.bin_width, args.sigma_ref, cfg.get("metrics", {}).get("q_floor", 1e-12))
    write_frame(args.out_histogram, histogram_frame(report))
    emit({
        "pe": accuracy.pe,
        "relative_entropy_bits": report.d_bits,
        "tail_fraction": tail_fraction(errors, args.threshold),
        "f1": accuracy.f1,
        "f2": accuracy.f2,
        "bins": report.histogram.num_bins,
    })
    return EXIT_OK


def _sweep(args, cfg, logger) -> int:
    from features.experiments import run_sweep
    from loaders.sweep import build_experiment, load_sweep_file
    from output import print_summary, write_sweep

    file_values = load_sweep_file(args.config) if args.config else {}
    overrides = {"num_networks": args.networks, "workers": args.workers, "master_seed": args.seed}
    if args.no_timing:
        overrides["record_timing"] = False
    experiment = build_experiment(args.kind, file_values, overrides, quick=args.quick)

    outcome = run_sweep(experiment)
    paths = write_sweep(args.out_dir, outcome.kind, outcome.rows, outcome.records)
    print_summary(outcome.rows, outcome.notes)
    print(f"summary: {paths['summary']}")
    print(f"networks: {paths['networks']}")
    if outcome.all_failed:
        logger.error(f"Sweep {outcome.kind}: every network failed")
        return EXIT_ALL_FAILED
    return EXIT_OK


def _dump_fig9(args, cfg, logger) -> int:
    from conic.solver import SolverSettings
    from features.experiments import DEFAULT_OBJECTIVES, position_dump
    from output import write_frame
    from type_defs import GenConfig

    gen = GenConfig(n=args.sensors, m=args.anchors, radio_range=args.radio_range,
                    noise_std=args.noise_std, seed=args.seed)
    df = position_dump(gen, DEFAULT_OBJECTIVES, SolverSettings.from_config(cfg.get("solver", {})))
    path = write_frame(args.out, df)
    print(f"positions: {path}")
    return EXIT_OK


COMMANDS = {
    "gen": _gen,
    "solve": _solve,
    "eval": _eval,
    "sweep": _sweep,
    "dump-fig9": _dump_fig9,
}


def main(argv: Optional[List[str]] = None) -> int:
    # 0. Initialize logger (must be first)
    from loaders import config as config_loader
    from utils.logger import setup_logger, get_logger

    config = config_loader.load()
    setup_logger(config.get("logging", {}))
    logger = get_logger("main")

    args = build_parser(config).parse_args(argv)
    logger.info(f"Command: {args.command}")

    from utils.errors import BadStatus, EmptyGraph, LocalizationError
    try:
        return COMMANDS[args.command](args, config, logger)
    except EmptyGraph as e:
        logger.error(f"Empty measurement graph: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_EMPTY_GRAPH
    except BadStatus as e:
        logger.error(f"Unusable solution: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (LocalizationError, ValueError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
