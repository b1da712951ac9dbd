"""
Command-line interface.

``rafpy solve`` recovers one sampled instance and prints its evaluation as JSON
(exit 0 if the success criterion is met, 2 if not). ``rafpy bench`` runs a
Monte-Carlo sweep and writes CSV and JSON reports. ``rafpy cdp`` runs the
coded-diffraction pipeline on an image or on random signals. Usage errors exit 1.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import sys
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Any, NoReturn

from rafpy import __version__
from rafpy.config import (
    SEED_ENV,
    build_init_config,
    build_solver_config,
    load_config,
    pick,
    resolve_seed,
)
from rafpy.experiments import (
    Experiment,
    SweepSpec,
    run,
    run_cdp_recovery,
    to_jsonable,
)
from rafpy.init import InitConfig, initialize
from rafpy.metrics import SUCCESS_THRESHOLD, evaluate
from rafpy.rng import derive_seed
from rafpy.sensing import Variant, sample_instance
from rafpy.solver import SchemeKind, SolverConfig, solve
from rafpy.util import name_to_variant, parse_float, parse_sweep

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_RECOVERED = 2

BENCH_EXPERIMENTS = {
    "success-rate": Experiment.SUCCESS_RATE,
    "nmse": Experiment.NMSE_VS_SNR,
    "init": Experiment.INIT_QUALITY,
    "limit-hist": Experiment.LIMIT_HISTOGRAM,
}

DEFAULT_RATIOS = {
    Experiment.SUCCESS_RATE: "1:5:0.5",
    Experiment.INIT_QUALITY: "2,5,10",
    Experiment.LIMIT_HISTOGRAM: "",
}
DEFAULT_SNRS = "10,20,30,40,50"


class _Parser(argparse.ArgumentParser):
    """argparse, but usage errors exit with status 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        msg = f"expected an integer, got '{text}'"
        raise argparse.ArgumentTypeError(msg) from None
    if value < 1:
        msg = f"must be positive, got {value}"
        raise argparse.ArgumentTypeError(msg)
    return value


def _sweep(text: str) -> list[float]:
    try:
        return parse_sweep(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _float(text: str) -> float:
    try:
        return parse_float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _common_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON config with init/solver/problem sections")
    common.add_argument("--seed", type=int, help=f"master seed (default: ${SEED_ENV} or 0)")
    common.add_argument("--threads", type=_positive_int, help="cap on concurrent trials (default: logical cores)")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    common.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")
    return common


def _algorithm_parser(*, with_model: bool) -> argparse.ArgumentParser:
    algo = _Parser(add_help=False)
    group = algo.add_argument_group("algorithm")
    if with_model:
        group.add_argument("--model", help="real-gaussian, complex-gaussian or cdp (default: real-gaussian)")
    group.add_argument("--iters", type=_positive_int, help="gradient iterations T")
    group.add_argument("--mu", type=float, help="step size (default: 2 real, 6 complex/CDP)")
    group.add_argument("--beta", type=float, help="RAF weight parameter (default: 10 real, 5 complex/CDP)")
    group.add_argument("--alpha", type=float, help="threshold of the hard-truncation scheme")
    group.add_argument("--scheme", choices=[kind.value for kind in SchemeKind], help="gradient weights (default: raf)")
    group.add_argument("--stop-tol", type=float, help="stop once ||psi - |Az||| / ||psi|| drops below this")
    group.add_argument("--gamma", type=float, help="initialization weight exponent (default: 0.5)")
    group.add_argument("--subset-fraction", type=float, help="|S|/m for the initialization (default: 3/13)")
    group.add_argument("--power-iters", type=_positive_int, help="power-method iterations (default: 200)")
    group.add_argument("--lanczos", action="store_true", help="use ARPACK Lanczos instead of the power method")
    return algo


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rafpy", description="Phase retrieval by reweighted amplitude flow.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_parser()

    solve_p = sub.add_parser(
        "solve",
        parents=[common, _algorithm_parser(with_model=True)],
        help="recover one sampled instance and print its evaluation as JSON",
    )
    solve_p.add_argument("--n", type=_positive_int, help="signal length (default: 200)")
    solve_p.add_argument("--m", type=_positive_int, help="Gaussian measurement count (default: 5n)")
    solve_p.add_argument("--masks", type=_positive_int, help="CDP mask count K (default: 4)")
    solve_p.add_argument("--snr", type=_float, help="SNR in dB, 'inf' for noiseless (default)")
    solve_p.add_argument("--threshold", type=float, help=f"success threshold (default: {SUCCESS_THRESHOLD:g})")
    solve_p.add_argument("--trace-file", type=Path, help="write every iterate to an ADIOS2 BP file")
    solve_p.set_defaults(handler=cmd_solve)

    bench_p = sub.add_parser(
        "bench",
        parents=[common, _algorithm_parser(with_model=True)],
        help="run a Monte-Carlo sweep and write CSV + JSON reports",
    )
    bench_p.add_argument("experiment", choices=sorted(BENCH_EXPERIMENTS), help="which study to run")
    bench_p.add_argument("--n", type=_positive_int, help="signal length (default: 200)")
    bench_p.add_argument("--ratios", type=_sweep, help="m/n values as start:stop:step or a,b,c")
    bench_p.add_argument("--snrs", type=_sweep, help=f"SNRs in dB for nmse, 'inf' allowed (default: {DEFAULT_SNRS})")
    bench_p.add_argument("--mn", type=_sweep, help="m/n values for nmse (default: 3,4,5)")
    bench_p.add_argument("--gammas", type=_sweep, help="exponents compared by init (default: 0,0.5)")
    bench_p.add_argument("--trials", type=_positive_int, help="trials per sweep point (default: 100)")
    bench_p.add_argument("--threshold", type=float, help=f"success threshold (default: {SUCCESS_THRESHOLD:g})")
    bench_p.add_argument("--out", type=Path, default=Path("report.csv"), help="CSV path; the JSON report is written next to it")
    bench_p.add_argument("--traces", action="store_true", help="keep per-trial residual traces in the JSON report")
    bench_p.add_argument("--timing", action="store_true", help="include wall-clock times (reports are then not reproducible)")
    bench_p.set_defaults(handler=cmd_bench)

    cdp_p = sub.add_parser(
        "cdp",
        parents=[common, _algorithm_parser(with_model=False)],
        help="coded-diffraction recovery of an image or of random signals",
    )
    source = cdp_p.add_mutually_exclusive_group()
    source.add_argument("--image", type=Path, help="PNG or PGM image; each band is recovered separately")
    source.add_argument("--random-signal", type=int, metavar="N", help="recover random complex signals of length N (default: 256)")
    cdp_p.add_argument("--masks", type=int, help="mask count K (default: 4)")
    cdp_p.add_argument("--trials", type=_positive_int, help="random signals to recover (default: 1)")
    cdp_p.add_argument("--threshold", type=float, help=f"success threshold (default: {SUCCESS_THRESHOLD:g})")
    cdp_p.add_argument("--out-dir", type=Path, default=Path(), help="where recovered.png and cdp_report.json/csv go")
    cdp_p.set_defaults(handler=cmd_cdp)
    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger("rafpy").setLevel(level)


def _configs(
    args: argparse.Namespace,
    variant: Variant,
    sections: Mapping[str, Mapping[str, Any]],
    **defaults: int,
) -> tuple[InitConfig, SolverConfig]:
    """
    Init and solver configs: built-in defaults, then ``defaults`` (``power_iters``
    and ``max_iters``), then the config file, then flags.
    """
    init_section = dict(sections["init"])
    solver_section = dict(sections["solver"])
    if "power_iters" in defaults:
        init_section.setdefault("power_iters", defaults["power_iters"])
    if "max_iters" in defaults:
        solver_section.setdefault("max_iters", defaults["max_iters"])
    init_cfg = build_init_config(
        init_section,
        {
            "gamma": args.gamma,
            "subset_fraction": args.subset_fraction,
            "power_iters": args.power_iters,
            "method": "lanczos" if args.lanczos else None,
        },
    )
    solver_cfg = build_solver_config(
        variant,
        solver_section,
        {"step_size": args.mu, "max_iters": args.iters, "stop_tol": args.stop_tol},
        {"kind": args.scheme, "beta": args.beta, "alpha": args.alpha},
    )
    return init_cfg, solver_cfg


def _write_stdout(text: str) -> None:
    sys.stdout.write(text)
    sys.stdout.flush()


def cmd_solve(args: argparse.Namespace) -> int:
    sections = load_config(args.config)
    problem = sections["problem"]
    variant = name_to_variant(pick(args.model, problem, "model", "real-gaussian"))
    n = int(pick(args.n, problem, "n", 200))
    if variant is Variant.CDP:
        m_or_k = int(pick(args.masks, problem, "masks", 4))
    else:
        m_or_k = int(pick(args.m, problem, "m", 5 * n))
    seed = resolve_seed(args.seed, problem)
    snr = float(pick(args.snr, problem, "snr", math.inf))
    threshold = float(pick(args.threshold, problem, "threshold", SUCCESS_THRESHOLD))
    init_cfg, solver_cfg = _configs(args, variant, sections)

    instance = sample_instance(variant, n, m_or_k, seed, snr_db=snr)
    start = initialize(instance, dataclasses.replace(init_cfg, seed=derive_seed(seed, "init")))
    if args.trace_file is None:
        result = solve(instance, start.z0, solver_cfg)
    else:
        from rafpy.tracefile import TraceFile, describe_instance

        with TraceFile(args.trace_file, "w") as trace:
            describe_instance(trace, instance)
            result = solve(instance, start.z0, solver_cfg, callback=trace.recorder())
        logger.info("wrote %d trace steps to %s", len(result.trace), args.trace_file)

    report = evaluate(instance, result.z_final, threshold)
    payload = {
        "model": variant.value,
        "n": n,
        "m": instance.m,
        "seed": seed,
        "snr_db": snr,
        "noise_sigma": instance.noise_sigma,
        "iterations": result.iterations_run,
        "init_relative_error": evaluate(instance, start.z0, threshold).relative_error,
        "loss": result.trace[-1].loss,
        **report.to_dict(),
    }
    _write_stdout(json.dumps(to_jsonable(payload), indent=2, sort_keys=True) + "\n")
    logger.info("solved in %.3f s", result.elapsed)
    return EXIT_OK if report.success else EXIT_NOT_RECOVERED


def _report_paths(out: Path) -> tuple[Path, Path]:
    csv_path = out if out.suffix else out.with_suffix(".csv")
    return csv_path, csv_path.with_suffix(".json")


def _floats(values: Any) -> tuple[float, ...]:
    if isinstance(values, str):
        return tuple(parse_sweep(values)) if values else ()
    return tuple(float(v) for v in values)


def cmd_bench(args: argparse.Namespace) -> int:
    sections = load_config(args.config)
    problem = sections["problem"]
    experiment = BENCH_EXPERIMENTS[args.experiment]
    variant = name_to_variant(pick(args.model, problem, "model", "real-gaussian"))
    init_cfg, solver_cfg = _configs(args, variant, sections)
    if experiment is Experiment.NMSE_VS_SNR:
        values = pick(args.snrs, problem, "snrs", DEFAULT_SNRS)
    else:
        values = pick(args.ratios, problem, "ratios", DEFAULT_RATIOS[experiment])
    spec = SweepSpec(
        experiment=experiment,
        n=int(pick(args.n, problem, "n", 200)),
        values=_floats(values),
        ratios=_floats(pick(args.mn, problem, "mn", "3,4,5")),
        gammas=_floats(pick(args.gammas, problem, "gammas", "0,0.5")),
        trials=int(pick(args.trials, problem, "trials", 100)),
        master_seed=resolve_seed(args.seed, problem),
        variant=variant,
        init=init_cfg,
        solver=solver_cfg,
        success_threshold=float(pick(args.threshold, problem, "threshold", SUCCESS_THRESHOLD)),
        threads=pick(args.threads, problem, "threads", None),
        keep_traces=args.traces,
        include_timing=args.timing,
    )
    report = run(spec)
    csv_path, json_path = _report_paths(args.out)
    report.write_csv(csv_path)
    report.write_json(json_path)
    logger.info("wrote %s and %s", csv_path, json_path)
    _write_stdout(report.summary() + "\n")
    return EXIT_OK


def cmd_cdp(args: argparse.Namespace) -> int:
    sections = load_config(args.config)
    problem = sections["problem"]
    masks = int(pick(args.masks, problem, "masks", 4))
    if masks < 1:
        msg = f"--masks must be positive, got {masks}"
        raise ValueError(msg)
    n = int(pick(args.random_signal, problem, "n", 256))
    if n < 1:
        msg = f"--random-signal must be positive, got {n}"
        raise ValueError(msg)
    init_cfg, solver_cfg = _configs(args, Variant.CDP, sections, power_iters=100, max_iters=100)
    spec = SweepSpec(
        experiment=Experiment.CDP_RECOVERY,
        n=n,
        values=(float(masks),),
        trials=int(pick(args.trials, problem, "trials", 1)),
        master_seed=resolve_seed(args.seed, problem),
        variant=Variant.CDP,
        init=init_cfg,
        solver=solver_cfg,
        success_threshold=float(pick(args.threshold, problem, "threshold", SUCCESS_THRESHOLD)),
        threads=pick(args.threads, problem, "threads", None),
    )
    args.out_dir.mkdir(parents=True, exist_ok=True)
    image_out = args.out_dir / "recovered.png" if args.image is not None else None
    report = run_cdp_recovery(spec, args.image, image_out)
    report.write_json(args.out_dir / "cdp_report.json")
    report.write_csv(args.out_dir / "cdp_report.csv")
    logger.info("wrote reports to %s", args.out_dir)
    _write_stdout(report.summary() + "\n")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args)
    try:
        return int(args.handler(args))
    except (ValueError, OSError, ImportError) as exc:
        logger.error("%s", exc)  # noqa: TRY400
        return EXIT_USAGE
