"""Command-line front end: detect | roc | threshold | simulate.

Every run is reproducible: all subcommands honor --seed (a missing seed is
generated and printed, never silent), every output file is accompanied by a
manifest of key = value lines capturing the full configuration, and repeated
runs with the same configuration produce byte-identical files regardless of
worker count.

Flags override a structured key = value config file (--config); the config
keys mirror the long flag names with underscores.  dB-to-linear conversion
happens only here: core modules speak linear power.
"""

import argparse
import io
import random
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import (
    NoBracketError,
    NoSolutionError,
    RocQuery,
    default_thresholds,
    p_detect_total,
    p_false_total,
    roc_sweep,
    solve_threshold,
)
from .cusum import OutcomeKind, run, write_trace_csv
from .montecarlo import compare, empirical_roc, write_manifest
from .signal_model import (
    SampleSequence,
    ScenarioSpec,
    SensingCase,
    SignalModel,
    generate,
)

_PAPER_SNRS_DB = (-3.0, 0.0, 3.0)
_PAPER_HORIZON_OFFSETS = (20, 40, 60)


def snr_db_to_power(snr_db: float, noise_variance: float) -> float:
    """Linear signal power for an SNR given in dB."""
    return noise_variance * 10.0 ** (snr_db / 10.0)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def _tau_value(text: str) -> int | None:
    if text.strip().lower() == "none":
        return None
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"change point must be >= 1 or 'none', got {text}")
    return value


def _lambda_range(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected MIN:MAX:COUNT")
    lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    if not (0.0 < lo < hi) or count < 1:
        raise argparse.ArgumentTypeError("need 0 < MIN < MAX and COUNT >= 1")
    return lo, hi, count


_CONFIG_TYPES = {
    "snr_db": float,
    "noise_var": float,
    "window": _positive_int,
    "tau": _tau_value,
    "horizon": _positive_int,
    "case": str,
    "lambda": float,
    "lambda_range": _lambda_range,
    "trials": _positive_int,
    "seed": int,
    "out": str,
    "workers": _positive_int,
    "target": float,
    "metric": str,
    "tol": float,
}
# argparse destination for config keys whose name differs
_CONFIG_DEST = {"lambda": "lam"}


def _load_config(path: str) -> dict:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SystemExit(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, text = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _CONFIG_TYPES:
            raise SystemExit(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            value = _CONFIG_TYPES[key](text.strip())
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise SystemExit(f"{path}:{lineno}: bad value for {key}: {exc}")
        values[_CONFIG_DEST.get(key, key)] = value
    return values


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="key = value config file; flags override it")
    shared.add_argument("--snr-db", type=float, default=0.0,
                        help="signal-to-noise ratio in dB (default 0)")
    shared.add_argument("--noise-var", type=float, default=1.0,
                        help="noise variance sigma^2, linear (default 1.0)")
    shared.add_argument("--window", type=_positive_int, default=200,
                        help="window length N in samples (default 200)")
    shared.add_argument("--tau", type=_tau_value, default=100,
                        help="1-based change point, or 'none' (default 100)")
    shared.add_argument("--horizon", type=_positive_int, default=None,
                        help="evaluation horizon L (default tau+40)")
    shared.add_argument("--case", choices=["entrance", "exit"], default="entrance",
                        help="sensing case (default entrance)")
    shared.add_argument("--lambda", dest="lam", type=float, default=None,
                        help="single detection threshold")
    shared.add_argument("--lambda-range", type=_lambda_range, default=None,
                        metavar="MIN:MAX:COUNT",
                        help="log-spaced threshold sweep (default 0.1:50:64)")
    shared.add_argument("--trials", type=_positive_int, default=10_000,
                        help="Monte Carlo trials (default 10000)")
    shared.add_argument("--seed", type=int, default=None,
                        help="base seed; generated and printed when omitted")
    shared.add_argument("--out", default="out", help="output directory (default ./out)")
    shared.add_argument("--workers", type=_positive_int, default=1,
                        help="parallel trial workers; results identical for any count")
    shared.add_argument("--reset-at-change", action="store_true",
                        help="restart the statistic at the change point")
    shared.add_argument("--strict-paper-pf", action="store_true",
                        help="sum false-alarm terms over samples 2..tau instead of 1..tau-1")

    parser = argparse.ArgumentParser(
        prog="cusense",
        description="Finite-window CUSUM spectrum sensing toolkit",
    )
    parser.add_argument("--version", action="version", version=f"cusense {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_detect = sub.add_parser(
        "detect", parents=[shared],
        help="run the detector over a sample file and emit the trace",
    )
    p_detect.add_argument("--input", required=True,
                          help="sample file, one value per line (or first CSV column); '-' for stdin")

    sub.add_parser(
        "roc", parents=[shared],
        help="analytic and empirical ROC over a threshold sweep, with comparison",
    ).add_argument("--paper-figures", action="store_true",
                   help="run the nine-scenario grid: SNR in {-3,0,3} dB x L in tau+{20,40,60}")

    p_thr = sub.add_parser(
        "threshold", parents=[shared],
        help="solve for the threshold achieving a target metric",
    )
    p_thr.add_argument("--target", type=float, required=True,
                       help="target probability, open interval (0, 1)")
    p_thr.add_argument("--metric", choices=["false-alarm", "detection"],
                       default="false-alarm", help="metric to hit (default false-alarm)")
    p_thr.add_argument("--tol", type=float, default=1e-3,
                       help="solver tolerance on the metric (default 1e-3)")
    p_thr.add_argument("--validate", action="store_true",
                       help="estimate the achieved metric by Monte Carlo")

    sub.add_parser(
        "simulate", parents=[shared],
        help="generate a sample window and write it as CSV with a manifest",
    )
    parser.subcommands = sub.choices
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()

    # first pass only to find --config; its values become parser defaults so
    # that explicit flags keep precedence on the real parse
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    known, _ = probe.parse_known_args(argv)
    if known.config:
        config = _load_config(known.config)
        for subparser in parser.subcommands.values():
            subparser.set_defaults(**config)

    args = parser.parse_args(argv)
    try:
        handler = {
            "detect": cmd_detect,
            "roc": cmd_roc,
            "threshold": cmd_threshold,
            "simulate": cmd_simulate,
        }[args.command]
        return handler(args, argv)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _resolve_seed(args) -> int:
    if args.seed is None:
        seed = random.SystemRandom().getrandbits(63)
        print(f"seed = {seed} (generated; pass --seed {seed} to reproduce)")
        return seed
    return int(args.seed)


def _model(args) -> SignalModel:
    return SignalModel(
        noise_variance=args.noise_var,
        signal_power=snr_db_to_power(args.snr_db, args.noise_var),
    )


def _horizon(args, tau: int) -> int:
    if args.horizon is not None:
        return args.horizon
    return min(tau + 40, args.window)


def _thresholds(args, argv) -> np.ndarray:
    if args.lam is not None and args.lambda_range is not None:
        if "--lambda" in argv:
            args.lambda_range = None
        elif "--lambda-range" in argv:
            args.lam = None
        else:
            raise ValueError("specify either lambda or lambda_range, not both")
    if args.lam is not None:
        if not args.lam > 0.0:
            raise ValueError(f"lambda must be > 0, got {args.lam}")
        return np.array([args.lam])
    if args.lambda_range is not None:
        lo, hi, count = args.lambda_range
        return default_thresholds(count, lo, hi) if count > 1 else np.array([lo])
    return default_thresholds()


def _base_manifest(args, command: str, seed: int) -> dict:
    tau = args.tau
    return {
        "command": command,
        "version": __version__,
        "snr_db": args.snr_db,
        "noise_variance": args.noise_var,
        "signal_power": snr_db_to_power(args.snr_db, args.noise_var),
        "window": args.window,
        "tau": "none" if tau is None else tau,
        "case": args.case,
        "seed": seed,
    }


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _read_samples(source: str) -> list[float]:
    """Samples from a file or stdin: one per line, or the last CSV column
    (so the simulate command's index,sample output reads back directly)."""
    if source == "-":
        lines = sys.stdin.read().splitlines()
    else:
        lines = Path(source).read_text().splitlines()
    values = []
    for lineno, raw in enumerate(lines, start=1):
        field = raw.split(",")[-1].strip()
        try:
            values.append(float(field))
        except ValueError:
            if lineno == 1 and field:  # tolerate a single header line
                continue
            raise SystemExit(f"{source}:{lineno}: not a numeric sample: {raw!r}")
    if not values:
        raise SystemExit(f"{source}: no samples found")
    return values


def cmd_detect(args, argv) -> int:
    if args.lam is None:
        raise ValueError("detect requires --lambda")
    values = _read_samples(args.input)
    model = _model(args)
    case = SensingCase(args.case)
    # a change point beyond the window's end means no change inside it
    tau = args.tau if args.tau is None or args.tau <= len(values) else None
    spec = ScenarioSpec(
        model=model, case=case, window_len=len(values),
        change_point=tau,
        seed=args.seed if args.seed is not None else 0,
    )
    samples = SampleSequence(samples=np.asarray(values, dtype=float), spec=spec)
    trace, outcome = run(samples, model, case, args.lam)

    out = _outdir(args)
    trace_path = out / "trace.csv"
    with open(trace_path, "w") as fh:
        write_trace_csv(fh, samples, trace, args.lam)
    # detect consumes no randomness, so no seed is generated for it; a
    # provided seed is still recorded for provenance
    manifest = _base_manifest(args, "detect",
                              args.seed if args.seed is not None else "none")
    manifest.update({
        "input": args.input, "lambda": args.lam, "samples": len(values),
        "outputs": "trace.csv",
    })
    with open(out / "manifest.txt", "w") as fh:
        write_manifest(fh, manifest)

    print(f"trace written to {trace_path}")
    print(f"outcome: {outcome.kind.value}")
    print(f"stop_index: {outcome.stop_index if outcome.stop_index is not None else 'none'}")
    if outcome.delay is not None:
        print(f"delay: {outcome.delay}")
    return 0


def _roc_one(args, out: Path, seed: int, model: SignalModel, tau: int,
             horizon: int, thresholds: np.ndarray):
    query = RocQuery(
        model=model, window_len=args.window, change_point=tau,
        eval_horizon=horizon, case=SensingCase(args.case),
    )
    analytic = roc_sweep(query, thresholds, strict_paper=args.strict_paper_pf)
    empirical = empirical_roc(
        query, thresholds, args.trials, seed,
        reset_at_change=args.reset_at_change, workers=args.workers,
    )
    report = compare(analytic, empirical)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "analytic.csv", "w") as fh:
        analytic.write_csv(fh)
    with open(out / "empirical.csv", "w") as fh:
        empirical.write_csv(fh)
    with open(out / "comparison.csv", "w") as fh:
        report.write_csv(fh)
    print(f"{out}: {report.summary()}")
    return report


def cmd_roc(args, argv) -> int:
    if args.tau is None:
        raise ValueError("roc requires a numeric --tau")
    seed = _resolve_seed(args)
    out = _outdir(args)
    thresholds = _thresholds(args, argv)

    if getattr(args, "paper_figures", False):
        rows = []
        for snr_db in _PAPER_SNRS_DB:
            model = SignalModel(
                noise_variance=args.noise_var,
                signal_power=snr_db_to_power(snr_db, args.noise_var),
            )
            for offset in _PAPER_HORIZON_OFFSETS:
                tau = args.tau
                horizon = tau + offset
                label = f"snr{snr_db:+.0f}dB_L{horizon}"
                report = _roc_one(args, out / label, seed, model, tau,
                                  horizon, thresholds)
                rows.append((label, report))
        with open(out / "summary.csv", "w") as fh:
            fh.write("scenario,max_pf_gap,max_pd_gap,passed\n")
            for label, report in rows:
                fh.write(f"{label},{report.max_pf_gap!r},{report.max_pd_gap!r},"
                         f"{int(report.passed)}\n")
    else:
        tau = args.tau
        horizon = _horizon(args, tau)
        report = _roc_one(args, out, seed, _model(args), tau, horizon, thresholds)

    manifest = _base_manifest(args, "roc", seed)
    manifest.update({
        "horizon": "per-scenario" if getattr(args, "paper_figures", False)
        else _horizon(args, args.tau),
        "trials": args.trials,
        "workers": args.workers,
        "thresholds": ",".join(repr(float(x)) for x in thresholds),
        "reset_at_change": args.reset_at_change,
        "strict_paper_pf": args.strict_paper_pf,
        "paper_figures": getattr(args, "paper_figures", False),
    })
    with open(out / "manifest.txt", "w") as fh:
        write_manifest(fh, manifest)
    return 0


def cmd_threshold(args, argv) -> int:
    if args.tau is None:
        raise ValueError("threshold requires a numeric --tau")
    if not 0.0 < args.target < 1.0:
        raise ValueError(f"target must be inside (0, 1), got {args.target}")
    seed = _resolve_seed(args)
    tau = args.tau
    horizon = _horizon(args, tau)
    query = RocQuery(
        model=_model(args), window_len=args.window, change_point=tau,
        eval_horizon=horizon, case=SensingCase(args.case),
    )
    which = (OutcomeKind.FALSE_ALARM if args.metric == "false-alarm"
             else OutcomeKind.DETECTION)
    try:
        lam = solve_threshold(query, args.target, which, tol=args.tol,
                              strict_paper=args.strict_paper_pf)
    except NoBracketError as exc:
        lo, hi = exc.achievable
        print(f"no solution: target {args.target} outside achievable "
              f"[{lo:.6g}, {hi:.6g}]", file=sys.stderr)
        return 1
    except NoSolutionError as exc:
        print(f"no solution within tol: closest metric {exc.closest_value:.6g} "
              f"at lambda {exc.closest_lambda:.6g}", file=sys.stderr)
        return 1

    if which is OutcomeKind.FALSE_ALARM:
        achieved = p_false_total(lam, query, strict_paper=args.strict_paper_pf)
    else:
        achieved = p_detect_total(lam, query)
    print(f"lambda = {lam!r}")
    print(f"analytic_{args.metric.replace('-', '_')} = {achieved!r}")

    if args.validate:
        emp = empirical_roc(query, np.array([lam]), args.trials, seed,
                            reset_at_change=args.reset_at_change,
                            workers=args.workers)
        point = emp.points[0]
        if which is OutcomeKind.FALSE_ALARM:
            value, se = point.p_false, emp.pf_std_errors[0]
        else:
            value, se = point.p_detect, emp.pd_std_errors[0]
        print(f"empirical_{args.metric.replace('-', '_')} = {value!r} "
              f"(std error {se:.3g}, trials {args.trials})")
    return 0


def cmd_simulate(args, argv) -> int:
    seed = _resolve_seed(args)
    spec = ScenarioSpec(
        model=_model(args), case=SensingCase(args.case),
        window_len=args.window, change_point=args.tau, seed=seed,
    )
    samples = generate(spec)
    out = _outdir(args)
    path = out / "samples.csv"
    buffer = io.StringIO()
    buffer.write("index,sample\n")
    for i, y in enumerate(samples.samples, start=1):
        buffer.write(f"{i},{float(y)!r}\n")
    path.write_text(buffer.getvalue())
    manifest = _base_manifest(args, "simulate", seed)
    manifest.update({"outputs": "samples.csv"})
    with open(out / "manifest.txt", "w") as fh:
        write_manifest(fh, manifest)
    print(f"samples written to {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
