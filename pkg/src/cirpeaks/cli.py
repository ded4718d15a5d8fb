"""Command-line front end.

Subcommands mirror the pipeline stages so each is independently scriptable:

  generate   synthetic trace (+ metadata sidecar and ground-truth JSON)
  train      fit a predictor to a trace; writes model JSON + history CSV
  detect     run a trained model over a trace; report JSON + overlay plot
  filter     same artifacts with a classical filter trend instead
  compare    metrics table for several methods against ground truth
  gradcheck  finite-difference audit of the analytic gradients

Exit codes: 0 success, 1 validation/parse error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import filters, nn
from .core import (
    SynthConfig,
    generate_synthetic_trace,
    load_ground_truth,
    load_trace,
    save_ground_truth,
    save_trace,
    standardize,
)
from .core.windows import make_windows
from .detect import DetectConfig, detect_anomalies, residual, save_report
from .errors import CirPeaksError, NumericalError, ParseError, ValidationError
from .evaluate import (
    compare_methods,
    filter_method,
    lstm_method,
    save_comparison_csv,
)
from .plotting import save_overlay

GRADCHECK_THRESHOLD = 1e-4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(1)


def _require_inputs(*paths) -> None:
    for p in paths:
        if p is not None and not Path(p).exists():
            raise ValidationError(f"input path does not exist: {p}")


def _sibling(path, suffix: str) -> Path:
    path = Path(path)
    return path.with_name(path.stem + suffix)


def _add_detect_flags(p) -> None:
    p.add_argument("--eps-value", type=float, default=0.5,
                   help="stage-1 radius on standardized residuals (default 0.5)")
    p.add_argument("--eps-index", type=float, default=10.0,
                   help="stage-2 radius in sample indices (default 10)")
    p.add_argument("--min-samples", type=int, default=2,
                   help="density threshold for both stages (default 2)")
    p.add_argument("--include-negative", action="store_true",
                   help="keep anomaly candidates with residual <= 0")
    p.add_argument("--include-warmup", action="store_true",
                   help="do not mask the first k residuals")
    p.add_argument("--svg", action="store_true", help="also write an SVG overlay plot")


def _detect_cfg(args) -> DetectConfig:
    return DetectConfig(
        eps_value=args.eps_value,
        min_samples=args.min_samples,
        eps_index=args.eps_index,
        positive_only=not args.include_negative,
    )


def _build_parser() -> _Parser:
    parser = _Parser(prog="cirpeaks", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a synthetic trace with ground truth")
    p.add_argument("--preset", choices=["demo"], default="demo",
                   help="base synthetic configuration (default: demo)")
    p.add_argument("--n-samples", type=int, default=None)
    p.add_argument("--n-clusters", type=int, default=None)
    p.add_argument("--noise-floor-db", type=float, default=None)
    p.add_argument("--noise-sigma-db", type=float, default=None)
    p.add_argument("--snr-min-db", type=float, default=None)
    p.add_argument("--snr-max-db", type=float, default=None)
    p.add_argument("--taps-min", type=int, default=None)
    p.add_argument("--taps-max", type=int, default=None)
    p.add_argument("--decay-db-per-tap", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True, help="trace CSV path")

    p = sub.add_parser("train", help="train a predictor on a trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--preset", choices=nn.PRESET_NAMES, default="table4")
    p.add_argument("--window-k", type=int, default=100,
                   help="input window length (default 100)")
    p.add_argument("--scale", type=float, default=1.0, choices=[1.0, 0.5, 0.25, 0.125])
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--learning-rate", type=float, default=1e-3)
    p.add_argument("--no-shuffle", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True, help="model JSON path")

    p = sub.add_parser("detect", help="detect peak clusters with a trained model")
    p.add_argument("--trace", required=True)
    p.add_argument("--model", required=True)
    _add_detect_flags(p)
    p.add_argument("-o", "--output", required=True, help="report JSON path")

    p = sub.add_parser("filter", help="detect peak clusters with a classical filter trend")
    p.add_argument("--trace", required=True)
    p.add_argument("--preset", choices=filters.PRESET_NAMES, default=None)
    p.add_argument("--kind", choices=filters.KINDS, default=None)
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--cutoff-fraction-fs", type=float, default=None)
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--polyorder", type=int, default=None)
    p.add_argument("--dump-coefficients", default=None,
                   help="write the designed biquad sections to this CSV (IIR kinds)")
    _add_detect_flags(p)
    p.add_argument("-o", "--output", required=True, help="report JSON path")

    p = sub.add_parser("compare", help="compare methods against ground truth")
    p.add_argument("--trace", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--methods", default="lstm,butter-table5,bessel-table5,savgol-table5,median-table5",
                   help="comma-separated: lstm and/or filter preset names")
    p.add_argument("--model-preset", choices=nn.PRESET_NAMES, default="table4",
                   help="architecture for the lstm method")
    p.add_argument("--window-k", type=int, default=100)
    p.add_argument("--scale", type=float, default=1.0, choices=[1.0, 0.5, 0.25, 0.125])
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--tol", type=int, default=10, help="matching tolerance in samples")
    p.add_argument("--seed", type=int, default=0)
    _add_detect_flags(p)
    p.add_argument("-o", "--output", required=True, help="comparison CSV path")

    p = sub.add_parser("gradcheck", help="audit analytic gradients with finite differences")
    p.add_argument("--preset", choices=nn.PRESET_NAMES, default="table4")
    p.add_argument("--scale", type=float, default=1.0, choices=[1.0, 0.5, 0.25, 0.125])
    p.add_argument("--window-k", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _cmd_generate(args) -> int:
    overrides = {}
    base = SynthConfig(seed=args.seed)
    if args.n_samples is not None:
        overrides["n_samples"] = args.n_samples
    if args.n_clusters is not None:
        overrides["n_clusters"] = args.n_clusters
    if args.noise_floor_db is not None:
        overrides["noise_floor_db"] = args.noise_floor_db
    if args.noise_sigma_db is not None:
        overrides["noise_sigma_db"] = args.noise_sigma_db
    if args.snr_min_db is not None or args.snr_max_db is not None:
        lo, hi = base.peak_snr_db
        overrides["peak_snr_db"] = (
            args.snr_min_db if args.snr_min_db is not None else lo,
            args.snr_max_db if args.snr_max_db is not None else hi,
        )
    if args.taps_min is not None or args.taps_max is not None:
        lo, hi = base.taps_per_cluster
        overrides["taps_per_cluster"] = (
            args.taps_min if args.taps_min is not None else lo,
            args.taps_max if args.taps_max is not None else hi,
        )
    if args.decay_db_per_tap is not None:
        overrides["cluster_decay_db_per_tap"] = args.decay_db_per_tap
    config = SynthConfig(seed=args.seed, **overrides)
    trace, truth = generate_synthetic_trace(config)
    save_trace(trace, args.output)
    save_ground_truth(truth, _sibling(args.output, ".truth.json"))
    print(f"wrote {args.output} ({len(trace)} samples, {len(truth.clusters)} truth clusters)")
    return 0


def _cmd_train(args) -> int:
    _require_inputs(args.trace)
    trace = load_trace(args.trace)
    std, scaler = standardize(trace.samples)
    dataset = make_windows(std, args.window_k)
    spec = nn.preset(args.preset, input_window=args.window_k, scale=args.scale)
    cfg = nn.TrainConfig(
        epochs=args.epochs,
        batch_size=args.batch_size,
        learning_rate=args.learning_rate,
        seed=args.seed,
        shuffle=not args.no_shuffle,
    )
    model = nn.build_model(spec, args.seed)
    trained, history = nn.train(model, dataset, cfg, scaler=scaler)
    nn.save_model(trained, args.output)
    history.save(_sibling(args.output, ".history.csv"))
    print(
        f"trained {args.preset} (scale {args.scale}) for {cfg.epochs} epochs "
        f"in {history.total_seconds:.1f}s; final loss {history.losses[-1]:.6f}"
    )
    return 0


def _run_detection(args, trace, predicted, warmup_len: int) -> None:
    res = residual(trace, predicted, warmup_len=0 if args.include_warmup else warmup_len)
    report = detect_anomalies(res, _detect_cfg(args))
    save_report(report, args.output)
    save_overlay(
        trace,
        predicted,
        report,
        _sibling(args.output, ".plot.csv"),
        _sibling(args.output, ".svg") if args.svg else None,
        title=trace.label,
    )
    if report.diagnostic:
        print(f"note: {report.diagnostic}")
    print(f"wrote {args.output} ({len(report.clusters)} clusters)")


def _cmd_detect(args) -> int:
    _require_inputs(args.trace, args.model)
    trace = load_trace(args.trace)
    model = nn.load_model(args.model)
    predicted = nn.predict_series(model, trace)
    _run_detection(args, trace, predicted, model.spec.input_window)
    return 0


def _cmd_filter(args) -> int:
    _require_inputs(args.trace)
    if (args.preset is None) == (args.kind is None):
        raise ValidationError("give exactly one of --preset or --kind")
    if args.preset is not None:
        spec = filters.filter_preset(args.preset)
    else:
        spec = filters.FilterSpec(
            kind=args.kind,
            order=args.order,
            cutoff_fraction_fs=args.cutoff_fraction_fs,
            window=args.window,
            polyorder=args.polyorder,
        )
    trace = load_trace(args.trace)
    if args.dump_coefficients is not None:
        filters.save_coefficients_csv(filters.design(spec), args.dump_coefficients)
    predicted = filters.filter_trend(spec, trace)
    _run_detection(args, trace, predicted, warmup_len=0)
    return 0


def _cmd_compare(args) -> int:
    _require_inputs(args.trace, args.truth)
    trace = load_trace(args.trace)
    truth = load_ground_truth(args.truth)
    methods = []
    for name in [m.strip() for m in args.methods.split(",") if m.strip()]:
        if name == "lstm":
            cfg = nn.TrainConfig(epochs=args.epochs, seed=args.seed)
            methods.append(
                lstm_method(args.model_preset, args.window_k, args.scale, cfg)
            )
        else:
            methods.append(filter_method(name))
    rows = compare_methods(trace, truth, methods, _detect_cfg(args), args.tol)
    save_comparison_csv(rows, args.output)
    for row in rows:
        if row.error:
            print(f"{row.name}: FAILED ({row.error})")
        else:
            m = row.metrics
            extra = f", train {row.train_seconds:.1f}s" if row.train_seconds else ""
            print(
                f"{row.name}: P={m.precision:.3f} R={m.recall:.3f} F1={m.f1:.3f} "
                f"({row.wall_seconds:.1f}s{extra})"
            )
    print(f"wrote {args.output}")
    return 0


def _cmd_gradcheck(args) -> int:
    spec = nn.preset(args.preset, input_window=args.window_k, scale=args.scale)
    worst = nn.grad_check(spec, args.seed)
    print(f"max relative gradient error: {worst:.6e}")
    if not (worst < GRADCHECK_THRESHOLD):
        print(f"FAIL: above {GRADCHECK_THRESHOLD:.0e}", file=sys.stderr)
        return 2
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "train": _cmd_train,
    "detect": _cmd_detect,
    "filter": _cmd_filter,
    "compare": _cmd_compare,
    "gradcheck": _cmd_gradcheck,
}


def run(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (ValidationError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except CirPeaksError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
