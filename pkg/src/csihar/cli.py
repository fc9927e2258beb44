"""Command-line entry point: one subcommand per pipeline stage.

Exit codes: 0 ok, 1 runtime failure, 2 usage error.  Every randomized
subcommand prints the seed it ran with so any run can be reproduced exactly.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .classifiers import CLASSIFIER_KINDS, fit_classifier
from .data import assemble_design_matrix, load_dataset_dir, load_sample_csv
from .errors import CsiharError
from .evaluation import (
    compare_datasets,
    dump_report,
    format_comparison_table,
    format_metrics_table,
    load_report,
    run_cross_validation,
    run_train_test_split,
    save_report,
)
from .model_store import load_model, save_model
from .service import ServiceConfig, run_server
from .service.inference import classify_sample
from .synth import SynthConfig, generate_dataset

DEFAULT_SEED = 42


def _say(args, message: str) -> None:
    if not getattr(args, "quiet", False):
        print(message)


def _load_matrix(data_dir: str):
    samples = load_dataset_dir(data_dir)
    if not samples:
        raise CsiharError(f"no sample CSVs found in {data_dir}")
    return assemble_design_matrix(samples)


def cmd_synth(args) -> int:
    cfg = SynthConfig(
        trace_length=args.trace_length,
        noise_sigma=args.noise,
        motion_amplitude=args.motion_amplitude,
        class_separation=args.sep,
        seed=args.seed,
    )
    print(f"seed: {args.seed}")
    manifest = generate_dataset(cfg, args.n_per_class, args.out)
    print(manifest.path)
    return 0


def cmd_train(args) -> int:
    print(f"seed: {args.seed}")
    dm = _load_matrix(args.data)
    model = fit_classifier(args.algo, dm, seed=args.seed)
    predicted = model.predict(dm.rows)
    correct = sum(1 for a, p in zip(dm.labels, predicted) if a == p)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    save_model(model, args.out, training=dm)
    print(f"training accuracy: {correct / dm.n_rows:.4f}")
    _say(args, f"saved {args.algo} model to {args.out}")
    return 0


def _eval_common(args, result, stem: str) -> None:
    out_dir = Path(args.out_dir)
    report_path = save_report(result, out_dir / f"{stem}.json")
    table = format_metrics_table(result)
    (out_dir / f"{stem}.txt").write_text(table, encoding="utf-8")
    print(table, end="")
    _say(args, f"report: {report_path}")


def cmd_eval_cv(args) -> int:
    print(f"seed: {args.seed}")
    dm = _load_matrix(args.data)
    kinds = args.algos.split(",")
    result = run_cross_validation(dm, args.k, kinds, args.seed)
    _eval_common(args, result, f"cv_k{args.k}_seed{args.seed}")
    return 0


def cmd_eval_split(args) -> int:
    print(f"seed: {args.seed}")
    dm = _load_matrix(args.data)
    kinds = args.algos.split(",")
    result = run_train_test_split(dm, args.test_fraction, kinds, args.seed)
    _eval_common(args, result, f"split_{args.test_fraction}_seed{args.seed}")
    return 0


def cmd_compare(args) -> int:
    a = load_report(args.report_a)
    b = load_report(args.report_b)
    result = compare_datasets(a, b)
    print(format_comparison_table(result), end="")
    if args.out:
        Path(args.out).write_text(dump_report(result.as_dict()), encoding="utf-8")
        _say(args, f"comparison written to {args.out}")
    return 0


def cmd_classify(args) -> int:
    envelope = load_model(args.model)
    sample = load_sample_csv(args.sample)
    verdict = classify_sample(envelope.model, envelope.feature_width, sample)
    print(verdict["label"])
    _say(args, f"row agreement: {verdict['row_agreement']:.3f}")
    return 0


def cmd_serve(args) -> int:
    host, _, port = args.listen.rpartition(":")
    if not host or not port.isdigit():
        raise CsiharError(f"--listen must be host:port, got {args.listen!r}")
    model_path = Path(args.model) if args.model else None
    models_dir = Path(args.models_dir) if args.models_dir else (
        model_path.parent if model_path else None
    )
    config = ServiceConfig(
        model_path=model_path,
        models_dir=models_dir,
        captures_dir=Path(args.captures) if args.captures else None,
        reports_dir=Path(args.reports_dir) if args.reports_dir else None,
        static_dir=Path(args.static_dir) if args.static_dir else None,
        expected_feature_width=args.expect_width,
    )
    _say(args, f"listening on {host}:{port}")
    run_server(config, host, int(port))
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--quiet", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="csihar", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic labeled dataset")
    p.add_argument("--n-per-class", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--sep", type=float, default=1.0, help="class separation in [0,1]")
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--trace-length", type=int, default=500)
    p.add_argument("--motion-amplitude", type=float, default=0.5)
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="fit a classifier on a dataset directory")
    p.add_argument("--data", required=True)
    p.add_argument("--algo", choices=CLASSIFIER_KINDS, required=True)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval-cv", help="k-fold cross validation over the classifiers")
    p.add_argument("--data", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--algos", default=",".join(CLASSIFIER_KINDS))
    p.add_argument("--out-dir", default="reports")
    _add_common(p)
    p.set_defaults(func=cmd_eval_cv)

    p = sub.add_parser("eval-split", help="train/test split evaluation")
    p.add_argument("--data", required=True)
    p.add_argument("--test-fraction", type=float, default=0.3)
    p.add_argument("--algos", default=",".join(CLASSIFIER_KINDS))
    p.add_argument("--out-dir", default="reports")
    _add_common(p)
    p.set_defaults(func=cmd_eval_split)

    p = sub.add_parser("compare", help="compare two experiment reports")
    p.add_argument("--report-a", required=True)
    p.add_argument("--report-b", required=True)
    p.add_argument("--out")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("classify", help="classify one capture file with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--sample", required=True)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("serve", help="run the classification HTTP service")
    p.add_argument("--model", help="model file to activate at startup")
    p.add_argument("--captures", help="drop directory; newest csv is the live capture")
    p.add_argument("--listen", default="127.0.0.1:8420")
    p.add_argument("--models-dir")
    p.add_argument("--reports-dir")
    p.add_argument("--static-dir")
    p.add_argument("--expect-width", type=int)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "synth" and args.n_per_class < 1:
        parser.error("--n-per-class must be >= 1")
    if args.command == "eval-cv" and args.k < 2:
        parser.error("--k must be >= 2")

    try:
        return args.func(args)
    except (CsiharError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
