"""``matchkernel`` command-line tool.

Exit codes: 0 success, 1 configuration error, 2 data error,
3 numerical verification failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import dataio, experiments
from .circuits import AnsatzKind
from .contraction import NumericalError
from .experiments import ConfigError
from .statevector import ResourceError

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _kinds(text: str) -> list[AnsatzKind]:
    try:
        return [AnsatzKind.parse(k.strip()) for k in text.split(",") if k.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _ints(text: str) -> list[int]:
    try:
        return experiments.parse_int_list(text)
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def _dataset_args(p):
    p.add_argument("--dataset", required=True,
                   help="CSV file, or 'wbc' / 'digits' for the bundled tables")
    p.add_argument("--label-col", default="-1",
                   help="label column name or 0-based index (default: last column)")


def _common_args(p):
    p.add_argument("--threads", type=_positive_int, default=experiments.default_threads(),
                   help="worker threads (default: available cores; 1 = canonical serial run)")
    p.add_argument("--overwrite", action="store_true", help="replace existing output files")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="matchkernel",
                 description="Free-fermion quantum kernels and SVM experiments.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("kernel", help="write one Gram matrix (CSV) and its JSON header")
    _dataset_args(p)
    p.add_argument("--ansatz", type=_kinds, default=[AnsatzKind.FPQC])
    p.add_argument("--qubits", type=_ints, required=True)
    p.add_argument("--seeds", type=_ints, default=[0])
    p.add_argument("--out", required=True, help="Gram CSV path; the header goes to <stem>.json")
    _common_args(p)

    p = sub.add_parser("classify", help="cross-validated SVM accuracy per (ansatz, N, seed)")
    _dataset_args(p)
    p.add_argument("--ansatz", type=_kinds, default=[AnsatzKind.FPQC],
                   help="comma list of " + ", ".join(k.value for k in AnsatzKind))
    p.add_argument("--qubits", type=_ints, required=True, help="e.g. 4,8,16 or 4-12:2")
    p.add_argument("--seeds", type=_ints, default=[0])
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--c-reg", type=float, default=1.0, help="SVM regularisation C")
    p.add_argument("--scale-per-fold", action="store_true",
                   help="fit min-max scaling on each training fold instead of the full dataset")
    p.add_argument("--out", help="JSON-lines results file (appended to unless --overwrite)")
    _common_args(p)

    p = sub.add_parser("verify", help="differential test against the dense simulator")
    p.add_argument("--max-n", type=int, default=6)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("bench", help="runtime scaling of kernel evaluation")
    p.add_argument("--qubits", type=_ints, default=[8, 16, 32, 64])
    p.add_argument("--repeats", type=_positive_int, default=5)
    p.add_argument("--ansatz", type=_kinds, default=[AnsatzKind.FPQC])
    p.add_argument("--features", type=_positive_int, default=64,
                   help="feature count of the random benchmark data")
    p.add_argument("--out", help="timing CSV path (default: stdout)")
    p.add_argument("--overwrite", action="store_true")
    return ap


def _single(values, flag):
    if len(values) != 1:
        raise ConfigError(f"{flag} takes a single value here, got {values}")
    return values[0]


def _check_writable(path, overwrite):
    if path is not None and Path(path).exists() and not overwrite:
        raise ConfigError(f"{path} exists; pass --overwrite to replace it")


def cmd_kernel(args) -> int:
    kind = _single(args.ansatz, "--ansatz")
    n = _single(args.qubits, "--qubits")
    seed = _single(args.seeds, "--seeds")
    experiments.check_qubits(kind, n)
    ds = experiments.load_dataset(args.dataset, args.label_col)
    csv_path, header_path = experiments.write_kernel(ds, kind, n, seed, args.out,
                                                     args.threads, args.overwrite)
    print(f"wrote {csv_path} ({ds.n_samples}x{ds.n_samples}) and {header_path}")
    return EXIT_OK


def cmd_classify(args) -> int:
    cfg = experiments.ExperimentConfig(
        dataset=args.dataset, kinds=args.ansatz, qubits=args.qubits, seeds=args.seeds,
        label_col=args.label_col, folds=args.folds, C=args.c_reg, out=args.out,
        scale_per_fold=args.scale_per_fold, threads=args.threads, overwrite=args.overwrite)
    results = list(experiments.run_classify(cfg, log=lambda s: print(s, flush=True)))
    if cfg.out:
        # summaries always come from the whole results file, never from memory
        results = experiments.read_results(cfg.out)
        tidy = Path(cfg.out).with_suffix(".tidy.csv")
        tidy.write_text(experiments.tidy_csv(results), encoding="utf-8")
    print()
    print(experiments.summary_table(results))
    return EXIT_OK


def cmd_verify(args) -> int:
    report = experiments.run_verify(args.max_n, args.trials, args.seed)
    if args.trials == 0:
        print("warning: zero trials requested, nothing was checked", file=sys.stderr)
    print(report.text())
    return EXIT_OK if report.passed else EXIT_NUMERICAL


def cmd_bench(args) -> int:
    kind = _single(args.ansatz, "--ansatz")
    _check_writable(args.out, args.overwrite)
    rows, b_kernel, b_row = experiments.run_bench(args.qubits, args.repeats, kind, args.features)
    table = experiments.bench_csv(rows)
    if args.out:
        Path(args.out).write_text(table, encoding="utf-8")
    else:
        print(table, end="")
    print(f"fitted exponent b: kernel_value {b_kernel:.3f}, gram row {b_row:.3f}")
    return EXIT_OK


COMMANDS = {"kernel": cmd_kernel, "classify": cmd_classify, "verify": cmd_verify,
            "bench": cmd_bench}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # usage errors and --help report through the return code like everything else
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ResourceError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (dataio.DataError, ValueError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
