"""Experiment drivers behind the command-line tool.

Kernel files, cross-validated classification sweeps, the oracle
differential check and the runtime benchmark. Everything here is
deterministic given its arguments and seeds.
"""
from __future__ import annotations

import csv
import io
import json
import os
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import dataio, statevector, svm
from .circuits import AnsatzKind, CircuitSpec, build_ansatz, encode_angles
from .contraction import gram_matrix, kernel_row, kernel_value, marginal_probability
from .pfaffian import pfaffian_batch
from .transfer import compile_transfer

BUILTIN_DATASETS = ("wbc", "digits")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


def default_threads() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def parse_int_list(text: str, what: str = "value") -> list[int]:
    """``"4,8,16"``, ``"2-6"`` (inclusive) or ``"8-32:8"`` (with step), mixed freely."""
    out = []
    for item in str(text).split(","):
        item = item.strip()
        if not item:
            continue
        try:
            if "-" in item.lstrip("-"):
                span, _, step = item.partition(":")
                lo, hi = span.split("-", 1)
                out.extend(range(int(lo), int(hi) + 1, int(step) if step else 1))
            else:
                out.append(int(item))
        except ValueError:
            raise ConfigError(f"cannot parse {what} list {text!r}") from None
    if not out:
        raise ConfigError(f"empty {what} list {text!r}")
    return out


def check_qubits(kind: AnsatzKind, n_qubits: int) -> None:
    if n_qubits < 2:
        raise ConfigError(f"need at least 2 qubits, got {n_qubits}")
    if not kind.fermionic and kind is not AnsatzKind.TENSOR_PQC \
            and n_qubits > statevector.MAX_STATE_QUBITS:
        raise ConfigError(f"{kind} is simulated densely and limited to "
                          f"{statevector.MAX_STATE_QUBITS} qubits, got {n_qubits}")


def load_dataset(name_or_path, label_col="label", scale: bool = True) -> dataio.Dataset:
    """Load a CSV file, or one of the bundled tables ``wbc`` / ``digits``."""
    path = Path(str(name_or_path))
    if not path.exists() and str(name_or_path).lower() in BUILTIN_DATASETS:
        ds = load_builtin(str(name_or_path).lower())
    else:
        if not path.exists():
            raise dataio.DataError(f"dataset {name_or_path!r} not found")
        ds = dataio.load_csv(path, label_col)
    return dataio.minmax_scale(ds) if scale else ds


def load_builtin(name: str) -> dataio.Dataset:
    # scikit-learn ships both tables; same values as scripts/fetch_datasets.py writes
    from sklearn.datasets import load_breast_cancer, load_digits
    bunch = {"wbc": load_breast_cancer, "digits": load_digits}[name]()
    labels = tuple(str(c) for c in np.unique(bunch.target))
    return dataio.Dataset(X=np.asarray(bunch.data, dtype=float),
                          y=np.asarray(bunch.target, dtype=np.int64), name=name,
                          label_map=labels)


def compute_gram(ds: dataio.Dataset, kind, n_qubits: int, seed: int,
                 threads: int = 1) -> tuple[np.ndarray, dict]:
    kind = AnsatzKind.parse(kind)
    check_qubits(kind, n_qubits)
    spec, params = build_ansatz(n_qubits, ds.feature_count, kind, seed)
    K = gram_matrix(spec, params, ds.X, workers=threads)
    header = {"N": n_qubits, "kind": kind.value, "seed": seed, "dataset": ds.name,
              "dataset_hash": ds.digest(), "n_points": ds.n_samples,
              "chi": ds.feature_count, "depth": spec.depth, "num_params": spec.num_params,
              "c_theta": params.c_theta, "c_x": params.c_x}
    return K, header


def write_kernel(ds: dataio.Dataset, kind, n_qubits: int, seed: int, out,
                 threads: int = 1, overwrite: bool = False) -> tuple[Path, Path]:
    out = Path(out)
    if not overwrite and (out.exists() or dataio.header_path(out).exists()):
        raise ConfigError(f"{out} exists; pass --overwrite to replace it")
    K, header = compute_gram(ds, kind, n_qubits, seed, threads)
    return dataio.save_gram(out, K, header)


# ----------------------------------------------------------------------------
# classification sweeps

@dataclass
class ExperimentConfig:
    dataset: str
    kinds: list
    qubits: list
    seeds: list
    label_col: str = "label"
    folds: int = 5
    C: float = 1.0
    out: str | None = None
    scale_per_fold: bool = False
    threads: int = 1
    overwrite: bool = False

    def __post_init__(self):
        self.kinds = [AnsatzKind.parse(k) for k in self.kinds]
        if self.folds < 2:
            raise ConfigError(f"need at least 2 folds, got {self.folds}")
        if self.C <= 0:
            raise ConfigError(f"regularisation C must be positive, got {self.C}")
        if self.threads < 1:
            raise ConfigError(f"thread count must be positive, got {self.threads}")
        for k in self.kinds:
            for n in self.qubits:
                check_qubits(k, n)


def per_fold_scaled_cv(raw: dataio.Dataset, kind, n_qubits: int, seed: int, folds: int,
                       C: float, threads: int = 1) -> svm.ExperimentResult:
    """Cross-validation with min-max parameters fitted on each training fold.

    Test rows are scaled with the training statistics (and clipped into
    ``[0, 1]``), so one Gram matrix is computed per fold.
    """
    start = time.perf_counter()
    kind = AnsatzKind.parse(kind)
    spec, params = build_ansatz(n_qubits, raw.feature_count, kind, seed)
    result = svm.ExperimentResult(ansatz=kind.value, n_qubits=n_qubits, seed=seed, C=C,
                                  folds=folds, dataset=raw.name)
    for train, test in svm.stratified_folds(raw.y, folds, seed):
        lo, hi = dataio.minmax_fit(raw.X[train])
        K = gram_matrix(spec, params, dataio.minmax_apply(raw.X, lo, hi), workers=threads)
        a, b = svm.evaluate_split(K, raw.y, train, test, C)
        result.per_fold.append({"train_acc": a, "test_acc": b})
    result.wall_time_s = time.perf_counter() - start
    return result


def run_experiment(ds: dataio.Dataset, kind, n_qubits: int, seed: int, folds: int = 5,
                   C: float = 1.0, threads: int = 1) -> svm.ExperimentResult:
    """Gram matrix once, then stratified cross-validation on its slices."""
    start = time.perf_counter()
    K, _ = compute_gram(ds, kind, n_qubits, seed, threads)
    result = svm.cross_validate(K, ds.y, folds, seed, C, ansatz=AnsatzKind.parse(kind).value,
                                n_qubits=n_qubits, dataset=ds.name, workers=threads)
    result.wall_time_s = time.perf_counter() - start
    return result


def run_classify(cfg: ExperimentConfig, log=None):
    """Yield one :class:`ExperimentResult` per ``(kind, N, seed)``, appending each to ``cfg.out``."""
    ds = load_dataset(cfg.dataset, cfg.label_col, scale=not cfg.scale_per_fold)
    out = Path(cfg.out) if cfg.out else None
    if out is not None and cfg.overwrite and out.exists():
        out.unlink()
    for kind in cfg.kinds:
        for n in cfg.qubits:
            for seed in cfg.seeds:
                if cfg.scale_per_fold:
                    res = per_fold_scaled_cv(ds, kind, n, seed, cfg.folds, cfg.C, cfg.threads)
                else:
                    res = run_experiment(ds, kind, n, seed, cfg.folds, cfg.C, cfg.threads)
                if out is not None:
                    # one line per finished cell so interrupted sweeps keep their results
                    with out.open("a", encoding="utf-8") as fh:
                        fh.write(res.to_json() + "\n")
                if log:
                    log(f"{kind.value:12s} N={n:<3d} seed={seed:<4d} "
                        f"test {res.mean_test:.4f} +- {res.std_test:.4f}  "
                        f"train {res.mean_train:.4f}  ({res.wall_time_s:.1f} s)")
                yield res


def read_results(path) -> list[svm.ExperimentResult]:
    path = Path(path)
    records = []
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                records.append(svm.ExperimentResult.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise dataio.DataError(f"{path}: line {line_no}: bad result record ({exc})") from exc
    return records


def summarize(results) -> list[dict]:
    """Per ``(kind, N)``: test and train accuracy over all folds of all seeds."""
    groups: dict[tuple, list] = {}
    for r in results:
        groups.setdefault((r.ansatz, r.n_qubits), []).append(r)
    rows = []
    for (kind, n), rs in sorted(groups.items()):
        test = np.concatenate([r.test_acc for r in rs])
        train = np.concatenate([r.train_acc for r in rs])
        rows.append({"kind": kind, "N": n, "seeds": len(rs),
                     "mean_test": float(test.mean()), "std_test": float(test.std()),
                     "mean_train": float(train.mean()), "gap": float(train.mean() - test.mean())})
    return rows


def summary_table(results) -> str:
    lines = [f"{'kind':12s} {'N':>4s} {'seeds':>5s}  {'test acc':>17s}  {'train':>6s}  {'gap':>7s}"]
    for r in summarize(results):
        lines.append(f"{r['kind']:12s} {r['N']:4d} {r['seeds']:5d}  "
                     f"{r['mean_test']:.4f} +- {r['std_test']:.4f}  "
                     f"{r['mean_train']:.4f}  {r['gap']:+.4f}")
    return "\n".join(lines)


def tidy_csv(results) -> str:
    """Plot-ready rows ``kind, N, seed, mean, std`` (test accuracy over folds)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "N", "seed", "mean", "std"])
    for r in results:
        w.writerow([r.ansatz, r.n_qubits, r.seed, repr(r.mean_test), repr(r.std_test)])
    return buf.getvalue()


# ----------------------------------------------------------------------------
# differential verification

VERIFY_TOL = {"transfer": 1e-10, "kernel": 1e-8, "marginal": 1e-8, "pfaffian": 1e-8}
FERMIONIC_KINDS = (AnsatzKind.FPQC, AnsatzKind.HFPQC, AnsatzKind.TENSOR_FPQC)


@dataclass
class VerifyReport:
    trials: int
    max_dev: dict = field(default_factory=lambda: {k: 0.0 for k in VERIFY_TOL})
    failures: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, category: str, dev: float, case: dict) -> None:
        self.max_dev[category] = max(self.max_dev[category], float(dev))
        if not dev < VERIFY_TOL[category]:
            best = self.failures.get(category)
            # keep the smallest failing circuit for reproduction
            if best is None or _case_size(case) < _case_size(best):
                self.failures[category] = {**case, "deviation": float(dev)}

    def text(self) -> str:
        lines = [f"{'category':10s} {'max deviation':>14s} {'tolerance':>10s}  status"]
        for cat, tol in VERIFY_TOL.items():
            ok = "FAIL" if cat in self.failures else "ok"
            lines.append(f"{cat:10s} {self.max_dev[cat]:14.3e} {tol:10.0e}  {ok}")
        for cat, case in self.failures.items():
            lines.append(f"minimal failing {cat} case: {json.dumps(case)}")
        return "\n".join(lines)


def _case_size(case: dict) -> tuple:
    spec = case.get("circuit") or {}
    return (spec.get("n_qubits", case.get("dim", 0)), len(spec.get("layout", ())))


def _random_spec(rng, max_n: int) -> tuple[CircuitSpec, object, int]:
    n = int(rng.integers(2, max_n + 1))
    chi = int(rng.integers(1, 2 * n + 1))
    kind = FERMIONIC_KINDS[int(rng.integers(len(FERMIONIC_KINDS)))]
    spec, params = build_ansatz(n, chi, kind, int(rng.integers(2 ** 31)))
    return spec, params, chi


def run_verify(max_n: int = 6, trials: int = 50, seed: int = 0,
               kernel_fn=kernel_value) -> VerifyReport:
    """Random-circuit differential test of the fermionic engine against dense simulation.

    ``kernel_fn`` is swappable so a deliberately broken kernel can be checked
    to trip the report.
    """
    if not 2 <= max_n <= 8:
        raise ConfigError(f"max N must lie in 2..8, got {max_n}")
    if trials < 0:
        raise ConfigError("trial count must be non-negative")
    rng = np.random.default_rng(seed)
    report = VerifyReport(trials)
    for _ in range(trials):
        spec, params, chi = _random_spec(rng, max_n)
        x, xp = rng.random(chi), rng.random(chi)
        angles = encode_angles(x, params, spec)
        case = {"circuit": spec.to_dict(), "theta_r": params.theta_r.tolist(),
                "x": x.tolist(), "x_prime": xp.tolist()}

        dev = abs(kernel_fn(spec, params, x, xp) - statevector.oracle_kernel(spec, params, x, xp))
        report.record("kernel", dev, case)

        R = compile_transfer(spec, angles)
        if spec.n_qubits <= statevector.MAX_TRANSFER_QUBITS:
            dev = np.abs(R - statevector.brute_force_transfer(spec, angles)).max()
            report.record("transfer", dev, case)

        n = spec.n_qubits
        bits = rng.integers(0, 2, n)
        k = int(rng.integers(1, min(4, n) + 1))
        measured = sorted(rng.choice(np.arange(1, n + 1), k, replace=False).tolist())
        state = statevector.simulate_state(spec, angles, bits)
        ones = [i + 1 for i in range(n) if bits[i]]
        total, worst = 0.0, 0.0
        for outcome in range(2 ** k):
            out = [(outcome >> (k - 1 - i)) & 1 for i in range(k)]
            p = marginal_probability(R, ones, measured, out)
            worst = max(worst, abs(p - statevector.marginal_probability(state, measured, out)))
            total += p
        report.record("marginal", max(worst, abs(total - 1)),
                      {**case, "input_bits": bits.tolist(), "measured": measured})

        dim = 2 * int(rng.integers(1, 21))
        A = rng.normal(size=(dim, dim))
        A = A - A.T
        pf = pfaffian_batch(A[None])[0]
        det = np.linalg.det(A)
        report.record("pfaffian", abs(pf * pf - det) / max(abs(det), 1e-300), {"dim": dim})
    return report


# ----------------------------------------------------------------------------
# runtime benchmark

@dataclass
class BenchRow:
    n_qubits: int
    kernel_s: float
    gram_row_s: float


def fit_exponent(ns, ts) -> float:
    """Slope ``b`` of the least-squares fit ``log t = log a + b log N``."""
    return float(np.polyfit(np.log(ns), np.log(ts), 1)[0])


def run_bench(qubits, repeats: int = 5, kind="fPQC", features: int = 64, row_points: int = 32,
              seed: int = 0) -> tuple[list[BenchRow], float, float]:
    """Median wall time of one ``kernel_value`` and of one Gram row per ``N``.

    Returns the rows and the fitted exponents for the two timings.
    """
    kind = AnsatzKind.parse(kind)
    if repeats < 1:
        raise ConfigError("need at least one repeat")
    for n in qubits:
        check_qubits(kind, n)
    rng = np.random.default_rng(seed)
    X = rng.random((row_points + 1, features))
    rows = []
    for n in qubits:
        spec, params = build_ansatz(n, features, kind, seed)
        kernel_value(spec, params, X[0], X[1])  # warm caches and the compiled Pfaffian
        tk, tr = [], []
        for _ in range(repeats):
            t0 = time.perf_counter()
            kernel_value(spec, params, X[0], X[1])
            tk.append(time.perf_counter() - t0)
            t0 = time.perf_counter()
            kernel_row(spec, params, X[0], X[1:])
            tr.append(time.perf_counter() - t0)
        rows.append(BenchRow(n, statistics.median(tk), statistics.median(tr)))
    if len(rows) < 2:
        return rows, float("nan"), float("nan")
    ns = [r.n_qubits for r in rows]
    return (rows, fit_exponent(ns, [r.kernel_s for r in rows]),
            fit_exponent(ns, [r.gram_row_s for r in rows]))


def bench_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "kernel_value_s", "gram_row_s"])
    for r in rows:
        w.writerow([r.n_qubits, f"{r.kernel_s:.6e}", f"{r.gram_row_s:.6e}"])
    return buf.getvalue()
