"""Export the two benchmark datasets to CSV.

Both tables ship inside scikit-learn (the UCI Wisconsin diagnostic breast
cancer data and the UCI optical handwritten digits test set), so no network
access is needed. Also writes the small golden subsets used by the tests.

    python3 scripts/fetch_datasets.py [--out data] [--fixtures tests/fixtures]
"""
import argparse
import csv
from pathlib import Path

import numpy as np
from sklearn.datasets import load_breast_cancer, load_digits

GOLDEN_ROWS = 50


def write(path: Path, X, y, names):
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(names) + ["label"])
        for row, label in zip(X, y):
            w.writerow([repr(float(v)) if not float(v).is_integer() else str(int(v)) for v in row]
                       + [int(label)])


def golden(y, seed=0):
    # stratified: the same fraction of every class, in original row order
    rng = np.random.default_rng(seed)
    classes = np.unique(y)
    per = max(1, GOLDEN_ROWS // classes.size)
    rows = np.concatenate([rng.choice(np.flatnonzero(y == c), per, replace=False) for c in classes])
    return np.sort(rows)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="data")
    ap.add_argument("--fixtures", default="tests/fixtures")
    args = ap.parse_args()
    out, fix = Path(args.out), Path(args.fixtures)
    out.mkdir(parents=True, exist_ok=True)
    fix.mkdir(parents=True, exist_ok=True)

    wbc = load_breast_cancer()
    names = [n.replace(" ", "_") for n in wbc.feature_names]
    write(out / "wbc.csv", wbc.data, wbc.target, names)
    rows = golden(wbc.target)
    write(fix / "wbc_golden.csv", wbc.data[rows], wbc.target[rows], names)

    digits = load_digits()
    names = [f"pixel_{i}" for i in range(digits.data.shape[1])]
    write(out / "digits.csv", digits.data, digits.target, names)
    rows = golden(digits.target)
    write(fix / "digits_golden.csv", digits.data[rows], digits.target[rows], names)


if __name__ == "__main__":
    main()
