"""Kernel SVM classification on precomputed Gram matrices.

Binary problems are solved by libsvm's SMO (through scikit-learn's
``SVC(kernel="precomputed")``); multiclass problems use one-vs-rest, and
experiments use stratified k-fold cross-validation over a single Gram matrix.
"""
from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from sklearn.model_selection import StratifiedKFold
from sklearn.svm import SVC

KKT_TOL = 1e-3
SWEEP_CAP = 10_000


@dataclass
class SVMModel:
    """Binary soft-margin SVM in dual form.

    ``dual_coef[i] = alpha_i * y_i`` for every training point (zero off the
    support set), so the decision function is ``K_cross @ dual_coef + intercept``.
    """

    dual_coef: np.ndarray
    intercept: float
    support: np.ndarray
    C: float

    @property
    def alpha(self) -> np.ndarray:
        return np.abs(self.dual_coef)

    def decision_function(self, K_cross) -> np.ndarray:
        K_cross = np.atleast_2d(np.asarray(K_cross, dtype=float))
        if K_cross.shape[1] != self.dual_coef.size:
            raise ValueError(f"kernel block has {K_cross.shape[1]} columns, "
                             f"model was trained on {self.dual_coef.size} points")
        return K_cross @ self.dual_coef + self.intercept


def _check_kernel(K, n_labels):
    K = np.asarray(K, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError(f"training kernel must be square, got shape {K.shape}")
    if K.shape[0] != n_labels:
        raise ValueError(f"kernel has {K.shape[0]} rows for {n_labels} labels")
    return K


def fit(K_train, y, C: float = 1.0, tol: float = KKT_TOL, max_sweeps: int = SWEEP_CAP) -> SVMModel:
    """Solve the dual problem for labels in ``{-1, +1}`` to KKT tolerance ``tol``."""
    y = np.asarray(y)
    K = _check_kernel(K_train, y.size)
    if not set(np.unique(y)) <= {-1, 1}:
        raise ValueError("binary labels must be -1 or +1")
    if np.unique(y).size < 2:
        raise ValueError("training data contains a single class")
    n = y.size
    svc = SVC(kernel="precomputed", C=C, tol=tol, max_iter=max_sweeps * n)
    svc.fit(K, y)
    dual = np.zeros(n)
    dual[svc.support_] = svc.dual_coef_[0]
    return SVMModel(dual_coef=dual, intercept=float(svc.intercept_[0]),
                    support=svc.support_.copy(), C=C)


def predict(model: SVMModel, K_cross) -> np.ndarray:
    """Signs of the decision function; an exact zero maps to +1."""
    return np.where(model.decision_function(K_cross) >= 0, 1, -1)


def dual_objective(model: SVMModel, K, y) -> float:
    """``sum(alpha) - 1/2 (alpha y)^T K (alpha y)``."""
    ay = model.dual_coef
    return float(model.alpha.sum() - 0.5 * ay @ np.asarray(K) @ ay)


@dataclass
class OneVsRestModel:
    classes: np.ndarray
    models: list

    def decision_function(self, K_cross) -> np.ndarray:
        if len(self.classes) == 2:
            d = self.models[0].decision_function(K_cross)
            return np.stack([-d, d], axis=1)
        return np.stack([m.decision_function(K_cross) for m in self.models], axis=1)

    def predict(self, K_cross) -> np.ndarray:
        if len(self.classes) == 2:
            return self.classes[(predict(self.models[0], K_cross) > 0).astype(int)]
        # argmax returns the first maximum, i.e. the smallest class index on ties
        return self.classes[np.argmax(self.decision_function(K_cross), axis=1)]


def one_vs_rest(K, y, C: float = 1.0, **fit_kwargs) -> OneVsRestModel:
    """One binary model per class; two classes collapse to a single model."""
    y = np.asarray(y)
    K = _check_kernel(K, y.size)
    classes = np.unique(y)
    if classes.size < 2:
        raise ValueError("need at least two classes")
    if classes.size == 2:
        return OneVsRestModel(classes, [fit(K, np.where(y == classes[1], 1, -1), C, **fit_kwargs)])
    return OneVsRestModel(classes, [fit(K, np.where(y == c, 1, -1), C, **fit_kwargs)
                                    for c in classes])


def stratified_folds(y, folds: int = 5, seed: int = 0) -> list[tuple[np.ndarray, np.ndarray]]:
    """Seeded stratified ``(train, test)`` index splits."""
    y = np.asarray(y)
    if folds < 2:
        raise ValueError(f"need at least 2 folds, got {folds}")
    classes, counts = np.unique(y, return_counts=True)
    if counts.min() < folds:
        raise ValueError(f"class {classes[counts.argmin()]} has {counts.min()} samples, "
                         f"fewer than {folds} folds")
    skf = StratifiedKFold(n_splits=folds, shuffle=True, random_state=seed)
    return list(skf.split(np.zeros(y.size), y))


def evaluate_split(K, y, train, test, C: float = 1.0) -> tuple[float, float]:
    """Train on ``train`` and return ``(train_accuracy, test_accuracy)``."""
    y = np.asarray(y)
    K = np.asarray(K)
    model = one_vs_rest(K[np.ix_(train, train)], y[train], C)
    train_acc = float(np.mean(model.predict(K[np.ix_(train, train)]) == y[train]))
    test_acc = float(np.mean(model.predict(K[np.ix_(test, train)]) == y[test]))
    return train_acc, test_acc


@dataclass
class ExperimentResult:
    ansatz: str
    n_qubits: int
    seed: int
    C: float
    folds: int
    per_fold: list = field(default_factory=list)
    dataset: str = ""
    wall_time_s: float = 0.0

    @property
    def train_acc(self) -> np.ndarray:
        return np.array([f["train_acc"] for f in self.per_fold])

    @property
    def test_acc(self) -> np.ndarray:
        return np.array([f["test_acc"] for f in self.per_fold])

    @property
    def mean_test(self) -> float:
        return float(self.test_acc.mean())

    @property
    def std_test(self) -> float:
        return float(self.test_acc.std())

    @property
    def mean_train(self) -> float:
        return float(self.train_acc.mean())

    @property
    def std_train(self) -> float:
        return float(self.train_acc.std())

    @property
    def gap(self) -> float:
        """Mean train accuracy minus mean test accuracy."""
        return self.mean_train - self.mean_test

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(mean_test=self.mean_test, std_test=self.std_test,
                 mean_train=self.mean_train, std_train=self.std_train)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentResult":
        keys = ("ansatz", "n_qubits", "seed", "C", "folds", "per_fold", "dataset", "wall_time_s")
        return cls(**{k: d[k] for k in keys if k in d})


def cross_validate(gram, y, folds: int = 5, seed: int = 0, C: float = 1.0,
                   ansatz: str = "", n_qubits: int = 0, dataset: str = "",
                   workers: int = 1) -> ExperimentResult:
    """Stratified k-fold accuracy of a one-vs-rest SVM on a precomputed Gram matrix.

    The Gram matrix is sliced per fold, never recomputed. Folds are
    independent and may run on ``workers`` threads; results stay keyed by fold.
    """
    start = time.perf_counter()
    y = np.asarray(y)
    gram = np.asarray(gram, dtype=float)
    if gram.shape != (y.size, y.size):
        raise ValueError(f"Gram matrix shape {gram.shape} does not match {y.size} labels")
    splits = stratified_folds(y, folds, seed)
    run = lambda split: evaluate_split(gram, y, split[0], split[1], C)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            scores = list(pool.map(run, splits))
    else:
        scores = [run(split) for split in splits]
    return ExperimentResult(ansatz=str(ansatz), n_qubits=n_qubits, seed=seed, C=C, folds=folds,
                            per_fold=[{"train_acc": a, "test_acc": b} for a, b in scores],
                            dataset=dataset, wall_time_s=time.perf_counter() - start)
