"""
Kernel SVM on the breast cancer and digits tables
=================================================

The Gram matrix is computed once per (ansatz, N, seed); stratified 5-fold
cross-validation then slices it for training and testing.
"""

import numpy as np

from matchkernel import experiments, svm

wbc = experiments.load_dataset("wbc")            # min-max scaled to [0, 1]
print(wbc.n_samples, wbc.feature_count, wbc.class_count)

K, header = experiments.compute_gram(wbc, "fPQC", 8, seed=0)
print(header["depth"], header["num_params"])

res = svm.cross_validate(K, wbc.y, folds=5, seed=0, ansatz="fPQC", n_qubits=8, dataset="wbc")
print(f"fPQC N=8: test {res.mean_test:.3f} +- {res.std_test:.3f}, train {res.mean_train:.3f}")

# entangled and product-state variants side by side
for kind in ("fPQC", "hfPQC", "tensor_fPQC"):
    r = experiments.run_experiment(wbc, kind, 8, seed=0)
    print(f"{kind:12s} {r.mean_test:.3f}")

# the digits table: ten classes, one-vs-rest
digits = experiments.load_dataset("digits")
sub = digits.subset(np.arange(0, digits.n_samples, 4))
Kd, _ = experiments.compute_gram(sub, "hfPQC", 8, seed=0)
model = svm.one_vs_rest(Kd, sub.y)
print(len(model.models), np.mean(model.predict(Kd) == sub.y))

# results print as JSON lines, the same records the command line tool appends
print(res.to_json()[:120], "...")
