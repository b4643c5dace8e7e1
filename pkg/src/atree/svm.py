"""Binary max-margin classifiers: a linear solver, a kernel dual solver, and
kernel-evaluation accounting used by the test-time cost reports.

Trained models are immutable; prediction is safe under concurrent readers.
A KernelEvalCounter and its per-instance sessions are single-threaded.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

KERNEL_KINDS = ("linear", "rbf", "chi_square", "histogram_intersection")

# Guard for the chi-square denominator on zero bins.
_CHI2_EPS = 1e-12
# Dual weights at or below this are treated as zero when extracting SVs.
_SV_EPS = 1e-10


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus its parameter.

    linear: x.z
    rbf: exp(-gamma*||x - z||^2)
    chi_square: exp(-gamma * sum (x_j - z_j)^2 / (x_j + z_j + eps))
    histogram_intersection: sum min(x_j, z_j)

    The last two require nonnegative features.
    """

    kind: str
    gamma: float | None = None

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValidationError(f"unknown kernel kind {self.kind!r}")
        if self.kind in ("rbf", "chi_square"):
            if self.gamma is None or self.gamma <= 0:
                raise ValidationError(f"{self.kind} kernel needs gamma > 0")
        elif self.gamma is not None:
            raise ValidationError(f"{self.kind} kernel takes no gamma")

    @property
    def is_linear(self):
        return self.kind == "linear"

    def to_dict(self):
        d = {"kind": self.kind}
        if self.gamma is not None:
            d["gamma"] = self.gamma
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(d["kind"], d.get("gamma"))


def _require_nonnegative(A, kind):
    if A.size and A.min() < 0:
        raise ValidationError(f"{kind} kernel requires nonnegative features")


def kernel_matrix(spec, A, B):
    """Gram block k(a_i, b_j) with shape (len(A), len(B))."""
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    B = np.atleast_2d(np.asarray(B, dtype=np.float64))
    if A.shape[1] != B.shape[1]:
        raise ValidationError("kernel operands must share a dimension")
    if spec.kind == "linear":
        return A @ B.T
    if spec.kind == "rbf":
        d2 = (A * A).sum(axis=1)[:, None] + (B * B).sum(axis=1)[None, :] - 2.0 * (A @ B.T)
        return np.exp(-spec.gamma * np.maximum(d2, 0.0))
    if spec.kind == "chi_square":
        _require_nonnegative(A, spec.kind)
        _require_nonnegative(B, spec.kind)
        diff2 = (A[:, None, :] - B[None, :, :]) ** 2
        denom = A[:, None, :] + B[None, :, :] + _CHI2_EPS
        return np.exp(-spec.gamma * (diff2 / denom).sum(axis=2))
    _require_nonnegative(A, spec.kind)
    _require_nonnegative(B, spec.kind)
    return np.minimum(A[:, None, :], B[None, :, :]).sum(axis=2)


def kernel_vector(spec, A, z):
    """k(a_i, z) for a single point z."""
    return kernel_matrix(spec, A, np.asarray(z, dtype=np.float64)[None, :])[:, 0]


@dataclass
class SvmConfig:
    """Solver knobs shared by both trainers.

    max_passes bounds work: full sweeps for the linear solver, n*max_passes
    pairwise updates for the kernel solver. A solver that exhausts the budget
    returns its best iterate rather than raising.
    """

    c: float = 1.0
    tolerance: float = 1e-3
    max_passes: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.c <= 0:
            raise ValidationError("regularization c must be positive")
        if not 0.0 < self.tolerance <= 1e-2:
            raise ValidationError("tolerance must lie in (0, 1e-2]")
        if self.max_passes < 1:
            raise ValidationError("max_passes must be positive")


@dataclass(frozen=True)
class LinearSvmModel:
    """Hyperplane classifier; one evaluation costs O(d) regardless of data size."""

    weights: np.ndarray
    bias: float


@dataclass(frozen=True)
class KernelSvmModel:
    """Dual model: f(x) = sum_i coeff_i * k(sv_i, x) + bias.

    dual_coefficients are label-signed dual weights; sv_ids are stable ids of
    the training samples retained as support vectors, unique across every
    model trained from the same dataset so union-based accounting can share a
    cache.
    """

    support_vectors: np.ndarray
    dual_coefficients: np.ndarray
    bias: float
    kernel: KernelSpec
    sv_ids: np.ndarray

    @property
    def n_support(self):
        return len(self.dual_coefficients)


def _split_labels(y):
    y = np.asarray(y, dtype=np.float64)
    values = set(np.unique(y).tolist())
    if not values <= {-1.0, 1.0}:
        raise ValidationError("labels must be in {+1, -1}")
    if len(values) < 2:
        raise ValidationError("training data must contain both labels")
    return y


def train_linear_svm(X, y, config):
    """Hinge-loss linear SVM via dual coordinate descent.

    The bias is handled by feature augmentation (a constant 1 column), so it
    is weakly regularized along with the weights. Coordinate order is
    shuffled each pass from the configured seed; runs are deterministic.
    """
    X = np.asarray(X, dtype=np.float64)
    y = _split_labels(y)
    n, d = X.shape
    Xa = np.hstack([X, np.ones((n, 1))])
    qd = (Xa * Xa).sum(axis=1)
    alpha = np.zeros(n)
    w = np.zeros(d + 1)
    C = config.c
    rng = np.random.default_rng(config.seed)
    for _ in range(config.max_passes):
        worst = 0.0
        for i in rng.permutation(n):
            g = y[i] * float(Xa[i] @ w) - 1.0
            if alpha[i] <= 0.0:
                pg = min(g, 0.0)
            elif alpha[i] >= C:
                pg = max(g, 0.0)
            else:
                pg = g
            if pg == 0.0:
                continue
            worst = max(worst, abs(pg))
            new = min(max(alpha[i] - g / qd[i], 0.0), C)
            if new != alpha[i]:
                w += (new - alpha[i]) * y[i] * Xa[i]
                alpha[i] = new
        if worst < config.tolerance:
            break
    return LinearSvmModel(w[:d].copy(), float(w[d]))


def train_kernel_svm(X, y, kernel, config, sample_ids=None):
    """Kernel SVM via maximal-violating-pair dual updates.

    Runs until the worst KKT violation falls below the configured tolerance
    or the update budget is exhausted. The full Gram matrix is materialized,
    which is intended for desk-scale node problems. Only samples with a
    nonzero dual weight are retained as support vectors.
    """
    X = np.asarray(X, dtype=np.float64)
    y = _split_labels(y)
    n = len(y)
    if sample_ids is None:
        sample_ids = np.arange(n, dtype=np.int64)
    else:
        sample_ids = np.asarray(sample_ids, dtype=np.int64)
        if sample_ids.shape != (n,):
            raise ValidationError("sample_ids must have one entry per sample")
    K = kernel_matrix(kernel, X, X)
    C = config.c
    alpha = np.zeros(n)
    grad = -np.ones(n)           # gradient of the dual objective at alpha
    pos = y > 0
    for _ in range(config.max_passes * n):
        vals = -y * grad
        up = (pos & (alpha < C)) | (~pos & (alpha > 0))
        low = (~pos & (alpha < C)) | (pos & (alpha > 0))
        vals_up = np.where(up, vals, -np.inf)
        vals_low = np.where(low, vals, np.inf)
        i = int(np.argmax(vals_up))
        j = int(np.argmin(vals_low))
        gap = vals_up[i] - vals_low[j]
        if gap <= config.tolerance:
            break
        eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if eta <= 1e-12:
            eta = 1e-12
        step_i = C - alpha[i] if y[i] > 0 else alpha[i]
        step_j = alpha[j] if y[j] > 0 else C - alpha[j]
        t = min(gap / eta, step_i, step_j)
        if t <= 0.0:
            break
        alpha[i] += y[i] * t
        alpha[j] -= y[j] * t
        grad += t * y * (K[:, i] - K[:, j])
    free = (alpha > _SV_EPS) & (alpha < C - _SV_EPS)
    if free.any():
        bias = float(np.mean(-y[free] * grad[free]))
    else:
        vals = -y * grad
        up = (pos & (alpha < C)) | (~pos & (alpha > 0))
        low = (~pos & (alpha < C)) | (pos & (alpha > 0))
        hi = vals[up].max() if up.any() else 0.0
        lo = vals[low].min() if low.any() else 0.0
        bias = float((hi + lo) / 2.0)
    keep = alpha > _SV_EPS
    return KernelSvmModel(
        support_vectors=X[keep].copy(),
        dual_coefficients=(alpha[keep] * y[keep]),
        bias=bias,
        kernel=kernel,
        sv_ids=sample_ids[keep].copy(),
    )


class KernelEvalCounter:
    """Counts kernel computations across an evaluation session.

    union_total counts computations actually performed under per-instance
    caching (each sv_id at most once per instance); sum_total counts what an
    uncached evaluation would have performed. per_instance holds
    (union, sum) pairs in instance order.
    """

    def __init__(self):
        self.union_total = 0
        self.sum_total = 0
        self.per_instance = []

    def start_instance(self, x):
        session = _InstanceSession(self, np.asarray(x, dtype=np.float64))
        self.per_instance.append(session.counts)
        return session


class _InstanceSession:
    """Per-instance kernel cache keyed by sv_id; assumes one kernel spec."""

    def __init__(self, counter, x):
        self.counter = counter
        self.x = x
        self.values = {}
        self.kernel = None
        self.counts = [0, 0]  # [union, sum]

    def gather(self, model):
        if self.kernel is None:
            self.kernel = model.kernel
        elif self.kernel != model.kernel:
            raise ValidationError("one evaluation session cannot mix kernel specs")
        ids = model.sv_ids
        missing = [k for k, sid in enumerate(ids) if int(sid) not in self.values]
        if missing:
            fresh = kernel_vector(model.kernel, model.support_vectors[missing], self.x)
            for k, v in zip(missing, fresh):
                self.values[int(ids[k])] = float(v)
            self.counts[0] += len(missing)
            self.counter.union_total += len(missing)
        self.counts[1] += len(ids)
        self.counter.sum_total += len(ids)
        return np.array([self.values[int(sid)] for sid in ids])


def kernel_eval_count_hook():
    """Fresh instrumentation handle; counts reset with each new handle."""
    return KernelEvalCounter()


def decision_value(model, x, session=None):
    """f(x) for either model type; kernel evaluations go through ``session``
    when one is supplied so shared support vectors are computed once per
    instance."""
    x = np.asarray(x, dtype=np.float64)
    if isinstance(model, LinearSvmModel):
        if x.shape[0] != model.weights.shape[0]:
            raise ValidationError("dimension mismatch")
        return float(model.weights @ x + model.bias)
    if x.shape[0] != model.support_vectors.shape[1]:
        raise ValidationError("dimension mismatch")
    if session is not None:
        k = session.gather(model)
    else:
        k = kernel_vector(model.kernel, model.support_vectors, x)
    return float(model.dual_coefficients @ k + model.bias)


def predict(model, x, session=None):
    """Sign of the decision value, with 0 mapped to +1."""
    return 1 if decision_value(model, x, session) >= 0 else -1


def decision_values_batch(model, X):
    X = np.asarray(X, dtype=np.float64)
    if isinstance(model, LinearSvmModel):
        if X.shape[1] != model.weights.shape[0]:
            raise ValidationError("dimension mismatch")
        return X @ model.weights + model.bias
    if X.shape[1] != model.support_vectors.shape[1]:
        raise ValidationError("dimension mismatch")
    return kernel_matrix(model.kernel, X, model.support_vectors) @ model.dual_coefficients + model.bias


def truncate_svs(model, n_keep):
    """Keep the n_keep largest-|coefficient| support vectors and refit bias.

    The bias is shifted by the mean of the dropped component evaluated over
    the original support-vector set, keeping decision levels centered.
    """
    if n_keep < 1:
        raise ValidationError("n_keep must be positive")
    if n_keep >= model.n_support:
        return model
    order = np.argsort(-np.abs(model.dual_coefficients), kind="stable")
    keep = np.sort(order[:n_keep])
    drop = np.sort(order[n_keep:])
    dropped_part = kernel_matrix(model.kernel, model.support_vectors,
                                 model.support_vectors[drop]) @ model.dual_coefficients[drop]
    return KernelSvmModel(
        support_vectors=model.support_vectors[keep].copy(),
        dual_coefficients=model.dual_coefficients[keep].copy(),
        bias=model.bias + float(dropped_part.mean()),
        kernel=model.kernel,
        sv_ids=model.sv_ids[keep].copy(),
    )


def select_c(X, y, kernel, config, grid=(0.01, 0.1, 1.0, 10.0, 100.0), folds=3):
    """Pick C from ``grid`` by k-fold cross-validated accuracy (ties to the
    smaller C). Folds are label-stratified round-robin from the config seed."""
    X = np.asarray(X, dtype=np.float64)
    y = _split_labels(y)
    n = len(y)
    folds = min(folds, int((y > 0).sum()), int((y < 0).sum()))
    if folds < 2:
        raise ValidationError("cross-validation needs at least 2 samples per label")
    rng = np.random.default_rng(config.seed)
    fold_of = np.empty(n, dtype=np.int64)
    for sign in (1, -1):
        members = np.flatnonzero(y == sign)
        members = members[rng.permutation(len(members))]
        fold_of[members] = np.arange(len(members)) % folds
    best_c, best_acc = None, -1.0
    for c in grid:
        trial = SvmConfig(c=c, tolerance=config.tolerance,
                          max_passes=config.max_passes, seed=config.seed)
        correct = 0
        for f in range(folds):
            test = fold_of == f
            if kernel.is_linear:
                model = train_linear_svm(X[~test], y[~test], trial)
            else:
                model = train_kernel_svm(X[~test], y[~test], kernel, trial)
            dv = decision_values_batch(model, X[test])
            correct += int((np.where(dv >= 0, 1, -1) == y[test]).sum())
        acc = correct / n
        if acc > best_acc:
            best_acc, best_c = acc, c
    return best_c
