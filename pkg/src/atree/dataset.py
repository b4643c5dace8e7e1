"""Labeled feature-vector datasets: CSV ingestion, synthesis, splitting.

All randomness flows through numpy's default_rng (PCG64); a fixed seed and
parameter tuple reproduce a dataset bit for bit. Datasets are immutable after
construction (their arrays are marked read-only), so they are safe to share
across any number of concurrent readers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParseError, ValidationError


@dataclass(frozen=True)
class LabeledSample:
    """A single training point: feature vector, dense class id, weight."""

    features: np.ndarray
    label: int
    weight: float


class Dataset:
    """Feature matrix plus dense integer labels and nonnegative weights.

    Labels are dense ids in ``[0, num_classes)``; ``label_names[k]`` maps the
    dense id ``k`` back to the label value found in the source data. Weights
    of freshly loaded or generated data are uniform and sum to 1.
    """

    def __init__(self, features, labels, weights, num_classes, label_names=None):
        features = np.ascontiguousarray(features, dtype=np.float64)
        labels = np.ascontiguousarray(labels, dtype=np.int64)
        weights = np.ascontiguousarray(weights, dtype=np.float64)
        if features.ndim != 2 or features.shape[0] == 0 or features.shape[1] == 0:
            raise ValidationError("features must be a non-empty (n, d) matrix")
        n = features.shape[0]
        if labels.shape != (n,) or weights.shape != (n,):
            raise ValidationError("labels and weights must have one entry per sample")
        if num_classes < 2:
            raise ValidationError("a dataset needs at least 2 classes")
        if labels.min() < 0 or labels.max() >= num_classes:
            raise ValidationError("labels must lie in [0, num_classes)")
        if (weights < 0).any():
            raise ValidationError("weights must be nonnegative")
        if label_names is None:
            label_names = list(range(num_classes))
        if len(label_names) != num_classes:
            raise ValidationError("label_names must have one entry per class")
        for arr in (features, labels, weights):
            arr.setflags(write=False)
        self.features = features
        self.labels = labels
        self.weights = weights
        self.num_classes = int(num_classes)
        self.label_names = list(label_names)

    def __len__(self):
        return self.features.shape[0]

    @property
    def dimension(self):
        return self.features.shape[1]

    def sample(self, i):
        return LabeledSample(self.features[i], int(self.labels[i]), float(self.weights[i]))

    def subset(self, indices, renormalize=True):
        """New Dataset restricted to ``indices`` (class ids and names kept)."""
        indices = np.asarray(indices, dtype=np.int64)
        w = self.weights[indices].copy()
        if renormalize:
            total = w.sum()
            if total <= 0:
                raise ValidationError("subset has zero total weight")
            w /= total
        return Dataset(self.features[indices], self.labels[indices], w,
                       self.num_classes, self.label_names)


def _uniform_weights(n):
    return np.full(n, 1.0 / n)


def load_csv(path, has_header=False):
    """Read ``label,f_1,...,f_d`` rows into a Dataset.

    Labels are remapped to dense ids in sorted order of their original values;
    the original values are retained in ``label_names``. Weights are
    initialized uniform.
    """
    raw_labels = []
    rows = []
    dim = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if has_header and lineno == 1:
                continue
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            if len(cells) < 2:
                raise ParseError(f"{path}: line {lineno}: expected a label and at least one feature")
            if dim is None:
                dim = len(cells) - 1
            elif len(cells) - 1 != dim:
                raise ParseError(f"{path}: line {lineno}: expected {dim} features, found {len(cells) - 1}")
            try:
                label = int(cells[0])
            except ValueError:
                raise ParseError(f"{path}: line {lineno}: label {cells[0]!r} is not an integer") from None
            try:
                feats = [float(c) for c in cells[1:]]
            except ValueError:
                raise ParseError(f"{path}: line {lineno}: non-numeric feature value") from None
            raw_labels.append(label)
            rows.append(feats)
    if not rows:
        raise ValidationError(f"{path}: no data rows")
    originals = sorted(set(raw_labels))
    if len(originals) < 2:
        raise ValidationError(f"{path}: found {len(originals)} distinct label(s), need at least 2")
    remap = {orig: k for k, orig in enumerate(originals)}
    labels = np.array([remap[v] for v in raw_labels], dtype=np.int64)
    return Dataset(np.array(rows), labels, _uniform_weights(len(rows)),
                   len(originals), originals)


def write_csv(data, path):
    """Write a Dataset as headerless ``label,f_1,...,f_d`` rows.

    Original label values (``label_names``) are written, so a load/write
    round-trip preserves the file's label vocabulary. Floats are written with
    repr so the round-trip is exact.
    """
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(len(data)):
            cells = [str(data.label_names[data.labels[i]])]
            cells.extend(repr(float(v)) for v in data.features[i])
            fh.write(",".join(cells) + "\n")


# Mixture components of the two-cluster synthetic set: (fraction, class,
# center, stddev). Class 0 owns a distant "anchor" cluster that is linearly
# separable from everything else; the remaining mass interleaves class 1 on
# both sides of a class-0 cluster along the first feature, so no single
# linear separator handles the whole set and the hierarchy must keep
# partitioning below the root.
_TWO_CLUSTER_PARTS = (
    (0.50, 0, (6.5, 0.0), 0.50),
    (0.20, 0, (0.0, 0.0), 0.50),
    (0.15, 1, (-2.5, 0.0), 0.50),
    (0.15, 1, (2.5, 0.0), 0.50),
)


def _largest_remainder_counts(fractions, total):
    raw = [f * total for f in fractions]
    counts = [int(np.floor(r)) for r in raw]
    short = total - sum(counts)
    remainders = sorted(range(len(raw)), key=lambda i: (-(raw[i] - counts[i]), i))
    for i in remainders[:short]:
        counts[i] += 1
    return counts


def generate_two_cluster_2d(count, seed):
    """Two-class 2-D benchmark set with one easy and one interleaved region."""
    if count < 4:
        raise ValidationError("count must be at least 4")
    counts = _largest_remainder_counts([p[0] for p in _TWO_CLUSTER_PARTS], count)
    rng = np.random.default_rng(seed)
    feats = []
    labels = []
    for (_, cls, center, std), k in zip(_TWO_CLUSTER_PARTS, counts):
        if k == 0:
            continue
        feats.append(rng.normal(loc=center, scale=std, size=(k, 2)))
        labels.append(np.full(k, cls, dtype=np.int64))
    features = np.vstack(feats)
    labels = np.concatenate(labels)
    order = rng.permutation(count)
    return Dataset(features[order], labels[order], _uniform_weights(count), 2)


# Class means are drawn hierarchically: ceil(sqrt(n)) group centers (scale
# 3.0) plus per-class offsets (scale 1.0). Classes therefore share coarse
# structure the way feature vectors of related categories do, which is the
# regime hierarchical classifiers target.
_BLOB_GROUP_SCALE = 3.0
_BLOB_CLASS_SCALE = 1.0


def generate_gaussian_blobs(num_classes, per_class, dimension, spread, seed):
    """Isotropic Gaussian blobs, one per class, with clustered class means.

    Means are placed deterministically from the seed; samples add isotropic
    noise with standard deviation ``spread``. ``spread=0`` collapses every
    sample onto its class mean.
    """
    if num_classes < 2:
        raise ValidationError("num_classes must be at least 2")
    if per_class < 2:
        raise ValidationError("per_class must be at least 2")
    if dimension < 1:
        raise ValidationError("dimension must be at least 1")
    if spread < 0:
        raise ValidationError("spread must be nonnegative")
    rng = np.random.default_rng(seed)
    n_groups = max(2, int(np.ceil(np.sqrt(num_classes))))
    centers = rng.standard_normal((n_groups, dimension)) * _BLOB_GROUP_SCALE
    offsets = rng.standard_normal((num_classes, dimension)) * _BLOB_CLASS_SCALE
    means = centers[np.arange(num_classes) % n_groups] + offsets
    labels = np.repeat(np.arange(num_classes, dtype=np.int64), per_class)
    noise = rng.standard_normal((len(labels), dimension)) * spread
    features = means[labels] + noise
    order = rng.permutation(len(labels))
    return Dataset(features[order], labels[order], _uniform_weights(len(labels)), num_classes)


def split_train_test(data, train_fraction, seed, stratified=True):
    """Disjoint train/test partition; weights renormalized within each side.

    With ``stratified=True`` every class keeps its proportion up to rounding,
    and the per-class train count is clamped to [1, class_size - 1] so both
    sides see every class.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValidationError("train_fraction must lie strictly between 0 and 1")
    rng = np.random.default_rng(seed)
    n = len(data)
    if stratified:
        train_idx = []
        test_idx = []
        for cls in range(data.num_classes):
            members = np.flatnonzero(data.labels == cls)
            if len(members) < 2:
                raise ValidationError(
                    f"class {data.label_names[cls]} has {len(members)} sample(s); "
                    "stratified splitting needs at least 2 per class")
            k = int(round(train_fraction * len(members)))
            k = min(max(k, 1), len(members) - 1)
            perm = rng.permutation(len(members))
            train_idx.append(members[perm[:k]])
            test_idx.append(members[perm[k:]])
        train_idx = np.concatenate(train_idx)
        test_idx = np.concatenate(test_idx)
    else:
        perm = rng.permutation(n)
        k = min(max(int(round(train_fraction * n)), 1), n - 1)
        train_idx, test_idx = perm[:k], perm[k:]
    train_idx = np.sort(train_idx)
    test_idx = np.sort(test_idx)
    return data.subset(train_idx), data.subset(test_idx)
