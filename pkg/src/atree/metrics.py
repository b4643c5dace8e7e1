"""Flat multi-class baselines and accuracy/complexity reporting.

Costs follow the kernel family: with linear classifiers every evaluation
costs one unit, so a method's per-instance cost is the number of classifiers
it evaluates; with kernel classifiers the cost is the number of kernel
computations, counted under per-instance caching so a support vector shared
by several classifiers is computed once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .svm import (decision_value, decision_values_batch, kernel_eval_count_hook,
                  train_kernel_svm, train_linear_svm)
from .tree import predict as predict_tree


@dataclass
class OneVsAllModel:
    models: list
    num_classes: int
    kernel_family: str


@dataclass
class OneVsOneModel:
    pairs: list          # [(class_a, class_b), ...] with a < b
    models: list
    num_classes: int
    kernel_family: str


@dataclass
class EvaluationRun:
    """Predictions plus per-instance cost counters for one method."""

    method: str
    kernel_family: str                 # "linear" or "nonlinear"
    num_classes: int
    predictions: np.ndarray
    truths: np.ndarray
    classifier_evaluations: np.ndarray
    kernel_computations: np.ndarray | None = None       # union-cached
    kernel_computations_uncached: np.ndarray | None = None


@dataclass
class ComplexityReport:
    mean_classifier_evaluations: float
    mean_kernel_computations: float | None
    relative_complexity: float | None
    per_instance_trace_lengths: list


def _kernel_family(kernel):
    return "linear" if kernel.is_linear else "nonlinear"


def _check_all_classes_present(data):
    counts = np.bincount(data.labels, minlength=data.num_classes)
    missing = np.flatnonzero(counts == 0)
    if missing.size:
        raise ValidationError(
            f"classes {missing.tolist()} are absent from the training data")


def train_one_vs_all(data, kernel, svm_config):
    """One class-vs-rest model per class; prediction is argmax decision value
    with ties to the lowest class id."""
    _check_all_classes_present(data)
    ids = np.arange(len(data), dtype=np.int64)
    models = []
    for cls in range(data.num_classes):
        y = np.where(data.labels == cls, 1.0, -1.0)
        if kernel.is_linear:
            models.append(train_linear_svm(data.features, y, svm_config))
        else:
            models.append(train_kernel_svm(data.features, y, kernel, svm_config,
                                           sample_ids=ids))
    return OneVsAllModel(models, data.num_classes, _kernel_family(kernel))


def train_one_vs_one(data, kernel, svm_config):
    """One model per class pair (a, b) with a < b, trained with +1 = b;
    prediction is majority vote with ties to the lowest class id."""
    _check_all_classes_present(data)
    pairs = []
    models = []
    for a in range(data.num_classes):
        for b in range(a + 1, data.num_classes):
            members = np.flatnonzero((data.labels == a) | (data.labels == b))
            y = np.where(data.labels[members] == b, 1.0, -1.0)
            if kernel.is_linear:
                models.append(train_linear_svm(data.features[members], y, svm_config))
            else:
                models.append(train_kernel_svm(data.features[members], y, kernel,
                                               svm_config, sample_ids=members))
            pairs.append((a, b))
    return OneVsOneModel(pairs, models, data.num_classes, _kernel_family(kernel))


def predict_one_vs_all(model, x, session=None):
    values = [decision_value(m, x, session) for m in model.models]
    return int(np.argmax(values))


def predict_one_vs_one(model, x, session=None):
    votes = np.zeros(model.num_classes, dtype=np.int64)
    for (a, b), m in zip(model.pairs, model.models):
        votes[b if decision_value(m, x, session) >= 0 else a] += 1
    return int(np.argmax(votes))


def mean_per_class_accuracy(predictions, truths, num_classes):
    """Unweighted mean over classes of per-class recall."""
    predictions = np.asarray(predictions)
    truths = np.asarray(truths)
    recalls = []
    for cls in range(num_classes):
        members = truths == cls
        if not members.any():
            raise ValidationError(f"class {cls} has no test instances")
        recalls.append(float((predictions[members] == cls).mean()))
    return float(np.mean(recalls))


def evaluate_atree(tree, data):
    """Run every test instance through the tree, recording trace lengths and
    (for kernel trees) cached/uncached kernel computation counts."""
    nonlinear = not tree.config.kernel.is_linear
    counter = kernel_eval_count_hook() if nonlinear else None
    preds = np.empty(len(data), dtype=np.int64)
    evals = np.empty(len(data), dtype=np.int64)
    for i in range(len(data)):
        label, trace = predict_tree(tree, data.features[i], counter=counter)
        preds[i] = label
        evals[i] = len(trace)
    run = EvaluationRun(
        method="atree", kernel_family="nonlinear" if nonlinear else "linear",
        num_classes=tree.num_classes, predictions=preds, truths=data.labels.copy(),
        classifier_evaluations=evals)
    if nonlinear:
        per = np.asarray(counter.per_instance, dtype=np.int64)
        run.kernel_computations = per[:, 0]
        run.kernel_computations_uncached = per[:, 1]
    return run


def _evaluate_flat(model, data, method, predict_fn, n_models):
    nonlinear = model.kernel_family == "nonlinear"
    preds = np.empty(len(data), dtype=np.int64)
    union = np.empty(len(data), dtype=np.int64) if nonlinear else None
    unc = np.empty(len(data), dtype=np.int64) if nonlinear else None
    if nonlinear:
        counter = kernel_eval_count_hook()
        for i in range(len(data)):
            session = counter.start_instance(data.features[i])
            preds[i] = predict_fn(model, data.features[i], session)
            union[i], unc[i] = session.counts
    else:
        # linear evaluation is a dense matrix product per model
        values = np.stack([decision_values_batch(m, data.features)
                           for m in model.models])
        if method == "ova":
            preds = values.argmax(axis=0).astype(np.int64)
        else:
            votes = np.zeros((model.num_classes, len(data)), dtype=np.int64)
            for (a, b), dv in zip(model.pairs, values):
                winner = np.where(dv >= 0, b, a)
                for cls in (a, b):
                    votes[cls] += winner == cls
            preds = votes.argmax(axis=0).astype(np.int64)
    return EvaluationRun(
        method=method, kernel_family=model.kernel_family,
        num_classes=model.num_classes, predictions=preds,
        truths=data.labels.copy(),
        classifier_evaluations=np.full(len(data), n_models, dtype=np.int64),
        kernel_computations=union, kernel_computations_uncached=unc)


def evaluate_one_vs_all(model, data):
    return _evaluate_flat(model, data, "ova", predict_one_vs_all, len(model.models))


def evaluate_one_vs_one(model, data):
    return _evaluate_flat(model, data, "ovo", predict_one_vs_one, len(model.models))


def run_cost(run):
    """Per-family mean test cost of a recorded run."""
    if run.kernel_family == "linear":
        return float(run.classifier_evaluations.mean())
    return float(run.kernel_computations.mean())


def complexity_report(run, reference):
    """Cost summary of ``run`` normalized by a reference run (one-vs-all on
    the same test set and kernel family). Pure function of recorded traces."""
    if run.kernel_family != reference.kernel_family:
        raise ValidationError("complexity comparison requires matching kernel families")
    if len(run.predictions) != len(reference.predictions):
        raise ValidationError("runs must cover the same test set")
    mean_kernel = (float(run.kernel_computations.mean())
                   if run.kernel_computations is not None else None)
    return ComplexityReport(
        mean_classifier_evaluations=float(run.classifier_evaluations.mean()),
        mean_kernel_computations=mean_kernel,
        relative_complexity=run_cost(run) / run_cost(reference),
        per_instance_trace_lengths=run.classifier_evaluations.tolist(),
    )
