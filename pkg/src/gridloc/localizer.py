"""Multinomial logistic localization of the disturbed bus.

Classes are 0 (no disturbance) and the bus ids 1..B, so the coefficient
matrix always has B + 1 rows and the class label doubles as the row index.
Training minimizes the L2-regularized negative log-likelihood

    F(beta) = lambda/2 * ||beta||_F^2
              - sum_j [ beta[y_j] . x_j - log sum_b exp(beta[b] . x_j) ]

by full-batch gradient descent with a backtracking (Armijo) line search,
which keeps the objective sequence nonincreasing; the problem is convex, so
the gradient max-norm is a faithful stopping measure.

The descent runs under a fixed diagonal metric: each coordinate of the
gradient is scaled by the inverse squared RMS of its feature column before
the step. Feature columns span several orders of magnitude (early-sample
deviations are sub-mHz while the intercept is 1), and plain steps crawl
along the small-scale coordinates. The scaling is a pure change of metric
computed once from the training matrix, so the objective, its gradient, and
the minimizer are exactly those of F above.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .features import FeatureConfig, FeatureVector, stack_features


class ConvergenceError(RuntimeError):
    """Line search failed or the objective became non-finite."""


@dataclass(frozen=True)
class OptimizerSettings:
    tolerance: float = 1e-6       # stop when the gradient max-norm falls below
    max_iterations: int = 5000
    armijo_c: float = 1e-4        # sufficient-decrease constant
    record_history: bool = False  # keep the per-iteration objective values

    def __post_init__(self):
        if self.tolerance <= 0.0 or self.max_iterations < 1:
            raise ValueError("tolerance must be positive and max_iterations >= 1")


@dataclass(frozen=True)
class LogisticModel:
    coefficients: NDArray            # (B + 1, L), row b scores class b
    class_labels: tuple[int, ...]    # (0, 1, ..., B)
    feature_config: FeatureConfig
    missing_mask: tuple[int, ...]
    lam: float                       # ridge weight lambda
    final_gradient_norm: float | None = None
    iterations: int | None = None
    objective_history: tuple[float, ...] | None = None

    def __post_init__(self):
        coef = np.asarray(self.coefficients, dtype=float)
        coef.setflags(write=False)
        object.__setattr__(self, "coefficients", coef)
        if coef.ndim != 2 or coef.shape[0] != len(self.class_labels):
            raise ValueError("coefficients must have one row per class label")
        if self.lam < 0.0:
            raise ValueError("lam must be nonnegative")

    @property
    def feature_dimension(self) -> int:
        return self.coefficients.shape[1]


@dataclass(frozen=True)
class LocalizationPrediction:
    probabilities: NDArray       # (B + 1,) over class labels 0..B
    predicted: int               # argmax class label
    ranking: tuple[int, ...]     # labels by descending probability


def softmax_probabilities(scores: NDArray) -> NDArray:
    """Row-wise softmax with max subtraction; rows sum to 1."""
    scores = np.asarray(scores, dtype=float)
    shifted = scores - scores.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def _log_sum_exp(scores: NDArray) -> NDArray:
    top = scores.max(axis=1)
    return top + np.log(np.exp(scores - top[:, None]).sum(axis=1))


def _objective(coefficients, features, labels, lam) -> float:
    scores = features @ coefficients.T
    fit = _log_sum_exp(scores).sum() - scores[np.arange(len(labels)), labels].sum()
    return 0.5 * lam * float((coefficients * coefficients).sum()) + float(fit)


def objective_and_gradient(coefficients: NDArray, features: NDArray,
                           labels: NDArray, lam: float) -> tuple[float, NDArray]:
    """Regularized negative log-likelihood and its gradient matrix."""
    coefficients = np.asarray(coefficients, dtype=float)
    features = np.asarray(features, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if features.ndim != 2 or coefficients.ndim != 2 \
            or features.shape[1] != coefficients.shape[1]:
        raise ValueError("features and coefficients disagree on dimension")
    if labels.min(initial=0) < 0 or labels.max(initial=0) >= coefficients.shape[0]:
        raise ValueError("labels outside the class range")

    rows = np.arange(features.shape[0])
    scores = features @ coefficients.T
    lse = _log_sum_exp(scores)
    value = 0.5 * lam * float((coefficients * coefficients).sum()) \
        + float(lse.sum() - scores[rows, labels].sum())
    residual = np.exp(scores - lse[:, None])   # softmax probabilities
    residual[rows, labels] -= 1.0
    gradient = lam * coefficients + residual.T @ features
    return value, gradient


def fit_coefficients(features: NDArray, labels: NDArray, lam: float,
                     settings: OptimizerSettings = OptimizerSettings(),
                     class_count: int | None = None):
    """Array-level trainer; returns (beta, gradient max-norm, iterations, history)."""
    if lam < 0.0:
        raise ValueError("lam must be nonnegative")
    labels = np.asarray(labels, dtype=int)
    if len(set(labels.tolist())) < 2:
        raise ValueError("training needs at least 2 distinct labels")
    classes = class_count if class_count is not None else int(labels.max()) + 1
    if labels.max() >= classes or labels.min() < 0:
        raise ValueError(f"labels must lie in 0..{classes - 1}")

    # fixed diagonal metric: inverse squared column RMS of the design
    column_rms = np.sqrt(np.mean(features * features, axis=0))
    metric = 1.0 / np.maximum(column_rms, 1e-12) ** 2

    beta = np.zeros((classes, features.shape[1]))
    value, gradient = objective_and_gradient(beta, features, labels, lam)
    if not np.isfinite(value):
        raise ConvergenceError("objective is non-finite at the zero initializer; "
                               "check the feature matrix for inf or nan")
    history = [value] if settings.record_history else None
    step = 1.0
    iterations = 0
    grad_norm = float(np.abs(gradient).max())
    while iterations < settings.max_iterations and grad_norm > settings.tolerance:
        direction = gradient * metric[None, :]
        decrease = settings.armijo_c * float((gradient * direction).sum())
        step = 2.0 * step   # warm start from the previously accepted step
        while True:
            candidate = beta - step * direction
            trial = _objective(candidate, features, labels, lam)
            if np.isfinite(trial) and trial <= value - step * decrease:
                break
            step *= 0.5
            if step < 1e-30:
                raise ConvergenceError(
                    f"line search failed at iteration {iterations}, "
                    f"gradient max-norm {grad_norm:.3e}")
        if np.array_equal(candidate, beta):
            # step underflowed against the iterate: no representable progress
            # is left, so treat the current point as converged
            break
        beta = candidate
        value, gradient = objective_and_gradient(beta, features, labels, lam)
        if not np.isfinite(value):
            raise ConvergenceError(f"objective became non-finite at iteration {iterations}")
        grad_norm = float(np.abs(gradient).max())
        iterations += 1
        if history is not None:
            history.append(value)
    return beta, grad_norm, iterations, tuple(history) if history is not None else None


def train_localizer(samples, lam: float,
                    settings: OptimizerSettings = OptimizerSettings(),
                    bus_count: int | None = None) -> LogisticModel:
    """Fit the localizer on labeled samples.

    ``bus_count`` fixes the class set to 0..bus_count; by default the largest
    label present is taken as the bus count. Hitting the iteration cap is a
    normal stop (the model records the final gradient norm); ConvergenceError
    signals a failed line search or a non-finite objective.
    """
    features, labels, _ = stack_features(samples)
    classes = (bus_count if bus_count is not None else int(labels.max())) + 1
    beta, grad_norm, iterations, history = fit_coefficients(
        features, labels, lam, settings, classes)
    return LogisticModel(
        coefficients=beta,
        class_labels=tuple(range(classes)),
        feature_config=samples[0].features.config,
        missing_mask=samples[0].features.missing_mask,
        lam=lam,
        final_gradient_norm=grad_norm,
        iterations=iterations,
        objective_history=history)


def predict(model: LogisticModel, features: FeatureVector) -> LocalizationPrediction:
    """Class probabilities and ranking for one feature vector."""
    if features.config != model.feature_config:
        raise ValueError("feature config does not match the model")
    if features.missing_mask != model.missing_mask:
        raise ValueError(f"missing mask {features.missing_mask} does not match "
                         f"the model mask {model.missing_mask}")
    if len(features.values) != model.feature_dimension:
        raise ValueError(f"feature vector has length {len(features.values)}, "
                         f"model expects {model.feature_dimension}")
    probabilities = softmax_probabilities(model.coefficients @ features.values)
    ranking = np.argsort(-probabilities, kind="stable")  # ties to the smaller label
    return LocalizationPrediction(probabilities=probabilities,
                                  predicted=int(ranking[0]),
                                  ranking=tuple(int(r) for r in ranking))


def top_k(prediction: LocalizationPrediction, k: int) -> tuple[int, ...]:
    """The k most probable class labels, best first."""
    if not 1 <= k <= len(prediction.ranking):
        raise ValueError(f"k must lie in 1..{len(prediction.ranking)}")
    return prediction.ranking[:k]


def predict_matrix(model: LogisticModel, features: NDArray) -> tuple[NDArray, NDArray]:
    """Batch scores for stacked feature rows: (probabilities, rankings)."""
    features = np.asarray(features, dtype=float)
    if features.shape[1] != model.feature_dimension:
        raise ValueError(f"feature rows have length {features.shape[1]}, "
                         f"model expects {model.feature_dimension}")
    probabilities = softmax_probabilities(features @ model.coefficients.T)
    rankings = np.argsort(-probabilities, axis=1, kind="stable")
    return probabilities, rankings
