"""Shared domain types, distance measures, and configuration.

Every type here is immutable after construction and safe to share across
concurrent workers; all operations in this package are pure functions of
their inputs. Storage is dense throughout: the engine targets desk-scale
inputs (a ceiling of 20,000 rows is enforced by the file loaders).
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "AGGREGATORS",
    "AffinityMatrix",
    "CLOSED_FORM_SCALINGS",
    "ConfigError",
    "DISTANCE_MODES",
    "DataError",
    "FeatureMatrix",
    "LabelAssignment",
    "MODES",
    "NumericalError",
    "PmlpConfig",
    "PmlpError",
    "SOLVERS",
    "SoftLabelMatrix",
    "default_neighbor_count",
    "distance",
    "soft_labels_from_assignments",
    "validate_config",
]

DISTANCE_MODES = ("euclidean_inverse", "cosine_similarity", "first_order_similarity")
AGGREGATORS = ("min", "max", "avg", "quantile")
SOLVERS = ("closed_form", "iterative")
MODES = ("pmlp", "classical_lpa")
CLOSED_FORM_SCALINGS = ("fixed_point", "unscaled")

# Soft predictions must sum to one within this tolerance.
PREDICTION_SUM_TOL = 1e-9


class PmlpError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(PmlpError, ValueError):
    """A configuration field violates its documented range."""

    def __init__(self, field, message):
        super().__init__("%s: %s" % (field, message))
        self.field = field


class DataError(PmlpError, ValueError):
    """Malformed or degenerate input data."""


class NumericalError(PmlpError, ArithmeticError):
    """A numerical operation produced an unusable result."""


def _frozen(arr):
    arr.setflags(write=False)
    return arr


class FeatureMatrix:
    """An N x d matrix of feature vectors, one sample per row.

    Entries must be finite. The wrapped array is marked read-only, so a
    single instance may back any number of concurrent computations.
    """

    def __init__(self, data):
        data = np.array(data, dtype=float)
        if data.ndim != 2:
            raise DataError("feature matrix must be 2-dimensional")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise DataError("feature matrix needs at least one row and one column")
        if not np.all(np.isfinite(data)):
            raise DataError("feature matrix contains non-finite entries")
        self._data = _frozen(data)

    @property
    def data(self):
        return self._data

    @property
    def n_rows(self):
        return self._data.shape[0]

    @property
    def dim(self):
        return self._data.shape[1]

    def __len__(self):
        return self.n_rows

    def __repr__(self):
        return "FeatureMatrix(n_rows=%d, dim=%d)" % (self.n_rows, self.dim)


class LabelAssignment:
    """Per-row label state: a known class, a soft prediction, or nothing.

    Use the ``ground_truth``, ``prediction`` and ``unlabeled`` constructors;
    prediction vectors must be nonnegative, finite, and sum to one within
    ``PREDICTION_SUM_TOL``.
    """

    GROUND_TRUTH = "ground_truth"
    PREDICTION = "prediction"
    UNLABELED = "unlabeled"

    __slots__ = ("kind", "class_index", "probabilities")

    def __init__(self, kind, class_index=None, probabilities=None):
        if kind not in (self.GROUND_TRUTH, self.PREDICTION, self.UNLABELED):
            raise DataError("unknown label assignment kind: %r" % (kind,))
        self.kind = kind
        self.class_index = class_index
        self.probabilities = probabilities

    @classmethod
    def ground_truth(cls, class_index):
        class_index = int(class_index)
        if class_index < 0:
            raise DataError("ground-truth class index must be nonnegative")
        return cls(cls.GROUND_TRUTH, class_index=class_index)

    @classmethod
    def prediction(cls, probabilities):
        vec = np.array(probabilities, dtype=float)
        if vec.ndim != 1 or vec.size < 1:
            raise DataError("prediction must be a nonempty vector")
        if not np.all(np.isfinite(vec)):
            raise DataError("prediction contains non-finite entries")
        if np.any(vec < 0):
            raise DataError("prediction contains negative entries")
        if abs(float(vec.sum()) - 1.0) > PREDICTION_SUM_TOL:
            raise DataError("prediction does not sum to 1 (got %r)" % float(vec.sum()))
        return cls(cls.PREDICTION, probabilities=_frozen(vec))

    @classmethod
    def unlabeled(cls):
        return cls(cls.UNLABELED)

    def __repr__(self):
        if self.kind == self.GROUND_TRUTH:
            return "LabelAssignment.ground_truth(%d)" % self.class_index
        if self.kind == self.PREDICTION:
            return "LabelAssignment.prediction(%s)" % (list(self.probabilities),)
        return "LabelAssignment.unlabeled()"


class SoftLabelMatrix:
    """An N x C matrix of nonnegative class scores.

    A row is either all zero (masked out) or carries positive mass; rows are
    not required to sum to one mid-pipeline. ``renormalized`` divides each
    positive row by its sum and leaves zero rows untouched.
    """

    def __init__(self, data):
        data = np.array(data, dtype=float)
        if data.ndim != 2:
            raise DataError("soft label matrix must be 2-dimensional")
        if not np.all(np.isfinite(data)):
            raise DataError("soft label matrix contains non-finite entries")
        if np.any(data < 0):
            raise DataError("soft label matrix contains negative entries")
        self._data = _frozen(data)

    @property
    def data(self):
        return self._data

    @property
    def rows(self):
        return self._data.shape[0]

    @property
    def classes(self):
        return self._data.shape[1]

    def renormalized(self):
        sums = self._data.sum(axis=1, keepdims=True)
        out = np.divide(
            self._data, sums, out=np.zeros_like(self._data), where=sums > 0
        )
        return SoftLabelMatrix(out)

    def confidences(self):
        """Per-row maximum of the renormalized scores (0 for zero rows)."""
        return self.renormalized().data.max(axis=1)

    def __repr__(self):
        return "SoftLabelMatrix(rows=%d, classes=%d)" % (self.rows, self.classes)


class AffinityMatrix:
    """A symmetric nonnegative square matrix with an exactly zero diagonal."""

    SYMMETRY_TOL = 1e-9

    def __init__(self, data):
        data = np.array(data, dtype=float)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise DataError("affinity matrix must be square")
        if not np.all(np.isfinite(data)):
            raise DataError("affinity matrix contains non-finite entries")
        if np.any(np.diagonal(data) != 0.0):
            raise DataError("affinity matrix diagonal must be exactly zero")
        if np.any(data < 0):
            raise DataError("affinity matrix contains negative entries")
        if data.size and np.max(np.abs(data - data.T)) > self.SYMMETRY_TOL:
            raise DataError("affinity matrix is not symmetric")
        self._data = _frozen(data)

    @property
    def data(self):
        return self._data

    @property
    def size(self):
        return self._data.shape[0]

    def __repr__(self):
        return "AffinityMatrix(size=%d)" % self.size


@dataclass(frozen=True)
class PmlpConfig:
    """Hyperparameters for density-aware label propagation.

    alpha
        Diffusion weight of Y(i) = alpha * S * Y(i-1) + (1-alpha) * Y_high,
        strictly inside (0, 1) so the iteration contracts.
    eta
        Mixing weight between the propagated labels and the retained
        low-confidence predictions.
    tau
        Confidence threshold separating high- from low-confidence rows.
    bandwidth_h
        Kernel bandwidth of the exponential-kernel density estimator;
        very large values collapse all density information to 1 and the
        pipeline degenerates to classical label propagation.
    path_points_k
        Number of interior equal-division points sampled on the segment
        between two features.
    kde_support_n
        Number of nearest support points used per density evaluation.
    neighbor_count
        Neighbors kept per node when the propagation graph is built; the
        conventional default is ceil(1.5 * n_classes).
    aggregator, quantile_t
        How the per-point path densities collapse to a single factor:
        "min", "max", "avg", or "quantile" (with parameter quantile_t).
    distance_mode
        Base affinity: "euclidean_inverse" inverts the Euclidean distance;
        the similarity modes use the (clamped) raw similarity.
    solver, solver_max_iters, solver_tol
        "closed_form" solves the linear system directly; "iterative" runs
        the fixed-point iteration until the max-abs update drops below
        solver_tol or solver_max_iters is reached.
    mode
        "pmlp" applies the density reweighting; "classical_lpa" skips it.
    closed_form_scaling
        "fixed_point" scales the direct solve by (1 - alpha) so both
        solvers return the same matrix; "unscaled" returns the raw solve.
        The two differ only by that positive constant, which never changes
        a row argmax.
    clamp_ground_truth
        Reset ground-truth rows to their one-hot vectors after propagation.
    seed
        Seed for every randomized consumer (generators, harnesses).
    """

    alpha: float = 0.8
    eta: float = 0.2
    tau: float = 0.95
    bandwidth_h: float = 5.0
    path_points_k: int = 1
    kde_support_n: int = 45
    neighbor_count: int = 15
    aggregator: str = "avg"
    quantile_t: float = 0.5
    distance_mode: str = "euclidean_inverse"
    solver: str = "closed_form"
    solver_max_iters: int = 10000
    solver_tol: float = 1e-10
    mode: str = "pmlp"
    closed_form_scaling: str = "fixed_point"
    clamp_ground_truth: bool = True
    seed: int = 0

    def __post_init__(self):
        validate_config(self)


def validate_config(cfg):
    """Check every PmlpConfig field, raising ConfigError naming the offender."""
    if not (0.0 < cfg.alpha < 1.0):
        raise ConfigError("alpha", "must lie strictly inside (0, 1)")
    if not (0.0 <= cfg.eta <= 1.0):
        raise ConfigError("eta", "must lie in [0, 1]")
    if not (0.0 < cfg.tau <= 1.0):
        raise ConfigError("tau", "must lie in (0, 1]")
    if not (cfg.bandwidth_h > 0.0):
        raise ConfigError("bandwidth_h", "must be positive")
    if int(cfg.path_points_k) != cfg.path_points_k or cfg.path_points_k < 1:
        raise ConfigError("path_points_k", "must be an integer >= 1")
    if int(cfg.kde_support_n) != cfg.kde_support_n or cfg.kde_support_n < 1:
        raise ConfigError("kde_support_n", "must be an integer >= 1")
    if int(cfg.neighbor_count) != cfg.neighbor_count or cfg.neighbor_count < 1:
        raise ConfigError("neighbor_count", "must be an integer >= 1")
    if cfg.aggregator not in AGGREGATORS:
        raise ConfigError("aggregator", "must be one of %s" % (AGGREGATORS,))
    if not (0.0 < cfg.quantile_t < 1.0):
        raise ConfigError("quantile_t", "must lie strictly inside (0, 1)")
    if cfg.distance_mode not in DISTANCE_MODES:
        raise ConfigError("distance_mode", "must be one of %s" % (DISTANCE_MODES,))
    if cfg.solver not in SOLVERS:
        raise ConfigError("solver", "must be one of %s" % (SOLVERS,))
    if int(cfg.solver_max_iters) != cfg.solver_max_iters or cfg.solver_max_iters < 1:
        raise ConfigError("solver_max_iters", "must be an integer >= 1")
    if not (cfg.solver_tol > 0.0):
        raise ConfigError("solver_tol", "must be positive")
    if cfg.mode not in MODES:
        raise ConfigError("mode", "must be one of %s" % (MODES,))
    if cfg.closed_form_scaling not in CLOSED_FORM_SCALINGS:
        raise ConfigError(
            "closed_form_scaling", "must be one of %s" % (CLOSED_FORM_SCALINGS,)
        )
    if not isinstance(cfg.clamp_ground_truth, bool):
        raise ConfigError("clamp_ground_truth", "must be a boolean")
    if int(cfg.seed) != cfg.seed or cfg.seed < 0:
        raise ConfigError("seed", "must be a nonnegative integer")
    return cfg


def default_neighbor_count(n_classes):
    """Conventional neighbor count: 1.5 neighbors per class, rounded up."""
    if n_classes < 1:
        raise DataError("n_classes must be >= 1")
    return math.ceil(1.5 * n_classes)


def distance(a, b, mode="euclidean_inverse"):
    """Distance or similarity between two feature vectors.

    "euclidean_inverse" returns the plain Euclidean distance ||a - b||
    (the inversion into an affinity happens during graph construction);
    "cosine_similarity" returns the cosine of the angle between a and b;
    "first_order_similarity" returns the raw inner product. Every mode is
    exactly symmetric in (a, b).
    """
    if mode not in DISTANCE_MODES:
        raise DataError("unknown distance mode: %r" % (mode,))
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 1 or b.ndim != 1:
        raise DataError("distance expects 1-dimensional vectors")
    if a.shape != b.shape:
        raise DataError(
            "dimension mismatch: %d vs %d" % (a.shape[0], b.shape[0])
        )
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise DataError("distance inputs must be finite")
    if mode == "euclidean_inverse":
        return float(np.sqrt(np.sum((a - b) ** 2)))
    if mode == "first_order_similarity":
        return float(np.dot(a, b))
    norm_a = float(np.sqrt(np.sum(a**2)))
    norm_b = float(np.sqrt(np.sum(b**2)))
    if norm_a == 0.0 or norm_b == 0.0:
        raise DataError("cosine similarity is undefined for a zero-norm vector")
    return float(np.dot(a, b) / (norm_a * norm_b))


def soft_labels_from_assignments(assignments, n_classes=None):
    """Assemble the initial soft-label matrix from per-row assignments.

    Returns ``(labels, ground_truth_mask, ground_truth_classes)`` where
    ground-truth rows are one-hot, prediction rows carry their vectors,
    unlabeled rows are zero, and ``ground_truth_classes`` holds the class
    index for ground-truth rows and -1 elsewhere. The class count is
    inferred from prediction lengths and ground-truth indices unless given.
    """
    assignments = list(assignments)
    if not assignments:
        raise DataError("no label assignments given")
    inferred = 0
    for row, a in enumerate(assignments):
        if not isinstance(a, LabelAssignment):
            raise DataError("row %d: not a LabelAssignment" % row)
        if a.kind == LabelAssignment.PREDICTION:
            width = int(a.probabilities.size)
            if inferred and width != inferred and n_classes is None:
                raise DataError(
                    "row %d: prediction length %d conflicts with %d"
                    % (row, width, inferred)
                )
            inferred = max(inferred, width)
        elif a.kind == LabelAssignment.GROUND_TRUTH:
            inferred = max(inferred, a.class_index + 1)
    classes = int(n_classes) if n_classes is not None else inferred
    if classes < 1:
        raise DataError("could not infer a class count; pass n_classes")

    labels = np.zeros((len(assignments), classes))
    gt_mask = np.zeros(len(assignments), dtype=bool)
    gt_classes = np.full(len(assignments), -1, dtype=int)
    for row, a in enumerate(assignments):
        if a.kind == LabelAssignment.GROUND_TRUTH:
            if a.class_index >= classes:
                raise DataError(
                    "row %d: class index %d outside [0, %d)"
                    % (row, a.class_index, classes)
                )
            labels[row, a.class_index] = 1.0
            gt_mask[row] = True
            gt_classes[row] = a.class_index
        elif a.kind == LabelAssignment.PREDICTION:
            if a.probabilities.size != classes:
                raise DataError(
                    "row %d: prediction length %d, expected %d"
                    % (row, a.probabilities.size, classes)
                )
            labels[row] = a.probabilities
    return SoftLabelMatrix(labels), gt_mask, gt_classes
