"""The label propagation pipeline and the adaptive threshold scheduler.

Pipeline stages: split the initial soft labels by confidence, build the
(optionally density-reweighted) neighbor affinity, normalize it, diffuse
the high-confidence mass Y(i) = alpha * S * Y(i-1) + (1-alpha) * Y_high,
and mix the result back with the retained low-confidence predictions.
With alpha in (0, 1) and the symmetric normalization the diffusion map is
a contraction, so the iterative and direct solvers agree up to the
documented (1 - alpha) scaling.
"""

from dataclasses import dataclass, replace

import numpy as np

from .core import (
    AffinityMatrix,
    DataError,
    NumericalError,
    PmlpConfig,
    SoftLabelMatrix,
    soft_labels_from_assignments,
)
from .graph import build_affinity, knn_edges, normalize_symmetric

__all__ = [
    "PropagationResult",
    "ThresholdSchedulerState",
    "mix_final",
    "propagate_closed_form",
    "propagate_iterative",
    "run_classical_lpa",
    "run_pmlp",
    "split_by_confidence",
    "threshold_increment",
    "update_threshold",
]


@dataclass(frozen=True)
class PropagationResult:
    """Everything a propagation run produces.

    final_labels
        The mixed output eta * propagated + (1 - eta) * low; rows are not
        renormalized unless requested, so downstream consumers should take
        a row argmax or call ``final_labels.renormalized()``.
    propagated
        The diffusion output (ground-truth rows clamped back to one-hot
        when configured).
    high_mask
        Which rows were routed to the high-confidence side of the split.
    iterations_used, residual
        Solver diagnostics; residual is None for the direct solver.
    """

    final_labels: SoftLabelMatrix
    propagated: SoftLabelMatrix
    high_mask: np.ndarray
    iterations_used: int
    residual: float | None


def split_by_confidence(labels, ground_truth_mask, tau):
    """Partition rows into high- and low-confidence soft label matrices.

    A row lands in ``high`` when its maximum reaches tau or it carries a
    ground-truth label (callers put one-hot vectors on those rows);
    otherwise it lands in ``low``. The two outputs add back to ``labels``
    entry for entry.
    """
    if not isinstance(labels, SoftLabelMatrix):
        labels = SoftLabelMatrix(labels)
    if not (0.0 < tau <= 1.0):
        raise DataError("tau must lie in (0, 1]")
    mask = np.asarray(ground_truth_mask, dtype=bool)
    if mask.shape != (labels.rows,):
        raise DataError("ground_truth_mask length does not match labels")
    high_mask = (labels.data.max(axis=1) >= tau) | mask
    high = np.where(high_mask[:, None], labels.data, 0.0)
    low = np.where(high_mask[:, None], 0.0, labels.data)
    return SoftLabelMatrix(high), SoftLabelMatrix(low), high_mask


def propagate_iterative(S, y_high, alpha, max_iters=10000, tol=1e-10):
    """Fixed-point iteration Y(i) = alpha * S Y(i-1) + (1-alpha) * Y_high.

    Starts from Y(0) = Y_high and stops once the max-abs update drops
    below ``tol`` or ``max_iters`` is hit. Returns ``(result, iterations,
    residual)``.
    """
    if not (0.0 < alpha < 1.0):
        raise DataError("alpha must lie strictly inside (0, 1)")
    if not isinstance(y_high, SoftLabelMatrix):
        y_high = SoftLabelMatrix(y_high)
    S = np.asarray(S, dtype=float)
    if S.shape != (y_high.rows, y_high.rows):
        raise DataError("S shape does not match the label matrix")
    base = y_high.data
    current = base.copy()
    iterations = 0
    residual = float("inf")
    for iterations in range(1, int(max_iters) + 1):
        nxt = alpha * (S @ current) + (1.0 - alpha) * base
        if not np.all(np.isfinite(nxt)):
            raise NumericalError(
                "propagation produced non-finite values; check the affinity matrix"
            )
        residual = float(np.max(np.abs(nxt - current)))
        current = nxt
        if residual < tol:
            break
    return SoftLabelMatrix(current), iterations, residual


def propagate_closed_form(S, y_high, alpha, scaling="fixed_point"):
    """Direct solve of (I - alpha * S) Y = Y_high.

    ``scaling="fixed_point"`` multiplies the solution by (1 - alpha) so it
    matches the converged iterative output; ``"unscaled"`` returns the raw
    solve. The two differ only by that positive constant and therefore
    share every row argmax.
    """
    if not (0.0 < alpha < 1.0):
        raise DataError("alpha must lie strictly inside (0, 1)")
    if scaling not in ("fixed_point", "unscaled"):
        raise DataError("unknown closed-form scaling: %r" % (scaling,))
    if not isinstance(y_high, SoftLabelMatrix):
        y_high = SoftLabelMatrix(y_high)
    S = np.asarray(S, dtype=float)
    if S.shape != (y_high.rows, y_high.rows):
        raise DataError("S shape does not match the label matrix")
    system = np.eye(S.shape[0]) - alpha * S
    try:
        solution = np.linalg.solve(system, y_high.data)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("closed-form solve failed: %s" % exc) from exc
    if not np.all(np.isfinite(solution)):
        raise NumericalError("closed-form solve produced non-finite values")
    if scaling == "fixed_point":
        solution = (1.0 - alpha) * solution
    # The exact solution is entrywise nonnegative; clip the rounding dust.
    return SoftLabelMatrix(np.maximum(solution, 0.0))


def mix_final(propagated, low, eta):
    """Blend the diffusion output with the retained low-confidence rows.

    Returns eta * propagated + (1 - eta) * low with no renormalization.
    """
    if not (0.0 <= eta <= 1.0):
        raise DataError("eta must lie in [0, 1]")
    if not isinstance(propagated, SoftLabelMatrix):
        propagated = SoftLabelMatrix(propagated)
    if not isinstance(low, SoftLabelMatrix):
        low = SoftLabelMatrix(low)
    if propagated.data.shape != low.data.shape:
        raise DataError(
            "shape mismatch: %s vs %s" % (propagated.data.shape, low.data.shape)
        )
    return SoftLabelMatrix(eta * propagated.data + (1.0 - eta) * low.data)


def run_pmlp(
    features,
    assignments,
    cfg,
    n_classes=None,
    renormalize=False,
    affinity_scale=1.0,
):
    """Run the whole pipeline over a feature matrix and its assignments.

    Requires at least one ground-truth row and at least two classes. The
    propagation graph connects every row to its ``cfg.neighbor_count``
    nearest neighbors. ``affinity_scale`` multiplies the affinity matrix
    before normalization; the normalization cancels any positive constant,
    so it exists purely as a scale-invariance probe.

    Deterministic: equal inputs and configuration give equal outputs.
    """
    if not isinstance(cfg, PmlpConfig):
        raise DataError("cfg must be a PmlpConfig")
    labels, gt_mask, gt_classes = soft_labels_from_assignments(
        assignments, n_classes=n_classes
    )
    if labels.rows != features.n_rows:
        raise DataError("assignment count does not match the feature rows")
    if not gt_mask.any():
        raise DataError("at least one ground-truth row is required")
    if labels.classes < 2:
        raise DataError("at least two classes are required")
    if not affinity_scale > 0:
        raise DataError("affinity_scale must be positive")

    high, low, high_mask = split_by_confidence(labels, gt_mask, cfg.tau)
    if not np.any(high.data):
        raise DataError(
            "the high-confidence set is empty; lower tau or label more rows"
        )

    if cfg.neighbor_count >= features.n_rows:
        raise DataError(
            "neighbor_count %d must be smaller than the %d rows"
            % (cfg.neighbor_count, features.n_rows)
        )
    edges = knn_edges(features, cfg.neighbor_count)
    affinity = build_affinity(
        features, np.arange(features.n_rows), cfg, edges=edges
    )
    if affinity_scale != 1.0:
        affinity = AffinityMatrix(affinity.data * affinity_scale)
    S = normalize_symmetric(affinity)

    if cfg.solver == "iterative":
        propagated, iterations, residual = propagate_iterative(
            S, high, cfg.alpha, cfg.solver_max_iters, cfg.solver_tol
        )
    else:
        propagated = propagate_closed_form(
            S, high, cfg.alpha, scaling=cfg.closed_form_scaling
        )
        iterations, residual = 0, None

    if cfg.clamp_ground_truth:
        clamped = propagated.data.copy()
        rows = np.flatnonzero(gt_mask)
        clamped[rows] = 0.0
        clamped[rows, gt_classes[rows]] = 1.0
        propagated = SoftLabelMatrix(clamped)

    final = mix_final(propagated, low, cfg.eta)
    if renormalize:
        final = final.renormalized()
    return PropagationResult(
        final_labels=final,
        propagated=propagated,
        high_mask=high_mask,
        iterations_used=iterations,
        residual=residual,
    )


def run_classical_lpa(features, assignments, cfg, **kwargs):
    """``run_pmlp`` with the density reweighting switched off."""
    return run_pmlp(features, assignments, replace(cfg, mode="classical_lpa"), **kwargs)


@dataclass(frozen=True)
class ThresholdSchedulerState:
    """State of the adaptive confidence-threshold schedule.

    ``tau`` only ever ratchets upward and never beyond ``tau_max``;
    ``high_count`` accumulates confident predictions across updates.
    """

    tau: float
    high_count: int = 0
    epoch: int = 0
    tau_max: float = 0.99

    def __post_init__(self):
        if not (0.0 < self.tau <= 1.0):
            raise DataError("tau must lie in (0, 1]")
        if not (0.0 < self.tau_max <= 1.0):
            raise DataError("tau_max must lie in (0, 1]")
        if self.tau > self.tau_max:
            raise DataError("tau exceeds tau_max")
        if self.high_count < 0 or self.epoch < 0:
            raise DataError("counts must be nonnegative")


def threshold_increment(epoch):
    """Step size for the threshold schedule at a given training epoch.

    10^-(1 + ceil(epoch / 200)): 0.01 through epoch 200, 0.001 through
    epoch 400, and so on. Epoch 0 is treated like epoch 1.
    """
    epoch = max(int(epoch), 1)
    return 10.0 ** -(1 + -(-epoch // 200))


def update_threshold(state, predictions, epoch):
    """Advance the threshold schedule with a batch of predictions.

    Rows whose maximum reaches the current tau count as confident. Each
    time the cumulative confident count crosses a multiple of 50 the
    threshold gains one ``threshold_increment(epoch)``; the crossings in a
    single update are applied fused, as
    ``min(tau + crossings * increment, tau_max)``. The threshold never
    decreases and saturates at ``tau_max`` instead of erroring.
    """
    if not isinstance(predictions, SoftLabelMatrix):
        predictions = SoftLabelMatrix(predictions)
    epoch = int(epoch)
    confident = int(np.sum(predictions.data.max(axis=1) >= state.tau))
    new_count = state.high_count + confident
    crossings = new_count // 50 - state.high_count // 50
    tau = state.tau
    if crossings:
        tau = min(tau + crossings * threshold_increment(epoch), state.tau_max)
    return ThresholdSchedulerState(
        tau=tau, high_count=new_count, epoch=epoch, tau_max=state.tau_max
    )
