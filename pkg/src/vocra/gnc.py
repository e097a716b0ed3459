"""Graduated refinement of a candidate set with the biweight surrogate.

Alternates a weighted closed-form rotation solve with the closed-form weight
update while the control parameter anneals from 100 toward 1 by factors of
1.2. Early iterations are effectively least squares over the candidates;
by the end the surrogate is the hard biweight and residuals outside the
support carry exactly zero weight. At most 26 iterations are possible from
the schedule alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .cost import GncParams, tb_weight
from .errors import DegenerateCandidate, RankDeficient
from .geometry import CorrespondenceSet, Mat3, weighted_svd_rotation

GNC_MU_INITIAL = 100.0
GNC_MU_DECAY = 1.2
GNC_CONVERGENCE_TOL = 1e-6


@dataclass(slots=True)
class GncTrace:
    """Refinement outcome: iteration count, final control value, the final
    per-candidate weights (candidate order), and the refined rotation."""

    iterations: int
    final_mu: float
    final_weights: NDArray[np.float64]
    rotation: Mat3


def solve_gnc_tb(
    corr: CorrespondenceSet,
    candidate: list[int] | np.ndarray,
    xi: float,
    mu_initial: float = GNC_MU_INITIAL,
    mu_decay: float = GNC_MU_DECAY,
    convergence_tol: float = GNC_CONVERGENCE_TOL,
    initial_weights: NDArray[np.float64] | None = None,
) -> GncTrace:
    """Refine a rotation over the candidate subset.

    Per iteration: weighted SVD rotation with the current weights, residuals
    against the current weighted centroids, closed-form weight update, then
    the control decay. Stops when the largest weight change falls below
    convergence_tol or the control drops below 1, whichever first.

    Raises DegenerateCandidate when the weighted solve loses rank or fewer
    than 3 weights stay positive; the candidate set cannot support a
    rotation at that point and the caller must treat the stage as failed.
    """
    idx = np.asarray(candidate, dtype=np.intp)
    if idx.ndim != 1 or idx.size < 3:
        raise ValueError("candidate set must hold at least 3 indices")
    if np.unique(idx).size != idx.size:
        raise ValueError("candidate indices must be distinct")
    if not xi > 0:
        raise ValueError("xi must be positive")
    sub = corr.subset(idx)
    p = sub.points_p
    q = sub.points_q

    if initial_weights is None:
        weights = np.ones(idx.size)
    else:
        weights = np.asarray(initial_weights, dtype=np.float64).copy()
        if weights.shape != (idx.size,):
            raise ValueError("initial_weights must match the candidate size")

    mu = mu_initial
    iterations = 0
    rotation: Mat3 | None = None
    while True:
        iterations += 1
        try:
            rotation = weighted_svd_rotation(sub, weights)
        except RankDeficient as exc:
            raise DegenerateCandidate(f"weighted solve lost rank: {exc}") from exc
        wsum = weights.sum()
        pbar = (weights @ p) / wsum
        qbar = (weights @ q) / wsum
        residuals = np.linalg.norm((p - pbar) @ rotation.T - (q - qbar), axis=1)
        new_weights = tb_weight(residuals, GncParams(mu=mu, xi=xi))
        mu = mu / mu_decay
        if np.count_nonzero(new_weights > 0) < 3:
            raise DegenerateCandidate("fewer than 3 candidates kept positive weight")
        converged = np.max(np.abs(new_weights - weights)) < convergence_tol
        weights = new_weights
        if converged or mu < 1.0:
            break
    return GncTrace(iterations, mu, weights, rotation)
