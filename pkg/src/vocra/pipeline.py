"""End-to-end registration: vote, maximize consensus, refine, recover.

The full solver chains the three stages and then recovers the transform:
translation from the weighted centroid difference under the refined rotation,
inlier recovery by residual thresholding over all correspondences, and a
final unweighted re-fit on the recovered set. A plain hypothesize-and-verify
baseline with the same minimal solver is included for benchmarking.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .consensus import ConsensusConfig, ConsensusResult, max_rot_consensus, min_inlier_schedule
from .cost import GncParams, KernelKind, VoteKernel
from .errors import DegenerateTriad, EmptyInlierSet, NoConsensus
from .gnc import GNC_MU_DECAY, GNC_MU_INITIAL, GncTrace, solve_gnc_tb
from .geometry import (
    CorrespondenceSet,
    Mat3,
    RigidTransform,
    Vec3,
    geodesic_distance,
    horn_triad_rotation,
    weighted_svd_rotation,
)
from .voting import VoteTable, voting_tb

DEFAULT_SIGMA = 0.01
DEFAULT_THETA = 0.15


@dataclass(slots=True)
class VocraConfig:
    """Solver configuration. The two residual scales default to 3 sigma for
    voting and 5 sigma for consensus/refinement; override them only to study
    the multipliers."""

    sigma: float = DEFAULT_SIGMA
    theta: float = DEFAULT_THETA
    xi1: float | None = None
    xi2: float | None = None
    vote_mu: float = 1.5
    gnc_mu_initial: float = GNC_MU_INITIAL
    gnc_mu_decay: float = GNC_MU_DECAY

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not self.theta > 0:
            raise ValueError("theta must be positive")
        if self.xi1 is None:
            self.xi1 = 3.0 * self.sigma
        if self.xi2 is None:
            self.xi2 = 5.0 * self.sigma
        if not (self.xi1 > 0 and self.xi2 > 0):
            raise ValueError("scales must be positive")


@dataclass(slots=True)
class StageDiagnostics:
    """Summaries of the three stages, JSON-friendly via dataclasses.asdict."""

    vote_max: float
    vote_min: float
    e_in: bool
    candidate_size: int
    consensus_size: int
    consensus_early_break: bool
    gnc_iterations: int
    gnc_final_mu: float
    gnc_positive_weights: int


@dataclass(slots=True)
class RegistrationResult:
    """Estimated transform, recovered inlier indices (ascending), per-stage
    diagnostics (None for the baseline), and wall-clock runtime."""

    transform: RigidTransform
    inliers: list[int]
    diagnostics: StageDiagnostics | None
    runtime_seconds: float


def rotation_error(r_true: Mat3, r_est: Mat3) -> float:
    """Geodesic distance in degrees."""
    return geodesic_distance(r_true, r_est) * 180.0 / math.pi


def translation_error(t_true: Vec3, t_est: Vec3) -> float:
    """Euclidean distance between translations."""
    return float(np.linalg.norm(np.asarray(t_true, float) - np.asarray(t_est, float)))


def _residuals(corr: CorrespondenceSet, rotation: Mat3, translation: Vec3) -> NDArray[np.float64]:
    return np.linalg.norm(
        corr.points_p @ rotation.T + translation - corr.points_q, axis=1
    )


def _threshold_refit(
    corr: CorrespondenceSet, rotation: Mat3, translation: Vec3, xi: float
) -> tuple[Mat3, Vec3, list[int]]:
    """Residual-threshold inliers, unweighted re-fit, iterate to a fixed point.

    The loop almost always stabilizes after one refit; the cap only guards a
    hypothetical oscillation, after which the set is re-derived from the
    final transform so the returned inliers always satisfy the xi bound
    under the returned estimate.
    """
    inliers = np.nonzero(_residuals(corr, rotation, translation) <= xi)[0]
    if inliers.size < 3:
        raise EmptyInlierSet(f"only {inliers.size} correspondences within {xi}")
    for _ in range(10):
        sub = corr.subset(inliers)
        rotation = weighted_svd_rotation(sub, np.ones(len(sub)))
        translation = sub.points_q.mean(axis=0) - rotation @ sub.points_p.mean(axis=0)
        refreshed = np.nonzero(_residuals(corr, rotation, translation) <= xi)[0]
        if refreshed.size < 3:
            raise EmptyInlierSet(f"only {refreshed.size} correspondences within {xi}")
        if np.array_equal(refreshed, inliers):
            break
        inliers = refreshed
    else:
        inliers = np.nonzero(_residuals(corr, rotation, translation) <= xi)[0]
        if inliers.size < 3:
            raise EmptyInlierSet("refit oscillation emptied the inlier set")
    return rotation, translation, [int(i) for i in inliers]


def vocra(corr: CorrespondenceSet, config: VocraConfig | None = None) -> RegistrationResult:
    """Run the full pipeline on a correspondence set.

    Deterministic: no randomness anywhere, identical inputs give identical
    results. Propagates NoConsensus / DegenerateCandidate from the stages and
    raises EmptyInlierSet when fewer than 3 correspondences survive the final
    residual threshold.
    """
    if config is None:
        config = VocraConfig(sigma=corr.sigma)
    start = time.perf_counter()

    kernel = VoteKernel(
        KernelKind.TUKEY_BIWEIGHT, GncParams(mu=config.vote_mu, xi=config.xi1)
    )
    table: VoteTable = voting_tb(corr, config.xi1, kernel)

    target = min_inlier_schedule(len(corr))
    cons: ConsensusResult = max_rot_consensus(
        corr,
        table.sorted_indices,
        ConsensusConfig(xi=config.xi2, theta=config.theta, min_inliers=target, e_in=table.e_in),
    )

    trace: GncTrace = solve_gnc_tb(
        corr,
        cons.inlier_candidates,
        config.xi2,
        mu_initial=config.gnc_mu_initial,
        mu_decay=config.gnc_mu_decay,
    )

    sub = corr.subset(cons.inlier_candidates)
    w = trace.final_weights
    pbar = (w @ sub.points_p) / w.sum()
    qbar = (w @ sub.points_q) / w.sum()
    translation = qbar - trace.rotation @ pbar
    rotation, translation, inliers = _threshold_refit(
        corr, trace.rotation, translation, config.xi2
    )

    runtime = time.perf_counter() - start
    diag = StageDiagnostics(
        vote_max=float(table.votes.max()),
        vote_min=float(table.votes.min()),
        e_in=table.e_in,
        candidate_size=len(cons.inlier_candidates),
        consensus_size=cons.consensus_size,
        consensus_early_break=cons.early_break,
        gnc_iterations=trace.iterations,
        gnc_final_mu=trace.final_mu,
        gnc_positive_weights=int(np.count_nonzero(trace.final_weights > 0)),
    )
    return RegistrationResult(
        RigidTransform(rotation, translation), inliers, diag, runtime
    )


def ransac_baseline(
    corr: CorrespondenceSet,
    xi: float,
    max_iters: int,
    rng: np.random.Generator,
    confidence: float = 0.99,
) -> RegistrationResult:
    """Plain 3-point hypothesize-and-verify with the same minimal solver.

    Stops early once the standard confidence bound says enough hypotheses
    were drawn for the best inlier ratio seen. Deterministic given rng.
    Raises NoConsensus when no hypothesis ever supports 3 inliers.
    """
    n = len(corr)
    if n < 3:
        raise NoConsensus("need at least 3 correspondences")
    if not xi > 0:
        raise ValueError("xi must be positive")
    start = time.perf_counter()
    p = corr.points_p
    q = corr.points_q
    best_count = 0
    best_rt: tuple[Mat3, Vec3] | None = None
    log_alpha = math.log(1.0 - confidence)
    iters_needed = max_iters
    i = 0
    while i < min(max_iters, iters_needed):
        i += 1
        pick = rng.choice(n, size=3, replace=False)
        try:
            rot = horn_triad_rotation(p[pick[0]], p[pick[1]], p[pick[2]],
                                      q[pick[0]], q[pick[1]], q[pick[2]])
        except DegenerateTriad:
            continue
        t = q[pick].mean(axis=0) - rot @ p[pick].mean(axis=0)
        count = int(np.count_nonzero(_residuals(corr, rot, t) <= xi))
        if count > best_count:
            best_count = count
            best_rt = (rot, t)
            ratio = count / n
            denom = math.log(max(1.0 - ratio**3, 1e-300))
            if denom < 0:
                iters_needed = min(max_iters, math.ceil(log_alpha / denom))
    if best_rt is None or best_count < 3:
        raise NoConsensus(f"best hypothesis supported {best_count} inliers")
    rotation, translation, inliers = _threshold_refit(corr, best_rt[0], best_rt[1], xi)
    runtime = time.perf_counter() - start
    return RegistrationResult(RigidTransform(rotation, translation), inliers, None, runtime)
