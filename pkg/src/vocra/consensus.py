"""Rotation-consensus maximization over vote-ranked correspondence triples.

Anchored enumeration: a pair (i, j) that passes the pairwise length test
anchors a scan over later-ranked k; every k consistent with both anchors
contributes a minimal triad rotation. Once enough samples are collected they
are robustly averaged, and the chordal consensus around the average becomes
the inlier-candidate set. Scanning in vote order makes the very first anchor
pairs overwhelmingly likely to be true inliers, so the early break fires
after a tiny fraction of the worst-case work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import NoConsensus
from .geometry import CorrespondenceSet, Mat3, horn_triad_rotations_batch
from .rotation_averaging import chordal_distances_to, robust_average_stack


@dataclass(frozen=True, slots=True)
class ConsensusConfig:
    """Scale xi for the pairwise test, chordal threshold theta, the minimum
    inlier target, and the voting early-exit flag that selects the regime."""

    xi: float
    theta: float
    min_inliers: int
    e_in: bool

    def __post_init__(self) -> None:
        if not (self.xi > 0 and self.theta > 0):
            raise ValueError("xi and theta must be positive")
        if self.min_inliers < 3:
            raise ValueError("min_inliers must be at least 3")


@dataclass(slots=True)
class ConsensusResult:
    """Candidate index set (anchors first), the averaged rotation it came
    from, the size of the rotation consensus behind it, and whether the
    enumeration stopped at the break target."""

    inlier_candidates: list[int]
    averaged_rotation: Mat3
    consensus_size: int
    early_break: bool


def min_inlier_schedule(n: int) -> int:
    """Minimum inlier target as a function of problem size.

    Piecewise fraction of n (5% under 200 with an absolute floor of 5, down
    to 1% at or above 1000), rounded to nearest, never below 3.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n < 200:
        raw = max(0.05 * n, 5.0)
    elif n < 300:
        raw = 0.04 * n
    elif n < 500:
        raw = 0.03 * n
    elif n < 1000:
        raw = 0.02 * n
    else:
        raw = 0.01 * n
    return max(3, int(math.floor(raw + 0.5)))


def max_rot_consensus(
    corr: CorrespondenceSet,
    order: np.ndarray,
    config: ConsensusConfig,
    exact: bool = False,
    triple_log: list[tuple[int, int, int]] | None = None,
) -> ConsensusResult:
    """Find the largest rotation-consistent candidate set.

    Parameters
    ----------
    corr : full correspondence set (n >= 3).
    order : vote ranking, a permutation of range(n); enumeration runs over
        its prefix (all of it when e_in, the top 20% otherwise).
    config : scales, threshold, minimum inlier target, regime flag.
    exact : disable the re-averaging skip guard (same returned result on runs
        that never hit the break target; the guard only saves work).
    triple_log : when given, every triple whose three pairs all pass the
        length test is appended as original-index tuples (test hook).

    Raises NoConsensus when no anchor pair ever accumulates enough samples
    to trigger an averaging pass.
    """
    n = len(corr)
    if n < 3:
        raise ValueError("consensus needs at least 3 correspondences")
    d = np.asarray(order, dtype=np.intp)
    if d.shape != (n,) or not np.array_equal(np.sort(d), np.arange(n)):
        raise ValueError("order must be a permutation of range(n)")

    if config.e_in:
        n_top = n
        num_break = math.ceil(1.5 * config.min_inliers)
    else:
        n_top = min(n, max(3, math.ceil(0.2 * n)))
        num_break = config.min_inliers
    min_collected = config.min_inliers - 3
    gate = 2.0 * config.xi
    guard_radius = 2.0 * config.theta

    top = d[:n_top]
    p_top = corr.points_p[top]
    q_top = corr.points_q[top]
    s_mat = np.abs(cdist(q_top, q_top) - cdist(p_top, p_top))
    eligible = s_mat <= gate

    best_set: list[int] | None = None
    best_rot: Mat3 | None = None
    k_max = 0
    averaged_once = False
    early = False

    for a in range(n_top - 2):
        row_a = eligible[a]
        for b in range(a + 1, n_top - 1):
            if not row_a[b]:
                continue
            cand = np.nonzero(row_a[b + 1 :] & eligible[b, b + 1 :])[0]
            if cand.size == 0:
                continue
            cand = cand + b + 1
            if triple_log is not None:
                triple_log.extend(
                    (int(top[a]), int(top[b]), int(top[c])) for c in cand
                )
            rots, valid = horn_triad_rotations_batch(
                p_top[a], p_top[b], p_top[cand], q_top[a], q_top[b], q_top[cand]
            )
            if not valid.any():
                continue
            rots = rots[valid]
            kept = top[cand[valid]]

            last_center: Mat3 | None = None
            last_size = 0
            for m in range(rots.shape[0]):
                count = m + 1
                if count < min_collected:
                    continue
                if (
                    not exact
                    and last_center is not None
                    and float(np.linalg.norm(rots[m] - last_center)) > guard_radius
                    and last_size + 2 < num_break
                ):
                    continue  # the new sample cannot move the outcome
                center = robust_average_stack(rots[: m + 1])
                dists = chordal_distances_to(rots[: m + 1], center)
                mask = dists < config.theta
                size = int(mask.sum())
                last_center, last_size = center, size
                averaged_once = True
                if size >= k_max:
                    k_max = size
                    best_set = [int(top[a]), int(top[b])] + [
                        int(x) for x in kept[: m + 1][mask]
                    ]
                    best_rot = center
                    if len(best_set) >= num_break:
                        early = True
                        break
            if early:
                break
        if early:
            break

    if not averaged_once or best_set is None:
        raise NoConsensus(
            "no anchor pair accumulated enough rotation samples "
            f"(needed {max(min_collected, 1)} per pair)"
        )
    return ConsensusResult(best_set, best_rot, k_max, early)
