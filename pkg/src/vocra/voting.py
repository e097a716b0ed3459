"""Correspondence voting from pairwise length gaps.

Each unordered pair (i, j) casts a vote on both of its endpoints, sized by how
well the two segment lengths agree: an inlier pair changes a segment's length
by at most the noise, so true inliers accumulate systematically larger totals
than mismatches. With most correspondences correct the totals saturate fast,
and the scan stops as soon as one of the first 20 rows alone certifies a
high-inlier regime (e_in). The sorted order feeds the consensus stage.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.spatial.distance import cdist

from .cost import GncParams, KernelKind, VoteKernel, vote_increment
from .errors import InsufficientCorrespondences
from .geometry import CorrespondenceSet, Vec3

# Rows eligible for the saturation check, and the fraction of n a single row
# must reach to certify the high-inlier regime.
EARLY_EXIT_ROWS = 20
EARLY_EXIT_FRACTION = 0.2


@dataclass(slots=True)
class VoteTable:
    """Vote totals, the derived ranking, and the early-exit flag.

    When e_in is true the totals are the partial sums accumulated up to the
    row that fired the exit, and sorted_indices ranks those partial totals.
    """

    votes: NDArray[np.float64]
    sorted_indices: NDArray[np.intp]
    e_in: bool


def pairwise_scale_gap(p_i: Vec3, p_j: Vec3, q_i: Vec3, q_j: Vec3) -> float:
    """| ||q_i - q_j|| - ||p_i - p_j|| |: invariant to the unknown rigid motion."""
    dp = np.linalg.norm(np.asarray(p_j, float) - np.asarray(p_i, float))
    dq = np.linalg.norm(np.asarray(q_j, float) - np.asarray(q_i, float))
    return float(abs(dq - dp))


def _row_increments(corr: CorrespondenceSet, i: int, kernel: VoteKernel) -> NDArray[np.float64]:
    """Vote increments of pairs (i, j) for all j, with inc[i] = 0."""
    dp = cdist(corr.points_p[i : i + 1], corr.points_p)[0]
    dq = cdist(corr.points_q[i : i + 1], corr.points_q)[0]
    inc = vote_increment(np.abs(dq - dp), kernel)
    inc[i] = 0.0
    return inc


def voting_tb(
    corr: CorrespondenceSet, xi: float, kernel: VoteKernel | None = None
) -> VoteTable:
    """Accumulate pairwise votes and rank correspondences by total.

    Parameters
    ----------
    corr : correspondence set, at least 2 pairs.
    xi : voting scale; the default kernel is the biweight with mu = 1.5 at
        this scale.
    kernel : alternative kernel (comparison studies); used verbatim when
        given.

    Returns a VoteTable whose sorted_indices are by descending vote with ties
    broken by ascending original index. Equivalent to the sequential
    pair loop: after row i completes, the total for i is final, so the
    early-exit check can read full row sums; on exit, totals for later rows
    contain only the contributions of the processed rows.
    """
    n = len(corr)
    if n < 2:
        raise InsufficientCorrespondences("voting needs at least 2 correspondences")
    if not xi > 0:
        raise ValueError("xi must be positive")
    if kernel is None:
        kernel = VoteKernel(KernelKind.TUKEY_BIWEIGHT, GncParams(mu=1.5, xi=xi))

    threshold = EARLY_EXIT_FRACTION * n
    check_rows = min(EARLY_EXIT_ROWS, n - 1)

    # Pass 1: the first few full rows, mirroring the sequential check order.
    checked: list[NDArray[np.float64]] = []
    exit_row = -1
    for i in range(check_rows):
        inc = _row_increments(corr, i, kernel)
        checked.append(inc)
        if inc.sum() >= threshold:
            exit_row = i
            break

    if exit_row >= 0:
        # Pairs (a, b) with a <= exit_row were cast; both endpoints got credit.
        votes = np.zeros(n)
        for a, inc in enumerate(checked):
            tail = inc[a + 1 :]
            votes[a] += tail.sum()
            votes[a + 1 :] += tail
        order = np.argsort(-votes, kind="stable")
        return VoteTable(votes, order, True)

    # No exit: every pair is cast, and each total is just a full row sum.
    votes = np.empty(n)
    for i, inc in enumerate(checked):
        votes[i] = inc.sum()
    block = 512
    for start in range(check_rows, n, block):
        stop = min(start + block, n)
        dp = cdist(corr.points_p[start:stop], corr.points_p)
        dq = cdist(corr.points_q[start:stop], corr.points_q)
        inc = vote_increment(np.abs(dq - dp), kernel)
        inc[np.arange(stop - start), np.arange(start, stop)] = 0.0
        votes[start:stop] = inc.sum(axis=1)
    order = np.argsort(-votes, kind="stable")
    return VoteTable(votes, order, False)
