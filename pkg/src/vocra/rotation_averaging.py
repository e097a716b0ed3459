"""Outlier-tolerant single rotation averaging and chordal consensus.

The average is the chordal L1 median computed by Weiszfeld iteration, seeded
at the elementwise median of the sample matrices projected back to SO(3).
With any majority of the samples concentrated near a common rotation the
median seed already lands inside the cluster, and the reweighting then
ignores the scattered minority; this is what lets the consensus stage feed it
contaminated sample sets without prefiltering.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import EmptyInput, SingularInput
from .geometry import Mat3, chordal_distance, geodesic_distance, project_to_so3

# Weiszfeld controls. The distance floor guards the weight 1/d when an
# iterate coincides with a sample; the step tolerance is geodesic.
WEISZFELD_DISTANCE_FLOOR = 1e-5
WEISZFELD_STEP_TOL = 1e-6
WEISZFELD_MAX_ITERS = 10


@dataclass(frozen=True, slots=True)
class RotationSample:
    """A rotation hypothesis tagged with the correspondence index it came from."""

    rotation: Mat3
    source_index: int


def chordal_distances_to(stack: NDArray[np.float64], center: Mat3) -> NDArray[np.float64]:
    """Frobenius distances of a (m, 3, 3) stack to one rotation."""
    d = stack - center
    return np.sqrt(np.einsum("mij,mij->m", d, d))


def robust_average_stack(
    stack: NDArray[np.float64],
    floor: float = WEISZFELD_DISTANCE_FLOOR,
    step_tol: float = WEISZFELD_STEP_TOL,
    max_iters: int = WEISZFELD_MAX_ITERS,
) -> Mat3:
    """Chordal L1 median of a (m, 3, 3) rotation stack. Internal fast path."""
    if stack.shape[0] == 0:
        raise EmptyInput("cannot average zero rotations")
    try:
        center = project_to_so3(np.median(stack, axis=0))
    except SingularInput:
        center = stack[0]  # median can collapse only for adversarial inputs
    for _ in range(max_iters):
        w = 1.0 / np.maximum(chordal_distances_to(stack, center), floor)
        try:
            nxt = project_to_so3(np.einsum("m,mij->ij", w, stack))
        except SingularInput:
            break
        step = geodesic_distance(nxt, center)
        center = nxt
        if step < step_tol:
            break
    return center


def robust_lee_chordal(
    samples: list[RotationSample],
    floor: float = WEISZFELD_DISTANCE_FLOOR,
    step_tol: float = WEISZFELD_STEP_TOL,
    max_iters: int = WEISZFELD_MAX_ITERS,
) -> Mat3:
    """Robust average of rotation samples (chordal L1 median, Weiszfeld).

    Tolerances are exposed for studies but the defaults are the contract:
    1e-5 distance floor, 1e-6 geodesic step tolerance, 10 iterations.
    Raises EmptyInput on an empty sample list.
    """
    if not samples:
        raise EmptyInput("cannot average zero rotations")
    stack = np.stack([np.asarray(s.rotation, dtype=np.float64) for s in samples])
    return robust_average_stack(stack, floor=floor, step_tol=step_tol, max_iters=max_iters)


def chordal_consensus(
    samples: list[RotationSample], center: Mat3, theta: float
) -> list[int]:
    """Source indices of samples strictly within chordal theta of center.

    Input order is preserved. Distances are left-invariant, so a common
    pre-rotation of all samples and the center does not change the set.
    """
    if not theta > 0:
        raise ValueError("theta must be positive")
    return [
        s.source_index
        for s in samples
        if chordal_distance(s.rotation, center) < theta
    ]
