"""Rotation metrics and closed-form rigid alignment primitives.

What this module provides:
  * geodesic / chordal distances on SO(3) and the conversion between their
    consensus thresholds,
  * the minimal 3-point rotation solver (orthonormal triad construction),
  * weighted SVD alignment (Kabsch with weights and reflection fix),
  * nearest-rotation projection and Haar-uniform rotation sampling.

All functions are pure and operate on plain float64 numpy arrays: rotations
are (3, 3), points are (3,) or (n, 3). Nothing here mutates its inputs, so
every function is safe to call from multiple threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TypeAlias

import numpy as np
from numpy.typing import NDArray

from .errors import DegenerateTriad, RankDeficient, SingularInput

F64: TypeAlias = np.float64
Vec3: TypeAlias = NDArray[F64]      # shape (3,)
Mat3: TypeAlias = NDArray[F64]      # shape (3, 3)
Points: TypeAlias = NDArray[F64]    # shape (n, 3)

# Rank test below this relative singular-value ratio counts as deficient.
_RANK_RTOL = 1e-12
_TRIAD_RTOL = 1e-12


@dataclass(frozen=True, slots=True)
class RigidTransform:
    """Rotation plus translation, applied as q = rotation @ p + translation."""

    rotation: Mat3
    translation: Vec3

    def apply(self, points: Points) -> Points:
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        out = pts @ self.rotation.T + self.translation
        return out[0] if np.ndim(points) == 1 else out


@dataclass(slots=True)
class CorrespondenceSet:
    """Paired source/target points with the shared per-component noise scale."""

    points_p: Points
    points_q: Points
    sigma: float

    def __post_init__(self) -> None:
        self.points_p = np.ascontiguousarray(self.points_p, dtype=np.float64)
        self.points_q = np.ascontiguousarray(self.points_q, dtype=np.float64)
        if self.points_p.ndim != 2 or self.points_p.shape[1] != 3:
            raise ValueError("points_p must have shape (n, 3)")
        if self.points_p.shape != self.points_q.shape:
            raise ValueError("points_p and points_q must have equal shapes")
        if not (np.isfinite(self.points_p).all() and np.isfinite(self.points_q).all()):
            raise ValueError("correspondences must be finite")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    def __len__(self) -> int:
        return self.points_p.shape[0]

    def subset(self, indices) -> "CorrespondenceSet":
        idx = np.asarray(indices, dtype=np.intp)
        return CorrespondenceSet(self.points_p[idx], self.points_q[idx], self.sigma)


def geodesic_distance(a: Mat3, b: Mat3) -> float:
    """Rotation angle of a^T b in radians, in [0, pi].

    The arccos argument is clamped to [-1, 1]; without the clamp, round-off
    on nearly identical rotations produces NaN.
    """
    c = (np.trace(a.T @ b) - 1.0) / 2.0
    return float(abs(np.arccos(np.clip(c, -1.0, 1.0))))


def chordal_distance(a: Mat3, b: Mat3) -> float:
    """Frobenius distance ||a - b||_F, in [0, 2*sqrt(2)]."""
    return float(np.linalg.norm(a - b))


def chordal_threshold_from_geodesic(theta_geo: float) -> float:
    """Map an angular tolerance to the equivalent chordal one: 2*sqrt(2)*sin(theta/2)."""
    return float(2.0 * np.sqrt(2.0) * np.sin(theta_geo / 2.0))


def is_rotation(m: Mat3, tol: float = 1e-9) -> bool:
    """True when m is orthonormal with determinant +1 within tol."""
    m = np.asarray(m, dtype=np.float64)
    if m.shape != (3, 3) or not np.isfinite(m).all():
        return False
    return (
        np.abs(m.T @ m - np.eye(3)).max() <= tol
        and abs(float(np.linalg.det(m)) - 1.0) <= tol
    )


def _triad_basis(p1: Vec3, p2: Vec3, p3: Vec3) -> Mat3:
    e1 = p2 - p1
    e2 = p3 - p1
    n1 = np.linalg.norm(e1)
    n2 = np.linalg.norm(e2)
    z_raw = np.cross(e1, e2)
    zn = np.linalg.norm(z_raw)
    # Degeneracy scale follows the edge-length product, not an absolute floor.
    # n2 == 0 must be tested on its own: it zeroes the threshold, and a zero
    # cross product would otherwise slip through as 0 >= 0.
    if n1 == 0.0 or n2 == 0.0 or zn < _TRIAD_RTOL * n1 * n2:
        raise DegenerateTriad("triad points are collinear or coincident")
    x = e1 / n1
    z = z_raw / zn
    y = np.cross(z, x)
    return np.column_stack((x, y, z))


def horn_triad_rotation(
    p1: Vec3, p2: Vec3, p3: Vec3, q1: Vec3, q2: Vec3, q3: Vec3
) -> Mat3:
    """Closed-form rotation aligning the (p1,p2,p3) triad with (q1,q2,q3).

    Builds an orthonormal frame on each side (x along the first edge, z along
    the plane normal, y completing the frame) and returns T_q @ T_p^T. On
    noiseless rigid data this recovers the exact rotation.

    Raises DegenerateTriad when either triad is collinear within
    1e-12 relative to the edge-length product.
    """
    tp = _triad_basis(np.asarray(p1, float), np.asarray(p2, float), np.asarray(p3, float))
    tq = _triad_basis(np.asarray(q1, float), np.asarray(q2, float), np.asarray(q3, float))
    return tq @ tp.T


def horn_triad_rotations_batch(
    p1: Vec3, p2: Vec3, p3s: Points, q1: Vec3, q2: Vec3, q3s: Points
) -> tuple[NDArray[F64], NDArray[np.bool_]]:
    """Vectorized triad solves sharing the anchor pair (p1,p2)/(q1,q2).

    Returns (rotations, valid): rotations is (m, 3, 3); valid marks triads
    where both sides are non-degenerate. Invalid slots hold identity and must
    be masked by the caller. Results match horn_triad_rotation elementwise.
    """
    p3s = np.atleast_2d(p3s)
    q3s = np.atleast_2d(q3s)
    m = p3s.shape[0]

    def side(a1, a2, a3s):
        e1 = a2 - a1
        n1 = np.linalg.norm(e1)
        w = a3s - a1
        z_raw = np.cross(np.broadcast_to(e1, w.shape), w)
        zn = np.linalg.norm(z_raw, axis=1)
        wn = np.linalg.norm(w, axis=1)
        # wn > 0 guards coincident third points (duplicate targets do occur);
        # without it the degeneracy threshold collapses to 0 >= 0.
        ok = (n1 > 0.0) & (wn > 0.0) & (zn >= _TRIAD_RTOL * n1 * wn)
        safe = np.where(ok, zn, 1.0)
        x = e1 / n1 if n1 > 0 else e1
        z = z_raw / safe[:, None]
        y = np.cross(z, np.broadcast_to(x, z.shape))
        basis = np.empty((a3s.shape[0], 3, 3))
        basis[:, :, 0] = x
        basis[:, :, 1] = y
        basis[:, :, 2] = z
        return basis, ok

    tp, okp = side(np.asarray(p1, float), np.asarray(p2, float), p3s)
    tq, okq = side(np.asarray(q1, float), np.asarray(q2, float), q3s)
    valid = okp & okq
    rots = np.matmul(tq, np.transpose(tp, (0, 2, 1)))
    valid &= np.isfinite(rots).all(axis=(1, 2))
    rots[~valid] = np.eye(3)
    return rots, valid


def weighted_svd_rotation(pairs: CorrespondenceSet, weights: NDArray[F64]) -> Mat3:
    """Weighted least-squares rotation from p to q (Kabsch with weights).

    Minimizes sum_i w_i ||R (p_i - pbar) - (q_i - qbar)||^2 where the
    centroids are weighted. The reflection ambiguity is resolved by flipping
    the axis of the smallest singular value when det would be -1.

    Raises RankDeficient when the weighted p scatter has rank < 2 (points on
    a line or a single point carry no orientation).
    """
    if len(pairs) < 3:
        raise ValueError("need at least 3 correspondences")
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (len(pairs),):
        raise ValueError("weights must be one scalar per correspondence")
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    wsum = w.sum()
    if wsum <= 0:
        raise RankDeficient("total weight is zero")
    pbar = (w @ pairs.points_p) / wsum
    qbar = (w @ pairs.points_q) / wsum
    pc = pairs.points_p - pbar
    qc = pairs.points_q - qbar
    sv = np.linalg.svd(np.sqrt(w)[:, None] * pc, compute_uv=False)
    if sv[0] <= 0 or sv[1] < _RANK_RTOL * sv[0]:
        raise RankDeficient("weighted source scatter has rank < 2")
    h = (w[:, None] * pc).T @ qc
    u, _, vt = np.linalg.svd(h)
    v = vt.T
    d = np.sign(np.linalg.det(v @ u.T))
    return v @ np.diag([1.0, 1.0, d]) @ u.T


def project_to_so3(m: Mat3) -> Mat3:
    """Nearest rotation to m in Frobenius norm (SVD with determinant fix).

    Raises SingularInput when every singular value is below 1e-12: such a
    matrix carries no orientation and any projection would be arbitrary.
    """
    u, s, vt = np.linalg.svd(np.asarray(m, dtype=np.float64))
    if s[0] < 1e-12:
        raise SingularInput("matrix is numerically zero")
    d = np.sign(np.linalg.det(u @ vt))
    return u @ np.diag([1.0, 1.0, d]) @ vt


def random_rotation(rng: np.random.Generator) -> Mat3:
    """Haar-uniform rotation via a normalized Gaussian quaternion."""
    q = rng.normal(size=4)
    n = np.linalg.norm(q)
    while n < 1e-12:  # astronomically rare; keeps the draw well defined
        q = rng.normal(size=4)
        n = np.linalg.norm(q)
    w, x, y, z = q / n
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def rotation_about_axis(axis: Vec3, angle: float) -> Mat3:
    """Rodrigues rotation about a (not necessarily unit) axis."""
    a = np.asarray(axis, dtype=np.float64)
    n = np.linalg.norm(a)
    if n == 0:
        raise ValueError("axis must be nonzero")
    a = a / n
    k = np.array([[0, -a[2], a[1]], [a[2], 0, -a[0]], [-a[1], a[0], 0]])
    return np.eye(3) + np.sin(angle) * k + (1 - np.cos(angle)) * (k @ k)
