"""Biweight surrogate cost family and the vote kernels built on it.

The graduated surrogate is parameterized by a control parameter mu >= 1 and a
scale xi > 0: mu stretches the support of the truncated sextic so early
iterations behave like least squares, and annealing mu toward 1 recovers the
hard biweight truncation. The outlier process is the dual penalty that makes
the alternating weight update exact.

All evaluators accept scalars or numpy arrays and broadcast elementwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


@dataclass(frozen=True, slots=True)
class GncParams:
    """Control parameter mu and residual scale xi; both must be positive."""

    mu: float
    xi: float

    def __post_init__(self) -> None:
        if not (self.mu > 0 and self.xi > 0):
            raise ValueError("mu and xi must be positive")


class KernelKind(Enum):
    ZERO_ONE = "zeroone"
    TUKEY_BIWEIGHT = "tb"
    GEMAN_MCCLURE = "gm"
    CAUCHY = "cauchy"
    LECLERC = "leclerc"
    TRUNCATED_LS = "tls"


@dataclass(frozen=True, slots=True)
class VoteKernel:
    """Kernel kind plus the (mu, xi) pair that sets its scale."""

    kind: KernelKind
    params: GncParams


def tb_surrogate_cost(r, params: GncParams):
    """Truncated-sextic surrogate: quadratic near zero, flat 1/3 past the support.

    Support boundary is r^2 = mu*xi^2. The two branches meet exactly only at
    mu = 1; larger mu widens the support without rescaling the plateau.
    """
    mu, xi = params.mu, params.xi
    r2 = np.square(np.asarray(r, dtype=np.float64))
    s = mu * xi * xi
    inside = (
        r2 / s - np.square(r2) / (mu * xi**4) + r2**3 / (3.0 * mu * xi**6)
    )
    out = np.where(r2 <= s, inside, 1.0 / 3.0)
    return float(out) if out.ndim == 0 else out


def tb_outlier_process(omega, params: GncParams):
    """Dual penalty mu*xi^2*(1/3 - w + (2/3) w^(3/2)) for weights in [0, 1]."""
    w = np.asarray(omega, dtype=np.float64)
    out = params.mu * params.xi**2 * (1.0 / 3.0 - w + (2.0 / 3.0) * np.power(w, 1.5))
    return float(out) if out.ndim == 0 else out


def tb_weight(r, params: GncParams):
    """Closed-form optimal weight: (1 - r^2/(mu xi^2))^2 inside the support, else 0."""
    mu, xi = params.mu, params.xi
    r2 = np.square(np.asarray(r, dtype=np.float64))
    s = mu * xi * xi
    out = np.where(r2 <= s, np.square(1.0 - r2 / s), 0.0)
    return float(out) if out.ndim == 0 else out


def tb_stationarity_residual(r, omega, params: GncParams):
    """Gradient of the per-residual objective in omega: r^2/(mu xi^2) - 1 + sqrt(omega).

    Zero exactly at the closed-form weight, which is what makes the weight
    update a true minimizer rather than a heuristic.
    """
    mu, xi = params.mu, params.xi
    r2 = np.square(np.asarray(r, dtype=np.float64))
    out = r2 / (mu * xi * xi) - 1.0 + np.sqrt(np.asarray(omega, dtype=np.float64))
    return float(out) if out.ndim == 0 else out


def per_residual_objective(r, omega, params: GncParams):
    """omega * r^2 / (mu xi^2) + outlier process; the quantity GNC descends."""
    mu, xi = params.mu, params.xi
    r2 = np.square(np.asarray(r, dtype=np.float64))
    w = np.asarray(omega, dtype=np.float64)
    out = w * r2 / (mu * xi * xi) + tb_outlier_process(w, params)
    return float(out) if out.ndim == 0 else out


def vote_increment(s, kernel: VoteKernel):
    """Vote contribution of one pairwise length gap under the chosen kernel.

    The biweight kernel uses the doubled scale (support S^2 <= 4 mu xi^2,
    boundary assigned to the zero branch); the 0/1 kernel is the plain
    threshold S <= 2 xi. The smooth comparison kernels share the biweight
    support scale c = 2 xi sqrt(mu). Every kernel returns 1 at S = 0 and 0
    beyond its support.
    """
    mu, xi = kernel.params.mu, kernel.params.xi
    sv = np.asarray(s, dtype=np.float64)
    s2 = np.square(sv)
    c2 = 4.0 * mu * xi * xi
    kind = kernel.kind
    if kind is KernelKind.TUKEY_BIWEIGHT:
        out = np.where(s2 < c2, np.square(1.0 - s2 / c2), 0.0)
    elif kind is KernelKind.ZERO_ONE:
        out = np.where(sv <= 2.0 * xi, 1.0, 0.0)
    elif kind is KernelKind.TRUNCATED_LS:
        out = np.where(s2 <= c2, 1.0, 0.0)
    elif kind is KernelKind.GEMAN_MCCLURE:
        out = 1.0 / np.square(1.0 + s2 / c2)
    elif kind is KernelKind.CAUCHY:
        out = 1.0 / (1.0 + s2 / c2)
    elif kind is KernelKind.LECLERC:
        out = np.exp(-s2 / c2)
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unknown kernel kind {kind}")
    return float(out) if out.ndim == 0 else out
