"""Failure taxonomy for the registration pipeline.

Every error carries enough context in its message to be actionable from a log
line. CLI code maps these onto process exit codes.
"""

from __future__ import annotations


class RegistrationError(Exception):
    """Base class for all solver and I/O failures raised by this package."""


class DegenerateTriad(RegistrationError):
    """Three points are collinear or coincident; no frame can be built."""


class RankDeficient(RegistrationError):
    """Weighted point scatter has rank < 2; rotation is not identifiable."""


class SingularInput(RegistrationError):
    """Matrix has no meaningful orientation content (all singular values ~ 0)."""


class InsufficientCorrespondences(RegistrationError):
    """Fewer input pairs than the stage minimum."""


class EmptyInput(RegistrationError):
    """An operation that needs at least one element received none."""


class NoConsensus(RegistrationError):
    """No anchor pair ever accumulated enough consistent rotation samples."""


class DegenerateCandidate(RegistrationError):
    """Candidate set collapsed during refinement (rank loss or < 3 live weights)."""


class EmptyInlierSet(RegistrationError):
    """Final residual thresholding kept fewer than 3 correspondences."""


class ParseError(RegistrationError):
    """Malformed correspondence file. Carries the offending 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line
