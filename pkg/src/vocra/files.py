"""Correspondence files and ground-truth sidecars.

Correspondence format: ASCII, one pair per line as `px py pz qx qy qz`,
`#` starts a comment line, blank lines are ignored. The sidecar is JSON with
a row-major 9-float rotation, a 3-float translation, and the true inlier
index list (0-based).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ParseError
from .geometry import CorrespondenceSet, RigidTransform


def load_correspondences(path: str | Path, sigma: float) -> CorrespondenceSet:
    """Parse a correspondence file. Raises ParseError naming the bad line."""
    ps: list[list[float]] = []
    qs: list[list[float]] = []
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 6:
            raise ParseError(
                f"line {lineno}: expected 6 values, got {len(parts)}", line=lineno
            )
        try:
            vals = [float(x) for x in parts]
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}", line=lineno) from exc
        if not all(np.isfinite(vals)):
            raise ParseError(f"line {lineno}: non-finite value", line=lineno)
        ps.append(vals[:3])
        qs.append(vals[3:])
    p = np.array(ps, dtype=np.float64).reshape(len(ps), 3)
    q = np.array(qs, dtype=np.float64).reshape(len(qs), 3)
    return CorrespondenceSet(p, q, sigma)


def save_correspondences(corr: CorrespondenceSet, path: str | Path) -> None:
    lines = ["# px py pz qx qy qz"]
    for p, q in zip(corr.points_p, corr.points_q):
        lines.append(" ".join(repr(float(v)) for v in (*p, *q)))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def save_ground_truth(
    transform: RigidTransform, inliers: list[int], path: str | Path
) -> None:
    payload = {
        "rotation": [float(v) for v in np.asarray(transform.rotation).ravel()],
        "translation": [float(v) for v in np.asarray(transform.translation)],
        "inliers": [int(i) for i in inliers],
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def load_ground_truth(path: str | Path) -> tuple[RigidTransform, list[int]]:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    try:
        rotation = np.array(payload["rotation"], dtype=np.float64).reshape(3, 3)
        translation = np.array(payload["translation"], dtype=np.float64)
        inliers = [int(i) for i in payload.get("inliers", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed ground truth: {exc}") from exc
    if translation.shape != (3,):
        raise ParseError(f"{path}: translation must have 3 components")
    return RigidTransform(rotation, translation), inliers
