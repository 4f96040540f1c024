"""Closed-form minimal solvers: one line + two planes, three lines + one plane.

Both solvers pre-transform each scan into a canonical frame (plane(s) onto the
XY plane) where the remaining pose has one and three degrees of freedom
respectively, solve there, and compose the pre-transforms back out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .geometry import DegenerateGeometryError, Plane, PluckerLine, RigidTransform


@dataclass(slots=True)
class CanonicalFrames:
    """Per-scan pre-transforms into the solver's canonical configuration."""

    pre1: RigidTransform
    pre2: RigidTransform


@dataclass(slots=True)
class Quartic:
    """Polynomial c4 s^4 + c3 s^3 + c2 s^2 + c1 s + c0."""

    c4: float
    c3: float
    c2: float
    c1: float
    c0: float

    def coefficients(self) -> np.ndarray:
        return np.array([self.c4, self.c3, self.c2, self.c1, self.c0], dtype=float)

    def __call__(self, s: float) -> float:
        return float(np.polyval(self.coefficients(), s))


@dataclass(slots=True)
class PoseCandidateSet:
    """Up to four poses consistent with the generating constraints."""

    poses: list[RigidTransform]

    def __len__(self) -> int:
        return len(self.poses)

    def __iter__(self):
        return iter(self.poses)

    def __getitem__(self, i) -> RigidTransform:
        return self.poses[i]


def solve_quartic(q: Quartic) -> list[float]:
    """All real roots, ascending; duplicates within 1e-10 merged.

    Leading coefficients that vanish reduce the degree; the all-zero
    polynomial is rejected.
    """
    roots, count = _kernels.poly_real_roots(q.coefficients())
    if count < 0:
        raise ValueError("zero polynomial has no well-defined roots")
    return [float(r) for r in roots[:count]]


def canonicalize_3l1p(p1: Plane) -> RigidTransform:
    """Transform mapping p1 onto z=0 with normal +z; in-plane freedom fixed
    deterministically (closest-to-origin point to origin, world x-axis
    projection to +x)."""
    r, t = _kernels.canon_plane_xy(p1.normal, p1.offset)
    return RigidTransform(r, t)


def canonicalize_1l2p(p1: Plane, p2: Plane) -> RigidTransform:
    """Transform mapping p2 onto z=0 with normal +z and the p1/p2 intersection
    line onto the x-axis (oriented so the image of p1's normal has positive
    y-component). Raises for near-parallel planes (under 1 degree)."""
    ok, r, t = _kernels.canon_two_planes(p1.normal, p1.offset, p2.normal, p2.offset)
    if not ok:
        raise DegenerateGeometryError("planes are near-parallel; no canonical frame")
    return RigidTransform(r, t)


def solve_1l2p(
    l1: PluckerLine,
    m1: PluckerLine,
    planes1: tuple[Plane, Plane],
    planes2: tuple[Plane, Plane],
) -> RigidTransform:
    """Pose from one line intersection and two plane correspondences.

    l1 lives in scan 1, m1 in scan 2; planes1/planes2 are the corresponding
    plane pairs (the second plane of each is sent to the XY plane). In the
    canonical frames the pose reduces to a single x-translation, linear in the
    intersection constraint.
    """
    status, r, t = _kernels.solve_1l2p(
        l1.direction,
        l1.moment,
        m1.direction,
        m1.moment,
        planes1[0].normal,
        planes1[0].offset,
        planes1[1].normal,
        planes1[1].offset,
        planes2[0].normal,
        planes2[0].offset,
        planes2[1].normal,
        planes2[1].offset,
    )
    if status == 1:
        raise DegenerateGeometryError("planes are near-parallel; no canonical frame")
    if status == 2:
        raise DegenerateGeometryError(
            "line pair is uninformative about the canonical x-translation"
        )
    return RigidTransform(r, t)


def solve_3l1p(
    line_pairs,
    p1: Plane,
    p1_other: Plane,
) -> PoseCandidateSet:
    """Pose candidates from three line intersections and one plane
    correspondence.

    line_pairs is a sequence of three (scan-1 line, scan-2 line) PluckerLine
    pairs; p1/p1_other the corresponding planes. The canonical pose is a
    rotation about z plus an in-plane translation; eliminating the translation
    leaves a quartic in sin(theta), and every admissible root is checked with
    both cosine signs against all three constraints. Returns up to four
    consistent poses (possibly none); raises when the constraints do not
    determine the pose at all.
    """
    if len(line_pairs) != 3:
        raise ValueError("exactly three line pairs are required")
    ld = np.ascontiguousarray([p[0].direction for p in line_pairs], dtype=float)
    lm = np.ascontiguousarray([p[0].moment for p in line_pairs], dtype=float)
    md = np.ascontiguousarray([p[1].direction for p in line_pairs], dtype=float)
    mm = np.ascontiguousarray([p[1].moment for p in line_pairs], dtype=float)
    status, count, rs, ts = _kernels.solve_3l1p(
        ld, lm, md, mm, p1.normal, p1.offset, p1_other.normal, p1_other.offset
    )
    if status == 1:
        raise DegenerateGeometryError(
            "line constraints are degenerate; elimination is singular"
        )
    return PoseCandidateSet(
        [RigidTransform(rs[i].copy(), ts[i].copy()) for i in range(count)]
    )
