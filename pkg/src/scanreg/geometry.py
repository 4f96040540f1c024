"""Core 3D geometry: rigid transforms, line segments, Plucker lines, planes.

All positions are in meters. Rotations are proper 3x3 matrices. Everything
here is an immutable value with pure functions on top, so any of it can be
used concurrently without locking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class DegenerateGeometryError(ValueError):
    """The input configuration leaves the requested quantity undefined."""


def _vec3(x) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    return v


def cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # unrolled: np.cross has too much overhead for 3-vectors on hot paths
    return np.array(
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    )


def normalize(v: np.ndarray) -> np.ndarray:
    n = math.sqrt(float(v @ v))
    if n < 1e-15:
        raise DegenerateGeometryError("cannot normalize a zero vector")
    return v / n


@dataclass(slots=True)
class RigidTransform:
    """Proper rigid motion x -> rotation @ x + translation."""

    rotation: np.ndarray
    translation: np.ndarray

    @staticmethod
    def identity() -> "RigidTransform":
        return RigidTransform(np.eye(3), np.zeros(3))

    @staticmethod
    def from_matrix(m: np.ndarray) -> "RigidTransform":
        m = np.asarray(m, dtype=float)
        return RigidTransform(m[:3, :3].copy(), m[:3, 3].copy())

    def matrix(self) -> np.ndarray:
        out = np.eye(4)
        out[:3, :3] = self.rotation
        out[:3, 3] = self.translation
        return out

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Transform a (3,) point or an (N, 3) array of points."""
        p = np.asarray(points, dtype=float)
        if p.ndim == 1:
            return self.rotation @ p + self.translation
        return p @ self.rotation.T + self.translation

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """self ∘ other: apply `other` first, then self."""
        return RigidTransform(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )

    def __matmul__(self, other: "RigidTransform") -> "RigidTransform":
        return self.compose(other)

    def inverse(self) -> "RigidTransform":
        rt = self.rotation.T
        return RigidTransform(rt.copy(), -(rt @ self.translation))

    def rotation_valid(self, tol: float = 1e-9) -> bool:
        r = self.rotation
        return (
            np.abs(r.T @ r - np.eye(3)).max() < tol
            and abs(np.linalg.det(r) - 1.0) < tol
        )


@dataclass(slots=True)
class LineSegment3D:
    """Segment between endpoints a and b; degenerate segments are rejected."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.a = _vec3(self.a)
        self.b = _vec3(self.b)
        d = self.b - self.a
        if float(d @ d) < 1e-24:
            raise ValueError("degenerate segment: endpoints coincide")

    @property
    def direction(self) -> np.ndarray:
        return normalize(self.b - self.a)

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.b - self.a))

    def transformed(self, t: RigidTransform) -> "LineSegment3D":
        return LineSegment3D(t.apply(self.a), t.apply(self.b))


@dataclass(slots=True)
class PluckerLine:
    """Infinite 3D line as (unit direction, moment) with moment = p x direction."""

    direction: np.ndarray
    moment: np.ndarray

    def __post_init__(self):
        self.direction = _vec3(self.direction)
        self.moment = _vec3(self.moment)
        if abs(math.sqrt(float(self.direction @ self.direction)) - 1.0) > 1e-12:
            raise ValueError("Plucker direction must be a unit vector")
        if abs(float(self.direction @ self.moment)) > 1e-9:
            raise ValueError("Plucker line violates direction . moment = 0")

    def point_closest_to_origin(self) -> np.ndarray:
        return cross(self.direction, self.moment)


@dataclass(slots=True)
class Plane:
    """Plane {x : normal . x + offset = 0} with unit normal; offset in meters."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        self.normal = _vec3(self.normal)
        self.offset = float(self.offset)
        if abs(math.sqrt(float(self.normal @ self.normal)) - 1.0) > 1e-12:
            raise ValueError("plane normal must be a unit vector")

    def signed_distance(self, points: np.ndarray) -> np.ndarray | float:
        p = np.asarray(points, dtype=float)
        if p.ndim == 1:
            return float(self.normal @ p + self.offset)
        return p @ self.normal + self.offset

    @staticmethod
    def from_point_normal(point, normal) -> "Plane":
        n = normalize(_vec3(normal))
        return Plane(n, -float(n @ _vec3(point)))


def plucker_from_segment(seg: LineSegment3D) -> PluckerLine:
    """Plucker coordinates of the infinite line carrying `seg`."""
    d = seg.direction
    return PluckerLine(d, cross(seg.a, d))


def transform_line(t: RigidTransform, line: PluckerLine) -> PluckerLine:
    d = t.rotation @ line.direction
    m = t.rotation @ line.moment + cross(t.translation, d)
    return PluckerLine(d, m)


def transform_plane(t: RigidTransform, plane: Plane) -> Plane:
    n = t.rotation @ plane.normal
    return Plane(n, plane.offset - float(n @ t.translation))


def epipolar_residual(m: PluckerLine, l: PluckerLine, transform: RigidTransform) -> float:
    """Bilinear intersection residual between line `l` carried by `transform`
    and line `m` expressed in the target frame.

    Vanishes exactly when the transported `l` meets (or is coplanar with) `m`.
    Equals m6^T E l6 for 6-vectors ordered (direction, moment), where E stacks
    the cross-product/rotation blocks of the generalized epipolar constraint.
    """
    r = transform.rotation
    t = transform.translation
    ld = l.direction
    lm = l.moment
    # transported direction and moment of l, unrolled for speed
    d0 = r[0, 0] * ld[0] + r[0, 1] * ld[1] + r[0, 2] * ld[2]
    d1 = r[1, 0] * ld[0] + r[1, 1] * ld[1] + r[1, 2] * ld[2]
    d2 = r[2, 0] * ld[0] + r[2, 1] * ld[1] + r[2, 2] * ld[2]
    m0 = r[0, 0] * lm[0] + r[0, 1] * lm[1] + r[0, 2] * lm[2] + t[1] * d2 - t[2] * d1
    m1 = r[1, 0] * lm[0] + r[1, 1] * lm[1] + r[1, 2] * lm[2] + t[2] * d0 - t[0] * d2
    m2 = r[2, 0] * lm[0] + r[2, 1] * lm[1] + r[2, 2] * lm[2] + t[0] * d1 - t[1] * d0
    md = m.direction
    mm = m.moment
    return float(
        md[0] * m0 + md[1] * m1 + md[2] * m2 + mm[0] * d0 + mm[1] * d1 + mm[2] * d2
    )


_PARALLEL_TOL = 1e-12


def closest_points(
    s1: LineSegment3D, s2: LineSegment3D
) -> tuple[np.ndarray, np.ndarray, float]:
    """Closest pair of points between two segments (clamped to their extents).

    Returns (p1 on s1, p2 on s2, distance). For parallel overlapping segments
    the tie is broken at the midpoint of the overlap interval, which keeps the
    result symmetric under argument swap.
    """
    p, q = _closest_params(s1.a, s1.b, s2.a, s2.b)
    p1 = s1.a + p * (s1.b - s1.a)
    p2 = s2.a + q * (s2.b - s2.a)
    return p1, p2, float(np.linalg.norm(p1 - p2))


def _closest_params(a1, b1, a2, b2) -> tuple[float, float]:
    d1 = b1 - a1
    d2 = b2 - a2
    r = a1 - a2
    a = float(d1 @ d1)
    e = float(d2 @ d2)
    b = float(d1 @ d2)
    c = float(d1 @ r)
    f = float(d2 @ r)
    denom = a * e - b * b
    if denom > _PARALLEL_TOL * a * e:
        s = min(max((b * f - c * e) / denom, 0.0), 1.0)
        t = (b * s + f) / e
        if t < 0.0:
            t = 0.0
            s = min(max(-c / a, 0.0), 1.0)
        elif t > 1.0:
            t = 1.0
            s = min(max((b - c) / a, 0.0), 1.0)
        return s, t
    # parallel: overlap midpoint rule
    t0 = float((a2 - a1) @ d1) / a
    t1 = float((b2 - a1) @ d1) / a
    lo = max(0.0, min(t0, t1))
    hi = min(1.0, max(t0, t1))
    if lo <= hi:
        s = 0.5 * (lo + hi)
    else:
        # no axial overlap: closest pair sits at the facing endpoints
        s = 1.0 if min(t0, t1) > 1.0 else 0.0
    p1 = a1 + s * d1
    t = min(max(float((p1 - a2) @ d2) / e, 0.0), 1.0)
    return s, t


def closest_points_batch(a1, b1, a2, b2):
    """Vectorized segment-segment closest points.

    All inputs are (N, 3). Returns (p1, p2, dist) with the same conventions as
    `closest_points`, including the parallel overlap-midpoint rule.
    """
    a1 = np.asarray(a1, dtype=float)
    b1 = np.asarray(b1, dtype=float)
    a2 = np.asarray(a2, dtype=float)
    b2 = np.asarray(b2, dtype=float)
    d1 = b1 - a1
    d2 = b2 - a2
    r = a1 - a2
    a = np.einsum("ij,ij->i", d1, d1)
    e = np.einsum("ij,ij->i", d2, d2)
    b = np.einsum("ij,ij->i", d1, d2)
    c = np.einsum("ij,ij->i", d1, r)
    f = np.einsum("ij,ij->i", d2, r)
    denom = a * e - b * b
    parallel = denom <= _PARALLEL_TOL * a * e

    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.clip((b * f - c * e) / denom, 0.0, 1.0)
    s[parallel] = 0.0
    t = (b * s + f) / e
    low = t < 0.0
    high = t > 1.0
    t = np.clip(t, 0.0, 1.0)
    s = np.where(low, np.clip(-c / a, 0.0, 1.0), s)
    s = np.where(high, np.clip((b - c) / a, 0.0, 1.0), s)

    if parallel.any():
        idx = np.nonzero(parallel)[0]
        t0 = np.einsum("ij,ij->i", a2[idx] - a1[idx], d1[idx]) / a[idx]
        t1 = np.einsum("ij,ij->i", b2[idx] - a1[idx], d1[idx]) / a[idx]
        lo = np.maximum(0.0, np.minimum(t0, t1))
        hi = np.minimum(1.0, np.maximum(t0, t1))
        sp = np.where(lo <= hi, 0.5 * (lo + hi), np.where(np.minimum(t0, t1) > 1.0, 1.0, 0.0))
        p1p = a1[idx] + sp[:, None] * d1[idx]
        tp = np.clip(np.einsum("ij,ij->i", p1p - a2[idx], d2[idx]) / e[idx], 0.0, 1.0)
        s[idx] = sp
        t[idx] = tp

    p1 = a1 + s[:, None] * d1
    p2 = a2 + t[:, None] * d2
    dist = np.linalg.norm(p1 - p2, axis=1)
    return p1, p2, dist


def fit_rigid_transform(src, dst) -> RigidTransform:
    """Least-squares proper rigid transform T minimizing sum |T(src_i) - dst_i|^2.

    Orthogonal Procrustes with reflection correction. Requires at least three
    points and a non-collinear source configuration; anything less leaves the
    rotation under-determined and raises DegenerateGeometryError.
    """
    src = np.asarray(src, dtype=float).reshape(-1, 3)
    dst = np.asarray(dst, dtype=float).reshape(-1, 3)
    if src.shape != dst.shape:
        raise ValueError("point lists must have equal length")
    if src.shape[0] < 3:
        raise DegenerateGeometryError("need at least 3 point pairs")
    c_src = src.mean(axis=0)
    c_dst = dst.mean(axis=0)
    src_c = src - c_src
    dst_c = dst - c_dst
    sv_src = np.linalg.svd(src_c, compute_uv=False)
    if sv_src[1] <= 1e-9 * max(sv_src[0], 1e-12):
        raise DegenerateGeometryError("source points are collinear or coincident")
    h = src_c.T @ dst_c
    u, sv, vt = np.linalg.svd(h)
    if sv[1] <= 1e-9 * max(sv[0], 1e-12):
        raise DegenerateGeometryError("correspondence matrix is rank deficient")
    d = np.sign(np.linalg.det(vt.T @ u.T))
    r = vt.T @ np.diag([1.0, 1.0, d]) @ u.T
    t = c_dst - r @ c_src
    return RigidTransform(r, t)


def rotation_about_axis(axis, angle: float) -> np.ndarray:
    """Rodrigues rotation matrix for a rotation of `angle` radians about `axis`."""
    k = normalize(_vec3(axis))
    kx = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + math.sin(angle) * kx + (1 - math.cos(angle)) * (kx @ kx)


def rotation_angle(r: np.ndarray) -> float:
    """Rotation angle in radians; trace argument clamped against round-off."""
    return math.acos(min(1.0, max(-1.0, (float(np.trace(r)) - 1.0) / 2.0)))


def orthonormalize_rotation(r: np.ndarray) -> np.ndarray:
    """Project a near-rotation onto SO(3)."""
    u, _, vt = np.linalg.svd(r)
    d = np.sign(np.linalg.det(u @ vt))
    return u @ np.diag([1.0, 1.0, d]) @ vt


def quaternion_from_rotation(r: np.ndarray) -> np.ndarray:
    """Unit quaternion (x, y, z, w) for a rotation matrix; w >= 0."""
    tr = r[0, 0] + r[1, 1] + r[2, 2]
    if tr > 0:
        s = math.sqrt(tr + 1.0) * 2
        w = 0.25 * s
        x = (r[2, 1] - r[1, 2]) / s
        y = (r[0, 2] - r[2, 0]) / s
        z = (r[1, 0] - r[0, 1]) / s
    elif r[0, 0] > r[1, 1] and r[0, 0] > r[2, 2]:
        s = math.sqrt(1.0 + r[0, 0] - r[1, 1] - r[2, 2]) * 2
        w = (r[2, 1] - r[1, 2]) / s
        x = 0.25 * s
        y = (r[0, 1] + r[1, 0]) / s
        z = (r[0, 2] + r[2, 0]) / s
    elif r[1, 1] > r[2, 2]:
        s = math.sqrt(1.0 + r[1, 1] - r[0, 0] - r[2, 2]) * 2
        w = (r[0, 2] - r[2, 0]) / s
        x = (r[0, 1] + r[1, 0]) / s
        y = 0.25 * s
        z = (r[1, 2] + r[2, 1]) / s
    else:
        s = math.sqrt(1.0 + r[2, 2] - r[0, 0] - r[1, 1]) * 2
        w = (r[1, 0] - r[0, 1]) / s
        x = (r[0, 2] + r[2, 0]) / s
        y = (r[1, 2] + r[2, 1]) / s
        z = 0.25 * s
    q = np.array([x, y, z, w])
    if q[3] < 0:
        q = -q
    return q / np.linalg.norm(q)


def rotation_from_quaternion(q) -> np.ndarray:
    """Rotation matrix from quaternion (x, y, z, w); normalizes first."""
    q = np.asarray(q, dtype=float)
    q = q / np.linalg.norm(q)
    x, y, z, w = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
            [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
            [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
        ]
    )
