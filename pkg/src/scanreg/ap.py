"""Alternating projection solver for line-segment intersection constraints.

Given N segment pairs across two frames, the solver alternates between an
intersection projection (translate each pair's segments toward each other by
half the closest-point gap) and a rigidity projection (Procrustes-fit each
frame's working endpoints back onto a rigid motion of the originals) until the
largest endpoint move in a sweep drops below a threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .geometry import (
    DegenerateGeometryError,
    LineSegment3D,
    RigidTransform,
    closest_points_batch,
    fit_rigid_transform,
)


class UnderconstrainedError(ValueError):
    """Fewer constraints than needed for a well-posed solve."""


@dataclass(slots=True)
class ApConfig:
    """Termination and relaxation settings for the alternating projection."""

    epsilon: float = 0.005
    max_iters: int = 30_000
    relaxation: float = 1.0
    record_pose_trace: bool = False

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not 0.0 < self.relaxation <= 2.0:
            raise ValueError("relaxation must lie in (0, 2]")

    @staticmethod
    def lidar() -> "ApConfig":
        return ApConfig(epsilon=0.02)

    @staticmethod
    def depth_camera() -> "ApConfig":
        return ApConfig(epsilon=0.005)


@dataclass
class SegmentPairSet:
    """Corresponding segment pairs with immutable originals and mutable
    working endpoints (one row per pair)."""

    a1: np.ndarray
    b1: np.ndarray
    a2: np.ndarray
    b2: np.ndarray
    wa1: np.ndarray = field(default=None, repr=False)
    wb1: np.ndarray = field(default=None, repr=False)
    wa2: np.ndarray = field(default=None, repr=False)
    wb2: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("a1", "b1", "a2", "b2"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=float)
            if arr.ndim != 2 or arr.shape[1] != 3:
                raise ValueError("endpoint arrays must be (N, 3)")
            setattr(self, name, arr)
        n = {self.a1.shape[0], self.b1.shape[0], self.a2.shape[0], self.b2.shape[0]}
        if len(n) != 1:
            raise ValueError("endpoint arrays must have equal length")
        if self.wa1 is None:
            self.reset()

    @classmethod
    def from_pairs(cls, pairs) -> "SegmentPairSet":
        """Build from a sequence of (frame-1 segment, frame-2 segment)."""
        a1 = np.array([p[0].a for p in pairs], dtype=float).reshape(-1, 3)
        b1 = np.array([p[0].b for p in pairs], dtype=float).reshape(-1, 3)
        a2 = np.array([p[1].a for p in pairs], dtype=float).reshape(-1, 3)
        b2 = np.array([p[1].b for p in pairs], dtype=float).reshape(-1, 3)
        return cls(a1, b1, a2, b2)

    def __len__(self) -> int:
        return self.a1.shape[0]

    def reset(self) -> None:
        self.wa1 = self.a1.copy()
        self.wb1 = self.b1.copy()
        self.wa2 = self.a2.copy()
        self.wb2 = self.b2.copy()

    def copy(self) -> "SegmentPairSet":
        return SegmentPairSet(
            self.a1.copy(), self.b1.copy(), self.a2.copy(), self.b2.copy(),
            self.wa1.copy(), self.wb1.copy(), self.wa2.copy(), self.wb2.copy(),
        )

    def working_segments(self, frame: int) -> list[LineSegment3D]:
        if frame == 1:
            return [LineSegment3D(a, b) for a, b in zip(self.wa1, self.wb1)]
        return [LineSegment3D(a, b) for a, b in zip(self.wa2, self.wb2)]

    def original_endpoints(self, frame: int) -> np.ndarray:
        if frame == 1:
            return np.vstack((self.a1, self.b1))
        return np.vstack((self.a2, self.b2))

    def working_endpoints(self, frame: int) -> np.ndarray:
        if frame == 1:
            return np.vstack((self.wa1, self.wb1))
        return np.vstack((self.wa2, self.wb2))


def project_intersection(
    seg1: LineSegment3D, seg2: LineSegment3D, relaxation: float = 1.0
) -> tuple[LineSegment3D, LineSegment3D]:
    """Translate both segments toward each other by half the closest-point gap
    so they touch at the former midpoint; lengths are preserved."""
    p1, p2 = _kernels.seg_closest(seg1.a, seg1.b, seg2.a, seg2.b)
    shift = 0.5 * relaxation * (p2 - p1)
    return (
        LineSegment3D(seg1.a + shift, seg1.b + shift),
        LineSegment3D(seg2.a - shift, seg2.b - shift),
    )


def project_rigidity(
    pair_set: SegmentPairSet,
) -> tuple[SegmentPairSet, RigidTransform, RigidTransform]:
    """Replace each frame's working endpoints with the rigid least-squares fit
    of its originals; returns the set (mutated in place) and the two fits."""
    t1 = fit_rigid_transform(pair_set.original_endpoints(1), pair_set.working_endpoints(1))
    t2 = fit_rigid_transform(pair_set.original_endpoints(2), pair_set.working_endpoints(2))
    pair_set.wa1 = pair_set.a1 @ t1.rotation.T + t1.translation
    pair_set.wb1 = pair_set.b1 @ t1.rotation.T + t1.translation
    pair_set.wa2 = pair_set.a2 @ t2.rotation.T + t2.translation
    pair_set.wb2 = pair_set.b2 @ t2.rotation.T + t2.translation
    return pair_set, t1, t2


@dataclass
class ApResult:
    """Outcome of one alternating-projection solve.

    `transform` maps frame-1 coordinates into frame 2 (T2^-1 o T1 over the
    per-frame rigidity fits). `converged` is False when the iteration cap was
    hit or a degeneracy diagnostic fired; `degeneracy` then names the reason.
    """

    transform: RigidTransform
    converged: bool
    iterations: int
    final_update: float
    unsatisfied_pairs: int
    degeneracy: str | None
    frame1_fit: RigidTransform
    frame2_fit: RigidTransform
    update_history: np.ndarray
    pose_history: np.ndarray | None = None

    @property
    def degenerate(self) -> bool:
        return self.degeneracy is not None

    def write_trace_csv(self, path) -> None:
        """Per-sweep convergence trace; pose columns when recorded."""
        with open(path, "w", encoding="utf-8") as fh:
            if self.pose_history is not None:
                cols = ",".join(f"r{j}{k}" for j in range(3) for k in range(3))
                fh.write(f"sweep,max_displacement,{cols},tx,ty,tz\n")
                for i, upd in enumerate(self.update_history):
                    vals = ",".join(f"{v:.17g}" for v in self.pose_history[i])
                    fh.write(f"{i},{upd:.17g},{vals}\n")
            else:
                fh.write("sweep,max_displacement\n")
                for i, upd in enumerate(self.update_history):
                    fh.write(f"{i},{upd:.17g}\n")


def _collinear_contacts(mids: np.ndarray) -> bool:
    if mids.shape[0] < 3:
        return False
    sv = np.linalg.svd(mids - mids.mean(axis=0), compute_uv=False)
    return sv[0] > 1e-12 and sv[1] <= 1e-6 * sv[0]


def _check_frame_spread(points: np.ndarray, frame: int) -> None:
    sv = np.linalg.svd(points - points.mean(axis=0), compute_uv=False)
    if sv[1] <= 1e-9 * max(sv[0], 1e-12):
        raise DegenerateGeometryError(
            f"frame-{frame} endpoints are collinear; rigidity fit is ill-posed"
        )


def solve_ap(pair_set: SegmentPairSet, cfg: ApConfig | None = None) -> ApResult:
    """Run alternating projection until the per-sweep endpoint update falls
    below cfg.epsilon or cfg.max_iters sweeps elapse.

    Raises UnderconstrainedError for fewer than 6 pairs and
    DegenerateGeometryError for collinear endpoint configurations. A result
    with a pose that leaves more than half the pairs apart, or whose contact
    points all sit on one line (the non-unique pencil family), comes back with
    converged=False and the diagnostic in `degeneracy`.
    """
    cfg = cfg or ApConfig()
    n = len(pair_set)
    if n < 6:
        raise UnderconstrainedError(f"need at least 6 segment pairs, got {n}")
    _check_frame_spread(pair_set.original_endpoints(1), 1)
    _check_frame_spread(pair_set.original_endpoints(2), 2)

    upd_hist = np.zeros(cfg.max_iters)
    if cfg.record_pose_trace:
        pose_hist = np.zeros((cfg.max_iters, 12))
    else:
        pose_hist = np.zeros((1, 12))
    r1, t1, r2, t2, sweeps, last_update, hit_eps = _kernels.ap_run(
        pair_set.a1,
        pair_set.b1,
        pair_set.a2,
        pair_set.b2,
        cfg.epsilon,
        cfg.max_iters,
        cfg.relaxation,
        upd_hist,
        pose_hist,
        cfg.record_pose_trace,
    )
    fit1 = RigidTransform(r1, t1)
    fit2 = RigidTransform(r2, t2)
    pair_set.wa1 = pair_set.a1 @ r1.T + t1
    pair_set.wb1 = pair_set.b1 @ r1.T + t1
    pair_set.wa2 = pair_set.a2 @ r2.T + t2
    pair_set.wb2 = pair_set.b2 @ r2.T + t2

    p1, p2, dist = closest_points_batch(
        pair_set.wa1, pair_set.wb1, pair_set.wa2, pair_set.wb2
    )
    satisfied_tol = max(10.0 * cfg.epsilon, 1e-7)
    satisfied = dist <= satisfied_tol
    unsatisfied = int(np.sum(~satisfied))

    degeneracy = None
    if unsatisfied > -(-n // 2):
        degeneracy = "unsatisfied-majority"
    elif _collinear_contacts(0.5 * (p1 + p2)[satisfied]):
        degeneracy = "collinear-contacts"

    return ApResult(
        transform=fit2.inverse().compose(fit1),
        converged=bool(hit_eps) and degeneracy is None,
        iterations=int(sweeps),
        final_update=float(last_update),
        unsatisfied_pairs=unsatisfied,
        degeneracy=degeneracy,
        frame1_fit=fit1,
        frame2_fit=fit2,
        update_history=upd_hist[:sweeps].copy(),
        pose_history=pose_hist[:sweeps].copy() if cfg.record_pose_trace else None,
    )
