"""Trajectory error metrics: per-step relative pose error and KITTI-style
per-length segment errors."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import RigidTransform, rotation_angle

KITTI_SEGMENT_LENGTHS = (100.0, 200.0, 300.0, 400.0, 500.0, 600.0, 700.0, 800.0)


@dataclass(slots=True)
class PoseError:
    translation_err: float
    rotation_err: float  # degrees

    def __post_init__(self):
        if self.translation_err < 0 or not 0 <= self.rotation_err <= 180.0001:
            raise ValueError("pose errors out of range")


@dataclass(slots=True)
class RpeReport:
    per_step: list[PoseError]
    mean_translation: float
    mean_rotation: float
    max_translation: float
    max_rotation: float


@dataclass(slots=True)
class SegmentErrorReport:
    translation_percent: float
    rotation_deg_per_m: float
    n_segments: int
    lengths: tuple[float, ...]


def _poses(trajectory) -> list[RigidTransform]:
    out = []
    for entry in trajectory:
        pose = entry[1] if isinstance(entry, (tuple, list)) else entry
        out.append(pose)
    return out


def _pose_error(delta: RigidTransform) -> PoseError:
    return PoseError(
        translation_err=float(np.linalg.norm(delta.translation)),
        rotation_err=math.degrees(rotation_angle(delta.rotation)),
    )


def relative_pose_error(trajectory, ground_truth) -> RpeReport:
    """Error of each frame-to-frame step of `trajectory` against the matching
    step of `ground_truth` (same length, associated by index)."""
    est = _poses(trajectory)
    gt = _poses(ground_truth)
    if len(est) != len(gt):
        raise ValueError(f"trajectory lengths differ: {len(est)} vs {len(gt)}")
    if len(est) < 2:
        raise ValueError("need at least two poses")
    steps = []
    for k in range(1, len(est)):
        est_rel = est[k - 1].inverse().compose(est[k])
        gt_rel = gt[k - 1].inverse().compose(gt[k])
        steps.append(_pose_error(gt_rel.inverse().compose(est_rel)))
    tra = np.array([s.translation_err for s in steps])
    rot = np.array([s.rotation_err for s in steps])
    return RpeReport(
        per_step=steps,
        mean_translation=float(tra.mean()),
        mean_rotation=float(rot.mean()),
        max_translation=float(tra.max()),
        max_rotation=float(rot.max()),
    )


def kitti_segment_errors(
    trajectory,
    ground_truth,
    lengths=KITTI_SEGMENT_LENGTHS,
    start_step: int = 1,
) -> SegmentErrorReport | None:
    """Average end-pose error over all sub-trajectories of the given arc
    lengths (measured along the ground truth), expressed per unit length:
    translation as a percentage, rotation in degrees per meter.

    Returns None when the trajectory is shorter than the smallest length.
    """
    est = _poses(trajectory)
    gt = _poses(ground_truth)
    if len(est) != len(gt):
        raise ValueError(f"trajectory lengths differ: {len(est)} vs {len(gt)}")
    dist = [0.0]
    for k in range(1, len(gt)):
        step = gt[k].translation - gt[k - 1].translation
        dist.append(dist[-1] + float(np.linalg.norm(step)))
    t_errs = []
    r_errs = []
    for first in range(0, len(gt), start_step):
        for length in lengths:
            last = _frame_at_length(dist, first, length)
            if last < 0:
                continue
            gt_delta = gt[first].inverse().compose(gt[last])
            est_delta = est[first].inverse().compose(est[last])
            err = est_delta.inverse().compose(gt_delta)
            t_errs.append(float(np.linalg.norm(err.translation)) / length)
            r_errs.append(math.degrees(rotation_angle(err.rotation)) / length)
    if not t_errs:
        return None
    return SegmentErrorReport(
        translation_percent=float(np.mean(t_errs)) * 100.0,
        rotation_deg_per_m=float(np.mean(r_errs)),
        n_segments=len(t_errs),
        lengths=tuple(lengths),
    )


def _frame_at_length(dist: list[float], first: int, length: float) -> int:
    target = dist[first] + length
    for i in range(first, len(dist)):
        if dist[i] > target:
            return i
    return -1


def format_metric_table(rows: list[tuple[str, RpeReport | SegmentErrorReport | None]]) -> str:
    """Human-readable summary table for metric reports."""
    lines = []
    for name, rep in rows:
        if rep is None:
            lines.append(f"{name:<24} (no segments long enough)")
        elif isinstance(rep, RpeReport):
            lines.append(
                f"{name:<24} mean tra {rep.mean_translation:.6f} m  "
                f"mean rot {rep.mean_rotation:.6f} deg  "
                f"max tra {rep.max_translation:.6f} m  "
                f"max rot {rep.max_rotation:.6f} deg"
            )
        else:
            lines.append(
                f"{name:<24} tra {rep.translation_percent:.4f} %  "
                f"rot {rep.rotation_deg_per_m:.6f} deg/m  "
                f"segments {rep.n_segments}"
            )
    return "\n".join(lines)


def write_rpe_csv(path, report: RpeReport) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("step,translation_err_m,rotation_err_deg\n")
        for i, s in enumerate(report.per_step):
            fh.write(f"{i},{s.translation_err:.12g},{s.rotation_err:.12g}\n")
