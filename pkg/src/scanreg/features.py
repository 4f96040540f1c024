"""Piecewise-linear scan-line segments, plane fits, and per-line normals.

Every row (horizontal scan-line) and column (vertical scan-line) of an
organized cloud is modeled as piecewise-linear by sequential RANSAC; H-lines
and V-lines are named after the scan-line they come from, not their 3D
orientation. Crossing H/V pairs within one frame yield per-line normals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .geometry import LineSegment3D, PluckerLine, Plane, plucker_from_segment
from .scan_io import OrganizedCloud, save_ply_labeled

HORIZONTAL = "horizontal"
VERTICAL = "vertical"


@dataclass(slots=True)
class ScanLine:
    """Present points of one grid row or column, ordered by grid position."""

    orientation: str
    index: int
    positions: np.ndarray
    points: np.ndarray

    def __len__(self) -> int:
        return len(self.positions)


@dataclass(slots=True)
class FittedLine:
    """A line segment fitted to part of one scan-line."""

    segment: LineSegment3D
    plucker: PluckerLine
    orientation: str  # "H" or "V"
    inlier_count: int
    source_scanline: tuple[str, int]
    inlier_positions: np.ndarray = field(repr=False, default=None)
    normal: np.ndarray | None = None


@dataclass(slots=True)
class FittedPlane:
    plane: Plane
    centroid: np.ndarray
    inlier_count: int


@dataclass(slots=True)
class FitParams:
    """Thresholds for segment/plane extraction. The paper-silent defaults are
    the depth-camera scale; use `lidar()` for outdoor scans."""

    inlier_dist: float = 0.01
    min_inliers: int = 5
    min_plane_inliers: int = 200
    max_planes: int = 10
    normal_pair_dist: float | None = None
    gap_cells: int = 2
    confidence: float = 0.99
    max_ransac_iters: int = 100
    min_parallel_angle_deg: float = 10.0

    def __post_init__(self):
        if self.normal_pair_dist is None:
            self.normal_pair_dist = 2.0 * self.inlier_dist

    @staticmethod
    def lidar() -> "FitParams":
        return FitParams(inlier_dist=0.05)

    @staticmethod
    def depth_camera() -> "FitParams":
        return FitParams(inlier_dist=0.01)


def scanlines_from_cloud(cloud: OrganizedCloud) -> list[ScanLine]:
    """All nonempty rows (horizontal) then columns (vertical)."""
    out: list[ScanLine] = []
    mask = cloud.valid_mask
    for r in range(cloud.rows):
        cols = np.nonzero(mask[r])[0]
        if len(cols):
            out.append(ScanLine(HORIZONTAL, r, cols, cloud.points[r, cols]))
    for c in range(cloud.cols):
        rows = np.nonzero(mask[:, c])[0]
        if len(rows):
            out.append(ScanLine(VERTICAL, c, rows, cloud.points[rows, c]))
    return out


def _line_distances(points: np.ndarray, origin: np.ndarray, direction: np.ndarray) -> np.ndarray:
    rel = points - origin
    along = rel @ direction
    return np.linalg.norm(rel - along[:, None] * direction[None, :], axis=1)


def _tls_line(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthogonal-distance least-squares line: (centroid, unit direction)."""
    centroid = points.mean(axis=0)
    _, _, vt = np.linalg.svd(points - centroid, full_matrices=False)
    return centroid, vt[0]


def _contiguous_runs(flags: np.ndarray) -> list[tuple[int, int]]:
    """Half-open index ranges of consecutive True entries."""
    runs = []
    start = None
    for i, f in enumerate(flags):
        if f and start is None:
            start = i
        elif not f and start is not None:
            runs.append((start, i))
            start = None
    if start is not None:
        runs.append((start, len(flags)))
    return runs


def _adaptive_iters(inlier_ratio: float, sample_size: int, confidence: float) -> int:
    w = min(max(inlier_ratio, 1e-3), 1.0 - 1e-12)
    denom = math.log(max(1.0 - w**sample_size, 1e-12))
    return int(math.ceil(math.log(1.0 - confidence) / denom))


def fit_scanline_segments(
    line: ScanLine, params: FitParams, rng: np.random.Generator | None = None
) -> list[FittedLine]:
    """Sequential RANSAC over one scan-line.

    Runs of more than `gap_cells` absent cells split the line into chunks that
    segments cannot bridge. Within a chunk: hypothesize 2-point lines, claim
    points within inlier_dist, keep the largest contiguous run of the best
    claim (it must hold at least min_inliers points and the majority of the
    claim), refine by orthogonal least squares, and repeat on the leftovers.
    """
    rng = rng or np.random.default_rng(0)
    orientation = "H" if line.orientation == HORIZONTAL else "V"
    fitted: list[FittedLine] = []
    if len(line) < max(2, params.min_inliers):
        return fitted

    gaps = np.diff(line.positions) - 1
    breaks = np.nonzero(gaps > params.gap_cells)[0]
    chunk_bounds = np.concatenate(([0], breaks + 1, [len(line)]))
    for ci in range(len(chunk_bounds) - 1):
        lo, hi = chunk_bounds[ci], chunk_bounds[ci + 1]
        idx = np.arange(lo, hi)
        while len(idx) >= max(2, params.min_inliers):
            pts = line.points[idx]
            n = len(idx)
            best_mask = None
            best_count = 0
            iters = params.max_ransac_iters
            it = 0
            while it < iters:
                i, j = rng.integers(0, n, 2)
                if i == j:
                    it += 1
                    continue
                d = pts[j] - pts[i]
                norm = np.linalg.norm(d)
                if norm < 1e-12:
                    it += 1
                    continue
                mask = _line_distances(pts, pts[i], d / norm) <= params.inlier_dist
                count = int(mask.sum())
                if count > best_count:
                    best_count = count
                    best_mask = mask
                    iters = min(iters, _adaptive_iters(count / n, 2, params.confidence))
                it += 1
            if best_mask is None or best_count < params.min_inliers:
                break
            runs = _contiguous_runs(best_mask)
            start, stop = max(runs, key=lambda r: r[1] - r[0])
            run_len = stop - start
            if run_len < params.min_inliers or 2 * run_len < best_count:
                break
            support = idx[start:stop]
            centroid, direction = _tls_line(line.points[support])
            keep = (
                _line_distances(line.points[support], centroid, direction)
                <= params.inlier_dist
            )
            support = support[keep]
            if len(support) < params.min_inliers:
                idx = np.concatenate((idx[:start], idx[stop:]))
                continue
            centroid, direction = _tls_line(line.points[support])
            along = (line.points[support] - centroid) @ direction
            seg = LineSegment3D(
                centroid + along.min() * direction,
                centroid + along.max() * direction,
            )
            fitted.append(
                FittedLine(
                    segment=seg,
                    plucker=plucker_from_segment(seg),
                    orientation=orientation,
                    inlier_count=len(support),
                    source_scanline=(line.orientation, line.index),
                    inlier_positions=line.positions[support].copy(),
                )
            )
            idx = np.setdiff1d(idx, support, assume_unique=True)
    return fitted


def fit_cloud_lines(
    cloud: OrganizedCloud, params: FitParams, seed: int = 0
) -> tuple[list[FittedLine], list[FittedLine]]:
    """Fit all H-lines and V-lines of a cloud; each scan-line gets its own
    seed derived from `seed` so results do not depend on processing order."""
    h_lines: list[FittedLine] = []
    v_lines: list[FittedLine] = []
    for line in scanlines_from_cloud(cloud):
        code = 0 if line.orientation == HORIZONTAL else 1
        rng = np.random.default_rng(np.random.SeedSequence([seed, code, line.index]))
        out = fit_scanline_segments(line, params, rng)
        if code == 0:
            h_lines.extend(out)
        else:
            v_lines.extend(out)
    return h_lines, v_lines


def _orient_toward_sensor(normal: np.ndarray, offset: float) -> tuple[np.ndarray, float]:
    # the sensor sits at the frame origin; plane value at the origin is the offset
    if offset < 0 or (offset == 0 and _first_nonzero_sign(normal) < 0):
        return -normal, -offset
    return normal, offset


def _first_nonzero_sign(v: np.ndarray) -> float:
    for x in v:
        if abs(x) > 1e-12:
            return math.copysign(1.0, x)
    return 1.0


def fit_planes(
    cloud: OrganizedCloud, params: FitParams, rng: np.random.Generator | None = None
) -> list[FittedPlane]:
    """Sequential RANSAC plane extraction over all present points, nearest
    planes refined by least squares, normals oriented toward the sensor."""
    rng = rng or np.random.default_rng(0)
    pts = cloud.valid_points()
    out: list[FittedPlane] = []
    if len(pts) < 3:
        return out
    active = np.arange(len(pts))
    for _ in range(params.max_planes):
        if len(active) < max(3, params.min_plane_inliers):
            break
        sub = pts[active]
        n = len(active)
        best_mask = None
        best_count = 0
        iters = params.max_ransac_iters
        it = 0
        while it < iters:
            i, j, k = rng.integers(0, n, 3)
            if i == j or j == k or i == k:
                it += 1
                continue
            nrm = np.cross(sub[j] - sub[i], sub[k] - sub[i])
            norm = np.linalg.norm(nrm)
            if norm < 1e-12:
                it += 1
                continue
            nrm = nrm / norm
            mask = np.abs((sub - sub[i]) @ nrm) <= params.inlier_dist
            count = int(mask.sum())
            if count > best_count:
                best_count = count
                best_mask = mask
                iters = min(iters, _adaptive_iters(count / n, 3, params.confidence))
            it += 1
        if best_mask is None or best_count < params.min_plane_inliers:
            break
        inl = sub[best_mask]
        centroid = inl.mean(axis=0)
        _, _, vt = np.linalg.svd(inl - centroid, full_matrices=False)
        normal = vt[2]
        offset = -float(normal @ centroid)
        mask = np.abs(sub @ normal + offset) <= params.inlier_dist
        if int(mask.sum()) < params.min_plane_inliers:
            break
        inl = sub[mask]
        centroid = inl.mean(axis=0)
        normal, offset = _orient_toward_sensor(normal, -float(normal @ centroid))
        out.append(
            FittedPlane(
                plane=Plane(normal, offset),
                centroid=centroid,
                inlier_count=int(mask.sum()),
            )
        )
        active = active[~mask]
    return out


def hemisphere_normal(n: np.ndarray) -> np.ndarray:
    """Canonical sign: positive z-component, ties resolved through x then y."""
    for axis in (2, 0, 1):
        if n[axis] > 1e-12:
            return n
        if n[axis] < -1e-12:
            return -n
    return n


def estimate_line_normals(
    h_lines: list[FittedLine],
    v_lines: list[FittedLine],
    params: FitParams,
) -> tuple[list[FittedLine], list[FittedLine]]:
    """Normals from crossing H/V pairs of one frame.

    For each pair whose segments pass within normal_pair_dist, the candidate
    normal is the (hemisphere-canonicalized) cross product of the directions;
    every line takes the candidate from its nearest qualifying partner.
    Near-parallel pairs are skipped: the cross product is unstable there.
    Lines with no partner keep normal = None.
    """
    if not h_lines or not v_lines:
        return list(h_lines), list(v_lines)
    ha = np.array([ln.segment.a for ln in h_lines])
    hb = np.array([ln.segment.b for ln in h_lines])
    va = np.array([ln.segment.a for ln in v_lines])
    vb = np.array([ln.segment.b for ln in v_lines])
    dist = _kernels.cross_distances(ha, hb, va, vb)
    hd = np.array([ln.segment.direction for ln in h_lines])
    vd = np.array([ln.segment.direction for ln in v_lines])
    crossmat = np.cross(hd[:, None, :], vd[None, :, :])
    sin_angle = np.linalg.norm(crossmat, axis=2)
    qualified = (dist <= params.normal_pair_dist) & (
        sin_angle >= math.sin(math.radians(params.min_parallel_angle_deg))
    )
    blocked = np.where(qualified, dist, np.inf)

    new_h = []
    for i, ln in enumerate(h_lines):
        j = int(np.argmin(blocked[i]))
        if np.isfinite(blocked[i, j]):
            n = hemisphere_normal(crossmat[i, j] / sin_angle[i, j])
            new_h.append(replace(ln, normal=n))
        else:
            new_h.append(replace(ln, normal=None))
    new_v = []
    for j, ln in enumerate(v_lines):
        i = int(np.argmin(blocked[:, j]))
        if np.isfinite(blocked[i, j]):
            n = hemisphere_normal(crossmat[i, j] / sin_angle[i, j])
            new_v.append(replace(ln, normal=n))
        else:
            new_v.append(replace(ln, normal=None))
    return new_h, new_v


def dump_features_ply(path, lines: list[FittedLine], planes: list[FittedPlane], comments=()) -> None:
    """Debug dump: segment endpoints as labeled edges plus plane centroids."""
    verts = []
    labels = []
    edges = []
    edge_labels = []
    for ln in lines:
        i = len(verts)
        verts.extend([ln.segment.a, ln.segment.b])
        lab = 0 if ln.orientation == "H" else 1
        labels.extend([lab, lab])
        edges.append((i, i + 1))
        edge_labels.append(lab)
    for k, pl in enumerate(planes):
        verts.append(pl.centroid)
        labels.append(100 + k)
    if not verts:
        verts = np.zeros((0, 3))
    save_ply_labeled(path, np.asarray(verts), labels, edges, edge_labels, comments)
