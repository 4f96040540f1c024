"""Organized point clouds and file I/O.

Clouds are stored as (rows, cols, 3) float64 grids with NaN rows marking
absent cells; rows index elevation (LiDAR rings) or image rows, columns index
azimuth or image columns. Loaders cover KITTI-style .bin files and 16-bit
depth images; writers cover ASCII PLY and TUM/KITTI trajectory formats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import RigidTransform, quaternion_from_rotation, rotation_from_quaternion


@dataclass
class OrganizedCloud:
    """Grid of optional 3D points; absent cells are NaN, never zero-filled."""

    points: np.ndarray
    frame_id: str = ""

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 3 or pts.shape[2] != 3:
            raise ValueError("points must be a (rows, cols, 3) array")
        self.points = pts

    @property
    def rows(self) -> int:
        return self.points.shape[0]

    @property
    def cols(self) -> int:
        return self.points.shape[1]

    @property
    def valid_mask(self) -> np.ndarray:
        return ~np.isnan(self.points[:, :, 0])

    @property
    def n_valid(self) -> int:
        return int(self.valid_mask.sum())

    def valid_points(self) -> np.ndarray:
        return self.points[self.valid_mask]

    @staticmethod
    def empty(rows: int, cols: int, frame_id: str = "") -> "OrganizedCloud":
        return OrganizedCloud(np.full((rows, cols, 3), np.nan), frame_id)


@dataclass(slots=True)
class GridConfig:
    """Spherical binning of raw LiDAR points by azimuth (columns) and
    elevation (rows); row 0 holds the highest elevation."""

    azimuth_bins: int
    elevation_bins: int
    azimuth_range: float
    elevation_range: float
    azimuth_start: float = -math.pi
    elevation_start: float = 0.0

    def __post_init__(self):
        if self.azimuth_bins < 2 or self.elevation_bins < 2:
            raise ValueError("bin counts must be at least 2")
        if self.azimuth_range <= 0 or self.elevation_range <= 0:
            raise ValueError("angular ranges must be positive")

    @staticmethod
    def kitti_default() -> "GridConfig":
        # HDL-64E style: 64 rings over roughly [-24.8, +2] degrees, full circle
        return GridConfig(
            azimuth_bins=2000,
            elevation_bins=64,
            azimuth_range=2 * math.pi,
            elevation_range=math.radians(26.8),
            azimuth_start=-math.pi,
            elevation_start=math.radians(-24.8),
        )

    def cell_directions(self) -> np.ndarray:
        """(rows, cols, 3) unit ray directions through all bin centers."""
        elev_hi = self.elevation_start + self.elevation_range
        elev = elev_hi - (np.arange(self.elevation_bins) + 0.5) * (
            self.elevation_range / self.elevation_bins
        )
        azim = self.azimuth_start + (np.arange(self.azimuth_bins) + 0.5) * (
            self.azimuth_range / self.azimuth_bins
        )
        ce = np.cos(elev)[:, None]
        se = np.sin(elev)[:, None]
        out = np.empty((self.elevation_bins, self.azimuth_bins, 3))
        out[:, :, 0] = ce * np.cos(azim)[None, :]
        out[:, :, 1] = ce * np.sin(azim)[None, :]
        out[:, :, 2] = np.broadcast_to(se, (self.elevation_bins, self.azimuth_bins))
        return out


@dataclass(slots=True)
class DepthIntrinsics:
    """Pinhole intrinsics for raw 16-bit depth images (depth_scale raw units
    per meter; 5000 is the TUM convention)."""

    fx: float
    fy: float
    cx: float
    cy: float
    depth_scale: float = 5000.0

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        if self.depth_scale <= 0:
            raise ValueError("depth_scale must be positive")


def organize_lidar(raw_points, cfg: GridConfig, frame_id: str = "") -> OrganizedCloud:
    """Bin raw points into the spherical grid; on collisions the nearest-range
    point wins and empty bins stay absent."""
    pts = np.asarray(raw_points, dtype=float).reshape(-1, 3)
    if pts.shape[0] == 0:
        raise ValueError("cannot organize an empty point set")
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    rng = np.linalg.norm(pts, axis=1)
    ok = rng > 1e-9
    azim = np.arctan2(y, x)
    elev = np.arctan2(z, np.hypot(x, y))
    rel_az = np.mod(azim - cfg.azimuth_start, 2 * math.pi)
    ok &= rel_az < cfg.azimuth_range
    elev_hi = cfg.elevation_start + cfg.elevation_range
    ok &= (elev >= cfg.elevation_start) & (elev <= elev_hi)
    col = np.clip(
        (rel_az / cfg.azimuth_range * cfg.azimuth_bins).astype(int),
        0,
        cfg.azimuth_bins - 1,
    )
    row = np.clip(
        ((elev_hi - elev) / cfg.elevation_range * cfg.elevation_bins).astype(int),
        0,
        cfg.elevation_bins - 1,
    )
    grid = np.full((cfg.elevation_bins, cfg.azimuth_bins, 3), np.nan)
    idx = np.nonzero(ok)[0]
    # write farthest first so the nearest point in each bin lands last
    order = idx[np.argsort(-rng[idx], kind="stable")]
    grid[row[order], col[order]] = pts[order]
    return OrganizedCloud(grid, frame_id)


def depth_to_cloud(depth_image, k: DepthIntrinsics, frame_id: str = "") -> OrganizedCloud:
    """Back-project a raw depth image; zero depth marks absent pixels."""
    depth = np.asarray(depth_image, dtype=float)
    if depth.ndim != 2:
        raise ValueError("depth image must be 2D")
    h, w = depth.shape
    z = depth / k.depth_scale
    u = np.arange(w)[None, :]
    v = np.arange(h)[:, None]
    grid = np.empty((h, w, 3))
    grid[:, :, 0] = (u - k.cx) * z / k.fx
    grid[:, :, 1] = (v - k.cy) * z / k.fy
    grid[:, :, 2] = z
    grid[depth <= 0] = np.nan
    return OrganizedCloud(grid, frame_id)


def downsample(cloud: OrganizedCloud, row_step: int, col_step: int) -> OrganizedCloud:
    """Keep cells at indices divisible by the steps; dims become ceil(dim/step)."""
    if row_step < 1 or col_step < 1:
        raise ValueError("steps must be at least 1")
    return OrganizedCloud(
        cloud.points[::row_step, ::col_step].copy(), cloud.frame_id
    )


def load_kitti_bin(path) -> np.ndarray:
    """(N, 3) points from a KITTI .bin file of float32 (x, y, z, intensity)."""
    raw = np.fromfile(path, dtype=np.float32)
    if raw.size % 4 != 0:
        raise ValueError(f"{path}: size is not a multiple of 4 floats")
    return raw.reshape(-1, 4)[:, :3].astype(float)


def load_depth_image(path) -> np.ndarray:
    """16-bit single-channel depth image (PNG or PGM) as a uint16 array."""
    from PIL import Image

    with Image.open(path) as img:
        arr = np.asarray(img)
    if arr.ndim != 2:
        raise ValueError(f"{path}: expected a single-channel depth image")
    return arr.astype(np.uint16)


def load_config_file(path) -> dict[str, str]:
    """Key-value text config: one `key = value` (or `key value`) per line,
    '#' comments allowed."""
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" in line:
                key, _, val = line.partition("=")
            else:
                parts = line.split(None, 1)
                if len(parts) != 2:
                    raise ValueError(f"{path}:{lineno}: expected 'key value'")
                key, val = parts
            out[key.strip()] = val.strip()
    return out


def save_ply_points(path, points, comments=()) -> None:
    """ASCII PLY of bare vertices."""
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("ply\nformat ascii 1.0\n")
        for c in comments:
            fh.write(f"comment {c}\n")
        fh.write(f"element vertex {len(pts)}\n")
        fh.write("property float x\nproperty float y\nproperty float z\n")
        fh.write("end_header\n")
        for p in pts:
            fh.write(f"{p[0]:.6f} {p[1]:.6f} {p[2]:.6f}\n")


def save_ply_labeled(path, points, labels, edges=(), edge_labels=(), comments=()) -> None:
    """ASCII PLY with an integer label per vertex and optional labeled edges
    (used for fitted-feature debug dumps)."""
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    labels = np.asarray(labels, dtype=int).reshape(-1)
    if len(labels) != len(pts):
        raise ValueError("one label per vertex required")
    edges = list(edges)
    edge_labels = list(edge_labels) if edge_labels else [0] * len(edges)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("ply\nformat ascii 1.0\n")
        for c in comments:
            fh.write(f"comment {c}\n")
        fh.write(f"element vertex {len(pts)}\n")
        fh.write("property float x\nproperty float y\nproperty float z\n")
        fh.write("property int label\n")
        fh.write(f"element edge {len(edges)}\n")
        fh.write("property int vertex1\nproperty int vertex2\nproperty int label\n")
        fh.write("end_header\n")
        for p, lab in zip(pts, labels):
            fh.write(f"{p[0]:.6f} {p[1]:.6f} {p[2]:.6f} {lab}\n")
        for (i, j), lab in zip(edges, edge_labels):
            fh.write(f"{i} {j} {lab}\n")


def save_trajectory_tum(path, trajectory, comments=()) -> None:
    """One `timestamp tx ty tz qx qy qz qw` line per pose."""
    with open(path, "w", encoding="utf-8") as fh:
        for c in comments:
            fh.write(f"# {c}\n")
        for ts, pose in trajectory:
            q = quaternion_from_rotation(pose.rotation)
            t = pose.translation
            fh.write(
                f"{ts:.6f} {t[0]:.9f} {t[1]:.9f} {t[2]:.9f} "
                f"{q[0]:.9f} {q[1]:.9f} {q[2]:.9f} {q[3]:.9f}\n"
            )


def save_trajectory_kitti(path, trajectory, comments=()) -> None:
    """One line of 12 floats per pose: row-major 3x4 [R | t]."""
    with open(path, "w", encoding="utf-8") as fh:
        for c in comments:
            fh.write(f"# {c}\n")
        for _, pose in trajectory:
            m = np.hstack((pose.rotation, pose.translation[:, None]))
            fh.write(" ".join(f"{v:.9e}" for v in m.reshape(-1)) + "\n")


def load_trajectory(path) -> list[tuple[float, RigidTransform]]:
    """Read a trajectory in TUM (8 columns) or KITTI (12 columns) format;
    '#' comment lines are skipped. Errors report the offending line number."""
    out: list[tuple[float, RigidTransform]] = []
    kitti_index = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split()
            try:
                vals = [float(p) for p in parts]
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: non-numeric field") from exc
            if len(vals) == 8:
                ts = vals[0]
                t = np.array(vals[1:4])
                rot = rotation_from_quaternion(vals[4:8])
                out.append((ts, RigidTransform(rot, t)))
            elif len(vals) == 12:
                m = np.array(vals).reshape(3, 4)
                out.append((float(kitti_index), RigidTransform(m[:, :3].copy(), m[:, 3].copy())))
                kitti_index += 1
            else:
                raise ValueError(
                    f"{path}: line {lineno}: expected 8 (TUM) or 12 (KITTI) fields, "
                    f"got {len(vals)}"
                )
    return out


def save_organized_npy(path, cloud: OrganizedCloud) -> None:
    """Byte-stable container for organized clouds (NaN marks absent cells)."""
    np.save(path, cloud.points)


def load_organized_npy(path, frame_id: str = "") -> OrganizedCloud:
    return OrganizedCloud(np.load(path), frame_id)
