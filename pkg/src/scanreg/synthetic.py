"""Synthetic raycast scenes: the ground-truth oracle for end-to-end tests.

Scenes are collections of finite rectangular patches. A posed spherical or
pinhole sensor casts one ray per grid cell; the nearest patch hit becomes the
cell's point (in sensor coordinates) with optional Gaussian range noise, and
the patch id is kept so tests can check visibility and plane membership.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Plane, RigidTransform, cross, normalize
from .scan_io import DepthIntrinsics, GridConfig, OrganizedCloud


@dataclass(slots=True)
class RectPatch:
    """Finite rectangle: center, two orthogonal unit in-plane axes, half sizes."""

    center: np.ndarray
    u: np.ndarray
    v: np.ndarray
    half_u: float
    half_v: float

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        self.u = normalize(np.asarray(self.u, dtype=float))
        self.v = normalize(np.asarray(self.v, dtype=float))
        if abs(float(self.u @ self.v)) > 1e-9:
            raise ValueError("patch axes must be orthogonal")
        if self.half_u <= 0 or self.half_v <= 0:
            raise ValueError("patch extents must be positive")

    @property
    def normal(self) -> np.ndarray:
        return cross(self.u, self.v)

    def plane(self) -> Plane:
        n = self.normal
        return Plane(n, -float(n @ self.center))

    def contains(self, points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        rel = np.atleast_2d(points) - self.center
        return (np.abs(rel @ self.u) <= self.half_u + tol) & (
            np.abs(rel @ self.v) <= self.half_v + tol
        )


@dataclass(slots=True)
class PinholeSensor:
    intrinsics: DepthIntrinsics
    rows: int
    cols: int

    def cell_directions(self) -> np.ndarray:
        k = self.intrinsics
        u = np.arange(self.cols)[None, :]
        v = np.arange(self.rows)[:, None]
        d = np.empty((self.rows, self.cols, 3))
        d[:, :, 0] = (u - k.cx) / k.fx
        d[:, :, 1] = (v - k.cy) / k.fy
        d[:, :, 2] = 1.0
        return d / np.linalg.norm(d, axis=2, keepdims=True)


@dataclass(slots=True)
class SyntheticScene:
    patches: list[RectPatch]
    sensor: GridConfig | PinholeSensor
    noise_sigma: float = 0.0
    seed: int = 0


def raycast_scene(
    scene: SyntheticScene,
    pose: RigidTransform,
    rng: np.random.Generator | None = None,
    frame_id: str = "",
) -> tuple[OrganizedCloud, np.ndarray]:
    """Cast one ray per grid cell from the posed sensor (pose = world-from-
    sensor). Returns the organized cloud in sensor coordinates and the per-cell
    hit patch id (-1 for misses)."""
    rng = rng or np.random.default_rng(scene.seed)
    dirs_sensor = scene.sensor.cell_directions()
    rows, cols, _ = dirs_sensor.shape
    flat_dirs = dirs_sensor.reshape(-1, 3)
    dirs_world = flat_dirs @ pose.rotation.T
    origin = pose.translation

    best_t = np.full(len(flat_dirs), np.inf)
    best_id = np.full(len(flat_dirs), -1, dtype=int)
    for pid, patch in enumerate(scene.patches):
        n = patch.normal
        denom = dirs_world @ n
        offset = float(n @ (patch.center - origin))
        with np.errstate(divide="ignore", invalid="ignore"):
            t = offset / denom
        valid = (np.abs(denom) > 1e-12) & (t > 1e-9)
        if not valid.any():
            continue
        hit = origin + t[:, None] * dirs_world
        rel = hit - patch.center
        valid &= np.abs(rel @ patch.u) <= patch.half_u
        valid &= np.abs(rel @ patch.v) <= patch.half_v
        closer = valid & (t < best_t)
        best_t[closer] = t[closer]
        best_id[closer] = pid

    hits = best_id >= 0
    ranges = best_t.copy()
    if scene.noise_sigma > 0:
        noise = rng.normal(0.0, scene.noise_sigma, size=len(flat_dirs))
        ranges = np.where(hits, best_t + noise, best_t)
    pts = np.full((len(flat_dirs), 3), np.nan)
    pts[hits] = ranges[hits, None] * flat_dirs[hits]
    return (
        OrganizedCloud(pts.reshape(rows, cols, 3), frame_id),
        best_id.reshape(rows, cols),
    )


def make_scan_pair(
    scene: SyntheticScene,
    pose_a: RigidTransform,
    pose_b: RigidTransform,
    rng: np.random.Generator | None = None,
) -> tuple[OrganizedCloud, OrganizedCloud, RigidTransform]:
    """Two raycasts plus the exact relative pose mapping frame-A coordinates
    into frame B (the same convention register_pair outputs)."""
    rng = rng or np.random.default_rng(scene.seed)
    cloud_a, _ = raycast_scene(scene, pose_a, rng, frame_id="A")
    cloud_b, _ = raycast_scene(scene, pose_b, rng, frame_id="B")
    gt_relative = pose_b.inverse().compose(pose_a)
    return cloud_a, cloud_b, gt_relative


def _axis_patch(center, u, v, half_u, half_v) -> RectPatch:
    return RectPatch(np.array(center, float), np.array(u, float), np.array(v, float), half_u, half_v)


def _default_sensor() -> GridConfig:
    return GridConfig(
        azimuth_bins=400,
        elevation_bins=48,
        azimuth_range=2 * math.pi,
        elevation_range=math.radians(55.0),
        azimuth_start=-math.pi,
        elevation_start=math.radians(-40.0),
    )


def make_scene(name: str, noise_sigma: float = 0.0, seed: int = 0,
               sensor: GridConfig | PinholeSensor | None = None) -> SyntheticScene:
    """Named scene library: `corridor` (2 walls + floor), `box_room`
    (floor + 4 walls), `street` (ground + facades)."""
    sensor = sensor or _default_sensor()
    if name == "corridor":
        patches = [
            _axis_patch((0, 0, 0), (1, 0, 0), (0, 1, 0), 8.0, 1.5),
            _axis_patch((0, -1.5, 1.5), (1, 0, 0), (0, 0, 1), 8.0, 1.5),
            _axis_patch((0, 1.5, 1.5), (1, 0, 0), (0, 0, 1), 8.0, 1.5),
        ]
    elif name == "box_room":
        patches = [
            _axis_patch((0, 0, 0), (1, 0, 0), (0, 1, 0), 3.0, 3.0),
            _axis_patch((-3, 0, 1.5), (0, 1, 0), (0, 0, 1), 3.0, 1.5),
            _axis_patch((3, 0, 1.5), (0, 1, 0), (0, 0, 1), 3.0, 1.5),
            _axis_patch((0, -3, 1.5), (1, 0, 0), (0, 0, 1), 3.0, 1.5),
            _axis_patch((0, 3, 1.5), (1, 0, 0), (0, 0, 1), 3.0, 1.5),
        ]
    elif name == "street":
        patches = [
            _axis_patch((0, 0, 0), (1, 0, 0), (0, 1, 0), 20.0, 6.0),
            _axis_patch((0, -6, 3), (1, 0, 0), (0, 0, 1), 20.0, 3.0),
            _axis_patch((0, 6, 3), (1, 0, 0), (0, 0, 1), 20.0, 3.0),
            _axis_patch((20, 0, 3), (0, 1, 0), (0, 0, 1), 6.0, 3.0),
        ]
    else:
        raise ValueError(
            f"unknown scene {name!r}; available: corridor, box_room, street"
        )
    return SyntheticScene(patches=patches, sensor=sensor, noise_sigma=noise_sigma, seed=seed)


SCENE_NAMES = ("corridor", "box_room", "street")
