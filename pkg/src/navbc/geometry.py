"""Planar geometry for differential-drive navigation.

Poses live in SE(2) with headings wrapped to (-pi, pi].  Reference paths are
piecewise-linear polylines with a tangent heading per node; all path queries
(closest point, interpolation, forward segments) work in arc-length space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


def wrap_angle(theta: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    r = theta % TWO_PI  # [0, 2*pi)
    if r > math.pi:
        r -= TWO_PI
    return r


@dataclass(frozen=True)
class Pose2:
    """Planar pose (x, y, theta); theta is wrapped on construction."""

    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta", wrap_angle(self.theta))

    @property
    def xy(self) -> np.ndarray:
        return np.array([self.x, self.y])

    def heading_vector(self) -> np.ndarray:
        return np.array([math.cos(self.theta), math.sin(self.theta)])


@dataclass(frozen=True)
class Action:
    """Unicycle command: linear speed v (m/s) and angular rate w (rad/s)."""

    v: float
    w: float


def to_robot_frame(pose: Pose2, robot: Pose2) -> Pose2:
    """Express `pose` in the frame anchored at `robot`."""
    dx = pose.x - robot.x
    dy = pose.y - robot.y
    c = math.cos(robot.theta)
    s = math.sin(robot.theta)
    return Pose2(c * dx + s * dy, -s * dx + c * dy, pose.theta - robot.theta)


def from_robot_frame(local: Pose2, robot: Pose2) -> Pose2:
    """Inverse of :func:`to_robot_frame`."""
    c = math.cos(robot.theta)
    s = math.sin(robot.theta)
    return Pose2(
        robot.x + c * local.x - s * local.y,
        robot.y + s * local.x + c * local.y,
        local.theta + robot.theta,
    )


def points_to_robot_frame(points: np.ndarray, robot: Pose2) -> np.ndarray:
    """Rotate/translate an (n, 2) array of world points into the robot frame."""
    c = math.cos(robot.theta)
    s = math.sin(robot.theta)
    d = np.asarray(points, dtype=float) - (robot.x, robot.y)
    return d @ np.array([[c, -s], [s, c]])


def unicycle_step(pose: Pose2, action: Action, dt: float) -> Pose2:
    """Integrate the unicycle model exactly along a circular arc.

    For |w| below 1e-9 rad/s the arc degenerates and a straight-line update
    is used instead (the closed form divides by w).
    """
    v, w = action.v, action.w
    if abs(w) < 1e-9:
        return Pose2(
            pose.x + v * dt * math.cos(pose.theta),
            pose.y + v * dt * math.sin(pose.theta),
            pose.theta + w * dt,
        )
    theta1 = pose.theta + w * dt
    r = v / w
    return Pose2(
        pose.x + r * (math.sin(theta1) - math.sin(pose.theta)),
        pose.y + r * (math.cos(pose.theta) - math.cos(theta1)),
        theta1,
    )


class ReferencePath:
    """Piecewise-linear path with per-node tangent headings.

    Nodes are stored as an (n, 3) float array of (x, y, theta) plus the
    cumulative arc length per node.  Closest-point queries break ties toward
    the lowest arc length.
    """

    def __init__(self, nodes: np.ndarray):
        nodes = np.asarray(nodes, dtype=float)
        if nodes.ndim != 2 or nodes.shape[1] != 3 or len(nodes) < 2:
            raise ValueError("path needs an (n>=2, 3) array of (x, y, theta) nodes")
        seg = np.diff(nodes[:, :2], axis=0)
        seg_len = np.hypot(seg[:, 0], seg[:, 1])
        if np.any(seg_len <= 0.0):
            raise ValueError("path nodes must be strictly spaced")
        self.nodes = nodes
        self._seg = seg
        self._seg_len = seg_len
        self.cumulative_arclength = np.concatenate(([0.0], np.cumsum(seg_len)))

    @classmethod
    def from_points(cls, points: np.ndarray) -> "ReferencePath":
        """Build a path from (n, 2) waypoints; headings follow the segments."""
        points = np.asarray(points, dtype=float)
        seg = np.diff(points, axis=0)
        heading = np.arctan2(seg[:, 1], seg[:, 0])
        theta = np.concatenate((heading, heading[-1:]))
        return cls(np.column_stack((points, theta)))

    @property
    def total_length(self) -> float:
        return float(self.cumulative_arclength[-1])

    def closest_point(self, xy) -> tuple[float, float]:
        """Return (arc length, distance) of the path point closest to `xy`."""
        p = np.asarray(xy, dtype=float)
        a = self.nodes[:-1, :2]
        t = np.einsum("ij,ij->i", p - a, self._seg) / (self._seg_len**2)
        t = np.clip(t, 0.0, 1.0)
        proj = a + t[:, None] * self._seg
        d2 = np.sum((proj - p) ** 2, axis=1)
        i = int(np.argmin(d2))  # argmin takes the first minimum: low-s tie-break
        s = self.cumulative_arclength[i] + t[i] * self._seg_len[i]
        return float(s), float(math.sqrt(d2[i]))

    def point_at(self, s: float) -> Pose2:
        """Pose at arc length `s` (clamped to the path extent)."""
        s = min(max(s, 0.0), self.total_length)
        i = int(np.searchsorted(self.cumulative_arclength, s, side="right") - 1)
        i = min(i, len(self._seg_len) - 1)
        t = (s - self.cumulative_arclength[i]) / self._seg_len[i]
        x, y = self.nodes[i, :2] + t * self._seg[i]
        return Pose2(x, y, self.nodes[i, 2] if t < 1.0 else self.nodes[i + 1, 2])


def path_progress(path: ReferencePath, xy) -> float:
    """Arc length of the closest path point to `xy`."""
    return path.closest_point(xy)[0]


def local_path_segment(
    path: ReferencePath,
    robot: Pose2,
    n_nodes: int,
    spacing: float,
    start_arclength: float | None = None,
) -> np.ndarray:
    """Forward path window in the robot frame.

    Samples `n_nodes` poses spaced `spacing` metres apart along the path,
    starting at the closest point to the robot (or at `start_arclength` when
    the caller tracks progress itself), each expressed in the robot frame.
    Samples past the end clamp to the final node.  Returns (n_nodes, 3).
    """
    s0 = path.closest_point(robot.xy)[0] if start_arclength is None else start_arclength
    out = np.empty((n_nodes, 3))
    for i in range(n_nodes):
        local = to_robot_frame(path.point_at(s0 + i * spacing), robot)
        out[i] = (local.x, local.y, local.theta)
    return out


def straight_path(length: float, node_spacing: float = 0.05) -> ReferencePath:
    """Straight path of `length` metres along +x from the origin."""
    n = max(2, int(round(length / node_spacing)) + 1)
    xs = np.linspace(0.0, length, n)
    nodes = np.column_stack((xs, np.zeros(n), np.zeros(n)))
    return ReferencePath(nodes)


def circle_path(diameter: float, ccw: bool, node_spacing: float = 0.05) -> ReferencePath:
    """Closed circular path of the given diameter, starting at the origin
    heading +x, curving left (ccw) or right (cw)."""
    radius = diameter / 2.0
    total = math.pi * diameter
    n = max(8, int(round(total / node_spacing)) + 1)
    s = np.linspace(0.0, total, n)
    phi = s / radius
    sign = 1.0 if ccw else -1.0
    x = radius * np.sin(phi)
    y = sign * radius * (1.0 - np.cos(phi))
    theta = np.array([wrap_angle(sign * p) for p in phi])
    return ReferencePath(np.column_stack((x, y, theta)))
