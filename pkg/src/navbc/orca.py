"""Reciprocal collision avoidance for disc agents.

Each agent builds one linear velocity constraint (half-plane) per neighbour
from the velocity-obstacle geometry, takes half the responsibility for
resolving the conflict, and picks the feasible velocity closest to its
preferred one with a small incremental linear program.  When the constraints
admit no velocity, a fallback program minimises the largest violation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_EPS = 1e-10


@dataclass
class OrcaAgent:
    """Disc agent state for the crowd solver.

    `safety_margin` inflates the combined radius when this agent builds its
    constraints; it buys clearance without changing physical collisions.
    """

    position: np.ndarray
    velocity: np.ndarray
    radius: float
    max_speed: float
    pref_velocity: np.ndarray = field(default_factory=lambda: np.zeros(2))
    safety_margin: float = 0.0

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float)
        self.velocity = np.asarray(self.velocity, dtype=float)
        self.pref_velocity = np.asarray(self.pref_velocity, dtype=float)


@dataclass(frozen=True)
class OrcaLine:
    """Half-plane of permitted velocities: everything left of the directed
    line through `point` along unit `direction`."""

    point: np.ndarray
    direction: np.ndarray


def _det(a, b) -> float:
    return a[0] * b[1] - a[1] * b[0]


def halfplane_violation(line: OrcaLine, velocity) -> float:
    """Signed violation of one constraint (positive means disallowed)."""
    return _det(line.direction, line.point - velocity)


def orca_halfplane(agent: OrcaAgent, other: OrcaAgent, tau: float, dt: float) -> OrcaLine:
    """Velocity constraint keeping `agent` clear of `other` for `tau` seconds.

    Already-overlapping discs use the single step time `dt` as the horizon
    instead, which produces a constraint that actively separates them.
    """
    rel_pos = other.position - agent.position
    rel_vel = agent.velocity - other.velocity
    dist_sq = float(rel_pos @ rel_pos)
    combined_r = agent.radius + other.radius + agent.safety_margin
    combined_r_sq = combined_r * combined_r

    if dist_sq > combined_r_sq:
        # w: from the tau-horizon cutoff centre to the relative velocity
        w = rel_vel - rel_pos / tau
        w_len_sq = float(w @ w)
        dot1 = float(w @ rel_pos)
        if dot1 < 0.0 and dot1 * dot1 > combined_r_sq * w_len_sq:
            # project on the cutoff arc
            w_len = math.sqrt(w_len_sq)
            unit_w = w / w_len
            direction = np.array([unit_w[1], -unit_w[0]])
            u = (combined_r / tau - w_len) * unit_w
        else:
            # project on the nearer leg; det >= 0 picks the left leg
            leg = math.sqrt(dist_sq - combined_r_sq)
            if _det(rel_pos, w) >= 0.0:
                direction = (
                    np.array(
                        [
                            rel_pos[0] * leg - rel_pos[1] * combined_r,
                            rel_pos[0] * combined_r + rel_pos[1] * leg,
                        ]
                    )
                    / dist_sq
                )
            else:
                direction = (
                    -np.array(
                        [
                            rel_pos[0] * leg + rel_pos[1] * combined_r,
                            -rel_pos[0] * combined_r + rel_pos[1] * leg,
                        ]
                    )
                    / dist_sq
                )
            u = float(rel_vel @ direction) * direction - rel_vel
    else:
        # discs already overlap: push apart within one step
        inv_dt = 1.0 / dt
        w = rel_vel - rel_pos * inv_dt
        w_len = float(np.hypot(w[0], w[1]))
        if w_len < _EPS:
            # degenerate: relative velocity exactly matches the separation
            # direction; fall back to pushing straight apart
            d = math.sqrt(dist_sq)
            unit_w = -rel_pos / d if d > _EPS else np.array([1.0, 0.0])
            w_len = 0.0
        else:
            unit_w = w / w_len
        direction = np.array([unit_w[1], -unit_w[0]])
        u = (combined_r * inv_dt - w_len) * unit_w

    return OrcaLine(point=agent.velocity + 0.5 * u, direction=direction)


def orca_halfplanes(agents: list[OrcaAgent], index: int, tau: float, dt: float) -> list[OrcaLine]:
    """Constraints for agent `index` against every other agent."""
    me = agents[index]
    return [orca_halfplane(me, o, tau, dt) for k, o in enumerate(agents) if k != index]


def _lp1(lines, i, radius, opt_vel, direction_opt):
    """Optimise on line i subject to the speed disc and lines[:i].

    Returns the optimal point on the line, or None when infeasible.
    """
    line = lines[i]
    dot = float(line.point @ line.direction)
    disc = dot * dot + radius * radius - float(line.point @ line.point)
    if disc < 0.0:
        return None  # line misses the speed disc entirely
    sqrt_disc = math.sqrt(disc)
    t_left = -dot - sqrt_disc
    t_right = -dot + sqrt_disc

    for j in range(i):
        denom = _det(line.direction, lines[j].direction)
        numer = _det(lines[j].direction, line.point - lines[j].point)
        if abs(denom) <= _EPS:
            if numer < 0.0:
                return None  # parallel and fully outside line j
            continue
        t = numer / denom
        if denom >= 0.0:
            t_right = min(t_right, t)
        else:
            t_left = max(t_left, t)
        if t_left > t_right:
            return None

    if direction_opt:
        t = t_right if float(opt_vel @ line.direction) > 0.0 else t_left
    else:
        t = float((opt_vel - line.point) @ line.direction)
        t = min(max(t, t_left), t_right)
    return line.point + t * line.direction


def _lp2(lines, radius, opt_vel, direction_opt):
    """Incremental 2-D LP over all lines inside the speed disc.

    Returns (count, result): count == len(lines) on success, otherwise the
    index of the first line that could not be satisfied.
    """
    if direction_opt:
        result = opt_vel * radius  # opt_vel is a unit direction here
    elif float(opt_vel @ opt_vel) > radius * radius:
        result = opt_vel / np.linalg.norm(opt_vel) * radius
    else:
        result = np.array(opt_vel, dtype=float)

    for i, line in enumerate(lines):
        if _det(line.direction, line.point - result) > 0.0:
            new = _lp1(lines, i, radius, opt_vel, direction_opt)
            if new is None:
                return i, result
            result = new
    return len(lines), result


def _lp3(lines, begin, radius, result):
    """Fallback: minimise the maximum constraint violation.

    Walks the lines that failed in `_lp2` and, for each, re-optimises along
    the direction that backs off all earlier constraints equally (their
    bisector lines), keeping the violation of line i as small as possible.
    """
    distance = 0.0
    for i in range(begin, len(lines)):
        if _det(lines[i].direction, lines[i].point - result) > distance:
            proj = []
            for j in range(i):
                denom = _det(lines[i].direction, lines[j].direction)
                if abs(denom) <= _EPS:
                    if float(lines[i].direction @ lines[j].direction) > 0.0:
                        continue  # same direction: j dominates or equals i
                    point = 0.5 * (lines[i].point + lines[j].point)
                else:
                    point = (
                        lines[i].point
                        + (_det(lines[j].direction, lines[i].point - lines[j].point) / denom)
                        * lines[i].direction
                    )
                direction = lines[j].direction - lines[i].direction
                direction = direction / np.linalg.norm(direction)
                proj.append(OrcaLine(point=point, direction=direction))

            keep = result
            opt_dir = np.array([-lines[i].direction[1], lines[i].direction[0]])
            count, result = _lp2(proj, radius, opt_dir, True)
            if count < len(proj):
                # numerically should not happen; keep the previous point
                result = keep
            distance = _det(lines[i].direction, lines[i].point - result)
    return result


def solve_velocity_lp(lines: list[OrcaLine], pref_velocity: np.ndarray, max_speed: float) -> np.ndarray:
    """Feasible velocity closest to `pref_velocity` within the speed disc.

    Infeasible constraint sets fall back to minimising the largest violation.
    """
    pref = np.asarray(pref_velocity, dtype=float)
    count, result = _lp2(lines, max_speed, pref, False)
    if count < len(lines):
        result = _lp3(lines, count, max_speed, result)
    return result


def crowd_step(agents: list[OrcaAgent], dt: float, tau: float, frozen: frozenset[int] | set[int] = frozenset()) -> None:
    """Advance every non-frozen agent by one step, in place.

    All new velocities are computed from the pre-step state before any
    position moves, so the update order of agents cannot matter.  Frozen
    agents contribute constraints but keep their own state (used for
    externally-driven bodies such as the robot proxy).
    """
    new_vel = {}
    for i, agent in enumerate(agents):
        if i in frozen:
            continue
        lines = orca_halfplanes(agents, i, tau, dt)
        pref = agent.pref_velocity
        speed = float(np.hypot(pref[0], pref[1]))
        if speed > agent.max_speed:
            pref = pref / speed * agent.max_speed
        new_vel[i] = solve_velocity_lp(lines, pref, agent.max_speed)
    for i, v in new_vel.items():
        agents[i].velocity = v
        agents[i].position = agents[i].position + v * dt
