"""Time-expanded lattice A* over piecewise-constant extreme inputs.

Each step applies one of nine inputs (each axis at -u_max, 0 or +u_max) for
T_s seconds, so reachable planner states form a lattice anchored at p0 with
spacing T_s · u_max. Nodes are (k, i, j): timestep and lattice offsets.
"""

from dataclasses import dataclass
import heapq
import math

import numpy as np
from scipy.ndimage import binary_dilation

from helpers.logger import logger
from helpers.observability import logfire
from wavetrack.core.errors import PlanningInfeasibleError
from wavetrack.planner.types import PlannedTrajectory, PlanRequest

MOVES = tuple((di, dj) for di in (-1, 0, 1) for dj in (-1, 0, 1))


@dataclass
class _Lattice:
    start: tuple[int, int]
    step: np.ndarray
    positions: tuple[np.ndarray, np.ndarray]
    free: np.ndarray
    goal: np.ndarray

    def point(self, i: int, j: int) -> np.ndarray:
        return np.array([self.positions[0][i], self.positions[1][j]])


def _axis_positions(
    origin: float, step: float, lower: float, upper: float
) -> tuple[np.ndarray, int]:
    if step <= 0:
        return np.array([origin]), 0
    first = math.ceil((lower - origin) / step - 1e-9)
    last = math.floor((upper - origin) / step + 1e-9)
    offsets = np.arange(first, last + 1)
    return origin + offsets * step, -first


def _build_lattice(request: PlanRequest) -> _Lattice:
    constraints = request.constraints
    workspace = constraints.workspace
    step = request.sample_period * request.planner_box.upper
    lower = np.asarray(workspace.lower)
    upper = np.asarray(workspace.upper)

    positions, starts, cells, valid = [], [], [], []
    for axis in range(2):
        pos, start = _axis_positions(
            request.p0[axis], step[axis], lower[axis], upper[axis]
        )
        index = np.floor((pos - lower[axis]) / workspace.resolution).astype(int)
        ok = (index >= 0) & (index < workspace.shape[axis])
        positions.append(pos)
        starts.append(start)
        cells.append(np.clip(index, 0, workspace.shape[axis] - 1))
        valid.append(ok)

    inside = valid[0][:, None] & valid[1][None, :]
    selector = np.ix_(cells[0], cells[1])
    free = np.stack([~obs.cells[selector] & inside for obs in constraints.obstacles])
    goal = np.stack([g.cells[selector] & inside for g in constraints.goals])
    return _Lattice(
        start=(starts[0], starts[1]),
        step=step,
        positions=(positions[0], positions[1]),
        free=free,
        goal=goal,
    )


def _deviation_costs(
    lattice: _Lattice, reference: np.ndarray, q_matrix: np.ndarray
) -> np.ndarray:
    dx = lattice.positions[0][:, None] - reference[0]
    dz = lattice.positions[1][None, :] - reference[1]
    return q_matrix[0, 0] * dx**2 + (q_matrix[0, 1] + q_matrix[1, 0]) * dx * dz + (
        q_matrix[1, 1] * dz**2
    )


def _heuristic(
    lattice: _Lattice, request: PlanRequest, reference: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Consistent lower bound on cost-to-goal and the steps it assumes."""
    shape = lattice.free.shape[1:]
    goal_any = lattice.goal.any(axis=0)
    if not goal_any.any():
        return np.zeros(shape), np.zeros(shape, dtype=int)

    gi, gj = np.nonzero(goal_any)
    ii = np.arange(shape[0])[:, None]
    jj = np.arange(shape[1])[None, :]
    dist_i = np.maximum(0, np.maximum(gi.min() - ii, ii - gi.max()))
    dist_j = np.maximum(0, np.maximum(gj.min() - jj, jj - gj.max()))
    needed = np.maximum(dist_i, dist_j)

    t_s = request.sample_period
    lam_q = max(float(np.linalg.eigvalsh(request.q_matrix).min()), 0.0)
    lam_r = max(float(np.linalg.eigvalsh(request.r_matrix).min()), 0.0)
    speeds = request.planner_box.upper[request.planner_box.upper > 0]
    u_min_sq = float(speeds.min() ** 2) if speeds.size else 0.0
    dev_x = np.abs(lattice.positions[0][:, None] - reference[0])
    dev_z = np.abs(lattice.positions[1][None, :] - reference[1])

    bound = np.zeros(shape)
    for m in range(int(needed.max())):
        active = needed > m
        slack_x = np.maximum(0.0, dev_x - m * lattice.step[0])
        slack_z = np.maximum(0.0, dev_z - m * lattice.step[1])
        stage = t_s * (lam_q * (slack_x**2 + slack_z**2) + lam_r * u_min_sq)
        bound += np.where(active, stage, 0.0)
    return bound, needed


def _first_blocked_step(lattice: _Lattice) -> int | None:
    reach = np.zeros(lattice.free.shape[1:], dtype=bool)
    reach[lattice.start] = True
    structure = np.ones((3, 3), dtype=bool)
    for k in range(1, lattice.free.shape[0]):
        reach = binary_dilation(reach, structure=structure) & lattice.free[k]
        if not reach.any():
            return k
    return None


def plan_cost(trajectory: PlannedTrajectory, request: PlanRequest) -> float:
    """Objective value of any trajectory under ``request``'s weights."""
    reference = request.reference()
    t_s = request.sample_period
    deviation = trajectory.states[:-1] - reference
    stage = np.einsum("ki,ij,kj->k", deviation, request.q_matrix, deviation)
    controls = trajectory.controls
    effort = np.einsum("ki,ij,kj->k", controls, request.r_matrix, controls)
    total = float(t_s * (stage.sum() + effort.sum()))
    if not request.enforce_goal and trajectory.goal_time is None:
        final = trajectory.states[-1] - reference
        total += float(final @ request.q_matrix @ final)
    return total


def plan_over_interval(request: PlanRequest) -> PlannedTrajectory:
    """Minimum-cost lattice trajectory satisfying the input, obstacle and goal constraints.

    Raises:
        PlanningInfeasibleError: If p0 is blocked, a timestep has no reachable
            free node, or a hard goal cannot be reached inside the horizon
    """
    constraints = request.constraints
    steps = constraints.steps
    if constraints.workspace.index_of(request.p0) is None:
        raise PlanningInfeasibleError(
            "initial planner state lies outside the workspace",
            blocked_step=0,
            blocked_time=request.t_i,
        )

    lattice = _build_lattice(request)
    if not lattice.free[0][lattice.start]:
        raise PlanningInfeasibleError(
            "initial planner state is inside an obstacle",
            blocked_step=0,
            blocked_time=request.t_i,
        )

    enforce_goal = request.enforce_goal
    if request.goal_required and not enforce_goal:
        logger.warning("Every planner goal set is empty; dropping the goal constraint")

    reference = request.reference()
    t_s = request.sample_period
    deviation = _deviation_costs(lattice, reference, request.q_matrix)
    state_cost = t_s * deviation
    u_max = request.planner_box.upper
    move_inputs = [np.array(move, dtype=float) * u_max for move in MOVES]
    move_cost = [t_s * float(u @ request.r_matrix @ u) for u in move_inputs]
    if enforce_goal:
        heuristic, needed = _heuristic(lattice, request, reference)
    else:
        heuristic = np.zeros(lattice.free.shape[1:])
        needed = np.zeros(lattice.free.shape[1:], dtype=int)
    nx, nz = lattice.free.shape[1:]

    i0, j0 = lattice.start
    start = (0, i0, j0)
    best = {start: 0.0}
    parent: dict[tuple[int, int, int], tuple[tuple[int, int, int], int]] = {}
    closed: set[tuple[int, int, int]] = set()
    # Ties break toward earlier steps, then lower z index, then lower x index
    heap = [(heuristic[i0, j0], 0, j0, i0)]
    found: tuple[int, int, int] | None = None
    found_cost = math.inf
    terminal_best: tuple[int, int, int] | None = None
    terminal_cost = math.inf

    with logfire.span("🧭 Lattice search", operation="plan", steps=steps):
        while heap:
            _, k, j, i = heapq.heappop(heap)
            node = (k, i, j)
            if node in closed:
                continue
            closed.add(node)
            g = best[node]

            if lattice.goal[k][i, j]:
                found, found_cost = node, g
                break
            if k == steps:
                if not enforce_goal:
                    total = g + float(deviation[i, j])
                    if total < terminal_cost:
                        terminal_best, terminal_cost = node, total
                continue

            base = g + float(state_cost[i, j])
            for index, (di, dj) in enumerate(MOVES):
                ni, nj = i + di, j + dj
                if not (0 <= ni < nx and 0 <= nj < nz):
                    continue
                if not lattice.free[k + 1][ni, nj]:
                    continue
                if enforce_goal and k + 1 + needed[ni, nj] > steps:
                    continue
                child = (k + 1, ni, nj)
                cost = base + move_cost[index]
                if cost < best.get(child, math.inf):
                    best[child] = cost
                    parent[child] = (node, index)
                    heapq.heappush(heap, (cost + heuristic[ni, nj], k + 1, nj, ni))

    expanded = len(closed)
    if found is None and terminal_best is None:
        blocked = _first_blocked_step(lattice)
        blocked_time = None if blocked is None else float(constraints.times[blocked])
        reason = (
            f"no admissible planner state at step {blocked}"
            if blocked is not None
            else "goal unreachable inside the planning horizon"
        )
        raise PlanningInfeasibleError(
            reason, blocked_step=blocked, blocked_time=blocked_time
        )

    if found is not None:
        end, cost = found, found_cost
    else:
        end, cost = terminal_best, terminal_cost
    path = [end]
    moves: list[int] = []
    while path[-1] in parent:
        previous, index = parent[path[-1]]
        moves.append(index)
        path.append(previous)
    path.reverse()
    moves.reverse()

    states = np.array([lattice.point(i, j) for _, i, j in path])
    controls = np.array([move_inputs[m] for m in moves]).reshape(-1, 2)
    times = request.t_i + t_s * np.arange(len(path))
    goal_time = float(times[-1]) if found is not None else None
    logger.debug(
        f"Lattice plan: {len(moves)} steps, cost {cost:.4f}, {expanded} nodes expanded"
    )
    return PlannedTrajectory(
        times=times,
        states=states,
        controls=controls,
        goal_time=goal_time,
        cost=float(cost),
        expanded=expanded,
    )
