"""Power-minimizing task placement over the cloud/fog hierarchy.

Every task is pinned to exactly one processing node; its data travels the
single route from the OLT to that node.  The placement cost of a task is
therefore separable:

    cost(task, node) = workload * E_node  +  flow * Psi_route(node)

(W/MIPS processing term plus W/Mbps networking term), and the problem is a
generalized assignment: node MIPS capacities and route Mbps capacities are
the only coupling between tasks.  A task's own mobile unit is excluded as a
destination by default (a device does not process its own offloaded work).

Two solvers are provided.  ``solve_branch_and_bound`` is the production
path; ``solve_exhaustive`` enumerates assignments with independent longhand
cost accounting and exists purely as an oracle.  Both break objective ties
identically (first leaf in preference-ordered enumeration), so they return
the same assignment on the same instance.
"""

from __future__ import annotations

import itertools
import math
import time
import warnings
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .allocator import ConstraintRow
from .errors import ConfigError, InfeasibleError, ResourceLimitError
from .topology import (
    MOBILE_KIND,
    ProcessingNode,
    TopologyConfig,
    build_reference_topology,
)

DEFAULT_ENUMERATION_CAP = 10 ** 8
_TIE_REL = 1e-9

# DFS preference when costs tie: room server, then mobiles (best route
# first), then outward through the hierarchy.
_KIND_PREFERENCE = {"RoomFog": 0, MOBILE_KIND: 1, "BuildFog": 2,
                    "CampFog": 3, "MetroFog": 4, "CCloud": 5}


# =====================================================================
# demands
# =====================================================================

@dataclass(frozen=True)
class TaskDemand:
    """One offloaded task: a workload and the flow that must carry it."""

    task_id: int
    source: str
    workload_mips: float
    flow_mbps: float

    def __post_init__(self) -> None:
        if not self.workload_mips > 0:
            raise ConfigError(f"task {self.task_id}: workload must be > 0")
        if self.flow_mbps < 0:
            raise ConfigError(f"task {self.task_id}: flow must be >= 0")


def demands_from_drr(workload_mips: float, drr: float, count: int,
                     sources: Optional[Sequence[str]] = None,
                     ) -> List[TaskDemand]:
    """Generate ``count`` identical tasks with flow = drr * workload.

    Sources are assigned round-robin (defaults to the eight reference
    mobiles).  The flow unit is Mbit/s: a 400 MIPS task at ratio 0.6 carries
    240 Mbit/s.
    """
    if count <= 0:
        raise ConfigError("task count must be positive")
    if not 0 < drr <= 1:
        raise ConfigError(f"data rate ratio must be in (0, 1], got {drr}")
    if not workload_mips > 0:
        raise ConfigError("workload must be positive")
    if not 100 <= workload_mips <= 1500:
        warnings.warn(
            f"workload {workload_mips} MIPS is outside the studied "
            f"100..1500 range", stacklevel=2)
    if sources is None:
        sources = [f"mobile_{i}" for i in range(8)]
    flow = drr * workload_mips
    return [TaskDemand(k, sources[k % len(sources)], workload_mips, flow)
            for k in range(count)]


# =====================================================================
# problem
# =====================================================================

@dataclass
class PlacementProblem:
    """Topology + demands + the big-M linking assignment to workload."""

    topology: TopologyConfig
    tasks: Sequence[TaskDemand]
    alpha: Optional[float] = None
    no_self_processing: bool = True

    def __post_init__(self) -> None:
        if not self.tasks:
            raise ConfigError("no tasks to place")
        ids = [t.task_id for t in self.tasks]
        if len(set(ids)) != len(ids):
            raise ConfigError("duplicate task ids")
        for t in self.tasks:
            src = self.topology.node(t.source)  # raises if unknown
            if not src.is_mobile:
                raise ConfigError(
                    f"task {t.task_id}: source {t.source} is not a mobile "
                    f"unit")
        max_w = max(t.workload_mips for t in self.tasks)
        if self.alpha is None:
            self.alpha = 10.0 * max_w
        if not self.alpha > max_w:
            raise ConfigError(
                f"alpha {self.alpha} must exceed the largest workload "
                f"{max_w}")

    def cost(self, task: TaskDemand, node_id: str) -> float:
        node = self.topology.node(node_id)
        route = self.topology.route_to(node_id)
        return (task.workload_mips * node.efficiency_w_per_mips
                + task.flow_mbps * route.efficiency_w_per_mbps)


def _preference_order(topology: TopologyConfig) -> List[str]:
    def key(n: ProcessingNode):
        psi = topology.route_to(n.node_id).efficiency_w_per_mbps
        return (_KIND_PREFERENCE[n.kind], psi, n.node_id)
    return [n.node_id for n in sorted(topology.nodes, key=key)]


@dataclass
class _Prepared:
    """Solver-facing view: preference-ordered nodes, costs, eligibility."""

    node_ids: List[str]
    node_cap_mips: List[float]
    route_cap_mbps: List[float]
    cost: List[List[float]]        # [task][node]
    eligible: List[List[bool]]     # [task][node]
    group_prev: List[Optional[int]]  # index of previous identical task
    task_w: List[float]
    task_f: List[float]


def _prepare(problem: PlacementProblem) -> _Prepared:
    topo = problem.topology
    node_ids = _preference_order(topo)
    caps = [topo.node(n).capacity_mips for n in node_ids]
    links = [topo.route_to(n).capacity_mbps for n in node_ids]
    tasks = list(problem.tasks)
    cost = [[problem.cost(t, n) for n in node_ids] for t in tasks]
    eligible = []
    for t in tasks:
        row = []
        for j, n in enumerate(node_ids):
            ok = t.workload_mips <= caps[j] and t.flow_mbps <= links[j]
            if problem.no_self_processing and n == t.source:
                ok = False
            row.append(ok)
        if not any(row):
            raise InfeasibleError(
                f"task {t.task_id} fits no processing node "
                f"(workload {t.workload_mips} MIPS, flow {t.flow_mbps} "
                f"Mbit/s)",
                report={"constraint": "per_task_fit",
                        "task_id": t.task_id,
                        "workload_mips": t.workload_mips,
                        "flow_mbps": t.flow_mbps})
        eligible.append(row)
    total_w = sum(t.workload_mips for t in tasks)
    if total_w > sum(caps) + 1e-9:
        raise InfeasibleError(
            f"total workload {total_w} MIPS exceeds total capacity "
            f"{sum(caps)} MIPS",
            report={"constraint": "total_capacity",
                    "total_workload_mips": total_w,
                    "total_capacity_mips": sum(caps)})
    # identical tasks (same workload, flow and source) are interchangeable;
    # remember each task's predecessor in its group for symmetry breaking
    last_of_group: Dict[Tuple[float, float, str], int] = {}
    group_prev: List[Optional[int]] = []
    for i, t in enumerate(tasks):
        sig = (t.workload_mips, t.flow_mbps, t.source)
        group_prev.append(last_of_group.get(sig))
        last_of_group[sig] = i
    return _Prepared(node_ids, caps, links, cost, eligible, group_prev,
                     [t.workload_mips for t in tasks],
                     [t.flow_mbps for t in tasks])


def _tie_tolerance(prep: _Prepared) -> float:
    worst = sum(max(c for c, ok in zip(row, okrow) if ok)
                for row, okrow in zip(prep.cost, prep.eligible))
    return _TIE_REL * max(1.0, worst)


# =====================================================================
# solution + reports
# =====================================================================

@dataclass
class PlacementSolution:
    """A feasible placement with its power accounting."""

    problem: PlacementProblem
    assignment: Dict[int, str]            # task_id -> node_id
    objective_w: float
    processing_power_w: Dict[str, float]  # per node
    networking_power_w: Dict[str, float]  # per node
    workload_mips: Dict[str, float]       # per node
    stats: Dict[str, object]

    @property
    def total_processing_w(self) -> float:
        return sum(self.processing_power_w.values())

    @property
    def total_networking_w(self) -> float:
        return sum(self.networking_power_w.values())


def _finish(problem: PlacementProblem, prep: _Prepared,
            assignment_idx: Dict[int, int], stats: Dict[str, object],
            ) -> PlacementSolution:
    topo = problem.topology
    proc = {n.node_id: 0.0 for n in topo.nodes}
    net = {n.node_id: 0.0 for n in topo.nodes}
    mips = {n.node_id: 0.0 for n in topo.nodes}
    named: Dict[int, str] = {}
    total = 0.0
    for i, t in enumerate(problem.tasks):
        n_id = prep.node_ids[assignment_idx[i]]
        named[t.task_id] = n_id
        node = topo.node(n_id)
        route = topo.route_to(n_id)
        proc[n_id] += t.workload_mips * node.efficiency_w_per_mips
        net[n_id] += t.flow_mbps * route.efficiency_w_per_mbps
        mips[n_id] += t.workload_mips
        total += prep.cost[i][assignment_idx[i]]
    return PlacementSolution(problem, named, total, proc, net, mips, stats)


def power_report(solution: PlacementSolution) -> Dict[str, object]:
    """Per-node and total processing/networking power of a placement."""
    return {
        "total_power_w": solution.objective_w,
        "processing_power_w": solution.total_processing_w,
        "networking_power_w": solution.total_networking_w,
        "per_node": {
            n: {
                "processing_w": solution.processing_power_w[n],
                "networking_w": solution.networking_power_w[n],
                "workload_mips": solution.workload_mips[n],
            }
            for n in sorted(solution.processing_power_w)
        },
    }


def utilization_report(solution: PlacementSolution) -> List[Dict[str, object]]:
    """Workload fraction used on each mobile unit."""
    rows = []
    for m in solution.problem.topology.mobiles():
        rows.append({
            "mobile_id": m.node_id,
            "wavelength": m.wavelength,
            "utilization": solution.workload_mips[m.node_id]
            / m.capacity_mips,
        })
    return rows


# =====================================================================
# materialized MILP (audits and property tests only)
# =====================================================================

class PlacementModel:
    """Explicit row/variable form of the placement MILP.

    Variable keys: ("delta", k, n), ("X", k, n), ("L", k, n) and
    ("lam", k, n, hop) where hop walks the route to n (the OLT first).
    The solvers never consume this object; it lets tests audit the algebra
    constraint by constraint.
    """

    def __init__(self, problem: PlacementProblem):
        self.problem = problem
        self.topology = problem.topology
        self.node_ids = [n.node_id for n in self.topology.nodes]
        self.rows: List[ConstraintRow] = []
        self._hops: Dict[str, List[Tuple[str, str]]] = {}
        for n_id in self.node_ids:
            route = self.topology.route_to(n_id)
            stations = ["olt", *route.devices, n_id]
            self._hops[n_id] = list(zip(stations[:-1], stations[1:]))
        self._build()

    # -- construction ------------------------------------------------
    def _build(self) -> None:
        p = self.problem
        alpha = p.alpha
        for t in p.tasks:
            k = t.task_id
            for n in self.node_ids:
                self.rows.append(ConstraintRow(
                    f"link_lo[k{k},{n}]", "eq21",
                    [(("X", k, n), alpha), (("delta", k, n), -1.0)],
                    ">=", 0.0))
                self.rows.append(ConstraintRow(
                    f"link_hi[k{k},{n}]", "eq22",
                    [(("X", k, n), 1.0), (("delta", k, n), -alpha)],
                    "<=", 0.0))
            self.rows.append(ConstraintRow(
                f"one_node[k{k}]", "eq23",
                [(("delta", k, n), 1.0) for n in self.node_ids], "==", 1.0))
        for n in self.node_ids:
            cap = self.topology.node(n).capacity_mips
            self.rows.append(ConstraintRow(
                f"node_cap[{n}]", "eq24",
                [(("X", t.task_id, n), 1.0) for t in p.tasks], "<=", cap))
            link = self.topology.route_to(n).capacity_mbps
            for h, hop in enumerate(self._hops[n]):
                self.rows.append(ConstraintRow(
                    f"link_cap[{n},{hop[0]}->{hop[1]}]", "eq25",
                    [(("lam", t.task_id, n, h), 1.0) for t in p.tasks],
                    "<=", link))
        for t in p.tasks:
            k = t.task_id
            for n in self.node_ids:
                hops = self._hops[n]
                stations = ["olt", *(f"{a}->{b}" for a, b in hops)]
                # conservation at the OLT, each intermediate, and the node
                self.rows.append(ConstraintRow(
                    f"flow_src[k{k},{n}]", "eq26",
                    [(("lam", k, n, 0), 1.0), (("L", k, n), -1.0)],
                    "==", 0.0))
                for h in range(1, len(hops)):
                    self.rows.append(ConstraintRow(
                        f"flow_mid[k{k},{n},{h}]", "eq26",
                        [(("lam", k, n, h - 1), 1.0),
                         (("lam", k, n, h), -1.0)], "==", 0.0))
                self.rows.append(ConstraintRow(
                    f"flow_dst[k{k},{n}]", "eq26",
                    [(("lam", k, n, len(hops) - 1), 1.0),
                     (("L", k, n), -1.0)], "==", 0.0))
                self.rows.append(ConstraintRow(
                    f"flow_demand[k{k},{n}]", "eq27",
                    [(("L", k, n), 1.0),
                     (("delta", k, n), -t.flow_mbps)], "==", 0.0))
            if p.no_self_processing:
                self.rows.append(ConstraintRow(
                    f"no_self[k{k}]", "no_self",
                    [(("delta", k, t.source), 1.0)], "==", 0.0))

    # -- helpers -----------------------------------------------------
    def rows_in_family(self, family: str) -> List[ConstraintRow]:
        return [r for r in self.rows if r.family == family]

    def variables(self) -> List[Tuple]:
        seen: Dict[Tuple, None] = {}
        for r in self.rows:
            for v, _ in r.terms:
                seen.setdefault(v)
        return list(seen)

    def point_from_assignment(self, assignment: Mapping[int, str],
                              ) -> Dict[Tuple, float]:
        point: Dict[Tuple, float] = {}
        for t in self.problem.tasks:
            k = t.task_id
            chosen = assignment[k]
            for n in self.node_ids:
                on = 1.0 if n == chosen else 0.0
                point[("delta", k, n)] = on
                point[("X", k, n)] = t.workload_mips * on
                point[("L", k, n)] = t.flow_mbps * on
                for h in range(len(self._hops[n])):
                    point[("lam", k, n, h)] = t.flow_mbps * on
        return point

    def check_point(self, point: Mapping[Tuple, float],
                    tol: float = 1e-6) -> List[str]:
        return [r.name for r in self.rows if not r.satisfied(point, tol)]

    def objective(self, point: Mapping[Tuple, float]) -> float:
        total = 0.0
        for t in self.problem.tasks:
            for n in self.node_ids:
                e = self.topology.node(n).efficiency_w_per_mips
                psi = self.topology.route_to(n).efficiency_w_per_mbps
                total += point.get(("X", t.task_id, n), 0.0) * e
                total += (point.get(("delta", t.task_id, n), 0.0)
                          * t.flow_mbps * psi)
        return total


def build_model(problem: PlacementProblem) -> PlacementModel:
    return PlacementModel(problem)


# =====================================================================
# bounds
# =====================================================================

def _greedy_fill_bound(prep: _Prepared, first: int, count: int,
                       rem_mips: List[float], rem_mbps: List[float],
                       ) -> Optional[float]:
    """Relaxation bound for a block of *identical* remaining tasks.

    Drops the self-exclusion/matching structure and fills nodes in cost
    order, so it never exceeds the true completion cost; with loosely
    coupled instances it is usually exact.  Returns None if even the
    relaxation cannot host all tasks.
    """
    w, f = prep.task_w[first], prep.task_f[first]
    costs = sorted((prep.cost[first][j], j)
                   for j in range(len(prep.node_ids))
                   if w <= prep.node_cap_mips[j]
                   and f <= prep.route_cap_mbps[j])
    need = count
    total = 0.0
    for c, j in costs:
        if need == 0:
            break
        slots = math.floor(rem_mips[j] / w + 1e-9)
        if f > 0:
            slots = min(slots, math.floor(rem_mbps[j] / f + 1e-9))
        take = min(need, max(0, slots))
        total += take * c
        need -= take
    if need > 0:
        return None
    return total


def _cheapest_suffix(prep: _Prepared) -> List[float]:
    """cheapest_suffix[d] = capacity-ignoring bound for tasks d..end."""
    n = len(prep.cost)
    out = [0.0] * (n + 1)
    for i in range(n - 1, -1, -1):
        best = min(c for c, ok in zip(prep.cost[i], prep.eligible[i]) if ok)
        out[i] = out[i + 1] + best
    return out


def _uniform_suffix(prep: _Prepared) -> List[bool]:
    """uniform[d]: do tasks d..end all share one (workload, flow)?"""
    n = len(prep.task_w)
    out = [True] * (n + 1)
    for i in range(n - 2, -1, -1):
        out[i] = out[i + 1] and prep.task_w[i] == prep.task_w[i + 1] \
            and prep.task_f[i] == prep.task_f[i + 1]
    return out


# =====================================================================
# branch and bound
# =====================================================================

def solve_branch_and_bound(problem: PlacementProblem,
                           time_limit_s: Optional[float] = None,
                           ) -> PlacementSolution:
    """Exact search over placements, preference-ordered and deterministic.

    Tasks are placed in id order; at each step candidate nodes are tried in
    preference order, so the first optimal leaf found is the canonical one
    (ties broken toward the room server, then mobiles).  Identical tasks
    from the same source are forced into non-decreasing preference order,
    which removes their permutations from the tree without losing the
    canonical optimum.
    """
    t0 = time.monotonic()
    prep = _prepare(problem)
    n = len(problem.tasks)
    n_nodes = len(prep.node_ids)
    tol = _tie_tolerance(prep)
    cheap = _cheapest_suffix(prep)
    uniform = _uniform_suffix(prep)
    rem_mips = list(prep.node_cap_mips)
    rem_mbps = list(prep.route_cap_mbps)
    assignment: Dict[int, int] = {}
    best: Dict[str, object] = {"obj": None, "asg": None}
    counters = {"nodes": 0, "leaves": 0, "bound_prunes": 0,
                "relax_dead_ends": 0}
    deadline = None if time_limit_s is None else t0 + time_limit_s
    timed_out = {"flag": False}

    def bound_for(depth: int) -> Optional[float]:
        static = cheap[depth]
        if depth < n and uniform[depth]:
            gb = _greedy_fill_bound(prep, depth, n - depth,
                                    rem_mips, rem_mbps)
            if gb is None:
                return None
            return max(gb, static)
        return static

    root_bound = bound_for(0)
    if root_bound is None:
        raise InfeasibleError(
            "tasks cannot all be hosted: node or route capacities exhaust "
            "before every task is placed",
            report={"constraint": "capacity_packing",
                    "tasks": n, "nodes": n_nodes})

    def descend(depth: int, cost_so_far: float) -> None:
        counters["nodes"] += 1
        if deadline is not None and counters["nodes"] % 256 == 0 \
                and time.monotonic() > deadline:
            timed_out["flag"] = True
        if timed_out["flag"]:
            return
        if depth == n:
            counters["leaves"] += 1
            if best["obj"] is None or cost_so_far < best["obj"] - tol:
                best["obj"] = cost_so_far
                best["asg"] = dict(assignment)
            return
        tail = bound_for(depth)
        if tail is None:
            counters["relax_dead_ends"] += 1
            return
        if best["obj"] is not None \
                and cost_so_far + tail >= best["obj"] - tol:
            counters["bound_prunes"] += 1
            return
        prev = prep.group_prev[depth]
        start_j = assignment[prev] if prev is not None else 0
        w, f = prep.task_w[depth], prep.task_f[depth]
        for j in range(start_j, n_nodes):
            if not prep.eligible[depth][j]:
                continue
            if w > rem_mips[j] + 1e-9 or f > rem_mbps[j] + 1e-9:
                continue
            assignment[depth] = j
            rem_mips[j] -= w
            rem_mbps[j] -= f
            descend(depth + 1, cost_so_far + prep.cost[depth][j])
            rem_mips[j] += w
            rem_mbps[j] += f
            del assignment[depth]

    descend(0, 0.0)
    elapsed = time.monotonic() - t0

    if best["asg"] is None:
        if timed_out["flag"]:
            raise ResourceLimitError(
                f"time limit {time_limit_s}s expired before any feasible "
                f"placement was found")
        raise InfeasibleError(
            "no placement satisfies the node and route capacities together",
            report={"constraint": "capacity_packing", "tasks": n,
                    "nodes": n_nodes,
                    "relaxation_bound_w": root_bound})
    gap = 0.0
    if timed_out["flag"]:
        gap = max(0.0, (best["obj"] - root_bound) / max(1.0, best["obj"]))
    stats = {
        "method": "branch_and_bound",
        "nodes": counters["nodes"],
        "leaves": counters["leaves"],
        "bound_prunes": counters["bound_prunes"],
        "gap": gap,
        "complete": not timed_out["flag"],
        "elapsed_s": elapsed,
    }
    return _finish(problem, prep, best["asg"], stats)


# =====================================================================
# exhaustive oracle
# =====================================================================

def solve_exhaustive(problem: PlacementProblem,
                     enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
                     ) -> PlacementSolution:
    """Enumerate every placement; independent cost accounting per leaf.

    When no capacity can possibly bind (total workload below every node
    capacity and total flow below every route), tasks decompose and the
    per-task minimum is exact without enumeration.
    """
    t0 = time.monotonic()
    prep = _prepare(problem)
    topo = problem.topology
    n = len(problem.tasks)
    tol = _tie_tolerance(prep)
    tasks = list(problem.tasks)

    # longhand per-(task, node) cost straight from the topology tables
    def longhand(task: TaskDemand, node_id: str) -> float:
        node = topo.node(node_id)
        route = topo.route_to(node_id)
        return (task.workload_mips * node.efficiency_w_per_mips
                + task.flow_mbps * route.efficiency_w_per_mbps)

    options: List[List[int]] = []
    for i, t in enumerate(tasks):
        opts = []
        for j, n_id in enumerate(prep.node_ids):
            node = topo.node(n_id)
            route = topo.route_to(n_id)
            if t.workload_mips > node.capacity_mips:
                continue
            if t.flow_mbps > route.capacity_mbps:
                continue
            if problem.no_self_processing and n_id == t.source:
                continue
            opts.append(j)
        options.append(opts)

    total_w = sum(t.workload_mips for t in tasks)
    total_f = sum(t.flow_mbps for t in tasks)
    decomposes = all(total_w <= c for c in prep.node_cap_mips) \
        and all(total_f <= c for c in prep.route_cap_mbps)

    best_obj: Optional[float] = None
    best_asg: Optional[Dict[int, int]] = None
    leaves = 0

    if decomposes:
        # tasks are independent; first option within tol of the per-task
        # minimum wins (options are in preference order)
        best_asg = {}
        best_obj = 0.0
        for i, t in enumerate(tasks):
            costs = [(longhand(t, prep.node_ids[j]), j) for j in options[i]]
            floor_c = min(cc for cc, _ in costs)
            for cc, jj in costs:
                if cc <= floor_c + tol:
                    best_asg[i] = jj
                    best_obj += cc
                    break
            leaves += len(costs)
    else:
        size = 1
        for opts in options:
            size *= len(opts)
            if size > enumeration_cap:
                raise ResourceLimitError(
                    f"exhaustive placement would enumerate > "
                    f"{enumeration_cap} assignments")
        for combo in itertools.product(*options):
            leaves += 1
            used_m = [0.0] * len(prep.node_ids)
            used_f = [0.0] * len(prep.node_ids)
            obj = 0.0
            ok = True
            for i, j in enumerate(combo):
                used_m[j] += tasks[i].workload_mips
                used_f[j] += tasks[i].flow_mbps
                if used_m[j] > prep.node_cap_mips[j] + 1e-9 \
                        or used_f[j] > prep.route_cap_mbps[j] + 1e-9:
                    ok = False
                    break
                obj += longhand(tasks[i], prep.node_ids[j])
            if not ok:
                continue
            if best_obj is None or obj < best_obj - tol:
                best_obj = obj
                best_asg = {i: j for i, j in enumerate(combo)}

    if best_asg is None:
        raise InfeasibleError(
            "no placement satisfies the node and route capacities together",
            report={"constraint": "capacity_packing", "tasks": n,
                    "nodes": len(prep.node_ids)})
    stats = {
        "method": "exhaustive",
        "leaves": leaves,
        "decomposed": decomposes,
        "elapsed_s": time.monotonic() - t0,
    }
    return _finish(problem, prep, best_asg, stats)


def solve(problem: PlacementProblem, method: str = "branch_and_bound",
          **kwargs) -> PlacementSolution:
    if method == "branch_and_bound":
        return solve_branch_and_bound(problem, **kwargs)
    if method == "exhaustive":
        return solve_exhaustive(problem, **kwargs)
    raise ConfigError(f"unknown solve method {method!r}")


# =====================================================================
# sweep
# =====================================================================

def solution_row(drr: float, workload_mips: float,
                 solution: PlacementSolution) -> Dict[str, object]:
    """Flatten one solved cell: totals plus per-node and per-mobile columns."""
    row: Dict[str, object] = {
        "drr": drr,
        "workload_mips": workload_mips,
        "status": "optimal",
        "total_power_w": solution.objective_w,
        "processing_power_w": solution.total_processing_w,
        "networking_power_w": solution.total_networking_w,
    }
    for n_id in sorted(solution.workload_mips):
        row[f"mips_{n_id}"] = solution.workload_mips[n_id]
        row[f"proc_w_{n_id}"] = solution.processing_power_w[n_id]
        row[f"net_w_{n_id}"] = solution.networking_power_w[n_id]
    for u in utilization_report(solution):
        row[f"util_{u['mobile_id']}"] = u["utilization"]
    return row


def sweep(drr_values: Sequence[float], workload_values: Sequence[float],
          topology: Optional[TopologyConfig] = None, task_count: int = 50,
          time_limit_s: Optional[float] = None) -> List[Dict[str, object]]:
    """One solved row per (drr, workload) cell; infeasible cells flagged."""
    if topology is None:
        topology = build_reference_topology()
    sources = [m.node_id for m in topology.mobiles()]
    if not sources:
        raise ConfigError("sweep topology has no mobile units")
    rows: List[Dict[str, object]] = []
    for drr in drr_values:
        for w in workload_values:
            tasks = demands_from_drr(w, drr, task_count, sources)
            try:
                sol = solve_branch_and_bound(
                    PlacementProblem(topology, tasks),
                    time_limit_s=time_limit_s)
            except InfeasibleError as exc:
                rows.append({"drr": drr, "workload_mips": w,
                             "status": "infeasible",
                             "detail": exc.report.get("constraint", "")})
                continue
            rows.append(solution_row(drr, w, sol))
    return rows
