"""Random-graph k-coloring benchmark with expansion accounting.

Instances are Erdos-Renyi graphs; infeasible ones are filtered out by an
exact backtracking oracle. Three agents solve each feasible instance with
backtracking search plus forward checking, differing only in how they order
vertices and colors:

  random  uniformly random uncolored vertex, random order over live colors
  greedy  highest-degree uncolored vertex, colors that constrain the fewest
          neighbor domains first
  acp     uncolored vertex with the smallest live domain (the most
          information per committed assignment when every assignment costs
          one expansion), same least-constraining color order

The cost unit is the node expansion: every committed vertex-color
assignment counts, including assignments that are later undone and redone.
A found coloring therefore costs at least n expansions, which is exactly
the predicted cost n * log2(k) / log2(k) of a backtrack-free run, making
the prediction a per-instance lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from .info import effective_cost
from .seeding import map_indexed, rng_for

AGENT_KINDS = ("random", "greedy", "acp")

#: (n, p, k, instances) rows of the default benchmark campaign.
DEFAULT_CONFIGS = (
    (8, 0.25, 3, 50),
    (10, 0.30, 3, 50),
    (12, 0.35, 3, 50),
    (15, 0.35, 3, 50),
    (15, 0.41, 3, 50),
)

_COUNT_GUARD = 20


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices 0..n-1."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("graph needs at least one vertex")
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < v < self.n):
                raise ValueError(f"edge ({u}, {v}) must satisfy 0 <= u < v < n")
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))

    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return tuple(deg)


@dataclass(frozen=True)
class ColoringInstance:
    """A graph plus the color budget it should be solved with."""

    graph: Graph
    k: int
    seed: int
    p: float

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValueError("k must be at least 2")


@dataclass(frozen=True)
class SearchStats:
    """Result of one solve: expansion count, outcome, and the prediction."""

    expansions: int
    found: bool
    assignment: tuple[int, ...] | None
    c_eff_predicted: float

    def __post_init__(self) -> None:
        if self.expansions < 0:
            raise ValueError("expansions cannot be negative")
        if self.found and self.assignment is None:
            raise ValueError("found solutions must carry an assignment")


def gen_erdos_renyi(n: int, p: float, seed) -> Graph:
    """G(n, p): each of the n(n-1)/2 edges appears independently with prob p."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    mask = rng.random(len(pairs)) < p
    return Graph(n, tuple(pair for pair, keep in zip(pairs, mask) if keep))


def is_k_colorable(graph: Graph, k: int) -> bool:
    """Exact feasibility via complete backtracking with forward checking.

    Vertices are taken in index order and colors in value order; no
    ordering heuristics or cutoffs, so the search provably exhausts the
    space before answering False.
    """
    if k < 1:
        raise ValueError("k must be positive")
    n = graph.n
    neighbors = graph.neighbors()
    full = (1 << k) - 1
    domains = [full] * n

    def assign(v: int) -> bool:
        if v == n:
            return True
        live = domains[v]
        while live:
            bit = live & -live
            live ^= bit
            pruned = []
            dead = False
            for u in neighbors[v]:
                if u > v and domains[u] & bit:
                    domains[u] ^= bit
                    pruned.append(u)
                    if domains[u] == 0:
                        dead = True
                        break
            if not dead and assign(v + 1):
                return True
            for u in pruned:
                domains[u] |= bit
        return False

    return assign(0)


def count_proper_colorings(graph: Graph, k: int) -> int:
    """Exact number of proper k-colorings, by exhaustive backtracking.

    Guards against graphs with more than 20 vertices. Connected components
    are counted independently and the counts multiplied, so sparse graphs
    with many components stay cheap.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if graph.n > _COUNT_GUARD:
        raise ValueError(f"counting is limited to {_COUNT_GUARD} vertices, got {graph.n}")
    neighbors = graph.neighbors()

    def component_of(start: int, unseen: set[int]) -> list[int]:
        stack, comp = [start], []
        unseen.discard(start)
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in neighbors[v]:
                if u in unseen:
                    unseen.discard(u)
                    stack.append(u)
        return comp

    def count_component(order: list[int]) -> int:
        pos = {v: i for i, v in enumerate(order)}
        colors = [-1] * len(order)

        def rec(i: int) -> int:
            if i == len(order):
                return 1
            v = order[i]
            total = 0
            for c in range(k):
                if all(colors[pos[u]] != c for u in neighbors[v] if u in pos and pos[u] < i):
                    colors[i] = c
                    total += rec(i + 1)
            colors[i] = -1
            return total

        return rec(0)

    unseen = set(range(graph.n))
    total = 1
    while unseen:
        comp = component_of(min(unseen), unseen)
        total *= count_component(comp)
    return total


def proper_coloring_probability(graph: Graph, k: int) -> float:
    """Fraction of all k^n assignments that are proper colorings."""
    return count_proper_colorings(graph, k) / k**graph.n


def feasible_space_bits(graph: Graph, k: int) -> float:
    """log2 of the proper-coloring count; -inf when there is none.

    Provided for studying the alternative "entropy of the feasible space"
    reading of the total requirement; the benchmark's prediction itself is
    ``predict_cost``.
    """
    count = count_proper_colorings(graph, k)
    return math.log2(count) if count else -math.inf


def predict_cost(instance: ColoringInstance) -> float:
    """Predicted expansions: n * log2(k) bits at log2(k) bits per assignment.

    Each committed assignment pins one vertex's color, worth log2(k) bits
    of the n * log2(k) needed to pin them all, at unit cost. The ratio is
    the vertex count, a per-instance lower bound on any found coloring.
    """
    k_bits = math.log2(instance.k)
    return effective_cost(instance.graph.n * k_bits, k_bits, 1.0)


def solve(instance: ColoringInstance, agent: str, seed) -> SearchStats:
    """Backtracking search with forward checking under one agent's ordering.

    Every committed assignment increments the expansion counter, including
    assignments that immediately wipe out a neighbor's domain and ones that
    recommit a vertex after backtracking. Deterministic given
    (instance, agent, seed); only the random agent consumes randomness.
    """
    if agent not in AGENT_KINDS:
        raise ValueError(f"unknown agent {agent!r}; expected one of {AGENT_KINDS}")
    g, k = instance.graph, instance.k
    n = g.n
    neighbors = g.neighbors()
    degrees = g.degrees()
    rng = np.random.default_rng(seed)
    full = (1 << k) - 1
    domains = [full] * n
    assignment = [-1] * n
    expansions = 0

    def live_colors(v: int) -> list[int]:
        return [c for c in range(k) if domains[v] >> c & 1]

    def constraint_count(v: int, c: int) -> int:
        return sum(1 for u in neighbors[v] if assignment[u] == -1 and domains[u] >> c & 1)

    def pick_vertex() -> int:
        uncolored = [v for v in range(n) if assignment[v] == -1]
        if agent == "random":
            return uncolored[int(rng.integers(len(uncolored)))]
        if agent == "greedy":
            return max(uncolored, key=lambda v: (degrees[v], -v))
        return min(uncolored, key=lambda v: (bin(domains[v]).count("1"), -degrees[v], v))

    def order_colors(v: int) -> list[int]:
        colors = live_colors(v)
        if agent == "random":
            return [colors[i] for i in rng.permutation(len(colors))]
        return sorted(colors, key=lambda c: (constraint_count(v, c), c))

    def search(depth: int) -> bool:
        nonlocal expansions
        if depth == n:
            return True
        v = pick_vertex()
        for c in order_colors(v):
            assignment[v] = c
            expansions += 1
            bit = 1 << c
            pruned = []
            dead = False
            for u in neighbors[v]:
                if assignment[u] == -1 and domains[u] & bit:
                    domains[u] ^= bit
                    pruned.append(u)
                    if domains[u] == 0:
                        dead = True
                        break
            if not dead and search(depth + 1):
                return True
            for u in pruned:
                domains[u] |= bit
            assignment[v] = -1
        return False

    found = search(0)
    prediction = predict_cost(instance)
    if not found:
        return SearchStats(expansions=expansions, found=False, assignment=None, c_eff_predicted=prediction)
    result = tuple(assignment)
    for u, v in g.edges:
        if result[u] == result[v]:
            raise RuntimeError("internal error: returned assignment is not a proper coloring")
    return SearchStats(expansions=expansions, found=True, assignment=result, c_eff_predicted=prediction)


@dataclass(frozen=True)
class InstanceRecord:
    """One (instance, agent) outcome inside a campaign."""

    instance_id: int
    n: int
    p: float
    seed: int
    agent: str
    expansions: int
    c_eff: float
    found: bool


@dataclass(frozen=True)
class ConfigSummary:
    """Aggregate over one (n, p, k) configuration."""

    n: int
    p: float
    k: int
    instance_count: int
    discarded: int
    random_mean: float
    greedy_mean: float
    acp_mean: float
    random_se: float
    greedy_se: float
    acp_se: float
    acp_prediction: float
    bound_violations: int
    acp_overshoot_mean: float


@dataclass(frozen=True)
class CampaignReport:
    summaries: tuple[ConfigSummary, ...]
    records: tuple[InstanceRecord, ...]


def _feasible_instances(n: int, p: float, k: int, count: int, config_index: int, master_seed: int):
    """Generate instances, discarding infeasible ones, until count are found."""
    seed_rng = rng_for(master_seed, config_index)
    feasible: list[ColoringInstance] = []
    discarded = 0
    while len(feasible) < count:
        gen_seed = int(seed_rng.integers(2**63))
        graph = gen_erdos_renyi(n, p, gen_seed)
        if is_k_colorable(graph, k):
            feasible.append(ColoringInstance(graph=graph, k=k, seed=gen_seed, p=p))
        else:
            discarded += 1
    return feasible, discarded


def _solve_record(
    flat_index: int,
    jobs: tuple[tuple[int, ColoringInstance, str], ...],
) -> InstanceRecord:
    instance_id, instance, agent = jobs[flat_index]
    stats = solve(instance, agent, seed=(instance.seed, AGENT_KINDS.index(agent)))
    return InstanceRecord(
        instance_id=instance_id,
        n=instance.graph.n,
        p=instance.p,
        seed=instance.seed,
        agent=agent,
        expansions=stats.expansions,
        c_eff=stats.c_eff_predicted,
        found=stats.found,
    )


def run_campaign(
    configs=DEFAULT_CONFIGS,
    master_seed: int = 0,
    workers: int = 1,
) -> CampaignReport:
    """Full benchmark: generate, filter, solve with all agents, aggregate.

    Each config row is (n, p, k, instance_count) with instance_count >= 50.
    Bound violations count feasible runs of the acp agent whose expansions
    fell below the predicted cost; the expected value is zero.
    """
    configs = tuple(configs)
    for n, p, k, count in configs:
        if count < 50:
            raise ValueError("instance_count must be at least 50 per config")

    summaries: list[ConfigSummary] = []
    records: list[InstanceRecord] = []
    next_instance_id = 0
    for ci, (n, p, k, count) in enumerate(configs):
        instances, discarded = _feasible_instances(n, p, k, count, ci, master_seed)
        jobs = tuple(
            (next_instance_id + ii, inst, agent)
            for ii, inst in enumerate(instances)
            for agent in AGENT_KINDS
        )
        next_instance_id += len(instances)
        rows = map_indexed(partial(_solve_record, jobs=jobs), len(jobs), workers=workers)
        records.extend(rows)

        by_agent = {
            agent: np.array([r.expansions for r in rows if r.agent == agent], dtype=float)
            for agent in AGENT_KINDS
        }
        prediction = predict_cost(instances[0])
        acp_exp = by_agent["acp"]
        violations = int((acp_exp < prediction - 1e-9).sum())
        summaries.append(
            ConfigSummary(
                n=n,
                p=p,
                k=k,
                instance_count=count,
                discarded=discarded,
                random_mean=float(by_agent["random"].mean()),
                greedy_mean=float(by_agent["greedy"].mean()),
                acp_mean=float(acp_exp.mean()),
                random_se=float(by_agent["random"].std(ddof=1) / math.sqrt(count)),
                greedy_se=float(by_agent["greedy"].std(ddof=1) / math.sqrt(count)),
                acp_se=float(acp_exp.std(ddof=1) / math.sqrt(count)),
                acp_prediction=prediction,
                bound_violations=violations,
                acp_overshoot_mean=float((acp_exp - prediction).mean()),
            )
        )
    return CampaignReport(summaries=tuple(summaries), records=tuple(records))
