"""Modularity and greedy agglomerative community detection.

Modularity is evaluated from integer numerators over the common
denominator ``4|E|^2`` so that Q and merge gains of the same graph are
exact rationals rounded once. The greedy search compares the integer
score ``2|E| * e_ab - D_a * D_b`` (proportional to the merge gain), which
makes ties exact and the tie-break reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from .graph import Graph, GraphError

__all__ = [
    "CommunityError",
    "DetectionTrace",
    "Partition",
    "TraceStep",
    "detect_communities",
    "merge_delta_q",
    "modularity",
]


class CommunityError(GraphError):
    pass


@dataclass(frozen=True)
class Partition:
    """Disjoint cover of a graph's nodes.

    Communities are stored in canonical order: members sorted by node
    position, communities sorted by their first member. Community ``k``
    (0-based) is presented as ``c{k+1}``.
    """

    communities: tuple[tuple[str, ...], ...]

    @classmethod
    def from_groups(cls, g: Graph, groups: Iterable[Iterable[object]]) -> "Partition":
        seen: set[str] = set()
        comms = []
        for group in groups:
            members = [str(v) for v in group]
            if not members:
                raise CommunityError("communities must be non-empty")
            for v in members:
                if v not in g:
                    raise CommunityError(f"unknown node {v!r} in partition")
                if v in seen:
                    raise CommunityError(f"node {v!r} assigned to more than one community")
                seen.add(v)
            comms.append(tuple(sorted(members, key=g.position)))
        missing = [v for v in g.nodes if v not in seen]
        if missing:
            raise CommunityError(f"nodes not covered by partition: {missing}")
        comms.sort(key=lambda c: g.position(c[0]))
        return cls(tuple(comms))

    @classmethod
    def from_labels(cls, g: Graph, labels: dict) -> "Partition":
        groups: dict[object, list[str]] = {}
        for v in g.nodes:
            if v not in labels:
                raise CommunityError(f"node {v!r} has no community label")
            groups.setdefault(labels[v], []).append(v)
        return cls.from_groups(g, groups.values())

    @classmethod
    def singletons(cls, g: Graph) -> "Partition":
        return cls(tuple((v,) for v in g.nodes))

    @property
    def count(self) -> int:
        return len(self.communities)

    def __len__(self) -> int:
        return len(self.communities)

    @cached_property
    def assignment(self) -> dict[str, int]:
        return {v: k for k, members in enumerate(self.communities) for v in members}

    def labels(self) -> list[str]:
        return [f"c{k + 1}" for k in range(self.count)]

    def sizes(self) -> list[int]:
        return [len(c) for c in self.communities]

    def check(self, k: int) -> None:
        if not isinstance(k, (int, np.integer)) or not 0 <= k < self.count:
            raise KeyError(f"unknown community id {k!r}")

    def merged(self, g: Graph, a: int, b: int) -> "Partition":
        self.check(a)
        self.check(b)
        if a == b:
            raise CommunityError("cannot merge a community with itself")
        groups = [c for k, c in enumerate(self.communities) if k not in (a, b)]
        groups.append(self.communities[a] + self.communities[b])
        return Partition.from_groups(g, groups)

    def format(self) -> str:
        return ", ".join("{" + ", ".join(c) + "}" for c in self.communities)


def _require_edges(g: Graph) -> int:
    if g.num_edges == 0:
        raise CommunityError("modularity is undefined for a graph without edges")
    return g.num_edges


def _modularity_numerator(g: Graph, p: Partition) -> int:
    """Integer ``4|E|^2 * Q``."""
    m = g.num_edges
    where = p.assignment
    if len(where) != g.num_nodes or any(v not in where for v in g.nodes):
        raise CommunityError("partition does not cover exactly the graph's nodes")
    inside = [0] * p.count
    total_degree = [0] * p.count
    for u, v in g.edges:
        if where[u] == where[v]:
            inside[where[u]] += 1
    for v in g.nodes:
        total_degree[where[v]] += g.degree(v)
    return sum(4 * m * e - d * d for e, d in zip(inside, total_degree))


def modularity(g: Graph, p: Partition) -> float:
    """Newman modularity of ``p``: sum over communities of
    ``|E_c|/|E| - (D_c / 2|E|)^2``."""
    m = _require_edges(g)
    return _modularity_numerator(g, p) / (4 * m * m)


def merge_delta_q(g: Graph, p: Partition, a: int, b: int) -> float:
    """Change in modularity from merging communities ``a`` and ``b``."""
    m = _require_edges(g)
    p.check(a)
    p.check(b)
    if a == b:
        raise CommunityError("cannot merge a community with itself")
    where = p.assignment
    between = sum(1 for u, v in g.edges if {where[u], where[v]} == {a, b})
    da = sum(g.degree(v) for v in p.communities[a])
    db = sum(g.degree(v) for v in p.communities[b])
    return (2 * m * between - da * db) / (2 * m * m)


@dataclass(frozen=True)
class TraceStep:
    """One row of the agglomeration record.

    ``merged`` holds the 0-based ids of the two communities joined, taken
    in the partition of the previous step. The terminal row has
    ``applied=False``: its merge was the best available but lowered Q, so
    ``partition`` shows the rejected structure and is not carried forward.
    """

    t: int
    merged: tuple[int, int] | None
    merged_nodes: tuple[tuple[str, ...], tuple[str, ...]] | None
    q: float
    delta_q: float | None
    partition: Partition
    applied: bool = True


@dataclass(frozen=True)
class DetectionTrace:
    steps: tuple[TraceStep, ...]
    final: Partition
    final_q: float

    def rows(self) -> list[dict]:
        return [
            {
                "t": s.t,
                "structure": s.partition.format(),
                "q": s.q,
                "delta_q": s.delta_q,
                "applied": s.applied,
            }
            for s in self.steps
        ]


def detect_communities(g: Graph) -> DetectionTrace:
    """Greedy modularity agglomeration starting from singletons.

    Every unordered pair of current communities is a candidate, adjacent
    or not. The pair with the largest gain is merged; ties go to the
    lexicographically smallest pair of community ids. The loop stops at
    the first step whose best gain is negative (that merge is recorded
    but not applied) or when a single community remains.
    """
    m = _require_edges(g)
    n = g.num_nodes
    # rows are indexed by each community's first member, so row order is id order
    between = np.zeros((n, n), dtype=np.int64)
    for u, v in g.edges:
        i, j = g.position(u), g.position(v)
        between[i, j] += 1
        between[j, i] += 1
    total_degree = np.array([g.degree(v) for v in g.nodes], dtype=np.int64)
    active = np.ones(n, dtype=bool)

    partition = Partition.singletons(g)
    numerator = _modularity_numerator(g, partition)
    denom = 4 * m * m
    steps = [TraceStep(0, None, None, numerator / denom, None, partition)]

    t = 0
    while active.sum() > 1:
        t += 1
        rows = np.flatnonzero(active)
        sub = 2 * m * between[np.ix_(rows, rows)] - np.outer(total_degree[rows], total_degree[rows])
        k = len(rows)
        iu, ju = np.triu_indices(k, 1)
        scores = sub[iu, ju]
        best = int(np.argmax(scores))  # first maximum in row-major order
        a, b = int(iu[best]), int(ju[best])
        score = int(scores[best])
        ra, rb = int(rows[a]), int(rows[b])
        numerator += 2 * score
        candidate = partition.merged(g, a, b)
        step = TraceStep(
            t=t,
            merged=(a, b),
            merged_nodes=(partition.communities[a], partition.communities[b]),
            q=numerator / denom,
            delta_q=2 * score / denom,
            partition=candidate,
            applied=score >= 0,
        )
        steps.append(step)
        if score < 0:
            break
        between[ra, :] += between[rb, :]
        between[:, ra] += between[:, rb]
        between[ra, ra] = 0
        total_degree[ra] += total_degree[rb]
        active[rb] = False
        partition = candidate

    final_q = steps[-1].q if steps[-1].applied else steps[-2].q
    return DetectionTrace(tuple(steps), partition, final_q)

