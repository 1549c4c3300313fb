"""Per-community structural factors and the community network.

Interior cohesion (EIC) counts edges inside a community, exterior
contact (EOC) counts edges leaving it. The large-scale factor is a
gravity index over a complete "community network" whose edge weights
are abstract distances: a log-sigmoid of the Jensen-Shannon divergence
between the communities' sorted degree distributions.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .community import Partition
from .graph import Graph, GraphError

__all__ = [
    "CommunityNetwork",
    "DegenerateDistributionError",
    "MetricsError",
    "ProbabilitySet",
    "abstract_distance",
    "community_network",
    "eic",
    "eoc",
    "gravity_index",
    "gravity_vector",
    "jsd",
    "probability_set",
]

DEFAULT_PHI = 3.0

DegreeMode = Literal["intra", "full"]


class MetricsError(GraphError):
    pass


class DegenerateDistributionError(MetricsError):
    def __init__(self, community: int):
        self.community = community
        super().__init__(
            f"community c{community + 1} has no internal edges; "
            "its degree distribution is undefined"
        )


def eic(g: Graph, p: Partition, ci: int) -> int:
    """Number of edges with both endpoints in community ``ci``."""
    p.check(ci)
    where = p.assignment
    return sum(1 for u, v in g.edges if where[u] == ci and where[v] == ci)


def eoc(g: Graph, p: Partition, ci: int) -> int:
    """Number of edges with exactly one endpoint in community ``ci``."""
    p.check(ci)
    where = p.assignment
    return sum(1 for u, v in g.edges if (where[u] == ci) != (where[v] == ci))


@dataclass(frozen=True)
class ProbabilitySet:
    """Descending, zero-padded degree distribution of one community."""

    values: tuple[float, ...]
    community: int
    size: int

    @property
    def kappa(self) -> int:
        return len(self.values)


def _community_degrees(g: Graph, p: Partition, ci: int, mode: DegreeMode) -> list[int]:
    members = p.communities[ci]
    if mode == "full":
        return [g.degree(v) for v in members]
    inside = set(members)
    return [len(g.neighbors(v) & inside) for v in members]


def probability_set(
    g: Graph,
    p: Partition,
    ci: int,
    kappa: int | None = None,
    degree_mode: DegreeMode = "intra",
) -> ProbabilitySet:
    """Degree distribution of community ``ci``, padded to ``kappa`` entries.

    Each member contributes its degree divided by the community's degree
    total. With ``degree_mode="intra"`` (the default) only edges inside the
    community count; ``"full"`` uses whole-graph degrees instead.
    ``kappa`` defaults to the size of the largest community.
    """
    p.check(ci)
    if degree_mode not in ("intra", "full"):
        raise ValueError(f"unknown degree mode {degree_mode!r}")
    if kappa is None:
        kappa = max(p.sizes())
    degrees = _community_degrees(g, p, ci, degree_mode)
    if kappa < len(degrees):
        raise MetricsError(f"kappa={kappa} is smaller than community c{ci + 1}")
    total = sum(degrees)
    if total == 0 or (degree_mode == "intra" and eic(g, p, ci) == 0):
        raise DegenerateDistributionError(ci)
    values = sorted((d / total for d in degrees), reverse=True)
    values += [0.0] * (kappa - len(values))
    return ProbabilitySet(tuple(values), ci, len(degrees))


def _plogp_ratio(x: float, mix: float) -> float:
    return 0.0 if x == 0.0 else x * math.log(x / mix)


def jsd(pi: ProbabilitySet, pj: ProbabilitySet) -> float:
    """Jensen-Shannon divergence (natural log) of two probability sets,
    summed only over the first ``min(size_i, size_j)`` entries.

    Mass beyond that prefix is dropped on purpose, so the value can fall
    short of the untruncated divergence.
    """
    limit = min(pi.size, pj.size)
    if limit < 1:
        raise MetricsError("probability sets must cover at least one node")
    total = 0.0
    for a, b in zip(pi.values[:limit], pj.values[:limit]):
        mix = (a + b) / 2
        total += _plogp_ratio(a, mix) + _plogp_ratio(b, mix)
    return total / 2


def abstract_distance(mu: float, phi: float = DEFAULT_PHI) -> float:
    """Log-sigmoid map of a divergence onto (0.5, 1)."""
    if mu < 0:
        raise MetricsError(f"divergence must be nonnegative, got {mu}")
    if phi < 0:
        raise MetricsError(f"phi must be nonnegative, got {phi}")
    return 1.0 / (1.0 + math.exp(-phi * mu))


@dataclass(frozen=True)
class CommunityNetwork:
    """Complete weighted graph over communities.

    ``ad`` holds abstract distances (zero diagonal), ``jsd`` the
    divergences they were derived from, ``sizes`` the community sizes.
    """

    ad: np.ndarray
    jsd: np.ndarray
    sizes: tuple[int, ...]
    phi: float

    @property
    def size(self) -> int:
        return len(self.sizes)

    def labels(self) -> list[str]:
        return [f"c{k + 1}" for k in range(self.size)]

    def to_dot(self, name: str = "community_network", precision: int = 6) -> str:
        lines = [f"graph {name} {{"]
        for k, (label, n) in enumerate(zip(self.labels(), self.sizes)):
            lines.append(f'  {label} [label="{label}", size={n}];')
        for i in range(self.size):
            for j in range(i + 1, self.size):
                w = f"{self.ad[i, j]:.{precision}f}"
                lines.append(f'  c{i + 1} -- c{j + 1} [weight={w}, label="{w}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_csv(self, precision: int = 6) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["community", *self.labels()])
        for label, row in zip(self.labels(), self.ad):
            writer.writerow([label, *(f"{x:.{precision}f}" for x in row)])
        return buf.getvalue()


def community_network(
    g: Graph,
    p: Partition,
    phi: float = DEFAULT_PHI,
    degree_mode: DegreeMode = "intra",
) -> CommunityNetwork:
    if p.count < 2:
        raise MetricsError("a community network needs at least two communities")
    if phi < 0:
        raise MetricsError(f"phi must be nonnegative, got {phi}")
    kappa = max(p.sizes())
    sets = [probability_set(g, p, k, kappa, degree_mode) for k in range(p.count)]
    k = p.count
    mu = np.zeros((k, k))
    ad = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            mu[i, j] = mu[j, i] = jsd(sets[i], sets[j])
            ad[i, j] = ad[j, i] = abstract_distance(mu[i, j], phi)
    return CommunityNetwork(ad=ad, jsd=mu, sizes=tuple(p.sizes()), phi=phi)


def gravity_index(p: Partition, cn: CommunityNetwork, ci: int) -> float:
    """Sum over the other communities of size product over squared distance."""
    p.check(ci)
    if p.count < 2:
        raise MetricsError("gravity index needs at least two communities")
    if cn.size != p.count:
        raise MetricsError("community network does not match the partition")
    n_i = cn.sizes[ci]
    return float(
        sum(n_i * cn.sizes[j] / cn.ad[ci, j] ** 2 for j in range(cn.size) if j != ci)
    )


def gravity_vector(p: Partition, cn: CommunityNetwork) -> list[float]:
    return [gravity_index(p, cn, k) for k in range(p.count)]
