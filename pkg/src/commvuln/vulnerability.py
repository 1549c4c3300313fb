"""Weighted community vulnerability and fuzzy ranking.

Scores are ``1 / (eta^alpha * sigma^beta * gamma^chi)`` over
max-normalized factors. A zero factor under a positive weight yields
``math.inf``, which ranks as most vulnerable rather than being smoothed
by an epsilon.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

from .community import DetectionTrace, Partition, detect_communities
from .graph import Graph, GraphError
from .metrics import DEFAULT_PHI, CommunityNetwork, community_network, eic, eoc, gravity_vector

__all__ = [
    "CommunityScore",
    "FuzzyRanking",
    "RELATIONS",
    "VulnerabilityError",
    "VulnerabilityReport",
    "evaluate",
    "fuzzy_ranking",
    "normalize_factors",
    "relative_vulnerability",
    "vulnerability",
]

# (unicode symbol, ascii token), from weakest to strongest
RELATIONS = (("≈", "~"), ("≤", "<="), ("<", "<"), ("≪", "<<"))
_THRESHOLDS = (0.25, 0.75, 1.5)


class VulnerabilityError(GraphError):
    pass


def _normalize(values: Sequence[float], name: str) -> list[float]:
    if not values:
        raise VulnerabilityError(f"{name} vector is empty")
    if any(v < 0 for v in values):
        raise VulnerabilityError(f"{name} has negative entries")
    top = max(values)
    if top <= 0:
        raise VulnerabilityError(f"cannot normalize {name}: all entries are zero")
    return [v / top for v in values]


def normalize_factors(
    eta: Sequence[float], sigma: Sequence[float], gamma: Sequence[float]
) -> tuple[list[float], list[float], list[float]]:
    """Divide each factor vector by its own maximum."""
    if not len(eta) == len(sigma) == len(gamma):
        raise VulnerabilityError("factor vectors differ in length")
    return _normalize(eta, "eta"), _normalize(sigma, "sigma"), _normalize(gamma, "gamma")


def _power(x: float, w: float) -> float:
    if x == 0.0 and w < 0:
        return math.inf
    return x**w


def vulnerability(
    eta_n: Sequence[float],
    sigma_n: Sequence[float],
    gamma_n: Sequence[float],
    alpha: float = 1.0,
    beta: float = 1.0,
    chi: float = 1.0,
) -> list[float]:
    for w in (alpha, beta, chi):
        if not math.isfinite(w):
            raise VulnerabilityError(f"weights must be finite, got {w}")
    out = []
    for e, s, g in zip(eta_n, sigma_n, gamma_n):
        denom = _power(e, alpha) * _power(s, beta) * _power(g, chi)
        if math.isnan(denom):
            raise VulnerabilityError("zero factor under mixed-sign weights is undefined")
        out.append(math.inf if denom == 0.0 else 1.0 / denom)
    return out


def relative_vulnerability(zeta: Sequence[float]) -> list[float]:
    finite = [z for z in zeta if math.isfinite(z)]
    if not finite:
        raise VulnerabilityError("every vulnerability score is infinite")
    low = min(finite)
    if low <= 0:
        raise VulnerabilityError("minimum vulnerability must be positive")
    return [z / low for z in zeta]


@dataclass(frozen=True)
class FuzzyRanking:
    """Ascending chain ``order[0] rel[0] order[1] ... order[-1]``.

    ``order`` holds 0-based community ids; ``relations`` indexes into
    :data:`RELATIONS`; ``gaps`` are the adjacent differences in relative
    vulnerability (``inf`` next to an infinite score).
    """

    order: tuple[int, ...]
    relations: tuple[int, ...]
    gaps: tuple[float, ...]
    delta: float

    def chain(self, ascii: bool = False, labels: Sequence[str] | None = None) -> str:
        col = 1 if ascii else 0
        names = [labels[k] if labels else f"c{k + 1}" for k in self.order]
        parts = [names[0]]
        for rel, name in zip(self.relations, names[1:]):
            parts += [RELATIONS[rel][col], name]
        return " ".join(parts)


def _relation(gap: float, delta: float) -> int:
    # boundary values take the weaker relation
    for k, factor in enumerate(_THRESHOLDS):
        if gap <= factor * delta:
            return k
    return len(_THRESHOLDS)


def fuzzy_ranking(xi: Sequence[float]) -> FuzzyRanking:
    """Chain communities by ascending relative vulnerability.

    Each adjacent gap is compared with the mean gap ``delta`` at 0.25,
    0.75 and 1.5 times ``delta``. Infinite scores sit at the vulnerable
    end joined by the strongest relation; ``delta`` averages finite gaps.
    """
    if len(xi) < 2:
        raise VulnerabilityError("fuzzy ranking needs at least two communities")
    order = sorted(range(len(xi)), key=lambda k: (xi[k], k))
    gaps = [xi[b] - xi[a] if math.isfinite(xi[b]) else math.inf for a, b in zip(order, order[1:])]
    finite = [d for d in gaps if math.isfinite(d)]
    delta = sum(finite) / len(finite) if finite else 0.0
    relations = [
        _relation(d, delta) if math.isfinite(d) else len(_THRESHOLDS) for d in gaps
    ]
    return FuzzyRanking(tuple(order), tuple(relations), tuple(gaps), delta)


@dataclass(frozen=True)
class CommunityScore:
    label: str
    members: tuple[str, ...]
    eta_raw: int
    sigma_raw: int
    gamma_raw: float
    eta: float
    sigma: float
    gamma: float
    zeta: float
    xi: float
    rank: int


@dataclass(frozen=True)
class VulnerabilityReport:
    communities: tuple[CommunityScore, ...]
    alpha: float
    beta: float
    chi: float
    phi: float
    ranking: FuzzyRanking
    modularity: float | None = None
    network: CommunityNetwork | None = field(default=None, compare=False)

    @property
    def zeta(self) -> list[float]:
        return [c.zeta for c in self.communities]

    @property
    def xi(self) -> list[float]:
        return [c.xi for c in self.communities]

    def chain(self, ascii: bool = False) -> str:
        return self.ranking.chain(ascii=ascii, labels=[c.label for c in self.communities])

    def to_dict(self) -> dict:
        return {
            "weights": {"alpha": self.alpha, "beta": self.beta, "chi": self.chi},
            "phi": self.phi,
            "modularity": self.modularity,
            "communities": [
                {**asdict(c), "members": list(c.members)} for c in self.communities
            ],
            "fuzzy_ranking": {
                "chain": self.chain(ascii=True),
                "order": list(self.ranking.order),
                "relations": list(self.ranking.relations),
                "gaps": list(self.ranking.gaps),
                "delta": self.ranking.delta,
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "VulnerabilityReport":
        fr = data["fuzzy_ranking"]
        comms = tuple(
            CommunityScore(**{**c, "members": tuple(c["members"])}) for c in data["communities"]
        )
        return cls(
            communities=comms,
            alpha=data["weights"]["alpha"],
            beta=data["weights"]["beta"],
            chi=data["weights"]["chi"],
            phi=data["phi"],
            ranking=FuzzyRanking(
                tuple(fr["order"]), tuple(fr["relations"]), tuple(fr["gaps"]), fr["delta"]
            ),
            modularity=data.get("modularity"),
        )


def ranks(xi: Sequence[float]) -> list[int]:
    """1-based ranks, 1 = most vulnerable; ties go to the lower id first."""
    order = sorted(range(len(xi)), key=lambda k: (-xi[k], k))
    out = [0] * len(xi)
    for r, k in enumerate(order, start=1):
        out[k] = r
    return out


def factors(
    g: Graph, p: Partition, phi: float = DEFAULT_PHI
) -> tuple[list[int], list[int], list[float], CommunityNetwork]:
    """Raw interior, exterior and gravity factors for every community."""
    eta = [eic(g, p, k) for k in range(p.count)]
    sigma = [eoc(g, p, k) for k in range(p.count)]
    cn = community_network(g, p, phi)
    return eta, sigma, gravity_vector(p, cn), cn


def evaluate(
    g: Graph,
    partition: Partition | DetectionTrace | None = None,
    phi: float = DEFAULT_PHI,
    alpha: float = 1.0,
    beta: float = 1.0,
    chi: float = 1.0,
) -> VulnerabilityReport:
    """Run the full scoring pipeline; detects communities when none are given."""
    q = None
    if partition is None:
        partition = detect_communities(g)
    if isinstance(partition, DetectionTrace):
        q = partition.final_q
        partition = partition.final
    eta, sigma, gamma, cn = factors(g, partition, phi)
    eta_n, sigma_n, gamma_n = normalize_factors(eta, sigma, gamma)
    zeta = vulnerability(eta_n, sigma_n, gamma_n, alpha, beta, chi)
    xi = relative_vulnerability(zeta)
    rank = ranks(xi)
    scores = tuple(
        CommunityScore(
            label=f"c{k + 1}",
            members=partition.communities[k],
            eta_raw=eta[k],
            sigma_raw=sigma[k],
            gamma_raw=gamma[k],
            eta=eta_n[k],
            sigma=sigma_n[k],
            gamma=gamma_n[k],
            zeta=zeta[k],
            xi=xi[k],
            rank=rank[k],
        )
        for k in range(partition.count)
    )
    return VulnerabilityReport(
        communities=scores,
        alpha=alpha,
        beta=beta,
        chi=chi,
        phi=phi,
        ranking=fuzzy_ranking(xi),
        modularity=q,
        network=cn,
    )
