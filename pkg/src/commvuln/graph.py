"""Undirected simple graphs and the edge-list format used for ingestion.

Node identifiers are kept as opaque strings so mixed label styles
(``7``, ``n07``, ``Bruxelles``) survive a parse/serialize round trip.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from os import PathLike
from typing import Iterable, Mapping, TextIO

__all__ = [
    "Graph",
    "GraphError",
    "ParseError",
    "SelfLoopError",
    "parse_edge_list",
    "read_edge_list",
    "serialize_edge_list",
]


class GraphError(ValueError):
    """Base class for graph construction and lookup problems."""


class ParseError(GraphError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class SelfLoopError(GraphError):
    def __init__(self, node: str, lineno: int | None = None):
        self.node = node
        self.lineno = lineno
        where = f"line {lineno}: " if lineno is not None else ""
        super().__init__(f"{where}self-loop on node {node!r} is not allowed")


@dataclass(frozen=True)
class Graph:
    """Immutable undirected simple graph.

    ``nodes`` keeps first-appearance order; ``edges`` holds each undirected
    edge once, in input order, as ``(u, v)`` with ``u`` appearing before
    ``v`` in node order.
    """

    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    _adj: Mapping[str, frozenset[str]] = field(repr=False, compare=False)
    _index: Mapping[str, int] = field(repr=False, compare=False)

    @classmethod
    def from_edges(
        cls, edges: Iterable[tuple[object, object]], nodes: Iterable[object] = ()
    ) -> "Graph":
        """Build a graph; duplicate edges collapse, self-loops raise."""
        index: dict[str, int] = {}
        adj: dict[str, set[str]] = {}

        def add(v: object) -> str:
            v = str(v)
            if v not in index:
                index[v] = len(index)
                adj[v] = set()
            return v

        for v in nodes:
            add(v)
        kept: list[tuple[str, str]] = []
        for a, b in edges:
            a, b = add(a), add(b)
            if a == b:
                raise SelfLoopError(a)
            if b in adj[a]:
                continue
            adj[a].add(b)
            adj[b].add(a)
            kept.append((a, b) if index[a] < index[b] else (b, a))
        return cls(
            nodes=tuple(index),
            edges=tuple(kept),
            _adj={v: frozenset(ns) for v, ns in adj.items()},
            _index=dict(index),
        )

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def __contains__(self, node: object) -> bool:
        return node in self._adj

    def _check(self, node: str) -> None:
        if node not in self._adj:
            raise KeyError(f"unknown node {node!r}")

    def neighbors(self, node: str) -> frozenset[str]:
        self._check(node)
        return self._adj[node]

    def degree(self, node: str) -> int:
        self._check(node)
        return len(self._adj[node])

    def degrees(self) -> dict[str, int]:
        return {v: len(self._adj[v]) for v in self.nodes}

    def has_edge(self, u: str, v: str) -> bool:
        self._check(u)
        self._check(v)
        return v in self._adj[u]

    def adjacency(self, u: str, v: str) -> int:
        """Entry a_uv of the adjacency matrix."""
        return int(self.has_edge(u, v))

    def position(self, node: str) -> int:
        """Index of ``node`` in first-appearance order."""
        self._check(node)
        return self._index[node]


def degree(g: Graph, node: str) -> int:
    return g.degree(node)


def parse_edge_list(text: str | TextIO) -> Graph:
    """Parse whitespace-separated ``u v`` lines into a :class:`Graph`.

    Lines starting with ``#`` and blank lines are skipped. Any other line
    must carry exactly two tokens.
    """
    stream = io.StringIO(text) if isinstance(text, str) else text
    pairs: list[tuple[str, str]] = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise ParseError(f"expected 2 node tokens, got {len(tokens)}", lineno)
        if tokens[0] == tokens[1]:
            raise SelfLoopError(tokens[0], lineno)
        pairs.append((tokens[0], tokens[1]))
    if not pairs:
        raise ParseError("edge list contains no edges")
    return Graph.from_edges(pairs)


def read_edge_list(path: str | PathLike) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh)


def serialize_edge_list(g: Graph) -> str:
    return "".join(f"{u} {v}\n" for u, v in g.edges)
