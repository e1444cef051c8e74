"""Undirected simple graphs with optional edge weights.

Vertices are dense 0-based integers.  Edges are stored in canonical
``(min, max)`` form, sorted, which also fixes the row order of the
incidence matrix.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

FORMAT_VERSION = 1


class GraphError(ValueError):
    """Invalid graph input (bad endpoint, self-loop, negative weight, ...)."""


class GraphFormatError(GraphError):
    """A graph file could not be parsed."""


@dataclass(frozen=True)
class Graph:
    """Immutable weighted undirected graph.

    ``edges`` is an ``(m, 2)`` int array with ``edges[:, 0] < edges[:, 1]``,
    rows sorted lexicographically.  ``weights`` has length ``m``.
    """

    n: int
    edges: np.ndarray
    weights: np.ndarray
    _adj: tuple = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        self.edges.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge_list(self) -> list[tuple[int, int]]:
        return [(int(u), int(v)) for u, v in self.edges]

    def edge_index(self) -> dict[tuple[int, int], int]:
        return {e: k for k, e in enumerate(self.edge_list())}

    def is_unit_weighted(self) -> bool:
        return bool(np.all(self.weights == 1.0))

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        np.add.at(deg, self.edges[:, 0], 1)
        np.add.at(deg, self.edges[:, 1], 1)
        return deg

    def regular_degree(self) -> int | None:
        """Common vertex degree, or None if the graph is irregular."""
        deg = self.degrees()
        if self.n == 0 or np.any(deg != deg[0]):
            return None
        return int(deg[0])

    def neighbors(self) -> tuple[np.ndarray, ...]:
        if not self._adj:
            nbrs: list[list[int]] = [[] for _ in range(self.n)]
            for u, v in self.edges:
                nbrs[u].append(int(v))
                nbrs[v].append(int(u))
            object.__setattr__(self, "_adj", tuple(np.array(x, dtype=np.int64) for x in nbrs))
        return self._adj

    def with_weights(self, weights: Sequence[float]) -> Graph:
        return build_graph(self.n, [(u, v, w) for (u, v), w in zip(self.edge_list(), weights)])

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.edges, other.edges)
            and np.array_equal(self.weights, other.weights)
        )

    def __hash__(self):
        return hash((self.n, self.edges.tobytes(), self.weights.tobytes()))


def build_graph(n: int, edge_list: Iterable[Sequence]) -> Graph:
    """Validate and canonicalize an edge list.

    Each item is ``(u, v)`` or ``(u, v, w)``.  Repeats of the same unordered
    pair are collapsed only if their weights agree; conflicting weights are
    rejected as a multi-edge.
    """
    if int(n) != n or n < 1:
        raise GraphError(f"vertex count must be a positive integer, got {n!r}")
    n = int(n)
    seen: dict[tuple[int, int], float] = {}
    for item in edge_list:
        if len(item) not in (2, 3):
            raise GraphError(f"edge must be (u, v) or (u, v, w), got {item!r}")
        u, v = int(item[0]), int(item[1])
        w = float(item[2]) if len(item) == 3 else 1.0
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u}, {v}) has an endpoint outside [0, {n})")
        if u == v:
            raise GraphError(f"self-loop at vertex {u}")
        if not np.isfinite(w) or w < 0:
            raise GraphError(f"edge ({u}, {v}) has invalid weight {w}")
        key = (u, v) if u < v else (v, u)
        if key in seen and seen[key] != w:
            raise GraphError(f"multi-edge {key} with conflicting weights {seen[key]} and {w}")
        seen[key] = w
    keys = sorted(seen)
    edges = np.array(keys, dtype=np.int64).reshape(-1, 2)
    weights = np.array([seen[k] for k in keys], dtype=float)
    return Graph(n, edges, weights)


def from_edge_array(n: int, edges: np.ndarray) -> Graph:
    """Fast path for generators: unit weights, rejects duplicates instead of merging."""
    edges = np.sort(np.asarray(edges, dtype=np.int64).reshape(-1, 2), axis=1)
    if edges.size and (edges.min() < 0 or edges.max() >= n):
        raise GraphError("edge endpoint out of range")
    if np.any(edges[:, 0] == edges[:, 1]):
        raise GraphError("self-loop in edge array")
    order = np.lexsort((edges[:, 1], edges[:, 0]))
    edges = edges[order]
    if len(edges) > 1 and np.any(np.all(edges[1:] == edges[:-1], axis=1)):
        raise GraphError("duplicate edge in edge array")
    return Graph(int(n), np.ascontiguousarray(edges), np.ones(len(edges)))


def adjacency(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n))
    u, v = g.edges[:, 0], g.edges[:, 1]
    a[u, v] = g.weights
    a[v, u] = g.weights
    return a


def sparse_adjacency(g: Graph) -> csr_matrix:
    u, v = g.edges[:, 0], g.edges[:, 1]
    rows = np.concatenate([u, v])
    cols = np.concatenate([v, u])
    data = np.concatenate([g.weights, g.weights])
    return csr_matrix((data, (rows, cols)), shape=(g.n, g.n))


def incidence_matrix(g: Graph) -> np.ndarray:
    """Signed ``m x n`` incidence matrix; row ``(i, j)``, ``i < j``, has +1 at i, -1 at j."""
    b = np.zeros((g.m, g.n))
    rows = np.arange(g.m)
    b[rows, g.edges[:, 0]] = 1.0
    b[rows, g.edges[:, 1]] = -1.0
    return b


def laplacian(g: Graph) -> np.ndarray:
    a = adjacency(g)
    lap = -a
    lap[np.diag_indices(g.n)] = a.sum(axis=1)
    return lap


def is_connected(g: Graph) -> bool:
    seen = np.zeros(g.n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    nbrs = g.neighbors()
    while queue:
        u = queue.popleft()
        fresh = nbrs[u][~seen[nbrs[u]]]
        seen[fresh] = True
        queue.extend(fresh.tolist())
    return bool(seen.all())


def diameter(g: Graph) -> int:
    """Largest hop distance between two vertices (weights ignored)."""
    if not is_connected(g):
        raise GraphError("diameter of a disconnected graph is infinite")
    if g.n == 1:
        return 0
    a = sparse_adjacency(g)
    dist = shortest_path(a, method="D", unweighted=True, directed=False)
    return int(dist.max())


def graph_to_dict(g: Graph) -> dict:
    return {
        "version": FORMAT_VERSION,
        "n": g.n,
        "edges": [[u, v, float(w)] for (u, v), w in zip(g.edge_list(), g.weights)],
    }


def graph_from_dict(doc: dict) -> Graph:
    if not isinstance(doc, dict) or "n" not in doc or "edges" not in doc:
        raise GraphFormatError("graph document needs 'n' and 'edges'")
    version = doc.get("version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise GraphFormatError(f"unsupported graph format version {version!r}")
    try:
        return build_graph(doc["n"], doc["edges"])
    except (TypeError, ValueError) as exc:
        raise GraphFormatError(f"malformed graph document: {exc}") from exc


def write_graph(g: Graph, path) -> None:
    # repr-exact floats survive the json round trip
    Path(path).write_text(json.dumps(graph_to_dict(g)))


def read_graph(path) -> Graph:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"{path}: {exc}") from exc
    return graph_from_dict(doc)
