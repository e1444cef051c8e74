"""Spectral quantities of graphs: condition numbers, Ramanujan checks, Cheeger bounds."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .graph import Graph, GraphError, adjacency, diameter, is_connected, laplacian

KERNEL_TOL = 1e-8
RAMANUJAN_TOL = 1e-8
MAX_BRUTEFORCE_N = 20


class SpectralError(ValueError):
    pass


def symmetric_spectrum(m: np.ndarray) -> np.ndarray:
    """All eigenvalues of a symmetric matrix, ascending (LAPACK ``syevd``)."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise SpectralError(f"expected a square matrix, got shape {m.shape}")
    if m.size and np.max(np.abs(m - m.T)) > 1e-10:
        raise SpectralError("matrix is not symmetric")
    return np.linalg.eigvalsh(m)


def _require_connected(g: Graph) -> None:
    if not is_connected(g):
        raise SpectralError("graph is disconnected")


def laplacian_extremes(g: Graph) -> tuple[float, float]:
    """(smallest nonzero, largest) Laplacian eigenvalue of a connected graph."""
    _require_connected(g)
    if g.n == 1:
        raise SpectralError("a single vertex has no nonzero Laplacian eigenvalue")
    ev = symmetric_spectrum(laplacian(g))
    # one component: exactly one kernel eigenvalue, at index 0
    return float(ev[1]), float(ev[-1])


def reduced_condition_number(g: Graph) -> float:
    lo, hi = laplacian_extremes(g)
    return hi / lo


def _regular_degree(g: Graph) -> int:
    d = g.regular_degree()
    if d is None:
        raise SpectralError("graph is not regular")
    return d


def adjacency_extremes(g: Graph, spectrum: np.ndarray | None = None) -> tuple[float, float]:
    """Return ``(lambda_second, lambda_nontrivial_abs)`` of a connected regular graph.

    ``lambda_second`` is the second largest adjacency eigenvalue;
    ``lambda_nontrivial_abs`` is the largest modulus once a single copy of
    the principal eigenvalue ``d`` is removed (a bipartite ``-d`` stays in).
    """
    d = _regular_degree(g)
    _require_connected(g)
    if g.n < 2:
        raise SpectralError("need at least two vertices")
    ev = symmetric_spectrum(adjacency(g)) if spectrum is None else spectrum
    if abs(ev[-1] - d) > 1e-6:
        raise SpectralError(f"principal eigenvalue {ev[-1]} differs from degree {d}")
    rest = ev[:-1]
    return float(rest[-1]), float(np.max(np.abs(rest)))


def is_bipartite(g: Graph) -> bool:
    color = np.full(g.n, -1)
    nbrs = g.neighbors()
    for start in range(g.n):
        if color[start] >= 0:
            continue
        color[start] = 0
        stack = [start]
        while stack:
            u = stack.pop()
            for v in nbrs[u]:
                if color[v] < 0:
                    color[v] = 1 - color[u]
                    stack.append(v)
                elif color[v] == color[u]:
                    return False
    return True


def kappa_upper_bound(d: int, lambda1: float) -> float:
    """(d + lambda1) / (d - lambda1); infinite when lambda1 == d."""
    if d < 1:
        raise SpectralError(f"degree must be positive, got {d}")
    if lambda1 < 0 or lambda1 > d + 1e-12:
        raise SpectralError(f"need 0 <= lambda1 <= d, got lambda1={lambda1}, d={d}")
    if d - lambda1 <= 1e-12:
        return math.inf
    return (d + lambda1) / (d - lambda1)


def ramanujan_bound(d: int) -> float:
    return 2.0 * math.sqrt(d - 1)


def ramanujan_check(g: Graph, spectrum: np.ndarray | None = None) -> tuple[bool, float]:
    """Ramanujan verdict and margin ``2 sqrt(d-1) - max |nontrivial eigenvalue|``.

    Both ``d`` and, for bipartite graphs, ``-d`` count as trivial here.
    """
    d = _regular_degree(g)
    if d < 3:
        raise SpectralError(f"Ramanujan check needs d >= 3, got {d}")
    _require_connected(g)
    ev = symmetric_spectrum(adjacency(g)) if spectrum is None else spectrum
    rest = ev[:-1]
    if is_bipartite(g):
        rest = rest[1:]
    worst = float(np.max(np.abs(rest)))
    margin = ramanujan_bound(d) - worst
    return margin >= -RAMANUJAN_TOL, margin


def alon_boppana(d: int, diameter: int) -> float:
    """2 sqrt(d-1) - (2 sqrt(d-1) - 1) / floor(D/2), the Alon-Boppana estimate.

    Not a valid lower bound on the second eigenvalue for every graph:
    diameter-2 graphs such as C5 or K_{2,2,2} and the cycle C8 fall below
    it.  The largest nontrivial |eigenvalue| stayed above it on every
    generator output we tried.
    """
    if d < 2:
        raise SpectralError(f"need d >= 2, got {d}")
    half = diameter // 2
    if half == 0:
        raise SpectralError(f"diameter {diameter} gives floor(D/2) = 0")
    r = ramanujan_bound(d)
    return r - (r - 1.0) / half


def cheeger_bounds(d: int, lambda1: float) -> tuple[float, float]:
    """Interval ``[(d - l)/2, sqrt(2 d (d - l))]`` containing the Cheeger constant."""
    if lambda1 > d + 1e-12:
        raise SpectralError(f"lambda1={lambda1} exceeds d={d}")
    gap = max(d - lambda1, 0.0)
    return 0.5 * gap, math.sqrt(2.0 * d * gap)


def cheeger_bruteforce(g: Graph) -> float:
    """Edge expansion min_{|S| <= n/2} cut(S)/|S| by enumerating every subset."""
    n = g.n
    if n > MAX_BRUTEFORCE_N:
        raise SpectralError(f"exhaustive Cheeger search refused for n={n} > {MAX_BRUTEFORCE_N}")
    if n < 2:
        raise SpectralError("need at least two vertices")
    _require_connected(g)
    masks = np.arange(1, 1 << n, dtype=np.int64)
    sizes = np.zeros(len(masks), dtype=np.int64)
    for i in range(n):
        sizes += (masks >> i) & 1
    keep = sizes <= n // 2
    masks, sizes = masks[keep], sizes[keep]
    cut = np.zeros(len(masks))
    for (u, v), w in zip(g.edges, g.weights):
        cut += w * (((masks >> u) ^ (masks >> v)) & 1)
    return float(np.min(cut / sizes))


@dataclass
class SpectralReport:
    n: int
    edges: int
    degree_d: int | str
    connected: bool
    lambda_min_nonzero_laplacian: float
    lambda_max_laplacian: float
    kappa_tilde: float
    lambda_second: float
    lambda_nontrivial_abs: float
    kappa_bound: float
    ramanujan: bool
    ramanujan_margin: float
    diameter: int
    alon_boppana_lower: float
    cheeger_lower: float
    cheeger_upper: float

    def as_dict(self) -> dict:
        return asdict(self)


def spectral_report(g: Graph) -> SpectralReport:
    """Collect every spectral figure of merit for a connected graph.

    Irregular graphs get only the Laplacian fields; adjacency-based ones are NaN.
    """
    _require_connected(g)
    lam_lo, lam_hi = laplacian_extremes(g)
    d = g.regular_degree() if g.is_unit_weighted() else None
    if d is None:
        nan = math.nan
        return SpectralReport(
            n=g.n, edges=g.m, degree_d="irregular", connected=True,
            lambda_min_nonzero_laplacian=lam_lo, lambda_max_laplacian=lam_hi,
            kappa_tilde=lam_hi / lam_lo, lambda_second=nan, lambda_nontrivial_abs=nan,
            kappa_bound=nan, ramanujan=False, ramanujan_margin=nan,
            diameter=diameter(g), alon_boppana_lower=nan, cheeger_lower=nan, cheeger_upper=nan,
        )
    spec_a = symmetric_spectrum(adjacency(g))
    second, nontriv = adjacency_extremes(g, spec_a)
    if d >= 3:
        ram, margin = ramanujan_check(g, spec_a)
    else:
        ram, margin = False, math.nan
    diam = diameter(g)
    try:
        ab = alon_boppana(d, diam)
    except SpectralError:
        ab = math.nan
    lo, hi = cheeger_bounds(d, second)
    return SpectralReport(
        n=g.n,
        edges=g.m,
        degree_d=d,
        connected=True,
        lambda_min_nonzero_laplacian=lam_lo,
        lambda_max_laplacian=lam_hi,
        kappa_tilde=lam_hi / lam_lo,
        lambda_second=second,
        lambda_nontrivial_abs=nontriv,
        kappa_bound=kappa_upper_bound(d, min(nontriv, d)),
        ramanujan=ram,
        ramanujan_margin=margin,
        diameter=diam,
        alon_boppana_lower=ab,
        cheeger_lower=lo,
        cheeger_upper=hi,
    )


__all__ = [
    "GraphError",
    "SpectralError",
    "SpectralReport",
    "adjacency_extremes",
    "alon_boppana",
    "cheeger_bounds",
    "cheeger_bruteforce",
    "kappa_upper_bound",
    "ramanujan_check",
    "reduced_condition_number",
    "spectral_report",
    "symmetric_spectrum",
]
