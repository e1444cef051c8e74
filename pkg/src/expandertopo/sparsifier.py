"""Barrier-function spectral sparsification with cost-aware edge selection.

The graph's edge vectors are whitened by the pseudo-inverse square root of
its Laplacian, so they resolve the identity on the complement of the
all-ones vector.  The barrier iteration then works in an orthonormal basis
of that (n-1)-dimensional complement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, GraphError, build_graph, is_connected, laplacian

KERNEL_TOL = 1e-9


class SparsifierError(RuntimeError):
    pass


class BarrierBreach(SparsifierError):
    pass


@dataclass
class SparsifierParams:
    d: int
    mu: dict[tuple[int, int], float] | None = None
    tolerance: float = 1e-12

    def __post_init__(self):
        if int(self.d) != self.d or self.d <= 1:
            raise SparsifierError(f"d must be an integer > 1, got {self.d}")
        self.d = int(self.d)

    @property
    def sqrt_d(self) -> float:
        return math.sqrt(self.d)

    @property
    def eps_upper(self) -> float:
        return (self.sqrt_d - 1.0) / (self.d + self.sqrt_d)

    @property
    def eps_lower(self) -> float:
        return 1.0 / self.sqrt_d

    @property
    def delta_upper(self) -> float:
        return (self.sqrt_d + 1.0) / (self.sqrt_d - 1.0)

    @property
    def delta_lower(self) -> float:
        return 1.0

    @property
    def ratio_bound(self) -> float:
        return (self.d + 1.0 + 2.0 * self.sqrt_d) / (self.d + 1.0 - 2.0 * self.sqrt_d)


@dataclass
class BarrierState:
    a_matrix: np.ndarray
    u: float
    l: float
    s: np.ndarray
    step: int = 0


def _range_basis(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of L(g) with nonzero eigenvalue."""
    if not is_connected(g):
        raise SparsifierError("sparsification needs a connected graph")
    ev, vec = np.linalg.eigh(laplacian(g))
    keep = ev > KERNEL_TOL * max(1.0, ev[-1])
    return ev[keep], vec[:, keep]


def edge_vectors(g: Graph) -> np.ndarray:
    """Rows ``v_e = sqrt(w_e) * sqrt(L^+) b_e``, shape (m, n)."""
    ev, vec = _range_basis(g)
    half_pinv = (vec / np.sqrt(ev)) @ vec.T
    b = np.zeros((g.m, g.n))
    b[np.arange(g.m), g.edges[:, 0]] = 1.0
    b[np.arange(g.m), g.edges[:, 1]] = -1.0
    return np.sqrt(g.weights)[:, None] * (b @ half_pinv)


def _eig(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return np.linalg.eigh(0.5 * (a + a.T))


def barrier_potentials(a_matrix, u: float, l: float, tol: float = 0.0) -> tuple[float, float]:
    """(tr (uI - A)^-1, tr (A - lI)^-1); raises if an eigenvalue of A is not inside (l, u)."""
    ev = np.linalg.eigvalsh(np.atleast_2d(a_matrix))
    return _potentials(ev, u, l, tol)


def _potentials(ev: np.ndarray, u: float, l: float, tol: float = 0.0) -> tuple[float, float]:
    if ev.size and (ev.max() >= u - tol or ev.min() <= l + tol):
        raise BarrierBreach(f"eigenvalues [{ev.min()}, {ev.max()}] not inside ({l}, {u})")
    return float(np.sum(1.0 / (u - ev))), float(np.sum(1.0 / (ev - l)))


def _quotas(ev, basis, vecs, u, l, delta_u, delta_l):
    """Vectorised upper/lower quotas for every row of ``vecs``."""
    z2 = (np.atleast_2d(vecs) @ basis) ** 2
    up, lo = u + delta_u, l + delta_l
    phi_u, phi_l = _potentials(ev, u, l)
    phi_u_shift = float(np.sum(1.0 / (up - ev)))
    if np.any(ev <= lo):
        raise BarrierBreach(f"shifted lower barrier {lo} passes eigenvalue {ev.min()}")
    phi_l_shift = float(np.sum(1.0 / (ev - lo)))
    dec_u = phi_u - phi_u_shift
    dec_l = phi_l_shift - phi_l
    if dec_u <= 0 or dec_l <= 0:
        raise SparsifierError("zero potential decrement in quota evaluation")
    r_up = 1.0 / (up - ev)
    r_lo = 1.0 / (ev - lo)
    upper = z2 @ (r_up**2) / dec_u + z2 @ r_up
    lower = z2 @ (r_lo**2) / dec_l - z2 @ r_lo
    return upper, lower


def shift_quotas(a_matrix, v, u, l, delta_u, delta_l) -> tuple[float, float]:
    """Largest 1/s keeping the upper potential and smallest 1/s keeping the lower one.

    Upper: v'(u'I-A)^-2 v / (phi^u - phi^u') + v'(u'I-A)^-1 v with u' = u + delta_u.
    Lower: v'(A-l'I)^-2 v / (phi_l' - phi_l) - v'(A-l'I)^-1 v with l' = l + delta_l.
    """
    if delta_u <= 0 or delta_l <= 0:
        raise SparsifierError("barrier shifts must be positive")
    ev, basis = _eig(np.atleast_2d(np.asarray(a_matrix, dtype=float)))
    upper, lower = _quotas(ev, basis, np.asarray(v, dtype=float), u, l, delta_u, delta_l)
    return float(upper[0]), float(lower[0])


@dataclass
class SparsifyResult:
    graph: Graph
    params: SparsifierParams
    scale: float
    min_ratio: float
    max_ratio: float
    rounds: int
    selections: list[int] = field(repr=False)
    history: list[tuple[float, float, float, float]] = field(repr=False)

    @property
    def achieved_ratio(self) -> float:
        return self.max_ratio / self.min_ratio


def _edge_costs(g: Graph, mu) -> np.ndarray:
    if mu is None:
        return np.ones(g.m)
    costs = np.empty(g.m)
    for k, e in enumerate(g.edge_list()):
        if e not in mu:
            raise SparsifierError(f"no communication cost for edge {e}")
        if mu[e] < 0:
            raise SparsifierError(f"negative cost on edge {e}")
        costs[k] = mu[e]
    return costs


def bss_sparsify(g: Graph, params: SparsifierParams) -> SparsifyResult:
    """Weighted subgraph with at most d(n-1) edges sandwiching L(g) within ``params.ratio_bound``.

    Every round picks, among edges whose lower quota reaches the upper one,
    the cheapest (ties to the smaller edge index), then advances both
    barriers.  Barrier feasibility is checked after each round.  The
    result is rescaled so its smallest relative eigenvalue is exactly 1.
    """
    costs = _edge_costs(g, params.mu)
    ev_g, basis_g = _range_basis(g)
    dim = len(ev_g)
    if dim != g.n - 1:
        raise SparsifierError("Laplacian kernel is not one-dimensional")
    vecs = edge_vectors(g) @ basis_g
    usable = (np.isfinite(costs)) & (np.sum(vecs**2, axis=1) > 0)

    d = params.d
    eps_u, eps_l = params.eps_upper, params.eps_lower
    du, dl = params.delta_upper, params.delta_lower
    state = BarrierState(np.zeros((dim, dim)), dim / eps_u, -dim / eps_l, np.zeros(g.m))
    tol = params.tolerance
    rounds = d * dim
    selections: list[int] = []
    history = []
    ev, basis = np.zeros(dim), np.eye(dim)
    for q in range(rounds):
        upper, lower = _quotas(ev, basis, vecs, state.u, state.l, du, dl)
        feasible = usable & (lower >= upper - tol * np.maximum(1.0, np.abs(upper))) & (upper > 0)
        if not feasible.any():
            raise SparsifierError(
                f"no feasible edge at round {q}: u={state.u}, l={state.l}, "
                f"max(lower-upper)={np.max(lower - upper)}"
            )
        cand = np.flatnonzero(feasible)
        e = int(cand[np.argmin(costs[cand])])
        s_e = 2.0 / (upper[e] + lower[e])
        state.s[e] += s_e
        state.a_matrix += s_e * np.outer(vecs[e], vecs[e])
        state.u += du
        state.l += dl
        state.step = q + 1
        selections.append(e)
        ev, basis = _eig(state.a_matrix)
        phi_u, phi_l = _potentials(ev, state.u, state.l)
        if phi_u > eps_u * (1 + 1e-9) or phi_l > eps_l * (1 + 1e-9):
            raise BarrierBreach(
                f"round {q}: potentials ({phi_u}, {phi_l}) exceed ({eps_u}, {eps_l})"
            )
        history.append((state.u, state.l, phi_u, phi_l))

    lo, hi = float(ev[0]), float(ev[-1])
    scale = 1.0 / lo
    chosen = np.flatnonzero(state.s > 0)
    new_w = g.weights[chosen] * state.s[chosen] * scale
    h = build_graph(g.n, [(int(g.edges[k, 0]), int(g.edges[k, 1]), float(w)) for k, w in zip(chosen, new_w)])
    return SparsifyResult(h, params, scale, 1.0, hi * scale, rounds, selections, history)


def relative_spectrum(g: Graph, h: Graph) -> np.ndarray:
    """Generalized eigenvalues of (L_h, L_g) on the complement of the all-ones vector."""
    if g.n != h.n:
        raise GraphError(f"vertex sets differ: {g.n} vs {h.n}")
    ev, vec = _range_basis(g)
    whiten = vec / np.sqrt(ev)
    m = whiten.T @ laplacian(h) @ whiten
    return np.linalg.eigvalsh(0.5 * (m + m.T))


def loewner_sandwich_check(g: Graph, h: Graph, ratio: float, tol: float = 1e-8) -> bool:
    """True iff L_g <= L_h <= ratio * L_g (Loewner order, within ``tol``)."""
    rel = relative_spectrum(g, h)
    return bool(rel[0] >= 1.0 - tol and rel[-1] <= ratio + tol)
