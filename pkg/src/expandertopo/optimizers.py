"""Synchronous EXTRA / PG-EXTRA simulation with message accounting.

Iterates are stored as an ``M x P`` array whose row ``i`` is agent i's copy
of the decision variable.  Every iteration applies the mixing matrix once,
which is one communication round: one message per edge direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.sparse import csr_matrix, issparse

from .graph import Graph

DIVERGENCE_NORM = 1e150


class SimulationError(RuntimeError):
    pass


class Diverged(SimulationError):
    def __init__(self, iteration: int):
        super().__init__(f"iterates diverged at iteration {iteration}")
        self.iteration = iteration


# ---------------------------------------------------------------- problems

PROBLEM_KINDS = ("example1", "example2", "quadratic_consensus")


@dataclass(frozen=True)
class ProblemSpec:
    """Per-agent objectives parameterised by the data vector ``l``.

    * ``example1``: f_i(x) = l_i x_i / (||x||_1 + eps), x in R^M.
    * ``example2``: f_i(x) = x^2 on the half-line x >= sqrt|l_i|.
    * ``quadratic_consensus``: f_i(x) = (x - l_i)^2 / 2, scalar x.
    """

    kind: str
    l_vector: np.ndarray
    epsilon_smooth: float = 1e-5

    def __post_init__(self):
        if self.kind not in PROBLEM_KINDS:
            raise ValueError(f"unknown problem kind {self.kind!r}")
        lv = np.asarray(self.l_vector, dtype=float).ravel()
        if lv.size == 0 or not np.all(np.isfinite(lv)):
            raise ValueError("l_vector must be a non-empty finite vector")
        object.__setattr__(self, "l_vector", lv)
        if self.epsilon_smooth <= 0:
            raise ValueError("epsilon_smooth must be positive")

    @property
    def M(self) -> int:
        return len(self.l_vector)

    @property
    def P(self) -> int:
        return self.M if self.kind == "example1" else 1

    # vectorised over agents -------------------------------------------

    def smooth_grad(self, x: np.ndarray) -> np.ndarray:
        lv = self.l_vector
        if self.kind == "example1":
            s = np.abs(x).sum(axis=1) + self.epsilon_smooth
            diag = np.diagonal(x)
            g = np.sign(x) * (-(lv * diag) / s**2)[:, None]
            g[np.diag_indices(self.M)] += lv / s
            return g
        if self.kind == "example2":
            return 2.0 * x
        return x - lv[:, None]

    def prox(self, y: np.ndarray, alpha: float) -> np.ndarray:
        """Proximal map of the nonsmooth part (identity unless example2)."""
        if self.kind == "example2":
            return np.maximum(y, np.sqrt(np.abs(self.l_vector))[:, None])
        return y

    def smooth_values(self, x: np.ndarray) -> np.ndarray:
        lv = self.l_vector
        if self.kind == "example1":
            s = np.abs(x).sum(axis=1) + self.epsilon_smooth
            return lv * np.diagonal(x) / s
        if self.kind == "example2":
            return x[:, 0] ** 2
        return 0.5 * (x[:, 0] - lv) ** 2

    def optimal_value(self) -> float:
        """Infimum of the averaged objective (1/M) sum_i f_i over a common x."""
        lv = self.l_vector
        if self.kind == "example1":
            return -float(np.max(np.abs(lv))) / self.M
        if self.kind == "example2":
            return float(np.max(np.abs(lv)))
        return float(0.5 * np.mean((lv - lv.mean()) ** 2))

    def optimal_point(self) -> float | None:
        if self.kind == "example2":
            return float(np.sqrt(np.max(np.abs(self.l_vector))))
        if self.kind == "quadratic_consensus":
            return float(self.l_vector.mean())
        return None

    def delta(self, x: np.ndarray) -> float:
        gap = float(np.mean(self.smooth_values(x))) - self.optimal_value()
        return abs(gap) if self.kind == "example2" else gap


def seeded_l_vector(m: int, seed: int) -> np.ndarray:
    """Uniform [0, 1) data with a unique maximum, reproducible from ``seed``."""
    rng = np.random.Generator(np.random.PCG64(seed))
    lv = rng.random(m)
    top = int(np.argmax(lv))
    others = np.delete(np.arange(m), top)
    if others.size and lv[others].max() == lv[top]:
        lv[others] = np.minimum(lv[others], np.nextafter(lv[top], 0.0))
    return lv


def example1_value_and_grad(x_row: np.ndarray, i: int, spec: ProblemSpec) -> tuple[float, np.ndarray]:
    """f_i and its gradient at one agent's point, taking sign(0) = 0 at the kink."""
    if spec.kind != "example1":
        raise ValueError("spec is not example1")
    x = np.asarray(x_row, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite input")
    li = spec.l_vector[i]
    s = np.abs(x).sum() + spec.epsilon_smooth
    value = li * x[i] / s
    grad = -li * x[i] * np.sign(x) / s**2
    grad[i] += li / s
    return float(value), grad


def example2_split(x: float, i: int, spec: ProblemSpec) -> tuple[float, float, Callable[[float, float], float]]:
    """Smooth value and gradient of x^2, plus the projection that serves as prox of the constraint."""
    if spec.kind != "example2":
        raise ValueError("spec is not example2")
    floor = math.sqrt(abs(spec.l_vector[i]))

    def prox(y: float, alpha: float) -> float:
        return max(y, floor)

    return x * x, 2.0 * x, prox


# ---------------------------------------------------------------- accounting


@dataclass(frozen=True)
class CommCost:
    mu: dict[tuple[int, int], float]
    per_round: float
    directed_count: int


def comm_per_round(g: Graph, mu: float | dict | None = None) -> CommCost:
    """Messages per round: every edge carries one message each way, priced mu_e."""
    edges = g.edge_list()
    if mu is None or isinstance(mu, (int, float)):
        value = 1 if mu is None else mu
        costs = {e: value for e in edges}
    else:
        missing = [e for e in edges if e not in mu]
        if missing:
            raise ValueError(f"no communication cost for edge {missing[0]}")
        costs = {e: mu[e] for e in edges}
    total = sum(2 * c for c in costs.values())
    if all(float(c).is_integer() for c in costs.values()):
        total = int(total)
    return CommCost(costs, total, 2 * len(edges))


# ---------------------------------------------------------------- simulation


@dataclass
class SimulationTrace:
    algorithm: str
    per_round: float
    deltas: list[float] = field(default_factory=list)
    stop_index: int | None = None
    status: str = "running"
    config: dict = field(default_factory=dict)
    final_x: np.ndarray | None = field(default=None, repr=False)

    @property
    def iterations(self) -> list[int]:
        return list(range(len(self.deltas)))

    def cumulative_messages(self, k: int):
        return k * self.per_round

    def rows(self):
        for k, dk in enumerate(self.deltas):
            yield k, dk, self.cumulative_messages(k)

    @property
    def stopped(self) -> bool:
        return self.stop_index is not None


def total_comm(trace: SimulationTrace | int, cost: CommCost | float):
    """k0 * U for a stopped trace (or a bare iteration count)."""
    per_round = cost.per_round if isinstance(cost, CommCost) else cost
    if isinstance(trace, SimulationTrace):
        if trace.stop_index is None:
            raise SimulationError("trace did not meet the stopping rule")
        k0 = trace.stop_index
    else:
        k0 = int(trace)
    return k0 * per_round


def _as_operator(w):
    if hasattr(w, "w_matrix"):
        w = w.w_matrix
    if issparse(w):
        return csr_matrix(w)
    w = np.asarray(w, dtype=float)
    # the matrix is ~(d+1)/n dense; CSR makes each round proportional to edges
    return csr_matrix(w) if np.count_nonzero(w) < 0.25 * w.size else w


def _initial(spec: ProblemSpec, x0) -> np.ndarray:
    if x0 is None:
        return np.zeros((spec.M, spec.P))
    x = np.array(x0, dtype=float).reshape(spec.M, -1)
    if x.shape[1] != spec.P:
        raise ValueError(f"x0 has {x.shape[1]} columns, problem needs {spec.P}")
    return x


def _run(
    algorithm: str,
    g: Graph,
    w,
    spec: ProblemSpec,
    alpha: float,
    tol: float,
    max_iters: int,
    x0,
    per_round,
    on_iterate,
) -> SimulationTrace:
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if spec.M != g.n:
        raise ValueError(f"problem has {spec.M} agents but the graph has {g.n} vertices")
    op = _as_operator(w)
    if op.shape != (g.n, g.n):
        raise ValueError("mixing matrix shape does not match the graph")
    if per_round is None:
        per_round = comm_per_round(g).per_round
    trace = SimulationTrace(
        algorithm, per_round, config={"alpha": alpha, "tol": tol, "max_iters": max_iters}
    )
    proximal = algorithm == "pg-extra"
    x_prev = _initial(spec, x0)
    trace.deltas.append(spec.delta(x_prev))

    wx_prev = op @ x_prev
    g_prev = spec.smooth_grad(x_prev)
    half_prev = wx_prev - alpha * g_prev
    x = spec.prox(half_prev, alpha) if proximal else half_prev

    k = 1
    while True:
        if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > DIVERGENCE_NORM:
            trace.status = "diverged"
            trace.final_x = x
            raise Diverged(k)
        trace.deltas.append(spec.delta(x))
        if on_iterate is not None:
            on_iterate(k, x)
        if abs(trace.deltas[k] - trace.deltas[k - 1]) < tol:
            trace.stop_index = k
            trace.status = "converged"
            break
        if k >= max_iters:
            trace.status = "max-iters"
            break
        wx = op @ x
        g_cur = spec.smooth_grad(x)
        correction = 0.5 * (wx_prev + x_prev) + alpha * (g_cur - g_prev)
        if proximal:
            half = wx + half_prev - correction
            x_next = spec.prox(half, alpha)
            half_prev = half
        else:
            x_next = wx + x - correction
        x_prev, wx_prev, g_prev, x = x, wx, g_cur, x_next
        k += 1
    trace.final_x = x
    return trace


def extra_run(g, w, spec, alpha, tol=1e-3, max_iters=100_000, x0=None, per_round=None, on_iterate=None):
    """EXTRA with W~ = (W + I)/2:

    x^1 = W x^0 - a grad f(x^0),
    x^{k+2} = (W + I) x^{k+1} - (W + I)/2 x^k - a [grad f(x^{k+1}) - grad f(x^k)].

    Stops at the first k0 with |delta_k0 - delta_{k0-1}| < tol.
    """
    return _run("extra", g, w, spec, alpha, tol, max_iters, x0, per_round, on_iterate)


def pg_extra_run(g, w, spec, alpha, tol=1e-3, max_iters=100_000, x0=None, per_round=None, on_iterate=None):
    """PG-EXTRA: EXTRA on the smooth part, each iterate passed through the prox of the rest."""
    return _run("pg-extra", g, w, spec, alpha, tol, max_iters, x0, per_round, on_iterate)


# ---------------------------------------------------------------- degree sweep


@dataclass
class SweepRow:
    d: int
    source: str
    kappa_tilde: float | None = None
    k0: int | None = None
    per_round: float | None = None
    total: float | None = None
    error: str | None = None
    argmin: bool = False


def degree_sweep(
    degrees: Sequence[int],
    make_graph: Callable[[int], tuple[Graph, str] | list[tuple[Graph, str]]],
    run: Callable[[Graph], SimulationTrace],
    kappa: Callable[[Graph], float] | None = None,
) -> list[SweepRow]:
    """Simulate every candidate topology per degree; rank by total communication k0 * U.

    ``make_graph(d)`` returns ``(graph, label)`` or a list of them.  A
    failure is recorded on its row and the sweep moves on.
    """
    rows = []
    for d in degrees:
        try:
            made = make_graph(d)
        except Exception as exc:  # noqa: BLE001 - annotated per degree
            rows.append(SweepRow(d, source="?", error=f"{type(exc).__name__}: {exc}"))
            continue
        for g, label in [made] if isinstance(made, tuple) else made:
            row = SweepRow(d, source=label)
            try:
                if kappa is not None:
                    row.kappa_tilde = kappa(g)
                trace = run(g)
                row.per_round = trace.per_round
                if trace.stop_index is None:
                    row.error = f"no stop within {len(trace.deltas) - 1} iterations"
                else:
                    row.k0 = trace.stop_index
                    row.total = total_comm(trace, trace.per_round)
            except Exception as exc:  # noqa: BLE001
                row.error = f"{type(exc).__name__}: {exc}"
            rows.append(row)
    ranked = sorted(rows, key=lambda r: (r.total is None, r.total if r.total is not None else 0, r.d))
    if ranked and ranked[0].total is not None:
        ranked[0].argmin = True
    return ranked
