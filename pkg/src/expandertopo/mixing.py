"""Laplacian-based mixing matrix W = I - 2/((1 + theta1) lambda_max(L)) L."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix, diags, identity

from .graph import Graph, adjacency, is_connected, laplacian, sparse_adjacency
from .spectral import symmetric_spectrum

TOL = 1e-10


class MixingError(ValueError):
    pass


@dataclass(frozen=True)
class MixingMatrix:
    w_matrix: np.ndarray
    theta1: float
    source_lambda_max: float

    @property
    def n(self) -> int:
        return self.w_matrix.shape[0]

    @property
    def step(self) -> float:
        """Coefficient c in W = I - c L."""
        return 2.0 / ((1.0 + self.theta1) * self.source_lambda_max)

    def sparse(self, g: Graph) -> csr_matrix:
        """Same matrix in CSR form, assembled from the graph to keep exact zeros."""
        a = sparse_adjacency(g)
        lap = diags(np.asarray(a.sum(axis=1)).ravel()) - a
        return (identity(g.n, format="csr") - self.step * lap).tocsr()


def mixing_matrix(g: Graph, theta1: float) -> MixingMatrix:
    if not 0.0 < theta1 < 1.0:
        raise MixingError(f"theta1 must lie in (0, 1), got {theta1}")
    if not is_connected(g):
        raise MixingError("mixing matrix needs a connected graph")
    lap = laplacian(g)
    lam_max = float(symmetric_spectrum(lap)[-1])
    if lam_max <= 0:
        raise MixingError("graph has no edges")
    c = 2.0 / ((1.0 + theta1) * lam_max)
    w = np.eye(g.n) - c * lap
    return MixingMatrix(w, float(theta1), lam_max)


@dataclass
class MixingReport:
    row_sum_residual: float
    asymmetry: float
    spectrum_min: float
    spectrum_max: float
    spectral_floor: float
    min_entry: float
    max_entry: float
    off_pattern_max: float
    consensus_residual: float
    tol: float = TOL

    @property
    def symmetric(self) -> bool:
        return self.asymmetry < self.tol

    @property
    def stochastic(self) -> bool:
        return self.row_sum_residual < self.tol

    @property
    def spectral_range_ok(self) -> bool:
        return self.spectrum_min > -1.0 and self.spectrum_max <= 1.0 + self.tol

    @property
    def entries_in_unit_interval(self) -> bool:
        return self.min_entry >= -self.tol and self.max_entry <= 1.0 + self.tol

    @property
    def sparsity_ok(self) -> bool:
        return self.off_pattern_max == 0.0

    @property
    def ok(self) -> bool:
        """Hard invariants only; entry sign is diagnostic (see ``entries_in_unit_interval``)."""
        return self.symmetric and self.stochastic and self.spectral_range_ok and self.sparsity_ok

    def failures(self) -> list[str]:
        checks = {
            "symmetric": self.symmetric,
            "row-stochastic": self.stochastic,
            "spectral range": self.spectral_range_ok,
            "sparsity": self.sparsity_ok,
            "entry range": self.entries_in_unit_interval,
        }
        return [name for name, good in checks.items() if not good]


def validate_mixing(m: MixingMatrix, g: Graph) -> MixingReport:
    w = m.w_matrix
    if w.shape != (g.n, g.n):
        raise MixingError(f"matrix shape {w.shape} does not match graph order {g.n}")
    ones = np.ones(g.n)
    mask = adjacency(g) != 0
    np.fill_diagonal(mask, True)
    ws = 0.5 * (w + w.T)
    ev = np.linalg.eigvalsh(ws)
    return MixingReport(
        row_sum_residual=float(np.max(np.abs(w.sum(axis=1) - 1.0))),
        asymmetry=float(np.max(np.abs(w - w.T))),
        spectrum_min=float(ev[0]),
        spectrum_max=float(ev[-1]),
        spectral_floor=(m.theta1 - 1.0) / (m.theta1 + 1.0),
        min_entry=float(w.min()),
        max_entry=float(w.max()),
        off_pattern_max=float(np.max(np.abs(w[~mask]), initial=0.0)),
        consensus_residual=float(np.max(np.abs(w @ ones - ones))),
    )
