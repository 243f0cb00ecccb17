"""Assembly of the collocation system.

Collocating the equation at every mesh node and replacing the integral
over each subinterval by the mean-rectangle (product midpoint) rule
against the piecewise-linear trial function gives, for row i,

    a0(tau_i) x_i + sum_j a_j(tau_i) x_{v_j}
        - sum_{p=1..i} J_p^i (x_{p-1} + x_p)  =  f(tau_i),

    J_p^i = (lam / 2) (tau_p - tau_{p-1}) K(tau_i, (tau_{p-1}+tau_p)/2).

Apart from the load columns v_j the matrix is lower triangular; row 0
has no integral term.  Systems small enough are materialized densely;
beyond ``DENSE_NODE_LIMIT`` unknowns the matrix stays implicit and
row weights are recomputed on demand (O(N) memory).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .expressions import EvalError
from .grid import Grid
from .problems import Problem, ScalarFunction

__all__ = [
    "CollocationSystem",
    "AssemblyError",
    "DENSE_NODE_LIMIT",
    "quad_weight",
    "assemble",
    "residual",
]

# Largest unknown count for which "auto" mode materializes the dense matrix.
DENSE_NODE_LIMIT = 4097


class AssemblyError(RuntimeError):
    """A coefficient function failed to evaluate during assembly."""


def quad_weight(p_idx: int, i: int, g: Grid, kernel: ScalarFunction, lam: float) -> float:
    """Midpoint product-quadrature weight J_p^i for row i, subinterval p.

    The weight multiplies both nodal values x_{p-1} and x_p.
    """
    n_max = g.last_index
    if not 1 <= p_idx <= i <= n_max:
        raise IndexError(f"need 1 <= p ({p_idx}) <= i ({i}) <= N ({n_max})")
    tau = g.nodes
    dt = tau[p_idx] - tau[p_idx - 1]
    mid = 0.5 * (tau[p_idx - 1] + tau[p_idx])
    return 0.5 * lam * dt * float(kernel(tau[i], mid))


@dataclass
class CollocationSystem:
    """The assembled linear system plus its structural decomposition.

    ``matrix`` is the full dense matrix (or None in streaming mode).
    ``load_entries`` holds a_j(tau_i) per node and load; subtracting
    them from the load columns of ``matrix`` leaves the purely lower
    triangular part.  ``row_weights`` reproduces the quadrature weights
    of any row without materializing anything.
    """

    problem: Problem
    grid: Grid
    rhs: np.ndarray
    a0_values: np.ndarray
    load_columns: tuple[int, ...]
    load_entries: np.ndarray  # shape (N+1, number of loads)
    matrix: Optional[np.ndarray] = None
    _mids: np.ndarray = field(init=False, repr=False)
    _dtau: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        tau = self.grid.nodes
        self._dtau = np.diff(tau)
        self._mids = 0.5 * (tau[:-1] + tau[1:])

    @property
    def size(self) -> int:
        return self.rhs.shape[0]

    def row_weights(self, i: int) -> np.ndarray:
        """Weights J_1^i .. J_i^i of row i (empty for row 0)."""
        if i == 0:
            return np.empty(0)
        tau_i = self.grid.nodes[i]
        kvals = self.problem.kernel(tau_i, self._mids[:i])
        return 0.5 * self.problem.lam * self._dtau[:i] * np.atleast_1d(kvals)

    def triangular_matrix(self) -> np.ndarray:
        """Dense matrix with the load entries removed (dense mode only)."""
        if self.matrix is None:
            raise ValueError("system was assembled in streaming mode")
        tri = self.matrix.copy()
        for j, v in enumerate(self.load_columns):
            tri[:, v] -= self.load_entries[:, j]
        return tri

    def residual(self, x) -> float:
        """Max-abs collocation residual of nodal values ``x``."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.size,):
            raise ValueError(f"expected {self.size} nodal values, got shape {x.shape}")
        if self.matrix is not None:
            return float(np.abs(self.matrix @ x - self.rhs).max())
        load_part = self.load_entries @ x[list(self.load_columns)]
        worst = 0.0
        for i in range(self.size):
            w = self.row_weights(i)
            integral = float(w @ (x[:i] + x[1 : i + 1])) if i else 0.0
            r = self.a0_values[i] * x[i] + load_part[i] - integral - self.rhs[i]
            worst = max(worst, abs(r))
        return worst


def _eval_nodes(fn: ScalarFunction, tau: np.ndarray, label: str) -> np.ndarray:
    try:
        return np.atleast_1d(fn(tau))
    except EvalError:
        # Locate the first failing node for the error report.
        for i, t in enumerate(tau):
            try:
                fn(float(t))
            except EvalError as err:
                raise AssemblyError(f"{label} failed at row {i}, t={t:.6g}: {err}") from err
        raise


def assemble(p: Problem, g: Grid, mode: str = "auto") -> CollocationSystem:
    """Assemble the collocation system for problem ``p`` on grid ``g``.

    ``mode`` is ``"dense"``, ``"streaming"``, or ``"auto"`` (dense up to
    ``DENSE_NODE_LIMIT`` unknowns).  Evaluation failures of coefficient
    functions are reported with the row index and abscissa.
    """
    if mode not in ("auto", "dense", "streaming"):
        raise ValueError(f"unknown assembly mode {mode!r}")
    tau = g.nodes
    n = tau.shape[0]
    if mode == "auto":
        mode = "dense" if n <= DENSE_NODE_LIMIT else "streaming"

    a0_values = _eval_nodes(p.a0, tau, "a0")
    rhs = _eval_nodes(p.rhs, tau, "f")
    load_entries = np.empty((n, len(p.loads)))
    for j, term in enumerate(p.loads):
        load_entries[:, j] = _eval_nodes(term.coeff, tau, f"a{j + 1}")

    system = CollocationSystem(
        problem=p,
        grid=g,
        rhs=rhs,
        a0_values=a0_values,
        load_columns=g.load_indices,
        load_entries=load_entries,
        matrix=None,
    )
    if mode == "streaming":
        return system

    mids = system._mids
    dtau = system._dtau
    try:
        kvals = p.kernel(tau[1:, None], mids[None, :])
        weights = np.tril(0.5 * p.lam * dtau[None, :] * kvals)
    except EvalError:
        # The kernel may be undefined above the diagonal (s > t); retry
        # row by row so only the Volterra triangle is touched.
        weights = np.zeros((n - 1, n - 1))
        for i in range(1, n):
            try:
                weights[i - 1, :i] = system.row_weights(i)
            except EvalError as err:
                raise AssemblyError(
                    f"kernel failed at row {i}, t={tau[i]:.6g}: {err}"
                ) from err

    matrix = np.zeros((n, n))
    matrix[1:, : n - 1] -= weights
    matrix[1:, 1:] -= weights
    np.fill_diagonal(matrix, matrix.diagonal() + a0_values)
    for j, v in enumerate(g.load_indices):
        matrix[:, v] += load_entries[:, j]
    system.matrix = matrix
    return system


def residual(p: Problem, g: Grid, x) -> float:
    """Max-abs discrete collocation residual of nodal values ``x``."""
    return assemble(p, g, mode="streaming").residual(x)
