"""Empirical-inner-product linear algebra.

All inner products and norms use the 1/m-weighted sample form, so
thresholds stay comparable across sample sizes.  The projection engine
is an incremental modified Gram-Schmidt QR under that inner product with
one reorthogonalization pass per appended column; each append costs
O(m*k) and keeps the residual orthogonal to the selected span to ~1e-8.
"""

import numpy as np
from scipy.linalg import solve_triangular

from .core import LengthMismatch

# A column whose component orthogonal to the current span has empirical
# norm below this is treated as linearly dependent and must be skipped.
DEGENERATE_TOL = 1e-10


class NonPositiveBound(ValueError):
    """Truncation bound M must be positive."""


class DegenerateColumn(ArithmeticError):
    """Appended column is numerically inside the current span."""


class SingularFactor(ArithmeticError):
    """Triangular factor has a ~zero diagonal entry."""


def empirical_inner(f_vals, g_vals) -> float:
    """(1/m) * sum_i f(x_i) g(x_i)."""
    f_vals = np.asarray(f_vals, dtype=float)
    g_vals = np.asarray(g_vals, dtype=float)
    if f_vals.shape != g_vals.shape:
        raise LengthMismatch(f"{f_vals.shape} vs {g_vals.shape}")
    return float(f_vals @ g_vals) / f_vals.shape[0]


def empirical_norm(f_vals) -> float:
    f_vals = np.asarray(f_vals, dtype=float)
    return float(np.sqrt(np.mean(f_vals**2)))


def rmse(pred, truth) -> float:
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if pred.shape != truth.shape:
        raise LengthMismatch(f"{pred.shape} vs {truth.shape}")
    return empirical_norm(pred - truth)


def truncate(u: float, bound: float) -> float:
    """Clamp a scalar to [-bound, bound]."""
    if bound <= 0:
        raise NonPositiveBound(f"bound must be positive, got {bound}")
    if abs(u) <= bound:
        return float(u)
    return float(np.sign(u) * bound)


def truncate_values(values, bound: float) -> np.ndarray:
    """Elementwise truncation of a prediction vector."""
    if bound <= 0:
        raise NonPositiveBound(f"bound must be positive, got {bound}")
    return np.clip(np.asarray(values, dtype=float), -bound, bound)


class ProjectionState:
    """Incremental orthogonal projection of a fixed target vector y.

    Maintains q_basis (columns empirically orthonormal), the upper
    triangular r_factor mapping appended raw columns onto q_basis, and
    the residual y minus its projection onto the selected span.  Single
    owner: one fit mutates it via project_append; distinct fits never
    share a state.
    """

    def __init__(self, y):
        y = np.array(y, dtype=float)
        if y.ndim != 1 or y.shape[0] == 0:
            raise ValueError("y must be a nonempty vector")
        self.m = y.shape[0]
        self.k = 0
        cap = 8
        self._q = np.zeros((self.m, cap))
        self._r = np.zeros((cap, cap))
        self.residual = y
        self.residual_norm = empirical_norm(y)

    @property
    def q_basis(self) -> np.ndarray:
        return self._q[:, : self.k]

    @property
    def r_factor(self) -> np.ndarray:
        return self._r[: self.k, : self.k]

    def _grow(self):
        cap = self._q.shape[1]
        if self.k < cap:
            return
        new_cap = min(2 * cap, max(self.m, cap + 1))
        q = np.zeros((self.m, new_cap))
        q[:, :cap] = self._q
        r = np.zeros((new_cap, new_cap))
        r[:cap, :cap] = self._r
        self._q, self._r = q, r


def project_append(state: ProjectionState, column) -> ProjectionState:
    """Orthogonalize ``column`` against the basis and absorb it.

    Updates the residual and its norm in place and returns the state.
    Raises DegenerateColumn (state untouched) when the column's
    orthogonal component has empirical norm below DEGENERATE_TOL; the
    caller should skip the atom.
    """
    column = np.asarray(column, dtype=float)
    if column.shape != (state.m,):
        raise LengthMismatch(f"column shape {column.shape}, expected ({state.m},)")
    k, m = state.k, state.m
    q = state._q[:, :k]
    head = (q.T @ column) / m
    w = column - q @ head
    # Second pass restores orthogonality lost to cancellation.
    corr = (q.T @ w) / m
    w -= q @ corr
    head += corr
    w_norm = empirical_norm(w)
    if w_norm < DEGENERATE_TOL:
        raise DegenerateColumn(f"orthogonal component norm {w_norm:.3e}")
    state._grow()
    new_q = w / w_norm
    state._q[:, k] = new_q
    state._r[:k, k] = head
    state._r[k, k] = w_norm
    state.k = k + 1
    coef = empirical_inner(new_q, state.residual)
    state.residual = state.residual - coef * new_q
    state.residual_norm = empirical_norm(state.residual)
    return state


def solve_coefficients(state: ProjectionState, y) -> np.ndarray:
    """Least-squares coefficients of y over the appended raw columns.

    Back-substitution through r_factor; the result minimizes the
    empirical norm of y minus the span combination.
    """
    if state.k == 0:
        raise ValueError("no columns appended")
    y = np.asarray(y, dtype=float)
    r = state.r_factor
    diag = np.abs(np.diag(r))
    if diag.min() < DEGENERATE_TOL:
        raise SingularFactor("triangular factor is numerically singular")
    z = (state.q_basis.T @ y) / state.m
    return solve_triangular(r, z, lower=False)
