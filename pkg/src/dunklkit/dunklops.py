"""Matrices of the Dunkl operators T_j and coordinate multiplications.

For Z2 in one dimension, T f(x) = f'(x) + kappa (f(x) - f(-x)) / x.  Acting on
the basis functions both terms are available in closed form (the reflection
difference vanishes on even functions and equals 2 f(x) / x on odd ones, with
the 1/x absorbed analytically), so matrix entries are assembled by exact
Gaussian quadrature.  Multi-dimensional matrices follow from the tensor
factorization of the box-truncated basis.
"""

from __future__ import annotations

import numpy as np

from .hermite import HermiteBasis, _norms_even, _norms_odd, laguerre_table

__all__ = [
    "dunkl_action_1d",
    "dunkl_operator_matrix",
    "position_operator_matrix",
    "hamiltonian_matrix",
]


def dunkl_action_1d(kappa: float, nmax: int, x: np.ndarray) -> np.ndarray:
    """Values of T phi_n at x for n = 0..nmax, shape (nmax + 1, len(x)).

    Uses (L_m^a)' = -L_{m-1}^{a+1} for the derivative part; the reflection
    part is 2 kappa L_m^{kappa+1/2}(x^2) e^{-x^2/2} on odd functions.
    """
    x = np.asarray(x, dtype=float)
    u = x * x
    gauss = np.exp(-0.5 * u)
    m_even = nmax // 2
    m_odd = max((nmax - 1) // 2, 0)
    la = laguerre_table(kappa - 0.5, m_even, u)
    dla = laguerre_table(kappa + 0.5, max(m_even - 1, 0), u)   # -(L^{a})' table
    lb = laguerre_table(kappa + 0.5, m_odd, u)
    dlb = laguerre_table(kappa + 1.5, max(m_odd - 1, 0), u)
    ce = _norms_even(kappa, m_even)
    co = _norms_odd(kappa, m_odd)
    out = np.empty((nmax + 1, x.size))
    for n in range(nmax + 1):
        m = n // 2
        sgn = (-1.0) ** m
        if n % 2 == 0:
            dl = -dla[m - 1] if m >= 1 else np.zeros_like(u)
            out[n] = sgn * ce[m] * (2.0 * x * dl - x * la[m]) * gauss
        else:
            dl = -dlb[m - 1] if m >= 1 else np.zeros_like(u)
            deriv = (lb[m] + 2.0 * u * dl - u * lb[m]) * gauss
            refl = 2.0 * kappa * lb[m] * gauss
            out[n] = sgn * co[m] * (deriv + refl)
    return out


def _matrix_1d(basis: HermiteBasis, j: int, action_values: np.ndarray) -> np.ndarray:
    """<A phi_n, phi_m> along dimension j by the per-dimension rule."""
    rule = basis.grid.rules[j]
    table = basis.dim_tables[j]
    return (table * rule.bare_weights) @ action_values.T


def _lift(basis: HermiteBasis, mat1d: np.ndarray, j: int) -> np.ndarray:
    """Lift a 1-D matrix acting on coordinate j to the tensor basis."""
    mi = basis.multi_indices
    out = mat1d[np.ix_(mi[:, j], mi[:, j])].astype(float).copy()
    for l in range(basis.structure.d):
        if l != j:
            out *= (mi[:, l][:, None] == mi[:, l][None, :])
    return out


def dunkl_operator_matrix(basis: HermiteBasis, j: int) -> np.ndarray:
    """Matrix of T_j in the orthonormal basis (1-based coordinate index)."""
    d = basis.structure.d
    if not 1 <= j <= d:
        raise ValueError(f"coordinate index {j} outside 1..{d}")
    jj = j - 1
    action = dunkl_action_1d(
        basis.structure.kappa[jj], basis.per_dim_degree, basis.grid.rules[jj].nodes
    )
    return _lift(basis, _matrix_1d(basis, jj, action), jj)


def position_operator_matrix(basis: HermiteBasis, j: int) -> np.ndarray:
    """Matrix of multiplication by x_j (1-based coordinate index)."""
    d = basis.structure.d
    if not 1 <= j <= d:
        raise ValueError(f"coordinate index {j} outside 1..{d}")
    jj = j - 1
    action = basis.dim_tables[jj] * basis.grid.rules[jj].nodes
    return _lift(basis, _matrix_1d(basis, jj, action), jj)


def hamiltonian_matrix(basis: HermiteBasis) -> np.ndarray:
    """-sum_j T_j^2 + multiplication by |x|^2, assembled from the pieces.

    Diagonal with entries 2|mu| + d + 2 gamma_kappa away from the truncation
    edge (columns with some mu_j equal to the top degree see edge pollution).
    """
    out = np.zeros((basis.size, basis.size))
    for j in range(1, basis.structure.d + 1):
        t = dunkl_operator_matrix(basis, j)
        x = position_operator_matrix(basis, j)
        out += -t @ t + x @ x
    return out
