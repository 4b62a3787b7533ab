"""Compact operators in the spectral basis: Schatten norms, densities,
the dual time-averaging functional, and mixed position-momentum operators.

Everything is dense: operators are square matrices A with entries
A_{mu nu} = <A phi_nu, phi_mu>_kappa in the truncated orthonormal basis, and
Schatten norms come from full SVDs.  The momentum operator is p = -iT (T the
Dunkl gradient); functions f(alpha x + beta p) are assembled by conjugating
the multiplication operator f(alpha x) with the free flow at time
beta / (2 alpha), or through the spectral rotation that swaps x and p when
alpha = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .freeprop import free_propagator_matrix
from .hermite import HermiteBasis, StateVector
from .quadrature import weighted_lp_norm

__all__ = [
    "OperatorMatrix",
    "OrthonormalSystem",
    "schatten_norm",
    "multiplication_matrix",
    "density",
    "evolved_density",
    "dual_functional",
    "mixed_xp_operator",
    "kss_check",
]


@dataclass
class OperatorMatrix:
    """Dense operator in the truncated basis; entries <A phi_nu, phi_mu>."""

    basis: HermiteBasis
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        n = self.basis.size
        if self.matrix.shape != (n, n):
            raise ValueError(f"expected a {n} x {n} matrix, got {self.matrix.shape}")

    @property
    def is_self_adjoint(self) -> bool:
        return bool(np.abs(self.matrix - self.matrix.conj().T).max() < 1e-12)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if other.basis is not self.basis:
            raise ValueError("operators live in different bases")
        return OperatorMatrix(self.basis, self.matrix @ other.matrix)


@dataclass
class OrthonormalSystem:
    """Orthonormal family f_j with occupation coefficients n_j."""

    vectors: list[StateVector]
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if len(self.vectors) != self.coeffs.size:
            raise ValueError(
                f"{len(self.vectors)} vectors but {self.coeffs.size} coefficients"
            )
        if self.vectors:
            c = self.coeff_matrix()
            gram = c.conj() @ c.T
            dev = np.abs(gram - np.eye(len(self.vectors))).max()
            if dev > 1e-10:
                raise ValueError(f"system is not orthonormal (Gram deviation {dev:.3e})")

    @property
    def basis(self) -> HermiteBasis:
        return self.vectors[0].basis

    def coeff_matrix(self) -> np.ndarray:
        """(J, M) matrix whose rows are the spectral coefficients of f_j."""
        return np.stack([v.coeffs for v in self.vectors])

    def operator(self) -> OperatorMatrix:
        """The operator sum_j n_j |f_j><f_j|."""
        c = self.coeff_matrix()
        return OperatorMatrix(self.basis, (c.T * self.coeffs) @ c.conj())


def schatten_norm(a, p) -> float:
    """Schatten p-norm (sum of sigma^p)^{1/p}; p = inf gives the largest
    singular value."""
    mat = a.matrix if isinstance(a, OperatorMatrix) else np.asarray(a)
    sigma = np.linalg.svd(mat, compute_uv=False)
    if np.isinf(p):
        return float(sigma[0]) if sigma.size else 0.0
    if p < 1:
        raise ValueError(f"Schatten exponent must be >= 1 or inf, got {p}")
    return float(np.sum(sigma**p) ** (1.0 / p))


def multiplication_matrix(basis: HermiteBasis, samples) -> np.ndarray:
    """Matrix of multiplication by V from its samples on the basis grid.

    Exact when V times two basis functions is integrated exactly by the grid
    rule, i.e. for polynomially-bounded V of modest degree.
    """
    samples = np.asarray(samples)
    if samples.shape != (basis.grid.npoints,):
        raise ValueError(
            f"expected {basis.grid.npoints} samples, got {samples.shape}"
        )
    weighted = basis.eval_table * (basis.grid.bare_weights * samples)
    return weighted @ basis.eval_table.T


def density(gamma: OperatorMatrix, points=None) -> np.ndarray:
    """Samples of rho_gamma(x) = sum_{mu nu} A_{mu nu} phi_mu(x) phi_nu(x).

    On the basis grid by default; real part returned (exact for self-adjoint
    gamma since the basis is real).
    """
    basis = gamma.basis
    table = basis.eval_table if points is None else basis.evaluate(points)
    return np.real(np.einsum("mk,mn,nk->k", table, gamma.matrix, table))


def evolved_density(gamma: OperatorMatrix, t: float, flow: str = "hermite", points=None):
    """Density of e^{-itP} gamma e^{itP} for P the oscillator or the
    Laplacian; the former is exact (diagonal phases), the latter goes through
    the lens-route propagator matrix."""
    basis = gamma.basis
    if flow == "hermite":
        phase = np.exp(-1j * t * basis.eigenvalues)
        conj = OperatorMatrix(basis, (phase[:, None] * gamma.matrix) * phase.conj()[None, :])
    elif flow == "laplacian":
        u_minus = free_propagator_matrix(basis, -t)
        u_plus = free_propagator_matrix(basis, t)
        conj = OperatorMatrix(basis, u_minus @ gamma.matrix @ u_plus)
    else:
        raise ValueError(f"unknown flow {flow!r}")
    return density(conj, points)


def dual_functional(
    basis: HermiteBasis,
    time_nodes,
    v_samples,
    qprime: float,
    flow: str = "hermite",
) -> float:
    """Schatten-2q' norm of B = integral over t of e^{itP} V(t,.) e^{-itP} dt.

    ``v_samples`` has shape (T, K): potential samples on the basis grid at
    each time node; the time integral is the supplied quadrature rule.
    """
    t, tau = (np.asarray(v, dtype=float) for v in time_nodes)
    v_samples = np.asarray(v_samples)
    if v_samples.shape != (t.size, basis.grid.npoints):
        raise ValueError(
            f"samples shape {v_samples.shape} does not match {t.size} x {basis.grid.npoints}"
        )
    if not np.all(np.isfinite(v_samples)):
        raise ValueError("non-finite potential samples")
    b = np.zeros((basis.size, basis.size), dtype=complex)
    for i in range(t.size):
        m = multiplication_matrix(basis, v_samples[i])
        if flow == "hermite":
            phase = np.exp(1j * t[i] * basis.eigenvalues)
            b += tau[i] * ((phase[:, None] * m) * phase.conj()[None, :])
        elif flow == "laplacian":
            b += tau[i] * (
                free_propagator_matrix(basis, t[i])
                @ m
                @ free_propagator_matrix(basis, -t[i])
            )
        else:
            raise ValueError(f"unknown flow {flow!r}")
    return schatten_norm(b, 2.0 * qprime)


def _momentum_rotation(basis: HermiteBasis) -> np.ndarray:
    """Diagonal of the spectral rotation sending x to p: phi_mu -> (-i)^{|mu|}.

    This is the Dunkl transform restricted to the basis; it conjugates
    multiplication by f(x) into f(p).
    """
    return (-1j) ** basis.multi_indices.sum(axis=1)


def mixed_xp_operator(basis: HermiteBasis, f, alpha: float, beta: float) -> OperatorMatrix:
    """Matrix of f(alpha x + beta p) with p = -iT, for a profile f on R^d.

    ``f`` maps point arrays (n, d) -- or flat arrays when d = 1 -- to values.
    beta = 0 is the plain multiplication operator; alpha = 0 routes through
    the x <-> p spectral rotation; otherwise the operator is the free-flow
    conjugate of f(alpha x) at time beta / (2 alpha).
    """
    if alpha == 0.0 and beta == 0.0:
        raise ValueError("alpha and beta cannot both vanish")
    if beta == 0.0:
        samples = np.asarray(f(alpha * basis.grid.nodes), dtype=complex)
        return OperatorMatrix(basis, multiplication_matrix(basis, samples))
    if alpha == 0.0:
        samples = np.asarray(f(beta * basis.grid.nodes), dtype=complex)
        m = multiplication_matrix(basis, samples)
        rot = _momentum_rotation(basis)
        return OperatorMatrix(basis, (rot.conj()[:, None] * m) * rot[None, :])
    tau = beta / (2.0 * alpha)
    samples = np.asarray(f(alpha * basis.grid.nodes), dtype=complex)
    m = multiplication_matrix(basis, samples)
    return OperatorMatrix(
        basis,
        free_propagator_matrix(basis, -tau) @ m @ free_propagator_matrix(basis, tau),
    )


def kss_check(basis, f, g, alpha, beta, gamma, delta, r):
    """Schatten-r norm of f(alpha x + beta p) g(gamma x + delta p) against the
    scaling bound M_kappa^{2/r} ||f||_r ||g||_r / |alpha delta - beta gamma|^{d_eff/r}.

    Returns (lhs, rhs); r = inf uses sup-norms on the grid and no determinant
    factor.
    """
    det = alpha * delta - beta * gamma
    if det == 0.0:
        raise ValueError("degenerate symplectic determinant")
    a = mixed_xp_operator(basis, f, alpha, beta)
    b = mixed_xp_operator(basis, g, gamma, delta)
    lhs = schatten_norm(a @ b, r)
    s = basis.structure
    grid = basis.grid
    fv = np.asarray(f(grid.nodes))
    gv = np.asarray(g(grid.nodes))
    if np.isinf(r):
        rhs = float(np.abs(fv).max() * np.abs(gv).max())
    else:
        rhs = (
            s.m_kappa ** (2.0 / r)
            * weighted_lp_norm(grid, fv, r)
            * weighted_lp_norm(grid, gv, r)
            / np.abs(det) ** (s.d_eff / r)
        )
    return lhs, rhs
