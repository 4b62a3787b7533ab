"""Generalized (Dunkl) Hermite basis, Mehler kernel, and e^{-itH} machinery.

One-dimensional functions are built from Laguerre polynomials:

    phi_{2m}(x)   = (-1)^m sqrt(m! / Gamma(m + kappa + 1/2))
                    * L_m^{kappa - 1/2}(x^2) e^{-x^2/2}
    phi_{2m+1}(x) = (-1)^m sqrt(m! / Gamma(m + kappa + 3/2))
                    * x L_m^{kappa + 1/2}(x^2) e^{-x^2/2}

normalized in L^2 against |x|^{2 kappa} dx, sign fixed so phi_n(x) > 0 as
x -> +inf; d-dimensional functions are tensor products over a box truncation
mu_j <= N.  The n-th function satisfies H phi = (2n + 1 + 2 kappa) phi in one
dimension, hence eigenvalues 2|mu| + d + 2 gamma_kappa.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as _iproduct

import numpy as np
from scipy.special import gammaln

from .quadrature import TensorGrid, plain_rule
from .structure import DunklStructure, _kernel_product, as_point_list, as_points

__all__ = [
    "SingularTimeError",
    "HermiteBasis",
    "StateVector",
    "build_basis",
    "laguerre_table",
    "hermite_functions_1d",
    "mehler_closed_form",
    "kernel_Kit",
    "propagate_hermite",
    "propagate_by_kernel",
    "extension_operator",
    "fdh_transform",
]


class SingularTimeError(ValueError):
    """Kernel requested at t in (pi/2) Z, where (i sin 2t)^{-e} blows up."""

    def __init__(self, t: float, distance: float):
        self.t = t
        self.distance = distance
        super().__init__(
            f"kernel of e^(-itH) is singular at t={t!r} "
            f"(distance {distance:.3e} from the nearest multiple of pi/2)"
        )


def laguerre_table(alpha: float, mmax: int, u: np.ndarray) -> np.ndarray:
    """L_m^alpha(u) for m = 0..mmax via the three-term recurrence."""
    u = np.asarray(u, dtype=float)
    out = np.empty((mmax + 1,) + u.shape)
    out[0] = 1.0
    if mmax >= 1:
        out[1] = 1.0 + alpha - u
    for m in range(1, mmax):
        out[m + 1] = ((2 * m + 1 + alpha - u) * out[m] - (m + alpha) * out[m - 1]) / (m + 1)
    return out


def _norms_even(kappa: float, mmax: int) -> np.ndarray:
    m = np.arange(mmax + 1)
    return np.exp(0.5 * (gammaln(m + 1) - gammaln(m + kappa + 0.5)))


def _norms_odd(kappa: float, mmax: int) -> np.ndarray:
    m = np.arange(mmax + 1)
    return np.exp(0.5 * (gammaln(m + 1) - gammaln(m + kappa + 1.5)))


def hermite_functions_1d(kappa: float, nmax: int, x: np.ndarray) -> np.ndarray:
    """Table phi_n(x) for n = 0..nmax, shape (nmax + 1, len(x))."""
    x = np.asarray(x, dtype=float)
    u = x * x
    gauss = np.exp(-0.5 * u)
    m_even = nmax // 2
    m_odd = max((nmax - 1) // 2, 0)
    la = laguerre_table(kappa - 0.5, m_even, u)
    lb = laguerre_table(kappa + 0.5, m_odd, u)
    ce = _norms_even(kappa, m_even)
    co = _norms_odd(kappa, m_odd)
    sign = lambda m: (-1.0) ** m
    out = np.empty((nmax + 1, x.size))
    for n in range(nmax + 1):
        m = n // 2
        if n % 2 == 0:
            out[n] = sign(m) * ce[m] * la[m] * gauss
        else:
            out[n] = sign(m) * co[m] * x * lb[m] * gauss
    return out


def box_multi_indices(d: int, n: int) -> np.ndarray:
    """Box truncation mu_j <= n, ordered by total degree then lexicographic."""
    idx = sorted(_iproduct(range(n + 1), repeat=d), key=lambda mu: (sum(mu), mu))
    return np.asarray(idx, dtype=int)


@dataclass(frozen=True)
class HermiteBasis:
    """Truncated orthonormal generalized-Hermite basis with node tables."""

    structure: DunklStructure
    per_dim_degree: int
    grid: TensorGrid
    multi_indices: np.ndarray   # (M, d)
    eigenvalues: np.ndarray     # (M,) values 2|mu| + d + 2 gamma
    eval_table: np.ndarray      # (M, K) phi_mu at grid nodes
    dim_tables: tuple[np.ndarray, ...]  # per-dimension 1-D tables on rule nodes

    @property
    def size(self) -> int:
        return self.multi_indices.shape[0]

    def evaluate(self, points) -> np.ndarray:
        """phi_mu at arbitrary points, shape (M, npts)."""
        pts = as_point_list(self.structure, points)
        tables = [
            hermite_functions_1d(self.structure.kappa[j], self.per_dim_degree, pts[:, j])
            for j in range(self.structure.d)
        ]
        out = np.ones((self.size, pts.shape[0]))
        for j in range(self.structure.d):
            out *= tables[j][self.multi_indices[:, j]]
        return out

    def project(self, samples: np.ndarray) -> np.ndarray:
        """Coefficients of a function from grid samples by quadrature.

        Accurate for Gaussian-enveloped samples (decay ~ e^{-|x|^2/2}).
        """
        return (self.eval_table * self.grid.bare_weights) @ np.asarray(samples)

    def gram_matrix(self) -> np.ndarray:
        return (self.eval_table * self.grid.bare_weights) @ self.eval_table.T


def build_basis(s: DunklStructure, n_degree: int, grid: TensorGrid) -> HermiteBasis:
    for rule in grid.rules:
        if rule.order < n_degree + 1:
            raise ValueError(
                f"grid order {rule.order} too small for degree {n_degree}; need >= {n_degree + 1}"
            )
    mi = box_multi_indices(s.d, n_degree)
    eig = 2.0 * mi.sum(axis=1) + s.d_eff
    dim_tables = tuple(
        hermite_functions_1d(s.kappa[j], n_degree, grid.rules[j].nodes) for j in range(s.d)
    )
    table = np.ones((mi.shape[0], grid.npoints))
    for j in range(s.d):
        table *= dim_tables[j][np.ix_(mi[:, j], grid.index[:, j])]
    return HermiteBasis(s, int(n_degree), grid, mi, eig, table, dim_tables)


@dataclass
class StateVector:
    """Function in the truncated basis, represented by its coefficients."""

    basis: HermiteBasis
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.shape != (self.basis.size,):
            raise ValueError(f"expected {self.basis.size} coefficients, got {self.coeffs.shape}")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def values(self, points=None) -> np.ndarray:
        if points is None:
            return self.coeffs @ self.basis.eval_table
        return self.coeffs @ self.basis.evaluate(points)


def propagate_hermite(v: StateVector, t: float) -> StateVector:
    """Spectral e^{-itH} action: c_mu -> e^{-it lambda_mu} c_mu; any t."""
    return StateVector(v.basis, np.exp(-1j * t * v.basis.eigenvalues) * v.coeffs)


def _branch_power(base: np.ndarray | complex, expo: float) -> np.ndarray | complex:
    """Principal-branch complex power (numpy convention)."""
    return np.asarray(base, dtype=complex) ** expo


def mehler_closed_form(s: DunklStructure, w: complex, x, y):
    """Closed form of sum_mu phi_mu(x) phi_mu(y) w^{|mu|} for |w| < 1."""
    w = complex(w)
    if abs(w * w - 1.0) < 1e-14:
        raise ValueError(f"Mehler kernel undefined at w^2 = 1 (w={w!r})")
    x = as_points(s, x)
    y = as_points(s, y)
    e = 0.5 * s.d_eff
    r2 = (x * x).sum(axis=-1) + (y * y).sum(axis=-1)
    pref = 2.0**e * s.m_kappa * _branch_power(1.0 - w * w, -e)
    body = np.exp(-0.5 * ((1.0 + w * w) / (1.0 - w * w)) * r2)
    return pref * body * _kernel_product(s, 2.0 * w / (1.0 - w * w), x, y)


def singular_time_distance(t: float) -> float:
    half = np.pi / 2.0
    return float(abs(t - half * np.round(t / half)))


def kernel_Kit(s: DunklStructure, t: float, x, y):
    """Kernel of e^{-itH} for t outside (pi/2) Z (principal-branch power)."""
    dist = singular_time_distance(t)
    if dist < 1e-10:
        raise SingularTimeError(t, dist)
    x = as_points(s, x)
    y = as_points(s, y)
    e = 0.5 * s.d_eff
    sin2t = np.sin(2.0 * t)
    r2 = (x * x).sum(axis=-1) + (y * y).sum(axis=-1)
    pref = s.m_kappa * _branch_power(1j * sin2t, -e)
    body = np.exp(0.5j * (np.cos(2.0 * t) / sin2t) * r2)
    return pref * body * _kernel_product(s, 1.0 / (1j * sin2t), x, y)


def propagate_by_kernel(v: StateVector, t: float, eval_points, order_factor: int = 6):
    """e^{-itH} v at eval_points by quadrature against the Mehler-type kernel.

    Independent of the spectral path; accurate for band-limited v and t not
    too close to the singular set.  Integration uses a half-Gaussian-matched
    plain rule since the oscillatory kernel does not decay in y.
    """
    basis = v.basis
    s = basis.structure
    if s.d != 1:
        raise NotImplementedError("kernel-quadrature propagation implemented for d = 1")
    n = order_factor * (basis.per_dim_degree + 2)
    ynodes, yweights = plain_rule(s.kappa[0], n, sigma=0.5)
    fvals = v.values(ynodes)
    pts = np.asarray(eval_points, dtype=float)
    kern = kernel_Kit(s, t, pts[:, None], ynodes[None, :])
    return kern @ (yweights * fvals)


def extension_operator(basis: HermiteBasis, g: dict, t: float, x) -> np.ndarray | complex:
    """sum over (mu, nu) of g(mu, nu) phi_mu(x) e^{-i nu t}.

    ``g`` maps (mu tuple, nu) pairs to complex amplitudes; mu must lie inside
    the basis truncation.
    """
    pts = np.asarray(x, dtype=float)
    scalar = pts.ndim == 0 or (pts.ndim == 1 and basis.structure.d > 1)
    if basis.structure.d == 1:
        pts = np.atleast_1d(pts)
        scalar = pts.size == 1 and np.asarray(x).ndim == 0
    else:
        pts = pts.reshape(-1, basis.structure.d)
    table = basis.evaluate(pts)
    lookup = {tuple(mu): i for i, mu in enumerate(basis.multi_indices)}
    out = np.zeros(table.shape[1], dtype=complex)
    for (mu, nu), amp in g.items():
        mu = tuple(int(m) for m in np.atleast_1d(mu))
        if mu not in lookup:
            raise KeyError(f"multi-index {mu} outside the basis truncation")
        out += amp * table[lookup[mu]] * np.exp(-1j * nu * t)
    return complex(out[0]) if scalar else out


def fdh_transform(basis: HermiteBasis, time_nodes, samples, nu_values) -> np.ndarray:
    """Fourier-Hermite coefficients of F(t, x) on (-pi, pi) x R^d.

    f_hat(mu, nu) = integral of F(t, x) phi_mu(x) e^{i nu t} h^2 dx dt by the
    spatial grid rule and the supplied time rule; returns (M, len(nu_values)).
    """
    t, tau = (np.asarray(v, dtype=float) for v in time_nodes)
    samples = np.asarray(samples)
    if samples.shape != (t.size, basis.grid.npoints):
        raise ValueError(
            f"samples shape {samples.shape} does not match {t.size} x {basis.grid.npoints}"
        )
    nu_values = np.asarray(nu_values, dtype=float)
    spatial = samples @ (basis.eval_table * basis.grid.bare_weights).T  # (T, M)
    phases = np.exp(1j * np.outer(nu_values, t)) * tau  # (nnu, T)
    return (phases @ spatial).T  # (M, nnu)
