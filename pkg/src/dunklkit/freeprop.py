"""Heat/free-Schrodinger kernels and the lens route for e^{it Laplacian}.

The lens identity links the two propagators: with v = tan 2t,

    K_{i arctan(v)/2}(x, y)
        = (1 + v^2)^{(d + 2 gamma)/4} e^{-i v |x|^2 / 2} L_{i v/2}(x sqrt(1 + v^2), y),

so the free evolution at time v/2 is a dilation + quadratic phase of the
harmonic-oscillator evolution at time arctan(v)/2.  The free flow is realized
through this identity (exact in the truncated basis); direct kernel
quadrature is kept as an independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hermite import (
    HermiteBasis,
    StateVector,
    _branch_power,
    kernel_Kit,
    propagate_hermite,
)
from .quadrature import plain_rule, time_grid, weighted_lp_norm
from .structure import DunklStructure, _kernel_product, as_point_list, as_points

__all__ = [
    "LensMap",
    "heat_kernel",
    "kernel_Lit",
    "lens_relation_residual",
    "free_evolve_via_lens",
    "free_evolve_by_kernel",
    "free_propagator_matrix",
    "norm_transport_check",
]


@dataclass(frozen=True)
class LensMap:
    """Change of variables v = tan 2t between free and oscillator time."""

    v: float
    d_eff: float
    t_hermite: float = field(init=False)
    scale: float = field(init=False)
    amplitude: float = field(init=False)

    def __post_init__(self):
        if self.v <= 0:
            raise ValueError(f"lens parameter must be positive, got {self.v}")
        object.__setattr__(self, "t_hermite", 0.5 * np.arctan(self.v))
        object.__setattr__(self, "scale", float(np.sqrt(1.0 + self.v**2)))
        object.__setattr__(self, "amplitude", float((1.0 + self.v**2) ** (self.d_eff / 4.0)))

    @property
    def t_free(self) -> float:
        return 0.5 * self.v




def heat_kernel(s: DunklStructure, t: float, x, y):
    """Heat kernel of the Dunkl Laplacian; strictly positive for Z2^d."""
    if t <= 0:
        raise ValueError(f"heat kernel needs t > 0, got {t}")
    x = as_points(s, x)
    y = as_points(s, y)
    e = s.gamma_kappa + 0.5 * s.d
    r2 = (x * x).sum(axis=-1) + (y * y).sum(axis=-1)
    out = s.m_kappa * (2.0 * t) ** (-e) * np.exp(-r2 / (4.0 * t)) * _kernel_product(
        s, 1.0 / (2.0 * t), x, y
    )
    return np.real_if_close(out, tol=100)


def kernel_Lit(s: DunklStructure, t: float, x, y):
    """Kernel of e^{it Laplacian} for t != 0 (principal-branch power)."""
    if t == 0:
        raise ValueError("free Schrodinger kernel undefined at t = 0")
    x = as_points(s, x)
    y = as_points(s, y)
    e = s.gamma_kappa + 0.5 * s.d
    r2 = (x * x).sum(axis=-1) + (y * y).sum(axis=-1)
    pref = s.m_kappa * _branch_power(2j * t, -e)
    return pref * np.exp(1j * r2 / (4.0 * t)) * _kernel_product(s, 1.0 / (2j * t), x, y)


def lens_relation_residual(s: DunklStructure, v: float, x, y) -> float:
    """|K_{i arctan(v)/2}(x,y) - lens-transformed L_{iv/2}| (absolute)."""
    lens = LensMap(v, s.d_eff)
    x = np.asarray(x, dtype=float)
    lhs = kernel_Kit(s, lens.t_hermite, x, y)
    xp = as_points(s, x)
    phase = np.exp(-0.5j * lens.v * (xp * xp).sum(axis=-1))
    rhs = lens.amplitude * phase * kernel_Lit(s, lens.t_free, lens.scale * x, y)
    return np.abs(lhs - rhs)


def free_evolve_via_lens(v: float, u: StateVector, x_eval) -> np.ndarray:
    """(e^{i(v/2) Laplacian} u)(x_eval) through the lens identity."""
    s = u.basis.structure
    lens = LensMap(v, s.d_eff)
    pts = as_point_list(s, x_eval)
    evolved = propagate_hermite(u, lens.t_hermite)
    inner = evolved.values(pts / lens.scale)
    phase = np.exp(0.5j * lens.v / (1.0 + lens.v**2) * (pts * pts).sum(axis=-1))
    return inner * phase / lens.amplitude


def free_evolve_by_kernel(u: StateVector, t: float, x_eval, order_factor: int = 6):
    """(e^{it Laplacian} u)(x_eval) by direct quadrature against L_{it}.

    Independent oracle for the lens route; d = 1, moderate |t| only (the
    kernel does not decay in y, so a half-Gaussian-matched rule is used).
    """
    s = u.basis.structure
    if s.d != 1:
        raise NotImplementedError("kernel-quadrature free evolution implemented for d = 1")
    n = order_factor * (u.basis.per_dim_degree + 2)
    ynodes, yweights = plain_rule(s.kappa[0], n, sigma=0.5)
    fvals = u.values(ynodes)
    pts = np.asarray(x_eval, dtype=float)
    kern = kernel_Lit(s, t, pts[:, None], ynodes[None, :])
    return kern @ (yweights * fvals)


def free_propagator_matrix(basis: HermiteBasis, tau: float) -> np.ndarray:
    """Matrix of e^{i tau Laplacian} in the basis, via the lens route.

    Negative times follow by entrywise conjugation (the basis is real and the
    Laplacian commutes with complex conjugation).
    """
    if tau == 0.0:
        return np.eye(basis.size, dtype=complex)
    if tau < 0.0:
        return np.conj(free_propagator_matrix(basis, -tau))
    s = basis.structure
    lens = LensMap(2.0 * tau, s.d_eff)
    # Projection rule matched to the slowed Gaussian decay e^{-|x|^2 (1 + 1/s^2)/2}.
    sigma = 0.5 * (1.0 + 1.0 / lens.scale**2)
    order = 2 * (basis.per_dim_degree + 2)
    rules = [plain_rule(k, order, sigma=sigma) for k in s.kappa]
    if s.d == 1:
        nodes = rules[0][0][:, None]
        wts = rules[0][1]
    else:
        mesh = np.meshgrid(*[r[0] for r in rules], indexing="ij")
        nodes = np.stack([m.ravel() for m in mesh], axis=-1)
        wmesh = np.meshgrid(*[r[1] for r in rules], indexing="ij")
        wts = np.prod(np.stack([m.ravel() for m in wmesh], axis=-1), axis=-1)
    inner = basis.evaluate(nodes / lens.scale)  # (M, K)
    phase = np.exp(0.5j * lens.v / (1.0 + lens.v**2) * (nodes * nodes).sum(axis=-1))
    spect = np.exp(-1j * lens.t_hermite * basis.eigenvalues)
    evolved = (spect[:, None] * inner) * phase / lens.amplitude  # columns of e^{i tau Lap}
    outer = basis.evaluate(nodes) * wts
    return outer @ evolved.T


def norm_transport_check(u: StateVector, p: float, q: float, n_time: int = 256):
    """Two-route check of the time-norm identity between the two flows.

    lhs: integral over (0, pi/4) of || |e^{-itH} u|^2 ||_{L^q_kappa}^p dt via
    the spectral path.  rhs: the same quantity for the free flow over
    (0, inf), computed through the substitution v = tan 2t with the free-side
    norms evaluated on dilated grids.  Also returns the (-pi, pi) vs
    4 x (-pi/4, pi/4) window ratio for the oscillator side.
    """
    basis = u.basis
    s = basis.structure
    grid = basis.grid
    t, tau = time_grid(1e-9, np.pi / 4.0 - 1e-9, n_time)

    def phi_p(tv):
        dens = np.abs(propagate_hermite(u, tv).values()) ** 2
        return weighted_lp_norm(grid, dens, q) ** p

    lhs = float(np.sum(tau * np.array([phi_p(tv) for tv in t])))

    rhs = 0.0
    for tv, tw in zip(t, tau):
        v = np.tan(2.0 * tv)
        lens = LensMap(v, s.d_eff)
        # free-side density evaluated on the dilated grid x -> s x; the
        # L^q_kappa norm picks up the Jacobian scale^{d + 2 gamma}
        vals = free_evolve_via_lens(v, u, lens.scale * grid.nodes)
        dens = np.abs(vals) ** 2
        qnorm = (
            np.sum(grid.bare_weights * lens.scale ** s.d_eff * dens**q) ** (1.0 / q)
            if not np.isinf(q)
            else np.abs(dens).max()
        )
        jac = lens.scale**2  # dv/dt = 2(1 + v^2) combined with tau_free = v/2
        rhs += tw * jac * qnorm**p

    t4, tau4 = time_grid(-np.pi + 1e-9, np.pi - 1e-9, 4 * n_time)
    full = float(np.sum(tau4 * np.array([phi_p(tv) for tv in t4])))
    tq, tauq = time_grid(-np.pi / 4 + 1e-9, np.pi / 4 - 1e-9, n_time)
    quarter = float(np.sum(tauq * np.array([phi_p(tv) for tv in tq])))
    return lhs, float(rhs), full, 4.0 * quarter
