"""Weighted Gaussian quadrature for measures |x|^{2 kappa} e^{-x^2} dx.

A rule of order n is built from the generalized Gauss-Laguerre rule with
parameter alpha = kappa - 1/2 through u = x^2, giving 2n symmetric nodes and
exactness for even polynomials up to degree 4n - 2.  Tensor grids combine the
per-dimension rules; "bare" weights have the Gaussian divided back out so
integrals of functions against h_kappa^2 dx alone are available.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, roots_genlaguerre

from .structure import DunklStructure

__all__ = [
    "QuadratureRule1D",
    "TensorGrid",
    "build_rule",
    "plain_rule",
    "tensor_grid",
    "weighted_lp_norm",
    "mixed_norm",
    "time_grid",
]


@dataclass(frozen=True)
class QuadratureRule1D:
    """Nodes/weights for integration against |x|^{2 kappa} e^{-x^2} dx.

    ``weights`` absorb the full factor |x|^{2 kappa} e^{-x^2};
    ``bare_weights = weights * exp(nodes^2)`` target plain h^2 dx integrals
    of integrands that decay like a Gaussian.
    """

    kappa: float
    order: int
    nodes: np.ndarray
    weights: np.ndarray
    bare_weights: np.ndarray


def build_rule(kappa: float, n: int) -> QuadratureRule1D:
    """Order-n rule: 2n nodes in +/- pairs, exact for degree <= 4n - 2."""
    if kappa < 0:
        raise ValueError(f"kappa must be non-negative, got {kappa}")
    if n < 1:
        raise ValueError(f"order must be positive, got {n}")
    u, w = roots_genlaguerre(n, kappa - 0.5)
    if not np.all(np.isfinite(u)) or not np.all(np.isfinite(w)):
        raise ArithmeticError(f"Laguerre eigenproblem failed for kappa={kappa}, n={n}")
    r = np.sqrt(u)
    nodes = np.concatenate([-r[::-1], r])
    half = 0.5 * w
    weights = np.concatenate([half[::-1], half])
    # log-space product: weights ~ e^{-nodes^2} so the ratio is tame even when
    # exp(nodes^2) alone would overflow at high order.  Beyond n ~ 180 the
    # fringe weights underflow to exact zeros -- harmless for integrands with
    # Gaussian decay, whose samples vanish at those nodes anyway; the
    # eigenproblem itself fails (and raises above) near n ~ 400.
    with np.errstate(divide="ignore"):
        bare = np.exp(np.log(weights) + nodes**2)
    if not np.all(np.isfinite(bare)):
        raise ArithmeticError(
            f"weights overflow for kappa={kappa}, n={n}; reduce the order"
        )
    return QuadratureRule1D(float(kappa), int(n), nodes, weights, bare)


def plain_rule(kappa: float, n: int, sigma: float = 1.0):
    """Nodes/weights for integrals of f * |x|^{2 kappa} dx.

    Exact whenever f = polynomial * exp(-sigma x^2); pick sigma to match the
    decay of the integrand.  Returns (nodes, weights).
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    base = build_rule(kappa, n)
    scale = 1.0 / np.sqrt(sigma)
    return base.nodes * scale, base.bare_weights * sigma ** (-(kappa + 0.5))


@dataclass(frozen=True)
class TensorGrid:
    """Full tensor product of per-dimension rules over a DunklStructure."""

    structure: DunklStructure
    rules: tuple[QuadratureRule1D, ...]
    nodes: np.ndarray        # (K, d)
    weights: np.ndarray      # (K,), absorb h^2 * exp(-|x|^2)
    bare_weights: np.ndarray  # (K,), Gaussian divided out per dimension
    index: np.ndarray        # (K, d) per-dimension node indices

    @property
    def npoints(self) -> int:
        return self.nodes.shape[0]


def tensor_grid(s: DunklStructure, orders) -> TensorGrid:
    orders = [int(o) for o in np.atleast_1d(orders)]
    if len(orders) == 1:
        orders = orders * s.d
    if len(orders) != s.d:
        raise ValueError(f"need {s.d} orders, got {len(orders)}")
    rules = tuple(build_rule(k, n) for k, n in zip(s.kappa, orders))
    axes = [np.arange(2 * r.order) for r in rules]
    mesh = np.meshgrid(*axes, indexing="ij")
    index = np.stack([m.ravel() for m in mesh], axis=-1)
    nodes = np.stack([rules[j].nodes[index[:, j]] for j in range(s.d)], axis=-1)
    weights = np.prod(
        np.stack([rules[j].weights[index[:, j]] for j in range(s.d)], axis=-1), axis=-1
    )
    bare = np.prod(
        np.stack([rules[j].bare_weights[index[:, j]] for j in range(s.d)], axis=-1), axis=-1
    )
    return TensorGrid(s, rules, nodes, weights, bare, index)


def gaussian_moment(kappa: float, m: int) -> float:
    """Exact even moment: integral of x^{2m} |x|^{2 kappa} e^{-x^2} dx."""
    return float(np.exp(gammaln(m + kappa + 0.5)))


def weighted_lp_norm(grid: TensorGrid, samples, p) -> float:
    """L^p_kappa norm of f from its node samples (Gaussian NOT pre-applied).

    The samples are plain values f(x_k); accuracy requires f to decay like
    exp(-c |x|^2).  p = inf returns the max over nodes.
    """
    samples = np.asarray(samples)
    if samples.shape != (grid.npoints,):
        raise ValueError(f"expected {grid.npoints} samples, got {samples.shape}")
    if not np.all(np.isfinite(samples)):
        raise ValueError("non-finite samples")
    a = np.abs(samples)
    if np.isinf(p):
        return float(a.max())
    if p < 1:
        raise ValueError(f"p must be >= 1 or inf, got {p}")
    return float(np.sum(grid.bare_weights * a**p) ** (1.0 / p))


def mixed_norm(time_nodes, grid: TensorGrid, samples, p, q) -> float:
    """Mixed norm || ||F(t,.)||_{L^q_kappa} ||_{L^p_t}.

    ``time_nodes`` is a pair (t, tau) of node and weight arrays; ``samples``
    has shape (len(t), grid.npoints).
    """
    t, tau = (np.asarray(v, dtype=float) for v in time_nodes)
    samples = np.asarray(samples)
    if samples.shape != (t.size, grid.npoints):
        raise ValueError(f"samples shape {samples.shape} does not match {t.size} x {grid.npoints}")
    inner = np.array([weighted_lp_norm(grid, samples[i], q) for i in range(t.size)])
    if np.isinf(p):
        return float(inner.max())
    if p < 1:
        raise ValueError(f"p must be >= 1 or inf, got {p}")
    return float(np.sum(tau * inner**p) ** (1.0 / p))


def time_grid(a: float, b: float, n: int, kind: str = "trapezoid"):
    """Uniform time nodes and weights on [a, b]: (t, tau)."""
    if kind == "trapezoid":
        t = np.linspace(a, b, n)
        tau = np.full(n, (b - a) / (n - 1))
        tau[0] *= 0.5
        tau[-1] *= 0.5
    elif kind == "simpson":
        if n < 3 or n % 2 == 0:
            raise ValueError(f"composite Simpson needs an odd node count >= 3, got {n}")
        t = np.linspace(a, b, n)
        h = (b - a) / (n - 1)
        tau = np.full(n, 2.0 * h / 3.0)
        tau[1::2] = 4.0 * h / 3.0
        tau[0] = tau[-1] = h / 3.0
    elif kind == "midpoint":
        h = (b - a) / n
        t = a + h * (np.arange(n) + 0.5)
        tau = np.full(n, h)
    else:
        raise ValueError(f"unknown time grid kind {kind!r}")
    return t, tau
