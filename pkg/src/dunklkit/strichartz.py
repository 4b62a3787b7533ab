"""Orthonormal Strichartz functionals: mixed space-time norms of densities of
evolved orthonormal systems, the inhomogeneous (Duhamel) variant, and the
multilinear integral inequality with pairwise power weights.

The time side lives on (-pi, pi) for the oscillator flow; the free flow is
integrated over the whole line through the substitution v = tan 2t, which
maps it onto (-pi/4, pi/4) with an explicit power of s(t) = sec 2t -- the
power vanishes exactly on the scaling line 2/p + d_eff/q = d_eff.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as _iproduct

import numpy as np

from .hermite import HermiteBasis, StateVector, propagate_hermite
from .operators import OperatorMatrix, OrthonormalSystem, density, schatten_norm
from .quadrature import mixed_norm, time_grid, weighted_lp_norm

__all__ = [
    "ExponentPair",
    "StrichartzReport",
    "admissible_p",
    "generate_system",
    "strichartz_lhs",
    "schatten_rhs",
    "run_inequality",
    "inhomogeneous_check",
    "mhls_check",
]


def admissible_p(q: float, d_eff: float) -> float:
    """p on the scaling line 2/p + d_eff/q = d_eff; q = 1 gives p = inf."""
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    if q == 1.0:
        return np.inf
    return 2.0 * q / (d_eff * (q - 1.0))


@dataclass(frozen=True)
class ExponentPair:
    """Exponents on the scaling line, with the admissibility window flag."""

    q: float
    d_eff: float
    p: float = field(init=False)
    admissible: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "p", admissible_p(self.q, self.d_eff))
        window = (self.d_eff + 1.0) / (self.d_eff - 1.0) if self.d_eff > 1 else np.inf
        object.__setattr__(self, "admissible", bool(1.0 <= self.q < window))


@dataclass
class StrichartzReport:
    """One evaluation record: configuration echo plus lhs/rhs/ratio."""

    d: int
    kappa: tuple
    n_degree: int
    flow: str
    q: float
    p: float
    system_kind: str
    system_size: int
    seed: int
    lhs: float
    rhs: float
    ratio: float
    wall_time: float

    def as_dict(self) -> dict:
        return {
            "d": self.d,
            "kappa": " ".join(str(k) for k in self.kappa),
            "n_degree": self.n_degree,
            "flow": self.flow,
            "q": self.q,
            "p": self.p,
            "system_kind": self.system_kind,
            "system_size": self.system_size,
            "seed": self.seed,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "wall_time": self.wall_time,
        }


def generate_system(
    basis: HermiteBasis,
    kind: str,
    j_count: int,
    seed: int = 0,
    coeffs=None,
) -> OrthonormalSystem:
    """Deterministic orthonormal family of j_count states in the basis.

    kinds: ``basis_subset`` (the first j_count basis functions),
    ``haar_rotation`` (rows of a Haar-random unitary restricted to the
    lowest modes), ``gaussian_orthogonalized`` (QR of a complex Gaussian
    matrix over the full basis).
    """
    m = basis.size
    if j_count > m:
        raise ValueError(f"system size {j_count} exceeds basis dimension {m}")
    rng = np.random.default_rng(seed)
    if kind == "basis_subset":
        c = np.eye(j_count, m, dtype=complex)
    elif kind == "haar_rotation":
        # rotate within the lowest 2*j_count modes so states stay band-limited
        span = min(2 * j_count, m)
        z = rng.normal(size=(span, span)) + 1j * rng.normal(size=(span, span))
        qmat, r = np.linalg.qr(z)
        qmat *= np.sign(np.diag(r).real)
        c = np.zeros((j_count, m), dtype=complex)
        c[:, :span] = qmat[:j_count]
    elif kind == "gaussian_orthogonalized":
        z = rng.normal(size=(m, j_count)) + 1j * rng.normal(size=(m, j_count))
        qmat, r = np.linalg.qr(z)
        qmat *= np.sign(np.diag(r).real)
        c = qmat.T
    else:
        raise ValueError(f"unknown system kind {kind!r}")
    vectors = [StateVector(basis, row) for row in c]
    if coeffs is None:
        coeffs = np.ones(j_count)
    return OrthonormalSystem(vectors, coeffs)


def _density_samples(system: OrthonormalSystem, t: float) -> np.ndarray:
    """sum_j n_j |e^{-itH} f_j|^2 on the basis grid (real for real n_j)."""
    basis = system.basis
    phases = np.exp(-1j * t * basis.eigenvalues)
    vals = (system.coeff_matrix() * phases) @ basis.eval_table
    return (np.abs(vals) ** 2 * system.coeffs[:, None].real).sum(axis=0)


def strichartz_lhs(
    system: OrthonormalSystem,
    q: float,
    p: float,
    flow: str = "hermite",
    n_time: int = 256,
) -> float:
    """|| sum_j n_j |e^{-itP} f_j|^2 ||_{L^p_t L^q_kappa}.

    Oscillator flow: t over (-pi, pi).  Free flow: the whole-line integral
    transformed onto (-pi/4, pi/4), each slice carrying the factor
    s^{2/p + d_eff(1/q - 1)} with s = sec 2t (identically 1 on the scaling
    line).
    """
    basis = system.basis
    grid = basis.grid
    s = basis.structure
    if flow == "hermite":
        t, tau = time_grid(-np.pi, np.pi, n_time)
        samples = np.stack([_density_samples(system, tv) for tv in t])
        return mixed_norm((t, tau), grid, samples, p, q)
    if flow != "laplacian":
        raise ValueError(f"unknown flow {flow!r}")
    eps = 1e-9
    t, tau = time_grid(-np.pi / 4 + eps, np.pi / 4 - eps, n_time)
    sec2 = 1.0 / np.cos(2.0 * t)
    # s-power per slice; 1/p = 0 at p = inf
    inv_p = 0.0 if np.isinf(p) else 1.0 / p
    expo = 2.0 * inv_p + s.d_eff * (1.0 / q - 1.0)
    inner = np.array(
        [
            np.abs(sec2[i]) ** expo
            * weighted_lp_norm(grid, _density_samples(system, t[i]), q)
            for i in range(t.size)
        ]
    )
    if np.isinf(p):
        return float(inner.max())
    return float(np.sum(tau * inner**p) ** (1.0 / p))


def schatten_rhs(coeffs, q: float) -> float:
    """l^{2q/(q+1)} norm of the occupation coefficients."""
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    n = np.abs(np.asarray(coeffs, dtype=complex))
    r = 2.0 * q / (q + 1.0)
    return float(np.sum(n**r) ** (1.0 / r))


def run_inequality(
    basis: HermiteBasis,
    q: float,
    system_kind: str = "haar_rotation",
    j_count: int = 8,
    seed: int = 0,
    flow: str = "hermite",
    n_time: int = 256,
    coeffs=None,
) -> StrichartzReport:
    """Assemble a system, evaluate lhs and rhs, and report the ratio."""
    import time as _time

    start = _time.perf_counter()
    s = basis.structure
    pair = ExponentPair(q, s.d_eff)
    system = generate_system(basis, system_kind, j_count, seed, coeffs)
    lhs = strichartz_lhs(system, pair.q, pair.p, flow, n_time)
    rhs = schatten_rhs(system.coeffs, pair.q)
    return StrichartzReport(
        d=s.d,
        kappa=s.kappa,
        n_degree=basis.per_dim_degree,
        flow=flow,
        q=pair.q,
        p=pair.p,
        system_kind=system_kind,
        system_size=j_count,
        seed=seed,
        lhs=lhs,
        rhs=rhs,
        ratio=lhs / rhs if rhs > 0 else np.nan,
        wall_time=_time.perf_counter() - start,
    )


def duhamel_solution(
    basis: HermiteBasis,
    r_of_s,
    t0: float,
    t: float,
    n_time: int = 128,
) -> OperatorMatrix:
    """gamma(t) = integral_{t0}^t of e^{i(t-s)H} R(s) e^{-i(t-s)H} ds.

    ``r_of_s`` maps a time to an operator matrix (array).  The conjugation is
    by diagonal phases; the s-integral is a trapezoid rule.
    """
    if t == t0:
        return OperatorMatrix(basis, np.zeros((basis.size, basis.size)))
    if n_time % 2 == 0:
        n_time += 1
    sg, sw = time_grid(min(t0, t), max(t0, t), n_time, kind="simpson")
    sign = 1.0 if t >= t0 else -1.0
    lam = basis.eigenvalues
    dl = lam[:, None] - lam[None, :]
    out = np.zeros((basis.size, basis.size), dtype=complex)
    for sv, w in zip(sg, sw):
        out += sign * w * np.exp(1j * (t - sv) * dl) * np.asarray(r_of_s(sv), dtype=complex)
    return OperatorMatrix(basis, out)


def inhomogeneous_check(
    basis: HermiteBasis,
    r_of_s,
    t0: float,
    q: float,
    n_time: int = 96,
    n_source_time: int = 96,
):
    """(lhs, rhs) for the source-term density inequality.

    lhs: ||rho_{gamma(t)}||_{L^p_t L^q_kappa} over (-pi, pi) with gamma the
    Duhamel integral from t0.  rhs: Schatten-2q/(q+1) norm of
    integral of e^{isH} |R(s)| e^{-isH} ds over (-pi, pi).
    """
    s = basis.structure
    pair = ExponentPair(q, s.d_eff)
    grid = basis.grid
    t, tau = time_grid(-np.pi, np.pi, n_time)
    samples = np.empty((t.size, grid.npoints))
    for i, tv in enumerate(t):
        gam = duhamel_solution(basis, r_of_s, t0, tv, n_source_time)
        samples[i] = density(gam)
    lhs = mixed_norm((t, tau), grid, samples, pair.p, pair.q)

    lam = basis.eigenvalues
    acc = np.zeros((basis.size, basis.size), dtype=complex)
    for sv, w in zip(t, tau):
        r = np.asarray(r_of_s(sv), dtype=complex)
        if np.abs(r - r.conj().T).max() > 1e-10:
            raise ValueError("source operator is not self-adjoint")
        evals, evecs = np.linalg.eigh(r)
        rabs = (evecs * np.abs(evals)) @ evecs.conj().T
        phase = np.exp(1j * sv * lam)
        acc += w * ((phase[:, None] * rabs) * phase.conj()[None, :])
    rhs = schatten_norm(acc, 2.0 * q / (q + 1.0))
    return lhs, rhs


def mhls_check(profiles, supports, beta, r_exponents, n_base: int = 200):
    """(lhs, rhs) for the multilinear weighted integral inequality.

    lhs = integral over R^N of prod_k f_k(t_k) * prod_{i<j} |t_i - t_j|^{-beta_ij};
    rhs = prod_k ||f_k||_{r_k} (Lebesgue norms on the line).  Profiles are
    callables supported on the given intervals; integration uses per-axis
    midpoint grids of staggered parity so the weight singularities are never
    sampled.
    """
    n = len(profiles)
    if n not in (2, 3):
        raise ValueError(f"only 2 or 3 factors supported, got {n}")
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (n, n):
        raise ValueError(f"beta must be {n} x {n}, got {beta.shape}")
    if np.abs(beta - beta.T).max() > 0 or np.abs(np.diag(beta)).max() > 0:
        raise ValueError("beta must be symmetric with zero diagonal")
    if np.any(beta < 0) or np.any(beta >= 1.0):
        raise ValueError("off-diagonal beta entries must lie in [0, 1)")
    r_exponents = [float(r) for r in r_exponents]
    if any(r <= 1 for r in r_exponents):
        raise ValueError("integrability exponents must exceed 1")
    if sum(1.0 / r for r in r_exponents) <= 1.0:
        raise ValueError("sum of reciprocal exponents must exceed 1")
    col = beta.sum(axis=0)
    target = [2.0 * (r - 1.0) / r for r in r_exponents]
    if np.abs(col - np.asarray(target)).max() > 1e-12:
        raise ValueError(
            f"column sums of beta {col} must equal 2(r-1)/r = {target}"
        )

    nodes, weights, fvals = [], [], []
    for k, (f, (a, b)) in enumerate(zip(profiles, supports)):
        nk = n_base + k  # staggered parity avoids coincident midpoints
        t, tau = time_grid(a, b, nk, kind="midpoint")
        nodes.append(t)
        weights.append(tau)
        fvals.append(np.asarray(f(t), dtype=float))

    lhs = 0.0
    if n == 2:
        diff = np.abs(nodes[0][:, None] - nodes[1][None, :]) ** (-beta[0, 1])
        lhs = float(
            (weights[0] * fvals[0]) @ diff @ (weights[1] * fvals[1])
        )
    else:
        w01 = np.abs(nodes[0][:, None] - nodes[1][None, :]) ** (-beta[0, 1])
        for k2, (t2, w2, f2) in enumerate(zip(nodes[2], weights[2], fvals[2])):
            w02 = np.abs(nodes[0] - t2) ** (-beta[0, 2])
            w12 = np.abs(nodes[1] - t2) ** (-beta[1, 2])
            lhs += w2 * f2 * (
                (weights[0] * fvals[0] * w02) @ w01 @ (weights[1] * fvals[1] * w12)
            )
        lhs = float(lhs)
    rhs = 1.0
    for f, tau, vals, r in zip(profiles, weights, fvals, r_exponents):
        rhs *= float(np.sum(tau * np.abs(vals) ** r) ** (1.0 / r))
    return lhs, rhs
