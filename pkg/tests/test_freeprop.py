import numpy as np
import pytest

from dunklkit import (
    DunklStructure,
    LensMap,
    free_evolve_by_kernel,
    free_evolve_via_lens,
    free_propagator_matrix,
    heat_kernel,
    kernel_Lit,
    lens_relation_residual,
    norm_transport_check,
    propagate_hermite,
)
from dunklkit.quadrature import build_rule

from conftest import random_state


class TestHeatKernel:
    def test_classical_gauss_weierstrass(self):
        s = DunklStructure(1, (0.0,))
        t, x, y = 0.5, 1.0, 0.0
        expected = (4 * np.pi * t) ** -0.5 * np.exp(-((x - y) ** 2) / (4 * t))
        assert heat_kernel(s, t, x, y) == pytest.approx(expected, rel=1e-12)

    def test_positive_and_symmetric(self):
        s = DunklStructure(2, (0.5, 1.0))
        x = np.array([0.7, -0.4])
        y = np.array([-1.1, 0.3])
        a = heat_kernel(s, 0.3, x, y)
        b = heat_kernel(s, 0.3, y, x)
        assert a > 0
        assert a == pytest.approx(b, rel=1e-13)

    @pytest.mark.parametrize("kappa", [0.0, 0.5, 1.5])
    def test_mass_conservation(self, kappa):
        # integral of the kernel against h^2 dy equals 1 for every x, t
        s = DunklStructure(1, (kappa,))
        rule = build_rule(kappa, 60)
        t = 0.35
        # integrand decays like e^{-y^2/(4t)}: scale nodes to match the rule
        scale = np.sqrt(4 * t)
        y = rule.nodes * scale
        w = rule.bare_weights * scale ** (1 + 2 * kappa)
        for x in (0.0, 0.8, 2.0):
            mass = np.sum(w * heat_kernel(s, t, x, y))
            assert mass == pytest.approx(1.0, rel=1e-8), (kappa, x)

    def test_rejects_nonpositive_time(self):
        s = DunklStructure(1, (0.5,))
        with pytest.raises(ValueError):
            heat_kernel(s, 0.0, 0.1, 0.2)


class TestFreeKernel:
    def test_dispersive_magnitude(self):
        # |L_it(x, y)| = M_kappa (2t)^{-d_eff/2} |E(x/(2it), y)| with the
        # kernel factor bounded by 1
        s = DunklStructure(1, (0.7,))
        t = 0.4
        x = np.linspace(-3, 3, 13)
        k = kernel_Lit(s, t, x[:, None], x[None, :])
        bound = s.m_kappa * (2 * t) ** (-0.5 * s.d_eff)
        assert np.abs(k).max() <= bound * (1 + 1e-12)

    def test_time_reversal_is_conjugation(self):
        s = DunklStructure(1, (0.5,))
        a = kernel_Lit(s, 0.6, 0.9, -0.4)
        b = kernel_Lit(s, -0.6, 0.9, -0.4)
        assert a == pytest.approx(np.conj(b), rel=1e-13)

    def test_heat_continuation(self):
        # L at t = -i s equals the heat kernel at time s (principal branch)
        s = DunklStructure(1, (0.8,))
        sval = 0.45
        x, y = 0.7, -1.2
        analytic = kernel_Lit(s, -1j * sval, x, y)
        assert analytic == pytest.approx(heat_kernel(s, sval, x, y), rel=1e-12)

    def test_rejects_zero_time(self):
        with pytest.raises(ValueError):
            kernel_Lit(DunklStructure(1, (0.5,)), 0.0, 0.1, 0.2)


class TestLens:
    @pytest.mark.parametrize("v", [0.1, 0.5, 1.0, 2.0, 10.0])
    @pytest.mark.parametrize("dk", [(1, (0.0,)), (1, (0.5,)), (2, (1.0, 0.5))])
    def test_relation_residual(self, v, dk):
        s = DunklStructure(*dk)
        if s.d == 1:
            x = np.linspace(-2, 2, 5)[:, None]
            y = np.linspace(-2, 2, 5)[None, :]
            scale = s.m_kappa * abs(np.sin(2 * LensMap(v, s.d_eff).t_hermite)) ** (
                -0.5 * s.d_eff
            )
            res = lens_relation_residual(s, v, x[..., None], y[..., None])
        else:
            pts = np.stack(
                np.meshgrid(np.linspace(-1.5, 1.5, 5), np.linspace(-1.5, 1.5, 5)),
                axis=-1,
            ).reshape(-1, 2)
            scale = s.m_kappa * abs(np.sin(2 * LensMap(v, s.d_eff).t_hermite)) ** (
                -0.5 * s.d_eff
            )
            res = lens_relation_residual(s, v, pts, pts[::-1])
        assert np.max(res) / scale < 1e-10

    def test_small_v_limit(self):
        # v -> 0: scale -> 1, amplitude -> 1, t_hermite ~ v/2
        lens = LensMap(1e-3, 3.0)
        assert lens.scale == pytest.approx(1.0, abs=1e-6)
        assert lens.amplitude == pytest.approx(1.0, abs=1e-5)
        assert lens.t_hermite == pytest.approx(5e-4, rel=1e-6)

    def test_rejects_nonpositive_v(self):
        with pytest.raises(ValueError):
            LensMap(0.0, 3.0)


class TestFreeEvolution:
    @pytest.mark.parametrize("v", [0.3, 1.0])
    def test_lens_vs_kernel_quadrature(self, basis_1d_half, v):
        u = random_state(basis_1d_half, seed=7, band=16)
        x = np.linspace(-3, 3, 21)
        via_lens = free_evolve_via_lens(v, u, x[:, None])
        direct = free_evolve_by_kernel(u, v / 2.0, x, order_factor=10)
        np.testing.assert_allclose(via_lens, direct, atol=1e-10)

    def test_identity_limit(self, basis_1d_half):
        u = random_state(basis_1d_half, seed=8, band=16)
        x = np.linspace(-2, 2, 9)
        evolved = free_evolve_via_lens(1e-4, u, x[:, None])
        np.testing.assert_allclose(evolved, u.values(x[:, None]), atol=1e-3)

    def test_mass_conservation(self, basis_1d_half):
        # L^2_kappa norm preserved; evaluate on a dilated grid to capture the
        # spread support, with the Jacobian factor in the weights
        basis = basis_1d_half
        s = basis.structure
        u = random_state(basis, seed=9, band=16)
        v = 0.8
        lens = LensMap(v, s.d_eff)
        nodes = lens.scale * basis.grid.nodes
        vals = free_evolve_via_lens(v, u, nodes)
        mass = np.sum(
            basis.grid.bare_weights * lens.scale**s.d_eff * np.abs(vals) ** 2
        )
        assert mass == pytest.approx(1.0, rel=1e-8)

    def test_matrix_identity_and_conjugation(self, basis_1d_half):
        basis = basis_1d_half
        assert np.array_equal(
            free_propagator_matrix(basis, 0.0), np.eye(basis.size)
        )
        plus = free_propagator_matrix(basis, 0.3)
        minus = free_propagator_matrix(basis, -0.3)
        np.testing.assert_allclose(minus, np.conj(plus), atol=1e-14)

    def test_matrix_interior_unitarity(self, basis_1d_half):
        # columns well inside the truncation are orthonormal; the edge block
        # genuinely leaks (the free flow dilates degrees)
        basis = basis_1d_half
        umat = free_propagator_matrix(basis, 0.2)
        m = basis.size // 4
        gram = umat[:, :m].conj().T @ umat[:, :m]
        assert np.abs(gram - np.eye(m)).max() < 1e-6

    def test_matrix_matches_lens_on_states(self, basis_1d_half):
        basis = basis_1d_half
        u = random_state(basis, seed=10, band=12)
        tau = 0.15
        coeffs = free_propagator_matrix(basis, tau) @ u.coeffs
        x = np.linspace(-2.5, 2.5, 15)
        via_matrix = coeffs @ basis.evaluate(x[:, None])
        via_lens = free_evolve_via_lens(2 * tau, u, x[:, None])
        np.testing.assert_allclose(via_matrix, via_lens, atol=1e-5)


class TestNormTransport:
    @pytest.mark.parametrize("q", [1.5, 2.0, 3.0])
    def test_two_route_identity(self, basis_1d_half, q):
        s = basis_1d_half.structure
        p = 2.0 * q / (s.d_eff * (q - 1.0))
        u = random_state(basis_1d_half, seed=11, band=12)
        lhs, rhs, full, quarter4 = norm_transport_check(u, p, q, n_time=128)
        assert rhs == pytest.approx(lhs, rel=1e-6)
        assert quarter4 == pytest.approx(full, rel=1e-6)

    def test_ground_state(self, basis_1d_one):
        basis = basis_1d_one
        c = np.zeros(basis.size, dtype=complex)
        c[0] = 1.0
        from dunklkit import StateVector

        u = StateVector(basis, c)
        # scaling-line pair for d_eff = 3: q = 2, p = 4/3
        q = 2.0
        p = 2.0 * q / (basis.structure.d_eff * (q - 1.0))
        lhs, rhs, full, quarter4 = norm_transport_check(u, p, q, n_time=64)
        # |e^{-itH} phi_0| is t-independent: lhs = (pi/4) * ||phi_0^2||_q^p
        dens = np.abs(u.values()) ** 2
        from dunklkit import weighted_lp_norm

        expected = (np.pi / 4) * weighted_lp_norm(basis.grid, dens, q) ** p
        assert lhs == pytest.approx(expected, rel=1e-6)
        assert rhs == pytest.approx(lhs, rel=1e-6)

    def test_zero_state(self, basis_1d_half):
        basis = basis_1d_half
        from dunklkit import StateVector

        u = StateVector(basis, np.zeros(basis.size))
        lhs, rhs, full, quarter4 = norm_transport_check(u, 2.0, 2.0, n_time=16)
        assert lhs == 0.0 and rhs == 0.0
