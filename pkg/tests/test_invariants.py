import math

import numpy as np
import pytest

from mhs_scheme.experiments import sample_initial
from mhs_scheme.grid_ops import Grid
from mhs_scheme.invariants import constraint_functional, hamiltonian, linf_bound, report

G4 = Grid(1.0, 4)
U4 = np.array([1.0, 0.0, -1.0, 0.0])


class TestHamiltonian:
    def test_constant_is_zero(self):
        assert hamiltonian(np.full(9, 2.5), Grid(3.0, 9)) == 0

    def test_K4_sine(self):
        assert hamiltonian(U4, G4) == pytest.approx(8.0, rel=1e-15)
        # brute force
        dx = 0.25
        brute = 0.5 * sum(((U4[(k + 1) % 4] - U4[k]) / dx) ** 2 for k in range(4)) * dx
        assert brute == pytest.approx(8.0)

    def test_shift_invariance(self):
        g = Grid(2.0, 31)
        u = np.random.default_rng(5).standard_normal(31)
        assert hamiltonian(u + 17.0, g) == pytest.approx(hamiltonian(u, g), rel=1e-12)


class TestConstraint:
    def test_zero(self):
        assert constraint_functional(np.zeros(8), Grid(1, 8), 0.5) == 0

    @pytest.mark.parametrize("c,L", [(1.0, 1.0), (-0.3, 2.5), (4.0, 0.7)])
    def test_constant(self, c, L):
        g = Grid(L, 10)
        assert constraint_functional(np.full(10, c), g, 0.5) == pytest.approx(c * L, rel=1e-14)

    def test_rejects_zero_omega(self):
        with pytest.raises(ValueError):
            constraint_functional(np.zeros(4), G4, 0.0)

    def test_sampled_initial_data_second_order(self):
        Ks = [32, 64, 128]
        fd = [constraint_functional(sample_initial(0.01, Grid(1.0, K)), Grid(1.0, K), 0.5) for K in Ks]
        assert all(abs(b) < abs(a) for a, b in zip(fd, fd[1:]))
        slope = np.polyfit(np.log([1 / K for K in Ks]), np.log(np.abs(fd)), 1)[0]
        assert slope == pytest.approx(2.0, abs=0.05)
        # closed form: a^2 (K^2 sin^2(pi/K) - pi^2) with omega = 1/2, L = 1
        assert fd[0] == pytest.approx(1e-4 * (32**2 * math.sin(math.pi / 32) ** 2 - math.pi**2), rel=1e-9)
        assert fd[0] == pytest.approx(-3.166796754334577e-06, rel=1e-9)


class TestBound:
    def test_zero(self):
        assert linf_bound(0.0, 0.5, 1.0) == 0

    def test_reference_value(self):
        h = -((math.pi / 100) ** 2)
        assert linf_bound(h, 0.5, 1.0) == pytest.approx(math.sqrt(2) * math.pi / 100 + (math.pi / 100) ** 2)
        assert linf_bound(h, 0.5, 1.0) == pytest.approx(0.0454158, abs=1e-7)
        # the often quoted 0.045423 agrees only to about 1e-5
        assert linf_bound(h, 0.5, 1.0) == pytest.approx(0.045423, abs=1e-5)

    def test_even_in_sign(self):
        assert linf_bound(0.3, -0.5, 2.0) == linf_bound(-0.3, 0.5, 2.0)


class TestReport:
    def test_constant(self):
        rep = report(np.full(6, 0.4), Grid(2.0, 6), 0.5)
        assert rep.hd == 0 and rep.sup_ux == 0 and rep.sup_uxx == 0
        assert rep.fd == pytest.approx(0.8)
        assert rep.mean == pytest.approx(0.4)
        assert rep.sup_u == pytest.approx(0.4)

    def test_hd_matches_brute_force(self):
        g = Grid(1.0, 128)
        u = sample_initial(0.01, g)
        brute = 0.5 * sum(((u[(k + 1) % 128] - u[k]) / g.dx) ** 2 * g.dx for k in range(128))
        assert report(u, g, 0.5).hd == pytest.approx(brute, rel=1e-13)

    def test_sup_uxx_tends_to_analytic(self):
        a = 0.01
        g = Grid(1.0, 512)
        rep = report(sample_initial(a, g), g, 0.5)
        assert rep.sup_uxx == pytest.approx(a * (2 * math.pi) ** 2, rel=1e-2)
        assert rep.sup_ux == pytest.approx(a * 2 * math.pi, rel=1e-2)

    def test_rigorous_bound_from_poincare_wirtinger(self):
        # sqrt(2 L H_d) + |mean| bounds |u| for every grid function
        rng = np.random.default_rng(11)
        for K in (8, 64, 512):
            g = Grid(1.0, K)
            for _ in range(50):
                u = rng.standard_normal(K)
                rep = report(u, g, 0.5)
                assert rep.sup_u <= math.sqrt(2 * g.L * rep.hd) + abs(rep.mean) + 1e-12
