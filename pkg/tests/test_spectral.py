import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import resonant_samples
from psiwave import PrimaryWave, assemble, eig_all, solve_branch, w_freq
from psiwave.errors import IsolationError, StabilityError
from psiwave.reduced import e_mu, w_underline
from psiwave.spectral import (LCG_A, LCG_C, convergence_study, energy_weights, growth_sim,
                              halving_study, lcg_complex, lcg_uniform, mirror_defect,
                              multiset_distance, rk4_step_matrix, _select_pair, spectrum_csv, unstable_pair)
from psiwave.wavefield import Mode


class TestEigAll:
    def test_block_diagonal_at_zero_eps(self, pw):
        mu = (0.21, -0.4)
        M = 4
        ev = eig_all(assemble(pw, mu, M))
        ref = [1j * w_freq(pw, mu, Mode(n, s)) for n in range(-M, M + 1) for s in (1, -1)]
        assert multiset_distance(ev, ref) <= 1e-12

    def test_quadratic_roots(self, pw):
        T = assemble(pw, (0.3, 0.6), 0)
        A = T.entries
        tr, det = np.trace(A), np.linalg.det(A)
        disc = np.sqrt(tr * tr - 4 * det + 0j)
        assert multiset_distance(eig_all(T), [(tr + disc) / 2, (tr - disc) / 2]) <= 1e-14

    def test_lexicographic_order(self, pw):
        ev = eig_all(assemble(pw, solve_branch(pw, 1.0, "plus").mu, 6, 0.04))
        keys = list(zip(ev.real, ev.imag))
        assert keys == sorted(keys)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_random_imaginary_matrix_mirror(self, seed):
        rng = np.random.default_rng(seed)
        A = 1j * rng.standard_normal((6, 6))
        assert mirror_defect(eig_all(A)) <= 1e-10 * max(1.0, np.abs(A).max())

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            eig_all(np.array([[np.nan]]))


class TestMultiset:
    def test_matching(self):
        assert multiset_distance([1, 2j, 3], [3.1, 1, 2j]) == pytest.approx(0.1)
        assert multiset_distance([1], [1, 2]) == math.inf
        assert multiset_distance([], []) == 0.0


class TestUnstablePair:
    def test_double_eigenvalue_at_zero_eps(self, pw11, mu11):
        rep = unstable_pair(pw11, mu11, 0.0, M=16)
        wu = w_underline(pw11, mu11)
        assert all(abs(z - 1j * wu) <= 1e-12 for z in rep.unstable_pair)
        assert rep.max_re <= 1e-12 and rep.residual <= 1e-12
        # multiplicity exactly two within gap/4
        assert np.count_nonzero(np.abs(rep.eigenvalues - 1j * wu) < rep.gap.gap / 4) == 2

    def test_frozen_rates(self, pw11):
        for y, ref in ((0.3, 0.0033581), (1.0, 0.0048536)):
            rep = unstable_pair(pw11, solve_branch(pw11, y, "plus").mu, 0.02, M=32)
            assert rep.max_re == pytest.approx(ref, rel=1e-4)
            assert rep.conv_gap <= 1e-10

    def test_pair_is_mirror_symmetric(self, pw):
        mu = solve_branch(pw, 1.0, "plus").mu
        rep = unstable_pair(pw, mu, 0.03, M=16)
        a, b = rep.unstable_pair
        assert a.real == pytest.approx(-b.real, abs=1e-12)
        assert a.imag == pytest.approx(b.imag, abs=1e-10)
        assert rep.pred_max_re == pytest.approx(0.03 * math.sqrt(e_mu(pw, mu)))

    def test_rest_of_spectrum_on_axis(self, pw11, mu11):
        rep = unstable_pair(pw11, mu11, 0.02, M=16)
        off = sorted(np.abs(rep.eigenvalues.real))[::-1]
        assert off[0] > 1e-3 and off[1] > 1e-3 and off[2] <= 1e-8

    def test_isolation_error(self, pw11, mu11):
        # a gap far wider than the real one traps more than two eigenvalues
        ev = eig_all(assemble(pw11, mu11, 8, 0.01))
        with pytest.raises(IsolationError):
            _select_pair(ev, w_underline(pw11, mu11), 10.0)

    def test_eps_limit(self, pw11, mu11):
        with pytest.raises(ValueError):
            unstable_pair(pw11, mu11, 0.06)

    def test_json_key_order(self, pw11, mu11):
        d = unstable_pair(pw11, mu11, 0.01, M=8).to_dict()
        assert list(d)[:8] == ["pw", "mu", "M", "eps", "max_re", "pred_max_re", "residual", "conv_gap"]


class TestHalving:
    @pytest.mark.parametrize("y", [0.3, 1.0, 3.0])
    def test_residual_shrinks(self, pw11, y):
        st_ = halving_study(pw11, solve_branch(pw11, y, "plus").mu, M=16)
        for r0, r1 in zip(st_.residuals, st_.residuals[1:]):
            assert r1 <= 0.35 * r0


    def test_spectrum_even_in_eps(self, pw11, mu11):
        # a half-wavelength shift maps eps to -eps, so the real remainder is O(eps^3)
        a = eig_all(assemble(pw11, mu11, 12, 0.03))
        b = eig_all(assemble(pw11, mu11, 12, -0.03))
        assert multiset_distance(a, b) <= 1e-12

    def test_observed_order_is_cubic(self, pw11):
        st_ = halving_study(pw11, solve_branch(pw11, 3.0, "plus").mu, M=16)
        assert all(7.5 <= r <= 8.5 for r in st_.ratios)


class TestConvergence:
    def test_rows(self, pw11, mu11):
        rows = convergence_study(pw11, mu11, 0.01, (4, 8, 16))
        assert [r.M for r in rows] == [4, 8, 16]
        assert math.isnan(rows[0].delta)
        assert rows[2].delta <= max(rows[1].delta, 1e-13)

    def test_zero_eps(self, pw11, mu11):
        assert all(r.max_re == 0.0 or abs(r.max_re) <= 1e-13 for r in convergence_study(pw11, mu11, 0.0))

    def test_must_increase(self, pw11, mu11):
        with pytest.raises(ValueError):
            convergence_study(pw11, mu11, 0.01, (8, 8))


class TestSymmetries:
    def test_mu_reflection_conjugates(self, pw):
        for mu in resonant_samples(pw, 3, seed=17):
            a = eig_all(assemble(pw, mu, 6, 0.04))
            b = eig_all(assemble(pw, -mu, 6, 0.04))
            assert multiset_distance(a.conj(), b) <= 1e-8


class TestLCG:
    def test_first_draw(self):
        s = (LCG_A * 7 + LCG_C) % 2**64
        assert lcg_uniform(7, 1)[0] == 2 * (s >> 32) / (2**32 - 1) - 1

    def test_range_and_determinism(self):
        u = lcg_uniform(123, 1000)
        assert u.min() >= -1 and u.max() <= 1
        np.testing.assert_array_equal(u, lcg_uniform(123, 1000))
        assert not np.array_equal(u, lcg_uniform(124, 1000))

    def test_complex_interleave(self):
        u = lcg_uniform(5, 6)
        z = lcg_complex(5, 3)
        np.testing.assert_array_equal(z.real, u[0::2])
        np.testing.assert_array_equal(z.imag, u[1::2])


class TestGrowth:
    def test_rk4_step_matrix(self):
        rng = np.random.default_rng(0)
        A = 1j * rng.standard_normal((4, 4))
        h = rng.standard_normal(4) + 0j
        dt = 0.05
        k1 = A @ h
        k2 = A @ (h + dt / 2 * k1)
        k3 = A @ (h + dt / 2 * k2)
        k4 = A @ (h + dt * k3)
        ref = h + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        np.testing.assert_allclose(rk4_step_matrix(A, dt) @ h, ref, atol=1e-15)

    def test_energy_norm_skew(self, pw11, mu11):
        W = np.diag(energy_weights(pw11, mu11, 3))
        L0 = assemble(pw11, mu11, 3).entries
        assert np.abs(W @ L0 + L0.conj().T @ W).max() <= 1e-14

    def test_zero_eps(self, pw11, mu11):
        fit = growth_sim(pw11, mu11, 0.0, 4, 50.0, 0.02, seed=1)
        assert abs(fit.rate) <= 1e-6 and not fit.flagged

    def test_stability_guard(self, pw11, mu11):
        with pytest.raises(StabilityError):
            growth_sim(pw11, mu11, 0.01, 8, 10.0, 1.0, seed=1)

    def test_bad_arguments(self, pw11, mu11):
        with pytest.raises(ValueError):
            growth_sim(pw11, mu11, 0.01, 4, -1.0, 0.01, seed=1)
        with pytest.raises(ValueError):
            growth_sim(pw11, mu11, 0.01, 4, 1.0, 0.01, seed=1, norm="max")

    def test_rate_and_reproducibility(self, pw11, mu11):
        eps, M = 0.05, 6
        target = unstable_pair(pw11, mu11, eps, M=M, check_convergence=False).max_re
        a = growth_sim(pw11, mu11, eps, M, 15 / target, 0.02, seed=42)
        b = growth_sim(pw11, mu11, eps, M, 15 / target, 0.02, seed=42)
        assert a == b
        assert a.rate == pytest.approx(target, rel=0.05)
        assert a.fit_window[1] == pytest.approx(15 / target, rel=1e-3)
        c = growth_sim(pw11, mu11, eps, M, 30 / target, 0.02, seed=42)
        assert c.rate == pytest.approx(a.rate, rel=0.01)


class TestSpectrumCSV:
    def test_format(self):
        buf = io.StringIO()
        text = spectrum_csv([1j, -1 + 0.5j, -1 - 0.5j], buf)
        assert buf.getvalue() == text
        assert text.splitlines() == ["re,im", "-1,-0.5", "-1,0.5", "0,1"]
        assert text.endswith("\n") and "\r" not in text
