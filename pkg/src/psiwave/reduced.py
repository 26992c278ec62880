"""
Leading-order 2x2 reduction of the Bloch operator at a resonant Floquet parameter.

Near the double eigenvalue ``i w_ at resonance`` the perturbed operator restricted to
its two-dimensional spectral subspace is represented (to leading order) by

    [[ i w_,       i eps b0 ],
     [ i eps b1,   i w_     ]]

so the eigenvalues are ``i w_ +- eps sqrt(e)`` with ``e = -b1 b0``. Here
``w_ = c.mu + Omega(mu)``. Notation below: ``a = |k+mu|``, ``b = |mu|``,
``K = |k|`` and ``kp = k_perp . mu``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .entanglement import Coefficient, bruteforce, cross_products, residue_coeff
from .errors import ResonanceError
from .resonance import DEFAULT_TOL, branch_of, gap_alpha, solve_branch
from .wavefield import (FloquetPoint, Mode, PrimaryWave, as_mu, d_coeff, kperp_dot, norm_excess, omega,
                        phase_speed, w_freq)


def _geometry(pw, mu):
    mu = as_mu(mu)
    a = float(np.hypot(*(pw.k + mu)))
    b = float(np.hypot(*mu))
    return mu, a, b, pw.k_norm, kperp_dot(pw, mu)


def w_underline(pw: PrimaryWave, mu, resonance_tol: float = 1e-10) -> float:
    """Resonant frequency ``w_ = c.mu + Omega(mu)``.

    On the resonant set this equals ``c.(k+mu) - Omega(k+mu)``; a mismatch
    above ``10 resonance_tol N`` raises ``ResonanceError``.
    """
    mu = as_mu(mu)
    c = phase_speed(pw)
    w0 = float(c @ mu) + omega(mu, pw.N)
    w1 = float(c @ (pw.k + mu)) - omega(pw.k + mu, pw.N)
    if abs(w0 - w1) > 10 * resonance_tol * pw.N:
        raise ResonanceError(f"mu={tuple(mu)} is not resonant: w0-w1={w0 - w1:.3e}")
    return w0


def iota0(pw: PrimaryWave, mu) -> tuple[float, float]:
    """Squared norms ``(iota11, iota00) = ((N^2+|k+mu|^2)/2, (N^2+|mu|^2)/2)``."""
    _, a, b, _, _ = _geometry(pw, mu)
    N2 = pw.N**2
    return (N2 + a * a) / 2, (N2 + b * b) / 2


def beta_gamma_combos(pw: PrimaryWave, mu, resonance_tol: float = 1e-10) -> tuple[float, float]:
    """``(beta1 - gamma1 w_, beta0 - gamma1 w_)`` per unit ``eps``."""
    w_underline(pw, mu, resonance_tol)
    _, a, b, K, kp = _geometry(pw, mu)
    N = pw.N
    den = 8 * N * K * b * a
    c1 = kp * norm_excess(pw, mu) * (a + K - b) * (N**2 + b * b) / den
    c0 = -kp * (K + b) * (a + K - b) * (a * a + N**2) / den
    return c1, c0


class ResidueRoute(NamedTuple):
    """Per-``eps`` intermediate values of the residue calculus (not individually meaningful)."""

    gamma1: float
    beta1: float
    beta0: float
    w_underline: float

    @property
    def combos(self) -> tuple[float, float]:
        return (self.beta1 - self.gamma1 * self.w_underline,
                self.beta0 - self.gamma1 * self.w_underline)


def residue_route(pw: PrimaryWave, mu, gap: float | None = None) -> ResidueRoute:
    """Rebuild ``gamma1``, ``beta1``, ``beta0`` from brute-force coefficients and residues.

    This path never uses the closed forms; it is the oracle for
    :func:`beta_gamma_combos`.
    """
    mu = as_mu(mu)
    if gap is None:
        gap = gap_alpha(pw, mu).gap
    wu = w_underline(pw, mu)
    d0, dk = d_coeff(pw, mu, 0), d_coeff(pw, mu, 1)
    f0, fk = cross_products(pw, mu)

    def bf(c):
        return bruteforce(pw, mu, c, normalized=True)

    # residues Res(k,0;-,-) = 1/(w_0^- - w_) and Res(0,k;+,+) = 1/(w_k^+ - w_)
    r0 = residue_coeff(pw, mu, 1, 0, -1, -1, gap)
    rk = residue_coeff(pw, mu, 0, 1, 1, 1, gap)
    p0 = d0 * bf(Coefficient.E1_MK_0K_MM).real * r0
    pk = dk * bf(Coefficient.E1_PK_K0_PP).real * rk
    gamma1 = p0 * f0 - pk * fk
    ib1 = bf(Coefficient.L1_MK_0K_PM) + p0 * bf(Coefficient.L0_00_PM) - pk * bf(Coefficient.L0_KK_PM)
    ib0 = bf(Coefficient.L1_PK_K0_MP) - pk * bf(Coefficient.L0_KK_MP) + p0 * bf(Coefficient.L0_00_MP)
    return ResidueRoute(gamma1, (ib1 / 1j).real, (ib0 / 1j).real, wu)


def b_coeffs(pw: PrimaryWave, mu, resonance_tol: float = 1e-10) -> tuple[float, float]:
    """Off-diagonal entries ``(b1, b0)`` of the reduced matrix, closed form."""
    w_underline(pw, mu, resonance_tol)
    _, a, b, K, kp = _geometry(pw, mu)
    N = pw.N
    den = 4 * N * K * b * a
    b1 = kp * norm_excess(pw, mu) * (a + K - b) / den
    b0 = -kp * (K + b) * (a + K - b) / den
    return b1, b0


def b_coeffs_quotient(pw: PrimaryWave, mu) -> tuple[float, float]:
    """``(b1, b0)`` as ``combo / iota``: ``b1 = c1/iota00``, ``b0 = c0/iota11``."""
    c1, c0 = beta_gamma_combos(pw, mu)
    i11, i00 = iota0(pw, mu)
    return c1 / i00, c0 / i11


def e_mu(pw: PrimaryWave, mu, resonance_tol: float = 1e-10) -> float:
    """Growth function ``e(mu) = kp^2 (a-K)(K+b)(a+K-b)^2 / (16 N^2 b^2 a^2 K^2)``."""
    w_underline(pw, mu, resonance_tol)
    _, a, b, K, kp = _geometry(pw, mu)
    if kp == 0.0:
        return 0.0
    return kp**2 * norm_excess(pw, mu) * (K + b) * (a + K - b) ** 2 / (16 * pw.N**2 * b * b * a * a * K * K)


@dataclass(frozen=True)
class ReducedMatrix:
    lambda_plus: complex
    b0: float
    b1: float
    epsilon: float

    @property
    def e(self) -> float:
        return -self.b1 * self.b0

    def matrix(self) -> np.ndarray:
        lp, eps = self.lambda_plus, self.epsilon
        return np.array([[lp, 1j * eps * self.b0], [1j * eps * self.b1, lp]], dtype=complex)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.matrix())


def reduced_matrix(pw: PrimaryWave, mu, eps: float | None = None) -> ReducedMatrix:
    if eps is None:
        eps = pw.epsilon
    b1, b0 = b_coeffs(pw, mu)
    return ReducedMatrix(1j * w_underline(pw, mu), b0, b1, eps)


@dataclass(frozen=True)
class InstabilityPrediction:
    lambda_minus_pred: complex
    lambda_plus_pred: complex
    e_value: float
    stable_flag: bool

    @property
    def max_re(self) -> float:
        return max(self.lambda_plus_pred.real, self.lambda_minus_pred.real)


def lambda_pm(pw: PrimaryWave, mu, eps: float) -> InstabilityPrediction:
    """Leading-order perturbed eigenvalues ``i w_ +- eps sqrt(e)``."""
    wu = w_underline(pw, mu)
    e = e_mu(pw, mu)
    if e > 0:
        s = eps * math.sqrt(e)
        lp, lm = complex(s, wu), complex(-s, wu)
    else:
        s = eps * math.sqrt(-e)
        lp, lm = complex(0.0, wu + s), complex(0.0, wu - s)
    return InstabilityPrediction(lm, lp, float(e), bool(e <= 0))


def physics_I(pw: PrimaryWave, mu) -> tuple[float, float]:
    """Interaction coefficients ``(I_+, I_-)`` of the classical triad description."""
    mu, a, b, K, kp = _geometry(pw, mu)
    N, m = pw.N, pw.m_hat
    if kp == 0.0:
        return 0.0, 0.0
    Op = omega(pw.k + mu, N)
    Om = omega(mu, N)
    Ip = kp * (Op * (K * K - b * b) + (m + mu[0]) * N * (K - b)) / (2 * Op * a * a)
    Im = -kp * (Om * (K * K - a * a) + mu[0] * N * (K - a)) / (2 * Om * b * b)
    return Ip, Im


def e_from_I(pw: PrimaryWave, mu) -> float:
    """``e`` rebuilt from ``I_+ I_-``; valid for ``|mu| != |k|``."""
    _, a, b, K, _ = _geometry(pw, mu)
    Ip, Im = physics_I(pw, mu)
    return Ip * Im / (4 * pw.N**2 * K * K) * ((a + K - b) / (a + K + b)) ** 2 * (K + b) / (K - b)


def mu_of_tau(pw: PrimaryWave, tau: float, tol: float = DEFAULT_TOL) -> FloquetPoint:
    """Small-parameter curve ``(phi_+-(n_hat tau), n_hat tau)`` used by the ``e ~ tau`` law."""
    y = pw.n_hat * tau
    return solve_branch(pw, y, branch_of(y), tol).mu


def e_small_tau_slope(pw: PrimaryWave) -> float:
    """Limit of ``e(mu_of_tau(tau)) / tau`` as ``tau -> 0+``: ``m^2 n^2 / (4 N^2 |k|^2)``."""
    return pw.m_hat**2 * pw.n_hat**2 / (4 * pw.N**2 * pw.k_norm**2)


def e_large_limit(pw: PrimaryWave) -> float:
    """Limit of ``e`` along the plus branch as ``y -> inf``."""
    m, n = pw.m_hat, pw.n_hat
    s = math.sqrt(3 * m * m + 4 * n * n)
    return m * m * (n - s) ** 2 * (3 * m * m + 2 * n * n + n * s) ** 2 / (256 * pw.N**2 * pw.k_norm**6)


def resonant_frequencies(pw: PrimaryWave, mu) -> tuple[float, float]:
    """``(w_1^-, w_0^+)``: the two colliding frequencies."""
    return w_freq(pw, mu, Mode(1, -1)), w_freq(pw, mu, Mode(0, 1))
