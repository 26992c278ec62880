"""
Primary internal gravity wave, dispersion relation and unperturbed eigenbasis.

The background is the plane wave with wavevector ``k = (m_hat, n_hat)`` in a
Boussinesq fluid with buoyancy frequency ``N``. Perturbations live on the
lattice ``n k + mu`` (harmonic index ``n``, Floquet parameter ``mu``) and every
harmonic carries a two-component coefficient ``(b, omega)``: buoyancy and
vorticity.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import SingularPointError


@dataclass(frozen=True)
class PrimaryWave:
    """Background plane wave.

    Parameters
    ----------
    m_hat, n_hat : int
        Components of the wavevector ``k``. Both must be positive.
    buoyancy_N : float
        Brunt-Vaisala frequency.
    epsilon : float
        Wave amplitude.
    """

    m_hat: int
    n_hat: int
    buoyancy_N: float = 1.0
    epsilon: float = 0.0

    def __post_init__(self):
        for name in ("m_hat", "n_hat"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if not self.buoyancy_N > 0:
            raise ValueError("buoyancy_N must be positive")
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be non-negative")

    @property
    def N(self) -> float:
        return float(self.buoyancy_N)

    @property
    def k(self) -> np.ndarray:
        return np.array([self.m_hat, self.n_hat], dtype=float)

    @property
    def k_norm(self) -> float:
        return float(np.hypot(self.m_hat, self.n_hat))

    @property
    def k_perp(self) -> np.ndarray:
        """``k_perp = (k2, -k1)`` so that ``k_perp . mu = n_hat mu1 - m_hat mu2``."""
        return np.array([self.n_hat, -self.m_hat], dtype=float)

    def with_epsilon(self, epsilon: float) -> "PrimaryWave":
        return PrimaryWave(self.m_hat, self.n_hat, self.buoyancy_N, epsilon)


class FloquetPoint(NamedTuple):
    """Floquet parameter ``mu = (mu1, mu2)``."""

    mu1: float
    mu2: float


@dataclass(frozen=True)
class Mode:
    """Unperturbed mode: harmonic ``n`` on the lattice ``k Z`` and branch ``sigma``."""

    n: int
    sigma: int

    def __post_init__(self):
        if self.sigma not in (1, -1):
            raise ValueError(f"sigma must be +1 or -1, got {self.sigma!r}")
        object.__setattr__(self, "n", int(self.n))


def as_mu(mu) -> np.ndarray:
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (2,):
        raise ValueError(f"Floquet parameter must have two components, got shape {mu.shape}")
    return mu


def kperp_dot(pw: PrimaryWave, mu) -> float:
    mu = as_mu(mu)
    return pw.n_hat * mu[0] - pw.m_hat * mu[1]


def norm_excess(pw: PrimaryWave, mu) -> float:
    """``|k+mu| - |k|`` written as ``(2 k.mu + |mu|^2) / (|k+mu| + |k|)`` to avoid cancellation."""
    mu = as_mu(mu)
    return float((2 * (pw.k @ mu) + mu @ mu) / (np.hypot(*(pw.k + mu)) + pw.k_norm))


def phase_speed(pw: PrimaryWave) -> np.ndarray:
    """Phase speed ``c = N m_hat |k|^-3 k`` of the primary wave."""
    return pw.N * pw.m_hat / pw.k_norm**3 * pw.k


def omega(v, N: float = 1.0) -> float:
    """Dispersion relation ``Omega(v) = N v1 / |v|`` with ``Omega(0) = 0``."""
    v1, v2 = float(v[0]), float(v[1])
    if v1 == 0.0 and v2 == 0.0:
        return 0.0
    return N * v1 / np.hypot(v1, v2)


def harmonic(pw: PrimaryWave, mu, n: int) -> np.ndarray:
    """The wavevector ``n k + mu``."""
    return n * pw.k + as_mu(mu)


def w_freq(pw: PrimaryWave, mu, mode: Mode) -> float:
    """Unperturbed frequency ``w = c.(nk+mu) + sigma Omega(nk+mu)``.

    The corresponding eigenvalue of the unperturbed Bloch operator is ``i w``.
    """
    v = harmonic(pw, mu, mode.n)
    return float(phase_speed(pw) @ v) + mode.sigma * omega(v, pw.N)


def real_type(dtype):
    """Real counterpart of a complex dtype; ``np.clongdouble`` selects extended precision."""
    return np.longdouble if np.dtype(dtype) == np.clongdouble else np.float64


def lattice_vectors(pw: PrimaryWave, mu, n: int, dtype=complex):
    """``(k, v = nk + mu, |k|, N)`` in the real type matching ``dtype``."""
    R = real_type(dtype)
    k = pw.k.astype(R)
    v = n * k + as_mu(mu).astype(R)
    return k, v, np.hypot(R(pw.m_hat), R(pw.n_hat)), R(pw.N)


def eigvec_coeff(pw: PrimaryWave, mu, mode: Mode, dtype=complex) -> np.ndarray:
    """Coefficients ``(N, -sigma |nk+mu|) / sqrt(2)`` of the eigenvector ``f_n^sigma``."""
    _, v, _, N = lattice_vectors(pw, mu, mode.n, dtype)
    R = real_type(dtype)
    return np.array([N, -mode.sigma * np.hypot(*v)], dtype=dtype) / np.sqrt(R(2))


def j_block(pw: PrimaryWave, mu, n: int, dtype=complex) -> np.ndarray:
    """Symplectic structure ``J(mu)`` on harmonic ``n``: ``i (n m_hat + mu1)`` times the swap."""
    _, v, _, _ = lattice_vectors(pw, mu, n, dtype)
    return 1j * v[0] * np.array([[0, 1], [1, 0]], dtype=dtype)


def inner(a, b) -> complex:
    """Inner product ``sum a_i conj(b_i)`` on coefficient vectors."""
    return complex(np.vdot(b, a))


def symplectic_pair(pw: PrimaryWave, mu, mode_a: Mode, mode_b: Mode) -> complex:
    """Pairing ``(J f_a, f_b)``, closed form.

    Distinct harmonics are orthogonal, and on one harmonic the two branches
    are J-orthogonal, so only the diagonal survives:
    ``(J f_n^sigma, f_n^sigma) = -i sigma |v|^2 Omega(v)`` with ``v = nk + mu``.
    """
    if mode_a != mode_b:
        return 0j
    v = harmonic(pw, mu, mode_a.n)
    return -1j * mode_a.sigma * float(v @ v) * omega(v, pw.N)


def symplectic_pair_direct(pw: PrimaryWave, mu, mode_a: Mode, mode_b: Mode) -> complex:
    """Same pairing evaluated by applying ``J`` to the coefficient vectors."""
    if mode_a.n != mode_b.n:
        return 0j
    g = j_block(pw, mu, mode_a.n) @ eigvec_coeff(pw, mu, mode_a)
    return inner(g, eigvec_coeff(pw, mu, mode_b))


def d_coeff(pw: PrimaryWave, mu, j) -> float:
    """``d = 1 / (|j+mu|^2 Omega(j+mu))`` for a lattice vector ``j``.

    ``j`` may be a 2-vector or an integer harmonic index (meaning ``j k``).
    """
    if np.ndim(j) == 0:
        v = harmonic(pw, mu, int(j))
    else:
        v = np.asarray(j, dtype=float) + as_mu(mu)
    if v[0] == 0.0:
        raise SingularPointError(f"Omega(j+mu) vanishes: (j+mu)_1 = 0 at j+mu={tuple(v)}")
    return 1.0 / (float(v @ v) * omega(v, pw.N))
