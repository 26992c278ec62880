"""
Entanglement coefficients and residues.

An entanglement coefficient is the inner product of one band of a jet applied
to an unperturbed eigenvector against another eigenvector:

    E_l^[kappa](j' <- j; s', s) = (J L_l^[kappa] f_j^s, f_j'^s')     (E kind)
    L_l^[kappa](j' <- j; s', s) = (  L_l^[kappa] f_j^s, f_j'^s')     (L kind)

``l`` is the jet order (0 or 1) and ``kappa = band * k``. Harmonics are
integers ``j`` meaning ``j k``. Order-one quantities are linear in ``eps``;
functions taking ``normalized=True`` return the value per unit ``eps``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import bloch
from .errors import AmbiguousContourError
from .resonance import gap_alpha
from .wavefield import (Mode, PrimaryWave, as_mu, d_coeff, eigvec_coeff, inner, j_block, norm_excess,
                        kperp_dot, omega, w_freq)


class Kind(enum.Enum):
    E = "E"  # with J
    L = "L"  # without J


@dataclass(frozen=True)
class EntCoefficient:
    kind: Kind
    ell: int
    band: int
    j_src: int
    j_dst: int
    sigma_src: int
    sigma_dst: int
    value: complex


def _jet_vector(pw, mu, ell, band, j_src, sigma_src, eps, dtype):
    f = eigvec_coeff(pw, mu, Mode(j_src, sigma_src), dtype)
    if ell == 0:
        return bloch.l0_block(pw, mu, j_src, dtype=dtype) @ f
    return bloch.l1_block(pw, mu, j_src, eps, dtype=dtype) @ f


def ent_coeff_bruteforce(pw: PrimaryWave, mu, kind, ell: int, band: int, j_dst: int, j_src: int,
                         sigma_dst: int, sigma_src: int, eps: float | None = None,
                         normalized: bool = False, dtype=np.clongdouble) -> complex:
    """Entanglement coefficient by explicit block application.

    ``L0`` acts through :func:`bloch.l0_block`, the bands of ``L1`` through
    :func:`bloch.l1_block`, and ``J`` on harmonic ``j`` as ``i (j m + mu1)``
    times the swap matrix. Mismatched band or parity gives exactly 0.

    The arithmetic runs in extended precision by default: several
    coefficients vanish along curves of the resonant set, and near those
    curves double precision loses the relative accuracy this oracle is
    compared at. The result is rounded to ``complex`` once at the end.
    """
    kind = Kind(kind) if not isinstance(kind, Kind) else kind
    if ell not in (0, 1):
        raise ValueError("jet order must be 0 or 1")
    if j_dst - j_src != band or abs(band) != ell:
        return 0j
    if eps is None:
        eps = pw.epsilon
    if normalized:
        eps = 1.0
    mu = as_mu(mu)
    g = _jet_vector(pw, mu, ell, band, j_src, sigma_src, eps, dtype)
    if kind is Kind.E:
        g = j_block(pw, mu, j_dst, dtype) @ g
    return inner(g, eigvec_coeff(pw, mu, Mode(j_dst, sigma_dst), dtype))


class Coefficient(enum.Enum):
    """The eight coefficients entering the reduced matrix.

    Naming: kind, jet order, band sign, destination <- source harmonic, then
    destination and source branch signs.
    """

    E1_MK_0K_MM = "E1[-k](0<-k;-,-)"
    E1_PK_K0_PP = "E1[k](k<-0;+,+)"
    L0_00_PM = "L0[0](0<-0;+,-)"
    L0_00_MP = "L0[0](0<-0;-,+)"
    L0_KK_PM = "L0[0](k<-k;+,-)"
    L0_KK_MP = "L0[0](k<-k;-,+)"
    L1_PK_K0_MP = "L1[k](k<-0;-,+)"
    L1_MK_0K_PM = "L1[-k](0<-k;+,-)"


# (kind, ell, band, j_dst, j_src, sigma_dst, sigma_src)
COEFFICIENT_ARGS = {
    Coefficient.E1_MK_0K_MM: (Kind.E, 1, -1, 0, 1, -1, -1),
    Coefficient.E1_PK_K0_PP: (Kind.E, 1, 1, 1, 0, 1, 1),
    Coefficient.L0_00_PM: (Kind.L, 0, 0, 0, 0, 1, -1),
    Coefficient.L0_00_MP: (Kind.L, 0, 0, 0, 0, -1, 1),
    Coefficient.L0_KK_PM: (Kind.L, 0, 0, 1, 1, 1, -1),
    Coefficient.L0_KK_MP: (Kind.L, 0, 0, 1, 1, -1, 1),
    Coefficient.L1_PK_K0_MP: (Kind.L, 1, 1, 1, 0, -1, 1),
    Coefficient.L1_MK_0K_PM: (Kind.L, 1, -1, 0, 1, 1, -1),
}


def _geometry(pw, mu):
    mu = as_mu(mu)
    a = float(np.hypot(*(pw.k + mu)))
    b = float(np.hypot(*mu))
    return mu, a, b, pw.k_norm, kperp_dot(pw, mu)


def cross_products(pw: PrimaryWave, mu) -> tuple[float, float]:
    """``(f_0^-, f_0^+) = (N^2 - |mu|^2)/2`` and ``(f_k^-, f_k^+) = (N^2 - |k+mu|^2)/2``."""
    _, a, b, _, _ = _geometry(pw, mu)
    N2 = pw.N**2
    return (N2 - b * b) / 2, (N2 - a * a) / 2


def closed_form(pw: PrimaryWave, mu, which: Coefficient, eps: float | None = None,
                normalized: bool = False) -> complex:
    """Closed-form value of one of the eight coefficients (see :class:`Coefficient`)."""
    which = Coefficient(which) if not isinstance(which, Coefficient) else which
    if eps is None:
        eps = pw.epsilon
    if normalized:
        eps = 1.0
    mu, a, b, K, kp = _geometry(pw, mu)
    N, m = pw.N, pw.m_hat
    f0, fk = cross_products(pw, mu)
    amk = norm_excess(pw, mu)  # a - K
    if which is Coefficient.E1_MK_0K_MM:
        return complex(eps / 4 * kp * mu[0] * amk * (a + K + b) / (K * a))
    if which is Coefficient.E1_PK_K0_PP:
        return complex(eps / 4 * kp * (m + mu[0]) * (b + K) * (-b - amk) / (K * b))
    if which is Coefficient.L0_00_PM:
        return 1j * w_freq(pw, mu, Mode(0, -1)) * f0
    if which is Coefficient.L0_00_MP:
        return 1j * w_freq(pw, mu, Mode(0, 1)) * f0
    if which is Coefficient.L0_KK_PM:
        return 1j * w_freq(pw, mu, Mode(1, -1)) * fk
    if which is Coefficient.L0_KK_MP:
        return 1j * w_freq(pw, mu, Mode(1, 1)) * fk
    if which is Coefficient.L1_PK_K0_MP:
        return -0.25j * eps * kp * (K + b) * ((K - b) * a + N**2) / (K * b * N)
    if which is Coefficient.L1_MK_0K_PM:
        return 0.25j * eps * kp * amk * ((a + K) * b - N**2) / (K * a * N)
    raise ValueError(which)


def bruteforce(pw: PrimaryWave, mu, which: Coefficient, eps: float | None = None,
               normalized: bool = False) -> complex:
    """Brute-force value of one of the eight named coefficients."""
    args = COEFFICIENT_ARGS[Coefficient(which)]
    return ent_coeff_bruteforce(pw, mu, *args, eps=eps, normalized=normalized)


def residue_coeff(pw: PrimaryWave, mu, j: int, j1: int, sigma: int, sigma1: int,
                  gap: float | None = None) -> float:
    """Residue of ``-(1/2 pi) 1/((lam - i w_j^s)(lam - i w_j1^s1))`` around ``i w_0^+``.

    The contour is the circle of radius ``gap/2`` around ``w_0^+`` (in the
    frequency variable). With exactly one pole inside the result is
    ``1 / (w_outside - w_0^+)``; with both or neither inside it is 0.

    Raises
    ------
    AmbiguousContourError
        If a frequency lies within ``gap/4`` of the contour.
    """
    mu = as_mu(mu)
    if gap is None:
        gap = gap_alpha(pw, mu).gap
    wu = w_freq(pw, mu, Mode(0, 1))
    inside = []
    ws = (w_freq(pw, mu, Mode(j, sigma)), w_freq(pw, mu, Mode(j1, sigma1)))
    for w in ws:
        dist = abs(w - wu)
        if abs(dist - gap / 2) < gap / 4:
            raise AmbiguousContourError(
                f"frequency {w} is {dist:.3e} from the resonant value; contour radius {gap / 2:.3e}"
            )
        inside.append(dist < gap / 2)
    if inside[0] == inside[1]:
        return 0.0
    w_out = ws[1] if inside[0] else ws[0]
    return 1.0 / (w_out - wu)


def jet_action(pw: PrimaryWave, mu, ell: int, band: int, mode: Mode,
               eps: float | None = None) -> list[tuple[Mode, complex]]:
    """Expansion of ``L_l^[band k] f_j^s`` in the eigenbasis ``f_{j+band}^{+-}``.

    Uses ``L f = sum_s1 i s1 d_{j+band} E(j+band <- j; s1, s) f_{j+band}^s1``,
    which follows from the symplectic pairing. Zero coefficients are dropped.
    """
    if ell == 0:
        if band != 0:
            return []
        return [(mode, 1j * w_freq(pw, mu, mode))]
    if abs(band) != 1:
        return []
    jd = mode.n + band
    bloch._check_collision(pw, as_mu(mu), jd)
    d = d_coeff(pw, mu, jd)
    out = []
    for s1 in (1, -1):
        e = ent_coeff_bruteforce(pw, mu, Kind.E, 1, band, jd, mode.n, s1, mode.sigma, eps=eps)
        c = 1j * s1 * d * e
        if c != 0:
            out.append((Mode(jd, s1), c))
    return out


def synthesize(pw: PrimaryWave, mu, terms) -> dict[int, np.ndarray]:
    """Turn a list of ``(mode, coefficient)`` into coefficient vectors per harmonic."""
    out: dict[int, np.ndarray] = {}
    for mode, c in terms:
        out.setdefault(mode.n, np.zeros(2, dtype=complex))
        out[mode.n] = out[mode.n] + c * eigvec_coeff(pw, mu, mode)
    return out


def projected_jet_action(pw: PrimaryWave, mu, band: int, mode: Mode, eps: float | None = None,
                         gap: float | None = None) -> list[tuple[Mode, complex]]:
    """``P[L_1^[band k]] f_j^s`` expanded in the eigenbasis.

    ``P[A] = (1/2 pi i) oint R A R`` with ``R`` the resolvent of ``L0``. The
    coefficient on ``f_{j+band}^s1`` is ``-s1 d_{j+band} E(j+band <- j; s1, s) Res``.
    """
    if gap is None:
        gap = gap_alpha(pw, mu).gap
    jd = mode.n + band
    d = d_coeff(pw, mu, jd)
    out = []
    for s1 in (1, -1):
        r = residue_coeff(pw, mu, mode.n, jd, mode.sigma, s1, gap)
        if r == 0.0:
            continue
        e = ent_coeff_bruteforce(pw, mu, Kind.E, 1, band, jd, mode.n, s1, mode.sigma, eps=eps)
        out.append((Mode(jd, s1), -s1 * d * e * r))
    return out
