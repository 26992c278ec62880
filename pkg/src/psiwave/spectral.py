"""
Numerical checks of the perturbative prediction on the truncated operator.

Dense eigensolves, extraction of the eigenvalue pair bifurcating from the
resonant double eigenvalue, truncation convergence, and growth rates measured
by direct time integration.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .bloch import TruncatedOperator, assemble, index
from .errors import ConvergenceError, IsolationError, StabilityError
from .reduced import e_mu, lambda_pm, w_underline
from .resonance import DEFAULT_GAP_THRESHOLD, GapReport, gap_alpha
from .wavefield import FloquetPoint, PrimaryWave, as_mu

EPS_MAX = 0.05
# RK4 is stable on the imaginary axis for |dt lambda| < 2 sqrt(2)
RK4_IMAG_BOUND = 2.0 * math.sqrt(2.0)


def sort_lex(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return z[np.lexsort((z.imag, z.real))]


def eig_all(T) -> np.ndarray:
    """All eigenvalues of a truncated operator (or square matrix), sorted by (Re, Im)."""
    A = T.entries if isinstance(T, TruncatedOperator) else np.asarray(T, dtype=complex)
    if not np.all(np.isfinite(A)):
        raise ValueError("operator has non-finite entries")
    try:
        ev = scipy.linalg.eigvals(A, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(str(exc)) from exc
    if ev.shape[0] != A.shape[0] or not np.all(np.isfinite(ev)):
        raise ConvergenceError("eigensolver returned an incomplete spectrum")
    return sort_lex(ev)


def multiset_distance(a, b) -> float:
    """Largest distance under the optimal one-to-one matching of two multisets."""
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        return math.inf
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max())


def mirror_defect(ev) -> float:
    """Distance between the spectrum and its image under ``lambda -> -conj(lambda)``."""
    ev = np.asarray(ev, dtype=complex)
    return multiset_distance(ev, -ev.conj())


def spectrum_csv(ev, out=None) -> str:
    """``re,im`` dump, lexicographically sorted, 17 significant digits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["re", "im"])
    for z in sort_lex(ev):
        w.writerow([f"{z.real:.17g}", f"{z.imag:.17g}"])
    text = buf.getvalue()
    if out is not None:
        if hasattr(out, "write"):
            out.write(text)
        else:
            with open(out, "w", newline="") as fh:
                fh.write(text)
    return text


@dataclass(frozen=True)
class SpectrumReport:
    pw: PrimaryWave
    mu: FloquetPoint
    M: int
    eps: float
    eigenvalues: np.ndarray = field(repr=False)
    unstable_pair: tuple[complex, complex]
    max_re: float
    pred_max_re: float
    residual: float
    conv_gap: float
    e_value: float
    gap: GapReport

    def to_dict(self) -> dict:
        """Serializable form; the first eight keys are in the fixed report order."""
        return {
            "pw": {"m_hat": self.pw.m_hat, "n_hat": self.pw.n_hat, "N": self.pw.N},
            "mu": [float(self.mu[0]), float(self.mu[1])],
            "M": self.M,
            "eps": self.eps,
            "max_re": self.max_re,
            "pred_max_re": self.pred_max_re,
            "residual": self.residual,
            "conv_gap": self.conv_gap,
            "e_mu": self.e_value,
            "unstable_pair": [[z.real, z.imag] for z in self.unstable_pair],
            "gap": self.gap.to_dict(),
            "isolation_radius": self.gap.gap / 2,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _select_pair(ev, wu, gap):
    d = np.abs(ev - 1j * wu)
    near = np.count_nonzero(d < gap / 2)
    if near > 2:
        raise IsolationError(f"{near} eigenvalues within gap/2={gap / 2:.3e} of i*{wu}")
    idx = np.argsort(d, kind="stable")[:2]
    pair = sort_lex(ev[idx])
    return complex(pair[0]), complex(pair[1])


def pair_max_re(pw: PrimaryWave, mu, eps: float, M: int, gap: float | None = None) -> float:
    mu = as_mu(mu)
    if gap is None:
        gap = gap_alpha(pw, mu).gap
    ev = eig_all(assemble(pw, mu, M, eps))
    pair = _select_pair(ev, w_underline(pw, mu), gap)
    return max(pair[0].real, pair[1].real)


def unstable_pair(pw: PrimaryWave, mu, eps: float, M: int = 32, eps_max: float = EPS_MAX,
                  gap_threshold: float = DEFAULT_GAP_THRESHOLD,
                  check_convergence: bool = True) -> SpectrumReport:
    """Eigenvalue pair of the truncated operator nearest ``i w_`` and its comparison with ``eps sqrt(e)``.

    Parameters
    ----------
    pw : PrimaryWave
    mu : array_like
        Resonant Floquet parameter.
    eps : float
        Amplitude, at most ``eps_max``.
    M : int
        Harmonic cutoff; when ``check_convergence`` the pair is recomputed at
        ``2M`` and the change of ``max_re`` is reported as ``conv_gap``.

    Raises
    ------
    IsolationError
        More than two eigenvalues within ``gap/2`` of ``i w_``.
    """
    if eps > eps_max:
        raise ValueError(f"eps={eps} exceeds eps_max={eps_max}")
    mu = as_mu(mu)
    rep = gap_alpha(pw, mu, gap_threshold)
    wu = w_underline(pw, mu)
    ev = eig_all(assemble(pw, mu, M, eps))
    pair = _select_pair(ev, wu, rep.gap)
    max_re = max(pair[0].real, pair[1].real)
    pred = lambda_pm(pw, mu, eps)
    pred_max = pred.max_re
    conv = math.nan
    if check_convergence:
        conv = abs(max_re - pair_max_re(pw, mu, eps, 2 * M, rep.gap))
    return SpectrumReport(pw, FloquetPoint(*mu), M, eps, ev, pair, max_re, pred_max,
                          abs(max_re - pred_max), conv, pred.e_value, rep)


class HalvingStudy(NamedTuple):
    eps: tuple
    residuals: tuple
    ratios: tuple


def halving_study(pw: PrimaryWave, mu, eps_list=(4e-2, 2e-2, 1e-2), M: int = 32) -> HalvingStudy:
    """Residuals ``|max_re - eps sqrt(e)|`` and their successive ratios."""
    res = tuple(unstable_pair(pw, mu, e, M, check_convergence=False).residual for e in eps_list)
    ratios = tuple(res[i] / res[i + 1] if res[i + 1] > 0 else math.inf for i in range(len(res) - 1))
    return HalvingStudy(tuple(eps_list), res, ratios)


class ConvergenceRow(NamedTuple):
    M: int
    max_re: float
    delta: float


def convergence_study(pw: PrimaryWave, mu, eps: float, M_list=(8, 16, 32)) -> list[ConvergenceRow]:
    """``max_re`` of the pair per truncation and its change from the previous row."""
    M_list = list(M_list)
    if any(b <= a for a, b in zip(M_list, M_list[1:])):
        raise ValueError("M_list must be strictly increasing")
    gap = gap_alpha(pw, mu).gap
    rows, prev = [], None
    for M in M_list:
        r = pair_max_re(pw, mu, eps, M, gap)
        rows.append(ConvergenceRow(M, r, math.nan if prev is None else abs(r - prev)))
        prev = r
    return rows


# -- time integration -------------------------------------------------------

LCG_A = 6364136223846793005
LCG_C = 1442695040888963407
_MASK64 = (1 << 64) - 1


def lcg_uniform(seed: int, count: int) -> np.ndarray:
    """``count`` numbers in [-1, 1] from the 64-bit LCG.

    ``state <- (A state + C) mod 2^64`` starting from ``state = seed mod 2^64``;
    each draw advances once and maps the top 32 bits ``u`` to ``2 u / (2^32 - 1) - 1``.
    """
    s = seed & _MASK64
    out = np.empty(count)
    for i in range(count):
        s = (LCG_A * s + LCG_C) & _MASK64
        out[i] = 2.0 * (s >> 32) / 4294967295.0 - 1.0
    return out


def lcg_complex(seed: int, size: int) -> np.ndarray:
    """Complex vector; real then imaginary part per entry."""
    u = lcg_uniform(seed, 2 * size)
    return u[0::2] + 1j * u[1::2]


def energy_weights(pw: PrimaryWave, mu, M: int) -> np.ndarray:
    """Diagonal weights of the wave-energy norm ``|b|^2/N^2 + |omega|^2/|v|^2`` per harmonic."""
    mu = as_mu(mu)
    w = np.empty(2 * (2 * M + 1))
    for n in range(-M, M + 1):
        v = n * pw.k + mu
        i = index(M, n)
        w[i] = 1.0 / pw.N**2
        w[i + 1] = 1.0 / float(v @ v)
    return w


@dataclass(frozen=True)
class GrowthFit:
    rate: float
    fit_window: tuple[float, float]
    residual_rms: float
    seed: int
    flagged: bool = False
    n_steps: int = 0


def rk4_step_matrix(A: np.ndarray, dt: float) -> np.ndarray:
    """One classical RK4 step for ``h' = A h``, written as a matrix polynomial.

    For a linear autonomous system the four stages collapse to
    ``I + dtA + (dtA)^2/2 + (dtA)^3/6 + (dtA)^4/24``.
    """
    Z = dt * A
    I = np.eye(A.shape[0], dtype=complex)
    return I + Z @ (I + Z @ (I / 2 + Z @ (I / 6 + Z / 24)))


def growth_sim(pw: PrimaryWave, mu, eps: float, M: int, t_end: float, dt: float, seed: int,
               norm: str = "energy", fit_rms_max: float = 0.05) -> GrowthFit:
    """Measure the growth rate of ``h' = T h`` by RK4 integration.

    The initial data comes from :func:`lcg_complex`. ``log ||h||`` is sampled
    every step and its slope fitted by least squares over the last half of
    the span. ``norm="energy"`` uses :func:`energy_weights`, in which the
    unperturbed operator is skew-adjoint, so ``eps = 0`` gives rate ~ 0.

    Raises
    ------
    StabilityError
        If ``dt`` times the spectral radius reaches the RK4 bound ``2 sqrt(2)``.
    """
    if t_end <= 0 or dt <= 0:
        raise ValueError("t_end and dt must be positive")
    T = assemble(pw, mu, M, eps)
    A = T.entries
    rho = float(np.max(np.abs(eig_all(T))))
    if dt * rho >= RK4_IMAG_BOUND:
        raise StabilityError(f"dt*rho = {dt * rho:.3f} exceeds the RK4 bound {RK4_IMAG_BOUND:.3f}")
    if norm == "energy":
        wts = energy_weights(pw, mu, M)
    elif norm == "euclidean":
        wts = np.ones(A.shape[0])
    else:
        raise ValueError(f"unknown norm {norm!r}")
    S = rk4_step_matrix(A, dt)
    nsteps = int(round(t_end / dt))
    h = lcg_complex(seed, A.shape[0])
    logs = np.empty(nsteps + 1)
    acc = 0.0
    nrm = math.sqrt(float(np.sum(wts * np.abs(h) ** 2)))
    logs[0] = math.log(nrm)
    h = h / nrm
    acc = logs[0]
    for i in range(1, nsteps + 1):
        h = S @ h
        nrm = math.sqrt(float(np.sum(wts * np.abs(h) ** 2)))
        # renormalize every step and accumulate the log so nothing overflows
        acc += math.log(nrm)
        logs[i] = acc
        h = h / nrm
    t = dt * np.arange(nsteps + 1)
    i0 = nsteps // 2
    tt, ll = t[i0:], logs[i0:]
    coef = np.polyfit(tt, ll, 1)
    rms = float(np.sqrt(np.mean((ll - np.polyval(coef, tt)) ** 2)))
    return GrowthFit(float(coef[0]), (float(tt[0]), float(tt[-1])), rms, seed,
                     rms > fit_rms_max, nsteps)
