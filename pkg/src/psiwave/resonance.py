"""
Resonant set of Floquet parameters and the spectral-gap proxy.

The resonant set is where the unperturbed eigenvalues ``i w_1^-`` and
``i w_0^+`` collide, i.e. ``Omega(k) - Omega(k+mu) = Omega(mu)``. Dividing by
``N`` gives ``F(x, y) = 0`` with

    F(x, y) = (m+x)/|(m+x, n+y)| + x/|(x, y)| - m/|k|.

``F`` is non-decreasing in ``x`` (strictly, away from the two singular
ordinates), so each ordinate ``y`` carries at most one root. The positive
branch ``x = phi_+(y)`` lives in ``y > 0`` and the negative branch in ``y < 0``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import BracketError, DomainError, NoRootError, ResonanceError, SingularPointError
from .wavefield import FloquetPoint, Mode, PrimaryWave, as_mu, omega, w_freq

DEFAULT_TOL = 1e-12
DEFAULT_GAP_THRESHOLD = 1e-3


class Branch(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"

    @classmethod
    def parse(cls, s) -> "Branch":
        if isinstance(s, cls):
            return s
        return cls(str(s).lower())


@dataclass(frozen=True)
class ResonantPoint:
    mu: FloquetPoint
    branch: Branch
    y_param: float
    residual: float


@dataclass(frozen=True)
class GapReport:
    alpha_plus: float
    alpha_minus: float
    ell_cutoff: int
    worst_ell_plus: int
    worst_ell_minus: int
    near_exceptional: bool
    gap_threshold: float = DEFAULT_GAP_THRESHOLD

    @property
    def gap(self) -> float:
        return min(self.alpha_plus, self.alpha_minus)

    def to_dict(self) -> dict:
        return {
            "alpha_plus": self.alpha_plus,
            "alpha_minus": self.alpha_minus,
            "ell_cutoff": self.ell_cutoff,
            "worst_ell_plus": self.worst_ell_plus,
            "worst_ell_minus": self.worst_ell_minus,
            "near_exceptional": self.near_exceptional,
            "gap_threshold": self.gap_threshold,
        }


def residual_F(pw: PrimaryWave, x: float, y: float) -> float:
    """Resonance function ``F(x, y)``; zero exactly on the resonant set minus the origin."""
    m, n = pw.m_hat, pw.n_hat
    r1 = math.hypot(m + x, n + y)
    r0 = math.hypot(x, y)
    if r0 == 0.0 or r1 == 0.0:
        raise SingularPointError(f"F is singular at (x, y) = ({x}, {y})")
    return (m + x) / r1 + x / r0 - m / pw.k_norm


def dF_dx(pw: PrimaryWave, x: float, y: float) -> float:
    m, n = pw.m_hat, pw.n_hat
    r1 = math.hypot(m + x, n + y)
    r0 = math.hypot(x, y)
    return (n + y) ** 2 / r1**3 + y**2 / r0**3


def kink_regime(pw: PrimaryWave) -> bool:
    """True when ``n_hat^2 > 3 m_hat^2``: the minus branch has a corner at ``y = -n_hat``."""
    return pw.n_hat**2 > 3 * pw.m_hat**2


def small_y_coefficient(pw: PrimaryWave) -> float:
    """``phi_+(y) ~ C y^2`` as ``y -> 0+`` (and ``phi_- ~ -C y^2``), ``C = m n / |k|^3``."""
    return pw.m_hat * pw.n_hat / pw.k_norm**3


def large_y_slope(pw: PrimaryWave) -> float:
    return pw.m_hat / math.sqrt(3 * pw.m_hat**2 + 4 * pw.n_hat**2)


def large_y_intercept(pw: PrimaryWave) -> float:
    """Limit of ``phi_+(y) - slope * y`` as ``y -> +inf``."""
    return pw.n_hat * large_y_slope(pw) / 2 - pw.m_hat / 2


def large_y_line(pw: PrimaryWave, y: float) -> float:
    """Asymptotic line ``+-slope (n/2 + y) - m/2`` for the branch selected by ``sign(y)``."""
    s = large_y_slope(pw)
    if y >= 0:
        return s * (pw.n_hat / 2 + y) - pw.m_hat / 2
    return -s * (pw.n_hat / 2 + y) - pw.m_hat / 2


def kink_slope(pw: PrimaryWave) -> float:
    """Lipschitz constant ``a* = sqrt(4 m^2 / (n^2 - 3 m^2))`` of the minus-branch corner."""
    if not kink_regime(pw):
        raise DomainError(
            f"no kink for k=({pw.m_hat},{pw.n_hat}): requires n_hat^2 > 3 m_hat^2"
        )
    return math.sqrt(4 * pw.m_hat**2 / (pw.n_hat**2 - 3 * pw.m_hat**2))


def kink_expansion(pw: PrimaryWave, dy: float) -> float:
    """Predicted ``phi_-(-n_hat + dy) ~ -m_hat + a* |dy|`` near the corner."""
    return -pw.m_hat + kink_slope(pw) * abs(dy)


def predictor(pw: PrimaryWave, y: float) -> float:
    """Asymptotic initial guess for the branch root at ordinate ``y``."""
    if abs(y) < 1.0:
        c = small_y_coefficient(pw)
        return c * y * y if y > 0 else -c * y * y
    if y < 0 and kink_regime(pw) and abs(y + pw.n_hat) < 0.5:
        return kink_expansion(pw, y + pw.n_hat)
    return large_y_line(pw, y)


def _F_bisect(pw, x, y):
    # F at the jump x = -m on the ordinate y = -n is replaced by the one-sided limit
    try:
        return residual_F(pw, x, y)
    except SingularPointError:
        return residual_F(pw, math.nextafter(x, math.inf), y)


def _bracket(pw, y, x0):
    r = max(1.0, 0.5 * abs(x0))
    for _ in range(200):
        lo, hi = x0 - r, x0 + r
        flo, fhi = _F_bisect(pw, lo, y), _F_bisect(pw, hi, y)
        if flo <= 0.0 <= fhi:
            return lo, hi, flo, fhi
        r *= 2.0
    raise BracketError(f"no sign change of F(., {y}) around x={x0}")


def _solve_x(pw: PrimaryWave, y: float, tol: float) -> tuple[float, float]:
    if y == 0.0:
        raise DomainError("y = 0 is not on either branch")
    if y == -pw.n_hat and kink_regime(pw):
        raise NoRootError(f"F(x, {y}) has no root: kink ordinate y = -n_hat")
    lo, hi, flo, fhi = _bracket(pw, y, predictor(pw, y))
    if flo == 0.0:
        return lo, 0.0
    if fhi == 0.0:
        return hi, 0.0
    # bisection to width 1e-12 (or until the floats stop moving)
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = _F_bisect(pw, mid, y)
        if fm == 0.0:
            lo = hi = mid
            break
        if fm < 0.0:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    fx = abs(_F_bisect(pw, x, y))
    # Newton polish, accepted only if it improves the residual
    for _ in range(3):
        if fx == 0.0:
            break
        try:
            f = residual_F(pw, x, y)
            d = dF_dx(pw, x, y)
        except SingularPointError:
            break
        if d <= 0.0 or not math.isfinite(d):
            break
        xn = x - f / d
        try:
            fn = abs(residual_F(pw, xn, y))
        except SingularPointError:
            break
        if fn < fx:
            x, fx = xn, fn
        else:
            break
    return x, fx


def solve_branch(pw: PrimaryWave, y: float, branch, tol: float = DEFAULT_TOL) -> ResonantPoint:
    """Solve ``F(x, y) = 0`` on the requested branch.

    Parameters
    ----------
    pw : PrimaryWave
    y : float
        Ordinate; positive for the plus branch, negative for the minus branch.
    branch : Branch or {"plus", "minus"}
    tol : float
        Bound on ``|F|`` at the returned point.

    Returns
    -------
    ResonantPoint

    Raises
    ------
    NoRootError
        At the kink ordinate ``y = -n_hat`` when ``n_hat^2 > 3 m_hat^2``.
    BracketError
        If no sign change is found (should not happen: ``F`` is monotone in ``x``
        with limits of opposite sign).
    """
    branch = Branch.parse(branch)
    y = float(y)
    if branch is Branch.PLUS and not y > 0:
        raise DomainError(f"plus branch needs y > 0, got {y}")
    if branch is Branch.MINUS and not y < 0:
        raise DomainError(f"minus branch needs y < 0, got {y}")
    x, res = _solve_x(pw, y, tol)
    if res > tol:
        raise ResonanceError(f"root at y={y} only reached |F|={res:.3e} > tol={tol:.1e}")
    return ResonantPoint(FloquetPoint(x, y), branch, y, res)


def branch_of(y: float) -> Branch:
    return Branch.PLUS if y > 0 else Branch.MINUS


def param_mu_small(pw: PrimaryWave, tau: float, tau0: float = 0.5, tol: float = DEFAULT_TOL) -> FloquetPoint:
    """Small-``mu`` parametrization ``(phi_+-(tau), tau)``; ``tau = 0`` gives the origin."""
    if abs(tau) > tau0:
        raise DomainError(f"|tau| = {abs(tau)} exceeds tau0 = {tau0}")
    if tau == 0:
        return FloquetPoint(0.0, 0.0)
    return solve_branch(pw, tau, branch_of(tau), tol).mu


def param_mu_large(pw: PrimaryWave, y: float, y_min: float = 10.0, tol: float = DEFAULT_TOL) -> FloquetPoint:
    """Large-``|mu|`` point on the branch selected by ``sign(y)``."""
    if abs(y) < y_min:
        raise DomainError(f"|y| = {abs(y)} is below y_min = {y_min}")
    return solve_branch(pw, y, branch_of(y), tol).mu


def ell_cutoff(pw: PrimaryWave) -> int:
    """Smallest ``l0`` with ``(l0 - 1) Omega(k) > 3 N``.

    For ``|l| >= l0`` the gap obeys ``|w_l - w_0| >= |l-1| Omega(k) - 2N > N``,
    so only ``|l| < l0`` needs to be scanned.
    """
    Om_k = omega(pw.k, pw.N)
    l0 = math.floor(3 * pw.N / Om_k) + 2
    while (l0 - 2) * Om_k > 3 * pw.N:
        l0 -= 1
    return l0


def tail_bound(pw: PrimaryWave, l0: int) -> float:
    return (l0 - 1) * omega(pw.k, pw.N) - 2 * pw.N


def check_resonant(pw: PrimaryWave, mu, tol: float = 1e-9) -> float:
    """Return ``|F|`` at ``mu`` or raise ``ResonanceError`` when it exceeds ``tol``."""
    mu = as_mu(mu)
    try:
        r = abs(residual_F(pw, mu[0], mu[1]))
    except SingularPointError as exc:
        raise ResonanceError(str(exc)) from exc
    if r > tol:
        raise ResonanceError(f"mu={tuple(mu)} is off the resonant set: |F|={r:.3e}")
    return r


def gap_alpha(pw: PrimaryWave, mu, gap_threshold: float = DEFAULT_GAP_THRESHOLD, tol: float = 1e-9) -> GapReport:
    """Gap between the resonant frequency and the rest of the unperturbed spectrum.

    ``alpha_plus`` is the distance from ``w_0^+`` to ``w_l^+`` over ``l != 0`` and
    ``alpha_minus`` the distance from ``w_0^+`` to ``w_l^-`` over ``l != 1``. Both
    are scanned over ``|l| < l0`` and capped by the analytic tail bound.
    """
    check_resonant(pw, mu, tol)
    l0 = ell_cutoff(pw)
    tail = tail_bound(pw, l0)
    wu = w_freq(pw, mu, Mode(0, 1))
    ells = range(-l0 + 1, l0)
    dp = {l: abs(w_freq(pw, mu, Mode(l, 1)) - wu) for l in ells if l != 0}
    dm = {l: abs(w_freq(pw, mu, Mode(l, -1)) - wu) for l in ells if l != 1}
    lp = min(dp, key=dp.get)
    lm = min(dm, key=dm.get)
    ap, am = min(dp[lp], tail), min(dm[lm], tail)
    return GapReport(float(ap), float(am), l0, lp, lm, bool(min(ap, am) < gap_threshold), gap_threshold)
