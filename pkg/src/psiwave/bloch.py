"""
Truncated Floquet-Bloch operator on the lattice ``k Z``.

The operator linearized around the primary wave is exactly ``L0 + eps L1``:
``L0`` is a Fourier multiplier (block diagonal in the harmonic index) and
``L1`` couples harmonic ``n`` to ``n +- 1`` only. Harmonics ``|n| <= M`` are
kept, giving a ``2(2M+1)`` square matrix ordered harmonic-major, component
minor: index ``2 (n + M) + c`` with ``c = 0`` for buoyancy and ``c = 1`` for
vorticity.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import LatticeCollisionError
from .wavefield import FloquetPoint, PrimaryWave, as_mu, lattice_vectors, real_type


def _check_collision(pw, mu, n):
    v = n * pw.k + mu
    if v[0] == 0.0 and v[1] == 0.0:
        raise LatticeCollisionError(n)
    return v


def l0_block(pw: PrimaryWave, mu, n: int, dtype=complex) -> np.ndarray:
    """Fourier symbol of ``L0`` on harmonic ``n``.

    ``i [[c.v, -N^2 v1/|v|^2], [-v1, c.v]]`` with ``v = n k + mu``. Its
    eigenvalues are ``i w_n^+`` and ``i w_n^-``. ``dtype=np.clongdouble``
    evaluates in extended precision.
    """
    k, v, K, N = lattice_vectors(pw, mu, n, dtype)
    _check_collision(pw, as_mu(mu), n)
    cv = (N * pw.m_hat / K**3 * k) @ v
    v2 = v @ v
    return 1j * np.array([[cv, -N**2 * v[0] / v2], [-v[0], cv]], dtype=dtype)


def l1_block(pw: PrimaryWave, mu, q1: int, eps: float | None = None, dtype=complex) -> np.ndarray:
    """Block of ``eps L1`` mapping harmonic ``q1`` to either neighbour ``q1 +- 1``.

    The same block is used for both destinations. ``eps`` defaults to
    ``pw.epsilon``.
    """
    if eps is None:
        eps = pw.epsilon
    k, v, K, N = lattice_vectors(pw, mu, q1, dtype)
    _check_collision(pw, as_mu(mu), q1)
    v2 = v @ v
    mu = as_mu(mu).astype(real_type(dtype))
    kp = pw.n_hat * mu[0] - pw.m_hat * mu[1]
    a = -kp / (N * K)
    return 0.5 * eps * 1j * np.array(
        [[a, kp / v2], [0.0, a + K * kp / (N * v2)]], dtype=dtype
    )


def index(M: int, n: int, comp: int = 0) -> int:
    """Row/column of component ``comp`` of harmonic ``n``."""
    return 2 * (n + M) + comp


@dataclass(frozen=True)
class TruncatedOperator:
    """Dense matrix of the Bloch operator restricted to harmonics ``|n| <= M``."""

    pw: PrimaryWave
    mu: FloquetPoint
    M: int
    entries: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return 2 * (2 * self.M + 1)

    @property
    def harmonics(self) -> range:
        return range(-self.M, self.M + 1)

    def block(self, n_dst: int, n_src: int) -> np.ndarray:
        i, j = index(self.M, n_dst), index(self.M, n_src)
        return self.entries[i:i + 2, j:j + 2]

    def __add__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        return _replace(self, self.entries + other.entries)

    def __sub__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        return _replace(self, self.entries - other.entries)

    def adjoint(self) -> "TruncatedOperator":
        return _replace(self, self.entries.conj().T)


def _replace(T: TruncatedOperator, entries: np.ndarray) -> TruncatedOperator:
    entries = np.array(entries, dtype=complex)
    entries.flags.writeable = False
    return TruncatedOperator(T.pw, T.mu, T.M, entries)


def assemble(pw: PrimaryWave, mu, M: int, eps: float | None = None) -> TruncatedOperator:
    """Assemble ``L0 + eps L1`` on harmonics ``|n| <= M`` (hard cutoff).

    Raises
    ------
    LatticeCollisionError
        If ``n k + mu = 0`` for some ``|n| <= M``.
    """
    if int(M) != M or M < 0:
        raise ValueError(f"M must be a non-negative integer, got {M!r}")
    M = int(M)
    if eps is None:
        eps = pw.epsilon
    mu = as_mu(mu)
    D = 2 * (2 * M + 1)
    A = np.zeros((D, D), dtype=complex)
    for n in range(-M, M + 1):
        i = index(M, n)
        A[i:i + 2, i:i + 2] = l0_block(pw, mu, n)
        if eps == 0:
            continue
        B = l1_block(pw, mu, n, eps)
        for d in (-1, 1):
            if abs(n + d) <= M:
                j = index(M, n + d)
                A[j:j + 2, i:i + 2] = B
    A.flags.writeable = False
    return TruncatedOperator(pw, FloquetPoint(*mu), M, A)


def band_project(T: TruncatedOperator, band: int) -> TruncatedOperator:
    """Keep only the blocks mapping harmonic ``n`` to ``n + band``."""
    if abs(band) > 2 * T.M:
        raise ValueError(f"|band| must be <= 2M = {2 * T.M}")
    A = np.zeros_like(T.entries)
    for n in T.harmonics:
        if abs(n + band) <= T.M:
            i, j = index(T.M, n + band), index(T.M, n)
            A[i:i + 2, j:j + 2] = T.entries[i:i + 2, j:j + 2]
    return _replace(T, A)


def apply(T: TruncatedOperator, coeffs) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.shape[0] != T.size:
        raise ValueError(f"vector length {coeffs.shape[0]} does not match operator size {T.size}")
    return T.entries @ coeffs


def dump_csv(T: TruncatedOperator, out=None, nonzero_only: bool = False) -> str:
    """Write ``row,col,re,im`` in row-major order (17 significant digits, LF endings).

    Returns the CSV text; also writes it to ``out`` (path or text stream) if given.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", "col", "re", "im"])
    A = T.entries
    for i in range(A.shape[0]):
        for j in range(A.shape[1]):
            z = A[i, j]
            if nonzero_only and z == 0:
                continue
            w.writerow([i, j, f"{z.real:.17g}", f"{z.imag:.17g}"])
    text = buf.getvalue()
    if out is not None:
        if hasattr(out, "write"):
            out.write(text)
        else:
            with open(out, "w", newline="") as fh:
                fh.write(text)
    return text


def load_csv(path_or_text, size: int) -> np.ndarray:
    """Read a matrix dump back into a dense array (missing entries are zero)."""
    if "\n" in str(path_or_text):
        fh = io.StringIO(path_or_text)
    else:
        fh = open(path_or_text, newline="")
    with fh:
        A = np.zeros((size, size), dtype=complex)
        for row in csv.DictReader(fh):
            A[int(row["row"]), int(row["col"])] = complex(float(row["re"]), float(row["im"]))
    return A
