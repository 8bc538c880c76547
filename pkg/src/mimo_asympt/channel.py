"""Kronecker-correlated MIMO channel ensemble.

Builds and validates the receive/transmit correlation matrices, and draws
channel realizations H = R^{1/2} G T^{1/2} with i.i.d. circularly-symmetric
complex Gaussian G (unit variance per complex entry, so that
E[H_ia conj(H_jb)] = R_ij T_ab when R and T have unit diagonals).

Randomness is counter-based: every (master_seed, trial_index) pair owns an
independent Philox stream, so sampling is reproducible under any execution
order or worker count.
"""

from dataclasses import dataclass, field
from functools import cached_property
import json

import numpy as np
from numpy.random import Generator, Philox
from scipy.linalg import toeplitz

__all__ = [
    "SystemConfig",
    "CorrelationPair",
    "ChannelSample",
    "build_exponential_correlation",
    "psd_sqrt",
    "sample_channel",
    "load_correlation_json",
    "save_correlation_json",
]

_MASK64 = (1 << 64) - 1
_HERMITICITY_TOL = 1e-12
_PSD_TOL = 1e-10


@dataclass(frozen=True)
class SystemConfig:
    """Antenna counts and transmit SNR for one scenario.

    M transmit and N receive antennas with N >= M (load factor
    beta = M/N <= 1), and linear transmit SNR rho = M*Es/N0 > 0.
    """

    M: int
    N: int
    rho: float

    def __post_init__(self):
        if not (isinstance(self.M, (int, np.integer)) and self.M >= 1):
            raise ValueError(f"M must be a positive integer, got {self.M!r}")
        if not (isinstance(self.N, (int, np.integer)) and self.N >= self.M):
            raise ValueError(f"need N >= M >= 1, got M={self.M}, N={self.N}")
        if not (np.isfinite(self.rho) and self.rho > 0):
            raise ValueError(f"rho must be positive and finite, got {self.rho!r}")

    @property
    def beta(self) -> float:
        return self.M / self.N


def _as_readonly_complex(a) -> np.ndarray:
    out = np.array(a, dtype=np.complex128, copy=True)
    out.setflags(write=False)
    return out


def _check_correlation(name: str, a: np.ndarray) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    herm = np.max(np.abs(a - a.conj().T))
    if herm > _HERMITICITY_TOL:
        raise ValueError(f"{name} not Hermitian: max |A - A^H| = {herm:.3e}")
    if np.max(np.abs(np.diag(a).imag)) > _HERMITICITY_TOL:
        raise ValueError(f"{name} has non-real diagonal entries")
    w_min = float(np.linalg.eigvalsh(a)[0])
    if w_min < -_PSD_TOL:
        raise ValueError(f"{name} not PSD: smallest eigenvalue {w_min:.3e}")


@dataclass(frozen=True)
class CorrelationPair:
    """Receive (N x N) and transmit (M x M) correlation matrices.

    Both must be Hermitian within 1e-12 and PSD within -1e-10 on the
    smallest eigenvalue. Matrices are stored read-only; derived factors
    (square roots, spectra) are cached on first use.
    """

    R: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "R", _as_readonly_complex(self.R))
        object.__setattr__(self, "T", _as_readonly_complex(self.T))
        _check_correlation("R", self.R)
        _check_correlation("T", self.T)

    @classmethod
    def identity(cls, n: int, m: int) -> "CorrelationPair":
        return cls(np.eye(n), np.eye(m))

    @property
    def n(self) -> int:
        return self.R.shape[0]

    @property
    def m(self) -> int:
        return self.T.shape[0]

    @cached_property
    def is_identity(self) -> bool:
        return bool(
            np.array_equal(self.R, np.eye(self.n)) and np.array_equal(self.T, np.eye(self.m))
        )

    @cached_property
    def r_sqrt(self) -> np.ndarray:
        return psd_sqrt(self.R)

    @cached_property
    def t_sqrt(self) -> np.ndarray:
        return psd_sqrt(self.T)

    @cached_property
    def r_eigvals(self) -> np.ndarray:
        return np.clip(np.linalg.eigvalsh(self.R), 0.0, None)

    @cached_property
    def t_eigvals(self) -> np.ndarray:
        return np.clip(np.linalg.eigvalsh(self.T), 0.0, None)


@dataclass(frozen=True)
class ChannelSample:
    """One channel realization together with the stream that produced it."""

    matrix: np.ndarray
    master_seed: int
    trial_index: int


def build_exponential_correlation(n: int, zeta: float) -> np.ndarray:
    """Exponential Toeplitz correlation matrix, entry (i, j) = zeta^|i-j|.

    Real symmetric with unit diagonal, PSD for 0 <= zeta < 1. zeta = 1 is
    rejected (rank-one degenerate limit, PSD margin not guaranteed in
    floating point).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not (0.0 <= zeta < 1.0):
        raise ValueError(f"zeta must lie in [0, 1), got {zeta!r}")
    return toeplitz(zeta ** np.arange(n)).astype(np.float64)


def psd_sqrt(a: np.ndarray) -> np.ndarray:
    """Hermitian PSD square root via eigendecomposition.

    Eigenvalues in [-1e-10, 0) are clipped to zero so that slightly
    rank-deficient correlation matrices survive; anything more negative
    raises ValueError.
    """
    a = np.asarray(a)
    w, u = np.linalg.eigh(a)
    if w[0] < -_PSD_TOL:
        raise ValueError(f"matrix not PSD: smallest eigenvalue {w[0]:.3e}")
    w = np.clip(w, 0.0, None)
    s = (u * np.sqrt(w)) @ u.conj().T
    # symmetrize away roundoff so the result is exactly Hermitian
    return 0.5 * (s + s.conj().T)


def _standard_complex_gaussian(master_seed: int, trial_index: int, n: int, m: int) -> np.ndarray:
    key = np.array([master_seed & _MASK64, trial_index & _MASK64], dtype=np.uint64)
    z = Generator(Philox(key=key)).standard_normal((2, n, m))
    return (z[0] + 1j * z[1]) * np.sqrt(0.5)


def _draw_channel(r_sqrt: np.ndarray, t_sqrt: np.ndarray,
                  master_seed: int, trial_index: int) -> np.ndarray:
    # The plain (non-conjugate) transpose on T^{1/2} makes the transmit
    # correlation come out as T_ab rather than its conjugate; for real T
    # the two coincide.
    g = _standard_complex_gaussian(master_seed, trial_index, r_sqrt.shape[0], t_sqrt.shape[0])
    return r_sqrt @ g @ t_sqrt.T


def sample_channel(pair: CorrelationPair, config: SystemConfig,
                   master_seed: int, trial_index: int) -> ChannelSample:
    """Draw H = R^{1/2} G T^{1/2} for the given (master_seed, trial_index).

    Pure function of its arguments: the same inputs always return a
    bit-identical matrix.
    """
    if pair.n != config.N or pair.m != config.M:
        raise ValueError(
            f"correlation pair is ({pair.n}, {pair.m}), config wants ({config.N}, {config.M})"
        )
    h = _draw_channel(pair.r_sqrt, pair.t_sqrt, master_seed, trial_index)
    return ChannelSample(matrix=h, master_seed=master_seed, trial_index=trial_index)


def save_correlation_json(path, matrix: np.ndarray) -> None:
    """Write a correlation matrix as {"n": ..., "entries": [[[re, im], ...], ...]}."""
    a = np.asarray(matrix, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    doc = {
        "n": int(a.shape[0]),
        "entries": [[[float(v.real), float(v.imag)] for v in row] for row in a],
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f)


def load_correlation_json(path) -> np.ndarray:
    """Read a matrix written by save_correlation_json. Raises ValueError on bad shape."""
    with open(path, "r", encoding="utf-8") as f:
        doc = json.load(f)
    if not isinstance(doc, dict) or "n" not in doc or "entries" not in doc:
        raise ValueError("correlation file must be an object with keys 'n' and 'entries'")
    n = doc["n"]
    rows = doc["entries"]
    if not isinstance(n, int) or n < 1 or len(rows) != n:
        raise ValueError(f"bad dimension: n={n!r} with {len(rows)} rows")
    out = np.empty((n, n), dtype=np.complex128)
    for i, row in enumerate(rows):
        if len(row) != n:
            raise ValueError(f"row {i} has {len(row)} entries, expected {n}")
        for j, entry in enumerate(row):
            if not (isinstance(entry, (list, tuple)) and len(entry) == 2):
                raise ValueError(f"entry ({i}, {j}) must be a [re, im] pair")
            out[i, j] = complex(entry[0], entry[1])
    return out
