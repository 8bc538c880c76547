"""Exact finite-dimensional receiver quantities.

Per-stream MMSE SINRs, the MMSE mutual information sum, and the optimal
(log-det) mutual information, all in nats. The single-inverse SINR path is
the production one; the column-deletion form is kept as an independent
reference.
"""

import numpy as np
from scipy.linalg import cho_factor, cho_solve

__all__ = [
    "sinr_exact",
    "sinr_deflated",
    "sinr_trace_identity",
    "mutual_info_mmse",
    "mutual_info_optimal",
]


def _gram(h: np.ndarray, rho: float) -> np.ndarray:
    """I + (rho/M) H^H H, Hermitian positive definite."""
    h = np.asarray(h, dtype=np.complex128)
    m = h.shape[1]
    a = np.eye(m) + (rho / m) * (h.conj().T @ h)
    return 0.5 * (a + a.conj().T)


def sinr_exact(h: np.ndarray, rho: float) -> np.ndarray:
    """All M per-stream MMSE SINRs from one symmetric-definite solve.

    gamma_k = 1 / [(I + (rho/M) H^H H)^{-1}]_kk - 1. Entries are clipped at
    zero (they can round to -1e-16 for H = 0).
    """
    a = _gram(h, rho)
    c = cho_factor(a, lower=True)
    a_inv = cho_solve(c, np.eye(a.shape[0]))
    return np.maximum(1.0 / np.diagonal(a_inv).real - 1.0, 0.0)


def sinr_deflated(h: np.ndarray, rho: float) -> np.ndarray:
    """Reference SINRs via explicit column deletion.

    gamma_k = (rho/M) h_k^H (I + (rho/M) H_k H_k^H)^{-1} h_k with H_k the
    channel minus column k. One N x N solve per stream; kept as an
    independent check of sinr_exact.
    """
    h = np.asarray(h, dtype=np.complex128)
    n, m = h.shape
    out = np.empty(m)
    for k in range(m):
        hk = np.delete(h, k, axis=1)
        b = np.eye(n) + (rho / m) * (hk @ hk.conj().T)
        c = cho_factor(0.5 * (b + b.conj().T), lower=True)
        out[k] = (rho / m) * (h[:, k].conj() @ cho_solve(c, h[:, k])).real
    return out


def sinr_trace_identity(h: np.ndarray, rho: float, k: int) -> float:
    """SINR of stream k as Tr{[I + (rho/M) H J_k(0) H^H]^{-1} (rho/M) H d_k H^H}.

    J_k(0) zeroes column k, so the resolvent argument is the deflated Gram
    matrix; the trace collapses onto the quadratic form in h_k. Stream
    indices are 0-based.
    """
    h = np.asarray(h, dtype=np.complex128)
    n, m = h.shape
    if not (0 <= k < m):
        raise IndexError(f"stream index {k} out of range for M={m}")
    hk_col = h[:, k]
    b = np.eye(n) + (rho / m) * (h @ h.conj().T - np.outer(hk_col, hk_col.conj()))
    c = cho_factor(0.5 * (b + b.conj().T), lower=True)
    return float((rho / m) * (hk_col.conj() @ cho_solve(c, hk_col)).real)


def mutual_info_mmse(gammas: np.ndarray) -> float:
    """Sum of log(1 + gamma_k) over the parallel MMSE streams, in nats."""
    return float(np.log1p(np.asarray(gammas)).sum())


def mutual_info_optimal(h: np.ndarray, rho: float) -> float:
    """log det(I + (rho/M) H H^H) in nats, via Cholesky of the M x M Gram form."""
    a = _gram(h, rho)
    c, _ = cho_factor(a, lower=True)
    return float(2.0 * np.sum(np.log(np.diagonal(c).real)))
