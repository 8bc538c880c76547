"""Seeded, worker-count-invariant Monte Carlo engine.

Trials are split into fixed-size batches; each batch regenerates its
channels from the per-trial Philox streams and evaluates the exact receiver
quantities in stacked form. Batches may run on any number of threads: every
reduction is either exact (math.fsum over per-batch partial sums, collected
in batch order) or a deterministic function of arrays assembled in trial
order, so the resulting summary is bit-identical for any worker count.

Sample retention: the full sorted mutual-information vectors are kept up to
`retention_cap` trials (default 1e7). Beyond that only scalar batch sums are
held, and a second pass over the regenerated batches fills a fixed histogram
from which a 4096-point quantile sketch is taken; outage and KS evaluations
then read the sketch (resolution ~1/4096 on probabilities).
"""

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import ndtr

from .channel import CorrelationPair, SystemConfig, _draw_channel
from .gaussian import MutualInfoGaussian

__all__ = [
    "TrialBatchSpec",
    "EmpiricalSummary",
    "MonteCarloError",
    "run_trials",
    "empirical_outage",
    "ks_distance",
    "summary_to_json",
    "write_samples_csv",
]

_BATCH = 4096
_SKETCH_POINTS = 4096
_SKETCH_BINS = 1 << 20
_Z95 = 1.959963984540054


class MonteCarloError(RuntimeError):
    """Trial execution aborted; completed_trials counts finished batches."""

    def __init__(self, message: str, completed_trials: int):
        self.completed_trials = completed_trials
        super().__init__(f"{message} (completed {completed_trials} trials)")


@dataclass(frozen=True)
class TrialBatchSpec:
    config: SystemConfig
    pair: CorrelationPair
    n_trials: int
    master_seed: int

    def __post_init__(self):
        if self.n_trials < 1:
            raise ValueError(f"n_trials must be >= 1, got {self.n_trials}")
        if self.pair.n != self.config.N or self.pair.m != self.config.M:
            raise ValueError("correlation pair dimensions do not match config")


@dataclass(frozen=True)
class EmpiricalSummary:
    """Sample statistics of one Monte Carlo batch.

    mi_samples / opt_samples are sorted ascending (full samples, or the
    quantile sketch when is_sketch is set). SINR moments are per-stream:
    mean vector, covariance matrix (unbiased), and skewness vector.
    mi_var_se is a jackknife-over-blocks standard error of mi_var (None
    when unavailable).
    """

    mi_samples: np.ndarray
    opt_samples: np.ndarray
    sinr_mean: np.ndarray
    sinr_cov: np.ndarray
    sinr_skew: np.ndarray
    mi_mean: float
    mi_var: float
    mi_skewness: float
    opt_mean: float
    opt_var: float
    n_trials: int
    master_seed: int
    mi_var_se: Optional[float] = None
    is_sketch: bool = False


def _worker_count(requested=None) -> int:
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get("MIMO_ASYMPT_THREADS", "0")
    try:
        cap = int(env)
    except ValueError:
        cap = 0
    return cap if cap > 0 else (os.cpu_count() or 1)


def _batch_values(spec: TrialBatchSpec, lo: int, hi: int):
    """Exact per-trial quantities for trials [lo, hi): (gam, mi, opt)."""
    m, rho = spec.config.M, spec.config.rho
    n_rx = spec.config.N
    r_sqrt, t_sqrt = spec.pair.r_sqrt, spec.pair.t_sqrt
    h = np.empty((hi - lo, n_rx, m), dtype=np.complex128)
    for i in range(lo, hi):
        h[i - lo] = _draw_channel(r_sqrt, t_sqrt, spec.master_seed, i)
    a = np.eye(m) + (rho / m) * np.einsum("bni,bnj->bij", h.conj(), h)
    d = np.diagonal(np.linalg.inv(a), axis1=1, axis2=2).real
    gam = np.maximum(1.0 / d - 1.0, 0.0)
    mi = np.log1p(gam).sum(axis=1)
    opt = np.linalg.slogdet(a)[1]
    return gam, mi, opt


def _batch_stats(spec: TrialBatchSpec, lo: int, hi: int, keep_arrays: bool):
    gam, mi, opt = _batch_values(spec, lo, hi)
    stats = {
        "g1": gam.sum(axis=0),
        "g2": gam.T @ gam,
        "g3": (gam**3).sum(axis=0),
        "mi_s": (math.fsum(mi), math.fsum(mi**2), math.fsum(mi**3)),
        "opt_s": (math.fsum(opt), math.fsum(opt**2)),
        "mi_minmax": (float(mi.min()), float(mi.max())),
        "opt_minmax": (float(opt.min()), float(opt.max())),
    }
    if keep_arrays:
        stats["mi"] = mi
        stats["opt"] = opt
    return stats


def _fsum_axis(parts):
    """Exact sum of a list of equally-shaped arrays (math.fsum per entry)."""
    flat = np.stack(parts).reshape(len(parts), -1)
    out = np.array([math.fsum(flat[:, j]) for j in range(flat.shape[1])])
    return out.reshape(parts[0].shape)


def _jackknife_var_se(x: np.ndarray, blocks: int = 64):
    """Leave-one-block-out jackknife SE of the (unbiased) sample variance."""
    n = len(x)
    if n < 4 * blocks:
        return None
    edges = np.linspace(0, n, blocks + 1, dtype=int)
    s1 = np.array([x[a:b].sum() for a, b in zip(edges[:-1], edges[1:])])
    s2 = np.array([(x[a:b] ** 2).sum() for a, b in zip(edges[:-1], edges[1:])])
    nb = np.diff(edges)
    rest_n = n - nb
    rest_mean = (s1.sum() - s1) / rest_n
    rest_var = ((s2.sum() - s2) / rest_n - rest_mean**2) * rest_n / (rest_n - 1)
    mean_est = rest_var.mean()
    return float(np.sqrt((blocks - 1) / blocks * np.sum((rest_var - mean_est) ** 2)))


def _quantile_sketch(spec, lo_hi, vmin, vmax, which: str, n_workers: int):
    """Second pass: histogram the regenerated samples, return quantile values."""
    span = max(vmax - vmin, 1e-300)
    counts = np.zeros(_SKETCH_BINS, dtype=np.int64)

    def one(idx):
        lo, hi = lo_hi[idx]
        _, mi, opt = _batch_values(spec, lo, hi)
        v = mi if which == "mi" else opt
        bins = np.minimum(((v - vmin) / span * _SKETCH_BINS).astype(np.int64),
                          _SKETCH_BINS - 1)
        return np.bincount(bins, minlength=_SKETCH_BINS)

    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        for c in pool.map(one, range(len(lo_hi))):
            counts += c
    cum = np.cumsum(counts)
    targets = (np.arange(_SKETCH_POINTS) + 0.5) / _SKETCH_POINTS * cum[-1]
    idx = np.minimum(np.searchsorted(cum, targets, side="left"), _SKETCH_BINS - 1)
    centers = vmin + (np.arange(_SKETCH_BINS) + 0.5) / _SKETCH_BINS * span
    return np.sort(centers[idx])


def run_trials(spec: TrialBatchSpec, n_workers=None, batch_size: int = _BATCH,
               retention_cap: int = 10_000_000) -> EmpiricalSummary:
    """Run the full batch of trials and aggregate.

    The summary is a pure function of `spec` alone: batch boundaries depend
    only on batch_size, per-trial randomness only on (master_seed, trial
    index), and all reductions run in fixed batch order. n_workers defaults
    to the MIMO_ASYMPT_THREADS environment variable (0 or unset = all cores).
    """
    n = spec.n_trials
    workers = _worker_count(n_workers)
    keep = n <= retention_cap
    # materialize cached factors before the pool so threads share them
    _ = spec.pair.r_sqrt
    _ = spec.pair.t_sqrt

    lo_hi = [(lo, min(lo + batch_size, n)) for lo in range(0, n, batch_size)]
    results = {}

    def one(idx):
        lo, hi = lo_hi[idx]
        return idx, _batch_stats(spec, lo, hi, keep)

    completed = 0
    try:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for idx, stats in pool.map(one, range(len(lo_hi))):
                results[idx] = stats
                completed += lo_hi[idx][1] - lo_hi[idx][0]
    except MemoryError as exc:
        raise MonteCarloError("out of memory during trial execution", completed) from exc

    ordered = [results[i] for i in range(len(lo_hi))]
    m = spec.config.M

    g1 = _fsum_axis([b["g1"] for b in ordered])
    g2 = _fsum_axis([b["g2"] for b in ordered])
    g3 = _fsum_axis([b["g3"] for b in ordered])
    sinr_mean = g1 / n
    sinr_cov = (g2 - np.outer(g1, g1) / n) / (n - 1) if n > 1 else np.zeros((m, m))
    sinr_cov = 0.5 * (sinr_cov + sinr_cov.T)
    m2 = np.maximum(np.diagonal(g2) / n - sinr_mean**2, 0.0)
    m3 = g3 / n - 3 * sinr_mean * np.diagonal(g2) / n + 2 * sinr_mean**3
    sinr_skew = np.where(m2 > 0, m3 / np.where(m2 > 0, m2, 1.0) ** 1.5, 0.0)

    mi_s1 = math.fsum(b["mi_s"][0] for b in ordered)
    mi_s2 = math.fsum(b["mi_s"][1] for b in ordered)
    mi_s3 = math.fsum(b["mi_s"][2] for b in ordered)
    opt_s1 = math.fsum(b["opt_s"][0] for b in ordered)
    opt_s2 = math.fsum(b["opt_s"][1] for b in ordered)

    mi_mean = mi_s1 / n
    opt_mean = opt_s1 / n
    bessel = n / (n - 1) if n > 1 else 1.0
    mi_var = max(mi_s2 / n - mi_mean**2, 0.0) * bessel
    opt_var = max(opt_s2 / n - opt_mean**2, 0.0) * bessel
    mi_m2 = max(mi_s2 / n - mi_mean**2, 0.0)
    mi_m3 = mi_s3 / n - 3 * mi_mean * mi_s2 / n + 2 * mi_mean**3
    mi_skew = float(mi_m3 / mi_m2**1.5) if mi_m2 > 0 else 0.0

    if keep:
        mi_in_order = np.concatenate([b["mi"] for b in ordered])
        opt_in_order = np.concatenate([b["opt"] for b in ordered])
        mi_samples = np.sort(mi_in_order)
        opt_samples = np.sort(opt_in_order)
        var_se = _jackknife_var_se(mi_in_order)
        sketch = False
    else:
        mi_lo = min(b["mi_minmax"][0] for b in ordered)
        mi_hi = max(b["mi_minmax"][1] for b in ordered)
        op_lo = min(b["opt_minmax"][0] for b in ordered)
        op_hi = max(b["opt_minmax"][1] for b in ordered)
        mi_samples = _quantile_sketch(spec, lo_hi, mi_lo, mi_hi, "mi", workers)
        opt_samples = _quantile_sketch(spec, lo_hi, op_lo, op_hi, "opt", workers)
        var_se = None
        sketch = True

    return EmpiricalSummary(
        mi_samples=mi_samples, opt_samples=opt_samples,
        sinr_mean=sinr_mean, sinr_cov=sinr_cov, sinr_skew=sinr_skew,
        mi_mean=float(mi_mean), mi_var=float(mi_var), mi_skewness=mi_skew,
        opt_mean=float(opt_mean), opt_var=float(opt_var),
        n_trials=n, master_seed=spec.master_seed,
        mi_var_se=var_se, is_sketch=sketch,
    )


def _samples_for(summary: EmpiricalSummary, receiver: str) -> np.ndarray:
    if receiver == "mmse":
        return summary.mi_samples
    if receiver == "optimal":
        return summary.opt_samples
    raise ValueError(f"unknown receiver {receiver!r}")


def empirical_outage(summary: EmpiricalSummary, rate_nats: float,
                     receiver: str = "mmse"):
    """Fraction of samples <= rate, with its Wilson 95% half-width.

    Returns (probability, halfwidth). On a sketch summary the fraction is
    read off the quantile grid (resolution 1/4096).
    """
    samples = _samples_for(summary, receiver)
    n = summary.n_trials
    p = np.searchsorted(samples, rate_nats, side="right") / len(samples)
    z2 = _Z95 * _Z95
    halfwidth = _Z95 / (1.0 + z2 / n) * math.sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n))
    return float(p), float(halfwidth)


def ks_distance(summary: EmpiricalSummary, model: MutualInfoGaussian) -> float:
    """sup_x |ECDF(x) - Phi((x - c1)/sqrt(c2))| over the retained sample points.

    The receiver whose samples are compared is taken from the model.
    """
    if model.c2 <= 0:
        raise ValueError("model variance must be positive for a KS distance")
    xs = _samples_for(summary, model.receiver)
    n = len(xs)
    f_model = ndtr((xs - model.c1) / math.sqrt(model.c2))
    upper = np.arange(1, n + 1) / n - f_model
    lower = f_model - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))


def summary_to_json(summary: EmpiricalSummary, config: SystemConfig = None) -> str:
    """Deterministic JSON of the scalar cumulants and metadata (nats)."""
    doc = {
        "n_trials": summary.n_trials,
        "master_seed": summary.master_seed,
        "mi_mean": summary.mi_mean,
        "mi_var": summary.mi_var,
        "mi_var_se": summary.mi_var_se,
        "mi_skewness": summary.mi_skewness,
        "opt_mean": summary.opt_mean,
        "opt_var": summary.opt_var,
        "sinr_mean": summary.sinr_mean.tolist(),
        "sinr_cov": summary.sinr_cov.tolist(),
        "sinr_skew": summary.sinr_skew.tolist(),
        "is_sketch": summary.is_sketch,
    }
    if config is not None:
        doc["config"] = {"M": config.M, "N": config.N, "rho": config.rho}
    return json.dumps(doc, sort_keys=True, indent=2)


def write_samples_csv(summary: EmpiricalSummary, path) -> None:
    """Write the sorted sample columns as CSV with header mi_nats,opt_nats."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("mi_nats,opt_nats\n")
        for a, b in zip(summary.mi_samples, summary.opt_samples):
            f.write(f"{a:.12g},{b:.12g}\n")
