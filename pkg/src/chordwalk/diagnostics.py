"""Statistical checks of chain output against oracles and limit theorems.

Pass thresholds for the normality statistic and the bands used by
:func:`compare_samples` are engineering choices (configurable), not
theoretical guarantees.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats


@dataclass(frozen=True)
class MomentReport:
    """Sample mean and covariance with standard errors of the mean.

    Reports from disjoint sample sets combine exactly with :meth:`merge`
    (pairwise update of Chan et al.), which is associative and
    order-independent up to rounding.
    """

    n: int
    mean: np.ndarray
    covariance: np.ndarray

    @classmethod
    def from_samples(cls, X) -> "MomentReport":
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if len(X) < 2:
            raise ValueError("need at least two samples")
        mean = X.mean(axis=0)
        Y = X - mean
        return cls(len(X), mean, Y.T @ Y / (len(X) - 1))

    @property
    def variance(self) -> np.ndarray:
        return np.diag(self.covariance).copy()

    @property
    def stderr(self) -> np.ndarray:
        """i.i.d. standard error of each mean entry (chains: see :func:`batch_means_stderr`)."""
        return np.sqrt(self.variance / self.n)

    def merge(self, other: "MomentReport") -> "MomentReport":
        n = self.n + other.n
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.n / n)
        m2 = (self.covariance * (self.n - 1) + other.covariance * (other.n - 1)
              + np.outer(delta, delta) * (self.n * other.n / n))
        return MomentReport(n, mean, m2 / (n - 1))


def default_bins(n: int, dims: int) -> int:
    """Per-axis bin count giving about 50 expected samples per bin."""
    dims = min(dims, 3)
    return max(2, int((n / 50) ** (1.0 / dims)))


def histogram_tv(samples_a, samples_b, bins=None, bounds=None) -> float:
    """Total-variation distance ``(1/2) sum |p_a - p_b|`` between binned samples.

    ``bins`` is a per-axis count (int or sequence); ``bounds`` a per-axis
    ``(lo, hi)`` list (e.g. the body's bounding box), by default the joint extent of both sets.  At most
    three axes are used; project higher-dimensional samples first.
    """
    a = np.asarray(samples_a, dtype=float)
    b = np.asarray(samples_b, dtype=float)
    a = a[:, None] if a.ndim == 1 else a
    b = b[:, None] if b.ndim == 1 else b
    if len(a) == 0 or len(b) == 0:
        raise ValueError("empty sample set")
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    if a.shape[1] > 3:
        raise ValueError("histogram_tv uses at most 3 axes; project the samples first")
    if bins is None:
        bins = default_bins(min(len(a), len(b)), a.shape[1])
    if bounds is None:
        lo = np.minimum(a.min(axis=0), b.min(axis=0))
        hi = np.maximum(a.max(axis=0), b.max(axis=0))
        hi = np.where(hi > lo, hi, lo + 1.0)
        bounds = list(zip(lo, hi))
    ha, _ = np.histogramdd(a, bins=bins, range=bounds)
    hb, _ = np.histogramdd(b, bins=bins, range=bounds)
    return 0.5 * float(np.abs(ha / len(a) - hb / len(b)).sum())


@dataclass(frozen=True)
class BatchMeans:
    batch_length: int
    batch_means: np.ndarray
    batch_variance: float
    normality: float  # Anderson-Darling A^2 of the standardized batch means


def clt_batch_means(series, batch_count: int) -> BatchMeans:
    """Split ``series`` into ``batch_count`` equal batches and summarize their means.

    Under a central limit theorem the batch means are approximately normal
    with variance ``D / batch_length``.  ``normality`` is NaN for a constant
    series.
    """
    x = np.asarray(series, dtype=float)
    if batch_count < 2 or len(x) < 2 * batch_count:
        raise ValueError(f"need at least 2 * batch_count = {2 * batch_count} values, got {len(x)}")
    L = len(x) // batch_count
    means = x[: L * batch_count].reshape(batch_count, L).mean(axis=1)
    var = float(means.var(ddof=1))
    if var > 0:
        z = (means - means.mean()) / math.sqrt(var)
        a2 = float(stats.anderson(z, dist="norm").statistic)
    else:
        a2 = math.nan
    return BatchMeans(L, means, var, a2)


def batch_means_stderr(X, batch_count: int = 50) -> np.ndarray:
    """Autocorrelation-aware standard error of each column mean of a chain."""
    X = np.asarray(X, dtype=float)
    X = X[:, None] if X.ndim == 1 else X
    L = len(X) // batch_count
    if L < 1:
        raise ValueError("series shorter than batch_count")
    means = X[: L * batch_count].reshape(batch_count, L, -1).mean(axis=1)
    return np.sqrt(means.var(axis=0, ddof=1) / batch_count)


def lil_envelope(series, n_min: int = 100) -> float:
    """``max_{n >= n_min} |S_n| / sqrt(2 n log log n)`` of a centred series.

    A boundedness diagnostic for the law of the iterated logarithm.
    """
    x = np.asarray(series, dtype=float)
    if len(x) < n_min:
        raise ValueError(f"series shorter than {n_min}")
    S = np.cumsum(x)[n_min - 1:]
    n = np.arange(n_min, len(x) + 1, dtype=float)
    return float(np.max(np.abs(S) / np.sqrt(2.0 * n * np.log(np.log(n)))))


def autocorrelation(series, max_lag: int) -> np.ndarray:
    """Biased autocorrelation estimates for lags ``0..max_lag`` (FFT based)."""
    x = np.asarray(series, dtype=float)
    n = len(x)
    if n <= max_lag:
        raise ValueError(f"series length {n} must exceed max_lag {max_lag}")
    y = x - x.mean()
    c0 = float(y @ y)
    if c0 == 0.0:
        raise ValueError("zero-variance series has no autocorrelation")
    nfft = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(y, nfft)
    acov = np.fft.irfft(f * np.conj(f), nfft)[: max_lag + 1]
    return acov / c0


def integrated_autocorrelation_time(series, max_lag: int | None = None, c: float = 5.0) -> float:
    """Sokal's windowed estimate ``1 + 2 sum_k rho(k)``, window ``M >= c tau``."""
    x = np.asarray(series, dtype=float)
    max_lag = min(len(x) - 1, 10000) if max_lag is None else max_lag
    rho = autocorrelation(x, max_lag)
    tau = 1.0
    for k in range(1, max_lag + 1):
        tau += 2.0 * rho[k]
        if k >= c * tau:
            break
    return tau


# --------------------------------------------------------------------------
# reports

@dataclass(frozen=True)
class Check:
    name: str
    value: float
    band: float
    passed: bool

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.value:.6g} (band {self.band:.6g})"


@dataclass
class Report:
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def text(self) -> str:
        lines = [c.line() for c in self.checks]
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)

    def to_json(self) -> str:
        rows = [{k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in asdict(c).items()}
                for c in self.checks]
        return json.dumps({"passed": self.passed, "checks": rows}, indent=2)


def compare_samples(chain, oracle, sigma: float = 4.0, tv_band: float = 0.03,
                    bins: int = 20, pairs=None, batch_count: int = 50) -> Report:
    """Compare chain output with independent oracle draws.

    * per-coordinate means and ``E|x|^2``: ``|diff| <= sigma * joint stderr``,
      the chain stderr from batch means;
    * 2-D projected histogram TV on coordinate ``pairs`` (default: the first
      two coordinates and the last two) ``<= tv_band``;
    * informational: lag-1 autocorrelation and integrated autocorrelation
      time of the first coordinate, Anderson-Darling statistic of its batch
      means.
    """
    chain = np.asarray(chain, dtype=float)
    oracle = np.asarray(oracle, dtype=float)
    d = chain.shape[1]
    checks = []
    mc, mo = chain.mean(axis=0), oracle.mean(axis=0)
    se_c = batch_means_stderr(chain, batch_count)
    se_o = oracle.std(axis=0, ddof=1) / math.sqrt(len(oracle))
    for i in range(d):
        band = sigma * math.hypot(se_c[i], se_o[i])
        diff = abs(mc[i] - mo[i])
        checks.append(Check(f"mean[{i}] chain-oracle", float(diff), float(band), bool(diff <= band)))
    r2c = np.einsum("ij,ij->i", chain, chain)
    r2o = np.einsum("ij,ij->i", oracle, oracle)
    band = sigma * math.hypot(float(batch_means_stderr(r2c, batch_count)[0]),
                              float(r2o.std(ddof=1) / math.sqrt(len(r2o))))
    diff = abs(r2c.mean() - r2o.mean())
    checks.append(Check(f"E|x|^2 chain-oracle (chain {r2c.mean():.5g}, oracle {r2o.mean():.5g})",
                        float(diff), band, bool(diff <= band)))
    if pairs is None:
        pairs = [(0, 1)] if d >= 2 else [(0,)]
        if d >= 4:
            pairs.append((d - 2, d - 1))
    for p in pairs:
        tv = histogram_tv(chain[:, list(p)], oracle[:, list(p)], bins=bins)
        checks.append(Check(f"histogram TV on coords {p}", tv, tv_band, tv <= tv_band))
    x0 = chain[:, 0]
    if x0.var() > 0:
        checks.append(Check("lag-1 autocorrelation coord 0 (info)", float(autocorrelation(x0, 1)[1]), 1.0, True))
        checks.append(Check("integrated autocorrelation time coord 0 (info)",
                            integrated_autocorrelation_time(x0), math.inf, True))
        bm = clt_batch_means(x0, batch_count)
        checks.append(Check("Anderson-Darling A^2 of batch means coord 0 (info)", bm.normality, math.inf, True))
    return Report(checks)
