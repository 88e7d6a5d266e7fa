"""Power-law fitting of the rank/frequency table and the derived
sub-sampling rate.

The fit is a straight line through (log r, log f_r) with raw counts f_r and
per-point weight 1/r, either free (WLSE1) or constrained to pass through the
rank-1 point (WLSE2). The critical word is where per-word semantic
information log r crosses syntactic information log f_r; its normalized
frequency fixes the sub-sampling rate used for the noise distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .corpus import Vocabulary
from .errors import DegenerateFitError, InsufficientDataError

WLSE1 = "wlse1"
WLSE2 = "wlse2"

# 4 / (1 + sqrt(5))^2 == 1/phi^2, phi the golden ratio
_RATE_FACTOR = 4.0 / (1.0 + math.sqrt(5.0)) ** 2


@dataclass(frozen=True)
class ZipfFit:
    """Estimated f_r = gamma / r^beta, with gamma in raw-count units."""

    beta_hat: float
    gamma_hat: float
    method: str

    @property
    def total_info(self) -> float:
        """Constant per-word information budget log(gamma)."""
        return math.log(self.gamma_hat)


@dataclass(frozen=True)
class CriticalWord:
    """The word kept with probability exactly 1 under rate t_c."""

    r_c: float  # analytic real-valued rank
    f_rc_raw: float  # frequency in raw-count units
    f_rc_norm: float  # f_rc_raw / total_tokens
    t_c: float

    @property
    def nearest_rank(self) -> int:
        return max(1, round(self.r_c))


@dataclass(frozen=True)
class SemanticsInfo:
    """Per-word information split: i_sem = log r, i_syn = log f_r."""

    i_sem: np.ndarray
    i_syn: np.ndarray

    @property
    def totals(self) -> np.ndarray:
        return self.i_sem + self.i_syn


def _count_table(vocab) -> np.ndarray:
    counts = vocab.counts if isinstance(vocab, Vocabulary) else np.asarray(vocab, dtype=np.float64)
    counts = np.asarray(counts, dtype=np.float64)
    if counts.ndim != 1:
        raise ValueError("count table must be one-dimensional")
    if np.any(counts <= 0):
        raise ValueError("counts must be positive")
    return counts


def _check_fittable(counts: np.ndarray) -> None:
    if len(counts) < 2:
        raise InsufficientDataError(f"need >= 2 ranks to fit, got {len(counts)}")
    if counts.max() == counts.min():
        raise DegenerateFitError("all counts equal; rank/frequency line is degenerate")


def _weighted_means(counts: np.ndarray):
    r = np.arange(1, len(counts) + 1, dtype=np.float64)
    w = 1.0 / r
    wsum = w.sum()
    x = np.log(r)
    y = np.log(counts)

    def mean(v: np.ndarray) -> float:
        return float(np.dot(w, v) / wsum)

    return x, y, mean


def fit_wlse1(vocab) -> ZipfFit:
    """Weighted least squares on (log r, log f_r) with weights 1/r.

    Accepts a Vocabulary or a raw count array (descending not required for
    the algebra, but ranks are taken as array positions).
    """
    counts = _count_table(vocab)
    _check_fittable(counts)
    x, y, mean = _weighted_means(counts)
    var_x = mean(x * x) - mean(x) ** 2
    beta = -(mean(x * y) - mean(x) * mean(y)) / var_x
    log_gamma = mean(y) + beta * mean(x)
    return ZipfFit(beta_hat=float(beta), gamma_hat=float(np.exp(log_gamma)), method=WLSE1)


def fit_wlse2(vocab) -> ZipfFit:
    """As fit_wlse1 but constrained through the rank-1 point, so the
    frequency scale equals the top count exactly."""
    counts = _count_table(vocab)
    _check_fittable(counts)
    x, y, mean = _weighted_means(counts)
    beta = -mean(x * (y - y[0])) / mean(x * x)
    return ZipfFit(beta_hat=float(beta), gamma_hat=float(counts[0]), method=WLSE2)


def fit(vocab, method: str = WLSE2) -> ZipfFit:
    if method == WLSE1:
        return fit_wlse1(vocab)
    if method == WLSE2:
        return fit_wlse2(vocab)
    raise ValueError(f"unknown fit method {method!r}")


def semantics_info(vocab) -> SemanticsInfo:
    counts = _count_table(vocab)
    r = np.arange(1, len(counts) + 1, dtype=np.float64)
    return SemanticsInfo(i_sem=np.log(r), i_syn=np.log(counts))


def semantic_weight(rank: int) -> float:
    """log(rank): the semantic-information weight of the rank-th word."""
    if rank < 1:
        raise ValueError(f"rank must be >= 1, got {rank}")
    return math.log(rank)


def critical_frequency(fit: ZipfFit) -> float:
    """Raw-count frequency at which log r crosses log f_r on the fitted line."""
    if fit.beta_hat <= -1.0:
        raise ValueError(f"beta_hat must exceed -1, got {fit.beta_hat}")
    return math.exp(math.log(fit.gamma_hat) / (1.0 + fit.beta_hat))


def critical_rank(fit: ZipfFit) -> float:
    """Real-valued rank of the crossing point (equals its frequency)."""
    return critical_frequency(fit)


def critical_word_search(vocab) -> int:
    """Rank minimizing |log r - log f_r| over the actual counts; the
    non-fitted alternative to critical_frequency. Ties go to the smaller rank.
    """
    counts = _count_table(vocab)
    if len(counts) < 1:
        raise InsufficientDataError("empty vocabulary")
    r = np.arange(1, len(counts) + 1, dtype=np.float64)
    gaps = np.abs(np.log(r) - np.log(counts))
    return int(np.argmin(gaps)) + 1


def subsampling_rate(f_rc_norm: float) -> float:
    """Sub-sampling rate t_c that keeps the critical word with probability 1."""
    if not 0.0 < f_rc_norm <= 1.0:
        raise ValueError(f"f_rc_norm must lie in (0, 1], got {f_rc_norm}")
    return _RATE_FACTOR * f_rc_norm


def critical_word(fit: ZipfFit, total_tokens: int) -> CriticalWord:
    """Full analytic pipeline: fitted line -> crossing point -> t_c."""
    f_rc_raw = critical_frequency(fit)
    f_rc_norm = f_rc_raw / total_tokens
    return CriticalWord(
        r_c=critical_rank(fit),
        f_rc_raw=f_rc_raw,
        f_rc_norm=f_rc_norm,
        t_c=subsampling_rate(f_rc_norm),
    )


def derive_rate(vocab: Vocabulary, method: str = WLSE2) -> CriticalWord:
    """Fit the vocabulary and derive the adaptive sub-sampling rate."""
    return critical_word(fit(vocab, method), vocab.total_tokens)


def derive_rate_by_search(vocab: Vocabulary) -> CriticalWord:
    """Rate from the searched (non-fitted) critical word."""
    rank = critical_word_search(vocab)
    f_rc_raw = float(vocab.counts[rank - 1])
    f_rc_norm = f_rc_raw / vocab.total_tokens
    return CriticalWord(
        r_c=float(rank),
        f_rc_raw=f_rc_raw,
        f_rc_norm=f_rc_norm,
        t_c=subsampling_rate(f_rc_norm),
    )


def fit_report(fit: ZipfFit, crit: CriticalWord) -> str:
    """key=value report, 10 significant digits."""
    lines = [
        f"method={fit.method}",
        f"beta_hat={fit.beta_hat:#.10g}",
        f"gamma_hat={fit.gamma_hat:#.10g}",
        f"f_rc_raw={crit.f_rc_raw:#.10g}",
        f"f_rc_norm={crit.f_rc_norm:#.10g}",
        f"t_c={crit.t_c:#.10g}",
    ]
    return "\n".join(lines) + "\n"
