"""Noise distributions for negative sampling and an exact O(1) sampler.

The sub-sampled unigram table scales each word's count by its capped keep
probability before normalizing, so frequent words are damped while count
ratios among never-deleted words are preserved exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Vocabulary, keep_probability

UNIFORM = "uniform"
UNIGRAM = "unigram"
SMOOTHED = "smoothed"
SUBSAMPLED = "subsampled"


@dataclass(frozen=True)
class NoiseTable:
    """Per-word sampling probabilities plus the weights that produced them.

    ``alphas`` are the per-word damping factors: all ones except under the
    sub-sampled variant, where alpha_i = min(keep_probability(f̂_i, t_c), 1).
    """

    probs: np.ndarray  # float64, sums to 1
    alphas: np.ndarray  # float64 in (0, 1]
    kind: str
    power: float | None = None
    t_c: float | None = None
    source: str | None = None  # wlse1 | wlse2 | manual

    def __len__(self) -> int:
        return len(self.probs)

    def spec_string(self) -> str:
        if self.kind == SMOOTHED:
            return f"smoothed:{self.power:g}"
        if self.kind == SUBSAMPLED:
            if self.source == "manual":
                return f"subsampled:manual:{self.t_c:g}"
            return f"subsampled:{self.source}"
        return self.kind

    def dump(self, vocab: Vocabulary) -> str:
        """word<TAB>alpha<TAB>prob lines in rank order, 10 significant digits."""
        lines = [
            f"{word}\t{alpha:.10g}\t{prob:.10g}"
            for word, alpha, prob in zip(vocab.words, self.alphas, self.probs)
        ]
        return "\n".join(lines) + "\n"


def _normalized(weights: np.ndarray) -> np.ndarray:
    total = weights.sum()
    if not total > 0:
        raise ValueError("noise weights sum to zero")
    return weights / total


def build_uniform(vocab: Vocabulary) -> NoiseTable:
    n = len(vocab)
    return NoiseTable(np.full(n, 1.0 / n), np.ones(n), UNIFORM)


def build_unigram(vocab: Vocabulary) -> NoiseTable:
    counts = vocab.counts.astype(np.float64)
    return NoiseTable(_normalized(counts), np.ones(len(vocab)), UNIGRAM)


def build_smoothed_unigram(vocab: Vocabulary, power: float = 0.75) -> NoiseTable:
    """probs ∝ count^power; power=1 is the unigram, power=0 uniform."""
    if power < 0:
        raise ValueError(f"power must be >= 0, got {power}")
    counts = vocab.counts.astype(np.float64)
    return NoiseTable(_normalized(counts**power), np.ones(len(vocab)), SMOOTHED, power=power)


def build_subsampled_unigram(
    vocab: Vocabulary, t_c: float, source: str = "manual"
) -> NoiseTable:
    """probs ∝ alpha_i * count_i with alpha the capped keep probability."""
    if not t_c > 0:
        raise ValueError(f"t_c must be > 0, got {t_c}")
    alphas = np.minimum(keep_probability(vocab.freqs, t_c), 1.0)
    weights = alphas * vocab.counts.astype(np.float64)
    return NoiseTable(_normalized(weights), alphas, SUBSAMPLED, t_c=t_c, source=source)


class AliasSampler:
    """Exact constant-time sampling from a discrete distribution.

    Walker/Vose construction: each cell i keeps probability ``prob[i]`` of
    returning i and otherwise returns ``alias[i]``; a draw costs one uniform
    integer and one uniform real.
    """

    def __init__(self, probs: np.ndarray, seed: int = 0):
        probs = np.asarray(probs, dtype=np.float64)
        if probs.ndim != 1 or len(probs) == 0:
            raise ValueError("probs must be a non-empty 1-D array")
        if np.any(probs < 0):
            raise ValueError("probs must be non-negative")
        n = len(probs)
        scaled = probs * (n / probs.sum())
        prob = np.ones(n, dtype=np.float64)
        alias = np.arange(n, dtype=np.int32)
        small = [i for i in range(n) if scaled[i] < 1.0]
        large = [i for i in range(n) if scaled[i] >= 1.0]
        while small and large:
            s = small.pop()
            g = large.pop()
            prob[s] = scaled[s]
            alias[s] = g
            scaled[g] -= 1.0 - scaled[s]
            (small if scaled[g] < 1.0 else large).append(g)
        # leftovers are 1 up to rounding
        self.prob = prob
        self.alias = alias
        self._rng = np.random.default_rng(seed)

    def __len__(self) -> int:
        return len(self.prob)

    def draw(self, size: int | None = None):
        """One word index, or an array of ``size`` indices."""
        n = len(self.prob)
        if size is None:
            i = int(self._rng.integers(n))
            return i if self._rng.random() < self.prob[i] else int(self.alias[i])
        idx = self._rng.integers(n, size=size)
        u = self._rng.random(size)
        return np.where(u < self.prob[idx], idx, self.alias[idx]).astype(np.int64)

    def implied_probs(self) -> np.ndarray:
        """Reconstruct the exact distribution encoded by the tables."""
        n = len(self.prob)
        implied = self.prob.copy()
        np.add.at(implied, self.alias, 1.0 - self.prob)
        return implied / n


def build_sampler(table: NoiseTable, seed: int = 0) -> AliasSampler:
    return AliasSampler(table.probs, seed=seed)


def build_noise_table(
    vocab: Vocabulary,
    spec: str,
    t_override: float | None = None,
) -> NoiseTable:
    """Build a table from a spec string:

    uniform | unigram | smoothed:<power> | subsampled:wlse1 |
    subsampled:wlse2 | subsampled:manual:<t_c>
    """
    from . import zipf  # local import to avoid a cycle at module load

    parts = spec.split(":")
    kind = parts[0]
    if kind == UNIFORM and len(parts) == 1:
        return build_uniform(vocab)
    if kind == UNIGRAM and len(parts) == 1:
        return build_unigram(vocab)
    if kind == SMOOTHED:
        power = float(parts[1]) if len(parts) == 2 else 0.75
        return build_smoothed_unigram(vocab, power)
    if kind == SUBSAMPLED and len(parts) >= 2:
        method = parts[1]
        if method == "manual":
            t_c = float(parts[2]) if len(parts) == 3 else t_override
            if t_c is None:
                raise ValueError("subsampled:manual requires a t_c value")
            return build_subsampled_unigram(vocab, t_c, source="manual")
        if method in (zipf.WLSE1, zipf.WLSE2):
            crit = zipf.derive_rate(vocab, method)
            return build_subsampled_unigram(vocab, crit.t_c, source=method)
    raise ValueError(f"unknown noise spec {spec!r}")
