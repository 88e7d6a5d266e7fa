"""SGD training of SG/CBOW embeddings with negative sampling or NCE.

Each epoch re-draws the sub-sampled stream, shards it over worker threads,
and runs the selected kernel over each shard. The learning rate decays
linearly with the count of trained tokens down to a floor of 1e-4 times the
initial rate. Single-worker runs are bit-deterministic under a fixed seed;
multi-worker runs race benignly on the shared matrices.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field

import numpy as np

from . import kernels, noise
from .corpus import TokenStream, Vocabulary, expected_kept_tokens, subsample_tokens
from .errors import TrainingDivergedError

logger = logging.getLogger(__name__)

SG = "sg"
CBOW = "cbow"
NS = "ns"
NCE = "nce"

LR_FLOOR_FACTOR = 1e-4


@dataclass
class EmbeddingMatrices:
    """Input vectors and output vectors over the vocabulary."""

    input: np.ndarray  # float32, |V| x D
    output: np.ndarray  # float32, |V| x D

    @property
    def dim(self) -> int:
        return self.input.shape[1]

    @property
    def vocab_size(self) -> int:
        return self.input.shape[0]

    def check_finite(self, where: str = "") -> None:
        for name, mat in (("input", self.input), ("output", self.output)):
            bad = np.count_nonzero(~np.isfinite(mat))
            if bad:
                raise TrainingDivergedError(
                    f"{bad} non-finite entries in the {name} matrix{' ' + where if where else ''}"
                )


@dataclass
class TrainConfig:
    model: str = SG
    objective: str = NS
    dim: int = 100
    window: int = 5
    negatives: int = 10
    initial_lr: float | None = None  # default depends on model
    epochs: int = 2
    subsample_rate: float = 1e-4  # 0 disables stream sub-sampling
    noise_spec: str = "smoothed:0.75"
    seed: int = 1
    workers: int = 1
    log_every: int = field(default=1_000_000, repr=False)

    def __post_init__(self) -> None:
        if self.model not in (SG, CBOW):
            raise ValueError(f"model must be '{SG}' or '{CBOW}', got {self.model!r}")
        if self.objective not in (NS, NCE):
            raise ValueError(f"objective must be '{NS}' or '{NCE}', got {self.objective!r}")
        if self.dim < 1 or self.window < 1 or self.epochs < 1 or self.workers < 1:
            raise ValueError("dim, window, epochs and workers must all be >= 1")
        if self.negatives < 0:
            raise ValueError("negatives must be >= 0")
        if self.objective == NCE and self.negatives < 1:
            raise ValueError("NCE requires at least one noise draw")
        if self.subsample_rate < 0:
            raise ValueError("subsample_rate must be >= 0 (0 disables)")
        if self.initial_lr is None:
            self.initial_lr = 0.025 if self.model == SG else 0.05
        if self.initial_lr <= 0:
            raise ValueError("initial_lr must be > 0")


def init_embeddings(vocab_size: int, dim: int, seed: int) -> EmbeddingMatrices:
    """Input entries uniform in [-0.5/dim, 0.5/dim); output entries zero."""
    if vocab_size < 1 or dim < 1:
        raise ValueError("vocab_size and dim must be >= 1")
    rng = np.random.default_rng(seed)
    inp = ((rng.random((vocab_size, dim)) - 0.5) / dim).astype(np.float32)
    return EmbeddingMatrices(inp, np.zeros((vocab_size, dim), dtype=np.float32))


def nce_logit_bias(table: noise.NoiseTable, k: int) -> np.ndarray:
    """Per-word logit correction log(k * P_n(w)) for the NCE objective."""
    return np.log(k * table.probs)


def draw_negatives(sampler: noise.AliasSampler, k: int, exclude: int) -> np.ndarray:
    """k noise words, redrawing any draw equal to ``exclude``."""
    negs = np.empty(k, dtype=np.int64)
    filled = 0
    for _ in range(k):
        for _attempt in range(100):
            cand = sampler.draw()
            if cand != exclude:
                negs[filled] = cand
                filled += 1
                break
    return negs[:filled]


def ns_pair_step(emb: EmbeddingMatrices, inputs, output_id: int,
                 sampler: noise.AliasSampler, k: int, lr: float) -> float:
    """One negative-sampling step; ``inputs`` is an id (SG) or id list (CBOW)."""
    negs = draw_negatives(sampler, k, output_id)
    if np.ndim(inputs) == 0:
        return kernels.sg_step(emb.input, emb.output, int(inputs), output_id, negs, lr)
    return kernels.cbow_step(emb.input, emb.output, inputs, output_id, negs, lr)


def nce_pair_step(emb: EmbeddingMatrices, inputs, output_id: int,
                  sampler: noise.AliasSampler, table: noise.NoiseTable,
                  k: int, lr: float) -> float:
    """One NCE step with the partition function fixed at 1."""
    negs = draw_negatives(sampler, k, output_id)
    bias = nce_logit_bias(table, k)
    if np.ndim(inputs) == 0:
        return kernels.sg_step(emb.input, emb.output, int(inputs), output_id, negs, lr, bias)
    return kernels.cbow_step(emb.input, emb.output, inputs, output_id, negs, lr, bias)


def _shard_bounds(offsets: np.ndarray, workers: int) -> list[tuple[int, int]]:
    """Contiguous sentence ranges with roughly equal token counts."""
    n_tokens = int(offsets[-1])
    n_sent = len(offsets) - 1
    cuts = np.searchsorted(offsets, np.linspace(0, n_tokens, workers + 1))
    cuts[0], cuts[-1] = 0, n_sent
    return [(int(cuts[i]), int(cuts[i + 1])) for i in range(workers) if cuts[i] < cuts[i + 1]]


def train(
    stream: TokenStream,
    vocab: Vocabulary,
    config: TrainConfig,
    table: noise.NoiseTable | None = None,
    kernel=None,
) -> EmbeddingMatrices:
    """Train embeddings over ``stream``; returns the trained matrices.

    ``table`` overrides the noise table built from config.noise_spec
    (useful for tests); ``kernel`` overrides the auto-selected kernel.
    """
    if len(stream) == 0:
        raise ValueError("cannot train on an empty token stream")
    kern = kernel if kernel is not None else kernels.get_kernel()
    if table is None:
        table = noise.build_noise_table(vocab, config.noise_spec)
    if len(table) != len(vocab):
        raise ValueError("noise table size does not match vocabulary size")
    sampler = noise.AliasSampler(table.probs)
    nce_bias = nce_logit_bias(table, config.negatives) if config.objective == NCE else None

    emb = init_embeddings(len(vocab), config.dim, config.seed)
    t = config.subsample_rate
    per_epoch = expected_kept_tokens(vocab, t) if t > 0 else float(len(stream))
    planned_total = max(1, int(round(config.epochs * per_epoch)))
    lr_floor = config.initial_lr * LR_FLOOR_FACTOR
    progress = np.zeros(1, dtype=np.int64)
    is_sg = 1 if config.model == SG else 0

    logger.info(
        "training %s/%s dim=%d window=%d k=%d noise=%s kernel=%s workers=%d",
        config.model, config.objective, config.dim, config.window,
        config.negatives, table.spec_string(),
        "cython" if getattr(kern, "COMPILED", False) else "numpy", config.workers,
    )
    for epoch in range(config.epochs):
        if t > 0:
            epoch_stream = subsample_tokens(
                stream, vocab, t, np.random.default_rng((config.seed, epoch)))
        else:
            epoch_stream = stream
        shards = _shard_bounds(epoch_stream.offsets, config.workers)
        results: list[tuple[int, float]] = [(0, 0.0)] * len(shards)

        def run_shard(slot: int, lo: int, hi: int, epoch=epoch, epoch_stream=epoch_stream,
                      results=results) -> None:
            results[slot] = kern.train_epoch(
                is_sg, epoch_stream.ids, epoch_stream.offsets, lo, hi,
                emb.input, emb.output, config.window, config.negatives,
                sampler.prob, sampler.alias, nce_bias,
                config.initial_lr, lr_floor, planned_total, progress,
                _worker_seed(config.seed, epoch, slot),
            )

        if len(shards) == 1:
            run_shard(0, *shards[0])
        else:
            threads = [
                threading.Thread(target=run_shard, args=(slot, lo, hi))
                for slot, (lo, hi) in enumerate(shards)
            ]
            for th in threads:
                th.start()
            for th in threads:
                th.join()
        pairs = sum(r[0] for r in results)
        loss = sum(r[1] for r in results)
        emb.check_finite(f"after epoch {epoch + 1}")
        logger.info(
            "epoch %d/%d: %d tokens, %d pairs, mean loss %.4f",
            epoch + 1, config.epochs, len(epoch_stream), pairs,
            loss / max(pairs, 1),
        )
    return emb


def _worker_seed(seed: int, epoch: int, slot: int) -> int:
    mix = np.random.SeedSequence([seed, epoch, slot]).generate_state(1, np.uint64)[0]
    return int(mix)
