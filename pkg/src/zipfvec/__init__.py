"""Word embeddings with a Zipf-derived sub-sampled unigram noise
distribution for negative sampling, plus evaluation benchmarks.
"""

from .corpus import (
    TokenStream,
    Vocabulary,
    build_vocabulary,
    keep_probability,
    subsample_tokens,
    tokenize,
)
from .kernels import COMPILED, KERNEL_NAME
from .noise import (
    AliasSampler,
    NoiseTable,
    build_noise_table,
    build_sampler,
    build_smoothed_unigram,
    build_subsampled_unigram,
    build_unigram,
    build_uniform,
)
from .trainer import EmbeddingMatrices, TrainConfig, init_embeddings, train
from .zipf import (
    CriticalWord,
    ZipfFit,
    critical_frequency,
    critical_word_search,
    derive_rate,
    fit_wlse1,
    fit_wlse2,
    semantic_weight,
    subsampling_rate,
)

__version__ = "0.1.0"

__all__ = [
    "AliasSampler",
    "COMPILED",
    "CriticalWord",
    "EmbeddingMatrices",
    "KERNEL_NAME",
    "NoiseTable",
    "TokenStream",
    "TrainConfig",
    "Vocabulary",
    "ZipfFit",
    "build_noise_table",
    "build_sampler",
    "build_smoothed_unigram",
    "build_subsampled_unigram",
    "build_unigram",
    "build_uniform",
    "build_vocabulary",
    "critical_frequency",
    "critical_word_search",
    "derive_rate",
    "fit_wlse1",
    "fit_wlse2",
    "init_embeddings",
    "keep_probability",
    "semantic_weight",
    "subsample_tokens",
    "subsampling_rate",
    "tokenize",
    "train",
]
