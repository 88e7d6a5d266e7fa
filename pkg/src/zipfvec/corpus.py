"""Corpus pipeline: tokenization, vocabulary construction, sub-sampling.

Tokens are lowercased and split on every maximal run of characters outside
[a-z0-9]; the vocabulary keeps words with count >= min_count, ranked by
count descending (ties lexicographic), and normalizes frequencies against
the retained-token total so they sum to exactly 1.
"""

from __future__ import annotations

import re
import sys
from collections import Counter
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

import numpy as np

from .errors import DataFormatError, EmptyVocabularyError

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    """Lowercase ``text`` and split it into alphanumeric tokens."""
    return _TOKEN_RE.findall(text.lower())


def iter_sentences(source: str | IO[str]) -> Iterator[list[str]]:
    """Yield one token list per input line; empty lines yield nothing.

    ``source`` is a path, ``"-"`` for stdin, or an open text handle.
    Undecodable bytes are dropped.
    """
    if isinstance(source, str):
        if source == "-":
            yield from _iter_handle(sys.stdin)
        else:
            with open(source, encoding="utf-8", errors="ignore") as fh:
                yield from _iter_handle(fh)
    else:
        yield from _iter_handle(source)


def _iter_handle(fh: IO[str]) -> Iterator[list[str]]:
    for line in fh:
        tokens = tokenize(line)
        if tokens:
            yield tokens


@dataclass
class Vocabulary:
    """Frequency-ranked word table.

    ``words[i]`` has 1-based rank ``i + 1``; ``counts`` is descending with
    lexicographic tie-break; ``total_tokens`` counts retained occurrences
    only, so ``freqs`` sums to 1.
    """

    words: list[str]
    counts: np.ndarray  # int64, descending
    total_tokens: int
    min_count: int
    _index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.counts = np.asarray(self.counts, dtype=np.int64)
        self._index = {w: i for i, w in enumerate(self.words)}

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self._index

    def index(self, word: str) -> int:
        """0-based index of ``word``; raises KeyError if absent."""
        return self._index[word]

    def get(self, word: str) -> int | None:
        return self._index.get(word)

    def rank(self, word: str) -> int:
        """1-based frequency rank."""
        return self._index[word] + 1

    @property
    def freqs(self) -> np.ndarray:
        """Normalized frequencies f̂, summing to 1 over the vocabulary."""
        return self.counts / float(self.total_tokens)

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"#total_tokens\t{self.total_tokens}\n")
            for word, count in zip(self.words, self.counts):
                fh.write(f"{word}\t{int(count)}\n")

    @classmethod
    def load(cls, path: str) -> "Vocabulary":
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n")
            parts = header.split("\t")
            if len(parts) != 2 or parts[0] != "#total_tokens":
                raise DataFormatError(
                    f"{path}: expected '#total_tokens<TAB>N' header, got {header!r}"
                )
            total = int(parts[1])
            words: list[str] = []
            counts: list[int] = []
            for lineno, line in enumerate(fh, start=2):
                line = line.rstrip("\n")
                if not line:
                    continue
                try:
                    word, count = line.split("\t")
                except ValueError as exc:
                    raise DataFormatError(f"{path}:{lineno}: bad vocabulary line {line!r}") from exc
                words.append(word)
                counts.append(int(count))
        if not words:
            raise EmptyVocabularyError(f"{path}: vocabulary file has no entries")
        return cls(words, np.array(counts, dtype=np.int64), total, min_count=int(counts[-1]))


@dataclass
class TokenStream:
    """Vocabulary indices in corpus order, with sentence boundaries.

    ``offsets`` has length n_sentences + 1; sentence ``s`` spans
    ``ids[offsets[s]:offsets[s + 1]]``.
    """

    ids: np.ndarray  # int32
    offsets: np.ndarray  # int64

    def __post_init__(self) -> None:
        self.ids = np.asarray(self.ids, dtype=np.int32)
        self.offsets = np.asarray(self.offsets, dtype=np.int64)

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def n_sentences(self) -> int:
        return len(self.offsets) - 1

    def sentences(self) -> Iterator[np.ndarray]:
        for s in range(self.n_sentences):
            yield self.ids[self.offsets[s]:self.offsets[s + 1]]

    @classmethod
    def from_sentences(cls, sentences: Iterable[Iterable[int]]) -> "TokenStream":
        ids: list[int] = []
        offsets = [0]
        for sent in sentences:
            ids.extend(sent)
            offsets.append(len(ids))
        return cls(np.array(ids, dtype=np.int32), np.array(offsets, dtype=np.int64))


def build_vocabulary(tokens: Iterable[str], min_count: int = 5) -> Vocabulary:
    """Count ``tokens`` and keep words occurring at least ``min_count`` times."""
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")
    counter = Counter(tokens)
    kept = [(w, c) for w, c in counter.items() if c >= min_count]
    if not kept:
        raise EmptyVocabularyError(
            f"no word occurs at least {min_count} times ({len(counter)} distinct words seen)"
        )
    kept.sort(key=lambda wc: (-wc[1], wc[0]))
    words = [w for w, _ in kept]
    counts = np.array([c for _, c in kept], dtype=np.int64)
    return Vocabulary(words, counts, int(counts.sum()), min_count)


def encode_sentences(sentences: Iterable[list[str]], vocab: Vocabulary) -> TokenStream:
    """Map token sentences to a TokenStream, dropping out-of-vocabulary words."""
    index = vocab._index
    ids: list[int] = []
    offsets = [0]
    for sent in sentences:
        start = len(ids)
        ids.extend(index[w] for w in sent if w in index)
        if len(ids) > start:
            offsets.append(len(ids))
    return TokenStream(np.array(ids, dtype=np.int32), np.array(offsets, dtype=np.int64))


def keep_probability(f_hat, t):
    """Retention probability of a word with normalized frequency ``f_hat``.

    Returns (sqrt(f_hat/t) + 1) * (t/f_hat), uncapped: values >= 1 mean the
    word is never deleted. Accepts scalars or arrays.
    """
    f_hat = np.asarray(f_hat, dtype=np.float64)
    if np.any(f_hat <= 0) or np.any(f_hat > 1):
        raise ValueError("f_hat must lie in (0, 1]")
    if not t > 0:
        raise ValueError(f"sub-sampling rate t must be > 0, got {t}")
    ratio = t / f_hat
    out = (np.sqrt(f_hat / t) + 1.0) * ratio
    return float(out) if out.ndim == 0 else out


def keep_probabilities(vocab: Vocabulary, t: float) -> np.ndarray:
    """Per-word retention probabilities, capped at 1."""
    return np.minimum(keep_probability(vocab.freqs, t), 1.0)


def subsample_tokens(
    stream: TokenStream,
    vocab: Vocabulary,
    t: float,
    rng: np.random.Generator | int,
) -> TokenStream:
    """Randomly delete frequent-word occurrences, each kept independently
    with probability min(keep_probability(f̂, t), 1).
    """
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    p_keep = keep_probabilities(vocab, t)
    certain = p_keep >= 1.0
    per_token_p = p_keep[stream.ids]
    mask = certain[stream.ids] | (rng.random(len(stream.ids)) < per_token_p)
    prefix = np.concatenate(([0], np.cumsum(mask, dtype=np.int64)))
    return TokenStream(stream.ids[mask], prefix[stream.offsets])


def expected_kept_tokens(vocab: Vocabulary, t: float) -> float:
    """Expected stream length after sub-sampling a full pass of the corpus."""
    return float(np.sum(keep_probabilities(vocab, t) * vocab.counts))
