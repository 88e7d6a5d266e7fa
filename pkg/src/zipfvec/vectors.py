"""Word-vector file I/O in the word2vec-compatible formats.

Text: first line "vocab_size D", then one "word v1 ... vD" line per word.
Binary: same header line, then per word the token bytes, a single space,
and D little-endian float32 values.
"""

from __future__ import annotations

import numpy as np

from .errors import DataFormatError


class WordVectors:
    """A word -> row mapping over a dense float32 matrix."""

    def __init__(self, words: list[str], matrix: np.ndarray):
        if len(words) != matrix.shape[0]:
            raise ValueError("words/matrix size mismatch")
        self.words = list(words)
        self.matrix = np.ascontiguousarray(matrix, dtype=np.float32)
        self._index = {w: i for i, w in enumerate(self.words)}

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self._index

    def __getitem__(self, word: str) -> np.ndarray:
        return self.matrix[self._index[word]]

    def get(self, word: str) -> np.ndarray | None:
        i = self._index.get(word)
        return None if i is None else self.matrix[i]

    def index(self, word: str) -> int:
        return self._index[word]

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]


def save_text(path: str, words: list[str], matrix: np.ndarray) -> None:
    matrix = np.asarray(matrix)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{matrix.shape[0]} {matrix.shape[1]}\n")
        for word, row in zip(words, matrix):
            fh.write(word + " " + " ".join(f"{v:.6g}" for v in row) + "\n")


def save_binary(path: str, words: list[str], matrix: np.ndarray) -> None:
    matrix = np.ascontiguousarray(matrix, dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(f"{matrix.shape[0]} {matrix.shape[1]}\n".encode("utf-8"))
        for word, row in zip(words, matrix):
            fh.write(word.encode("utf-8") + b" " + row.tobytes())


def load_text(path: str) -> WordVectors:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise DataFormatError(f"{path}: bad vector header {header!r}")
        n, dim = int(header[0]), int(header[1])
        words: list[str] = []
        matrix = np.empty((n, dim), dtype=np.float32)
        for i in range(n):
            parts = fh.readline().rstrip("\n").split(" ")
            if len(parts) != dim + 1:
                raise DataFormatError(f"{path}: row {i} has {len(parts) - 1} values, expected {dim}")
            words.append(parts[0])
            matrix[i] = [float(v) for v in parts[1:]]
    return WordVectors(words, matrix)


def load_binary(path: str) -> WordVectors:
    with open(path, "rb") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise DataFormatError(f"{path}: bad vector header {header!r}")
        n, dim = int(header[0]), int(header[1])
        row_bytes = 4 * dim
        words: list[str] = []
        matrix = np.empty((n, dim), dtype=np.float32)
        for i in range(n):
            token = bytearray()
            while True:
                ch = fh.read(1)
                if not ch:
                    raise DataFormatError(f"{path}: truncated at row {i}")
                if ch == b" ":
                    break
                token += ch
            buf = fh.read(row_bytes)
            if len(buf) != row_bytes:
                raise DataFormatError(f"{path}: truncated vector at row {i}")
            words.append(token.decode("utf-8"))
            matrix[i] = np.frombuffer(buf, dtype="<f4")
    return WordVectors(words, matrix)


def load(path: str, binary: bool = False) -> WordVectors:
    return load_binary(path) if binary else load_text(path)
