import numpy as np
import pytest

from zipfvec import kernels as kernels_mod
from zipfvec.corpus import Vocabulary

KERNEL_NAMES = sorted(kernels_mod.available_kernels())


@pytest.fixture(params=KERNEL_NAMES)
def kernel(request):
    """Each available training kernel (numpy fallback, cython if built)."""
    return kernels_mod.available_kernels()[request.param]


def vocab_from_counts(counts) -> Vocabulary:
    """Synthetic vocabulary with generated word names in rank order."""
    counts = np.asarray(counts, dtype=np.int64)
    assert np.all(np.diff(counts) <= 0), "counts must be descending"
    words = [f"w{i:05d}" for i in range(len(counts))]
    return Vocabulary(words, counts, int(counts.sum()), min_count=int(counts.min()))


def log_sigmoid(x: float) -> float:
    x = float(x)
    if x >= 0:
        return -np.log1p(np.exp(-x))
    return x - np.log1p(np.exp(x))


def pair_objective(inp, out, input_ids, output_id, negs, nce_bias=None):
    """float64 log likelihood of one training pair; the reference the
    gradient checks differentiate."""
    inp = np.asarray(inp, dtype=np.float64)
    out = np.asarray(out, dtype=np.float64)
    input_ids = np.atleast_1d(input_ids)
    l1 = inp[input_ids].mean(axis=0)
    bias = (lambda w: nce_bias[w]) if nce_bias is not None else (lambda w: 0.0)
    total = log_sigmoid(out[output_id] @ l1 - bias(output_id))
    for n in negs:
        total += log_sigmoid(-(out[n] @ l1 - bias(n)))
    return total
