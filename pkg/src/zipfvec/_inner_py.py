"""Pure-NumPy training kernel, the fallback when the compiled extension is
unavailable. Slow (Python-level loop per training pair) but implements the
same update rules and the same public surface as the compiled kernel.

All dot products of a pair are taken against the pre-step parameter values,
so a step applies the exact gradient of that pair's objective; this is what
the finite-difference gradient checks exercise.
"""

from __future__ import annotations

import numpy as np

COMPILED = False

_LR_SYNC_INTERVAL = 10_000
_MAX_REDRAWS = 100


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + np.exp(-x))
    z = np.exp(x)
    return z / (1.0 + z)


def _log_sigmoid(x: float) -> float:
    if x >= 0:
        return -np.log1p(np.exp(-x))
    return x - np.log1p(np.exp(x))


def _pair_update(inp, out, l1, targets, labels, lr, nce_bias):
    """Shared core: exact-gradient ascent step for one (input, targets) pair.

    ``l1`` is the input-side vector (a row for SG, the context mean for
    CBOW). Returns (neu1e, loss): the accumulated input-side gradient times
    lr, and the pair's negative log likelihood.
    """
    loss = 0.0
    coefs = np.empty(len(targets))
    for j, t in enumerate(targets):
        s = float(np.dot(out[t], l1))
        if nce_bias is not None:
            s -= nce_bias[t]
        coefs[j] = lr * (labels[j] - _sigmoid(s))
        loss -= _log_sigmoid(s if labels[j] == 1.0 else -s)
    # accumulate against pre-update rows, then write
    neu1e = np.zeros_like(l1, dtype=np.float64)
    for j, t in enumerate(targets):
        neu1e += coefs[j] * out[t]
    for j, t in enumerate(targets):
        out[t] += (coefs[j] * l1).astype(out.dtype, copy=False)
    return neu1e, loss


def sg_step(inp, out, input_id, output_id, neg_ids, lr, nce_bias=None):
    """One skip-gram step: input (context) row vs center word + negatives."""
    targets = [int(output_id)] + [int(n) for n in neg_ids]
    labels = np.zeros(len(targets))
    labels[0] = 1.0
    l1 = inp[int(input_id)].copy()
    neu1e, loss = _pair_update(inp, out, l1, targets, labels, lr, nce_bias)
    inp[int(input_id)] += neu1e.astype(inp.dtype, copy=False)
    return loss


def cbow_step(inp, out, ctx_ids, output_id, neg_ids, lr, nce_bias=None):
    """One CBOW step: mean of context rows vs center word + negatives.

    The input-side gradient is split evenly over the context rows (exact
    gradient of the mean-input objective).
    """
    ctx_ids = [int(c) for c in ctx_ids]
    if not ctx_ids:
        return 0.0
    targets = [int(output_id)] + [int(n) for n in neg_ids]
    labels = np.zeros(len(targets))
    labels[0] = 1.0
    l1 = inp[ctx_ids].mean(axis=0)
    neu1e, loss = _pair_update(inp, out, l1, targets, labels, lr, nce_bias)
    share = (neu1e / len(ctx_ids)).astype(inp.dtype, copy=False)
    for c in ctx_ids:
        inp[c] += share
    return loss


def _draw_negatives(rng, prob, alias, k, exclude, buf):
    n = len(prob)
    filled = 0
    for _ in range(k):
        t = -1
        for _attempt in range(_MAX_REDRAWS):
            j = int(rng.integers(n))
            cand = j if rng.random() < prob[j] else int(alias[j])
            if cand != exclude:
                t = cand
                break
        if t >= 0:
            buf[filled] = t
            filled += 1
    return filled


def train_epoch(
    sg,
    tokens,
    offsets,
    sent_lo,
    sent_hi,
    inp,
    out,
    window,
    k,
    alias_prob,
    alias_alias,
    nce_bias,
    lr_start,
    lr_floor,
    planned_total,
    progress,
    seed,
):
    """Train over sentences [sent_lo, sent_hi); returns (pairs, loss_sum).

    ``progress`` is a shared length-1 int64 array driving the linear
    learning-rate decay; it is bumped every 10k processed tokens.
    """
    rng = np.random.default_rng(seed)
    neg_buf = np.empty(max(k, 1), dtype=np.int64)
    pairs = 0
    loss_sum = 0.0
    local = 0
    lr = max(lr_start * (1.0 - progress[0] / (planned_total + 1.0)), lr_floor)
    for s in range(sent_lo, sent_hi):
        start = int(offsets[s])
        end = int(offsets[s + 1])
        for pos in range(start, end):
            center = int(tokens[pos])
            b = 1 + int(rng.integers(window))
            lo = max(start, pos - b)
            hi = min(end, pos + b + 1)
            if sg:
                for pos2 in range(lo, hi):
                    if pos2 == pos:
                        continue
                    ctx = int(tokens[pos2])
                    nk = _draw_negatives(rng, alias_prob, alias_alias, k, center, neg_buf)
                    loss_sum += sg_step(inp, out, ctx, center, neg_buf[:nk], lr, nce_bias)
                    pairs += 1
            else:
                ctx_ids = [int(tokens[p2]) for p2 in range(lo, hi) if p2 != pos]
                if ctx_ids:
                    nk = _draw_negatives(rng, alias_prob, alias_alias, k, center, neg_buf)
                    loss_sum += cbow_step(inp, out, ctx_ids, center, neg_buf[:nk], lr, nce_bias)
                    pairs += 1
            local += 1
            if local == _LR_SYNC_INTERVAL:
                progress[0] += local
                local = 0
                lr = max(lr_start * (1.0 - progress[0] / (planned_total + 1.0)), lr_floor)
    progress[0] += local
    return pairs, loss_sum


def sample_window_sizes(window, n, seed):
    """Effective window sizes with the epoch loop's distribution."""
    rng = np.random.default_rng(seed)
    return rng.integers(window, size=n).astype(np.int64) + 1


def sample_negatives(alias_prob, alias_alias, k, exclude, n_pairs, seed):
    """n_pairs runs of the epoch loop's negative drawing, concatenated."""
    rng = np.random.default_rng(seed)
    buf = np.empty(max(k, 1), dtype=np.int64)
    draws = []
    for _ in range(n_pairs):
        nk = _draw_negatives(rng, alias_prob, alias_alias, k, exclude, buf)
        draws.extend(buf[:nk].tolist())
    return np.array(draws, dtype=np.int64)
