# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled training kernel: SG/CBOW steps with negative sampling or NCE.

Mirrors the public surface of ``zipfvec._inner_py``. The epoch loop runs
with the GIL released so worker threads scale; randomness comes from an
inline xorshift128+ stream so no Python object is touched on the hot path.

Per pair, all dot products are taken before any row is written, so a step
applies the exact gradient of that pair's objective (duplicate negatives
included).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log1p

cnp.import_array()

COMPILED = True

ctypedef cnp.float32_t REAL
ctypedef cnp.int32_t I32
ctypedef cnp.int64_t I64

# training always runs float32; the float64 specialization exists so the
# gradient checks can run this exact code path without float32 quantization
ctypedef fused real_t:
    float
    double

DEF LR_SYNC_INTERVAL = 10000
DEF MAX_REDRAWS = 100


# ---------------------------------------------------------------------------
# inline PRNG: xorshift128+ seeded via splitmix64
# ---------------------------------------------------------------------------

cdef inline unsigned long long _splitmix64(unsigned long long* x) noexcept nogil:
    cdef unsigned long long z
    x[0] += 0x9E3779B97F4A7C15ULL
    z = x[0]
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef struct RngState:
    unsigned long long s0
    unsigned long long s1


cdef inline void _rng_seed(RngState* rng, unsigned long long seed) noexcept nogil:
    cdef unsigned long long sm = seed
    rng.s0 = _splitmix64(&sm)
    rng.s1 = _splitmix64(&sm)
    if rng.s0 == 0 and rng.s1 == 0:
        rng.s0 = 1


cdef inline unsigned long long _rng_next(RngState* rng) noexcept nogil:
    cdef unsigned long long x = rng.s0
    cdef unsigned long long y = rng.s1
    rng.s0 = y
    x ^= x << 23
    rng.s1 = x ^ y ^ (x >> 17) ^ (y >> 26)
    return rng.s1 + y


cdef inline double _rng_double(RngState* rng) noexcept nogil:
    return (_rng_next(rng) >> 11) * (1.0 / 9007199254740992.0)


cdef inline long _rng_below(RngState* rng, long n) noexcept nogil:
    # multiply-shift; bias ~n/2^32 is irrelevant here
    return <long>(((_rng_next(rng) >> 32) * <unsigned long long>n) >> 32)


# ---------------------------------------------------------------------------
# math helpers
# ---------------------------------------------------------------------------

cdef inline double _sigmoid(double x) noexcept nogil:
    if x > 35.0:
        return 1.0
    if x < -35.0:
        return 0.0
    return 1.0 / (1.0 + exp(-x))


cdef inline double _log_sigmoid(double x) noexcept nogil:
    if x >= 0.0:
        return -log1p(exp(-x))
    return x - log1p(exp(x))


cdef inline double _dot(real_t* a, real_t* b, int d) noexcept nogil:
    cdef double acc = 0.0
    cdef int i
    for i in range(d):
        acc += (<double>a[i]) * b[i]
    return acc


cdef inline void _axpy(double coef, real_t* x, real_t* y, int d) noexcept nogil:
    cdef int i
    for i in range(d):
        y[i] += <real_t>(coef * x[i])


# ---------------------------------------------------------------------------
# pair update core
# ---------------------------------------------------------------------------

cdef double _pair_update(
    real_t[:, ::1] out,
    real_t* l1,
    I64* targets,
    int n_targets,
    double lr,
    const double* nce_bias,
    double* coefs,
    double* neu1e,
    int d,
) noexcept nogil:
    """Exact-gradient step against l1; fills neu1e with the input-side
    gradient times lr and returns the pair's negative log likelihood.
    targets[0] is the positive word, the rest are noise draws."""
    cdef double loss = 0.0
    cdef double s, label
    cdef int j, i
    cdef I64 t
    for j in range(n_targets):
        t = targets[j]
        s = _dot(&out[t, 0], l1, d)
        if nce_bias is not NULL:
            s -= nce_bias[t]
        label = 1.0 if j == 0 else 0.0
        coefs[j] = lr * (label - _sigmoid(s))
        loss -= _log_sigmoid(s if j == 0 else -s)
    for i in range(d):
        neu1e[i] = 0.0
    for j in range(n_targets):
        t = targets[j]
        for i in range(d):
            neu1e[i] += coefs[j] * out[t, i]
    for j in range(n_targets):
        t = targets[j]
        _axpy(coefs[j], l1, &out[t, 0], d)
    return loss


cdef int _draw_negatives(
    RngState* rng,
    const double[::1] prob,
    const I32[::1] alias,
    int k,
    long exclude,
    I64* buf,
) noexcept nogil:
    cdef long n = prob.shape[0]
    cdef int filled = 0
    cdef int slot, attempt
    cdef long j, cand
    for slot in range(k):
        cand = -1
        for attempt in range(MAX_REDRAWS):
            j = _rng_below(rng, n)
            if _rng_double(rng) >= prob[j]:
                j = alias[j]
            if j != exclude:
                cand = j
                break
        if cand >= 0:
            buf[filled] = cand
            filled += 1
    return filled


# ---------------------------------------------------------------------------
# public step functions (also used by the tests)
# ---------------------------------------------------------------------------

def sg_step(real_t[:, ::1] inp, real_t[:, ::1] out, input_id, output_id, neg_ids,
            double lr, nce_bias=None):
    """One skip-gram step: input (context) row vs center word + negatives."""
    cdef int d = inp.shape[1]
    cdef cnp.ndarray[I64, ndim=1] targets = np.empty(1 + len(neg_ids), dtype=np.int64)
    targets[0] = output_id
    cdef int j
    for j in range(len(neg_ids)):
        targets[j + 1] = neg_ids[j]
    cdef cnp.ndarray[double, ndim=1] coefs = np.empty(len(targets))
    cdef cnp.ndarray[double, ndim=1] neu1e = np.empty(d)
    cdef real_t[::1] l1
    if real_t is double:
        l1 = np.empty(d, dtype=np.float64)
    else:
        l1 = np.empty(d, dtype=np.float32)
    cdef long i_id = input_id
    cdef int i
    for i in range(d):
        l1[i] = inp[i_id, i]
    cdef const double[::1] bias_view
    cdef const double* bias_ptr = NULL
    if nce_bias is not None:
        bias_view = nce_bias
        bias_ptr = &bias_view[0]
    cdef double loss = _pair_update(
        out, &l1[0], <I64*>targets.data, len(targets), lr, bias_ptr,
        <double*>coefs.data, <double*>neu1e.data, d,
    )
    for i in range(d):
        inp[i_id, i] += <real_t>neu1e[i]
    return loss


def cbow_step(real_t[:, ::1] inp, real_t[:, ::1] out, ctx_ids, output_id, neg_ids,
              double lr, nce_bias=None):
    """One CBOW step: mean of context rows vs center word + negatives."""
    cdef int d = inp.shape[1]
    cdef cnp.ndarray[I64, ndim=1] ctx = np.asarray(ctx_ids, dtype=np.int64)
    cdef int n_ctx = len(ctx)
    if n_ctx == 0:
        return 0.0
    cdef cnp.ndarray[I64, ndim=1] targets = np.empty(1 + len(neg_ids), dtype=np.int64)
    targets[0] = output_id
    cdef int j
    for j in range(len(neg_ids)):
        targets[j + 1] = neg_ids[j]
    cdef cnp.ndarray[double, ndim=1] coefs = np.empty(len(targets))
    cdef cnp.ndarray[double, ndim=1] neu1e = np.empty(d)
    cdef real_t[::1] l1
    if real_t is double:
        l1 = np.zeros(d, dtype=np.float64)
    else:
        l1 = np.zeros(d, dtype=np.float32)
    cdef int i
    for j in range(n_ctx):
        for i in range(d):
            l1[i] += inp[ctx[j], i]
    for i in range(d):
        l1[i] /= n_ctx
    cdef const double[::1] bias_view
    cdef const double* bias_ptr = NULL
    if nce_bias is not None:
        bias_view = nce_bias
        bias_ptr = &bias_view[0]
    cdef double loss = _pair_update(
        out, &l1[0], <I64*>targets.data, len(targets), lr, bias_ptr,
        <double*>coefs.data, <double*>neu1e.data, d,
    )
    cdef double inv = 1.0 / n_ctx
    for j in range(n_ctx):
        for i in range(d):
            inp[ctx[j], i] += <real_t>(neu1e[i] * inv)
    return loss


# ---------------------------------------------------------------------------
# epoch loop
# ---------------------------------------------------------------------------

def train_epoch(
    int sg,
    const I32[::1] tokens,
    const I64[::1] offsets,
    long sent_lo,
    long sent_hi,
    REAL[:, ::1] inp,
    REAL[:, ::1] out,
    int window,
    int k,
    const double[::1] alias_prob,
    const I32[::1] alias_alias,
    nce_bias,
    double lr_start,
    double lr_floor,
    long planned_total,
    I64[::1] progress,
    unsigned long long seed,
):
    """Train over sentences [sent_lo, sent_hi); returns (pairs, loss_sum).

    ``progress`` is a shared length-1 int64 array driving the linear
    learning-rate decay; it is bumped every 10k processed tokens. Runs with
    the GIL released; concurrent callers race benignly on the matrices.
    """
    cdef int d = inp.shape[1]
    cdef const double[::1] bias_view
    cdef const double* bias_ptr = NULL
    if nce_bias is not None:
        bias_view = nce_bias
        bias_ptr = &bias_view[0]

    cdef cnp.ndarray[I64, ndim=1] neg_buf_arr = np.empty(max(k, 1) + 1, dtype=np.int64)
    cdef cnp.ndarray[double, ndim=1] coefs_arr = np.empty(max(k, 1) + 1)
    cdef cnp.ndarray[double, ndim=1] neu1e_arr = np.empty(d)
    cdef cnp.ndarray[REAL, ndim=1] l1_arr = np.empty(d, dtype=np.float32)
    cdef I64* targets = <I64*>neg_buf_arr.data
    cdef double* coefs = <double*>coefs_arr.data
    cdef double* neu1e = <double*>neu1e_arr.data
    cdef REAL* l1 = <REAL*>l1_arr.data

    cdef RngState rng
    _rng_seed(&rng, seed)

    cdef long pairs = 0
    cdef long local = 0
    cdef double loss_sum = 0.0
    cdef double lr
    cdef long s, pos, pos2, start, end, center, ctx
    cdef int b, nk, n_ctx, i, j

    with nogil:
        lr = lr_start * (1.0 - progress[0] / (planned_total + 1.0))
        if lr < lr_floor:
            lr = lr_floor
        for s in range(sent_lo, sent_hi):
            start = offsets[s]
            end = offsets[s + 1]
            for pos in range(start, end):
                center = tokens[pos]
                b = 1 + <int>_rng_below(&rng, window)
                if sg:
                    for pos2 in range(max(start, pos - b), min(end, pos + b + 1)):
                        if pos2 == pos:
                            continue
                        ctx = tokens[pos2]
                        targets[0] = center
                        nk = _draw_negatives(&rng, alias_prob, alias_alias, k, center, targets + 1)
                        loss_sum += _pair_update(
                            out, &inp[ctx, 0], targets, nk + 1, lr, bias_ptr, coefs, neu1e, d)
                        for i in range(d):
                            inp[ctx, i] += <REAL>neu1e[i]
                        pairs += 1
                else:
                    n_ctx = 0
                    for i in range(d):
                        l1[i] = 0.0
                    for pos2 in range(max(start, pos - b), min(end, pos + b + 1)):
                        if pos2 == pos:
                            continue
                        for i in range(d):
                            l1[i] += inp[tokens[pos2], i]
                        n_ctx += 1
                    if n_ctx > 0:
                        for i in range(d):
                            l1[i] /= n_ctx
                        targets[0] = center
                        nk = _draw_negatives(&rng, alias_prob, alias_alias, k, center, targets + 1)
                        loss_sum += _pair_update(
                            out, l1, targets, nk + 1, lr, bias_ptr, coefs, neu1e, d)
                        for pos2 in range(max(start, pos - b), min(end, pos + b + 1)):
                            if pos2 == pos:
                                continue
                            for i in range(d):
                                inp[tokens[pos2], i] += <REAL>(neu1e[i] / n_ctx)
                        pairs += 1
                local += 1
                if local == LR_SYNC_INTERVAL:
                    progress[0] += local
                    local = 0
                    lr = lr_start * (1.0 - progress[0] / (planned_total + 1.0))
                    if lr < lr_floor:
                        lr = lr_floor
        progress[0] += local
    return pairs, loss_sum


def sample_window_sizes(int window, long n, unsigned long long seed):
    """Effective window sizes exactly as the epoch loop draws them."""
    cdef cnp.ndarray[I64, ndim=1] sizes = np.empty(n, dtype=np.int64)
    cdef RngState rng
    _rng_seed(&rng, seed)
    cdef long i
    for i in range(n):
        sizes[i] = 1 + _rng_below(&rng, window)
    return sizes


def sample_negatives(const double[::1] alias_prob, const I32[::1] alias_alias,
                     int k, long exclude, long n_pairs, unsigned long long seed):
    """n_pairs runs of the epoch loop's negative drawing, concatenated."""
    cdef cnp.ndarray[I64, ndim=1] buf = np.empty(max(k, 1), dtype=np.int64)
    cdef RngState rng
    _rng_seed(&rng, seed)
    draws = []
    cdef long p
    cdef int nk, j
    for p in range(n_pairs):
        nk = _draw_negatives(&rng, alias_prob, alias_alias, k, exclude, <I64*>buf.data)
        for j in range(nk):
            draws.append(buf[j])
    return np.array(draws, dtype=np.int64)
