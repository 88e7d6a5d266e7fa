"""Embedding evaluation: word similarity, analogy, synonym selection, and
sentence completion with context-softmax scoring.

Completion scoring follows the candidate-context softmax: a candidate's
score sums the softmax probabilities of the context words under the
candidate's input vector against all output vectors. The semantics-weighted
variant multiplies each context term by log(rank) from the training
vocabulary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Vocabulary, keep_probabilities, tokenize
from .errors import DataFormatError, UndefinedCorrelationError
from .vectors import WordVectors

CM = "cm"
CMS = "cms"
SWM = "swm"


# ---------------------------------------------------------------------------
# datasets
# ---------------------------------------------------------------------------

@dataclass
class SimilarityPair:
    word1: str
    word2: str
    score: float


@dataclass
class AnalogyQuestion:
    a: str
    b: str
    c: str
    d: str
    section: str


@dataclass
class SynonymQuestion:
    stem: str
    candidates: list[str]
    answer: int


@dataclass
class CompletionQuestion:
    context: list[str]  # tokens around the blank, per occurrence
    candidates: list[str]
    answer: int


def load_similarity(path: str) -> list[SimilarityPair]:
    """word1<TAB>word2<TAB>score lines; '#' starts a comment."""
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise DataFormatError(f"{path}:{lineno}: expected 3 tab-separated fields")
            pairs.append(SimilarityPair(parts[0].lower(), parts[1].lower(), float(parts[2])))
    return pairs


def load_analogy(path: str) -> list[AnalogyQuestion]:
    """Google format: ": section" headers, then 4 space-separated words.

    Sections whose name starts with "gram" count as syntactic, the rest as
    semantic.
    """
    questions = []
    section = "default"
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith(": "):
                section = line[2:].strip()
                continue
            words = line.lower().split()
            if len(words) != 4:
                raise DataFormatError(f"{path}:{lineno}: expected 4 words")
            questions.append(AnalogyQuestion(*words, section=section))
    return questions


def is_syntactic(section: str) -> bool:
    return section.startswith("gram")


def load_synonym(path: str) -> list[SynonymQuestion]:
    """"stem | cand1,cand2,... | answer_index" lines; '#' comments."""
    questions = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split("|")]
            if len(parts) != 3:
                raise DataFormatError(f"{path}:{lineno}: expected 'stem | cands | answer'")
            candidates = [c.strip().lower() for c in parts[1].split(",") if c.strip()]
            answer = int(parts[2])
            if len(candidates) < 2 or not 0 <= answer < len(candidates):
                raise DataFormatError(f"{path}:{lineno}: bad candidates or answer index")
            questions.append(SynonymQuestion(parts[0].lower(), candidates, answer))
    return questions


def load_completion(path: str) -> list[CompletionQuestion]:
    """Three lines per record: sentence with a ___ blank, comma-separated
    candidates, answer index. '#' comments and blank lines are skipped."""
    records = []
    with open(path, encoding="utf-8") as fh:
        lines = [
            ln.rstrip("\n") for ln in fh
            if ln.strip() and not ln.lstrip().startswith("#")
        ]
    if len(lines) % 3 != 0:
        raise DataFormatError(f"{path}: completion records need 3 lines each")
    for i in range(0, len(lines), 3):
        sentence, cand_line, answer_line = lines[i:i + 3]
        if "___" not in sentence:
            raise DataFormatError(f"{path}: record {i // 3}: sentence has no ___ blank")
        context = tokenize(sentence.replace("___", " "))
        candidates = [c.strip().lower() for c in cand_line.split(",") if c.strip()]
        answer = int(answer_line)
        if len(candidates) < 2 or not 0 <= answer < len(candidates):
            raise DataFormatError(f"{path}: record {i // 3}: bad candidates or answer index")
        records.append(CompletionQuestion(context, candidates, answer))
    return records


# ---------------------------------------------------------------------------
# correlation
# ---------------------------------------------------------------------------

def pearson(xs, ys) -> float:
    """Population-form Pearson correlation Cov(x,y)/sqrt(Var x * Var y)."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("xs and ys must be 1-D and equal length")
    if len(xs) < 2:
        raise UndefinedCorrelationError("need at least 2 pairs")
    xd = xs - xs.mean()
    yd = ys - ys.mean()
    var_x = float(np.dot(xd, xd))
    var_y = float(np.dot(yd, yd))
    if var_x == 0.0 or var_y == 0.0:
        raise UndefinedCorrelationError("zero variance in one of the inputs")
    return float(np.dot(xd, yd) / np.sqrt(var_x * var_y))


def spearman(xs, ys) -> float:
    """Pearson correlation of the (average-tied) ranks."""

    def ranks(v: np.ndarray) -> np.ndarray:
        order = np.argsort(v, kind="stable")
        r = np.empty(len(v), dtype=np.float64)
        r[order] = np.arange(1, len(v) + 1)
        # average ranks over ties
        for val in np.unique(v):
            mask = v == val
            if mask.sum() > 1:
                r[mask] = r[mask].mean()
        return r

    return pearson(ranks(np.asarray(xs, dtype=np.float64)),
                   ranks(np.asarray(ys, dtype=np.float64)))


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity with float64 accumulation; zero vectors give 0."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


# ---------------------------------------------------------------------------
# word similarity
# ---------------------------------------------------------------------------

def eval_similarity(
    pairs: list[SimilarityPair], wv: WordVectors, metric: str = "pearson"
) -> tuple[float, int, int]:
    """Correlation between human scores and cosine similarities.

    Returns (correlation, used_pairs, skipped_pairs); pairs with an
    out-of-vocabulary word are skipped.
    """
    human, model = [], []
    skipped = 0
    for pair in pairs:
        u = wv.get(pair.word1)
        v = wv.get(pair.word2)
        if u is None or v is None:
            skipped += 1
            continue
        human.append(pair.score)
        model.append(cosine(u, v))
    if len(human) < 2:
        raise UndefinedCorrelationError(
            f"only {len(human)} usable pairs ({skipped} skipped)")
    corr = spearman(human, model) if metric == "spearman" else pearson(human, model)
    return corr, len(human), skipped


# ---------------------------------------------------------------------------
# word analogy
# ---------------------------------------------------------------------------

def _unit_rows(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return matrix / norms


@dataclass
class AnalogyResult:
    semantic_correct: int = 0
    semantic_total: int = 0
    syntactic_correct: int = 0
    syntactic_total: int = 0
    skipped: int = 0

    @property
    def semantic_accuracy(self) -> float:
        return self.semantic_correct / self.semantic_total if self.semantic_total else 0.0

    @property
    def syntactic_accuracy(self) -> float:
        return self.syntactic_correct / self.syntactic_total if self.syntactic_total else 0.0

    @property
    def total_accuracy(self) -> float:
        total = self.semantic_total + self.syntactic_total
        correct = self.semantic_correct + self.syntactic_correct
        return correct / total if total else 0.0


def eval_analogy(
    questions: list[AnalogyQuestion], wv: WordVectors, batch_size: int = 512
) -> AnalogyResult:
    """Answer a:b :: c:? by the cosine argmax of v_b - v_a + v_c over the
    vocabulary, excluding the three question words. Questions with any
    out-of-vocabulary word are skipped.
    """
    result = AnalogyResult()
    unit = _unit_rows(wv.matrix.astype(np.float64))
    usable = []
    for q in questions:
        ids = [wv.index(w) for w in (q.a, q.b, q.c, q.d) if w in wv]
        if len(ids) != 4:
            result.skipped += 1
            continue
        usable.append((q, ids))
    for lo in range(0, len(usable), batch_size):
        chunk = usable[lo:lo + batch_size]
        queries = np.empty((len(chunk), wv.dim), dtype=np.float64)
        for row, (_, ids) in enumerate(chunk):
            queries[row] = unit[ids[1]] - unit[ids[0]] + unit[ids[2]]
        qnorm = np.linalg.norm(queries, axis=1, keepdims=True)
        qnorm[qnorm == 0.0] = 1.0
        scores = (queries / qnorm) @ unit.T
        for row, (q, ids) in enumerate(chunk):
            scores[row, ids[:3]] = -np.inf
            predicted = int(np.argmax(scores[row]))
            correct = predicted == ids[3]
            if is_syntactic(q.section):
                result.syntactic_total += 1
                result.syntactic_correct += correct
            else:
                result.semantic_total += 1
                result.semantic_correct += correct
    return result


# ---------------------------------------------------------------------------
# synonym selection
# ---------------------------------------------------------------------------

def eval_synonym(questions: list[SynonymQuestion], wv: WordVectors) -> tuple[float, int, int]:
    """Pick the candidate with the highest cosine to the stem.

    OOV candidates score -inf; an OOV stem (or all-OOV candidates) skips the
    question. Ties go to the earliest candidate. Returns (accuracy, used,
    skipped).
    """
    used = correct = skipped = 0
    for q in questions:
        stem = wv.get(q.stem)
        if stem is None:
            skipped += 1
            continue
        scores = [
            cosine(stem, wv[c]) if c in wv else -np.inf
            for c in q.candidates
        ]
        if not np.isfinite(max(scores)):
            skipped += 1
            continue
        used += 1
        correct += int(np.argmax(scores)) == q.answer
    return (correct / used if used else 0.0), used, skipped


# ---------------------------------------------------------------------------
# sentence completion
# ---------------------------------------------------------------------------

def _softmax_denominator_terms(output: np.ndarray, cand_vec: np.ndarray):
    """All-vocabulary dot products and the stabilizing max."""
    dots = output.astype(np.float64) @ cand_vec.astype(np.float64)
    return dots, float(dots.max())


def cm_score(context_ids: list[int], cand_id: int, input_vecs, output_vecs) -> float:
    """Sum over context words of softmax(v'_w . v_cand) over the vocabulary.

    Stabilized by subtracting the max dot product before exponentiation.
    """
    dots, m = _softmax_denominator_terms(np.asarray(output_vecs), np.asarray(input_vecs)[cand_id])
    denom = float(np.exp(dots - m).sum())
    num = float(np.exp(dots[context_ids] - m).sum())
    return num / denom


def swm_score(
    context_ids: list[int], cand_id: int, input_vecs, output_vecs, weights
) -> float:
    """As cm_score but each context term is scaled by its semantic weight."""
    dots, m = _softmax_denominator_terms(np.asarray(output_vecs), np.asarray(input_vecs)[cand_id])
    denom = float(np.exp(dots - m).sum())
    w = np.asarray(weights, dtype=np.float64)
    num = float((w[context_ids] * np.exp(dots[context_ids] - m)).sum())
    return num / denom


def eval_completion(
    questions: list[CompletionQuestion],
    input_vecs: np.ndarray,
    output_vecs: np.ndarray,
    vocab: Vocabulary,
    mode: str = CM,
    t: float = 1e-4,
    repeats: int = 10,
    seed: int = 0,
    weights: np.ndarray | None = None,
) -> tuple[float, int, int]:
    """Accuracy of CM / CM^s / SWM candidate ranking.

    CM scores the full context; CMS retains each context word with its
    sub-sampling keep probability at rate ``t`` and averages candidate
    scores over ``repeats`` seeded retention draws; SWM does the retention
    and weights each context term by log(rank), or by ``weights`` if given.
    Returns (accuracy, used, skipped); retention draws depend only on
    (seed, question index, repetition), never on the mode.
    """
    if mode not in (CM, CMS, SWM):
        raise ValueError(f"mode must be one of {CM}/{CMS}/{SWM}, got {mode!r}")
    if mode in (CMS, SWM):
        if not t > 0:
            raise ValueError("sub-sampling rate t must be > 0 for CMS/SWM")
        if repeats < 1:
            raise ValueError("repeats must be >= 1")
    if weights is None:
        weights = np.log(np.arange(1, len(vocab) + 1, dtype=np.float64))
    p_keep = keep_probabilities(vocab, t) if mode in (CMS, SWM) else None

    used = correct = skipped = 0
    for q_index, q in enumerate(questions):
        context_ids = [vocab.index(w) for w in q.context if w in vocab]
        if not context_ids:
            skipped += 1
            continue
        cand_ids = [vocab.get(c) for c in q.candidates]
        if all(c is None for c in cand_ids):
            skipped += 1
            continue
        scores = np.zeros(len(cand_ids))
        if mode == CM:
            for ci, cand in enumerate(cand_ids):
                scores[ci] = (
                    cm_score(context_ids, cand, input_vecs, output_vecs)
                    if cand is not None else -np.inf
                )
        else:
            ctx = np.asarray(context_ids)
            totals = np.zeros(len(cand_ids))
            for rep in range(repeats):
                rng = np.random.default_rng(
                    np.random.SeedSequence([seed, q_index, rep]))
                retained = ctx[rng.random(len(ctx)) < p_keep[ctx]]
                if len(retained) == 0:
                    continue
                rid = list(retained)
                for ci, cand in enumerate(cand_ids):
                    if cand is None:
                        continue
                    if mode == CMS:
                        totals[ci] += cm_score(rid, cand, input_vecs, output_vecs)
                    else:
                        totals[ci] += swm_score(rid, cand, input_vecs, output_vecs, weights)
            scores = totals / repeats
            for ci, cand in enumerate(cand_ids):
                if cand is None:
                    scores[ci] = -np.inf
        used += 1
        correct += int(np.argmax(scores)) == q.answer
    return (correct / used if used else 0.0), used, skipped


def results_lines(metrics: dict[str, float | int]) -> str:
    """metric<TAB>value lines for report files."""
    return "\n".join(f"{k}\t{v:.10g}" if isinstance(v, float) else f"{k}\t{v}"
                     for k, v in metrics.items()) + "\n"
