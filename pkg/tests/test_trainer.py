import numpy as np
import pytest

from zipfvec import noise, trainer
from zipfvec.corpus import build_vocabulary, encode_sentences
from zipfvec.errors import TrainingDivergedError
from zipfvec.evaluation import cosine

from conftest import log_sigmoid


def make_corpus(pattern, repeats, vocab_min_count=1):
    tokens = list(pattern) * repeats
    vocab = build_vocabulary(tokens, min_count=vocab_min_count)
    stream = encode_sentences([tokens], vocab)
    return tokens, vocab, stream


class TestInitEmbeddings:
    def test_input_range(self):
        emb = trainer.init_embeddings(50, 4, seed=0)
        assert emb.input.dtype == np.float32
        assert np.all(emb.input >= -0.125) and np.all(emb.input < 0.125)

    def test_output_zero(self):
        emb = trainer.init_embeddings(10, 16, seed=1)
        assert not emb.output.any()

    def test_deterministic(self):
        a = trainer.init_embeddings(20, 8, seed=7)
        b = trainer.init_embeddings(20, 8, seed=7)
        np.testing.assert_array_equal(a.input, b.input)

    def test_validation(self):
        with pytest.raises(ValueError):
            trainer.init_embeddings(0, 4, seed=0)


class TestTrainConfig:
    def test_model_dependent_lr_defaults(self):
        assert trainer.TrainConfig(model="sg").initial_lr == 0.025
        assert trainer.TrainConfig(model="cbow").initial_lr == 0.05

    def test_validation(self):
        with pytest.raises(ValueError):
            trainer.TrainConfig(model="glove")
        with pytest.raises(ValueError):
            trainer.TrainConfig(dim=0)
        with pytest.raises(ValueError):
            trainer.TrainConfig(negatives=-1)
        with pytest.raises(ValueError):
            trainer.TrainConfig(objective="nce", negatives=0)
        with pytest.raises(ValueError):
            trainer.TrainConfig(initial_lr=-0.1)


class TestMatrices:
    def test_check_finite_raises_with_diagnostics(self):
        emb = trainer.init_embeddings(4, 3, seed=0)
        emb.output[2, 1] = np.nan
        with pytest.raises(TrainingDivergedError, match="output"):
            emb.check_finite("after epoch 1")


class TestTrainDeterminism:
    @pytest.mark.parametrize("model", ["sg", "cbow"])
    def test_single_worker_bit_identical(self, kernel, model):
        _, vocab, stream = make_corpus("abcab", 200)
        cfg = trainer.TrainConfig(model=model, dim=8, window=2, negatives=3,
                                  epochs=2, subsample_rate=1e-2, seed=11)
        a = trainer.train(stream, vocab, cfg, kernel=kernel)
        b = trainer.train(stream, vocab, cfg, kernel=kernel)
        np.testing.assert_array_equal(a.input, b.input)
        np.testing.assert_array_equal(a.output, b.output)

    def test_unigram_and_degenerate_subsampled_trajectories_identical(self, kernel):
        # a sub-sampled table with a huge rate has all alphas 1, so training
        # must match the unigram table bit for bit
        _, vocab, stream = make_corpus("aabbbcd", 150)
        uni = noise.build_unigram(vocab)
        sub = noise.build_subsampled_unigram(vocab, t_c=50.0)
        np.testing.assert_array_equal(uni.probs, sub.probs)
        cfg = trainer.TrainConfig(model="sg", dim=6, window=2, negatives=2,
                                  epochs=1, subsample_rate=0, seed=4)
        a = trainer.train(stream, vocab, cfg, table=uni, kernel=kernel)
        b = trainer.train(stream, vocab, cfg, table=sub, kernel=kernel)
        np.testing.assert_array_equal(a.input, b.input)
        np.testing.assert_array_equal(a.output, b.output)


class TestTrainingDirections:
    def test_two_word_corpus_aligns_across_matrices(self, kernel):
        # on pure alternation the co-occurrence signal drives the input
        # vector of each word toward the *output* vector of the other
        _, vocab, stream = make_corpus("ab", 5000)
        cfg = trainer.TrainConfig(model="sg", dim=10, window=1, negatives=2,
                                  epochs=2, subsample_rate=0, seed=3,
                                  initial_lr=0.05)
        emb = trainer.train(stream, vocab, cfg, table=noise.build_unigram(vocab),
                            kernel=kernel)
        ia, ib = vocab.index("a"), vocab.index("b")
        # output matrix starts at zero, so any positive alignment is learned
        assert cosine(emb.input[ia], emb.output[ib]) > 0.2
        assert cosine(emb.input[ib], emb.output[ia]) > 0.2

    def test_shared_context_words_align(self, kernel):
        # a and b never co-occur but share the context c: their input
        # vectors must converge
        _, vocab, stream = make_corpus("acbc", 2500)
        cfg = trainer.TrainConfig(model="sg", dim=10, window=1, negatives=2,
                                  epochs=3, subsample_rate=0, seed=3,
                                  initial_lr=0.05)
        emb0 = trainer.init_embeddings(len(vocab), cfg.dim, cfg.seed)
        emb = trainer.train(stream, vocab, cfg, table=noise.build_unigram(vocab),
                            kernel=kernel)
        ia, ib = vocab.index("a"), vocab.index("b")
        before = cosine(emb0.input[ia], emb0.input[ib])
        after = cosine(emb.input[ia], emb.input[ib])
        assert after > before
        assert after > 0.8


def exact_ns_objective(emb, vocab, table, pairs, k):
    """Mean negative-sampling objective over held-out pairs with the noise
    expectation computed exactly over the vocabulary."""
    inp = emb.input.astype(np.float64)
    out = emb.output.astype(np.float64)
    probs = table.probs
    total = 0.0
    for input_id, output_id in pairs:
        dots = out @ inp[input_id]
        total += log_sigmoid(dots[output_id])
        total += k * float(probs @ np.array([log_sigmoid(-d) for d in dots]))
    return total / len(pairs)


class TestLossImprovement:
    def test_expected_objective_increases_over_first_epoch(self, kernel):
        # strong co-occurrence structure: 25 word pairs that always co-occur
        rng = np.random.default_rng(0)
        n_pairs_vocab = 25
        sentence = []
        for _ in range(400):
            i = int(rng.integers(n_pairs_vocab))
            sentence.extend([f"x{i:02d}", f"y{i:02d}"])
        vocab = build_vocabulary(sentence, min_count=1)
        stream = encode_sentences([sentence], vocab)
        table = noise.build_unigram(vocab)
        cfg = trainer.TrainConfig(model="sg", dim=12, window=1, negatives=3,
                                  epochs=1, subsample_rate=0, seed=8,
                                  initial_lr=0.05)
        held_out = [
            (vocab.index(f"x{i:02d}"), vocab.index(f"y{i:02d}"))
            for i in range(n_pairs_vocab)
        ]
        emb0 = trainer.init_embeddings(len(vocab), cfg.dim, cfg.seed)
        before = exact_ns_objective(emb0, vocab, table, held_out, cfg.negatives)
        emb = trainer.train(stream, vocab, cfg, table=table, kernel=kernel)
        after = exact_ns_objective(emb, vocab, table, held_out, cfg.negatives)
        assert after > before


class TestWorkers:
    def test_multi_worker_run_completes_and_learns(self):
        _, vocab, stream = make_corpus("acbc", 3000)
        cfg = trainer.TrainConfig(model="sg", dim=10, window=1, negatives=2,
                                  epochs=2, subsample_rate=0, seed=3,
                                  initial_lr=0.05, workers=3)
        emb = trainer.train(stream, vocab, cfg, table=noise.build_unigram(vocab))
        emb.check_finite()
        ia, ib = vocab.index("a"), vocab.index("b")
        assert cosine(emb.input[ia], emb.input[ib]) > 0.5

    def test_shard_bounds_cover_stream(self):
        offsets = np.array([0, 3, 10, 11, 30, 31], dtype=np.int64)
        shards = trainer._shard_bounds(offsets, 3)
        assert shards[0][0] == 0 and shards[-1][1] == 5
        for (_, hi), (lo, _) in zip(shards, shards[1:]):
            assert hi == lo


class TestPairStepWrappers:
    def test_ns_pair_step_updates_and_excludes_target(self):
        vocab = build_vocabulary(list("aabbbbcccc"), min_count=1)
        emb = trainer.init_embeddings(len(vocab), 6, seed=2)
        emb.output[:] = np.random.default_rng(0).standard_normal(emb.output.shape) * 0.1
        table = noise.build_unigram(vocab)
        sampler = noise.build_sampler(table, seed=5)
        before_in, before_out = emb.input.copy(), emb.output.copy()
        loss = trainer.ns_pair_step(emb, 0, 1, sampler, k=3, lr=0.1)
        assert np.isfinite(loss)
        assert not np.array_equal(emb.input[0], before_in[0])
        assert not np.array_equal(emb.output[1], before_out[1])

    def test_nce_pair_step_runs_cbow_route(self):
        vocab = build_vocabulary(list("aabbbbcccc"), min_count=1)
        emb = trainer.init_embeddings(len(vocab), 6, seed=2)
        table = noise.build_smoothed_unigram(vocab)
        sampler = noise.build_sampler(table, seed=5)
        loss = trainer.nce_pair_step(emb, [0, 2], 1, sampler, table, k=2, lr=0.1)
        assert np.isfinite(loss)

    def test_draw_negatives_never_returns_excluded(self):
        table = noise.build_unigram(build_vocabulary(list("aaab"), min_count=1))
        sampler = noise.build_sampler(table, seed=1)
        for _ in range(200):
            negs = trainer.draw_negatives(sampler, k=4, exclude=0)
            assert len(negs) == 4
            assert not np.any(negs == 0)


class TestErrors:
    def test_empty_stream(self):
        vocab = build_vocabulary(["a", "a"], min_count=1)
        stream = encode_sentences([[]], vocab)
        with pytest.raises(ValueError):
            trainer.train(stream, vocab, trainer.TrainConfig())

    def test_mismatched_table(self):
        _, vocab, stream = make_corpus("ab", 10)
        other = noise.build_unigram(build_vocabulary(list("abc"), min_count=1))
        with pytest.raises(ValueError):
            trainer.train(stream, vocab, trainer.TrainConfig(), table=other)


def test_window_draw_distribution_in_training_loop():
    # the spec's Monte-Carlo bound at c=5 over 1e6 positions
    sizes = __import__("zipfvec.kernels", fromlist=["sample_window_sizes"]).sample_window_sizes(5, 1_000_000, 123)
    counts = np.bincount(sizes, minlength=6)[1:]
    n, p = 1_000_000, 0.2
    sigma = np.sqrt(n * p * (1 - p))
    np.testing.assert_array_less(np.abs(counts - n * p), 3 * sigma)
