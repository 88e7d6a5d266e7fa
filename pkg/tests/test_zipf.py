import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zipfvec import zipf
from zipfvec.corpus import keep_probability
from zipfvec.errors import DegenerateFitError, InsufficientDataError

from conftest import vocab_from_counts

# Frozen outputs of the independent weighted-regression oracle (lstsq on the
# sqrt(1/r)-scaled design matrix) for counts [100, 40, 25, 18, 12, 9, 8, 6, 5, 4].
ORACLE_COUNTS = [100, 40, 25, 18, 12, 9, 8, 6, 5, 4]
ORACLE_WLSE1_BETA = 1.336360748670957
ORACLE_WLSE1_GAMMA = 101.93585197882778
ORACLE_WLSE2_BETA = 1.3244235642505402

GOLDEN_RATIO_SQ = ((1 + math.sqrt(5)) / 2) ** 2


def lstsq_oracle(counts, constrained: bool):
    """Straight-line weighted regression, scaled-design route (independent
    of the closed-form weighted means in the implementation)."""
    counts = np.asarray(counts, dtype=np.float64)
    r = np.arange(1, len(counts) + 1, dtype=np.float64)
    x, y, s = np.log(r), np.log(counts), np.sqrt(1.0 / r)
    if constrained:
        coef, *_ = np.linalg.lstsq((x * s)[:, None], (y - y[0]) * s, rcond=None)
        return -float(coef[0]), float(counts[0])
    design = np.stack([x * s, s], axis=1)
    coef, *_ = np.linalg.lstsq(design, y * s, rcond=None)
    return -float(coef[0]), float(np.exp(coef[1]))


class TestWlse1:
    def test_exact_power_law_unit_slope(self):
        counts = 1000.0 / np.arange(1, 1001)
        fit = zipf.fit_wlse1(counts)
        assert fit.beta_hat == pytest.approx(1.0, rel=1e-10)
        assert fit.gamma_hat == pytest.approx(1000.0, rel=1e-10)

    def test_exact_power_law_nonunit_slope(self):
        counts = 500.0 / np.arange(1, 501) ** 1.2
        fit = zipf.fit_wlse1(counts)
        assert fit.beta_hat == pytest.approx(1.2, rel=1e-10)
        assert fit.gamma_hat == pytest.approx(500.0, rel=1e-10)

    def test_matches_independent_regression_oracle(self):
        fit = zipf.fit_wlse1(vocab_from_counts(ORACLE_COUNTS))
        assert fit.beta_hat == pytest.approx(ORACLE_WLSE1_BETA, rel=1e-10)
        assert fit.gamma_hat == pytest.approx(ORACLE_WLSE1_GAMMA, rel=1e-10)

    def test_insufficient_data(self):
        with pytest.raises(InsufficientDataError):
            zipf.fit_wlse1(np.array([5.0]))

    def test_degenerate_equal_counts(self):
        with pytest.raises(DegenerateFitError):
            zipf.fit_wlse1(np.array([7.0, 7.0, 7.0]))

    @settings(max_examples=30, deadline=None)
    @given(
        beta=st.floats(0.2, 2.5),
        gamma=st.floats(10.0, 1e6),
        n=st.integers(2, 400),
    )
    def test_recovers_any_exact_power_law(self, beta, gamma, n):
        counts = gamma / np.arange(1, n + 1) ** beta
        fit = zipf.fit_wlse1(counts)
        assert fit.beta_hat == pytest.approx(beta, rel=1e-8)
        assert fit.gamma_hat == pytest.approx(gamma, rel=1e-8)


class TestWlse2:
    def test_exact_power_law(self):
        counts = 1000.0 / np.arange(1, 1001)
        fit = zipf.fit_wlse2(counts)
        assert fit.beta_hat == pytest.approx(1.0, rel=1e-10)
        assert fit.gamma_hat == 1000.0

    def test_gamma_is_top_count_by_construction(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            counts = np.sort(rng.integers(1, 10_000, size=50))[::-1].astype(float)
            if counts.max() == counts.min():
                continue
            assert zipf.fit_wlse2(counts).gamma_hat == counts[0]

    def test_matches_independent_regression_oracle(self):
        fit = zipf.fit_wlse2(vocab_from_counts(ORACLE_COUNTS))
        oracle_beta, oracle_gamma = lstsq_oracle(ORACLE_COUNTS, constrained=True)
        assert oracle_beta == pytest.approx(ORACLE_WLSE2_BETA, rel=1e-12)
        assert fit.beta_hat == pytest.approx(oracle_beta, rel=1e-10)
        assert fit.gamma_hat == oracle_gamma == 100.0

    def test_errors_match_wlse1_contract(self):
        with pytest.raises(InsufficientDataError):
            zipf.fit_wlse2(np.array([5.0]))
        with pytest.raises(DegenerateFitError):
            zipf.fit_wlse2(np.array([4.0, 4.0]))


class TestFitAgreementOnExactLaws:
    def test_wlse1_equals_wlse2_on_power_law(self):
        counts = 2048.0 / np.arange(1, 300) ** 0.8
        f1, f2 = zipf.fit_wlse1(counts), zipf.fit_wlse2(counts)
        assert f1.beta_hat == pytest.approx(f2.beta_hat, rel=1e-11)
        assert f1.gamma_hat == pytest.approx(f2.gamma_hat, rel=1e-11)

    def test_oracle_agreement_wlse1(self):
        oracle_beta, oracle_gamma = lstsq_oracle(ORACLE_COUNTS, constrained=False)
        assert oracle_beta == pytest.approx(ORACLE_WLSE1_BETA, rel=1e-12)
        assert oracle_gamma == pytest.approx(ORACLE_WLSE1_GAMMA, rel=1e-12)


class TestCriticalFrequency:
    def test_simple_values(self):
        assert zipf.critical_frequency(
            zipf.ZipfFit(1.0, 1e6, "wlse1")) == pytest.approx(1e3, rel=1e-12)
        assert zipf.critical_frequency(
            zipf.ZipfFit(1.0, math.e**2, "wlse1")) == pytest.approx(math.e, rel=1e-12)

    def test_root_finding_oracle(self):
        # crossing point of log r and log(gamma/r^beta), solved numerically
        from scipy.optimize import brentq

        gamma, beta = 5000.0, 1.25
        logr_c = brentq(lambda lr: (math.log(gamma) - beta * lr) - lr, 0.0, 40.0, xtol=1e-14)
        f_oracle = gamma / math.exp(logr_c) ** beta
        f_impl = zipf.critical_frequency(zipf.ZipfFit(beta, gamma, "wlse1"))
        assert f_impl == pytest.approx(f_oracle, rel=1e-9)
        assert f_impl == pytest.approx(44.05413401348633, rel=1e-12)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            zipf.critical_frequency(zipf.ZipfFit(-1.0, 10.0, "wlse1"))


class TestCriticalWordSearch:
    def test_exact_crossing(self):
        counts = np.concatenate([np.linspace(4000, 11, 9), [10.0], np.linspace(3, 1, 3)])
        assert zipf.critical_word_search(counts) == 10

    def test_scan_oracle_hand_case(self):
        # |log1-log8|=2.079, |log2-log3|=0.405, |log3-log1|=1.099
        assert zipf.critical_word_search(np.array([8.0, 3.0, 1.0])) == 2

    def test_single_word(self):
        assert zipf.critical_word_search(np.array([42.0])) == 1

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.integers(1, 100_000), min_size=1, max_size=60))
    def test_matches_exhaustive_scan(self, raw):
        counts = np.sort(np.array(raw, dtype=float))[::-1]
        best, best_gap = 1, float("inf")
        for r, f in enumerate(counts, start=1):
            gap = abs(math.log(r) - math.log(f))
            if gap < best_gap:
                best, best_gap = r, gap
        assert zipf.critical_word_search(counts) == best


class TestSubsamplingRate:
    def test_direct(self):
        assert zipf.subsampling_rate(1e-5) == pytest.approx(3.8196601125010515e-06, rel=1e-12)

    def test_inverse_exact(self):
        f = (1 + math.sqrt(5)) ** 2 / 4 * 1e-6
        assert zipf.subsampling_rate(f) == pytest.approx(1e-6, rel=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            zipf.subsampling_rate(0.0)
        with pytest.raises(ValueError):
            zipf.subsampling_rate(1.5)

    def test_bisection_oracle(self):
        rng = np.random.default_rng(99)
        for f in 10 ** rng.uniform(-8, -0.5, size=50):
            lo, hi = 0.0, f
            for _ in range(100):
                mid = 0.5 * (lo + hi)
                if keep_probability(f, mid) < 1.0:
                    lo = mid
                else:
                    hi = mid
            assert zipf.subsampling_rate(f) == pytest.approx(0.5 * (lo + hi), rel=1e-9)

    @given(f=st.floats(1e-9, 1.0), scale=st.floats(0.01, 1.0))
    def test_homogeneity(self, f, scale):
        assert zipf.subsampling_rate(f * scale) == pytest.approx(
            scale * zipf.subsampling_rate(f), rel=1e-12)

    def test_keep_probability_of_critical_word_is_one(self):
        for f in (1e-7, 3e-5, 0.2):
            t_c = zipf.subsampling_rate(f)
            assert keep_probability(f, t_c) == pytest.approx(1.0, abs=1e-9)


class TestSemanticWeight:
    def test_rank_one_is_zero(self):
        assert zipf.semantic_weight(1) == 0.0

    def test_values(self):
        assert zipf.semantic_weight(3) == pytest.approx(1.0986, abs=1e-4)
        assert zipf.semantic_weight(1000) == pytest.approx(6.9078, abs=1e-4)

    def test_domain(self):
        with pytest.raises(ValueError):
            zipf.semantic_weight(0)


class TestSemanticsInfo:
    def test_monotonicity(self):
        counts = np.sort(np.random.default_rng(1).integers(1, 1000, 50))[::-1].astype(float)
        info = zipf.semantics_info(counts)
        assert np.all(np.diff(info.i_sem) >= 0)
        assert np.all(np.diff(info.i_syn) <= 0)

    def test_total_is_log_gamma_on_exact_law(self):
        counts = 729.0 / np.arange(1, 101)
        fit = zipf.fit_wlse1(counts)
        info = zipf.semantics_info(counts)
        np.testing.assert_allclose(info.totals, fit.total_info, rtol=1e-12)

    def test_crossing_balances_information_on_fitted_line(self):
        # at the critical rank, log r equals log f on the fitted line
        fit = zipf.ZipfFit(1.17, 8.5e5, "wlse1")
        r_c = zipf.critical_rank(fit)
        i_sem = math.log(r_c)
        i_syn = math.log(fit.gamma_hat / r_c**fit.beta_hat)
        assert i_sem == pytest.approx(i_syn, abs=1e-9)


class TestDeriveRate:
    def test_pipeline_consistency(self):
        counts = (50_000 / np.arange(1, 2001)).astype(int) + 1
        vocab = vocab_from_counts(np.sort(counts)[::-1])
        crit = zipf.derive_rate(vocab, zipf.WLSE2)
        assert crit.t_c == pytest.approx(
            zipf.subsampling_rate(crit.f_rc_norm), rel=1e-12)
        assert keep_probability(crit.f_rc_norm, crit.t_c) == pytest.approx(1.0, abs=1e-9)

    def test_larger_corpus_smaller_rate(self):
        # scaling all counts up shrinks the normalized critical frequency
        base = (10_000 / np.arange(1, 1001)).astype(int) + 1
        small = vocab_from_counts(np.sort(base)[::-1])
        big = vocab_from_counts(np.sort(base * 16)[::-1])
        for method in (zipf.WLSE1, zipf.WLSE2):
            assert zipf.derive_rate(big, method).t_c < zipf.derive_rate(small, method).t_c

    def test_search_variant(self):
        counts = np.array([900, 300, 80, 30, 9, 3], dtype=np.int64)
        vocab = vocab_from_counts(counts)
        crit = zipf.derive_rate_by_search(vocab)
        assert crit.r_c == zipf.critical_word_search(counts)
        assert crit.f_rc_raw == counts[int(crit.r_c) - 1]


class TestFitReport:
    def test_key_value_lines(self):
        counts = 840.0 / np.arange(1, 9)
        fit = zipf.fit_wlse2(counts)
        crit = zipf.critical_word(fit, total_tokens=int(counts.sum()))
        report = zipf.fit_report(fit, crit)
        fields = dict(line.split("=") for line in report.strip().splitlines())
        assert fields["method"] == "wlse2"
        assert float(fields["beta_hat"]) == pytest.approx(1.0, rel=1e-9)
        assert float(fields["gamma_hat"]) == pytest.approx(840.0, rel=1e-9)
        assert float(fields["t_c"]) == pytest.approx(crit.t_c, rel=1e-9)
        # 10 significant digits requested
        assert len(fields["beta_hat"].replace(".", "").replace("-", "").lstrip("0")) >= 10
