"""Independence test family: statistics, p-values, reductions, size."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

import mint.independence as mi
from mint import TestConfig as Cfg
from mint import (
    BlockedSample,
    NormalMarginal,
    SamplerDimensionMismatchError,
    UniformMarginal,
    gen_sinusoidal,
    mint_auto,
    mint_av,
    mint_known,
    mint_multi,
    mint_unknown,
    mutual_information,
    select_k,
)
from mint.independence import build_outcome, quantile_index
from mint.rng import stream

from conftest import mc_map


# ---------------------------------------------------------------------------
# BlockedSample


class TestBlockedSample:
    def test_from_xy(self):
        rng = np.random.default_rng(0)
        s = BlockedSample.from_xy(rng.normal(size=(10, 2)), rng.normal(size=10))
        assert s.blocks == ((0, 2), (2, 3))
        assert s.n == 10 and s.d == 3 and s.n_blocks == 2

    def test_rejects_bad_blocks(self):
        pts = np.random.default_rng(0).normal(size=(10, 3))
        for blocks in [((0, 2),), ((0, 2), (2, 2)), ((0, 1), (2, 3)), ((0, 2), (1, 3))]:
            with pytest.raises(ValueError):
                BlockedSample(pts, blocks)

    def test_rejects_tiny_sample(self):
        with pytest.raises(ValueError):
            BlockedSample(np.random.default_rng(0).normal(size=(3, 2)), ((0, 1), (1, 2)))


# ---------------------------------------------------------------------------
# Exact p-value machinery


class TestOutcomeMachinery:
    @settings(max_examples=300, deadline=None)
    @given(
        st.lists(
            st.floats(min_value=-5, max_value=5, allow_nan=False), min_size=1, max_size=40
        ),
        st.floats(min_value=-5, max_value=5, allow_nan=False),
        st.floats(min_value=0.001, max_value=0.999),
        st.booleans(),
    )
    def test_three_way_identity(self, null, t0, q, force_tie):
        if force_tie:
            null[0] = t0
        null = np.array(null)
        out = build_outcome(t0, null, q, seed=0, k=1)
        big = 1 + int(np.count_nonzero(null >= t0))
        assert out.p_value == pytest.approx(big / (len(null) + 1))
        assert round(out.p_value * (len(null) + 1)) == big
        assert 0 < out.p_value <= 1
        assert out.reject == (out.p_value <= q) == (t0 > out.critical_value)
        # critical value is the (m+1)-th largest of all B+1 statistics
        m = quantile_index(len(null), q)
        everything = np.concatenate(([t0], null))
        assert np.count_nonzero(everything >= out.critical_value) >= m + 1
        assert np.count_nonzero(everything > out.critical_value) <= m

    def test_quantile_index_edges(self):
        assert quantile_index(99, 0.05) == 5
        assert quantile_index(9, 0.1) == 1
        assert quantile_index(1, 0.05) == 0
        assert quantile_index(999, 0.001) == 1

    def test_single_resample_pvalues(self):
        # With B = 1 the only attainable p-values are 1/2 and 1.
        for t0, t1 in [(3.0, 1.0), (1.0, 3.0), (2.0, 2.0)]:
            out = build_outcome(t0, np.array([t1]), 0.05, seed=0, k=1)
            assert out.p_value in (0.5, 1.0)


# ---------------------------------------------------------------------------
# Mutual information estimates


def _uniform_sample(n, d_each, seed):
    rng = stream(seed, 77)
    return BlockedSample(
        rng.uniform(size=(n, 2 * d_each)), ((0, d_each), (d_each, 2 * d_each))
    )


def sinusoidal_mi_by_quadrature() -> float:
    """Numerical quadrature of the dependence integral of the sinusoidal law."""

    def integrand(u, v):
        t = math.sin(u) * math.sin(v)
        return (1.0 + t) * math.log1p(t) if t > -1.0 else 0.0

    inner, _ = integrate.dblquad(
        integrand, -math.pi, math.pi, -math.pi, math.pi, epsabs=1e-10
    )
    return inner / (4.0 * math.pi**2)


class TestMutualInformation:
    def test_independent_uniforms_near_zero(self):
        cfg = Cfg(k_joint=5, k_marginals=5)
        ests = [
            mutual_information(_uniform_sample(2000, 1, seed=s), cfg) for s in range(8)
        ]
        assert abs(float(np.mean(ests))) < 0.05

    def test_correlated_gaussian_closed_form(self):
        rho = 0.5
        rng = stream(3, 77)
        z1 = rng.standard_normal(5000)
        z2 = rng.standard_normal(5000)
        y = rho * z1 + math.sqrt(1 - rho * rho) * z2
        s = BlockedSample.from_xy(z1, y)
        target = -0.5 * math.log(1.0 - rho * rho)
        est = mutual_information(s, Cfg(k_joint=5, k_marginals=5))
        assert abs(est - target) < 0.02

    def test_sinusoidal_against_quadrature_oracle(self):
        target = sinusoidal_mi_by_quadrature()
        cfg = Cfg(k_joint=5, k_marginals=5)
        ests = [
            mutual_information(gen_sinusoidal(1, 10_000, seed=s), cfg)
            for s in range(5)
        ]
        assert abs(float(np.mean(ests)) - target) < 0.04

    def test_three_block_sum_form(self):
        rng = stream(9, 77)
        pts = rng.standard_normal((2000, 3))
        s = BlockedSample(pts, ((0, 1), (1, 2), (2, 3)))
        assert abs(mutual_information(s, Cfg(k_joint=5, k_marginals=5))) < 0.05


# ---------------------------------------------------------------------------
# MINT with a known marginal


class TestMintKnown:
    def test_single_resample_pvalue_set(self):
        s = _uniform_sample(50, 1, seed=1)
        out = mint_known(
            s, UniformMarginal(0.0, 1.0, 1), Cfg(B=1, k_joint=3, k_marginals=3)
        )
        assert out.p_value in (0.5, 1.0)

    def test_dimension_mismatch(self):
        s = _uniform_sample(50, 2, seed=2)
        with pytest.raises(SamplerDimensionMismatchError):
            mint_known(s, UniformMarginal(0.0, 1.0, 1), Cfg())

    def test_deterministic(self):
        s = _uniform_sample(80, 1, seed=3)
        cfg = Cfg(B=19, seed=42, k_joint=4, k_marginals=4)
        a = mint_known(s, UniformMarginal(0.0, 1.0, 1), cfg)
        b = mint_known(s, UniformMarginal(0.0, 1.0, 1), cfg)
        assert a.statistic == b.statistic
        assert np.array_equal(a.null_stats, b.null_stats)
        assert a.p_value == b.p_value

    def test_power_under_strong_dependence(self):
        # Nearly deterministic relation: reject in at least 90% of runs.
        def one(seed):
            rng = stream(seed, 99)
            x = rng.standard_normal(200)
            y = x + 0.05 * rng.standard_normal(200)
            s = BlockedSample.from_xy(x, y)
            sampler = NormalMarginal(0.0, math.sqrt(1.0025), 1)
            return mint_known(s, sampler, Cfg(B=99, seed=seed)).p_value

        pvals = np.array(mc_map(one, range(200)))
        assert np.mean(pvals <= 0.05) >= 0.90


# ---------------------------------------------------------------------------
# MINT with unknown marginals (permutation test)


class TestMintUnknown:
    def test_statistic_independent_of_seed(self):
        s = _uniform_sample(100, 1, seed=4)
        a = mint_unknown(s, Cfg(B=19, seed=1))
        b = mint_unknown(s, Cfg(B=19, seed=2))
        assert a.statistic == b.statistic

    def test_global_scaling_leaves_pvalue_unchanged(self):
        for seed in range(3):
            s = _uniform_sample(100, 1, seed=seed)
            base = mint_unknown(s, Cfg(B=49, seed=7))
            for c in (2.0, 0.5, 3.7):
                scaled = BlockedSample(c * s.points, s.blocks)
                out = mint_unknown(scaled, Cfg(B=49, seed=7))
                assert out.p_value == base.p_value
                assert out.reject == base.reject

    def test_full_statistic_gives_same_decisions(self):
        for seed in range(5):
            s = _uniform_sample(60, 1, seed=seed)
            cfg = Cfg(B=49, seed=seed, k_joint=4, k_marginals=4)
            reduced = mint_unknown(s, cfg)
            full = mint_unknown(s, cfg, statistic_mode="full")
            assert reduced.p_value == full.p_value
            assert reduced.reject == full.reject

    def test_high_power_on_sinusoidal(self):
        def one(seed):
            s = gen_sinusoidal(1, 200, seed=seed)
            return mint_unknown(s, Cfg(k_joint=2, B=99, seed=seed)).reject

        rejects = mc_map(one, range(100))
        assert np.mean(rejects) > 0.5


# ---------------------------------------------------------------------------
# Multiscale and data-driven variants


class TestMintAvAndAuto:
    def test_singleton_grid_recovers_permutation_test(self):
        for seed in (0, 5):
            s = _uniform_sample(120, 1, seed=seed)
            cfg = Cfg(B=49, seed=seed)
            av = mint_av(s, [6], cfg)
            unk = mint_unknown(s, Cfg(B=49, seed=seed, k_joint=6))
            assert av.statistic == unk.statistic
            assert np.array_equal(av.null_stats, unk.null_stats)
            assert av.p_value == unk.p_value

    def test_av_orientation_rejects_low_entropy(self):
        s = gen_sinusoidal(1, 200, seed=11)
        out = mint_av(s, range(1, 21), Cfg(B=99, seed=11))
        # Dependent data: observed joint entropy below most permuted ones.
        assert out.p_value < 0.5

    def test_auto_singleton_grid(self):
        s = _uniform_sample(80, 1, seed=6)
        out = mint_auto(s, [5], 10, Cfg(B=19, seed=6))
        assert out.k_hat == 5 and out.k == 5

    def test_auto_tie_breaks_to_smaller_k(self, monkeypatch):
        # Force identical selection criteria for every k: sargmin rule applies.
        monkeypatch.setattr(
            mi,
            "_unweighted_profile_entropies",
            lambda points, grid, brute: np.zeros(len(grid)),
        )
        s = _uniform_sample(80, 1, seed=7)
        assert select_k(s, [4, 9, 17], 5, Cfg(seed=7)) == 4

    def test_auto_end_to_end_on_sinusoidal(self):
        s = gen_sinusoidal(2, 200, seed=13)
        out = mint_auto(s, range(1, 21), 100, Cfg(B=99, seed=13))
        assert out.k_hat in range(1, 21)
        assert out.k == out.k_hat
        assert 0 < out.p_value <= 1

    def test_auto_size_under_null(self):
        # Independent uniforms on [-pi, pi]: rejection rate within the
        # binomial envelope of the nominal level over 200 runs.
        def one(seed):
            rng = stream(seed, 123)
            pts = rng.uniform(-math.pi, math.pi, size=(200, 2))
            s = BlockedSample(pts, ((0, 1), (1, 2)))
            out = mint_auto(s, range(1, 21), 100, Cfg(B=99, q=0.05, seed=seed))
            return out.reject

        rate = float(np.mean(mc_map(one, range(200))))
        assert rate <= 0.05 + 3.0 * math.sqrt(0.05 * 0.95 / 200)


# ---------------------------------------------------------------------------
# Multi-block test


class TestMintMulti:
    def test_two_blocks_reduces_to_unknown(self):
        s = _uniform_sample(100, 1, seed=8)
        cfg = Cfg(B=49, seed=3)
        multi = mint_multi(s, cfg)
        unk = mint_unknown(s, cfg)
        assert multi.statistic == unk.statistic
        assert np.array_equal(multi.null_stats, unk.null_stats)
        assert multi.p_value == unk.p_value

    def test_rejects_strong_pairwise_dependence(self):
        def one(seed):
            rng = stream(seed, 55)
            x = rng.standard_normal(200)
            w = x + 0.01 * rng.standard_normal(200)
            u = rng.uniform(size=200)
            s = BlockedSample(np.column_stack((x, w, u)), ((0, 1), (1, 2), (2, 3)))
            return mint_multi(s, Cfg(B=99, seed=seed)).p_value

        pvals = np.array(mc_map(one, range(200)))
        assert np.mean(pvals <= 0.05) >= 0.90

    def test_requires_blocks(self):
        pts = np.random.default_rng(0).normal(size=(30, 2))
        single = BlockedSample(pts, ((0, 2),))
        with pytest.raises(ValueError):
            mint_multi(single, Cfg())
