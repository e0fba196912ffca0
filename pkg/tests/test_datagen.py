"""Scenario generators: distributional checks and determinism."""

import math

import numpy as np
import pytest
from scipy import stats

from mint import TestConfig as Cfg
from mint import (
    ScenarioSpec,
    gen_circular,
    gen_gaussian,
    gen_multiplicative,
    gen_sinusoidal,
    generate,
    make_multivariate,
    mutual_information,
    scenario_y_sampler,
)
from mint.knn import find_duplicate_rows
from mint.rng import stream

N_BIG = 100_000


def test_generators_are_deterministic():
    for spec in [
        ScenarioSpec("sinusoidal", 500, param=2, seed=9),
        ScenarioSpec("circular", 500, param=3, seed=9),
        ScenarioSpec("multiplicative", 500, param=1.0, seed=9),
        ScenarioSpec("gaussian-null", 500, seed=9),
        ScenarioSpec("gaussian-corr", 500, param=0.5, seed=9),
        ScenarioSpec("sinusoidal", 500, param=1, multivariate=True, seed=9),
    ]:
        a, b = generate(spec), generate(spec)
        assert np.array_equal(a.points, b.points)
        assert a.blocks == b.blocks


def test_spec_validation():
    with pytest.raises(ValueError):
        ScenarioSpec("sinusoidal", 100, param=0)
    with pytest.raises(ValueError):
        ScenarioSpec("multiplicative", 100, param=-1.0)
    with pytest.raises(ValueError):
        ScenarioSpec("nonsense", 100)


class TestSinusoidal:
    def test_marginals_uniform(self):
        for l in (1, 3):
            s = gen_sinusoidal(l, N_BIG, seed=4)
            for col in (0, 1):
                u = (s.points[:, col] + math.pi) / (2.0 * math.pi)
                ks = stats.kstest(u, "uniform").statistic
                assert ks < 0.02, (l, col)

    def test_chi_squared_against_density(self):
        # 20 x 20 grid; cell masses integrate the density exactly.
        edges = np.linspace(-math.pi, math.pi, 21)

        def sin_integral(l, a, b):
            return (math.cos(l * a) - math.cos(l * b)) / l

        for l in (1, 2, 4):
            s = gen_sinusoidal(l, N_BIG, seed=5)
            counts, _, _ = np.histogram2d(s.points[:, 0], s.points[:, 1], bins=[edges, edges])
            probs = np.empty((20, 20))
            for i in range(20):
                sx = sin_integral(l, edges[i], edges[i + 1])
                wx = edges[i + 1] - edges[i]
                for j in range(20):
                    sy = sin_integral(l, edges[j], edges[j + 1])
                    wy = edges[j + 1] - edges[j]
                    probs[i, j] = (wx * wy + sx * sy) / (4.0 * math.pi**2)
            chi2 = ((counts - N_BIG * probs) ** 2 / (N_BIG * probs)).sum()
            threshold = stats.chi2.ppf(1.0 - 0.001, 399)
            assert chi2 < threshold, (l, chi2, threshold)

    def test_acceptance_rate_near_half(self):
        # Rejection proposes ~2x what it keeps; just check sample comes out.
        s = gen_sinusoidal(1, 1000, seed=6)
        assert s.points.shape == (1000, 2)
        assert np.all(np.abs(s.points) <= math.pi)


class TestCircular:
    def test_radius_second_moment(self):
        s = gen_circular(1, N_BIG, seed=7)
        r2 = (s.points**2).sum(axis=1)
        target = 1.0 + 2.0 / 16.0
        se = r2.std() / math.sqrt(N_BIG)
        assert abs(r2.mean() - target) < 4.0 * se + 1e-12

    def test_rotational_symmetry(self):
        s = gen_circular(1, N_BIG, seed=8)
        x, y = s.points[:, 0], s.points[:, 1]
        assert abs(np.corrcoef(x, y)[0, 1]) < 0.02
        assert abs(x.mean()) < 0.02

    def test_multiple_radii(self):
        s = gen_circular(4, N_BIG, seed=9)
        r = np.sqrt((s.points**2).sum(axis=1))
        assert r.max() > 3.0  # outer rings are populated


class TestMultiplicative:
    def test_uncorrelated_for_all_rho(self):
        for rho in (0.5, 1.0, 2.0):
            s = gen_multiplicative(rho, N_BIG, seed=10)
            assert abs(np.corrcoef(s.points[:, 0], s.points[:, 1])[0, 1]) < 0.02

    def test_scale_dependence_visible_in_magnitudes(self):
        s = gen_multiplicative(1.0, N_BIG, seed=11)
        c = np.corrcoef(np.abs(s.points[:, 0]), np.abs(s.points[:, 1]))[0, 1]
        assert c > 0.1

    def test_rho_zero_is_independent(self):
        s = gen_multiplicative(0.0, N_BIG, seed=12)
        assert abs(np.corrcoef(s.points[:, 0], s.points[:, 1])[0, 1]) < 0.02


class TestMakeMultivariate:
    def test_appended_columns_uniform(self):
        base = gen_gaussian(N_BIG, seed=13)
        s = make_multivariate(base, seed=13)
        for col in (1, 3):
            assert stats.kstest(s.points[:, col], "uniform").statistic < 0.02

    def test_original_columns_unchanged(self):
        base = gen_sinusoidal(1, 5000, seed=14)
        s = make_multivariate(base, seed=14)
        assert np.array_equal(s.points[:, 0], base.points[:, 0])
        assert np.array_equal(s.points[:, 2], base.points[:, 1])
        assert s.blocks == ((0, 2), (2, 4))

    def test_appended_columns_do_not_change_mutual_information(self):
        # The 4-d joint entropy needs the bias-cancelling weights and a
        # small neighbour order to stay accurate at this sample size.
        cfg = Cfg(k_joint=4, k_marginals=5, weight_mode="auto-solve")
        base_vals, multi_vals = [], []
        for seed in range(5):
            base = gen_sinusoidal(1, 10_000, seed=seed)
            multi = make_multivariate(base, seed=seed)
            base_vals.append(mutual_information(base, cfg))
            multi_vals.append(mutual_information(multi, cfg))
        assert abs(float(np.mean(base_vals)) - float(np.mean(multi_vals))) <= 0.03

    def test_requires_two_scalar_blocks(self):
        base = gen_sinusoidal(1, 1000, seed=15)
        multi = make_multivariate(base, seed=15)
        with pytest.raises(ValueError):
            make_multivariate(multi, seed=15)


def test_no_exact_duplicates_at_scale():
    for spec in [
        ScenarioSpec("sinusoidal", N_BIG, param=1, seed=16),
        ScenarioSpec("multiplicative", N_BIG, param=1.0, seed=16),
    ]:
        assert find_duplicate_rows(generate(spec).points) == []


def test_scenario_y_samplers_match_marginals():
    # Compare the declared Y marginal with generated scenario data.
    rng = stream(17, 0)
    for setting, param in [
        ("sinusoidal", 1),
        ("circular", 2),
        ("multiplicative", 1.0),
        ("gaussian-null", None),
    ]:
        sampler = scenario_y_sampler(setting, param)
        draws = sampler.sample(rng, 20_000)[:, 0]
        data = generate(ScenarioSpec(setting, 20_000, param=param, seed=18))
        y = data.block(1)[:, 0]
        ks = stats.ks_2samp(draws, y).statistic
        assert ks < 0.025, setting
