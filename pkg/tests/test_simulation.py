"""Tests for the simulation harness: samplers, corruption models, sweeps."""

import math

import numpy as np
import pytest

from npn.errors import DomainError, NotPositiveDefinite
from npn.estimators import EstimatorConfig, EstimatorKind
from npn.matrix_core import as_correlation, bandable_eigen_bounds, is_bandable
from npn.rank_stats import compute_ranks
from npn.simulation import (
    ExperimentId,
    ExperimentSpec,
    MarginalTransform,
    TrialRecord,
    apply_marginal_transform,
    inject_outliers,
    mse_aggregate,
    run_experiment,
    sample_bandable,
    sample_correlation_wishart,
    sample_gaussian,
)


class TestSampleCorrelationWishart:
    def test_is_a_correlation_matrix(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            s = sample_correlation_wishart(6, rng)
            as_correlation(s)  # raises on violation
            np.testing.assert_array_equal(np.diag(s), np.ones(6))
            assert np.all(np.abs(s) <= 1.0 + 1e-12)

    def test_positive_definite(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            s = sample_correlation_wishart(5, rng)
            assert np.linalg.eigvalsh(s).min() > 0

    def test_off_diagonal_mean_near_zero(self):
        rng = np.random.default_rng(2)
        vals = []
        for _ in range(2000):
            s = sample_correlation_wishart(4, rng)
            vals.extend(s[np.triu_indices(4, k=1)])
        assert abs(np.mean(vals)) <= 0.02

    def test_single_dimension(self):
        rng = np.random.default_rng(3)
        s = sample_correlation_wishart(1, rng)
        np.testing.assert_array_equal(s, np.ones((1, 1)))


class TestSampleGaussian:
    def test_shape(self):
        rng = np.random.default_rng(4)
        x = sample_gaussian(np.eye(3), 17, rng)
        assert x.shape == (17, 3)

    def test_moments_match_target(self):
        rng = np.random.default_rng(5)
        s = np.array([[1.0, 0.6], [0.6, 1.0]])
        x = sample_gaussian(s, 100_000, rng)
        np.testing.assert_allclose(x.mean(axis=0), 0.0, atol=0.02)
        emp = x.T @ x / len(x)
        np.testing.assert_allclose(emp, s, atol=0.03)

    def test_rejects_non_positive_definite(self):
        rng = np.random.default_rng(6)
        with pytest.raises(NotPositiveDefinite):
            sample_gaussian(np.ones((2, 2)), 10, rng)


class TestMarginalTransforms:
    def test_alpha_zero_is_identity(self):
        rng = np.random.default_rng(7)
        x = rng.standard_normal((20, 4))
        np.testing.assert_array_equal(
            apply_marginal_transform(x, 0.0, MarginalTransform.EXP), x
        )

    def test_alpha_one_hits_every_column(self):
        rng = np.random.default_rng(8)
        x = rng.standard_normal((20, 4))
        out = apply_marginal_transform(x, 1.0, MarginalTransform.EXP)
        np.testing.assert_array_equal(out, np.exp(x))

    def test_fractional_alpha_hits_leading_columns(self):
        rng = np.random.default_rng(9)
        x = rng.standard_normal((20, 4))
        out = apply_marginal_transform(x, 0.5, MarginalTransform.CUBIC)
        np.testing.assert_array_equal(out[:, :2], x[:, :2] ** 3)
        np.testing.assert_array_equal(out[:, 2:], x[:, 2:])

    def test_does_not_mutate_input(self):
        rng = np.random.default_rng(10)
        x = rng.standard_normal((10, 2))
        before = x.copy()
        apply_marginal_transform(x, 1.0, MarginalTransform.TANH)
        np.testing.assert_array_equal(x, before)

    @pytest.mark.parametrize("transform", list(MarginalTransform))
    def test_every_transform_preserves_ranks(self, transform):
        rng = np.random.default_rng(11)
        x = rng.standard_normal((50, 3))
        out = apply_marginal_transform(x, 1.0, transform)
        np.testing.assert_array_equal(compute_ranks(out), compute_ranks(x))


class TestInjectOutliers:
    def test_beta_zero_is_identity(self):
        rng = np.random.default_rng(12)
        x = rng.standard_normal((30, 3))
        np.testing.assert_array_equal(inject_outliers(x, 0.0, rng), x)

    def test_replacement_count_per_column(self):
        rng = np.random.default_rng(13)
        x = rng.standard_normal((50, 4))
        out = inject_outliers(x, 0.2, rng)
        for j in range(4):
            changed = np.flatnonzero(out[:, j] != x[:, j])
            assert len(changed) == 10
            assert set(np.abs(out[changed, j])) == {5.0}

    def test_floor_of_beta_n(self):
        rng = np.random.default_rng(14)
        x = rng.standard_normal((10, 1))
        out = inject_outliers(x, 0.19, rng)
        assert np.sum(out[:, 0] != x[:, 0]) == 1

    def test_columns_are_corrupted_independently(self):
        rng = np.random.default_rng(15)
        x = rng.standard_normal((200, 2))
        out = inject_outliers(x, 0.3, rng)
        rows_a = set(np.flatnonzero(out[:, 0] != x[:, 0]))
        rows_b = set(np.flatnonzero(out[:, 1] != x[:, 1]))
        assert rows_a != rows_b

    def test_does_not_mutate_input(self):
        rng = np.random.default_rng(16)
        x = rng.standard_normal((40, 2))
        before = x.copy()
        inject_outliers(x, 0.25, rng)
        np.testing.assert_array_equal(x, before)


class TestExperimentSpec:
    def test_defaults_resolve_per_experiment(self):
        spec = ExperimentSpec(ExperimentId.SAMPLE_SIZE).resolved()
        assert spec.sweep == (32, 64, 128, 256, 512, 1024)
        spec = ExperimentSpec(ExperimentId.MARGINALS).resolved()
        assert spec.sweep == (0.0, 0.25, 0.5, 0.75, 1.0)
        spec = ExperimentSpec(ExperimentId.OUTLIERS).resolved()
        assert spec.sweep == (0.0, 0.1, 0.2, 0.3)
        spec = ExperimentSpec(ExperimentId.SIGMA).resolved()
        assert spec.sweep == (0.0, 0.3, 0.6, 0.9, 0.99, 0.999)

    def test_sigma_experiment_forces_two_columns(self):
        spec = ExperimentSpec(ExperimentId.SIGMA, d=25).resolved()
        assert spec.d == 2

    def test_outlier_experiment_defaults_to_wide_neighborhood(self):
        spec = ExperimentSpec(ExperimentId.OUTLIERS).resolved()
        knn = [c for c in spec.estimators if c.kind is EstimatorKind.KNN]
        assert len(knn) == 1 and knn[0].k == 20

    def test_other_experiments_default_to_small_neighborhood(self):
        spec = ExperimentSpec(ExperimentId.SAMPLE_SIZE).resolved()
        knn = [c for c in spec.estimators if c.kind is EstimatorKind.KNN]
        assert len(knn) == 1 and knn[0].k == 2

    def test_sweep_param_names(self):
        assert ExperimentId.SAMPLE_SIZE.sweep_param == "n"
        assert ExperimentId.MARGINALS.sweep_param == "alpha"
        assert ExperimentId.OUTLIERS.sweep_param == "beta"
        assert ExperimentId.SIGMA.sweep_param == "sigma"

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"trials": 0},
            {"n": 1},
            {"d": 0},
            {"seed": -1},
            {"sweep": (10.5,)},
        ],
    )
    def test_rejects_bad_sample_size_settings(self, kwargs):
        with pytest.raises(DomainError):
            ExperimentSpec(ExperimentId.SAMPLE_SIZE, **kwargs)

    def test_rejects_alpha_outside_unit_interval(self):
        with pytest.raises(DomainError):
            ExperimentSpec(ExperimentId.MARGINALS, sweep=(1.5,))

    def test_rejects_sigma_at_unit_magnitude(self):
        with pytest.raises(DomainError):
            ExperimentSpec(ExperimentId.SIGMA, sweep=(1.0,))


def rho_only():
    return (EstimatorConfig(EstimatorKind.RHO, z=1e-3),)


class TestRunExperiment:
    def test_summary_grid_is_sweep_major(self):
        spec = ExperimentSpec(
            ExperimentId.SIGMA,
            trials=3,
            n=40,
            sweep=(0.0, 0.6),
            estimators=(
                EstimatorConfig(EstimatorKind.RHO, z=1e-3),
                EstimatorConfig(EstimatorKind.GAUSS),
            ),
        )
        out = run_experiment(spec)
        assert [(s.sweep_value, s.estimator) for s in out] == [
            (0.0, EstimatorKind.RHO),
            (0.0, EstimatorKind.GAUSS),
            (0.6, EstimatorKind.RHO),
            (0.6, EstimatorKind.GAUSS),
        ]
        assert all(s.trials == 3 for s in out)

    def test_deterministic_given_seed(self):
        spec = ExperimentSpec(
            ExperimentId.MARGINALS,
            trials=3,
            n=50,
            d=4,
            sweep=(0.0, 0.5),
            estimators=rho_only(),
            seed=9,
        )
        assert run_experiment(spec) == run_experiment(spec)

    def test_seed_changes_the_draws(self):
        base = dict(trials=3, n=50, d=4, sweep=(0.5,), estimators=rho_only())
        a = run_experiment(ExperimentSpec(ExperimentId.MARGINALS, seed=0, **base))
        b = run_experiment(ExperimentSpec(ExperimentId.MARGINALS, seed=1, **base))
        assert a != b

    def test_clean_sweep_point_matches_across_experiments(self):
        # with no corruption the outlier experiment at beta = 0 must replay
        # the sample-size experiment at the same n exactly
        a = run_experiment(
            ExperimentSpec(
                ExperimentId.SAMPLE_SIZE,
                trials=5,
                d=5,
                sweep=(100,),
                estimators=rho_only(),
                seed=3,
            )
        )
        b = run_experiment(
            ExperimentSpec(
                ExperimentId.OUTLIERS,
                trials=5,
                n=100,
                d=5,
                sweep=(0.0,),
                estimators=rho_only(),
                seed=3,
            )
        )
        assert a[0].mse == b[0].mse
        assert a[0].stderr == b[0].stderr

    def test_rank_estimators_blind_to_marginal_sweep(self):
        # the sweep value is excluded from the stream keys, so rank methods
        # see identical ranks at every alpha and report identical error
        spec = ExperimentSpec(
            ExperimentId.MARGINALS,
            trials=20,
            n=60,
            d=5,
            sweep=(0.0, 0.5, 1.0),
            estimators=rho_only(),
            seed=4,
        )
        out = run_experiment(spec)
        assert out[0].mse == out[1].mse == out[2].mse

    def test_plugin_suffers_under_full_distortion(self):
        spec = ExperimentSpec(
            ExperimentId.MARGINALS,
            trials=200,
            n=100,
            d=25,
            sweep=(0.0, 1.0),
            estimators=(EstimatorConfig(EstimatorKind.GAUSSIAN_PLUGIN),),
            transform=MarginalTransform.EXP,
            seed=5,
        )
        out = run_experiment(spec)
        clean = next(s for s in out if s.sweep_value == 0.0)
        distorted = next(s for s in out if s.sweep_value == 1.0)
        assert distorted.mse > clean.mse

    def test_heavy_outliers_starve_wide_neighborhoods(self):
        # beta * n = 30 atoms per sign on average exceed k = 20, so most
        # trials produce infinite marginal entropies
        spec = ExperimentSpec(
            ExperimentId.OUTLIERS,
            trials=10,
            n=100,
            d=25,
            sweep=(0.0, 0.3),
            estimators=(EstimatorConfig(EstimatorKind.KNN, k=20),),
            seed=6,
        )
        out = run_experiment(spec)
        assert out[0].finite_fraction == 1.0
        assert out[1].finite_fraction < out[0].finite_fraction


class TestMseAggregate:
    def test_single_record(self):
        out = mse_aggregate([TrialRecord(0.5, EstimatorKind.RHO, 0.04, 0)])
        assert out[0].mse == 0.04
        assert out[0].stderr == 0.0
        assert out[0].finite_fraction == 1.0
        assert out[0].trials == 1

    def test_two_records_average(self):
        out = mse_aggregate(
            [
                TrialRecord(0.5, EstimatorKind.RHO, 0.02, 0),
                TrialRecord(0.5, EstimatorKind.RHO, 0.04, 1),
            ]
        )
        assert out[0].mse == pytest.approx(0.03, abs=1e-15)
        assert out[0].stderr == pytest.approx(np.std([0.02, 0.04], ddof=1) / math.sqrt(2))

    def test_infinite_records_are_dropped_from_mean(self):
        out = mse_aggregate(
            [
                TrialRecord(0.5, EstimatorKind.RHO, 0.02, 0),
                TrialRecord(0.5, EstimatorKind.RHO, math.inf, 1),
            ]
        )
        assert out[0].mse == 0.02
        assert out[0].finite_fraction == 0.5
        assert out[0].trials == 2

    def test_all_infinite_group_still_summarized(self):
        out = mse_aggregate(
            [
                TrialRecord(0.1, EstimatorKind.KNN, math.inf, 0),
                TrialRecord(0.1, EstimatorKind.KNN, math.inf, 1),
            ]
        )
        assert out[0].mse is None
        assert out[0].stderr is None
        assert out[0].finite_fraction == 0.0

    def test_groups_keep_first_seen_order(self):
        records = [
            TrialRecord(0.2, EstimatorKind.RHO, 0.01, 0),
            TrialRecord(0.2, EstimatorKind.TAU, 0.02, 0),
            TrialRecord(0.4, EstimatorKind.RHO, 0.03, 0),
        ]
        out = mse_aggregate(records)
        assert [(s.sweep_value, s.estimator) for s in out] == [
            (0.2, EstimatorKind.RHO),
            (0.2, EstimatorKind.TAU),
            (0.4, EstimatorKind.RHO),
        ]

    def test_empty_input_rejected(self):
        with pytest.raises(DomainError):
            mse_aggregate([])


class TestSampleBandable:
    def test_random_draws_stay_banded(self):
        rng = np.random.default_rng(17)
        for c in (0.1, 0.3):
            for _ in range(25):
                a = sample_bandable(c, 8, rng)
                assert is_bandable(a, c)
                np.testing.assert_array_equal(np.diag(a), np.ones(8))
                np.testing.assert_array_equal(a, a.T)

    def test_boundary_draw_is_the_envelope(self):
        rng = np.random.default_rng(18)
        a = sample_bandable(0.2, 5, rng, boundary=True)
        idx = np.arange(5)
        np.testing.assert_allclose(
            a, 0.2 ** np.abs(idx[:, None] - idx[None, :]), rtol=0, atol=1e-15
        )

    def test_eigenvalues_respect_analytic_bounds(self):
        rng = np.random.default_rng(19)
        for c in (0.1, 0.2, 0.3):
            lo, hi = bandable_eigen_bounds(c, 10)
            for _ in range(50):
                w = np.linalg.eigvalsh(sample_bandable(c, 10, rng))
                assert w.min() >= lo - 1e-9
                assert w.max() <= hi + 1e-9
