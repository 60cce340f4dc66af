"""Boundary peeling, depth weighting, KDS scores and the Tukey fence."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bpeel.errors import InputError, TooFewRows, TooFewScores
from bpeel.ocsvm import SV_TOLERANCE, box_upper
from bpeel.peel import (
    PeelParams,
    PeelTrace,
    boundary_peel,
    bp_detect,
    depth_weights,
    kds_scores,
    tukey_threshold,
)
from bpeel.synth import ModeSpec, ScenarioConfig, generate

import oracles


def datasets(min_rows=3, max_rows=14, max_cols=4):
    shape = st.tuples(st.integers(min_rows, max_rows), st.integers(1, max_cols))
    return shape.flatmap(
        lambda s: arrays(np.float64, s, elements=st.floats(-5, 5, allow_nan=False))
    )


def plane_scatter_config(seed=11):
    return ScenarioConfig(
        modes=(ModeSpec("t", 100),), p=2, outlier_count=10, outlier_range=10.0, seed=seed
    )


def manual_trace(D, depths):
    D = np.asarray(D, dtype=float)
    return PeelTrace(
        depths=np.asarray(depths),
        decision_matrix=D,
        removed_counts=np.array([len(depths)]),
    )


class TestPeelParams:
    def test_defaults(self):
        params = PeelParams()
        assert (params.nu, params.n_peel) == (0.01, 2)

    def test_n_peel_positive(self):
        with pytest.raises(InputError):
            PeelParams(n_peel=0)

    def test_invalid_nu_surfaces_early(self):
        with pytest.raises(InputError):
            PeelParams(nu=2.0)


class TestBoundaryPeel:
    def test_three_rows_one_peel(self):
        X = np.array([[0.0, 0.0], [1.0, 0.5], [-0.5, 2.0]])
        trace = boundary_peel(X)
        assert trace.peel_count == 1
        assert trace.decision_matrix.shape == (3, 1)
        np.testing.assert_array_equal(trace.depths, [1, 1, 1])

    @pytest.mark.parametrize("n", [1, 2])
    def test_too_few_rows(self, n):
        with pytest.raises(TooFewRows):
            boundary_peel(np.zeros((n, 2)))

    def test_far_point_removed_first(self):
        rng = np.random.default_rng(3)
        X = np.vstack([rng.normal(0, 0.3, size=(4, 2)), [[8.0, 8.0]]])
        alpha, _ = oracles.qp_oracle(oracles.gram(X, 2.0), box_upper(0.01, 5))
        assert alpha[4] > SV_TOLERANCE
        trace = boundary_peel(X)
        assert trace.depths[4] == 1

    def test_decision_matrix_scores_every_row(self, rng):
        X = rng.standard_normal((20, 3))
        trace = boundary_peel(X)
        assert trace.decision_matrix.shape == (20, trace.peel_count)
        assert np.all(np.isfinite(trace.decision_matrix))

    def test_forced_removal_guard(self, rng):
        # no multiplier can exceed this tolerance, so every peel is forced
        X = rng.standard_normal((8, 2))
        trace = boundary_peel(X, PeelParams(sv_tolerance=0.99))
        assert trace.peel_count == 6
        assert trace.forced == tuple(range(1, 7))
        np.testing.assert_array_equal(trace.removed_counts, 1)

    def test_plane_scatter_peel_count_and_early_removal(self):
        counts, outlier_depths = [], []
        for r in range(20):
            data = generate(plane_scatter_config(), r)
            trace = boundary_peel(data.data)
            counts.append(trace.peel_count)
            outlier_depths.extend(trace.depths[data.labels])
        assert 8 <= np.median(counts) <= 20
        assert np.mean(np.array(outlier_depths) <= 2) >= 0.9

    @given(datasets())
    def test_depth_partition(self, X):
        trace = boundary_peel(X)
        n, peels = X.shape[0], trace.peel_count
        assert np.all((1 <= trace.depths) & (trace.depths <= peels))
        survivors = n - int(trace.removed_counts.sum())
        assert 0 <= survivors <= 2
        for j, removed in enumerate(trace.removed_counts, start=1):
            expected = removed + (survivors if j == peels else 0)
            assert np.sum(trace.depths == j) == expected
        assert np.all(trace.removed_counts >= 1)

    @given(datasets())
    def test_termination(self, X):
        trace = boundary_peel(X)
        assert 1 <= trace.peel_count <= X.shape[0]
        assert trace.decision_matrix.shape == (X.shape[0], trace.peel_count)
        assert np.all(np.isfinite(trace.decision_matrix))

    @given(datasets(min_rows=4), st.integers(1, 3))
    def test_n_peel_respected(self, X, n_peel):
        trace = boundary_peel(X, PeelParams(n_peel=n_peel))
        survivors = X.shape[0] - int(trace.removed_counts.sum())
        assert survivors <= n_peel
        # the last boundary was fitted on more than n_peel rows
        assert survivors + trace.removed_counts[-1] > n_peel

    def test_first_column_is_full_fit(self, rng):
        from bpeel.ocsvm import decision_scores, fit

        X = rng.standard_normal((15, 2))
        trace = boundary_peel(X)
        np.testing.assert_array_equal(trace.decision_matrix[:, 0], decision_scores(fit(X), X))


class TestWeightsAndScores:
    def test_outermost_weight(self):
        trace = manual_trace(np.zeros((2, 10)), [1, 10])
        np.testing.assert_array_equal(depth_weights(trace), [10.0, 1.0])

    def test_kds_hand_value(self):
        trace = manual_trace([[2.0, 4.0], [1.0, 1.0]], [1, 2])
        np.testing.assert_array_equal(kds_scores(trace), [6.0, 1.0])

    @given(datasets())
    def test_weight_bounds(self, X):
        trace = boundary_peel(X)
        d = depth_weights(trace)
        assert np.all((1.0 <= d) & (d <= trace.peel_count))

    @given(datasets())
    def test_kds_definition(self, X):
        trace = boundary_peel(X)
        expected = trace.peel_count / trace.depths * trace.decision_matrix.mean(axis=1)
        np.testing.assert_array_equal(kds_scores(trace), expected)


class TestTukeyThreshold:
    def test_five_scores(self):
        assert tukey_threshold([1, 2, 3, 4, 5]) == 7.0

    def test_four_scores(self):
        assert tukey_threshold([1, 2, 3, 4]) == 5.5

    def test_order_irrelevant(self):
        assert tukey_threshold([4, 1, 3, 2]) == 5.5

    def test_constant_scores(self):
        scores = np.full(9, 0.25)
        h = tukey_threshold(scores)
        assert h == 0.25
        assert not np.any(scores > h)

    @pytest.mark.parametrize("scores", [[], [1.0]])
    def test_too_few(self, scores):
        with pytest.raises(TooFewScores):
            tukey_threshold(scores)

    @given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=40))
    def test_matches_type7_oracle(self, scores):
        q1 = oracles.type7_quantile(scores, 0.25)
        q3 = oracles.type7_quantile(scores, 0.75)
        assert tukey_threshold(scores) == pytest.approx(q3 + 1.5 * (q3 - q1), rel=1e-12, abs=1e-6)


class TestBpDetect:
    @given(datasets())
    def test_flag_consistency(self, X):
        result = bp_detect(X)
        np.testing.assert_array_equal(result.flags, result.scores > result.threshold)
        assert result.threshold == tukey_threshold(result.scores)
        assert result.n_flagged == int(result.flags.sum())

    def test_deterministic(self, rng):
        X = rng.standard_normal((40, 5))
        a, b = bp_detect(X), bp_detect(X)
        assert a.scores.tobytes() == b.scores.tobytes()
        assert a.threshold == b.threshold
        np.testing.assert_array_equal(a.flags, b.flags)
        assert a.trace.decision_matrix.tobytes() == b.trace.decision_matrix.tobytes()
        np.testing.assert_array_equal(a.trace.depths, b.trace.depths)

    def test_clean_gaussian_rarely_flags(self):
        config = ScenarioConfig(modes=(ModeSpec("normal", 50),), p=100, seed=5)
        flagged = [bp_detect(generate(config, r).data).n_flagged for r in range(10)]
        assert sum(f == 0 for f in flagged) >= 8

    def test_isolated_cluster_flagged(self, rng):
        X = np.vstack([rng.standard_normal((60, 2)), [[9.0, 9.0], [-9.0, 9.5]]])
        result = bp_detect(X)
        assert result.flags[-2:].all()

    def test_elapsed_recorded(self, rng):
        result = bp_detect(rng.standard_normal((10, 2)))
        assert result.elapsed > 0
        assert result.peel_count == result.trace.peel_count

    def test_kernel_bandwidth_override(self, rng):
        X = rng.standard_normal((12, 3))
        default = boundary_peel(X)
        pinned = boundary_peel(X, PeelParams(bandwidth=3.0))
        assert default.decision_matrix.tobytes() == pinned.decision_matrix.tobytes()
        wide = boundary_peel(X, PeelParams(bandwidth=30.0))
        assert wide.decision_matrix.tobytes() != default.decision_matrix.tobytes()
