import numpy as np
import pytest

from framepoint import (DomainError, FrameGrid, IntensityProfile, ShapeError,
                        build_cumulative, eval_cumulative, eval_hazard,
                        invert_cumulative)
from helpers import random_rates


def profile(rates, fd=0.04):
    rates = np.asarray(rates, dtype=np.float64)
    return IntensityProfile(rates=rates, grid=FrameGrid(rates.size, fd))


class TestConstruction:
    def test_prefix_sum_knots(self):
        assert build_cumulative(profile([2, 1, 3])).knots.tolist() == [0, 2, 3, 6]
        assert build_cumulative(profile([1, 1, 1, 1])).knots.tolist() == [0, 1, 2, 3, 4]
        assert build_cumulative(profile([0.5])).knots.tolist() == [0, 0.5]

    def test_rejects_nonpositive_rates(self):
        with pytest.raises(DomainError):
            profile([1.0, 0.0, 2.0])
        with pytest.raises(DomainError):
            profile([1.0, -0.5])

    def test_rejects_wrong_length(self):
        with pytest.raises(ShapeError):
            IntensityProfile(rates=np.ones(3), grid=FrameGrid(4))

    def test_from_log_rates_clamps(self):
        p = IntensityProfile.from_log_rates([0.0, 100.0, -100.0], FrameGrid(3))
        assert p.rates[0] == 1.0
        assert p.rates[1] == np.exp(30.0)
        assert p.rates[2] == np.exp(-30.0)


class TestEvalHazard:
    def test_frame_lookup(self):
        p = profile([2, 1, 3])
        assert eval_hazard(p, 1.5) == 1.0
        assert eval_hazard(p, 0.0) == 2.0
        assert eval_hazard(p, 2.999) == 3.0

    def test_domain(self):
        p = profile([2, 1, 3])
        with pytest.raises(DomainError):
            eval_hazard(p, 3.0)
        with pytest.raises(DomainError):
            eval_hazard(p, -0.1)


class TestEvalCumulative:
    def test_examples(self, backend):
        H = build_cumulative(profile([2, 1, 3]))
        assert eval_cumulative(H, 1.5) == 2.5
        assert eval_cumulative(H, 0.0) == 0.0
        assert eval_cumulative(H, 3.0) == 6.0

    def test_domain(self):
        H = build_cumulative(profile([2, 1, 3]))
        with pytest.raises(DomainError):
            eval_cumulative(H, 3.1)
        with pytest.raises(DomainError):
            eval_cumulative(H, -0.1)


class TestInvertCumulative:
    def test_examples(self, backend):
        H = build_cumulative(profile([2, 1, 3]))
        assert invert_cumulative(H, 2.5) == 1.5
        assert invert_cumulative(H, 0.0) == 0.0
        assert invert_cumulative(H, 6.0) == 3.0

    def test_domain(self):
        H = build_cumulative(profile([2, 1, 3]))
        with pytest.raises(DomainError):
            invert_cumulative(H, 6.1)
        with pytest.raises(DomainError):
            invert_cumulative(H, -0.1)


class TestProperties:
    def test_monotonicity(self, backend):
        rng = np.random.default_rng(7)
        for _ in range(50):
            T = int(rng.integers(1, 40))
            H = build_cumulative(profile(random_rates(rng, T)))
            t = np.sort(rng.uniform(0, T, size=20))
            vals = eval_cumulative(H, t)
            assert np.all(np.diff(vals) > 0) or t.size < 2

    def test_round_trip_1000_random(self, backend):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            T = int(rng.integers(1, 64))
            H = build_cumulative(profile(random_rates(rng, T)))
            t = float(rng.uniform(0, T))
            t_back = invert_cumulative(H, eval_cumulative(H, t))
            assert abs(t_back - t) < 1e-9

    def test_knot_consistency_exact(self, backend):
        rng = np.random.default_rng(13)
        for _ in range(100):
            T = int(rng.integers(1, 32))
            H = build_cumulative(profile(random_rates(rng, T)))
            ks = np.arange(T + 1, dtype=np.float64)
            np.testing.assert_array_equal(eval_cumulative(H, ks), H.knots)
            # the inverse is exact at the knots as well
            np.testing.assert_array_equal(invert_cumulative(H, H.knots), ks)

    def test_derivative_matches_hazard_exactly(self, backend):
        # dyadic offsets keep every intermediate float exact
        p = profile([2, 1, 3, 0.75])
        H = build_cumulative(p)
        for j in range(4):
            t, h = j + 0.25, 0.25
            slope = (eval_cumulative(H, t + h) - eval_cumulative(H, t)) / h
            assert slope == eval_hazard(p, t)
