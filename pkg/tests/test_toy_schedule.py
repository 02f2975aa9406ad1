"""Tests for noise schedules, the forward process and time embeddings."""

import numpy as np
import pytest

from src.errors import DimensionMismatchError, InvalidParameterError
from src.toy import NoiseSchedule, forward_noise, make_schedule, time_embedding


@pytest.mark.unit
class TestSchedule:

    @pytest.mark.parametrize("kind", ["linear", "cosine"])
    def test_alpha_bar_strictly_decreasing(self, kind):
        sched = make_schedule(100, kind)
        assert sched.alpha_bar[0] == 1.0
        assert np.all(np.diff(sched.alpha_bar) < 0)
        assert sched.alpha_bar[-1] > 0

    def test_short_linear_schedule_still_noises(self):
        sched = make_schedule(10)
        assert sched.alpha_bar[-1] < 0.1

    def test_betas_match_alpha_bar(self):
        sched = make_schedule(20, "cosine")
        rebuilt = np.cumprod(1.0 - sched.betas[1:])
        assert np.allclose(rebuilt, sched.alpha_bar[1:])

    def test_alpha_bar_is_read_only(self):
        sched = make_schedule(5)
        with pytest.raises(ValueError):
            sched.alpha_bar[1] = 0.5

    def test_rejects_increasing(self):
        with pytest.raises(InvalidParameterError):
            NoiseSchedule(2, np.array([1.0, 0.5, 0.7]))

    def test_rejects_wrong_length(self):
        with pytest.raises(DimensionMismatchError):
            NoiseSchedule(3, np.array([1.0, 0.5]))

    def test_unknown_kind(self):
        with pytest.raises(InvalidParameterError):
            make_schedule(10, "sigmoid")

    def test_zero_steps(self):
        with pytest.raises(InvalidParameterError):
            make_schedule(0)


@pytest.mark.unit
class TestForwardNoise:

    def test_tau_zero_is_identity(self, rng):
        sched = make_schedule(10)
        x0 = rng.random(16)
        assert np.allclose(forward_noise(x0, 0, rng.standard_normal(16), sched), x0)

    def test_per_row_steps(self, rng):
        sched = make_schedule(10)
        x0 = np.ones((2, 4))
        eps = np.zeros((2, 4))
        out = forward_noise(x0, np.array([1, 10]), eps, sched)
        assert np.allclose(out[0], np.sqrt(sched.alpha_bar[1]))
        assert np.allclose(out[1], np.sqrt(sched.alpha_bar[10]))

    def test_out_of_range_tau(self, rng):
        with pytest.raises(InvalidParameterError):
            forward_noise(np.zeros(4), 11, np.zeros(4), make_schedule(10))

    def test_float_tau(self):
        with pytest.raises(InvalidParameterError):
            forward_noise(np.zeros(4), 1.5, np.zeros(4), make_schedule(10))

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            forward_noise(np.zeros(4), 1, np.zeros(5), make_schedule(10))


@pytest.mark.unit
@pytest.mark.parametrize("target", [0.9, 0.5, 0.1])
def test_forward_moments(target):
    """Mean √ᾱ·x0 and variance 1−ᾱ, within three standard errors over 10^4 draws."""
    sched = make_schedule(200)
    tau = int(np.argmin(np.abs(sched.alpha_bar - target)))
    ab = sched.alpha_bar[tau]
    rng = np.random.default_rng(99)
    n = 10000
    x0 = np.ones(n)
    xs = forward_noise(x0, tau, rng.standard_normal(n), sched)

    mean_se = np.sqrt((1.0 - ab) / n)
    var_se = (1.0 - ab) * np.sqrt(2.0 / (n - 1))
    assert abs(xs.mean() - np.sqrt(ab)) < 3 * mean_se
    assert abs(xs.var(ddof=1) - (1.0 - ab)) < 3 * var_se


@pytest.mark.unit
class TestTimeEmbedding:

    def test_shapes(self):
        assert time_embedding(3, 8).shape == (8,)
        assert time_embedding(np.array([1, 2, 3]), 8).shape == (3, 8)

    def test_distinct_steps_differ(self):
        rows = time_embedding(np.arange(1, 101), 32)
        assert len({tuple(np.round(r, 12)) for r in rows}) == 100

    def test_interleaved_pairs(self):
        e = time_embedding(5, 4)
        assert e[0] == pytest.approx(np.sin(5.0))
        assert e[1] == pytest.approx(np.cos(5.0))

    @pytest.mark.parametrize("dim", [0, 3])
    def test_rejects_odd_dim(self, dim):
        with pytest.raises(InvalidParameterError):
            time_embedding(1, dim)
