import math

import numpy as np
import pytest

from semcom_tools import broadcast, codec
from semcom_tools.broadcast import UserProfile
from semcom_tools.channel import ChannelModel
from semcom_tools.codec import Signal
from semcom_tools.exceptions import ConfigValidationError, DomainError
from semcom_tools.superposition import LayerPlan


@pytest.fixture
def ramp():
    return Signal([1.0, 2.0, 3.0, 4.0])


@pytest.fixture
def plan():
    return LayerPlan.geometric(2, 0.25, 1.0)


def test_transmit_once_partial_decoding(ramp, plan):
    outcome = broadcast.transmit_once(
        ramp, plan, ChannelModel.from_linear("rayleigh", 10.0), math.exp(-0.3)
    )
    assert outcome.gain == pytest.approx(0.3)
    assert outcome.prefix == 1
    assert outcome.distortion == pytest.approx(0.25)


def test_transmit_once_full_decoding_over_awgn(ramp, plan):
    outcome = broadcast.transmit_once(ramp, plan, ChannelModel("awgn", 40.0), 0.5)
    assert outcome.prefix == 2
    assert outcome.distortion == pytest.approx(0.0, abs=1e-20)


def test_transmit_once_accepts_prompt_sets(ramp, plan):
    prompts = codec.decompose(ramp, 2)
    outcome = broadcast.transmit_once(prompts, plan, ChannelModel("awgn", 40.0), 0.5)
    assert outcome.prefix == 2
    with pytest.raises(ConfigValidationError):
        broadcast.transmit_once(
            codec.decompose(ramp, 1), plan, ChannelModel("awgn", 40.0), 0.5
        )


def test_expected_distortion_curve(ramp, plan):
    curve = broadcast.expected_distortion_curve(
        ramp, plan, [-60.0, 0.0, 10.0, 20.0, 30.0], 20000, seed=1
    )
    means = [point.mean_distortion for point in curve]
    assert means[0] == pytest.approx(7.5)
    assert all(b <= a for a, b in zip(means, means[1:]))
    for point in curve:
        assert point.mean_distortion == pytest.approx(
            point.closed_form_distortion, abs=0.12
        )
        assert point.prefix_pmf.sum() == pytest.approx(1.0)


def test_closed_form_distortion_is_a_mixture(ramp, plan):
    profile = codec.distortion_profile(ramp, 2)
    pmf = np.array([0.2, 0.3, 0.5])
    assert broadcast.closed_form_distortion(profile, pmf) == pytest.approx(
        7.5 * 0.2 + 0.25 * 0.3
    )


def test_baseline_plan_carries_the_whole_rate(plan):
    single = broadcast.baseline_plan(plan)
    assert single.num_layers == 1
    assert single.rates == (2.0,)


def test_coupled_users_are_ordered_in_every_trial(ramp, plan):
    users = [UserProfile("low", -20.0), UserProfile("high", 60.0)]
    report = broadcast.broadcast_report(ramp, plan, users, 5000, seed=4)
    assert np.all(report.distortions[0] >= report.distortions[1])
    assert report.users[0].mean_distortion >= report.users[1].mean_distortion


def test_coupled_identical_users_see_identical_trials(ramp, plan):
    users = [UserProfile("a", 10.0), UserProfile("b", 10.0)]
    report = broadcast.broadcast_report(ramp, plan, users, 2000, seed=4)
    np.testing.assert_array_equal(report.prefixes[0], report.prefixes[1])
    assert report.users[0].distortion_quantiles == report.users[1].distortion_quantiles


def test_uncoupled_users_use_their_own_streams(ramp, plan):
    users = [UserProfile("a", 10.0), UserProfile("b", 10.0)]
    report = broadcast.broadcast_report(
        ramp, plan, users, 2000, seed=4, coupled=False
    )
    assert not np.array_equal(report.prefixes[0], report.prefixes[1])


def test_quantiles_are_keyed_by_level(ramp, plan):
    report = broadcast.broadcast_report(
        ramp, plan, [UserProfile("a", 10.0)], 1000, seed=0, quantiles=(0.5, 0.9)
    )
    assert set(report.users[0].distortion_quantiles) == {0.5, 0.9}


def test_broadcast_report_validation(ramp, plan):
    with pytest.raises(DomainError):
        broadcast.broadcast_report(ramp, plan, [], 10, seed=0)
    with pytest.raises(DomainError):
        broadcast.broadcast_report(
            ramp, plan, [UserProfile("a", 0.0), UserProfile("a", 1.0)], 10, seed=0
        )
    with pytest.raises(DomainError):
        UserProfile("a", float("nan"))


def test_broadcast_report_does_not_depend_on_workers(ramp, plan):
    users = [UserProfile("a", 0.0), UserProfile("b", 12.0)]
    serial = broadcast.broadcast_report(ramp, plan, users, 4000, seed=2, coupled=False)
    parallel = broadcast.broadcast_report(
        ramp, plan, users, 4000, seed=2, coupled=False, workers=2, chunk_size=999
    )
    np.testing.assert_array_equal(serial.prefixes, parallel.prefixes)


def test_three_coupled_users_are_ordered_trial_by_trial():
    signal = codec.generate_signal("sine", 16, amplitude=1.0, periods=1.0)
    plan = LayerPlan.geometric(3, 0.25, 0.5)
    users = [UserProfile("a", 0.0), UserProfile("b", 10.0), UserProfile("c", 20.0)]
    report = broadcast.broadcast_report(signal, plan, users, 20000, seed=9)
    assert np.all(np.diff(report.prefixes, axis=0) >= 0)
    assert np.all(np.diff(report.distortions, axis=0) <= 0)
    cdfs = np.array([np.cumsum(user.prefix_pmf) for user in report.users])
    # a stronger user's prefix cdf lies below a weaker one's everywhere
    assert np.all(np.diff(cdfs, axis=0) <= 1e-12)
    means = [user.mean_distortion for user in report.users]
    assert means == sorted(means, reverse=True)


def test_user_average_snr_must_be_representable():
    with pytest.raises(DomainError, match="average SNR"):
        UserProfile("far", 4000.0)
