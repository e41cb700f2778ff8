import numpy as np
import pytest

from semcom_tools import diversity
from semcom_tools.channel import ChannelModel, snr_for_outage
from semcom_tools.diversity import DiversityConfig
from semcom_tools.exceptions import DomainError


def test_two_of_three_closed_form():
    assert diversity.recovery_probability(3, 2, 0.1) == pytest.approx(0.972)
    assert diversity.enumerate_recovery_probability([0.1] * 3, 2) == pytest.approx(
        0.972
    )


@pytest.mark.parametrize("p_err", [0.0, 0.1, 0.5, 0.9, 1.0])
def test_closed_form_matches_enumeration(p_err):
    for num_modalities in range(1, 11):
        for required in range(num_modalities + 1):
            closed = diversity.recovery_probability(num_modalities, required, p_err)
            brute = diversity.enumerate_recovery_probability(
                [p_err] * num_modalities, required
            )
            assert abs(closed - brute) <= 1e-12


def test_edge_probabilities():
    assert diversity.recovery_probability(5, 0, 1.0) == 1.0
    assert diversity.recovery_probability(5, 5, 0.0) == 1.0
    assert diversity.recovery_probability(5, 1, 1.0) == 0.0
    assert diversity.recovery_probability(4, 4, 0.2) == pytest.approx(0.8**4)


@pytest.mark.parametrize("num_modalities, required", [(0, 0), (3, 4), (3, -1)])
def test_invalid_counts_are_rejected(num_modalities, required):
    with pytest.raises(DomainError):
        diversity.recovery_probability(num_modalities, required, 0.1)


def test_poisson_binomial_matches_enumeration():
    p_errs = [0.05, 0.3, 0.5, 0.7, 0.95, 0.2]
    for required in range(len(p_errs) + 1):
        assert diversity.poisson_binomial_recovery(
            p_errs, required
        ) == pytest.approx(
            diversity.enumerate_recovery_probability(p_errs, required), abs=1e-12
        )


def test_awgn_above_rate_always_recovers():
    config = DiversityConfig(4, 3, 1.0, ChannelModel("awgn", 10.0))
    assert diversity.closed_form_recovery(config) == 1.0
    assert diversity.simulate_recovery(config, 1000, seed=0) == 1.0


def test_simulation_matches_closed_form():
    model = ChannelModel("rayleigh", snr_for_outage(1.0, 0.1))
    config = DiversityConfig(3, 2, 1.0, model)
    assert diversity.closed_form_recovery(config) == pytest.approx(0.972)
    empirical = diversity.simulate_recovery(config, 10**5, seed=11)
    assert empirical == pytest.approx(0.972, abs=0.002)


def test_heterogeneous_modalities():
    models = tuple(ChannelModel("rayleigh", snr) for snr in (0.0, 5.0, 10.0, 15.0))
    config = DiversityConfig(4, 2, 1.0, models[0], models)
    assert not config.is_homogeneous
    expected = diversity.enumerate_recovery_probability(config.p_errs(), 2)
    assert diversity.closed_form_recovery(config) == pytest.approx(expected, abs=1e-12)
    empirical = diversity.simulate_recovery(config, 50000, seed=5)
    assert empirical == pytest.approx(expected, abs=0.01)
    with pytest.raises(DomainError):
        DiversityConfig(3, 2, 1.0, models[0], models)


def test_recovery_draws_do_not_depend_on_workers():
    config = DiversityConfig(5, 3, 1.0, ChannelModel("rayleigh", 6.0))
    serial = diversity.recovery_draws(config, 3000, seed=8)
    parallel = diversity.recovery_draws(config, 3000, seed=8, workers=2, chunk_size=700)
    np.testing.assert_array_equal(serial, parallel)


def test_required_count_rounds_before_ceiling():
    assert diversity.required_count(0.9, 10) == 9
    assert diversity.required_count(0.5, 11) == 6


def test_scaling_when_condition_holds():
    check = diversity.diversity_scaling_check(0.5, 0.3, [10, 100])
    assert check.condition_holds
    assert check.strictly_increasing
    assert check.probabilities[-1] >= 0.99
    wider = diversity.diversity_scaling_check(0.5, 0.3, [10, 20, 50, 100])
    assert wider.final_exceeds_earlier and wider.strictly_increasing


def test_scaling_when_condition_fails():
    check = diversity.diversity_scaling_check(0.9, 0.3, [10, 20, 50, 100])
    assert not check.condition_holds
    assert check.strictly_decreasing


def test_scaling_without_errors_always_recovers():
    check = diversity.diversity_scaling_check(0.7, 0.0, [5, 10, 20])
    assert check.probabilities == [1.0, 1.0, 1.0]


def test_scaling_validation():
    with pytest.raises(DomainError):
        diversity.diversity_scaling_check(1.0, 0.3, [10])
    with pytest.raises(DomainError):
        diversity.diversity_scaling_check(0.5, 0.3, [20, 10])


def test_recovery_probability_is_monotone_on_a_grid():
    p_grid = np.linspace(0.0, 1.0, 11)
    max_modalities = 12
    table = np.full((max_modalities + 1, max_modalities + 1, len(p_grid)), np.nan)
    for num_modalities in range(1, max_modalities + 1):
        for required in range(num_modalities + 1):
            for i, p_err in enumerate(p_grid):
                table[num_modalities, required, i] = diversity.recovery_probability(
                    num_modalities, required, p_err
                )
    slack = 1e-12
    for num_modalities in range(1, max_modalities + 1):
        rows = table[num_modalities, : num_modalities + 1]
        # harder with a larger K, and with a larger p_err
        assert np.all(np.diff(rows, axis=0) <= slack)
        assert np.all(np.diff(rows, axis=1) <= slack)
    for required in range(max_modalities + 1):
        first = max(required, 1)
        # easier with more modalities for a fixed K
        column = table[first:, required]
        assert np.all(np.diff(column, axis=0) >= -slack)


@pytest.mark.parametrize(
    "num_modalities, required, p_err",
    [(3, 2, 0.1), (5, 3, 0.3), (4, 1, 0.5), (6, 6, 0.05), (8, 4, 0.2)],
)
def test_simulation_stays_within_four_standard_errors(
    num_modalities, required, p_err
):
    n_trials = 10**5
    model = ChannelModel("rayleigh", snr_for_outage(1.0, p_err))
    config = DiversityConfig(num_modalities, required, 1.0, model)
    closed = diversity.closed_form_recovery(config)
    assert closed == pytest.approx(
        diversity.recovery_probability(num_modalities, required, p_err)
    )
    empirical = diversity.simulate_recovery(config, n_trials, seed=num_modalities)
    assert abs(empirical - closed) <= 4 * diversity.binomial_std_error(
        closed, n_trials
    )


def test_unreachable_rate_never_recovers():
    config = DiversityConfig(3, 1, 1100.0, ChannelModel("rayleigh", 10.0))
    assert config.p_errs() == [1.0, 1.0, 1.0]
    assert diversity.closed_form_recovery(config) == 0.0
    assert diversity.simulate_recovery(config, 200, seed=0) == 0.0
