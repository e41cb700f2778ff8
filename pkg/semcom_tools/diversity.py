#!/usr/bin/env python
"""
K-of-M multimodal diversity.

Each of M modality encodings crosses its own independent fading channel and
is lost when that channel is in outage at the per-modality rate. Full
regeneration succeeds when at least K encodings arrive.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from functools import partial

import numpy as np
from scipy.stats import binom

import semcom_tools.channel
import semcom_tools.trials
from semcom_tools.exceptions import DomainError

log = logging.getLogger(__name__)

ENUMERATION_LIMIT = 20


def _check_counts(num_modalities, required):
    if int(num_modalities) != num_modalities or num_modalities < 1:
        raise DomainError(
            f"number of modalities must be at least 1, got {num_modalities}"
        )
    if int(required) != required or not 0 <= required <= num_modalities:
        raise DomainError(
            f"required count K must satisfy 0 <= K <= M = {num_modalities}, "
            f"got {required}"
        )


def _check_probability(p_err):
    if not 0.0 <= p_err <= 1.0:
        raise DomainError(f"p_err must lie in [0, 1], got {p_err}")


@dataclass(frozen=True)
class DiversityConfig:
    num_modalities: int
    required: int
    per_modality_rate: float
    model: semcom_tools.channel.ChannelModel
    modality_models: tuple = None

    def __post_init__(self):
        _check_counts(self.num_modalities, self.required)
        if not (self.per_modality_rate > 0 and math.isfinite(self.per_modality_rate)):
            raise DomainError(
                f"per-modality rate must be positive, got {self.per_modality_rate}"
            )
        if self.modality_models is not None:
            models = tuple(self.modality_models)
            if len(models) != self.num_modalities:
                raise DomainError(
                    f"{len(models)} modality channels given for "
                    f"{self.num_modalities} modalities"
                )
            object.__setattr__(self, "modality_models", models)

    @property
    def is_homogeneous(self):
        return self.modality_models is None or len(set(self.modality_models)) == 1

    def channel_for(self, modality):
        if self.modality_models is None:
            return self.model
        return self.modality_models[modality]

    def p_errs(self):
        return [
            semcom_tools.channel.outage_probability(
                self.per_modality_rate, self.channel_for(m)
            )
            for m in range(self.num_modalities)
        ]


def recovery_probability(num_modalities, required, p_err):
    """P[at least K of M independent encodings arrive]"""
    _check_counts(num_modalities, required)
    _check_probability(p_err)
    if required == 0 or p_err == 0.0:
        return 1.0
    if p_err == 1.0:
        return 0.0
    # survival function of Bin(M, 1 - p_err) at K - 1
    return float(binom.sf(required - 1, num_modalities, 1.0 - p_err))


def enumerate_recovery_probability(p_errs, required):
    """Brute force over all 2**M arrival patterns"""
    p_errs = [float(p) for p in p_errs]
    _check_counts(len(p_errs), required)
    for p in p_errs:
        _check_probability(p)
    if len(p_errs) > ENUMERATION_LIMIT:
        raise DomainError(
            f"enumeration is limited to {ENUMERATION_LIMIT} modalities, "
            f"got {len(p_errs)}"
        )
    terms = []
    for pattern in itertools.product((False, True), repeat=len(p_errs)):
        if sum(pattern) < required:
            continue
        terms.append(
            math.prod(1.0 - p if arrived else p for p, arrived in zip(p_errs, pattern))
        )
    return math.fsum(terms)


def poisson_binomial_recovery(p_errs, required):
    """Exact recovery probability for modality-specific p_err"""
    p_errs = [float(p) for p in p_errs]
    _check_counts(len(p_errs), required)
    arrivals = np.array([1.0])
    for p in p_errs:
        _check_probability(p)
        arrivals = np.convolve(arrivals, [p, 1.0 - p])
    return float(min(1.0, math.fsum(arrivals[required:])))


def closed_form_recovery(config):
    p_errs = config.p_errs()
    if config.is_homogeneous:
        return recovery_probability(config.num_modalities, config.required, p_errs[0])
    return poisson_binomial_recovery(p_errs, config.required)


def _recovery_chunk(config, seed, start, stop):
    arrived = np.zeros(stop - start, dtype=np.int64)
    for modality in range(config.num_modalities):
        snr = semcom_tools.channel.draw_snrs(
            config.channel_for(modality), seed, 1 + modality, start, stop
        )
        arrived += ~semcom_tools.channel.in_outage(snr, config.per_modality_rate)
    return arrived >= config.required


def recovery_draws(config, n_trials, seed, workers=1, chunk_size=65536):
    """Per-trial success flags, modality m reading rng stream 1 + m"""
    return semcom_tools.trials.map_trial_chunks(
        partial(_recovery_chunk, config, seed),
        n_trials,
        workers=workers,
        chunk_size=chunk_size,
    )


def simulate_recovery(config, n_trials, seed, workers=1, chunk_size=65536):
    """Fraction of trials in which at least K encodings arrive"""
    successes = recovery_draws(config, n_trials, seed, workers, chunk_size)
    return int(np.count_nonzero(successes)) / float(n_trials)


def binomial_std_error(probability, n_trials):
    return math.sqrt(probability * (1.0 - probability) / n_trials)


@dataclass(frozen=True)
class ScalingPoint:
    num_modalities: int
    required: int
    recovery_probability: float


@dataclass(frozen=True)
class ScalingCheck:
    success_fraction_required: float
    p_err: float
    points: list

    @property
    def condition_holds(self):
        """beta < 1 - p_err, i.e. M (1 - p_err) > K for large M"""
        return self.success_fraction_required < 1.0 - self.p_err

    @property
    def probabilities(self):
        return [point.recovery_probability for point in self.points]

    @property
    def final_exceeds_earlier(self):
        probabilities = self.probabilities
        return all(p < probabilities[-1] for p in probabilities[:-1])

    @property
    def strictly_increasing(self):
        probabilities = self.probabilities
        return all(a < b for a, b in zip(probabilities, probabilities[1:]))

    @property
    def strictly_decreasing(self):
        probabilities = self.probabilities
        return all(a > b for a, b in zip(probabilities, probabilities[1:]))


def required_count(success_fraction_required, num_modalities):
    """K = ceil(beta * M), rounded first so 0.9 * 10 stays 9"""
    return math.ceil(round(success_fraction_required * num_modalities, 9))


def diversity_scaling_check(success_fraction_required, p_err, m_values):
    """Closed-form recovery probability for growing M with K = ceil(beta M)"""
    if not 0.0 < success_fraction_required < 1.0:
        raise DomainError(
            f"success fraction must lie in (0, 1), got {success_fraction_required}"
        )
    _check_probability(p_err)
    m_values = [int(m) for m in m_values]
    if len(m_values) == 0:
        raise DomainError("at least one modality count is needed")
    if any(b <= a for a, b in zip(m_values, m_values[1:])):
        raise DomainError(f"modality counts must be strictly increasing: {m_values}")
    points = []
    for num_modalities in m_values:
        required = required_count(success_fraction_required, num_modalities)
        points.append(
            ScalingPoint(
                num_modalities=num_modalities,
                required=required,
                recovery_probability=recovery_probability(
                    num_modalities, required, p_err
                ),
            )
        )
    return ScalingCheck(
        success_fraction_required=float(success_fraction_required),
        p_err=float(p_err),
        points=points,
    )
