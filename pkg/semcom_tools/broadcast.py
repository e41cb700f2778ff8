#!/usr/bin/env python
"""
End to end transmissions: codec, superposition layers and fading channel.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

import semcom_tools.channel
import semcom_tools.codec
import semcom_tools.superposition
from semcom_tools.channel import MAX_SNR_DB, MIN_SNR_DB, ChannelKind, ChannelModel
from semcom_tools.exceptions import ConfigValidationError, DomainError
from semcom_tools.rng import SHARED_STREAM
from semcom_tools.superposition import LayerPlan

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class UserProfile:
    name: str
    avg_snr_db: float

    def __post_init__(self):
        if not math.isfinite(float(self.avg_snr_db)):
            raise DomainError(
                f"user '{self.name}' needs a finite average SNR, "
                f"got {self.avg_snr_db}"
            )
        if not MIN_SNR_DB < float(self.avg_snr_db) < MAX_SNR_DB:
            raise DomainError(
                f"user '{self.name}' average SNR must lie in "
                f"({MIN_SNR_DB:.1f}, {MAX_SNR_DB:.1f}) dB, got {self.avg_snr_db}"
            )


@dataclass(frozen=True)
class TrialOutcome:
    trial_index: int
    gain: float
    prefix: int
    distortion: float


@dataclass(frozen=True)
class CurvePoint:
    avg_snr_db: float
    mean_distortion: float
    closed_form_distortion: float
    baseline_mean_distortion: float
    prefix_pmf: np.ndarray


@dataclass(frozen=True)
class UserReport:
    name: str
    avg_snr_db: float
    mean_distortion: float
    distortion_quantiles: dict
    prefix_pmf: np.ndarray


@dataclass(frozen=True)
class BroadcastReport:
    users: list
    prefixes: np.ndarray
    distortions: np.ndarray
    coupled: bool


def _as_signal(x):
    if isinstance(x, semcom_tools.codec.PromptSet):
        return semcom_tools.codec.reconstruct(x, x.num_layers)
    return x


def prepare_prompts(x, plan):
    """Prompt layers of x matching the plan's layer count"""
    if isinstance(x, semcom_tools.codec.PromptSet):
        if x.num_layers != plan.num_layers:
            raise ConfigValidationError(
                f"prompt set has {x.num_layers} layers but the plan has "
                f"{plan.num_layers}",
                key="num_layers",
            )
        return x
    try:
        return semcom_tools.codec.decompose(x, plan.num_layers)
    except DomainError as e:
        raise ConfigValidationError(str(e), key="num_layers")


def transmit_once(x, plan, model, u, trial_index=0):
    """One frame: draw the fading, decode what SIC allows, reconstruct"""
    prompts = prepare_prompts(x, plan)
    draw = semcom_tools.channel.sample_gain(model, u)
    prefix = semcom_tools.superposition.decodable_prefix(plan, draw.snr)
    received = semcom_tools.codec.reconstruct(prompts, prefix)
    return TrialOutcome(
        trial_index=trial_index,
        gain=draw.gain,
        prefix=prefix,
        distortion=semcom_tools.codec.mse(_as_signal(x), received),
    )


def closed_form_distortion(profile, pmf):
    """Expected distortion sum_k D_k * P[prefix = k]"""
    return float(math.fsum(d * p for d, p in zip(profile.values, pmf)))


def baseline_plan(plan):
    """All of the plan's rate carried by one layer at full power"""
    return LayerPlan(1, (1.0,), (math.fsum(plan.rates),))


def expected_distortion_curve(
    x,
    plan,
    snr_grid_db,
    n_trials,
    seed,
    kind=ChannelKind.RAYLEIGH,
    workers=1,
    chunk_size=65536,
):
    """Mean distortion at every grid SNR. All grid points share the same
    uniforms, so the curve can only fall along an increasing grid.
    """
    if len(snr_grid_db) == 0:
        raise DomainError("the SNR grid must not be empty")
    profile = semcom_tools.codec.distortion_profile(
        _as_signal(x), plan.num_layers
    )
    single_layer = baseline_plan(plan)
    baseline_values = np.array([profile[0], profile[plan.num_layers]])
    curve = []
    for avg_snr_db in snr_grid_db:
        model = ChannelModel(kind, avg_snr_db)
        log.debug("Sweeping %s at %s dB", model.kind.value, avg_snr_db)
        prefixes = semcom_tools.superposition.prefix_draws(
            plan, model, n_trials, seed, SHARED_STREAM, workers, chunk_size
        )
        baseline = semcom_tools.superposition.prefix_draws(
            single_layer, model, n_trials, seed, SHARED_STREAM, workers, chunk_size
        )
        curve.append(
            CurvePoint(
                avg_snr_db=float(avg_snr_db),
                mean_distortion=float(np.mean(profile.values[prefixes])),
                closed_form_distortion=closed_form_distortion(
                    profile,
                    semcom_tools.superposition.analytic_prefix_distribution(
                        plan, model
                    ),
                ),
                baseline_mean_distortion=float(np.mean(baseline_values[baseline])),
                prefix_pmf=semcom_tools.superposition.prefix_pmf(
                    prefixes, plan.num_layers
                ),
            )
        )
    return curve


def broadcast_report(
    x,
    plan,
    users,
    n_trials,
    seed,
    coupled=True,
    kind=ChannelKind.RAYLEIGH,
    quantiles=(0.1, 0.5, 0.9),
    workers=1,
    chunk_size=65536,
):
    """Per-user distortion statistics for one broadcast of x.

    Coupled users all read the shared rng stream, so within a trial a user
    with a higher average SNR never decodes fewer layers than a weaker one.
    Uncoupled users each get their own stream.
    """
    if len(users) == 0:
        raise DomainError("a broadcast needs at least one user")
    names = [user.name for user in users]
    if len(set(names)) != len(names):
        raise DomainError(f"user names must be unique, got {names}")
    if n_trials < 1:
        raise DomainError(f"n_trials must be at least 1, got {n_trials}")
    prepare_prompts(x, plan)
    profile = semcom_tools.codec.distortion_profile(_as_signal(x), plan.num_layers)

    prefixes = np.empty((len(users), n_trials), dtype=np.int64)
    reports = []
    for index, user in enumerate(users):
        stream = SHARED_STREAM if coupled else SHARED_STREAM + 1 + index
        prefixes[index] = semcom_tools.superposition.prefix_draws(
            plan,
            ChannelModel(kind, user.avg_snr_db),
            n_trials,
            seed,
            stream,
            workers,
            chunk_size,
        )
    distortions = profile.values[prefixes]
    for index, user in enumerate(users):
        reports.append(
            UserReport(
                name=user.name,
                avg_snr_db=float(user.avg_snr_db),
                mean_distortion=float(np.mean(distortions[index])),
                distortion_quantiles={
                    float(q): float(np.quantile(distortions[index], q))
                    for q in quantiles
                },
                prefix_pmf=semcom_tools.superposition.prefix_pmf(
                    prefixes[index], plan.num_layers
                ),
            )
        )
    return BroadcastReport(
        users=reports, prefixes=prefixes, distortions=distortions, coupled=coupled
    )
