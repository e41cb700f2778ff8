#!/usr/bin/env python
"""
Superposition coding of prompt layers and successive interference
cancellation (SIC) at the receiver.

Layer l carries a fraction alpha_l of the transmit power at rate R_l. The
receiver decodes layer 1 first, treating every later layer as noise, cancels
it and moves on. Decoding stops at the first layer whose SINR does not
support its rate, so the receiver always holds a prefix z_1..z_l.
"""
import logging
import math
from dataclasses import dataclass
from functools import partial

import numpy as np

import semcom_tools.channel
import semcom_tools.trials
from semcom_tools.channel import ChannelKind
from semcom_tools.config_json import ConfigJson
from semcom_tools.exceptions import DomainError

log = logging.getLogger(__name__)

POWER_SUM_TOLERANCE = 1e-12


def geometric_power_allocation(num_layers, ratio):
    """alpha_l proportional to ratio**(l-1), normalised to sum 1"""
    if int(num_layers) != num_layers or num_layers < 1:
        raise DomainError(f"number of layers must be at least 1, got {num_layers}")
    if not 0.0 < ratio <= 1.0:
        raise DomainError(f"power ratio must lie in (0, 1], got {ratio}")
    weights = float(ratio) ** np.arange(int(num_layers), dtype=np.float64)
    return tuple(float(w) for w in weights / weights.sum())


@dataclass(frozen=True)
class LayerPlan:
    num_layers: int
    power_fractions: tuple
    rates: tuple

    def __post_init__(self):
        fractions = tuple(float(a) for a in self.power_fractions)
        rates = tuple(float(r) for r in self.rates)
        object.__setattr__(self, "power_fractions", fractions)
        object.__setattr__(self, "rates", rates)
        if int(self.num_layers) != self.num_layers or self.num_layers < 1:
            raise DomainError(
                f"number of layers must be at least 1, got {self.num_layers}"
            )
        if len(fractions) != self.num_layers or len(rates) != self.num_layers:
            raise DomainError(
                f"power fractions ({len(fractions)}) and rates ({len(rates)}) "
                f"must both have one entry per layer ({self.num_layers})"
            )
        if any(not a > 0 for a in fractions):
            raise DomainError("power fractions must all be positive")
        if abs(math.fsum(fractions) - 1.0) > POWER_SUM_TOLERANCE:
            raise DomainError(
                f"power fractions must sum to 1, got {math.fsum(fractions)!r}"
            )
        if any(not (r > 0 and math.isfinite(r)) for r in rates):
            raise DomainError("rates must all be positive and finite")

    @classmethod
    def geometric(cls, num_layers, ratio, rates):
        if not isinstance(rates, (list, tuple)):
            rates = [rates] * int(num_layers)
        return cls(
            num_layers, geometric_power_allocation(num_layers, ratio), tuple(rates)
        )

    @classmethod
    def default(cls, num_layers):
        """Geometric plan with the packaged ratio and per-layer rate"""
        config_json = ConfigJson()
        return cls.geometric(
            num_layers,
            config_json.require_topic_data("layer_plan", "power_ratio"),
            config_json.require_topic_data("layer_plan", "rate"),
        )

    @property
    def alpha(self):
        return np.asarray(self.power_fractions, dtype=np.float64)

    @property
    def interference_fractions(self):
        """Power still undecoded after layer l: sum of alpha_m for m > l"""
        tails = np.cumsum(self.alpha[::-1])[::-1]
        return np.append(tails[1:], 0.0)


def _check_layer(plan, layer):
    if int(layer) != layer or not 1 <= layer <= plan.num_layers:
        raise DomainError(
            f"layer index must lie in 1..{plan.num_layers}, got {layer}"
        )


def _check_snr(snr):
    snr = np.asarray(snr, dtype=np.float64)
    if np.any(~(snr >= 0)):
        raise DomainError("instantaneous SNR must be non-negative")
    return snr


def layer_sinrs(plan, snr):
    """SINR of every layer once the earlier ones are cancelled, shape
    (len(snr), L)
    """
    snr = _check_snr(snr).reshape(-1, 1)
    with np.errstate(divide="ignore"):
        # snr = inf leaves only the residual interference, snr = 0 gives 0
        return plan.alpha / (1.0 / snr + plan.interference_fractions)


def layer_sinr(plan, snr, layer):
    _check_layer(plan, layer)
    return float(layer_sinrs(plan, [snr])[0, layer - 1])


def decodable_prefixes(plan, snr):
    """Decoded prefix length for every instantaneous SNR in snr"""
    supported = semcom_tools.channel.capacity(layer_sinrs(plan, snr)) >= np.asarray(
        plan.rates
    )
    return np.cumprod(supported, axis=1).sum(axis=1).astype(np.int64)


def decodable_prefix(plan, snr):
    return int(decodable_prefixes(plan, [snr])[0])


def layer_thresholds(plan):
    """Smallest SNR at which each layer alone passes its SIC test. Layers
    whose power share cannot beat the interference left above them get inf
    """
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        tau = np.power(2.0, np.asarray(plan.rates, dtype=np.float64)) - 1.0
        margin = plan.alpha - tau * plan.interference_fractions
        return np.where(margin > 0, tau / np.where(margin > 0, margin, 1.0), np.inf)


def analytic_prefix_distribution(plan, model):
    """Closed-form pmf of the decoded prefix over {0..L}"""
    # prefix >= l iff snr clears every threshold up to l
    cumulative = np.maximum.accumulate(layer_thresholds(plan))
    if model.kind is ChannelKind.AWGN:
        reached = decodable_prefix(plan, model.linear_snr)
        survival = (np.arange(1, plan.num_layers + 1) <= reached).astype(np.float64)
    else:
        survival = np.exp(-cumulative / model.linear_snr)
    survival = np.concatenate([[1.0], survival, [0.0]])
    return survival[:-1] - survival[1:]


def _prefix_chunk(plan, model, seed, stream, start, stop):
    snr = semcom_tools.channel.draw_snrs(model, seed, stream, start, stop)
    return decodable_prefixes(plan, snr)


def prefix_draws(plan, model, n_trials, seed, stream=0, workers=1, chunk_size=65536):
    """Per-trial decoded prefix, trial t using uniform (seed, stream, t)"""
    return semcom_tools.trials.map_trial_chunks(
        partial(_prefix_chunk, plan, model, seed, stream),
        n_trials,
        workers=workers,
        chunk_size=chunk_size,
    )


def prefix_pmf(prefixes, num_layers):
    counts = np.bincount(np.asarray(prefixes), minlength=num_layers + 1)
    return counts / float(len(prefixes))


def prefix_distribution(
    plan, model, n_trials, seed, stream=0, workers=1, chunk_size=65536
):
    """Empirical pmf of the decoded prefix over {0..L}"""
    prefixes = prefix_draws(
        plan, model, n_trials, seed, stream, workers=workers, chunk_size=chunk_size
    )
    return prefix_pmf(prefixes, plan.num_layers)
