#!/usr/bin/env python
"""
Fading channel models.

A channel is either AWGN (unit power gain) or Rayleigh block fading, where one
Exp(1) power gain holds for a whole transmission frame. Gains are produced by
inverse CDF from an explicit uniform variate so that scenarios compared against
each other can share the same draws.
"""
import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

import semcom_tools.rng
from semcom_tools.exceptions import DomainError

log = logging.getLogger(__name__)

# avg_snr_db whose linear value still fits a positive normal float64
MAX_SNR_DB = 10.0 * math.log10(np.finfo(np.float64).max)
MIN_SNR_DB = 10.0 * math.log10(np.finfo(np.float64).tiny)
_LN2 = math.log(2.0)
_LN10 = math.log(10.0)
_LOG_MAX = math.log(np.finfo(np.float64).max)


class ChannelKind(str, enum.Enum):
    AWGN = "awgn"
    RAYLEIGH = "rayleigh"


@dataclass(frozen=True)
class ChannelModel:
    kind: ChannelKind
    avg_snr_db: float

    def __post_init__(self):
        try:
            kind = (
                self.kind
                if isinstance(self.kind, ChannelKind)
                else ChannelKind(str(self.kind).lower())
            )
        except ValueError:
            raise DomainError(
                f"channel kind must be one of "
                f"{[k.value for k in ChannelKind]}, got '{self.kind}'"
            )
        object.__setattr__(self, "kind", kind)
        if not math.isfinite(float(self.avg_snr_db)):
            raise DomainError(f"avg_snr_db must be finite, got {self.avg_snr_db}")
        if not MIN_SNR_DB < float(self.avg_snr_db) < MAX_SNR_DB:
            raise DomainError(
                f"avg_snr_db must lie in ({MIN_SNR_DB:.1f}, {MAX_SNR_DB:.1f}) dB, "
                f"got {self.avg_snr_db}"
            )
        object.__setattr__(self, "avg_snr_db", float(self.avg_snr_db))

    @classmethod
    def from_linear(cls, kind, avg_snr):
        if not avg_snr > 0:
            raise DomainError(f"linear average SNR must be positive, got {avg_snr}")
        return cls(kind, 10.0 * math.log10(avg_snr))

    @property
    def linear_snr(self):
        return 10.0 ** (self.avg_snr_db / 10.0)

    def with_snr_db(self, avg_snr_db):
        return ChannelModel(self.kind, avg_snr_db)


@dataclass(frozen=True)
class FadingDraw:
    gain: float
    snr: float


def _check_uniforms(u):
    u = np.asarray(u, dtype=np.float64)
    if np.any(~(u > 0.0)) or np.any(~(u < 1.0)):
        raise DomainError("uniform variates must lie in the open interval (0, 1)")
    return u


def sample_gains(model, u):
    """Vectorised inverse-CDF draw. Returns (gain, snr) arrays"""
    u = _check_uniforms(u)
    if model.kind is ChannelKind.AWGN:
        gain = np.ones_like(u)
    else:
        gain = -np.log(u)
    with np.errstate(over="ignore"):
        # very strong draws saturate at inf, which decodes every layer
        snr = gain * model.linear_snr
    return gain, snr


def sample_gain(model, u):
    """Power gain and instantaneous SNR for a single uniform variate"""
    gain, snr = sample_gains(model, np.array([u], dtype=np.float64))
    return FadingDraw(gain=float(gain[0]), snr=float(snr[0]))


def draw_snrs(model, seed, stream, start, stop):
    """Instantaneous SNRs of trials start..stop-1 on one rng stream"""
    u = semcom_tools.rng.uniforms(seed, stream, start, stop)
    return sample_gains(model, u)[1]


def capacity(snr):
    return np.log2(1.0 + np.asarray(snr, dtype=np.float64))


def in_outage(snr, rate):
    """True where log2(1 + snr) falls below rate"""
    return capacity(snr) < rate


def _log_snr_threshold(rate):
    """ln(2**rate - 1), the log SNR needed for rate, without overflow"""
    x = rate * _LN2
    return x + math.log(-math.expm1(-x))


def outage_probability(rate, model):
    """P[log2(1 + snr) < rate] for one frame"""
    if not rate >= 0:
        raise DomainError(f"rate must be non-negative, got {rate}")
    if rate == 0:
        return 0.0
    if model.kind is ChannelKind.AWGN:
        return 0.0 if math.log2(1.0 + model.linear_snr) >= rate else 1.0
    log_threshold = _log_snr_threshold(rate) - model.avg_snr_db / 10.0 * _LN10
    if log_threshold > _LOG_MAX:
        return 1.0
    threshold = math.exp(log_threshold)
    return min(1.0, max(0.0, -math.expm1(-threshold)))


def snr_for_outage(rate, p_err):
    """Average SNR in dB at which a Rayleigh channel is in outage with
    probability p_err at the given rate
    """
    if not rate > 0:
        raise DomainError(f"rate must be positive, got {rate}")
    if not 0.0 < p_err < 1.0:
        raise DomainError(f"p_err must lie in (0, 1), got {p_err}")
    log_avg_snr = _log_snr_threshold(rate) - math.log(-math.log1p(-p_err))
    return 10.0 * log_avg_snr / _LN10
