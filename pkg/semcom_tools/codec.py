#!/usr/bin/env python
"""
Progressive prompt codec.

A signal of length N = 2**J is split by an orthonormal Haar transform of depth
L - 1 into L prompt layers: the coarsest approximation first, then the detail
bands from coarse to fine. Reconstructing from the first l layers zeroes the
rest, so by orthonormality the squared error is exactly the energy of the
dropped layers and can only shrink as layers are added.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

import semcom_tools.utils
from semcom_tools.exceptions import DomainError

log = logging.getLogger(__name__)

_SQRT2 = math.sqrt(2.0)

SIGNAL_GENERATORS = ("constant", "ramp", "sine", "gaussian")


def _is_power_of_two(n):
    return n >= 1 and n & (n - 1) == 0


@dataclass(frozen=True, eq=False)
class Signal:
    samples: np.ndarray

    def __post_init__(self):
        samples = np.array(self.samples, dtype=np.float64).reshape(-1)
        if not _is_power_of_two(samples.size):
            raise DomainError(
                f"signal length must be a power of two, got {samples.size}"
            )
        if not np.all(np.isfinite(samples)):
            raise DomainError("signal samples must all be finite")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return self.samples.size

    @property
    def depth(self):
        """J such that N = 2**J"""
        return self.samples.size.bit_length() - 1

    @property
    def mean_power(self):
        return float(np.mean(self.samples**2))

    @classmethod
    def zeros(cls, length):
        return cls(np.zeros(length))

    @classmethod
    def from_file(cls, file_name):
        try:
            return cls(semcom_tools.utils.read_signal_file(file_name))
        except ValueError as e:
            raise DomainError(f"{file_name}: {e}")


def generate_signal(generator, length, **params):
    """Synthetic test signals.

    constant: value            ramp: start, step
    sine: amplitude, periods   gaussian: std, seed
    """
    if not _is_power_of_two(int(length)):
        raise DomainError(f"signal length must be a power of two, got {length}")
    n = np.arange(int(length), dtype=np.float64)
    if generator == "constant":
        samples = np.full(int(length), float(params.get("value", 1.0)))
    elif generator == "ramp":
        samples = params.get("start", 0.0) + params.get("step", 1.0) * n
    elif generator == "sine":
        samples = params.get("amplitude", 1.0) * np.sin(
            2.0 * np.pi * params.get("periods", 1.0) * n / length
        )
    elif generator == "gaussian":
        rng = np.random.default_rng(int(params.get("seed", 0)))
        samples = rng.normal(0.0, params.get("std", 1.0), int(length))
    else:
        raise DomainError(
            f"unknown signal generator '{generator}', use one of {SIGNAL_GENERATORS}"
        )
    return Signal(samples)


@dataclass(frozen=True, eq=False)
class PromptSet:
    layers: tuple
    source_length: int

    def __post_init__(self):
        layers = tuple(np.asarray(z, dtype=np.float64) for z in self.layers)
        object.__setattr__(self, "layers", layers)
        if sum(z.size for z in layers) != self.source_length:
            raise DomainError("layer lengths must add up to the source length")

    @property
    def num_layers(self):
        return len(self.layers)

    def layer_energies(self):
        return np.array([float(np.dot(z, z)) for z in self.layers])


@dataclass(frozen=True, eq=False)
class DistortionProfile:
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __getitem__(self, prefix_len):
        return self.values[prefix_len]

    def __len__(self):
        return self.values.size

    @property
    def num_layers(self):
        return self.values.size - 1

    def is_nonincreasing(self, slack=1e-12):
        return bool(np.all(self.values[1:] <= self.values[:-1] + slack))


def _check_layer_count(signal, num_layers):
    if int(num_layers) != num_layers or not 1 <= num_layers <= signal.depth + 1:
        raise DomainError(
            f"layer count must lie in 1..{signal.depth + 1} for a signal of "
            f"length {len(signal)}, got {num_layers}"
        )


def decompose(signal, num_layers):
    """Haar analysis of depth num_layers - 1 into ordered prompt layers"""
    _check_layer_count(signal, num_layers)
    approximation = signal.samples
    details = []
    for _ in range(int(num_layers) - 1):
        even, odd = approximation[0::2], approximation[1::2]
        details.append((even - odd) / _SQRT2)
        approximation = (even + odd) / _SQRT2
    return PromptSet(
        layers=(approximation, *reversed(details)), source_length=len(signal)
    )


def reconstruct(prompts, prefix_len):
    """Inverse Haar transform with every layer past prefix_len zeroed"""
    if int(prefix_len) != prefix_len or not 0 <= prefix_len <= prompts.num_layers:
        raise DomainError(
            f"prefix length must lie in 0..{prompts.num_layers}, got {prefix_len}"
        )
    if prefix_len == 0:
        return Signal.zeros(prompts.source_length)
    approximation = prompts.layers[0]
    for index, detail in enumerate(prompts.layers[1:], start=2):
        if index > prefix_len:
            detail = np.zeros_like(detail)
        upsampled = np.empty(2 * approximation.size)
        upsampled[0::2] = (approximation + detail) / _SQRT2
        upsampled[1::2] = (approximation - detail) / _SQRT2
        approximation = upsampled
    return Signal(approximation)


def mse(x, y):
    if len(x) != len(y):
        raise DomainError(f"signal lengths differ: {len(x)} and {len(y)}")
    return float(np.mean((x.samples - y.samples) ** 2))


def distortion_profile(signal, num_layers):
    """D_0..D_L, the MSE after reconstructing from each prefix"""
    prompts = decompose(signal, num_layers)
    # the empty prefix reconstructs zeros, leaving the whole signal power
    return DistortionProfile(
        [signal.mean_power]
        + [
            mse(signal, reconstruct(prompts, prefix_len))
            for prefix_len in range(1, prompts.num_layers + 1)
        ]
    )


def tail_energy_profile(prompts):
    """(1/N) * energy of the layers beyond each prefix, the Parseval form of
    the distortion profile
    """
    energies = prompts.layer_energies()
    tails = np.append(np.cumsum(energies[::-1])[::-1], 0.0)
    return DistortionProfile(tails / prompts.source_length)
