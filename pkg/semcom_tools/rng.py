#!/usr/bin/env python
"""
Counter-based uniform variates.

Every random number used by a simulation is a pure function of
(seed, stream, trial), so a run can be split over any number of workers and
reproduced in any language from this description:

    mix(z):  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
             z = (z ^ (z >> 27)) * 0x94D049BB133111EB
             return z ^ (z >> 31)                       (SplitMix64 finaliser)

    a = mix(seed + GAMMA)
    b = mix((a ^ stream) + GAMMA)
    w = mix((b ^ trial) + GAMMA)
    u = ((w >> 11) + 0.5) / 2**53

with GAMMA = 0x9E3779B97F4A7C15 and all arithmetic modulo 2**64. u lies in
the open interval (0, 1). For seed 42, stream 0 the first ten words w are

    0x6310bf04d8207f46 0xb682ee25ce24109e 0xdda7119926b6c0a1
    0x2b7db7f125278abc 0x063e23975bca03de 0x2fc36008d00d679c
    0xab37c243a8c76f9c 0xa475db99d192c121 0x529ab4f2a3133d10
    0x896b6a73d834bfdb

giving u = 0.38697427624004094, 0.71293533728579939, ...
"""
import logging

import numpy as np

import semcom_tools.exceptions

log = logging.getLogger(__name__)

__all__ = ["mix64", "stream_key", "words", "uniforms", "SHARED_STREAM"]

GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MUL_1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL_2 = np.uint64(0x94D049BB133111EB)
_SHIFT_30 = np.uint64(30)
_SHIFT_27 = np.uint64(27)
_SHIFT_31 = np.uint64(31)
_SHIFT_11 = np.uint64(11)
_TWO_POW_53 = float(2**53)
_U64_MAX = 2**64 - 1

# channel stream shared by every scenario that must see the same fading
SHARED_STREAM = 0


def _as_u64(value, name):
    value = int(value)
    if value < 0 or value > _U64_MAX:
        raise semcom_tools.exceptions.DomainError(
            f"{name} must be an unsigned 64-bit integer, got {value}"
        )
    return np.array([value], dtype=np.uint64)


def mix64(z):
    """SplitMix64 finaliser on a uint64 array, wrapping arithmetic"""
    z = np.asarray(z, dtype=np.uint64)
    z = (z ^ (z >> _SHIFT_30)) * _MUL_1
    z = (z ^ (z >> _SHIFT_27)) * _MUL_2
    return z ^ (z >> _SHIFT_31)


def stream_key(seed, stream):
    """Key b of the (seed, stream) pair, as a one element uint64 array"""
    a = mix64(_as_u64(seed, "seed") + GAMMA)
    return mix64((a ^ _as_u64(stream, "stream")) + GAMMA)


def words(seed, stream, start, stop):
    """Raw 64-bit words for trials start..stop-1"""
    if start < 0 or stop < start:
        raise semcom_tools.exceptions.DomainError(
            f"invalid trial range [{start}, {stop})"
        )
    key = stream_key(seed, stream)
    trial = np.arange(start, stop, dtype=np.uint64)
    return mix64((key ^ trial) + GAMMA)


def uniforms(seed, stream, start, stop):
    """Uniform variates in (0, 1) for trials start..stop-1 of one stream"""
    mantissa = (words(seed, stream, start, stop) >> _SHIFT_11).astype(np.float64)
    return (mantissa + 0.5) / _TWO_POW_53
