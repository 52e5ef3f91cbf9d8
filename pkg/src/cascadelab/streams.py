"""Counter-based per-trial random streams.

Monte Carlo runs must give bit-identical results no matter how trials are
batched or scheduled.  Each trial therefore owns a private stream addressed
purely by integers: uniform j of trial t under master seed s is

    key(s, t) = mix64(s XOR mix64(t))
    bits(s, t, j) = mix64((key(s, t) + j * GOLDEN) mod 2**64)
    u(s, t, j) = (bits >> 11) / 2**53

where mix64 is the SplitMix64 finalizer (add the golden-ratio increment,
then the xor-shift-multiply avalanche).  Nothing is stateful, so any slice
of trials can be evaluated in any order, vectorised or not.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB


def mix64(x: int) -> int:
    """SplitMix64 finalizer on a 64-bit integer."""
    z = (x + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * _MUL1) & MASK64
    z = ((z ^ (z >> 27)) * _MUL2) & MASK64
    return z ^ (z >> 31)


def trial_key(seed: int, trial: int) -> int:
    return mix64((seed & MASK64) ^ mix64(trial & MASK64))


def uniform(seed: int, trial: int, index: int) -> float:
    """Uniform draw ``index`` of ``trial`` under ``seed``, in [0, 1)."""
    bits = mix64((trial_key(seed, trial) + (index & MASK64) * GOLDEN) & MASK64)
    return (bits >> 11) * 2.0**-53


def _mix64_vec(z: np.ndarray) -> np.ndarray:
    z = (z + np.uint64(GOLDEN)).astype(np.uint64)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MUL1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MUL2)
    return z ^ (z >> np.uint64(31))


def trial_keys(seed: int, trials: np.ndarray) -> np.ndarray:
    """Vectorised ``trial_key`` for an array of trial indices."""
    t = trials.astype(np.uint64)
    return _mix64_vec(np.uint64(seed & MASK64) ^ _mix64_vec(t))


def uniforms_at(keys: np.ndarray, index: int) -> np.ndarray:
    """Uniform draw ``index`` for every trial key in ``keys``."""
    ctr = keys + np.uint64((index & MASK64) * GOLDEN & MASK64)
    bits = _mix64_vec(ctr.astype(np.uint64))
    return (bits >> np.uint64(11)).astype(np.float64) * 2.0**-53


class TrialStream:
    """Scalar adapter: successive ``random()`` calls walk one trial's stream.

    Interface-compatible with ``numpy.random.Generator.random`` for the
    single-draw case, so engine code can take either.
    """

    def __init__(self, seed: int, trial: int = 0):
        self._key = trial_key(seed, trial)
        self._index = 0

    def random(self) -> float:
        bits = mix64((self._key + self._index * GOLDEN) & MASK64)
        self._index += 1
        return (bits >> 11) * 2.0**-53
