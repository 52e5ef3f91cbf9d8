"""Counter-stream determinism: the whole Monte Carlo story rests on this."""
import numpy as np

from cascadelab.streams import (
    GOLDEN,
    MASK64,
    TrialStream,
    mix64,
    trial_key,
    trial_keys,
    uniform,
    uniforms_at,
)

# Published output sequence of splitmix64 seeded with 0; mix64 folds the
# golden-ratio increment in, so mix64(i * GOLDEN) is output i.
_SPLITMIX64_SEED0 = [
    0xE220A8397B1DCDAF,
    0x6E789E6AA1B965F4,
    0x06C45D188009454F,
    0xF88BB8A8724C81EC,
    0x1B39896A51A8749B,
]


def test_mix64_matches_published_vector():
    got = [mix64((i * GOLDEN) & MASK64) for i in range(5)]
    assert got == _SPLITMIX64_SEED0


def test_mix64_stays_in_64_bits():
    for x in (0, 1, MASK64, GOLDEN, 0xDEADBEEF):
        assert 0 <= mix64(x) <= MASK64


def test_uniform_range_and_determinism():
    us = [uniform(3, 5, j) for j in range(100)]
    assert all(0.0 <= u < 1.0 for u in us)
    assert us == [uniform(3, 5, j) for j in range(100)]
    assert uniform(9, 4, 0) == 0.11231716671726866


def test_trials_get_distinct_streams():
    a = [uniform(0, 0, j) for j in range(8)]
    b = [uniform(0, 1, j) for j in range(8)]
    c = [uniform(1, 0, j) for j in range(8)]
    assert a != b and a != c and b != c


def test_vector_path_is_bit_identical_to_scalar():
    seed = 17
    trials = np.arange(64, dtype=np.uint64)
    keys = trial_keys(seed, trials)
    for t in (0, 1, 31, 63):
        assert int(keys[t]) == trial_key(seed, t)
    for j in (0, 1, 2, 50):
        vec = uniforms_at(keys, j)
        for t in (0, 5, 63):
            assert float(vec[t]) == uniform(seed, t, j)


def test_trial_stream_walks_the_indexed_draws():
    ts = TrialStream(21, trial=3)
    assert [ts.random() for j in range(10)] == [uniform(21, 3, j) for j in range(10)]
