import math

import numpy as np
import pytest

from reductionlab.noise import (
    NoisePath,
    trajectory_generator,
    wiener_chunks,
    wiener_path,
)


def test_same_seed_identical():
    a = wiener_path(7, 1e-3, 1000)
    b = wiener_path(7, 1e-3, 1000)
    assert np.array_equal(a.increments, b.increments)


def test_variance_within_four_sigma():
    dt = 1e-3
    n = 1_000_000
    path = wiener_path(123, dt, n)
    s2 = path.increments.var(ddof=1)
    # chi-square variance test: Var(s²) = 2·dt²/(n−1)
    band = 4.0 * dt * math.sqrt(2.0 / (n - 1))
    assert abs(s2 - dt) <= band


def test_mean_within_four_sigma():
    dt = 1e-3
    n = 200_000
    path = wiener_path(5, dt, n)
    sem = math.sqrt(dt / n)
    assert abs(path.increments.mean()) <= 4.0 * sem


def test_distinct_seeds_uncorrelated():
    dt, n = 1e-3, 200_000
    a = wiener_path(1, dt, n).increments
    b = wiener_path(2, dt, n).increments
    r = float(np.dot(a, b) / n / dt)
    assert abs(r) <= 4.0 / math.sqrt(n)


def test_chunked_matches_oneshot_prefix():
    ref = wiener_path((3, 1), 0.01, 700).increments
    gen = trajectory_generator(3, 1)
    got = np.concatenate(list(wiener_chunks(gen, 0.01, 700, chunk=128)))
    assert np.array_equal(ref, got)


def test_trajectory_streams_independent_of_order():
    later = trajectory_generator(9, 57).standard_normal(8)
    # generating stream 3 first must not perturb stream 57
    trajectory_generator(9, 3).standard_normal(100)
    again = trajectory_generator(9, 57).standard_normal(8)
    assert np.array_equal(later, again)


def test_parameter_validation():
    with pytest.raises(ValueError):
        wiener_path(0, -1.0, 10)
    with pytest.raises(ValueError):
        wiener_path(0, 1.0, 0)


def test_csv_dump(tmp_path):
    p = wiener_path(11, 0.5, 3)
    p.to_csv(tmp_path / "noise.csv")
    lines = (tmp_path / "noise.csv").read_text().splitlines()
    assert lines[0] == "step,dW"
    assert len(lines) == 4
    assert float(lines[1].split(",")[1]) == p.increments[0]


def test_noisepath_frozen():
    p = wiener_path(0, 1.0, 4)
    assert isinstance(p, NoisePath)
    with pytest.raises(ValueError):
        p.increments[0] = 5.0
