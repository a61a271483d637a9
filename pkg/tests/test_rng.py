import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from dre import rng


def test_uniform_range_and_determinism():
    u = rng.uniforms(42, (np.arange(1000), np.arange(1000)))
    assert ((0.0 <= u) & (u < 1.0)).all()
    v = rng.uniforms(42, (np.arange(1000), np.arange(1000)))
    assert np.array_equal(u, v)


def test_seed_changes_stream():
    x = np.arange(200)
    a = rng.uniforms(1, (x,))
    b = rng.uniforms(2, (x,))
    assert not np.array_equal(a, b)


@given(
    seed=st.integers(min_value=-(2**63), max_value=2**64 - 1),
    parts=st.lists(st.integers(min_value=-(2**40), max_value=2**40), min_size=1, max_size=4),
)
@settings(max_examples=80, deadline=None)
def test_scalar_matches_vector(seed, parts):
    vec = float(rng.uniforms(seed, [np.array(p, dtype=np.int64) for p in parts]))
    assert rng.uniform_one(seed, *parts) == vec


def test_spawn_seed_injective_sample():
    seen = {rng.spawn_seed(7, i, j) for i in range(40) for j in range(40)}
    assert len(seen) == 1600


def test_rough_uniformity():
    u = rng.uniforms(3, (np.arange(200000),))
    assert abs(u.mean() - 0.5) < 0.005
    assert abs((u < 0.25).mean() - 0.25) < 0.01
