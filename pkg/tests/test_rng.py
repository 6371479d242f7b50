import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from hornphase.rng import MASK64, RngStream, splitmix64_sequence, stream_state


def test_splitmix64_reference_value():
    # first output of splitmix64 seeded with 0
    assert splitmix64_sequence(0, 1) == [0xE220A8397B1DCDAF]


def test_xoshiro_reference_sequence():
    r = RngStream()
    r.state[:] = np.array([1, 2, 3, 4], dtype=np.uint64)
    assert [r.next_u64() for _ in range(4)] == [11520, 0, 1509978240, 1215971899390074240]


def test_stream_state_is_splitmix_of_mixed_seed():
    master, index = 12345, 7
    x = master ^ ((index * 0x9E3779B97F4A7C15) & MASK64)
    assert stream_state(master, index).tolist() == splitmix64_sequence(x, 4)


def test_same_pair_same_sequence():
    a = RngStream(99, 3)
    b = RngStream(99, 3)
    assert [a.next_u64() for _ in range(50)] == [b.next_u64() for _ in range(50)]


def test_different_streams_differ():
    a = RngStream(99, 3).u64_array(8)
    b = RngStream(99, 4).u64_array(8)
    assert not np.array_equal(a, b)


def test_rejects_out_of_range_seed():
    with pytest.raises(ValueError):
        RngStream(-1)
    with pytest.raises(ValueError):
        RngStream(0, 1 << 64)


@given(st.integers(1, 10**12))
@settings(max_examples=50, deadline=None)
def test_integers_in_range(bound):
    r = RngStream(bound, 1)
    for _ in range(20):
        assert 0 <= r.integers(bound) < bound


def test_integers_uniform_chi_square():
    r = RngStream(5)
    draws = np.array([r.integers(7) for _ in range(70_000)])
    counts = np.bincount(draws, minlength=7)
    assert stats.chisquare(counts).pvalue > 0.001


def test_random_unit_interval_mean():
    r = RngStream(8)
    xs = np.array([r.random() for _ in range(20_000)])
    assert xs.min() >= 0.0 and xs.max() < 1.0
    assert abs(xs.mean() - 0.5) < 4 * np.sqrt(1 / 12 / xs.size)


@pytest.mark.parametrize("n,p", [(0, 0.3), (10, 0.0), (10, 1.0), (1, 0.5)])
def test_binomial_edge_cases(n, p):
    r = RngStream(2)
    v = r.binomial(n, p)
    assert 0 <= v <= n
    if p == 0.0 or n == 0:
        assert v == 0
    if p == 1.0:
        assert v == n


@pytest.mark.parametrize("n,p", [(20, 0.3), (50, 0.9), (10**6, 1e-6), (200, 0.5)])
def test_binomial_matches_distribution(n, p):
    r = RngStream(17)
    draws = np.array([r.binomial(n, p) for _ in range(20_000)])
    mean, var = n * p, n * p * (1 - p)
    assert abs(draws.mean() - mean) < 4 * np.sqrt(var / draws.size)
    # coarse chi-square on the central bins
    lo, hi = stats.binom.ppf([0.01, 0.99], n, p).astype(int)
    edges = np.arange(lo, hi + 2)
    observed = np.array([(draws < lo).sum()] + [(draws == k).sum() for k in edges[:-1]] + [(draws > hi).sum()])
    probs = np.concatenate(
        ([stats.binom.cdf(lo - 1, n, p)], stats.binom.pmf(edges[:-1], n, p), [stats.binom.sf(hi, n, p)])
    )
    keep = probs * draws.size >= 5
    expected = probs[keep] / probs[keep].sum() * observed[keep].sum()
    assert stats.chisquare(observed[keep], expected).pvalue > 0.001


def test_spawn_is_deterministic():
    a = RngStream(1).spawn(5)
    b = RngStream(1).spawn(5)
    assert a.next_u64() == b.next_u64()
