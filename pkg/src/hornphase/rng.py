"""Reproducible random streams: splitmix64 seeding feeding xoshiro256**.

Every random draw in the package goes through the jitted helpers below so
that a trial is a pure function of ``(master_seed, stream_index)`` on any
platform.  The helpers take the 4-word generator state as a ``uint64``
array and advance it in place, which lets other numba kernels share them.
"""

import math

import numba
import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

_FIVE = np.uint64(5)
_NINE = np.uint64(9)
_INV53 = 1.0 / 9007199254740992.0


def splitmix64_sequence(seed, count):
    """Return ``count`` successive splitmix64 outputs starting from ``seed``."""
    x = seed & MASK64
    out = []
    for _ in range(count):
        x = (x + GOLDEN_GAMMA) & MASK64
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        out.append(z ^ (z >> 31))
    return out


def stream_state(master_seed, stream_index):
    """xoshiro256** state for a stream, as a fresh ``uint64[4]`` array."""
    if not (0 <= master_seed <= MASK64 and 0 <= stream_index <= MASK64):
        raise ValueError("seeds must be 64-bit unsigned integers")
    x = master_seed ^ ((stream_index * GOLDEN_GAMMA) & MASK64)
    words = splitmix64_sequence(x, 4)
    if not any(words):
        # all-zero is the one invalid xoshiro state
        words[0] = 1
    return np.array(words, dtype=np.uint64)


@numba.njit(inline="always", nogil=True, cache=True)
def _rotl(x, k):
    return (x << np.uint64(k)) | (x >> np.uint64(64 - k))


@numba.njit(nogil=True, cache=True)
def next_u64(state):
    s0 = state[0]
    s1 = state[1]
    s2 = state[2]
    s3 = state[3]
    result = _rotl(s1 * _FIVE, 7) * _NINE
    t = s1 << np.uint64(17)
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl(s3, 45)
    state[0] = s0
    state[1] = s1
    state[2] = s2
    state[3] = s3
    return result


@numba.njit(nogil=True, cache=True)
def next_double(state):
    """Uniform double in [0, 1) with 53 random bits."""
    return float(next_u64(state) >> np.uint64(11)) * _INV53


@numba.njit(nogil=True, cache=True)
def next_below(state, bound):
    """Uniform integer in [0, bound), exact.

    Bounds below 2**32 use Lemire's multiply-shift on the high 32 bits;
    larger bounds reject the biased low range of a full 64-bit draw.
    """
    if bound < 4294967296:
        b = np.uint64(bound)
        x = (next_u64(state) >> np.uint64(32)) * b
        low = x & np.uint64(0xFFFFFFFF)
        if low < b:
            threshold = (np.uint64(4294967296) - b) % b
            while low < threshold:
                x = (next_u64(state) >> np.uint64(32)) * b
                low = x & np.uint64(0xFFFFFFFF)
        return np.int64(x >> np.uint64(32))
    b = np.uint64(bound)
    threshold = (np.uint64(0) - b) % b
    while True:
        r = next_u64(state)
        if r >= threshold:
            return np.int64(r % b)


@numba.njit(nogil=True, cache=True)
def next_binomial(state, n, p):
    """Exact Binomial(n, p) draw by summing geometric gaps between successes.

    Cost is O(n * min(p, 1 - p)) expected, with no underflow for large n.
    """
    if n <= 0 or p <= 0.0:
        return np.int64(0)
    if p >= 1.0:
        return np.int64(n)
    flip = p > 0.5
    q = 1.0 - p if flip else p
    log_q = math.log1p(-q)
    count = 0
    pos = 0.0
    limit = float(n)
    while True:
        u = 1.0 - next_double(state)
        pos += math.floor(math.log(u) / log_q) + 1.0
        if pos > limit:
            break
        count += 1
    if flip:
        return np.int64(n - count)
    return np.int64(count)


@numba.njit(nogil=True, cache=True)
def _fill_u64(state, out):
    for i in range(out.shape[0]):
        out[i] = next_u64(state)


class RngStream:
    """A seeded random stream identified by ``(master_seed, stream_index)``.

    The stream is stateful: draws advance it.  Two streams built from the
    same pair produce identical sequences.
    """

    __slots__ = ("master_seed", "stream_index", "state")

    def __init__(self, master_seed=0, stream_index=0):
        self.master_seed = int(master_seed)
        self.stream_index = int(stream_index)
        self.state = stream_state(self.master_seed, self.stream_index)

    def __repr__(self):
        return f"RngStream(master_seed={self.master_seed}, stream_index={self.stream_index})"

    def next_u64(self):
        return int(next_u64(self.state))

    def u64_array(self, size):
        out = np.empty(size, dtype=np.uint64)
        _fill_u64(self.state, out)
        return out

    def random(self):
        return next_double(self.state)

    def integers(self, bound):
        if bound < 1:
            raise ValueError("bound must be positive")
        return int(next_below(self.state, bound))

    def bernoulli(self, p):
        return next_double(self.state) < p

    def binomial(self, n, p):
        return int(next_binomial(self.state, n, p))

    def spawn(self, index):
        """Child stream keyed by ``index``; consumes one draw from this stream."""
        return RngStream(self.next_u64(), index)
