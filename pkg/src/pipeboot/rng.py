"""Deterministic counter-based random generation.

Every stochastic step in the package draws from this generator so that whole
runs are bit-reproducible from a single 64-bit seed and independent of
library versions. The core is the splitmix64 finalizer applied to a counter:

    value(i) = mix64(base + (i + 1) * GOLDEN),   base = mix64(seed + GOLDEN)

where GOLDEN is 2^64 / phi and mix64 is the standard splitmix64 avalanche
(xorshift-multiply twice, final xorshift). Because values are a pure function
of (seed, position), generation vectorizes over numpy uint64 arrays and
streams can be split into independent children without coordination.

Uniforms take the top 53 bits (exact doubles in [0, 1)); normals come from
the Box-Muller transform on uniform pairs, so every sampled value is fully
determined by the seed and the draw index.
"""

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)
_U64_MASK = (1 << 64) - 1
_INV_2_53 = 1.0 / float(1 << 53)


def _mix64(z):
    """splitmix64 finalizer; z is a uint64 scalar or array."""
    # wraparound mod 2^64 is the point; silence numpy's scalar overflow warning
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _MIX_A
        z = (z ^ (z >> np.uint64(27))) * _MIX_B
        return z ^ (z >> np.uint64(31))


def derive_seed(seed, key):
    """Stable 64-bit child seed for (seed, key); matches Rng(seed).split(key)."""
    with np.errstate(over="ignore"):
        base = _mix64(np.uint64(int(seed) & _U64_MASK) + GOLDEN)
        child = _mix64(base ^ _mix64(np.uint64(int(key) & _U64_MASK) + GOLDEN))
    return int(child)


class Rng:
    """Splittable counter-based generator (splitmix64)."""

    def __init__(self, seed):
        with np.errstate(over="ignore"):
            self._base = _mix64(np.uint64(int(seed) & _U64_MASK) + GOLDEN)
        self._count = 0

    def raw(self, n):
        """Next n raw uint64 values."""
        idx = np.arange(self._count + 1, self._count + n + 1, dtype=np.uint64)
        self._count += n
        with np.errstate(over="ignore"):
            return _mix64(self._base + idx * GOLDEN)

    def uniform(self, n=None):
        """Uniform float64 in [0, 1); scalar when n is None."""
        vals = (self.raw(1 if n is None else n) >> np.uint64(11)).astype(np.float64) * _INV_2_53
        return float(vals[0]) if n is None else vals

    def normal(self, n=None):
        """Standard normal via Box-Muller; scalar when n is None."""
        m = 1 if n is None else n
        pairs = (m + 1) // 2
        # u1 in (0, 1] keeps the log finite; u2 in [0, 1)
        r = self.raw(2 * pairs) >> np.uint64(11)
        u1 = (r[:pairs].astype(np.float64) + 1.0) * _INV_2_53
        u2 = r[pairs:].astype(np.float64) * _INV_2_53
        rad = np.sqrt(-2.0 * np.log(u1))
        ang = 2.0 * np.pi * u2
        z = np.empty(2 * pairs)
        z[0::2] = rad * np.cos(ang)
        z[1::2] = rad * np.sin(ang)
        return float(z[0]) if n is None else z[:m]

    def randint(self, lo, hi, n=None):
        """Uniform integers in [lo, hi); scalar when n is None."""
        if hi <= lo:
            raise ValueError(f"empty integer range [{lo}, {hi})")
        span = hi - lo
        vals = lo + np.minimum((self.uniform(1 if n is None else n) * span).astype(np.int64), span - 1)
        return int(vals[0]) if n is None else vals

    def permutation(self, n):
        """Deterministic random permutation of range(n)."""
        return np.argsort(self.raw(n), kind="stable")

    def choice(self, n, k):
        """k distinct indices drawn from range(n)."""
        if k > n:
            raise ValueError(f"cannot draw {k} distinct values from range({n})")
        return self.permutation(n)[:k]

    def split(self, key):
        """Independent child stream derived from (seed, key)."""
        with np.errstate(over="ignore"):
            child = _mix64(self._base ^ _mix64(np.uint64(int(key) & _U64_MASK) + GOLDEN))
        return Rng(int(child))

    def child_seed(self, key):
        """Integer seed of the split(key) stream."""
        with np.errstate(over="ignore"):
            return int(_mix64(self._base ^ _mix64(np.uint64(int(key) & _U64_MASK) + GOLDEN)))
