"""
Seeded pseudo-random stream used by every generator in the toolkit.

Algorithm "pap-rng/1": xoshiro256** state seeded with four successive
SplitMix64 outputs. Derived streams (one per video, per crop, ...) mix the
parent seed and the integer keys through SplitMix64, so any stream can be
reproduced without generating the ones before it. The algorithm and the
derivation rule are frozen; changing either breaks every golden file.
See docs/schema.md for the reference definition.
"""

MASK64 = (1 << 64) - 1
ALGORITHM = "pap-rng/1"


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


def splitmix64(state: int) -> tuple[int, int]:
    """One SplitMix64 step: returns (next_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def derive_seed(seed: int, *keys: int) -> int:
    """Mix a parent seed with integer keys into a child seed."""
    state = seed & MASK64
    for key in keys:
        state, out = splitmix64(state ^ (key & MASK64))
        state = out
    return state


class Rng:
    """xoshiro256** generator with the few draws the toolkit needs."""

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        sm = self.seed
        s = []
        for _ in range(4):
            sm, out = splitmix64(sm)
            s.append(out)
        self._s = s

    def child(self, *keys: int) -> "Rng":
        return Rng(derive_seed(self.seed, *keys))

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def below(self, n: int) -> int:
        """Uniform integer in [0, n), unbiased (Lemire multiply-shift with rejection)."""
        if n <= 0:
            raise ValueError(f"Invalid bound '{n}'. Must be >= 1.")
        m = self.next_u64() * n
        low = m & MASK64
        if low < n:
            threshold = ((1 << 64) - n) % n
            while low < threshold:
                m = self.next_u64() * n
                low = m & MASK64
        return m >> 64

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] inclusive."""
        return lo + self.below(hi - lo + 1)

    def uniform(self) -> float:
        """Float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def bernoulli(self, threshold: int) -> bool:
        """True with probability threshold / 2**64 (fixed-point, no floats)."""
        return self.next_u64() < threshold

    def color(self) -> tuple[int, int, int]:
        v = self.next_u64()
        return (v & 0xFF, (v >> 8) & 0xFF, (v >> 16) & 0xFF)


def probability_threshold(p: float) -> int:
    """Fixed-point form of a probability for Rng.bernoulli."""
    if p >= 1.0:
        return 1 << 64
    return int(p * (1 << 64))
