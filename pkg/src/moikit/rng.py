"""SplitMix64 pseudo-random generator.

State is one 64-bit word.  Each draw adds the increment
``0x9E3779B97F4A7C15`` to the state (mod 2^64) and outputs

    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z = z ^ (z >> 31)

all arithmetic mod 2^64.  Uniforms in [0, 1) take the top 53 bits of ``z``;
normals come from Box-Muller on consecutive uniform pairs.  Because the
state is a counter, blocks of draws are generated vectorized.
"""

from __future__ import annotations

import hashlib

import numpy as np

GAMMA = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)


def derive_seed(seed: int, name: str) -> int:
    """Independent 64-bit stream seed for ``(seed, name)``."""
    digest = hashlib.blake2b(f"{int(seed)}:{name}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


class SplitMix64:
    def __init__(self, seed: int):
        self.state = int(seed) % (1 << 64)

    def next_uint64(self, n: int) -> np.ndarray:
        steps = np.arange(1, n + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self.state) + steps * GAMMA
            z = (z ^ (z >> np.uint64(30))) * MIX1
            z = (z ^ (z >> np.uint64(27))) * MIX2
            z = z ^ (z >> np.uint64(31))
        self.state = (self.state + n * int(GAMMA)) % (1 << 64)
        return z

    def random(self, size=None) -> np.ndarray | float:
        n = int(np.prod(size)) if size is not None else 1
        u = (self.next_uint64(n) >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))
        return float(u[0]) if size is None else u.reshape(size)

    def standard_normal(self, size=None) -> np.ndarray | float:
        n = int(np.prod(size)) if size is not None else 1
        m = (n + 1) // 2
        u = self.random(2 * m)
        r = np.sqrt(-2.0 * np.log1p(-u[0::2]))
        theta = 2.0 * np.pi * u[1::2]
        z = np.concatenate([r * np.cos(theta), r * np.sin(theta)])[:n]
        return float(z[0]) if size is None else z.reshape(size)

    def integers(self, low: int, high: int, size=None):
        """Uniform integers in ``[low, high)``."""
        n = int(np.prod(size)) if size is not None else 1
        span = high - low
        out = low + np.floor(self.random(n) * span).astype(int)
        return int(out[0]) if size is None else out.reshape(size)

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None):
        u = self.random(size)
        return low + (high - low) * u

    def complex_normal(self, shape) -> np.ndarray:
        """Independent standard complex Gaussians (unit variance per entry)."""
        z = self.standard_normal((2,) + tuple(shape))
        return (z[0] + 1j * z[1]) / np.sqrt(2.0)


def as_generator(rng_or_seed):
    if isinstance(rng_or_seed, SplitMix64) or hasattr(rng_or_seed, "standard_normal"):
        return rng_or_seed
    return SplitMix64(int(rng_or_seed))
