"""Seeded complex Gaussian sampling.

Every stream is identified by ``(master_seed, stream_index)``; the pair is
hashed with a splitmix64 avalanche into a Philox key, so a trial's draws do
not depend on which other trials ran, or in which order.

Complex Gaussians use the ``E|q|^2 = 1`` convention (real and imaginary
parts independent, each of variance 1/2), generated by Box-Muller.
"""
from dataclasses import dataclass, field

import numpy as np

from .linalg import hs_norm

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(x):
    x = (x + _GOLDEN) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def stream_seed(master_seed, stream_index):
    """Fixed avalanche mix of a master seed and a stream index into 64 bits."""
    return _splitmix64(_splitmix64(master_seed & _MASK64) ^ (stream_index & _MASK64))


@dataclass
class RngState:
    master_seed: int
    stream_index: int = 0
    _gen: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.stream_index < 0:
            raise ValueError("stream_index must be non-negative")
        self.reset()

    def reset(self):
        key = stream_seed(self.master_seed, self.stream_index)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def uniforms(self, size):
        """Uniform doubles on (0, 1]."""
        return 1.0 - self._gen.random(size)


def _box_muller(u):
    # u has shape (..., 2); modulus sqrt(-log u1) gives |q|^2 ~ Exp(1)
    radius = np.sqrt(-np.log(u[..., 0]))
    angle = 2.0 * np.pi * u[..., 1]
    return radius * np.cos(angle) + 1j * radius * np.sin(angle)


def sample_complex_gaussian(rng: RngState) -> complex:
    return complex(_box_muller(rng.uniforms(2)))


def sample_complex_gaussians(count: int, rng: RngState) -> np.ndarray:
    """``count`` draws; same values as ``count`` calls to :func:`sample_complex_gaussian`."""
    if count < 0:
        raise ValueError("count must be non-negative")
    return _box_muller(rng.uniforms(2 * count).reshape(count, 2))


def sample_ginibre(n: int, rng: RngState) -> np.ndarray:
    """n x n matrix of i.i.d. standard complex Gaussians, filled row-major."""
    if n < 1:
        raise ValueError(f"matrix dimension must be >= 1, got {n}")
    return sample_complex_gaussians(n * n, rng).reshape(n, n)


@dataclass(frozen=True)
class ConcentrationReport:
    trials: int
    violations: int
    threshold: float

    @property
    def fraction(self):
        return self.violations / self.trials if self.trials else 0.0


def verify_hs_concentration(n, trials, c1=2.0, rng=None):
    """Count Ginibre draws with ||Q||_HS^2 > c1^2 n^2.

    Draw ``i`` uses stream ``rng.stream_index + i`` of ``rng.master_seed``.
    """
    if trials < 0:
        raise ValueError("trials must be non-negative")
    if c1 <= 0:
        raise ValueError("c1 must be positive")
    if rng is None:
        rng = RngState(0)
    threshold = c1 * c1 * n * n
    violations = 0
    for i in range(trials):
        q = sample_ginibre(n, RngState(rng.master_seed, rng.stream_index + i))
        if hs_norm(q) ** 2 > threshold:
            violations += 1
    return ConcentrationReport(trials=trials, violations=violations, threshold=threshold)
