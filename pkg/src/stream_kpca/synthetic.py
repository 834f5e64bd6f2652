"""Synthetic data: low-rank signal plus dense Gaussian noise.

Generates A = S D U + F / zeta where S (n x s) and F (n x d) are i.i.d.
standard normal, D is diagonal with linearly decreasing entries
D_ii = 1 - (i-1)/d, U is a random rotation restricted to s rows, and zeta
controls the signal-to-noise ratio.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

DEFAULT_SIGNAL_DIM = 50
DEFAULT_NOISE_DIVISOR = 10.0


@dataclass(frozen=True)
class SyntheticSpec:
    n: int
    d: int
    s: int = DEFAULT_SIGNAL_DIM
    zeta: float = DEFAULT_NOISE_DIVISOR
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ConfigurationError(f"n must be >= 1, got {self.n}")
        if self.s >= self.d:
            raise ConfigurationError(
                f"signal dimension s must be < d, got s={self.s}, d={self.d}"
            )
        if self.s < 1:
            raise ConfigurationError(f"signal dimension s must be >= 1, got {self.s}")
        if not self.zeta > 0:
            raise ConfigurationError(f"noise divisor zeta must be > 0, got {self.zeta}")


def signal_diagonal(s: int, d: int) -> np.ndarray:
    """Linearly decreasing signal weights D_ii = 1 - (i-1)/d (1-indexed i)."""
    return 1.0 - np.arange(s) / d


def gen_random_noisy(spec: SyntheticSpec) -> np.ndarray:
    """Draw the (n, d) matrix; same spec (including seed) is bit-reproducible.

    Draw order is fixed: signal S, then the rotation, then the noise F.
    """
    rng = np.random.default_rng(spec.seed)
    s_mat = rng.standard_normal((spec.n, spec.s))
    d_diag = signal_diagonal(spec.s, spec.d)
    q, _ = np.linalg.qr(rng.standard_normal((spec.d, spec.s)))
    u = q.T  # s rows, orthonormal
    f = rng.standard_normal((spec.n, spec.d))
    return (s_mat * d_diag) @ u + f / spec.zeta
