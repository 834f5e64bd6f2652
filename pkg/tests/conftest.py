"""Shared test helpers."""

from __future__ import annotations

import numpy as np

from stream_kpca import sym_eig


def gaussian_mixture(
    n: int,
    d: int,
    n_clusters: int = 5,
    center_scale: float = 3.0,
    noise: float = 1.0,
    seed: int = 0,
) -> np.ndarray:
    """Points drawn from a random mixture of spherical Gaussians."""
    rng = np.random.default_rng(seed)
    centers = rng.normal(0.0, center_scale, (n_clusters, d))
    idx = rng.integers(0, n_clusters, n)
    return centers[idx] + rng.normal(0.0, noise, (n, d))


def exact_phi(g: np.ndarray) -> np.ndarray:
    """Explicit factor Phi with Phi @ Phi.T = G, from the eigendecomposition.

    Negative round-off eigenvalues clamp to zero.
    """
    w, v = sym_eig(g)
    return v * np.sqrt(np.maximum(w, 0.0))
