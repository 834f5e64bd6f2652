"""Streaming baselines: RNCA and reservoir-sampled Nystrom.

RNCA performs exact linear PCA on the random-feature lift of the stream by
accumulating the m x m covariance one outer product per point, then
eigendecomposing once at the end of training.

The Nystrom baseline keeps c independent single-slot reservoir samplers
(slot i replaces its content at stream step t with probability 1/t, so
every slot holds a uniform sample of the stream, with-replacement across
slots). Reconstruction is C @ pinv(W_k) @ C.T from the kernel matrix W of
the sampled points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .counters import EntryCounter
from .errors import ContractViolationError
from .kernels import KernelSpec, cross_gram, gram
from .numerics import MACHINE_EPS, as_matrix, as_vector, sym_eig
from .rff import FeatureMap


@dataclass(frozen=True)
class RncaModel:
    """Feature-space covariance plus its eigendecomposition; immutable after training."""

    fm: FeatureMap
    cov: np.ndarray  # (m, m) sum of outer products z_i z_i^T
    n_seen: int
    eigvals: np.ndarray  # (m,) non-increasing
    eigvecs: np.ndarray  # (m, m) orthonormal columns
    peak_entries: int

    @property
    def m(self) -> int:
        return self.fm.m

    def reconstruct(self, a, k: int | None = None, chunk: int = 256) -> np.ndarray:
        """Evaluation-only gram reconstruction Z V_k V_k^T Z^T; k = m gives Z Z^T."""
        if k is None:
            k = self.m
        if not 1 <= k <= self.m:
            raise ContractViolationError(f"k must be in [1, {self.m}], got {k}")
        arr = as_matrix(a, "data matrix")
        n = arr.shape[0]
        vk = self.eigvecs[:, :k]
        t = np.empty((n, k))
        for start in range(0, n, chunk):
            stop = min(start + chunk, n)
            t[start:stop] = self.fm.apply_batch(arr[start:stop]) @ vk
        g = t @ t.T
        return (g + g.T) / 2.0

    def test(self, x, k: int) -> tuple[np.ndarray, np.ndarray, float]:
        """Lift a point and project onto the top-k covariance eigenspace.

        Returns (lifted, loading, residual), mirroring the SKPCA test path
        at O(dm + mk) cost.
        """
        if not 1 <= k <= self.m:
            raise ContractViolationError(f"k must be in [1, {self.m}], got {k}")
        lifted = self.fm.apply(x)
        vk = self.eigvecs[:, :k]
        loading = vk.T @ lifted
        residual = float(np.linalg.norm(lifted - vk @ loading))
        return lifted, loading, residual


def rnca_train(fm: FeatureMap, stream: Iterable) -> RncaModel:
    """Accumulate Cov = sum_i z_i z_i^T in one pass; eigendecompose once at the end."""
    counter = EntryCounter()
    m = fm.m
    counter.alloc(m * fm.d + m)  # feature map
    cov = np.zeros((m, m))
    counter.alloc(m * m)
    counter.alloc(2 * m)  # lifted-row buffer + accumulation row scratch
    n_seen = 0
    d = fm.d
    for i, row in enumerate(stream):
        vec = as_vector(row, f"stream point {i}")
        if vec.size != d:
            raise ContractViolationError(
                f"stream point {i} has dimension {vec.size}, expected {d}"
            )
        z = fm.apply(vec)
        counter.alloc(m * m)  # outer-product temporary
        cov += np.outer(z, z)
        counter.free(m * m)
        n_seen += 1
    if n_seen == 0:
        raise ContractViolationError("training stream is empty")
    counter.alloc(m * m + m)  # eigendecomposition output
    eigvals, eigvecs = sym_eig(cov)
    return RncaModel(
        fm=fm,
        cov=cov,
        n_seen=n_seen,
        eigvals=eigvals,
        eigvecs=eigvecs,
        peak_entries=counter.peak,
    )


@dataclass(frozen=True)
class NystromModel:
    """Reservoir-sampled Nystrom approximation; immutable after training.

    Stores the sampled points and the eigendecomposition of their kernel
    matrix W (W itself is recomputable from the samples on demand, keeping
    peak memory at the c^2 + cd budget). `wk_pinv` caches pinv(best rank-k
    of W) for reconstruction.
    """

    kernel: KernelSpec
    samples: np.ndarray  # (c, d)
    k: int
    eigvals: np.ndarray  # (c,) non-increasing
    eigvecs: np.ndarray  # (c, c)
    wk_pinv: np.ndarray  # (c, c)
    seed: int | None = None
    n_seen: int = 0
    replacements: int = 0
    peak_entries: int = 0
    _sqrt_k: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        lam = np.maximum(self.eigvals[: self.k], 0.0)
        object.__setattr__(self, "_sqrt_k", np.sqrt(lam))

    @property
    def c(self) -> int:
        return self.samples.shape[0]

    @property
    def w(self) -> np.ndarray:
        """Kernel matrix of the samples, recomputed on demand."""
        return gram(self.kernel, self.samples)

    @classmethod
    def from_samples(
        cls,
        kernel: KernelSpec,
        samples,
        k: int,
        *,
        seed: int | None = None,
        n_seen: int = 0,
        replacements: int = 0,
        counter: EntryCounter | None = None,
    ) -> "NystromModel":
        """Build the model for a fixed set of sampled points."""
        pts = as_matrix(samples, "samples")
        c = pts.shape[0]
        if not 1 <= k <= c:
            raise ContractViolationError(f"k must be in [1, {c}], got {k}")
        if counter is None:
            counter = EntryCounter()
            counter.alloc(pts.size)
        # a caller-provided counter has already counted the sample buffer
        w_mat = gram(kernel, pts)
        counter.alloc(c * c)
        eigvals, eigvecs = sym_eig(w_mat)
        counter.alloc(c * c + c)
        counter.free(c * c)  # W released once decomposed
        del w_mat
        # pinv of the rank-k truncation, straight from the eigenpairs:
        # eigenvalues at or below the relative cutoff invert to zero
        cutoff = c * MACHINE_EPS * max(eigvals[0], 0.0)
        lam = eigvals[:k]
        inv = np.where(lam > cutoff, 1.0 / np.where(lam > cutoff, lam, 1.0), 0.0)
        vk = eigvecs[:, :k]
        counter.alloc(c * k)
        scaled = vk * inv
        counter.alloc(c * c)
        wk_pinv = scaled @ vk.T
        counter.free(c * k)
        return cls(
            kernel=kernel,
            samples=pts,
            k=k,
            eigvals=eigvals,
            eigvecs=eigvecs,
            wk_pinv=wk_pinv,
            seed=seed,
            n_seen=n_seen,
            replacements=replacements,
            peak_entries=counter.peak,
        )

    def test(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Kernel row against the samples plus rank-k loading.

        The loading is the Nystrom embedding Lambda_k^{-1/2} V_k^T c_row,
        computed through the c-dimensional projection u = pinv(W_k) c_row,
        so pairwise loading inner products reproduce the reconstructed gram
        entries. Costs O(cd + c^2 + ck).
        """
        xv = as_vector(x, "point")
        if xv.size != self.samples.shape[1]:
            raise ContractViolationError(
                f"point has dimension {xv.size}, samples have {self.samples.shape[1]}"
            )
        c_row = cross_gram(self.kernel, xv[None, :], self.samples)[0]
        u = self.wk_pinv @ c_row
        loading = self._sqrt_k * (self.eigvecs[:, : self.k].T @ u)
        return c_row, loading

    def residual(self, c_row: np.ndarray) -> float:
        """Norm of the kernel row outside the rank-k eigenspace of W."""
        vk = self.eigvecs[:, : self.k]
        return float(np.linalg.norm(c_row - vk @ (vk.T @ c_row)))

    def reconstruct(self, a) -> np.ndarray:
        """Evaluation-only reconstruction C @ pinv(W_k) @ C.T."""
        arr = as_matrix(a, "data matrix")
        c_mat = cross_gram(self.kernel, arr, self.samples)
        g = c_mat @ self.wk_pinv @ c_mat.T
        return (g + g.T) / 2.0


def reservoir_sample(
    c: int, seed: int, stream: Iterable, counter: EntryCounter | None = None
) -> tuple[np.ndarray, int, np.ndarray]:
    """Run c independent single-slot reservoir samplers over a stream.

    Slot i replaces its content at step t with probability 1/t, so each
    slot ends up holding a uniform sample of the stream; slots draw
    independently, giving with-replacement semantics across slots.
    Returns (samples, n_seen, per-slot replacement counts).
    """
    if c < 1:
        raise ContractViolationError(f"sample count c must be >= 1, got {c}")
    rng = np.random.default_rng(seed)
    samples = None
    d = None
    slot_replacements = np.zeros(c, dtype=np.int64)
    t = 0
    for i, row in enumerate(stream):
        vec = as_vector(row, f"stream point {i}")
        if d is None:
            d = vec.size
            samples = np.empty((c, d))
            if counter is not None:
                counter.alloc(c * d)
        elif vec.size != d:
            raise ContractViolationError(
                f"stream point {i} has dimension {vec.size}, expected {d}"
            )
        t += 1
        if t == 1:
            samples[:] = vec
        else:
            replace = rng.random(c) < (1.0 / t)
            if replace.any():
                samples[replace] = vec
                slot_replacements[replace] += 1
    if t == 0:
        raise ContractViolationError("training stream is empty")
    return samples, t, slot_replacements


def nystrom_train(
    spec: KernelSpec, c: int, k: int, seed: int, stream: Iterable
) -> NystromModel:
    """Stream through c independent reservoir samplers, then build the model."""
    if c >= 1 and not 1 <= k <= c:
        raise ContractViolationError(f"k must be in [1, {c}], got {k}")
    counter = EntryCounter()
    samples, n_seen, slot_replacements = reservoir_sample(c, seed, stream, counter=counter)
    return NystromModel.from_samples(
        spec,
        samples,
        k,
        seed=seed,
        n_seen=n_seen,
        replacements=int(slot_replacements.sum()),
        counter=counter,
    )


def rnca_space_entries(m: int, d: int) -> int:
    """RNCA space formula m^2 + m*d in logical entries."""
    return m * m + m * d


def nystrom_space_entries(c: int, d: int) -> int:
    """Nystrom space formula c^2 + c*d in logical entries."""
    return c * c + c * d
