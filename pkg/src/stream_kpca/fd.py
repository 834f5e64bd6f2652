"""Modified Frequent Directions sketch over streamed rows.

The sketch keeps an ell x m matrix B. Incoming rows fill zero rows; once
all ell rows are occupied the sketch shrinks:

    [Y, Sigma, W] = svd(B)
    B <- sqrt(max{0, Sigma^2 - sigma_{ell/2}^2 I}) @ W.T

where sigma_{ell/2} is the (ell/2)-th largest singular value. Subtracting
that value zeroes at least half the rows, so the stream always has room,
and guarantees for every unit direction x

    0 <= ||A x||^2 - ||B x||^2 <= ||A - A_k||^2_F / (ell/2 - k)

with A the stacked input rows. Memory never exceeds the ell x m buffer.
"""

from __future__ import annotations

import numpy as np

from .counters import EntryCounter
from .errors import ConfigurationError, ContractViolationError
from .numerics import thin_svd


class FdSketch:
    """Single-writer streaming sketch; reads are safe once writing stops.

    `filled` is an occupancy counter, not a numerical scan: a genuinely
    zero input row still consumes a slot, matching the algorithm's
    structural zero-row bookkeeping.
    """

    def __init__(self, ell: int, m: int, counter: EntryCounter | None = None):
        if ell % 2 != 0:
            raise ConfigurationError(f"sketch size ell must be even, got {ell}")
        if not 2 <= ell <= m:
            raise ConfigurationError(
                f"sketch size ell must satisfy 2 <= ell <= m, got ell={ell}, m={m}"
            )
        self.ell = ell
        self.m = m
        self.b = np.zeros((ell, m))
        self.filled = 0
        self.inserted = 0
        self.shrinks = 0
        self._counter = counter
        if counter is not None:
            counter.alloc(ell * m)

    def insert(self, z) -> None:
        """Write a row into a zero slot; shrink if the sketch became full."""
        row = np.asarray(z, dtype=np.float64).ravel()
        if row.size != self.m:
            raise ContractViolationError(
                f"row has length {row.size}, sketch expects {self.m}"
            )
        if not np.all(np.isfinite(row)):
            raise ContractViolationError("row contains non-finite entries")
        self.b[self.filled] = row
        self.filled += 1
        self.inserted += 1
        if self.filled == self.ell:
            self._shrink()

    def _shrink(self) -> None:
        if self._counter is not None:
            # svd temporaries (u, s, v) plus the rebuilt sketch rows
            self._counter.alloc(self.ell**2 + self.ell + 2 * self.ell * self.m)
        u, s, v = thin_svd(self.b)
        delta = s[self.ell // 2 - 1] ** 2
        shrunk = np.sqrt(np.maximum(s**2 - delta, 0.0))
        self.b[:] = shrunk[:, None] * v.T
        self.filled = int(np.count_nonzero(shrunk))
        self.shrinks += 1
        if self._counter is not None:
            self._counter.free(self.ell**2 + self.ell + 2 * self.ell * self.m)

    def basis(self) -> tuple[np.ndarray, np.ndarray]:
        """Fresh thin SVD of the current sketch.

        Returns (W, S): W is m x ell with orthonormal columns (LAPACK pads
        null directions deterministically when rank < ell), S the ell
        singular values. Never mutates B, so rows inserted since the last
        shrink are always reflected.
        """
        if self.inserted == 0:
            raise ContractViolationError("sketch is empty: insert at least one row first")
        _, s, v = thin_svd(self.b)
        # contiguous copy so persisted-and-reloaded bases take the same BLAS
        # paths as freshly trained ones
        return np.ascontiguousarray(v), s

    def frobenius_sq(self) -> float:
        return float(np.sum(self.b**2))
