"""Small banded-matrix kernel used by the model and throughput code.

A matrix is stored as a dict of diagonals keyed by offset ``k``
(``k > 0`` super-diagonal, ``k < 0`` sub-diagonal).  Diagonal arrays are
row-aligned and padded to full length ``n``::

    diags[k][i] == A[i, i + k]      (slots outside the band hold 0.0)

Everything here is O(bandwidth * n) in time and memory.  Factorizations
are delegated to LAPACK through scipy's banded drivers; dense conversion
exists only as a fallback/oracle path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as sla

_LN2 = float(np.log(2.0))


@dataclass(frozen=True)
class BandedMatrix:
    """Square banded matrix with row-aligned diagonal storage."""

    n: int
    diags: dict[int, np.ndarray] = field(default_factory=dict)
    kind: str = "generic"

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"dimension must be >= 1, got {self.n}")
        clean: dict[int, np.ndarray] = {}
        for k, v in self.diags.items():
            if abs(k) >= self.n:
                continue
            arr = np.asarray(v, dtype=float)
            if arr.shape != (self.n,):
                raise ValueError(f"diagonal {k} must have length {self.n}")
            # zero the slots that fall outside the matrix
            arr = arr.copy()
            if k > 0:
                arr[self.n - k:] = 0.0
            elif k < 0:
                arr[:-k] = 0.0
            clean[k] = arr
        object.__setattr__(self, "diags", clean)

    @property
    def lower(self) -> int:
        return max((-k for k in self.diags if k < 0), default=0)

    @property
    def upper(self) -> int:
        return max((k for k in self.diags if k > 0), default=0)

    def diag(self, k: int) -> np.ndarray:
        """Row-aligned diagonal at offset k (zeros if absent)."""
        if k in self.diags:
            return self.diags[k].copy()
        return np.zeros(self.n)

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for k, v in self.diags.items():
            i0, i1 = max(0, -k), min(self.n, self.n - k)
            rows = np.arange(i0, i1)
            a[rows, rows + k] = v[i0:i1]
        return a

    @property
    def T(self) -> "BandedMatrix":
        out: dict[int, np.ndarray] = {}
        for k, v in self.diags.items():
            # A^T[i, i - k] = A[i - k + k, ...]; row-align by shifting
            w = np.zeros(self.n)
            i0, i1 = max(0, -k), min(self.n, self.n - k)
            w[i0 + k: i1 + k] = v[i0:i1]
            out[-k] = w
        return BandedMatrix(self.n, out, kind=self.kind)

    def _combine(self, other: "BandedMatrix", sign: float) -> "BandedMatrix":
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        out = {k: v.copy() for k, v in self.diags.items()}
        for k, v in other.diags.items():
            if k in out:
                out[k] = out[k] + sign * v
            else:
                out[k] = sign * v
        return BandedMatrix(self.n, out)

    def __add__(self, other: "BandedMatrix") -> "BandedMatrix":
        return self._combine(other, 1.0)

    def __sub__(self, other: "BandedMatrix") -> "BandedMatrix":
        return self._combine(other, -1.0)

    def scaled(self, c: float) -> "BandedMatrix":
        return BandedMatrix(self.n, {k: c * v for k, v in self.diags.items()},
                            kind=self.kind)

    def row_scaled(self, d: np.ndarray) -> "BandedMatrix":
        """diag(d) @ A."""
        return BandedMatrix(self.n, {k: d * v for k, v in self.diags.items()})

    def col_scaled(self, d: np.ndarray) -> "BandedMatrix":
        """A @ diag(d): entry (i, i+k) picks up d[i+k]."""
        out = {}
        for k, v in self.diags.items():
            w = v.copy()
            i0, i1 = max(0, -k), min(self.n, self.n - k)
            w[i0:i1] *= d[i0 + k: i1 + k]
            out[k] = w
        return BandedMatrix(self.n, out)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        y = np.zeros(self.n, dtype=np.result_type(x.dtype, float))
        for k, v in self.diags.items():
            i0, i1 = max(0, -k), min(self.n, self.n - k)
            y[i0:i1] += v[i0:i1] * x[i0 + k: i1 + k]
        return y

    def matmul(self, other: "BandedMatrix") -> "BandedMatrix":
        """Banded product; result bandwidths add."""
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        n = self.n
        out: dict[int, np.ndarray] = {}
        for ka, va in self.diags.items():
            for kb, vb in other.diags.items():
                kc = ka + kb
                if abs(kc) >= n:
                    continue
                # C[i, i+kc] += A[i, i+ka] * B[i+ka, i+ka+kb]
                i0 = max(0, -ka, -kc)
                i1 = min(n, n - ka, n - kc)
                if i1 <= i0:
                    continue
                acc = out.setdefault(kc, np.zeros(n))
                acc[i0:i1] += va[i0:i1] * vb[i0 + ka: i1 + ka]
        return BandedMatrix(n, out)


def identity(n: int) -> BandedMatrix:
    return BandedMatrix(n, {0: np.ones(n)})


def from_dense(a: np.ndarray, kind: str = "generic") -> BandedMatrix:
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    diags = {}
    for k in range(-(n - 1), n):
        v = np.diagonal(a, offset=k)
        if np.any(v != 0.0):
            w = np.zeros(n)
            i0 = max(0, -k)
            w[i0: i0 + len(v)] = v
            diags[k] = w
    return BandedMatrix(n, diags, kind=kind)


def _upper_ab(a: BandedMatrix) -> np.ndarray:
    """Symmetric upper band storage as scipy's solveh_banded expects."""
    u, n = a.upper, a.n
    ab = np.zeros((u + 1, n))
    for k in range(u + 1):
        v = a.diag(k)
        i1 = n - k
        ab[u - k, k:] = v[0:i1]
    return ab


def _general_ab(a: BandedMatrix) -> tuple[tuple[int, int], np.ndarray]:
    """(l, u) and band storage as scipy's solve_banded expects."""
    l, u, n = a.lower, a.upper, a.n
    ab = np.zeros((l + u + 1, n))
    for k in range(1, u + 1):
        ab[u - k, k:] = a.diag(k)[0: n - k]
    ab[u, :] = a.diag(0)
    for m in range(1, l + 1):
        ab[u + m, 0: n - m] = a.diag(-m)[m:]
    return (l, u), ab


def cholesky_upper(a: BandedMatrix) -> np.ndarray:
    """Banded Cholesky factor (upper form); raises LinAlgError if not PD."""
    return sla.cholesky_banded(_upper_ab(a), lower=False)


def logdet2_sym_pd(a: BandedMatrix) -> float:
    """log2 det(A) for symmetric positive definite banded A."""
    c = cholesky_upper(a)
    return 2.0 * float(np.sum(np.log(c[-1]))) / _LN2


def solve_sym_pd(a: BandedMatrix, b: np.ndarray) -> np.ndarray:
    return sla.solveh_banded(_upper_ab(a), b)


def solve_general(a: BandedMatrix, b: np.ndarray) -> np.ndarray:
    lu, ab = _general_ab(a)
    return sla.solve_banded(lu, ab, b)


def colored_factor_apply(chol_upper: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Apply U^T to w, where U is a banded upper Cholesky factor.

    With A = U^T U, the vector U^T w has covariance A when w is white.
    """
    u = chol_upper.shape[0] - 1
    n = chol_upper.shape[1]
    out = np.zeros(n, dtype=w.dtype)
    for m in range(u + 1):
        out[m:] += chol_upper[u - m, m:] * w[: n - m]
    return out
