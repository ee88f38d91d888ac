"""Domain types and structured matrices for the two-user oversampled uplink.

Index convention used throughout the package: the 2N samples and 2N
symbols of one frame are interleaved, so row/column ``2i`` belongs to
stream 1 at symbol slot ``i`` and ``2i + 1`` to stream 2 at slot ``i``
(0-based).  With normalized mismatch tau, the correlation matrix of the
two matched-filter banks is the symmetric tridiagonal

    row 2i  :  [... tau   1    1-tau ...]
    row 2i+1:  [... 1-tau 1    tau   ...]

which also serves as the covariance of the oversampled noise vector.
Timing offsets (sync error eps1, coordination error eps2) perturb both
the signal mixing matrix and the noise covariance; the perturbations are
banded with at most two off-diagonals and are built here for every sign
combination of eps1 and eps1 + eps2.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ._bands import BandedMatrix


class DomainError(ValueError):
    """Raised when inputs leave the admissible parameter region."""


@dataclass(frozen=True)
class LinkConfig:
    """Per-user transmit powers and complex channel coefficients.

    The throughput formulas depend on the link only through the receive
    gains mu1 = p1*|h1|^2 and mu2 = p2*|h2|^2; h1/h2 stay complex so the
    waveform simulator can carry phase.
    """

    p1: float
    p2: float
    h1: complex = 1.0 + 0.0j
    h2: complex = 1.0 + 0.0j
    p1_max: float | None = None
    p2_max: float | None = None

    def __post_init__(self) -> None:
        p1_max = self.p1 if self.p1_max is None else self.p1_max
        p2_max = self.p2 if self.p2_max is None else self.p2_max
        object.__setattr__(self, "p1_max", float(p1_max))
        object.__setattr__(self, "p2_max", float(p2_max))
        for name in ("p1", "p2", "p1_max", "p2_max"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v < 0.0:
                raise DomainError(f"{name} must be finite and >= 0, got {v}")
        if self.p1 > self.p1_max or self.p2 > self.p2_max:
            raise DomainError("transmit power exceeds its ceiling")

    @classmethod
    def from_gains(cls, mu1: float, mu2: float) -> "LinkConfig":
        """Link with unit channels whose receive gains are (mu1, mu2)."""
        return cls(p1=mu1, p2=mu2)

    @property
    def mu1(self) -> float:
        return self.p1 * abs(self.h1) ** 2

    @property
    def mu2(self) -> float:
        return self.p2 * abs(self.h2) ** 2

    def require_positive_gains(self) -> None:
        if not (self.mu1 > 0.0 and self.mu2 > 0.0
                and math.isfinite(self.mu1) and math.isfinite(self.mu2)):
            raise DomainError(
                f"throughput needs mu1, mu2 > 0 (got {self.mu1}, {self.mu2})")


@dataclass(frozen=True)
class FrameConfig:
    """Frame length n (symbols per user) and normalized timing mismatch tau."""

    n: int
    tau: float

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise DomainError(f"frame length must be a positive int, got {self.n}")
        if not (0.0 <= self.tau < 1.0):
            raise DomainError(f"tau must lie in [0, 1), got {self.tau}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "tau", float(self.tau))


@dataclass(frozen=True)
class TimingError:
    """Normalized synchronization (eps1) and coordination (eps2) offsets."""

    eps1: float = 0.0
    eps2: float = 0.0

    def __post_init__(self) -> None:
        for name in ("eps1", "eps2"):
            if not math.isfinite(float(getattr(self, name))):
                raise DomainError(f"{name} must be finite")

    @property
    def is_zero(self) -> bool:
        return self.eps1 == 0.0 and self.eps2 == 0.0

    def check_admissible(self, frame: FrameConfig) -> None:
        """Both sampling banks must stay within one symbol of their target."""
        tau = frame.tau
        if not (tau - 1.0 <= self.eps1 <= tau):
            raise DomainError(
                f"eps1={self.eps1} outside [tau-1, tau] for tau={tau}")
        s = self.eps1 + self.eps2
        if not (-tau <= s <= 1.0 - tau):
            raise DomainError(
                f"eps1+eps2={s} outside [-tau, 1-tau] for tau={tau}")


@dataclass(frozen=True)
class RootPair:
    """Characteristic roots of the banded determinant recursion."""

    r1: float
    r2: float


@dataclass(frozen=True)
class GainMatrix:
    """Diagonal complex gain: odd slots h1*sqrt(p1), even slots h2*sqrt(p2)."""

    n: int
    entries: np.ndarray
    kind: str = "gain"

    def to_dense(self) -> np.ndarray:
        return np.diag(self.entries)

    def hh_diag(self) -> np.ndarray:
        """Real diagonal of H H^H: alternating mu1, mu2."""
        return np.abs(self.entries) ** 2


def _alt(n2: int, even_val: float, odd_val: float) -> np.ndarray:
    v = np.empty(n2)
    v[0::2] = even_val
    v[1::2] = odd_val
    return v


def build_correlation(frame: FrameConfig) -> BandedMatrix:
    """Sampled-pulse correlation matrix (doubles as the noise covariance).

    Unit diagonal; the first super-diagonal alternates 1-tau, tau starting
    from (row 0, col 1); symmetric.
    """
    n2 = 2 * frame.n
    tau = frame.tau
    sup = _alt(n2, 1.0 - tau, tau)
    sub = _alt(n2, 0.0, 1.0 - tau)
    if n2 > 2:
        sub[2::2] = tau
    return BandedMatrix(n2, {0: np.ones(n2), 1: sup, -1: sub},
                        kind="correlation")


def build_gain(link: LinkConfig, n: int) -> GainMatrix:
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    g1 = link.h1 * cmath.sqrt(link.p1)
    g2 = link.h2 * cmath.sqrt(link.p2)
    entries = np.empty(2 * n, dtype=complex)
    entries[0::2] = g1
    entries[1::2] = g2
    return GainMatrix(2 * n, entries)


def pattern_sync(n: int) -> BandedMatrix:
    """Sensitivity of the signal mixing matrix to eps1 (valid for eps1 > 0,
    eps1 + eps2 > 0): every row reads [-1 -1 | 1 1] over offsets -1..+2.
    """
    n2 = 2 * n
    return BandedMatrix(
        n2,
        {0: np.full(n2, -1.0), 1: np.ones(n2),
         -1: np.full(n2, -1.0), 2: np.ones(n2)},
        kind="pattern")


def pattern_sync_negative(n: int) -> BandedMatrix:
    """eps1-sensitivity on the negative branch (eps1 < 0, eps1 + eps2 < 0):
    the unit-step terms move the stencil to offsets -2..+1.
    """
    n2 = 2 * n
    return BandedMatrix(
        n2,
        {0: np.ones(n2), 1: np.ones(n2),
         -1: np.full(n2, -1.0), -2: np.full(n2, -1.0)},
        kind="pattern")


def pattern_coord(n: int) -> BandedMatrix:
    """Sensitivity of the signal mixing matrix to eps2 (same sign case):
    only stream-2 rows respond, with the same [-1 -1 | 1 1] stencil.
    """
    n2 = 2 * n
    main = np.zeros(n2)
    main[1::2] = -1.0
    sup1 = np.zeros(n2)
    sup1[1::2] = 1.0
    sub1 = np.zeros(n2)
    sub1[1::2] = -1.0
    sup2 = np.zeros(n2)
    sup2[1::2] = 1.0
    return BandedMatrix(n2, {0: main, 1: sup1, -1: sub1, 2: sup2},
                        kind="pattern")


def pattern_coord_negative(n: int) -> BandedMatrix:
    """eps2-sensitivity on the negative branch (eps1 + eps2 < 0)."""
    n2 = 2 * n
    main = np.zeros(n2)
    main[1::2] = 1.0
    sup1 = np.zeros(n2)
    sup1[1::2] = 1.0
    sub1 = np.zeros(n2)
    sub1[1::2] = -1.0
    sub2 = np.zeros(n2)
    sub2[1::2] = -1.0
    return BandedMatrix(n2, {0: main, 1: sup1, -1: sub1, -2: sub2},
                        kind="pattern")


def pattern_noise(n: int) -> BandedMatrix:
    """Sensitivity of the noise covariance to eps2: symmetric, alternating
    -1, +1 on the first off-diagonals, zero elsewhere.
    """
    n2 = 2 * n
    sup = _alt(n2, -1.0, 1.0)
    sub = _alt(n2, 0.0, -1.0)
    if n2 > 2:
        sub[2::2] = 1.0
    return BandedMatrix(n2, {1: sup, -1: sub}, kind="pattern")


def build_error_matrices(
    frame: FrameConfig, err: TimingError
) -> tuple[BandedMatrix, BandedMatrix, BandedMatrix, BandedMatrix]:
    """Perturbation and perturbed matrices for a mistimed frame.

    Returns (E1, E2, Rhat, RhatN) with Rhat = R + E1 (signal mixing) and
    RhatN = R + E2 (noise covariance).  E1 follows the general unit-step
    stencil, valid for every sign of eps1 and eps1 + eps2; for positive
    signs it coincides with eps1 * pattern_sync + eps2 * pattern_coord.
    """
    err.check_admissible(frame)
    n2 = 2 * frame.n
    e1 = err.eps1
    s = err.eps1 + err.eps2

    # stream-1 rows (even) are driven by eps1, stream-2 rows (odd) by
    # eps1 + eps2; both span offsets -2..+2, with the unit-step terms
    # landing on the +-2 slots.
    main = _alt(n2, -abs(e1), -abs(s))
    sup1 = _alt(n2, e1, s)
    sub1 = _alt(n2, -e1, -s)
    sup2 = _alt(n2, max(e1, 0.0), max(s, 0.0))
    sub2 = np.zeros(n2)
    sub2[2::2] = max(-e1, 0.0)
    if n2 > 3:
        sub2[3::2] = max(-s, 0.0)
    e1_mat = BandedMatrix(
        n2, {0: main, 1: sup1, -1: sub1, 2: sup2, -2: sub2},
        kind="perturbation")

    e2_mat = pattern_noise(frame.n).scaled(err.eps2)
    r = build_correlation(frame)
    rhat = r + e1_mat
    rhat_n = r + e2_mat
    return e1_mat, e2_mat, rhat, rhat_n
