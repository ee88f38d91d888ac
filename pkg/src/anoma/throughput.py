"""Sum throughput of the two-user asynchronous uplink, three ways.

All rates are in bits per symbol interval (log base 2).  The frame
occupies n + tau symbol intervals, so every rate carries a 1/(n + tau)
prefactor unless stated otherwise.

Routes, kept deliberately independent of each other:

* matrix    -- log-det of the sampled linear model, via a banded
               Cholesky factorization of D^-1 + R with D = H H^H;
* closed    -- the characteristic-root closed form, evaluated in the
               log domain so any frame length is safe;
* recursion -- the literal interleaved three-term determinant
               recursion, with mantissa/exponent rescaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _bands
from .model import (DomainError, FrameConfig, LinkConfig, RootPair,
                    build_correlation, build_gain)

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class ThroughputReport:
    """All throughput figures for one operating point, in bits/interval."""

    anoma_matrix: float
    anoma_closed: float
    anoma_recursion: float
    anoma_n_plus_1: float
    noma: float
    oma: float
    asymptotic: float


def _char_roots(mu1: float, mu2: float, tau: float) -> tuple[float, float, float]:
    """(r1, r2, r1 - r2) of x^2 - S x + tau^2 (1-tau)^2 with
    S = 1/mu1 + 1/mu2 + 1/(mu1 mu2) + 2 tau (1 - tau).

    The gap r1 - r2 equals sqrt(S^2 - 4P); the radicand is evaluated in
    the cancellation-free product form s0 * (s0 + 4 tau (1 - tau)), and
    r2 as P / r1, so high-SNR inputs lose no precision.
    """
    s0 = 1.0 / mu1 + 1.0 / mu2 + 1.0 / (mu1 * mu2)
    g = 2.0 * tau * (1.0 - tau)
    gap = math.sqrt(s0 * (s0 + 2.0 * g))
    r1 = 0.5 * ((s0 + g) + gap)
    p = (tau * (1.0 - tau)) ** 2
    r2 = p / r1 if tau > 0.0 else 0.0
    return r1, r2, gap


def roots(mu1: float, mu2: float, tau: float) -> RootPair:
    """Characteristic roots of the determinant recursion."""
    if not (mu1 > 0.0 and mu2 > 0.0):
        raise DomainError("roots need mu1, mu2 > 0")
    r1, r2, _ = _char_roots(mu1, mu2, tau)
    return RootPair(r1, r2)


def log2_det_no_error(link: LinkConfig, frame: FrameConfig) -> float:
    """log2 det(I + H H^H R), the shared numerator of all rate variants.

    Uses det(I + D R) = det(D) det(D^-1 + R); the second factor is
    symmetric positive definite and tridiagonal for every tau in [0, 1),
    so a banded Cholesky gives the log-determinant stably in O(n).
    """
    link.require_positive_gains()
    n, n2 = frame.n, 2 * frame.n
    r = build_correlation(frame)
    dinv = np.empty(n2)
    dinv[0::2] = 1.0 / link.mu1
    dinv[1::2] = 1.0 / link.mu2
    a = r + _bands.BandedMatrix(n2, {0: dinv})
    logdet_gain = n * (math.log2(link.mu1) + math.log2(link.mu2))
    return logdet_gain + _bands.logdet2_sym_pd(a)


def throughput_matrix(link: LinkConfig, frame: FrameConfig) -> float:
    """Log-det route: log2 det(I + H H^H R) / (n + tau)."""
    return log2_det_no_error(link, frame) / (frame.n + frame.tau)


def throughput_existing_definition(link: LinkConfig, frame: FrameConfig) -> float:
    """Same numerator normalized by n rather than n + tau."""
    return log2_det_no_error(link, frame) / frame.n


def throughput_n_plus_1(link: LinkConfig, frame: FrameConfig) -> float:
    """Same numerator normalized by n + 1 (whole-slot padding)."""
    return log2_det_no_error(link, frame) / (frame.n + 1)


def throughput_closed(link: LinkConfig, frame: FrameConfig) -> float:
    """Closed-form route via the characteristic roots.

    Evaluates n log2(mu1 mu2 r1) plus a bounded correction, all in the
    log domain; r1^n never materializes, so large frames cannot
    overflow.  tau = 0 reduces analytically to the synchronous rate
    log2(1 + mu1 + mu2) (r2 = 0 branch) and is returned exactly.
    """
    link.require_positive_gains()
    mu1, mu2 = link.mu1, link.mu2
    n, tau = frame.n, frame.tau
    if tau == 0.0:
        return math.log2(1.0 + mu1 + mu2)
    r1, r2, gap = _char_roots(mu1, mu2, tau)
    q = r2 / r1
    qn = q ** n
    corr = math.log2((r1 - r2 * qn + tau * tau * (1.0 - qn)) / gap)
    lead = n * (math.log2(mu1) + math.log2(mu2) + math.log2(r1))
    return (lead + corr) / (n + tau)


def determinant_recursion_log2(mu1: float, mu2: float, tau: float, n: int) -> float:
    """log2 of det(D^-1 + R) by the literal interleaved recursion.

    d_0 = 1, d_1 = 1 + 1/mu1, then
        d_{2k}   = (1 + 1/mu2) d_{2k-1} - (1 - tau)^2 d_{2k-2}
        d_{2k+1} = (1 + 1/mu1) d_{2k}   - tau^2       d_{2k-1}
    The rolling pair is rescaled by powers of two whenever it leaves
    [2^-512, 2^512], so any frame length is representable.
    """
    if not (mu1 > 0.0 and mu2 > 0.0):
        raise DomainError("recursion needs mu1, mu2 > 0")
    a1 = 1.0 + 1.0 / mu1
    a2 = 1.0 + 1.0 / mu2
    c_even = (1.0 - tau) ** 2
    c_odd = tau * tau
    hi, lo = 2.0 ** 512, 2.0 ** -512
    d_prev, d_curr = 1.0, a1  # d_0, d_1
    shift = 0
    for m in range(2, 2 * n + 1):
        if m % 2 == 0:
            d_next = a2 * d_curr - c_even * d_prev
        else:
            d_next = a1 * d_curr - c_odd * d_prev
        d_prev, d_curr = d_curr, d_next
        if d_curr > hi:
            d_prev *= lo
            d_curr *= lo
            shift += 512
        elif 0.0 < d_curr < lo:
            d_prev *= hi
            d_curr *= hi
            shift -= 512
    if d_curr <= 0.0:
        raise DomainError("determinant recursion left the positive cone")
    return math.log2(d_curr) + shift


def determinant_recursion(link: LinkConfig, frame: FrameConfig) -> float:
    """det((H H^H)^-1 + R) as a plain float (inf once past float range)."""
    link.require_positive_gains()
    ld = determinant_recursion_log2(link.mu1, link.mu2, frame.tau, frame.n)
    try:
        return 2.0 ** ld
    except OverflowError:
        return math.inf


def throughput_recursion(link: LinkConfig, frame: FrameConfig) -> float:
    """Recursion route: independent oracle for the other two."""
    link.require_positive_gains()
    n, tau = frame.n, frame.tau
    ld = determinant_recursion_log2(link.mu1, link.mu2, tau, n)
    return (n * (math.log2(link.mu1) + math.log2(link.mu2)) + ld) / (n + tau)


def throughput_asymptotic(mu1: float, mu2: float, tau: float) -> float:
    """Infinite-frame limit log2(mu1 mu2 r1), in the expanded form

        (s + m g)/2 + sqrt(s^2 + 2 s m g)/2,
        s = 1 + mu1 + mu2,  m = mu1 mu2,  g = 2 tau (1 - tau),

    which is cancellation-free and manifestly >= s.
    """
    if not (mu1 > 0.0 and mu2 > 0.0):
        raise DomainError("asymptotic rate needs mu1, mu2 > 0")
    if not (0.0 <= tau < 1.0):
        raise DomainError(f"tau must lie in [0, 1), got {tau}")
    s = 1.0 + mu1 + mu2
    if tau == 0.0:
        return math.log2(s)
    mg = mu1 * mu2 * 2.0 * tau * (1.0 - tau)
    val = 0.5 * (s + mg) + 0.5 * math.sqrt(s * s + 2.0 * s * mg)
    return math.log2(val)


def throughput_noma(mu1: float, mu2: float) -> float:
    """Synchronous baseline with ideal interference cancellation."""
    if mu1 < 0.0 or mu2 < 0.0:
        raise DomainError("noma needs mu1, mu2 >= 0")
    return math.log2(1.0 + mu1 + mu2)


def throughput_oma(mu1: float, mu2: float) -> float:
    """Equal time-split TDMA at full per-user power."""
    if mu1 < 0.0 or mu2 < 0.0:
        raise DomainError("oma needs mu1, mu2 >= 0")
    return 0.5 * math.log2(1.0 + mu1) + 0.5 * math.log2(1.0 + mu2)


def throughput_report(link: LinkConfig, frame: FrameConfig) -> ThroughputReport:
    """Evaluate every throughput figure at one operating point."""
    num = log2_det_no_error(link, frame)
    mu1, mu2 = link.mu1, link.mu2
    return ThroughputReport(
        anoma_matrix=num / (frame.n + frame.tau),
        anoma_closed=throughput_closed(link, frame),
        anoma_recursion=throughput_recursion(link, frame),
        anoma_n_plus_1=num / (frame.n + 1),
        noma=throughput_noma(mu1, mu2),
        oma=throughput_oma(mu1, mu2),
        asymptotic=throughput_asymptotic(mu1, mu2, frame.tau),
    )
