"""Throughput degradation under synchronization and coordination offsets.

The mistimed frame obeys Yhat = Rhat H X + Nhat with noise covariance
RhatN, so the achievable rate is

    R_e = log2 det(I + RhatN^-1 Rhat H H^H Rhat^T) / (n + tau)

evaluated here as logdet(RhatN + Rhat D Rhat^T) - logdet(RhatN) with
banded Cholesky factorizations (D = H H^H).  The loss Delta is computed
from the definition R - R_e; a literal implementation of the rearranged
log-det expression for Delta is kept alongside as a cross-check, and the
first-order trace models give the sensitivity slopes c1 (sync) and c2
(coordination).  Exact losses are always the primary quantity; the
linear models are diagnostics only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _bands
from .model import (DomainError, FrameConfig, LinkConfig, TimingError,
                    build_correlation, build_error_matrices, build_gain,
                    pattern_coord, pattern_coord_negative, pattern_noise,
                    pattern_sync, pattern_sync_negative)
from .throughput import throughput_matrix

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class LossBreakdown:
    """Exact and first-order loss figures at one operating point."""

    exact_throughput_with_error: float
    delta: float
    delta_lin_sync: float
    delta_lin_coord: float
    c1: float
    c2: float
    gamma: float


def _hh(link: LinkConfig, n: int) -> np.ndarray:
    return build_gain(link, n).hh_diag()


def throughput_with_error(link: LinkConfig, frame: FrameConfig,
                          err: TimingError) -> float:
    """Rate of the mistimed frame, bits per symbol interval.

    Reduces to throughput_matrix bit-exactly at zero error (identical
    code path).  Raises DomainError when the perturbed noise covariance
    is not positive definite, which happens once tau + eps2 leaves the
    window where neighboring integration windows overlap correctly.
    """
    link.require_positive_gains()
    if err.is_zero:
        err.check_admissible(frame)
        return throughput_matrix(link, frame)
    _, _, rhat, rhat_n = build_error_matrices(frame, err)
    d = _hh(link, frame.n)
    signal = rhat.col_scaled(d).matmul(rhat.T)
    try:
        ld_n = _bands.logdet2_sym_pd(rhat_n)
    except np.linalg.LinAlgError:
        raise DomainError(
            f"noise covariance singular at tau={frame.tau}, eps2={err.eps2}"
        ) from None
    ld = _bands.logdet2_sym_pd(rhat_n + signal)
    return (ld - ld_n) / (frame.n + frame.tau)


def throughput_loss(link: LinkConfig, frame: FrameConfig,
                    err: TimingError) -> float:
    """Exact throughput loss, by definition: R - R_e."""
    return throughput_matrix(link, frame) - throughput_with_error(link, frame, err)


def throughput_loss_display(link: LinkConfig, frame: FrameConfig,
                            err: TimingError) -> float:
    """Exact loss via the rearranged log-det expression.

        Delta = -log2 det{ I + (I + D R)^-1 [ D E1^T
                 + (R + E2)^-1 (E1 - E2) D (R + E1^T) ] } / (n + tau)

    Independent assembly path used to cross-check throughput_loss;
    inverses are applied as factored banded solves, never formed.
    """
    link.require_positive_gains()
    err.check_admissible(frame)
    n, tau, n2 = frame.n, frame.tau, 2 * frame.n
    e1m, e2m, _, rhat_n = build_error_matrices(frame, err)
    r = build_correlation(frame)
    d = _hh(link, n)

    inner = (e1m - e2m).col_scaled(d).matmul(r + e1m.T)
    try:
        mid = _bands.solve_sym_pd(rhat_n, inner.to_dense())
    except np.linalg.LinAlgError:
        raise DomainError(
            f"noise covariance singular at tau={tau}, eps2={err.eps2}"
        ) from None
    rhs = e1m.T.row_scaled(d).to_dense() + mid

    a = _bands.identity(n2) + r.row_scaled(d)
    v = _bands.solve_general(a, rhs)
    sign, ld = np.linalg.slogdet(np.eye(n2) + v)
    if sign <= 0.0:
        raise DomainError("loss determinant left the positive cone")
    return -ld / _LN2 / (n + tau)


def _trace_coefficient(link: LinkConfig, frame: FrameConfig,
                       z_signal: _bands.BandedMatrix,
                       z_noise: _bands.BandedMatrix | None) -> float:
    """-Tr[(I + D R)^-1 (D Z^T + R^-1 (Z - Z3) D R)] / ((n + tau) ln 2).

    z_noise is None for the sync coefficient (noise covariance does not
    respond to eps1).  The 1/ln2 converts the nat-valued trace expansion
    to the bit-valued rates used everywhere else.
    """
    link.require_positive_gains()
    n, tau, n2 = frame.n, frame.tau, 2 * frame.n
    if tau == 0.0:
        raise DomainError("sensitivity slopes need tau in (0, 1)")
    r = build_correlation(frame)
    d = _hh(link, n)
    mixing = z_signal if z_noise is None else z_signal - z_noise
    inner = mixing.col_scaled(d).matmul(r)
    solved = _bands.solve_sym_pd(r, inner.to_dense())
    rhs = z_signal.T.row_scaled(d).to_dense() + solved
    a = _bands.identity(n2) + r.row_scaled(d)
    f = _bands.solve_general(a, rhs)
    return -float(np.trace(f)) / ((n + tau) * _LN2)


def sync_loss_slope(link: LinkConfig, frame: FrameConfig,
                    branch: int = 1) -> float:
    """First-order sensitivity c1 of the loss to eps1 (bits/interval).

    The mixing-matrix perturbation switches stencil with the sign of
    eps1, so the loss is kinked at zero: branch >= 0 gives the slope for
    eps1 > 0 (the headline c1, positive at sane configs), branch < 0 the
    slope for eps1 < 0 (negative: the loss rises as eps1 falls).
    """
    z = pattern_sync(frame.n) if branch >= 0 else pattern_sync_negative(frame.n)
    return _trace_coefficient(link, frame, z, None)


def coord_loss_slope(link: LinkConfig, frame: FrameConfig,
                     branch: int = 1) -> float:
    """First-order sensitivity c2 of the loss to eps2 (bits/interval)."""
    z = pattern_coord(frame.n) if branch >= 0 else pattern_coord_negative(frame.n)
    return _trace_coefficient(link, frame, z, pattern_noise(frame.n))


def loss_linear_sync(link: LinkConfig, frame: FrameConfig,
                     eps1: float) -> tuple[float, float]:
    """(eps1 * c1, c1) on the branch containing eps1."""
    c1 = sync_loss_slope(link, frame, branch=1 if eps1 >= 0.0 else -1)
    return eps1 * c1, c1


def loss_linear_coord(link: LinkConfig, frame: FrameConfig,
                      eps2: float) -> tuple[float, float]:
    """(eps2 * c2, c2) on the branch containing eps2."""
    c2 = coord_loss_slope(link, frame, branch=1 if eps2 >= 0.0 else -1)
    return eps2 * c2, c2


def loss_ratio(link: LinkConfig, frame: FrameConfig, err: TimingError) -> float:
    """gamma = Delta / R, the fractional throughput loss."""
    base = throughput_matrix(link, frame)
    if base <= 0.0:
        raise DomainError("loss ratio undefined: no-error throughput is zero")
    return (base - throughput_with_error(link, frame, err)) / base


def loss_breakdown(link: LinkConfig, frame: FrameConfig,
                   err: TimingError) -> LossBreakdown:
    """Exact loss plus both linear diagnostics at one operating point."""
    base = throughput_matrix(link, frame)
    r_e = throughput_with_error(link, frame, err)
    delta = base - r_e
    if base <= 0.0:
        raise DomainError("loss ratio undefined: no-error throughput is zero")
    lin_sync, _ = loss_linear_sync(link, frame, err.eps1)
    lin_coord, _ = loss_linear_coord(link, frame, err.eps2)
    return LossBreakdown(
        exact_throughput_with_error=r_e,
        delta=delta,
        delta_lin_sync=lin_sync,
        delta_lin_coord=lin_coord,
        c1=sync_loss_slope(link, frame),
        c2=coord_loss_slope(link, frame),
        gamma=delta / base,
    )
