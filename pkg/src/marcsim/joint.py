"""Joint relaying: sum rate of a given relay matrix plus bounds on the best one.

All users transmit simultaneously and a single amplification matrix F serves
them. The exact sum rate of any F is available in two algebraically
equivalent forms (a 2x2 log-det and a closed form in the channel
aggregates). The optimal F is not known; this module provides

* ``upper_bound_1``  -- drop the positive-semidefinite cross term T,
* ``upper_bound_2``  -- let the relay power grow without bound,
* ``lower_bound``    -- rank-one beamforming along the dominant direction of
  R + W, scaled to spend the full relay budget (achievable).

Rates are bits per channel use. Noise is folded in by operating on the
noise-normalized realization (P/N0, P_r/N0), so relay matrices returned here
are expressed in that normalized domain; with the default N0 = 1 this is the
physical domain.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log

import numpy as np

from .channel import (
    ChannelRealization,
    compute_aggregates,
    effective_channel,
    relay_tx_power,
)
from .errors import DegenerateChannelError, NumericalError
from .numerics import dominant_eigenpair, quadratic_form

__all__ = [
    "RelayMatrix",
    "JointRateBounds",
    "sum_rate_logdet",
    "sum_rate_closed",
    "relay_matrix_ub1",
    "upper_bound_1",
    "upper_bound_2",
    "relay_matrix_lower",
    "lower_bound",
    "achieved_rate_ub1",
]

_ORDER_SLACK = 1e-9
_LN2 = log(2.0)


@dataclass(frozen=True)
class RelayMatrix:
    """An amplification matrix together with its relay transmit power."""

    F: np.ndarray
    tx_power: float

    @classmethod
    def for_channel(cls, F: np.ndarray, c: ChannelRealization) -> "RelayMatrix":
        return cls(F=np.asarray(F, dtype=complex), tx_power=relay_tx_power(F, c))

    def is_feasible(self, p_r: float, rtol: float = 1e-9) -> bool:
        return self.tx_power <= p_r * (1.0 + rtol) + rtol


@dataclass(frozen=True)
class JointRateBounds:
    """Upper bounds, the achievable rank-one rate, and its relay matrix."""

    r_up1: float
    r_up2: float
    r_lower: float
    f_lower: RelayMatrix
    gamma: float

    def __post_init__(self):
        if min(self.r_up1, self.r_up2, self.r_lower) < -_ORDER_SLACK:
            raise NumericalError("negative rate in joint bounds")
        if self.r_lower > min(self.r_up1, self.r_up2) + _ORDER_SLACK:
            raise NumericalError(
                "lower bound exceeds an upper bound: "
                f"lower={self.r_lower!r}, up1={self.r_up1!r}, up2={self.r_up2!r}"
            )

    @property
    def r_up_min(self) -> float:
        return min(self.r_up1, self.r_up2)


def _as_matrix(F) -> np.ndarray:
    return F.F if isinstance(F, RelayMatrix) else np.asarray(F, dtype=complex)


def sum_rate_logdet(F, c: ChannelRealization) -> float:
    """Ground-truth sum rate log2 det(I + sum_k P^(k) h_eff h_eff^H),
    evaluated as a closed-form 2x2 determinant."""
    F = _as_matrix(F)
    c = c.normalized()
    heff = np.array([effective_channel(F, c, k) for k in range(c.K)])
    a, b = heff[:, 0], heff[:, 1]
    saa = float(np.sum(c.P * np.abs(a) ** 2))
    sbb = float(np.sum(c.P * np.abs(b) ** 2))
    m12 = complex(np.sum(c.P * a * b.conj()))
    # det(I + sum) = (1+saa)(1+sbb) - |m12|^2, evaluated as 1 + x for accuracy
    x = saa + sbb + saa * sbb - abs(m12) ** 2
    return float(np.log1p(max(x, 0.0)) / _LN2)


def sum_rate_closed(F, c: ChannelRealization) -> float:
    """Same sum rate via the aggregate form
    log2(1 + s + h^H F (R + W) F^H h / r), r = 1 + h^H F F^H h."""
    F = _as_matrix(F)
    c = c.normalized()
    agg = compute_aggregates(c)
    fh = F.conj().T @ c.h
    r = 1.0 + float(np.real(fh.conj() @ fh))
    x = agg.s + quadratic_form(fh, agg.R + agg.W) / r
    return float(np.log1p(max(x, 0.0)) / _LN2)


def relay_matrix_ub1(c: ChannelRealization) -> RelayMatrix:
    """Rank-one matrix maximizing the cross-term-free objective: beamform the
    dominant direction of R onto h, scaled to meet the power budget with
    equality."""
    c = c.normalized()
    hn = float(np.linalg.norm(c.h))
    if hn == 0.0:
        raise DegenerateChannelError("relay-to-receiver channel h is zero")
    agg = compute_aggregates(c)
    lam, v = dominant_eigenpair(agg.R)
    F = np.sqrt(c.P_r / (1.0 + lam)) * np.outer(c.h / hn, v.conj())
    return RelayMatrix.for_channel(F, c)


def upper_bound_1(c: ChannelRealization) -> float:
    """log2((1+s) (1 + lam_max(R) ||h||^2 P_r / (1 + ||h||^2 P_r + lam_max(R)))).

    Tighter than :func:`upper_bound_2` when the relay power is small."""
    c = c.normalized()
    agg = compute_aggregates(c)
    lam, _ = dominant_eigenpair(agg.R)
    hp = float(np.linalg.norm(c.h) ** 2) * c.P_r
    return float((np.log1p(agg.s) + np.log1p(lam * hp / (1.0 + hp + lam))) / _LN2)


def upper_bound_2(c: ChannelRealization) -> float:
    """log2(1 + s + lam_max(R + W)): the relay-power-unconstrained bound,
    tight as P_r grows."""
    c = c.normalized()
    agg = compute_aggregates(c)
    lam, _ = dominant_eigenpair(agg.R + agg.W)
    return float(np.log1p(agg.s + lam) / _LN2)


def relay_matrix_lower(c: ChannelRealization) -> tuple[RelayMatrix, float]:
    """Achievable rank-one choice: beamform the dominant direction of R + W
    onto h with gain gamma spending the relay budget exactly
    (gamma^2 = P_r / v^H (I + R) v)."""
    c = c.normalized()
    hn = float(np.linalg.norm(c.h))
    if hn == 0.0:
        raise DegenerateChannelError("relay-to-receiver channel h is zero")
    agg = compute_aggregates(c)
    _, v = dominant_eigenpair(agg.R + agg.W)
    gamma = float(np.sqrt(c.P_r / (1.0 + quadratic_form(v, agg.R))))
    F = gamma * np.outer(c.h / hn, v.conj())
    return RelayMatrix.for_channel(F, c), gamma


def lower_bound(c: ChannelRealization) -> JointRateBounds:
    """Achievable sum rate of the rank-one beamformer, bundled with both
    upper bounds:
    r_lower = log2(1 + s + ||h||^2 lam_max(R+W) gamma^2 / (1 + ||h||^2 gamma^2)).
    """
    c = c.normalized()
    agg = compute_aggregates(c)
    hn2 = float(np.linalg.norm(c.h) ** 2)
    if hn2 == 0.0:
        raise DegenerateChannelError("relay-to-receiver channel h is zero")

    lam_r, _ = dominant_eigenpair(agg.R)
    hp = hn2 * c.P_r
    r_up1 = float((np.log1p(agg.s) + np.log1p(lam_r * hp / (1.0 + hp + lam_r))) / _LN2)

    lam_rw, v = dominant_eigenpair(agg.R + agg.W)
    r_up2 = float(np.log1p(agg.s + lam_rw) / _LN2)

    gamma = float(np.sqrt(c.P_r / (1.0 + quadratic_form(v, agg.R))))
    g = hn2 * gamma**2
    r_lower = float(np.log1p(agg.s + lam_rw * g / (1.0 + g)) / _LN2)
    f_lower = RelayMatrix.for_channel(gamma * np.outer(c.h / np.sqrt(hn2), v.conj()), c)
    return JointRateBounds(
        r_up1=r_up1, r_up2=r_up2, r_lower=r_lower, f_lower=f_lower, gamma=gamma
    )


def achieved_rate_ub1(c: ChannelRealization) -> float:
    """Diagnostic: the true rate achieved by the first bound's relay matrix.

    Usually below the rank-one lower bound, but no per-instance ordering is
    guaranteed; kept out of :class:`JointRateBounds` for that reason.
    """
    return sum_rate_logdet(relay_matrix_ub1(c), c)
