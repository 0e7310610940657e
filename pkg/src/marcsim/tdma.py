"""TDMA relaying: per-slot optimal beamforming and slot-duration optimization.

Time is split into K exclusive slots. User k transmits alone in a slot of
duration tau^(k) with power boosted to P^(k)/tau^(k) (the average power
constraint is met), and the relay matrix in that slot is matched to user k
alone, for which the optimum is known in closed form. The slot durations are
optimized by iteratively equalizing the marginal rates dR^(k)/dtau^(k): the
objective is concave and separable, so equal derivatives among active users
(with the durations summing to one) are necessary and sufficient.

For unbounded relay power the optimal durations and the resulting sum rate
have closed forms, which also yield the test deciding whether joint relaying
beats TDMA in that regime.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import inf, log, log1p, sqrt

import numpy as np

from .channel import ChannelRealization, compute_aggregates
from .errors import NumericalError, ValidationError
from .joint import RelayMatrix
from .numerics import dominant_eigenpair

__all__ = [
    "TdmaAllocation",
    "AsymptoticResult",
    "single_user_relay_matrix",
    "single_user_rate",
    "user_rate",
    "user_rate_derivative",
    "optimize_slots",
    "asymptotic_allocation",
    "joint_beats_tdma_asymptotic",
]

_LN2 = log(2.0)
_MAX_OUTER_ITER = 100_000
_DELTA_ATOL = 1e-12  # bisection stop on the slot transfer
_GRAD_ATOL = 1e-10  # bisection stop on the derivative mismatch
_TIE_RTOL = 1e-12  # relative guard breaking asymptotic ties toward TDMA


@dataclass(frozen=True)
class TdmaAllocation:
    """Optimized slot durations with the rates they achieve."""

    tau: np.ndarray
    per_user_rate: np.ndarray
    sum_rate: float
    kkt_spread: float  # max - min marginal rate over users with tau > 0

    def __post_init__(self):
        tau = np.asarray(self.tau, dtype=float)
        rates = np.asarray(self.per_user_rate, dtype=float)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "per_user_rate", rates)
        if np.any(tau < 0):
            raise NumericalError("negative slot duration")
        if abs(float(tau.sum()) - 1.0) > 1e-9:
            raise NumericalError(f"slot durations sum to {tau.sum()!r}, not 1")
        if abs(float(rates.sum()) - self.sum_rate) > 1e-9:
            raise NumericalError("sum_rate does not match the per-user rates")


@dataclass(frozen=True)
class AsymptoticResult:
    """Unbounded-relay-power limits of both schemes."""

    tau_inf: np.ndarray
    rate_inf: float
    joint_rate_inf: float
    joint_wins: bool


def _slot_consts(c: ChannelRealization, k: int) -> tuple[float, float, float]:
    """(d, nr, hp) for user k of a noise-normalized realization:
    d = |h_d|^2 P, nr = ||h_r||^2 P, hp = ||h||^2 P_r."""
    d = float(abs(c.h_d[k]) ** 2 * c.P[k])
    nr = float(np.linalg.norm(c.h_r[k]) ** 2 * c.P[k])
    hp = float(np.linalg.norm(c.h) ** 2 * c.P_r)
    return d, nr, hp


def _slot_rate(d: float, nr: float, hp: float, tau: float) -> float:
    if tau <= 0.0:
        return 0.0
    x = d / tau
    if nr > 0.0 and hp > 0.0:
        x += hp * nr / ((hp + 1.0) * tau + nr)
    return tau * log1p(x) / _LN2


def _slot_deriv(d: float, nr: float, hp: float, tau: float) -> float:
    """d/dtau of tau*log2(1 + d/tau + hp*nr/((hp+1)tau + nr)); at tau = 0 the
    continuous limit: +inf with a direct link, log2(1+hp) without one."""
    if tau <= 0.0:
        if d > 0.0:
            return inf
        if nr > 0.0 and hp > 0.0:
            return log1p(hp) / _LN2
        return 0.0
    x = d / tau
    gp = -d / (tau * tau)
    if nr > 0.0 and hp > 0.0:
        den = (hp + 1.0) * tau + nr
        x += hp * nr / den
        gp -= hp * nr * (hp + 1.0) / (den * den)
    return (log1p(x) + tau * gp / (1.0 + x)) / _LN2


def single_user_relay_matrix(c: ChannelRealization, k: int) -> RelayMatrix:
    """Optimal relay matrix when user k is alone on the channel:
    sqrt(P_r / (1 + ||h_r||^2 P)) * h h_r^H / (||h|| ||h_r||).

    A zero channel on either hop yields F = 0 (the rate falls back to the
    direct link)."""
    c = c.normalized()
    if not 0 <= k < c.K:
        raise ValidationError(f"user index {k} out of range for K={c.K}")
    hn = float(np.linalg.norm(c.h))
    hrn = float(np.linalg.norm(c.h_r[k]))
    if hn == 0.0 or hrn == 0.0 or c.P_r == 0.0:
        return RelayMatrix.for_channel(np.zeros((c.M_r, c.M_r), dtype=complex), c)
    scale = sqrt(c.P_r / (1.0 + hrn**2 * c.P[k]))
    F = scale * np.outer(c.h, c.h_r[k].conj()) / (hn * hrn)
    return RelayMatrix.for_channel(F, c)


def single_user_rate(c: ChannelRealization, k: int) -> float:
    """Rate of user k alone with the matched relay matrix:
    log2(1 + |h_d|^2 P + ||h||^2 ||h_r||^2 P P_r / (1 + ||h||^2 P_r + ||h_r||^2 P)).
    """
    c = c.normalized()
    if not 0 <= k < c.K:
        raise ValidationError(f"user index {k} out of range for K={c.K}")
    d, nr, hp = _slot_consts(c, k)
    relay = hp * nr / (1.0 + hp + nr) if nr > 0.0 and hp > 0.0 else 0.0
    return log1p(d + relay) / _LN2


def user_rate(c: ChannelRealization, k: int, tau):
    """Rate of user k in a slot of duration tau (power boosted to P/tau),
    continuously extended to 0 at tau = 0. Accepts a scalar or an array of
    durations."""
    c = c.normalized()
    if not 0 <= k < c.K:
        raise ValidationError(f"user index {k} out of range for K={c.K}")
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(tau_arr < 0) or np.any(tau_arr > 1):
        raise ValidationError("slot durations must lie in [0, 1]")
    d, nr, hp = _slot_consts(c, k)
    if tau_arr.ndim == 0:
        return _slot_rate(d, nr, hp, float(tau_arr))
    out = np.zeros_like(tau_arr)
    pos = tau_arr > 0
    t = tau_arr[pos]
    x = d / t
    if nr > 0.0 and hp > 0.0:
        x = x + hp * nr / ((hp + 1.0) * t + nr)
    out[pos] = t * np.log1p(x) / _LN2
    return out


def user_rate_derivative(c: ChannelRealization, k: int, tau: float) -> float:
    """Marginal rate dR^(k)/dtau at tau > 0 (analytic form; strictly
    decreasing in tau)."""
    c = c.normalized()
    if not 0 <= k < c.K:
        raise ValidationError(f"user index {k} out of range for K={c.K}")
    if tau <= 0:
        raise ValidationError(f"tau must be positive, got {tau}")
    d, nr, hp = _slot_consts(c, k)
    return _slot_deriv(d, nr, hp, tau)


def _find_delta(cj, ci, tau_j: float, tau_i: float, hi: float) -> float:
    """Slot transfer equalizing the pair's derivatives:
    root of g(delta) = deriv_j(tau_j + delta) - deriv_i(tau_i - delta),
    strictly decreasing with g(0) > 0. If g stays positive across the whole
    bracket (possible only when user i has no direct link, so its derivative
    stays finite as its slot vanishes), the full transfer hi is returned."""

    def gfun(delta: float) -> float:
        return _slot_deriv(*cj, tau_j + delta) - _slot_deriv(*ci, tau_i - delta)

    hi_eff = hi * (1.0 - 1e-12)
    if gfun(hi_eff) > 0.0:
        return hi
    lo, up = 0.0, hi_eff
    while up - lo > _DELTA_ATOL:
        mid = 0.5 * (lo + up)
        gm = gfun(mid)
        if abs(gm) <= _GRAD_ATOL:
            return mid
        if gm > 0.0:
            lo = mid
        else:
            up = mid
    return 0.5 * (lo + up)


def optimize_slots(c: ChannelRealization, epsilon: float = 1e-8) -> TdmaAllocation:
    """Find slot durations maximizing the TDMA sum rate.

    Starts uniform and repeatedly equalizes the smallest and largest marginal
    rate by moving slot time between the two users, until the spread among
    active users is at most epsilon. Users whose rate is identically zero get
    tau = 0 up front and are excluded. A user pinned to tau = 0 during the
    run (finite marginal rate at a vanishing slot) is parked and re-admitted
    only if its boundary derivative ends up above the common value.
    """
    if epsilon <= 0:
        raise ValidationError(f"epsilon must be positive, got {epsilon}")
    c = c.normalized()
    K = c.K
    consts = [_slot_consts(c, k) for k in range(K)]
    degenerate = [d == 0.0 and (nr == 0.0 or hp == 0.0) for d, nr, hp in consts]
    active = [k for k in range(K) if not degenerate[k]]

    if not active:
        # Nothing carries rate; keep the simplex invariant with a uniform split.
        tau = np.full(K, 1.0 / K)
        return TdmaAllocation(
            tau=tau, per_user_rate=np.zeros(K), sum_rate=0.0, kkt_spread=0.0
        )

    tau = np.zeros(K)
    for k in active:
        tau[k] = 1.0 / len(active)

    parked: list[int] = []
    iterations = 0
    while True:
        while len(active) > 1:
            iterations += 1
            if iterations > _MAX_OUTER_ITER:
                derivs = [_slot_deriv(*consts[k], tau[k]) for k in active]
                spread = max(derivs) - min(derivs)
                raise NumericalError(
                    f"slot optimization did not reach spread {epsilon} after "
                    f"{_MAX_OUTER_ITER} iterations",
                    residual=spread,
                )
            derivs = [_slot_deriv(*consts[k], tau[k]) for k in active]
            i = active[min(range(len(active)), key=derivs.__getitem__)]
            j = active[max(range(len(active)), key=derivs.__getitem__)]
            if max(derivs) - min(derivs) <= epsilon:
                break
            hi = min(tau[i], 1.0 - tau[j])
            if hi <= 0.0:
                # i has nothing left to give; treat it as pinned.
                delta = 0.0
            else:
                delta = _find_delta(consts[j], consts[i], tau[j], tau[i], hi)
            tau[j] += delta
            tau[i] -= delta
            if tau[i] <= 0.0:
                tau[i] = 0.0
                active.remove(i)
                parked.append(i)

        # Complementary slackness for parked users: their boundary marginal
        # rate must not exceed the common active value.
        readmitted = False
        if parked and active:
            nu = max(_slot_deriv(*consts[k], tau[k]) for k in active)
            for k in list(parked):
                if _slot_deriv(*consts[k], 0.0) > nu + epsilon:
                    parked.remove(k)
                    active.append(k)
                    readmitted = True
        if not readmitted:
            break

    rates = np.array([_slot_rate(*consts[k], tau[k]) for k in range(K)])
    live = [k for k in range(K) if tau[k] > 0.0]
    if len(live) > 1:
        derivs = [_slot_deriv(*consts[k], tau[k]) for k in live]
        spread = max(derivs) - min(derivs)
    else:
        spread = 0.0
    return TdmaAllocation(
        tau=tau,
        per_user_rate=rates,
        sum_rate=float(rates.sum()),
        kkt_spread=float(spread),
    )


def _relay_norm_sum(c: ChannelRealization) -> float:
    return float(np.sum(np.linalg.norm(c.h_r, axis=1) ** 2 * c.P))


def _superior(lam_rw: float, relay_sum: float) -> bool:
    # Strict inequality with a relative guard so exact ties (e.g. K = 1,
    # where lam equals the sum) resolve to TDMA under float noise.
    return lam_rw > relay_sum + _TIE_RTOL * max(1.0, relay_sum)


def joint_beats_tdma_asymptotic(c: ChannelRealization) -> bool:
    """True iff joint relaying achieves a higher sum rate than optimally
    slotted TDMA as the relay power grows without bound:
    lam_max(R + W) > sum_k ||h_r^(k)||^2 P^(k)."""
    c = c.normalized()
    agg = compute_aggregates(c)
    lam, _ = dominant_eigenpair(agg.R + agg.W)
    return _superior(lam, _relay_norm_sum(c))


def asymptotic_allocation(c: ChannelRealization) -> AsymptoticResult:
    """Closed-form limits as P_r grows without bound.

    The optimal durations become proportional to P^(k) (|h_d|^2 + ||h_r||^2)
    and the TDMA sum rate tends to log2(1 + sum_k P^(k)(|h_d|^2 + ||h_r||^2));
    the joint scheme tends to its power-unconstrained upper bound."""
    c = c.normalized()
    weights = c.P * (np.abs(c.h_d) ** 2 + np.linalg.norm(c.h_r, axis=1) ** 2)
    total = float(weights.sum())
    if total > 0.0:
        tau_inf = weights / total
        rate_inf = log1p(total) / _LN2
    else:
        tau_inf = np.full(c.K, 1.0 / c.K)
        rate_inf = 0.0
    agg = compute_aggregates(c)
    lam, _ = dominant_eigenpair(agg.R + agg.W)
    joint_rate_inf = float(log1p(agg.s + lam) / _LN2)
    return AsymptoticResult(
        tau_inf=tau_inf,
        rate_inf=rate_inf,
        joint_rate_inf=joint_rate_inf,
        joint_wins=_superior(lam, _relay_norm_sum(c)),
    )
