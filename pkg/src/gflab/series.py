"""Exact series evaluation of the explicit solution, the oracle for every other route.

With unit division rate and no growth the solution of the pure fragmentation
equation is the Poisson-weighted dilation sum

    v(t, x) = e^{-t} sum_{k >= 0} u0(alpha^k x) (alpha^2 t)^k / k!,

and the general solution follows by the characteristic rescaling
u(t, x) = e^{-gt} v(bt, x e^{-gt}).  In log coordinates the same sum reads

    n(t, y) = e^{-t} sum_{k >= 0} n(0, y + k log alpha) t^k / k!,

which is what the grid oracle evaluates (the alpha^2 factors cancel against
the e^{2y} weight).

Truncation combines two mechanisms: the Poisson tail beyond K is bounded by
the standard ratio estimate, and the profile factor vanishes once
alpha^k x leaves the (effective) support.  Terms span many orders of
magnitude, so sums are accumulated in ascending k with Neumaier compensation,
and the Poisson weights are carried in log space to avoid overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, TruncationError
from .model import (
    Dirac,
    InitialProfile,
    ModelParams,
    density_from_log_x,
    moment,
    profile_eval_x,
    profile_eval_y,
    support_y,
)


@dataclass(frozen=True)
class SeriesTruncation:
    """Absolute tail tolerance and a hard safety cap on the number of terms."""

    eps: float = 1e-14
    k_max_cap: int = 10_000

    def __post_init__(self) -> None:
        if not self.eps > 0.0:
            raise DomainError(f"tail tolerance must be positive, got {self.eps}")
        if self.k_max_cap < 1:
            raise DomainError(f"term cap must be at least 1, got {self.k_max_cap}")


DEFAULT_TRUNCATION = SeriesTruncation()


def _poisson_tail_log_bound(lam: float, k: int) -> float:
    """log of the ratio-test bound on sum_{j > k} lam^j / j!; +inf until k + 2 > lam."""
    r = lam / (k + 2)
    if r >= 1.0:
        return math.inf
    return (k + 1) * math.log(lam) - math.lgamma(k + 2) - math.log1p(-r)


def poisson_cutoff(lam: float, eps: float) -> int:
    """Smallest K with sum_{k > K} lam^k / k! < eps * e^lam.

    The tail past K is bounded by the first neglected term times the geometric
    series with ratio lam / (K + 2), valid once that ratio is below one.
    """
    if lam <= 0.0:
        return 0
    target = math.log(eps) + lam
    k = int(math.ceil(lam))
    while _poisson_tail_log_bound(lam, k) >= target:
        k += 1
    return k


def support_cutoff(p: InitialProfile, log_x: float, log_alpha: float) -> int:
    """Smallest k with alpha^k x past the right edge of the profile support."""
    hi = support_y(p)[1]
    if log_x > hi:
        return 0
    return int(math.ceil((hi - log_x) / log_alpha))


def _neumaier_add(total: float, comp: float, term: float) -> tuple[float, float]:
    s = total + term
    if abs(total) >= abs(term):
        comp += (total - s) + term
    else:
        comp += (term - s) + total
    return s, comp


def _series_sum(p: InitialProfile, lam: float, log_x: float, log_alpha: float,
                prefactor_log: float, trunc: SeriesTruncation) -> float:
    """sum_k u0(e^{log_x + k log_alpha}) exp(k log lam - log k! + prefactor_log)."""
    k_cap = max(poisson_cutoff(lam, trunc.eps), support_cutoff(p, log_x, log_alpha))
    if k_cap > trunc.k_max_cap:
        achieved = math.exp(min(_poisson_tail_log_bound(lam, trunc.k_max_cap) - lam, 700.0))
        raise TruncationError(
            f"series needs {k_cap} terms but the cap is {trunc.k_max_cap}", achieved)
    total, comp = 0.0, 0.0
    log_w = 0.0
    log_lam = math.log(lam)
    for k in range(k_cap + 1):
        if k > 0:
            log_w += log_lam - math.log(k)
        u = density_from_log_x(p, log_x + k * log_alpha)
        if u != 0.0:
            total, comp = _neumaier_add(total, comp, u * math.exp(log_w + prefactor_log))
    return total + comp


def eval_v(p: InitialProfile, alpha: float, t: float, x: float,
           trunc: SeriesTruncation = DEFAULT_TRUNCATION) -> float:
    """Pure-fragmentation solution v(t, x) (unit division rate, no growth)."""
    if isinstance(p, Dirac):
        raise DomainError("dirac initial data is measure-valued; use support_set instead")
    if t < 0.0:
        raise DomainError(f"time must be nonnegative, got {t}")
    if not x > 0.0:
        raise DomainError(f"size must be positive, got {x}")
    if t == 0.0:
        return profile_eval_x(p, x)
    log_alpha = math.log(alpha)
    return _series_sum(p, alpha * alpha * t, math.log(x), log_alpha, -t, trunc)


def eval_u(params: ModelParams, p: InitialProfile, t: float, x: float,
           trunc: SeriesTruncation = DEFAULT_TRUNCATION, form: str = "rescaled") -> float:
    """Full solution u(t, x) for general (g, b, alpha).

    Two algebraically equivalent forms are implemented and cross-checked in
    the tests:

      rescaled: e^{-gt} v(bt, x e^{-gt}) evaluated through eval_v,
      direct:   e^{-(b+g)t} sum_k u0(alpha^k x e^{-gt}) (b alpha^2 t)^k / k!.
    """
    if form == "rescaled":
        return math.exp(-params.g * t) * eval_v(
            p, params.alpha, params.b * t, x * math.exp(-params.g * t), trunc)
    if form != "direct":
        raise DomainError(f"unknown evaluation form {form!r}")
    if isinstance(p, Dirac):
        raise DomainError("dirac initial data is measure-valued; use support_set instead")
    if t < 0.0:
        raise DomainError(f"time must be nonnegative, got {t}")
    if not x > 0.0:
        raise DomainError(f"size must be positive, got {x}")
    if t == 0.0:
        return profile_eval_x(p, x)
    lam = params.b * params.alpha**2 * t
    log_x_eff = math.log(x) - params.g * t
    return _series_sum(p, lam, log_x_eff, params.log_alpha, -(params.b + params.g) * t, trunc)


def eval_n_series(p: InitialProfile, alpha: float, t: float, y: np.ndarray,
                  trunc: SeriesTruncation = DEFAULT_TRUNCATION) -> np.ndarray:
    """Log-coordinate series n(t, y) = e^{-t} sum_k n(0, y + k log alpha) t^k / k!.

    Vectorized over the node array y; this is the oracle the grid solver is
    measured against.  The sum is positive term by term, so compensated
    accumulation keeps full relative accuracy even deep in the tails.
    """
    if isinstance(p, Dirac):
        raise DomainError("dirac initial data is measure-valued; use support_set instead")
    if t < 0.0:
        raise DomainError(f"time must be nonnegative, got {t}")
    y = np.asarray(y, dtype=float)
    if t == 0.0:
        return profile_eval_y(p, y)
    log_alpha = math.log(alpha)
    hi = support_y(p)[1]
    k_cap = max(poisson_cutoff(t, trunc.eps),
                int(math.ceil(max(0.0, (hi - float(np.min(y))) / log_alpha))))
    if k_cap > trunc.k_max_cap:
        achieved = math.exp(min(_poisson_tail_log_bound(t, trunc.k_max_cap) - t, 700.0))
        raise TruncationError(
            f"series needs {k_cap} terms but the cap is {trunc.k_max_cap}", achieved)
    total = np.zeros_like(y)
    comp = np.zeros_like(y)
    log_t = math.log(t)
    log_w = -t
    for k in range(k_cap + 1):
        if k > 0:
            log_w += log_t - math.log(k)
        term = profile_eval_y(p, y + k * log_alpha) * math.exp(log_w)
        s = total + term
        comp += np.where(np.abs(total) >= np.abs(term), (total - s) + term, (term - s) + total)
        total = s
    return total + comp


def moment_of_v(p: InitialProfile, alpha: float, q: float, t: float) -> float:
    """q-th moment of v(t, .), by termwise integration: moment(p, q) e^{t (alpha^{1-q} - 1)}.

    q = 1 is conserved exactly; q = 0 grows like e^{(alpha - 1) t}.
    """
    return moment(p, q) * math.exp(t * (alpha ** (1.0 - q) - 1.0))


def support_set(p: InitialProfile, params: ModelParams, t: float,
                k_max: int | None = None) -> list[tuple[float, float]]:
    """Atom lattice of the measure solution for a dirac initial datum.

    Returns (location, weight) pairs with locations x_k = alpha^{-k} x0 e^{gt}.
    The weights are growth-compensated: they satisfy

        sum_k w_k phi(x_k) = e^{-gt} <u(t, .), phi>,

    so sum_k w_k x_k equals the initial first moment weight * x0 at every time
    (the raw atom masses of u(t, .) are e^{gt} times these weights).  Pairs
    with an exactly zero weight (k >= 1 at t = 0) are dropped.
    """
    if not isinstance(p, Dirac):
        raise DomainError("support_set is only defined for dirac initial data")
    if t < 0.0:
        raise DomainError(f"time must be nonnegative, got {t}")
    if k_max is None:
        # weights carry (b alpha t)^k / k!, a Poisson profile in k
        k_max = poisson_cutoff(params.b * params.alpha * t, 1e-16)
    lam = params.b * params.alpha**2 * t
    pref = -(params.b + params.g) * t
    shift = params.g * t
    atoms: list[tuple[float, float]] = []
    log_w = 0.0
    for k in range(k_max + 1):
        if k > 0:
            if lam == 0.0:
                break
            log_w += math.log(lam) - math.log(k)
        x_k = math.exp(-k * params.log_alpha + shift) * p.x0
        w_k = p.weight * math.exp(log_w + pref - k * params.log_alpha)
        atoms.append((x_k, w_k))
    return atoms
