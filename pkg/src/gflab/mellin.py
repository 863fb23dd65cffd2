"""Spectral route: kernel symbol, saddle data, contour inversion, and asymptotics.

The fragmentation kernel's Mellin symbol is K(s) = alpha^{2-s}, and the
pure-fragmentation solution has the contour representation

    v(t, x) = (1 / 2 pi i) int_{nu - i inf}^{nu + i inf}
              U0(s) e^{(K(s) - 1) t} x^{-s} ds        for any real nu.

Along a vertical contour |e^{(K(s) - 1) t}| is periodic in Im s with period
2 pi / log alpha rather than decaying, so all decay of the integrand must
come from U0 itself.  The numerical inversion therefore accepts log-gaussian
data only, where |U0(nu + i tau)| falls off like exp(-sigma^2 tau^2 / 2).

Large-time behaviour along rays x = e^{yt} (y < 0) is governed by the real
saddle abscissa s_plus(t, x) and its vertical lattice of translates
s_k = s_plus - 2 i k pi / log alpha, all sharing the same K value.  Two
equivalent evaluators are provided: the theta form sums U0 over that lattice
with oscillatory phases, and the Poisson-resummed form sums the initial
density over the dilation lattice alpha^n x.  Complex powers of positive
reals are always computed as exp(exponent * real log), which fixes the branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, QuadratureError
from .model import (
    InitialProfile,
    LogGaussian,
    ModelParams,
    density_from_log_x,
    mellin_U0,
    support_y,
)

# exp(-z^2 / 2) dips below 1e-16 past this many widths.
_DECAY_WIDTHS = math.sqrt(-2.0 * math.log(1e-16))


def K_of_s(alpha: float, s):
    """Kernel symbol K(s) = alpha^{2-s} = exp((2 - s) log alpha)."""
    out = np.exp((2.0 - np.asarray(s)) * math.log(alpha))
    return complex(out) if np.isscalar(s) else out


def s_plus(alpha: float, t: float, x: float) -> float:
    """Real saddle abscissa 2 - log(-log(x) / (t log alpha)) / log alpha.

    Defined for 0 < x < 1 and t > 0.  It inverts K', so it satisfies
    x = e^{-t (log alpha) alpha^{2 - s_plus}} and is constant along rays
    x = e^{yt}.
    """
    if not t > 0.0:
        raise DomainError(f"saddle abscissa needs t > 0, got {t}")
    if not 0.0 < x < 1.0:
        raise DomainError(f"saddle abscissa is defined for 0 < x < 1, got {x}")
    la = math.log(alpha)
    return 2.0 - math.log(-math.log(x) / (t * la)) / la


def s_k(s_plus_value: float, k: int, alpha: float) -> complex:
    """k-th vertical translate s_plus - 2 i k pi / log alpha of the saddle."""
    return complex(s_plus_value, -2.0 * math.pi * k / math.log(alpha))


def psi(alpha: float, y: float) -> tuple[float, float, float]:
    """Ray exponent Psi and its first two derivatives at y < 0.

    Psi(y) = log(-y / log alpha) / log alpha * y - y / log alpha - 1 controls
    growth or decay of t e^{2ty} v(t, e^{yt}) along the ray x = e^{yt}; it is
    maximal (= 0) at y = -log alpha with curvature -1 / (log alpha)^2.
    """
    if y >= 0.0:
        raise DomainError(f"ray exponent is defined for y < 0, got {y}")
    la = math.log(alpha)
    lr = math.log(-y / la)
    return (lr * y / la - y / la - 1.0, lr / la, 1.0 / (y * la))


@dataclass(frozen=True)
class ContourQuad:
    """Trapezoid rule on the truncated vertical contour nu + i [-tau_max, tau_max]."""

    nu: float
    tau_max: float
    n_nodes: int

    def __post_init__(self) -> None:
        if not self.tau_max > 0.0:
            raise DomainError(f"contour truncation must be positive, got {self.tau_max}")
        if self.n_nodes < 2 or self.n_nodes % 2 != 0:
            raise DomainError(f"node count must be even and >= 2, got {self.n_nodes}")

    @classmethod
    def for_gaussian(cls, p: LogGaussian, alpha: float, t: float, nu: float = 2.0) -> "ContourQuad":
        """Contour sized for a log-gaussian integrand.

        tau_max makes the gaussian factor exp(-sigma^2 tau^2 / 2) fall below
        1e-16, with extra sqrt(t) margin; the node spacing resolves both the
        transform width (sigma / 4) and the oscillation of e^{K(s) t}, whose
        phase moves at t log(alpha) alpha^{2 - nu} per unit tau.
        """
        sigma = p.sigma
        tau_max = (_DECAY_WIDTHS + 2.0 * math.sqrt(max(1.0, t))) / sigma
        rate = t * math.log(alpha) * alpha ** (2.0 - nu)
        h = sigma / 4.0
        if rate > 0.0:
            h = min(h, math.pi / (4.0 * rate))
        n = int(math.ceil(2.0 * tau_max / h)) + 1
        n += n % 2
        return cls(nu=nu, tau_max=tau_max, n_nodes=n)


def _contour_value(p: InitialProfile, alpha: float, t: float, log_x: float,
                   nu: float, tau_max: float, n_nodes: int) -> float:
    taus = np.linspace(-tau_max, tau_max, n_nodes)
    h = 2.0 * tau_max / (n_nodes - 1)
    weights = np.full(n_nodes, h)
    weights[0] = weights[-1] = 0.5 * h
    s = nu + 1j * taus
    integrand = mellin_U0(p, s) * np.exp((K_of_s(alpha, s) - 1.0) * t - s * log_x)
    return float(np.sum(weights * integrand.real)) / (2.0 * math.pi)


def inverse_mellin_v(p: InitialProfile, alpha: float, t: float, x: float,
                     cq: ContourQuad | None = None, err_tol: float = 1e-8) -> float:
    """v(t, x) by trapezoid quadrature of the inverse Mellin contour integral.

    Only log-gaussian data gives an integrand that decays along the contour
    (the exponential factor is periodic, not decaying, in Im s).  The result
    is checked against a half-resolution pass; if the difference exceeds
    err_tol * (1 + |value|) a QuadratureError carrying the estimate is raised.
    """
    if not isinstance(p, LogGaussian):
        raise DomainError(
            "contour integrand decays too slowly: inverse Mellin inversion "
            f"requires a log-gaussian profile, got {type(p).__name__}")
    if t < 0.0:
        raise DomainError(f"time must be nonnegative, got {t}")
    if not x > 0.0:
        raise DomainError(f"size must be positive, got {x}")
    if cq is None:
        cq = ContourQuad.for_gaussian(p, alpha, t)
    log_x = math.log(x)
    value = _contour_value(p, alpha, t, log_x, cq.nu, cq.tau_max, cq.n_nodes)
    coarse = _contour_value(p, alpha, t, log_x, cq.nu, cq.tau_max, max(2, cq.n_nodes // 2))
    estimate = abs(value - coarse)
    if estimate > err_tol * (1.0 + abs(value)):
        raise QuadratureError("contour quadrature did not converge", estimate)
    return value


@dataclass(frozen=True)
class AsympTruncation:
    """Truncations for the asymptotic sums: |k| <= k_max and n in n_range (must contain 0)."""

    k_max: int
    n_range: tuple[int, int]

    def __post_init__(self) -> None:
        if self.k_max < 0:
            raise DomainError(f"theta-sum truncation must be >= 0, got {self.k_max}")
        lo, hi = self.n_range
        if not lo <= 0 <= hi:
            raise DomainError(f"dilation-sum window must contain 0, got {self.n_range}")


def default_theta_k_max(p: InitialProfile, alpha: float, s_plus_value: float,
                        cap: int = 512) -> int:
    """Smallest k with |U0(s_k)| below 1e-16 |U0(s_plus)|, capped for slowly decaying transforms."""
    ref = abs(mellin_U0(p, complex(s_plus_value)))
    la = math.log(alpha)
    for k in range(1, cap + 1):
        if abs(mellin_U0(p, complex(s_plus_value, -2.0 * math.pi * k / la))) < 1e-16 * ref:
            return k
    return cap


def default_poisson_range(p: InitialProfile, alpha: float, x: float) -> tuple[int, int]:
    """Dilation indices n with alpha^n x inside the (effective) profile support, padded by one."""
    lo, hi = support_y(p)
    la = math.log(alpha)
    lx = math.log(x)
    n_lo = int(math.floor((lo - lx) / la)) - 1
    n_hi = int(math.ceil((hi - lx) / la)) + 1
    return (min(n_lo, 0), max(n_hi, 0))


def theta_sum(p: InitialProfile, alpha: float, s_plus_value: float, log_x: float,
              k_max: int) -> complex:
    """sum_{|k| <= k_max} U0(s_k) e^{2 i pi k log(x) / log alpha}.

    The k and -k terms are complex conjugates for real initial data, so the
    full sum is real up to rounding; callers take the real part.
    """
    la = math.log(alpha)
    ks = np.arange(-k_max, k_max + 1)
    svals = s_plus_value - 2j * math.pi * ks / la
    phases = np.exp(2j * math.pi * ks * (log_x / la))
    return complex(np.sum(mellin_U0(p, svals) * phases))


def poisson_sum(p: InitialProfile, alpha: float, s_plus_value: float, x: float,
                n_range: tuple[int, int]) -> float:
    """sum_{n in n_range} u0(alpha^n x) alpha^{s_plus n} (the resummed dilation lattice)."""
    la = math.log(alpha)
    lx = math.log(x)
    ns = np.arange(n_range[0], n_range[1] + 1)
    dens = density_from_log_x(p, lx + ns * la)
    return float(np.sum(dens * np.exp(s_plus_value * ns * la)))


def asymp_v_theta(p: InitialProfile, alpha: float, t: float, x: float,
                  tr: AsympTruncation | None = None) -> float:
    """Saddle asymptotics of v(t, x) in theta form, for 0 < x < 1 and t > 0.

    x^{-s_plus} e^{(alpha^{2 - s_plus} - 1) t} times the lattice sum over the
    s_k, divided by sqrt(2 pi t) log(alpha) alpha^{1 - s_plus / 2}.  With
    k_max = 0 this degenerates to the single-saddle formula valid for smooth
    fragmentation kernels, which is the comparison baseline for the
    oscillation story.  The 1 + o(t^-beta) correction is omitted.
    """
    sp = s_plus(alpha, t, x)  # validates the (t, x) domain
    la = math.log(alpha)
    k_max = tr.k_max if tr is not None else default_theta_k_max(p, alpha, sp)
    log_x = math.log(x)
    pref = math.exp(-sp * log_x + (alpha ** (2.0 - sp) - 1.0) * t)
    denom = math.sqrt(2.0 * math.pi * t) * la * alpha ** (1.0 - sp / 2.0)
    return pref * theta_sum(p, alpha, sp, log_x, k_max).real / denom


def asymp_v_poisson(p: InitialProfile, alpha: float, t: float, x: float,
                    tr: AsympTruncation | None = None) -> float:
    """Saddle asymptotics of v(t, x) in Poisson-resummed form, for 0 < x < 1 and t > 0.

    e^{(alpha^{2 - s_plus} - 1) t} sum_n u0(alpha^n x) alpha^{s_plus n}
    divided by sqrt(2 pi t) alpha^{1 - s_plus / 2}; for decaying profiles only
    the finitely many n with alpha^n x inside the support contribute.
    """
    sp = s_plus(alpha, t, x)
    n_range = tr.n_range if tr is not None else default_poisson_range(p, alpha, x)
    pref = math.exp((alpha ** (2.0 - sp) - 1.0) * t)
    denom = math.sqrt(2.0 * math.pi * t) * alpha ** (1.0 - sp / 2.0)
    return pref * poisson_sum(p, alpha, sp, x, n_range) / denom


class AsympU(NamedTuple):
    """The two equivalent asymptotic evaluations of u(t, x)."""

    theta: float
    poisson: float


def asymp_u(params: ModelParams, p: InitialProfile, t: float, x: float,
            tr: AsympTruncation | None = None) -> AsympU:
    """Growth-case asymptotics of u(t, x), stated for b = 1 exactly.

    Both forms are the exact image of the v-asymptotics under
    u(t, x) = e^{-gt} v(t, x e^{-gt}), with s_plus evaluated at x e^{-gt}:

      theta:   x^{-s_plus} e^{(alpha^{2-s_plus} - 1 + g (s_plus - 1)) t}
               times the lattice sum with phases in log(x e^{-gt}),
      poisson: e^{(alpha^{2-s_plus} - 1 - g) t} times the dilation sum over
               u0(alpha^n x e^{-gt}).

    General b is reached through the caller's time rescaling; any other value
    raises a DomainError.
    """
    if params.b != 1.0:
        raise DomainError(
            f"growth-case asymptotics are normalized to b = 1 (got b = {params.b}); "
            "rescale time by b first")
    g = params.g
    alpha = params.alpha
    x_eff = x * math.exp(-g * t)
    sp = s_plus(alpha, t, x_eff)  # validates t > 0 and 0 < x e^{-gt} < 1
    la = params.log_alpha
    log_x = math.log(x)
    log_x_eff = log_x - g * t

    k_max = tr.k_max if tr is not None else default_theta_k_max(p, alpha, sp)
    pref_t = math.exp(-sp * log_x + (alpha ** (2.0 - sp) - 1.0 + g * (sp - 1.0)) * t)
    denom_t = math.sqrt(2.0 * math.pi * t) * la * alpha ** (1.0 - sp / 2.0)
    theta = pref_t * theta_sum(p, alpha, sp, log_x_eff, k_max).real / denom_t

    n_range = tr.n_range if tr is not None else default_poisson_range(p, alpha, x_eff)
    pref_p = math.exp((alpha ** (2.0 - sp) - 1.0 - g) * t)
    denom_p = math.sqrt(2.0 * math.pi * t) * alpha ** (1.0 - sp / 2.0)
    poisson = pref_p * poisson_sum(p, alpha, sp, x_eff, n_range) / denom_p

    return AsympU(theta=theta, poisson=poisson)
