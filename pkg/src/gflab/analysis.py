"""Asymptotic-behaviour instruments: ray rescalings, line probes, period detection.

The rescaled density r(t, y) = t e^{2ty} v(t, e^{yt}) concentrates at
y0 = -log alpha with preserved integral, and the further zoom
rtilde(t, z) = r(t, y0 + sigma z / sqrt(t)) sigma / sqrt(t) with
sigma = log alpha converges weakly to the initial first moment times a unit
gaussian.  Pointwise, however, the normalized line values

    f_y(t) = sqrt(t) e^{-Psi(y) t} n(t, y t)

are asymptotically periodic with period -log(alpha) / y, and the instruments
here quantify that: probes sample f_y, the period estimator detrends a probe
and reads the first dominant autocorrelation peak, and weak limits are tested
only through integrated functionals (pointwise limits do not exist).

Everything reads values through a small source interface so the same
instrument runs on the series, the contour inversion, or a solved grid
trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Protocol

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, NumericsError
from .mellin import ContourQuad, asymp_v_poisson, asymp_v_theta, inverse_mellin_v, psi
from .model import InitialProfile, LogGaussian, ModelParams, moment, support_y
from .series import (
    DEFAULT_TRUNCATION,
    SeriesTruncation,
    eval_n_series,
    eval_v,
    poisson_cutoff,
)
from .solver import Trajectory, v_from_grid


class VSource(Protocol):
    """Anything that can evaluate the pure-fragmentation solution."""

    alpha: float

    def v(self, t: float, x: float) -> float: ...

    def n(self, t: float, y: float) -> float: ...


class SeriesSource:
    """Evaluate v and n through the explicit series."""

    def __init__(self, profile: InitialProfile, alpha: float,
                 trunc: SeriesTruncation = DEFAULT_TRUNCATION):
        self.profile = profile
        self.alpha = alpha
        self.trunc = trunc

    def v(self, t: float, x: float) -> float:
        return eval_v(self.profile, self.alpha, t, x, self.trunc)

    def n(self, t: float, y: float) -> float:
        # the log-coordinate series never forms e^y, so deep tails are safe
        return float(eval_n_series(self.profile, self.alpha, t, np.array([y]), self.trunc)[0])


class MellinSource:
    """Evaluate v and n through the contour inversion (log-gaussian data only)."""

    def __init__(self, profile: InitialProfile, alpha: float, nu: float = 2.0):
        self.profile = profile
        self.alpha = alpha
        self.nu = nu

    def v(self, t: float, x: float) -> float:
        cq = ContourQuad.for_gaussian(self.profile, self.alpha, t, self.nu)
        return inverse_mellin_v(self.profile, self.alpha, t, x, cq)

    def n(self, t: float, y: float) -> float:
        return math.exp(2.0 * y) * self.v(t, math.exp(y))


class GridSource:
    """Evaluate from a solved trajectory; probes reuse the densely recorded tracks."""

    def __init__(self, traj: Trajectory):
        self.traj = traj
        self.alpha = traj.grid.alpha

    def v(self, t: float, x: float) -> float:
        return v_from_grid(self.traj, t, x)

    def n(self, t: float, y: float) -> float:
        return self.traj.n_at(t, y)

    def probe_track(self, y: float) -> tuple[np.ndarray, np.ndarray]:
        for ray, vals in self.traj.diagnostics.probes.items():
            if abs(ray - y) <= 1e-9:
                return self.traj.diagnostics.times, vals
        raise DomainError(f"ray y = {y} was not tracked while solving "
                          f"(tracked: {sorted(self.traj.diagnostics.probes)})")


def r_of(source: VSource, t: float, y: float) -> float:
    """Rescaled line value r(t, y) = t e^{2ty} v(t, e^{yt}) = t n(t, t y)."""
    if not t > 0.0:
        raise DomainError(f"rescaling needs t > 0, got {t}")
    return t * source.n(t, t * y)


def r_tilde_of(source: VSource, t: float, z: float) -> float:
    """Gaussian-window rescaling of r around y0 = -log alpha with sigma = log alpha."""
    if not t > 0.0:
        raise DomainError(f"rescaling needs t > 0, got {t}")
    la = math.log(source.alpha)
    scale = la / math.sqrt(t)
    return r_of(source, t, -la + scale * z) * scale


@dataclass(frozen=True)
class LineProbe:
    """Samples of f_y(t) = sqrt(t) e^{-Psi(y) t} n(t, y t) along one ray y < 0."""

    y: float
    times: np.ndarray
    values: np.ndarray


def line_probe(source: VSource, y: float, times=None,
               t_min: float | None = None, t_max: float | None = None) -> LineProbe:
    """Sample f_y along the ray.  Grid sources reuse their dense recorded track.

    For a grid source `times` may be omitted; the track recorded while solving
    is windowed to [t_min, t_max].  Other sources evaluate pointwise at the
    requested times.
    """
    if y >= 0.0:
        raise DomainError(f"line probes are defined for rays y < 0, got {y}")
    psi_y = psi(source.alpha, y)[0]
    if isinstance(source, GridSource) and times is None:
        ts, track = source.probe_track(y)
        lo = t_min if t_min is not None else ts[0]
        hi = t_max if t_max is not None else ts[-1]
        mask = (ts >= lo) & (ts <= hi) & (ts > 0.0)
        ts = ts[mask]
        vals = np.sqrt(ts) * np.exp(-psi_y * ts) * track[mask]
        return LineProbe(y=y, times=ts, values=vals)
    if times is None:
        raise DomainError("sample times are required for non-grid sources")
    ts = np.asarray(times, dtype=float)
    if np.any(ts <= 0.0):
        raise DomainError("probe times must be positive")
    vals = np.array([math.sqrt(t) * math.exp(-psi_y * t) * source.n(t, y * t) for t in ts])
    return LineProbe(y=y, times=ts, values=vals)


@dataclass(frozen=True)
class PeriodEstimate:
    """Result of the autocorrelation period read-off.

    `oscillating` is False when the relative oscillation amplitude stays under
    the detection threshold; period is NaN in that case and positive otherwise.
    confidence is the ratio of the autocorrelation peak to the largest
    secondary structure between lag zero and the peak.
    """

    period: float
    confidence: float
    n_cycles: float
    amplitude: float
    oscillating: bool


def _moving_mean(values: np.ndarray, w: int) -> np.ndarray:
    kernel = np.full(w, 1.0 / w)
    return np.convolve(values, kernel, mode="valid")


def estimate_period(probe: LineProbe, expected_period: float | None = None,
                    amp_threshold: float = 1e-3) -> PeriodEstimate:
    """Detrend a probe, autocorrelate, and return the first dominant peak lag.

    The raw f_y still carries slow drifts (the envelope corrections decay only
    algebraically), so the series is divided by a moving mean over roughly
    three periods before autocorrelating.  Needs uniform sampling, at least
    32 samples per expected cycle, and at least 3 cycles in the window.
    """
    ts, vals = probe.times, probe.values
    if ts.size < 16:
        raise DomainError("window too short: need at least 16 probe samples")
    dt = float(ts[1] - ts[0])
    if not np.allclose(np.diff(ts), dt, rtol=1e-6, atol=1e-12):
        raise DomainError("period estimation needs uniformly sampled probes")
    span = float(ts[-1] - ts[0])
    if expected_period is not None:
        if dt > expected_period / 32.0:
            raise DomainError(
                f"sampling too coarse: {expected_period / dt:.1f} samples per expected "
                "cycle, need at least 32")
        if span < 3.0 * expected_period:
            raise DomainError(
                f"window too short: {span / expected_period:.2f} expected cycles, need >= 3")
        w = int(round(3.0 * expected_period / dt))
    else:
        w = max(3, ts.size // 8)
    w = min(w | 1, (ts.size - 2) | 1)  # odd, and leave data after trimming

    mm = _moving_mean(vals, w)
    if np.any(mm <= 0.0):
        raise NumericsError("probe mean is not positive; cannot detrend by division")
    trimmed = vals[(w - 1) // 2: ts.size - (w - 1) // 2]
    detrended = trimmed / mm - 1.0
    amplitude = 0.5 * float(np.max(detrended) - np.min(detrended))
    if amplitude < amp_threshold:
        return PeriodEstimate(period=math.nan, confidence=0.0, n_cycles=0.0,
                              amplitude=amplitude, oscillating=False)

    d = detrended - detrended.mean()
    ac = np.correlate(d, d, mode="full")[d.size - 1:]
    if ac[0] <= 0.0:
        raise NumericsError("degenerate autocorrelation")
    ac = ac / ac[0]

    if expected_period is not None:
        lo = max(2, int(0.6 * expected_period / dt))
        hi = min(ac.size - 2, int(1.5 * expected_period / dt))
        if hi <= lo:
            raise DomainError("window too short for the expected period")
        k = lo + int(np.argmax(ac[lo:hi + 1]))
    else:
        # first local maximum past the initial decay that carries real weight
        neg = np.nonzero(ac < 0.0)[0]
        start = int(neg[0]) if neg.size else max(2, ac.size // 16)
        tail = ac[start:ac.size - 1]
        peaks = np.nonzero((tail[1:-1] > tail[:-2]) & (tail[1:-1] >= tail[2:]))[0] + start + 1
        if peaks.size == 0:
            raise NumericsError("no autocorrelation peak found")
        best = float(np.max(ac[peaks]))
        k = int(peaks[np.nonzero(ac[peaks] >= 0.7 * best)[0][0]])

    # sub-sample refinement with a parabola through the peak
    if 1 <= k < ac.size - 1:
        denom = ac[k - 1] - 2.0 * ac[k] + ac[k + 1]
        shift = 0.5 * (ac[k - 1] - ac[k + 1]) / denom if denom != 0.0 else 0.0
        shift = float(np.clip(shift, -0.5, 0.5))
    else:
        shift = 0.0
    period = (k + shift) * dt

    mid = ac[max(1, int(0.25 * k)): max(2, int(0.75 * k))]
    baseline = max(float(np.max(mid)) if mid.size else 0.0, 1e-3)
    confidence = float(ac[k]) / baseline
    n_cycles = (dt * (detrended.size - 1)) / period
    if n_cycles < 3.0:
        raise DomainError(f"window too short: only {n_cycles:.2f} cycles observed, need >= 3")
    return PeriodEstimate(period=float(period), confidence=confidence,
                          n_cycles=float(n_cycles), amplitude=amplitude, oscillating=True)


def weak_test(source: VSource, phi: Callable[[float], float], t: float,
              rescaled: bool = False, y_window: tuple[float, float] | None = None) -> float:
    """Integrated functional int phi(y) r(t, y) dy (or int phi(z) rtilde(t, z) dz).

    Grid sources integrate with the grid's trapezoid rule after the exact
    change of variables to node coordinates; series sources use adaptive
    quadrature over the effective support (endpoints are checked to make sure
    the window actually contains the mass).  As t grows the plain form tends
    to U0(2) phi(-log alpha) and the rescaled form to U0(2) int phi dG.
    """
    if not t > 0.0:
        raise DomainError(f"weak tests need t > 0, got {t}")
    la = math.log(source.alpha)

    if isinstance(source, GridSource):
        g = source.traj.grid
        snap = source.traj.snapshots[source.traj.snapshot_index(t)]
        ys = g.y_nodes()
        if rescaled:
            args = (ys / t + la) * math.sqrt(t) / la
        else:
            args = ys / t
        phi_vals = np.array([phi(a) for a in args])
        integrand = phi_vals * snap
        return g.dy * (float(np.sum(integrand)) - 0.5 * float(integrand[0] + integrand[-1]))

    if y_window is None:
        lo_s, hi_s = support_y(getattr(source, "profile"))
        k_cap = poisson_cutoff(source.alpha**2 * t, 1e-14)
        y_window = ((lo_s - (k_cap + 2) * la) / t, (hi_s + la) / t)
    lo, hi = y_window
    scale = moment(getattr(source, "profile"), 1.0)
    for edge in (lo, hi):
        if abs(r_of(source, t, edge)) > 1e-9 * scale:
            raise NumericsError(
                f"integration window [{lo:.3g}, {hi:.3g}] does not contain the mass "
                f"(r at {edge:.3g} is not negligible)")
    if rescaled:
        integrand = lambda y: phi((y + la) * math.sqrt(t) / la) * r_of(source, t, y)
    else:
        integrand = lambda y: phi(y) * r_of(source, t, y)
    val, _ = quad(integrand, lo, hi, limit=800, epsabs=1e-10 * scale, epsrel=1e-9)
    return val


@dataclass(frozen=True)
class ComparisonRow:
    method_a: str
    method_b: str
    t: float
    x: float
    val_a: float
    val_b: float
    rel_err: float
    flagged: bool


@dataclass
class MethodComparison:
    """Pairwise cross-validation table for the evaluation routes."""

    rows: list[ComparisonRow]

    def max_rel_err(self, method_a: str, method_b: str) -> float:
        pair = {method_a, method_b}
        errs = [r.rel_err for r in self.rows
                if {r.method_a, r.method_b} == pair and not math.isnan(r.rel_err)]
        return max(errs) if errs else math.nan

    @property
    def flagged(self) -> list[ComparisonRow]:
        return [r for r in self.rows if r.flagged]

    def summary(self) -> str:
        pairs = sorted({(r.method_a, r.method_b) for r in self.rows})
        lines = ["pairwise max relative errors:"]
        for a, b in pairs:
            lines.append(f"  {a} vs {b}: {self.max_rel_err(a, b):.3e}")
        if self.flagged:
            lines.append(f"{len(self.flagged)} cell(s) above tolerance")
        else:
            lines.append("all cells within tolerance")
        return "\n".join(lines)


def _rel_err(a: float, b: float) -> float:
    denom = max(abs(a), abs(b))
    if denom == 0.0:
        return 0.0
    return abs(a - b) / denom


def compare_methods(profile: InitialProfile, params: ModelParams, t_list, x_list,
                    traj: Trajectory | None = None, methods=None,
                    tol: dict[frozenset, float] | None = None,
                    trunc: SeriesTruncation = DEFAULT_TRUNCATION) -> MethodComparison:
    """Evaluate v(t, x) by every requested route and tabulate pairwise errors.

    Methods: "series" (always available), "pde" (needs a trajectory snapshotted
    at each t), "mellin" (log-gaussian only), "asymp-theta" / "asymp-poisson"
    (0 < x < 1, t > 0).  Cells a method cannot evaluate are NaN and excluded
    from flags; flagged rows exceed the pairwise tolerance (default 1e-6,
    asymptotic pairs 0.15).
    """
    if methods is None:
        methods = ["series"]
        if traj is not None:
            methods.append("pde")
        if isinstance(profile, LogGaussian):
            methods.append("mellin")
    alpha = params.alpha

    def evaluate(method: str, t: float, x: float) -> float:
        try:
            if method == "series":
                return eval_v(profile, alpha, t, x, trunc)
            if method == "pde":
                if traj is None:
                    return math.nan
                return v_from_grid(traj, t, x)
            if method == "mellin":
                return inverse_mellin_v(profile, alpha, t, x)
            if method == "asymp-theta":
                return asymp_v_theta(profile, alpha, t, x)
            if method == "asymp-poisson":
                return asymp_v_poisson(profile, alpha, t, x)
        except DomainError:
            return math.nan
        raise DomainError(f"unknown evaluation method {method!r}")

    def _default_pair_tol(a: str, b: str) -> float:
        if "asymp-theta" in (a, b) or "asymp-poisson" in (a, b):
            return 0.15            # algebraically decaying corrections
        if "pde" in (a, b):
            return 2e-3            # off-node points carry cubic interpolation error
        return 1e-6
    default_tol = {frozenset({a, b}): _default_pair_tol(a, b)
                   for a, b in combinations(methods, 2)}
    if tol:
        default_tol.update(tol)

    rows: list[ComparisonRow] = []
    for t in t_list:
        for x in x_list:
            vals = {m: evaluate(m, float(t), float(x)) for m in methods}
            for a, b in combinations(methods, 2):
                va, vb = vals[a], vals[b]
                err = math.nan if (math.isnan(va) or math.isnan(vb)) else _rel_err(va, vb)
                flag = (not math.isnan(err)) and err > default_tol[frozenset({a, b})]
                rows.append(ComparisonRow(a, b, float(t), float(x), va, vb, err, flag))
    return MethodComparison(rows=rows)
