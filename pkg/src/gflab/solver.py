"""Direct solver for the log-coordinate form d/dt n(t, y) = -n(t, y) + n(t, y + log alpha).

This route never touches the series or the transform: it discretizes nothing
but time.  The grid spacing divides log alpha exactly (dy = log(alpha) / m
with integer m), so the nonlocal term is an exact array shift by m nodes and
the semi-discrete system is the equation restricted to the nodes.  Any
non-commensurate grid would interpolate the shift and the resulting numerical
diffusion would wash out exactly the oscillations under study.

Boundaries: n is identically zero to the right of the initial support,
because a node at y is fed only from y + log alpha (so the zero right
boundary is exact once y_max covers the support).  On the left the domain
must simply be large enough that mass never arrives; a monitor errors out if
the leftmost nodes become visibly positive.

Time stepping is the classical explicit fourth-order scheme.  For steps up to
the enforced cap the update is a positive combination of shifts, so node
values stay nonnegative.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, MassLeakError
from .model import Dirac, InitialProfile, profile_eval_y, support_y

MAX_STEP = 0.5          # positivity-preserving cap for the explicit scheme
_LEAK_TOL = 1e-12       # absolute threshold for the left-edge mass monitor
_LEAK_NODES = 10


@dataclass(frozen=True)
class LogGrid:
    """Uniform grid in y = log x with spacing dy = log(alpha) / m.

    Nodes sit at y_j = j * dy for j in [j_lo, j_lo + len(values) - 1], so the
    shift y -> y + log alpha is exactly m nodes and y = 0 is on-grid whenever
    it lies inside the domain.  `values` holds n at the nodes; treat it as
    immutable (stepping returns a fresh grid).
    """

    alpha: float
    m: int
    dy: float
    j_lo: int
    values: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.values.size

    @property
    def y_min(self) -> float:
        return self.j_lo * self.dy

    @property
    def y_max(self) -> float:
        return (self.j_lo + self.n_nodes - 1) * self.dy

    def y_nodes(self) -> np.ndarray:
        return (self.j_lo + np.arange(self.n_nodes)) * self.dy


def build_grid(p: InitialProfile, alpha: float, y_min: float, y_max: float, m: int) -> LogGrid:
    """Sample n(0, y) = e^{2y} u0(e^y) on a shift-commensurate grid covering [y_min, y_max]."""
    if isinstance(p, Dirac):
        raise DomainError("dirac initial data cannot be sampled on a grid")
    if m < 1:
        raise DomainError(f"cells per log(alpha) must be a positive integer, got {m}")
    if not y_min < y_max:
        raise DomainError(f"empty grid domain [{y_min}, {y_max}]")
    hi = support_y(p)[1]
    if y_max < hi:
        raise DomainError(
            f"right boundary y_max = {y_max} does not cover the initial support "
            f"(needs y_max >= {hi}); the zero boundary would be wrong")
    dy = math.log(alpha) / m
    j_lo = int(math.floor(y_min / dy + 1e-12))
    j_hi = int(math.ceil(y_max / dy - 1e-12))
    values = profile_eval_y(p, (j_lo + np.arange(j_hi - j_lo + 1)) * dy)
    return LogGrid(alpha=alpha, m=m, dy=dy, j_lo=j_lo, values=values)


def _rhs(values: np.ndarray, m: int) -> np.ndarray:
    """dn_i/dt = -n_i + n_{i+m}, with n = 0 past the right edge."""
    out = -values
    if m < values.size:
        out[:-m] += values[m:]
    return out


def step(grid: LogGrid, dt: float) -> LogGrid:
    """One classical fourth-order explicit step of size dt (dt <= 0.5 enforced)."""
    if not 0.0 < dt <= MAX_STEP * (1.0 + 1e-12):
        raise DomainError(f"step size must be in (0, {MAX_STEP}], got {dt}")
    m, v = grid.m, grid.values
    k1 = _rhs(v, m)
    k2 = _rhs(v + 0.5 * dt * k1, m)
    k3 = _rhs(v + 0.5 * dt * k2, m)
    k4 = _rhs(v + dt * k3, m)
    return replace(grid, values=v + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4))


def _cubic_interp(values: np.ndarray, j_lo: int, dy: float, y: float) -> float:
    """Four-point Lagrange interpolation on the uniform grid (linear at the edges)."""
    n = values.size
    u = y / dy - j_lo
    if u < -1e-9 or u > n - 1 + 1e-9:
        raise DomainError(f"log-size {y} is outside the grid [{j_lo * dy}, {(j_lo + n - 1) * dy}]")
    u = min(max(u, 0.0), float(n - 1))
    i = int(math.floor(u))
    f = u - i
    if f == 0.0 or i >= n - 1:
        return float(values[i])
    if i == 0 or i == n - 2:
        return float((1.0 - f) * values[i] + f * values[i + 1])
    wm1 = -f * (f - 1.0) * (f - 2.0) / 6.0
    w0 = (f * f - 1.0) * (f - 2.0) / 2.0
    w1 = -f * (f + 1.0) * (f - 2.0) / 2.0
    w2 = f * (f * f - 1.0) / 6.0
    return float(wm1 * values[i - 1] + w0 * values[i] + w1 * values[i + 1] + w2 * values[i + 2])


@dataclass
class Diagnostics:
    """Per-record scalars collected while stepping."""

    times: np.ndarray
    mass: np.ndarray                      # trapezoid integral of n over the grid
    argmax_y: np.ndarray                  # node location of the current maximum
    probes: dict[float, np.ndarray]       # ray y -> n(t, y t) samples


@dataclass
class Trajectory:
    """Snapshots at requested times plus dense diagnostics; immutable once emitted."""

    grid: LogGrid                         # geometry reference (initial values)
    times: np.ndarray
    snapshots: np.ndarray                 # shape (len(times), n_nodes)
    diagnostics: Diagnostics

    def snapshot_index(self, t: float) -> int:
        idx = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[idx] - t) > 1e-9 * max(1.0, abs(t)):
            raise DomainError(f"time {t} was not snapshotted (available: {self.times.tolist()})")
        return idx

    def n_at(self, t: float, y: float) -> float:
        """Interpolated n(t, y) from the snapshot at t; zero outside the grid."""
        snap = self.snapshots[self.snapshot_index(t)]
        if y > self.grid.y_max + 1e-12 or y < self.grid.y_min - 1e-12:
            return 0.0
        return _cubic_interp(snap, self.grid.j_lo, self.grid.dy, y)


def _trapz_mass(values: np.ndarray, dy: float) -> float:
    return dy * (float(np.sum(values)) - 0.5 * float(values[0] + values[-1]))


def solve_n(grid: LogGrid, t_end: float, dt: float,
            snapshot_times=None, probe_rays=(), record_every: int = 1) -> Trajectory:
    """March the shift-coupled system to t_end, landing exactly on snapshot times.

    Diagnostics (mass, argmax location, and the tracked line values n(t, y t)
    for each probe ray) are recorded at t = 0 and every `record_every`-th
    step.  The base step dt is subdivided per interval so snapshots and t_end
    are hit exactly.  A MassLeakError is raised as soon as any of the leftmost
    nodes exceeds the leak threshold, since mass reaching the left edge would
    silently break conservation.
    """
    if t_end < 0.0:
        raise DomainError(f"horizon must be nonnegative, got {t_end}")
    if not dt > 0.0:
        raise DomainError(f"step size must be positive, got {dt}")
    dt = min(dt, MAX_STEP)
    if snapshot_times is None or len(snapshot_times) == 0:
        snapshot_times = [t_end]
    snaps = sorted(set(float(t) for t in snapshot_times))
    if snaps and (snaps[0] < 0.0 or snaps[-1] > t_end + 1e-12):
        raise DomainError(f"snapshot times {snaps} fall outside [0, {t_end}]")

    rays = [float(y) for y in probe_rays]
    rec_t: list[float] = []
    rec_mass: list[float] = []
    rec_argmax: list[float] = []
    rec_probe: dict[float, list[float]] = {y: [] for y in rays}

    def record(t: float, g: LogGrid) -> None:
        rec_t.append(t)
        rec_mass.append(_trapz_mass(g.values, g.dy))
        rec_argmax.append((g.j_lo + int(np.argmax(g.values))) * g.dy)
        for y in rays:
            pos = y * t
            if g.y_min <= pos <= g.y_max:
                rec_probe[y].append(_cubic_interp(g.values, g.j_lo, g.dy, pos))
            else:
                rec_probe[y].append(0.0)

    out_times: list[float] = []
    out_snaps: list[np.ndarray] = []
    current = grid
    t = 0.0
    record(0.0, current)
    if snaps and snaps[0] == 0.0:
        out_times.append(0.0)
        out_snaps.append(current.values.copy())

    breakpoints = sorted(set(snaps) | {t_end})
    steps_done = 0
    for target in breakpoints:
        if target <= t + 1e-15:
            continue
        n_sub = max(1, int(math.ceil((target - t) / dt - 1e-12)))
        h = (target - t) / n_sub
        for i in range(n_sub):
            current = step(current, h)
            t = target if i == n_sub - 1 else t + h
            steps_done += 1
            head = current.values[:_LEAK_NODES]
            if head.size and float(np.max(head)) > _LEAK_TOL:
                raise MassLeakError(
                    f"mass reached the left grid edge at t = {t:.6g} "
                    f"(max of leftmost {_LEAK_NODES} nodes is {float(np.max(head)):.3e}); "
                    "extend y_min")
            if steps_done % record_every == 0 or t == target:
                if not rec_t or rec_t[-1] != t:
                    record(t, current)
        if any(abs(target - s) <= 1e-12 for s in snaps):
            out_times.append(target)
            out_snaps.append(current.values.copy())

    diag = Diagnostics(
        times=np.asarray(rec_t),
        mass=np.asarray(rec_mass),
        argmax_y=np.asarray(rec_argmax),
        probes={y: np.asarray(vals) for y, vals in rec_probe.items()},
    )
    return Trajectory(grid=grid, times=np.asarray(out_times),
                      snapshots=np.asarray(out_snaps), diagnostics=diag)


def v_from_grid(traj: Trajectory, t: float, x: float) -> float:
    """Recover v(t, x) = e^{-2y} n(t, y) at y = log x from a snapshotted time.

    Above the grid the support argument gives an exact zero; below the grid
    the value is extrapolated as zero with a warning, since the solver only
    guarantees the left tail is negligible, not resolved.
    """
    if not x > 0.0:
        raise DomainError(f"size must be positive, got {x}")
    y = math.log(x)
    idx = traj.snapshot_index(t)
    g = traj.grid
    if y > g.y_max + 1e-12:
        return 0.0
    if y < g.y_min - 1e-12:
        warnings.warn(f"log-size {y:.3f} is below the grid; extrapolating v as 0",
                      RuntimeWarning, stacklevel=2)
        return 0.0
    return math.exp(-2.0 * y) * _cubic_interp(traj.snapshots[idx], g.j_lo, g.dy, y)
