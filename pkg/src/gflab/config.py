"""Run configuration: flat `key = value` sections, parsed with the stdlib parser.

The syntax is plain INI (section headers in brackets, one key per line),
chosen for zero-dependency parsing and diffability.  Unknown sections or keys
are rejected, every component invariant is re-validated at parse time, and
parse -> serialize -> parse is the identity.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, field, replace

from .errors import DomainError
from .model import InitialProfile, LogGaussian, ModelParams, format_profile, parse_profile, support_y

_SECTIONS = {
    "model": {"alpha", "b", "g", "profile"},
    "grid": {"m", "y_min", "y_max"},
    "time": {"t_end", "dt", "snapshots", "record_every"},
    "probes": {"rays"},
    "output": {"directory", "formats"},
    "analyze": {"period_tol", "mass_tol", "weak_tol", "pde_tol", "mellin_tol",
                "asymp_tol", "amp_threshold", "t_min"},
}


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs: profile, coefficients, grid, horizon, probes, outputs."""

    profile: InitialProfile = LogGaussian(mu=0.0, sigma=0.1, mass=1.0)
    params: ModelParams = ModelParams(g=0.0, b=1.0, alpha=2.0)
    m: int = 64
    y_min: float | None = None          # None: sized automatically from t_end and rays
    y_max: float | None = None          # None: just past the initial support
    t_end: float = 60.0
    dt: float = 0.01
    snapshots: tuple[float, ...] = ()   # empty: a default ladder up to t_end
    record_every: int = 1
    rays: tuple[float, ...] = ()        # empty: (-2, -1, -1/2) * log alpha
    directory: str = "out"
    formats: tuple[str, ...] = ("csv", "svg")
    # analysis thresholds (checked by the analyze command)
    period_tol: float = 0.02
    mass_tol: float = 1e-6
    weak_tol: float = 0.02
    pde_tol: float = 1e-7
    mellin_tol: float = 1e-6
    asymp_tol: float = 0.10
    amp_threshold: float = 1e-3
    t_min: float = 20.0                 # start of the probe analysis window

    def __post_init__(self) -> None:
        if self.m < 1:
            raise DomainError(f"grid cells per log(alpha) must be >= 1, got {self.m}")
        if self.t_end < 0.0:
            raise DomainError(f"horizon must be nonnegative, got {self.t_end}")
        if not self.dt > 0.0:
            raise DomainError(f"step size must be positive, got {self.dt}")
        if self.record_every < 1:
            raise DomainError(f"record_every must be >= 1, got {self.record_every}")
        for f_ in self.formats:
            if f_ not in ("csv", "svg"):
                raise DomainError(f"unknown output format {f_!r}")
        for tol_name in ("period_tol", "mass_tol", "weak_tol", "pde_tol",
                         "mellin_tol", "asymp_tol", "amp_threshold"):
            if not getattr(self, tol_name) > 0.0:
                raise DomainError(f"{tol_name} must be positive")

    # --- resolved values ------------------------------------------------

    def resolved_rays(self) -> tuple[float, ...]:
        if self.rays:
            return self.rays
        la = self.params.log_alpha
        return (-2.0 * la, -la, -0.5 * la)

    def resolved_y_max(self) -> float:
        if self.y_max is not None:
            return self.y_max
        return support_y(self.profile)[1] + 0.5

    def resolved_y_min(self) -> float:
        if self.y_min is not None:
            return self.y_min
        la = self.params.log_alpha
        t = self.t_end
        # envelope spreads like sqrt(t) in log-size; keep the left tail far
        # below the leak monitor, and cover every probe ray
        auto = -la * (t + 10.0 * math.sqrt(max(t, 1.0)) + 15.0)
        ray_need = min(self.resolved_rays()) * t - 3.0 * la - 1.0
        support_need = support_y(self.profile)[0] - 2.0
        return min(auto, ray_need, support_need)

    def resolved_snapshots(self) -> tuple[float, ...]:
        if self.snapshots:
            return tuple(sorted(set(self.snapshots)))
        ladder = [t for t in (1.0, 5.0, 10.0, 20.0, 40.0, 60.0) if t < self.t_end]
        return tuple(ladder + [self.t_end])


def _parse_floats(text: str) -> tuple[float, ...]:
    items = [s.strip() for s in text.split(",") if s.strip()]
    return tuple(float(s) for s in items)


def loads(text: str) -> RunConfig:
    """Parse the config syntax into a RunConfig, rejecting unknown keys."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise DomainError(f"malformed config: {exc}") from exc

    for section in cp.sections():
        if section not in _SECTIONS:
            raise DomainError(f"unknown config section [{section}]")
        for key in cp[section]:
            if key not in _SECTIONS[section]:
                raise DomainError(f"unknown key {key!r} in section [{section}]")

    def get(section: str, key: str, default=None):
        if cp.has_option(section, key):
            return cp.get(section, key)
        return default

    kwargs = {}
    profile_text = get("model", "profile")
    if profile_text is not None:
        kwargs["profile"] = parse_profile(profile_text)
    kwargs["params"] = ModelParams(
        g=float(get("model", "g", 0.0)),
        b=float(get("model", "b", 1.0)),
        alpha=float(get("model", "alpha", 2.0)),
    )
    if get("grid", "m") is not None:
        kwargs["m"] = int(get("grid", "m"))
    for sec, key in (("grid", "y_min"), ("grid", "y_max")):
        raw = get(sec, key)
        if raw is not None and raw.strip().lower() != "auto":
            kwargs[key] = float(raw)
    for key, cast in (("t_end", float), ("dt", float), ("record_every", int)):
        raw = get("time", key)
        if raw is not None:
            kwargs[key] = cast(raw)
    raw = get("time", "snapshots")
    if raw is not None:
        kwargs["snapshots"] = _parse_floats(raw)
    raw = get("probes", "rays")
    if raw is not None:
        kwargs["rays"] = _parse_floats(raw)
    raw = get("output", "directory")
    if raw is not None:
        kwargs["directory"] = raw.strip()
    raw = get("output", "formats")
    if raw is not None:
        kwargs["formats"] = tuple(s.strip() for s in raw.split(",") if s.strip())
    for key in ("period_tol", "mass_tol", "weak_tol", "pde_tol", "mellin_tol",
                "asymp_tol", "amp_threshold", "t_min"):
        raw = get("analyze", key)
        if raw is not None:
            kwargs[key] = float(raw)
    try:
        return RunConfig(**kwargs)
    except TypeError as exc:
        raise DomainError(f"invalid configuration: {exc}") from exc


def load(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


def dumps(cfg: RunConfig) -> str:
    """Serialize canonically; floats use repr so the round trip is exact."""
    out = io.StringIO()
    out.write("[model]\n")
    out.write(f"alpha = {cfg.params.alpha!r}\n")
    out.write(f"b = {cfg.params.b!r}\n")
    out.write(f"g = {cfg.params.g!r}\n")
    out.write(f"profile = {format_profile(cfg.profile)}\n\n")
    out.write("[grid]\n")
    out.write(f"m = {cfg.m}\n")
    out.write(f"y_min = {'auto' if cfg.y_min is None else repr(cfg.y_min)}\n")
    out.write(f"y_max = {'auto' if cfg.y_max is None else repr(cfg.y_max)}\n\n")
    out.write("[time]\n")
    out.write(f"t_end = {cfg.t_end!r}\n")
    out.write(f"dt = {cfg.dt!r}\n")
    if cfg.snapshots:
        out.write(f"snapshots = {', '.join(repr(t) for t in cfg.snapshots)}\n")
    out.write(f"record_every = {cfg.record_every}\n\n")
    out.write("[probes]\n")
    if cfg.rays:
        out.write(f"rays = {', '.join(repr(y) for y in cfg.rays)}\n")
    out.write("\n[output]\n")
    out.write(f"directory = {cfg.directory}\n")
    out.write(f"formats = {', '.join(cfg.formats)}\n\n")
    out.write("[analyze]\n")
    for key in ("period_tol", "mass_tol", "weak_tol", "pde_tol", "mellin_tol",
                "asymp_tol", "amp_threshold", "t_min"):
        out.write(f"{key} = {getattr(cfg, key)!r}\n")
    return out.getvalue()


def with_overrides(cfg: RunConfig, **overrides) -> RunConfig:
    """Apply non-None overrides (CLI flags win over the config file)."""
    clean = {k: v for k, v in overrides.items() if v is not None}
    return replace(cfg, **clean) if clean else cfg
