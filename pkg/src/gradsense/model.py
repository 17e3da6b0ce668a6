"""Domain, target boundary arc, sensor suite, and configuration ingestion."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .basis import ModeTruncation, _gauss_legendre

TWO_PI = 2.0 * np.pi

POINTWISE = "pointwise"
INTERNAL_ZONE = "internal_zone"
BOUNDARY_ZONE = "boundary_zone"

UNIFORM = "uniform"
COSINE_BUMP = "cosine_bump"

# quadrature resolution for zone-sensor functionals
ZONE_ANGULAR_NODES = 48
ZONE_RADIAL_NODES = 48
BOUNDARY_ZONE_NODES = 96


class ConfigError(ValueError):
    """Malformed or invalid configuration document."""


@dataclass(frozen=True)
class DiskDomain:
    a: float

    def __post_init__(self):
        if not self.a > 0:
            raise ConfigError("domain.a: disk radius must be positive")


@dataclass(frozen=True)
class BoundaryArc:
    """Target sub-boundary arc on r = a, as an angular interval.

    Arcs crossing theta = 0 are rejected; rotate the configuration instead.
    """

    theta_lo: float
    theta_hi: float

    def __post_init__(self):
        if not (0.0 <= self.theta_lo < self.theta_hi <= TWO_PI):
            raise ConfigError("gamma: require 0 <= theta_lo < theta_hi <= 2*pi")


@dataclass(frozen=True)
class SensorSpec:
    """One sensor: a pointwise probe or a zone with a weight profile.

    location is the polar point (r, theta) for pointwise sensors.
    support is (theta1, theta2) for boundary zones and
    (r1, r2, theta1, theta2) for internal zones.
    gain is a multiplicative factor on the (unit-mass) weight profile.
    """

    kind: str
    location: tuple | None = None
    support: tuple | None = None
    weight: str = UNIFORM
    gain: float = 1.0

    def midangle(self) -> float:
        """Angular position (pointwise) or angular support midpoint (zones)."""
        if self.kind == POINTWISE:
            return self.location[1]
        t1, t2 = self.support[-2], self.support[-1]
        return 0.5 * (t1 + t2)


def _validate_sensor(sensor: SensorSpec, a: float, label: str):
    if sensor.kind not in (POINTWISE, INTERNAL_ZONE, BOUNDARY_ZONE):
        raise ConfigError(f"{label}.kind: unknown sensor kind {sensor.kind!r}")
    if sensor.weight not in (UNIFORM, COSINE_BUMP):
        raise ConfigError(f"{label}.weight: unknown profile {sensor.weight!r}")
    if not sensor.gain > 0:
        raise ConfigError(f"{label}.gain: must be positive")
    if sensor.kind == POINTWISE:
        if sensor.location is None or len(sensor.location) != 2:
            raise ConfigError(f"{label}.location: pointwise sensor needs (r, theta)")
        r, _ = sensor.location
        if not 0.0 <= r <= a:
            raise ConfigError(f"{label}.location: point outside the closed disk")
    elif sensor.kind == BOUNDARY_ZONE:
        if sensor.support is None or len(sensor.support) != 2:
            raise ConfigError(f"{label}.support: boundary zone needs (theta1, theta2)")
        t1, t2 = sensor.support
        if not t1 < t2:
            raise ConfigError(f"{label}.support: zone must have positive measure")
    else:
        if sensor.support is None or len(sensor.support) != 4:
            raise ConfigError(
                f"{label}.support: internal zone needs (r1, r2, theta1, theta2)"
            )
        r1, r2, t1, t2 = sensor.support
        if not (0.0 <= r1 < r2 <= a):
            raise ConfigError(f"{label}.support: radial extent must lie inside the disk")
        if not t1 < t2:
            raise ConfigError(f"{label}.support: zone must have positive measure")


@dataclass(frozen=True)
class AnalysisConfig:
    domain: DiskDomain
    gamma: BoundaryArc
    sensors: tuple
    trunc: ModeTruncation = ModeTruncation(12, 8)
    horizon: float = 1.0
    rank_tol: float = 1e-8
    gram_tol: float = 1e-10

    def __post_init__(self):
        if len(self.sensors) < 1:
            raise ConfigError("sensors: at least one sensor is required")
        if not self.horizon > 0:
            raise ConfigError("horizon: must be positive")
        for name in ("rank_tol", "gram_tol"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ConfigError(f"{name}: must lie in (0, 1)")
        for i, s in enumerate(self.sensors):
            _validate_sensor(s, self.domain.a, f"sensors[{i}]")


def _sensor_from_dict(d: dict, i: int) -> SensorSpec:
    label = f"sensors[{i}]"
    if "kind" not in d:
        raise ConfigError(f"{label}.kind: missing")
    loc = tuple(d["location"]) if "location" in d else None
    sup = tuple(d["support"]) if "support" in d else None
    return SensorSpec(
        kind=d["kind"],
        location=loc,
        support=sup,
        weight=d.get("weight", UNIFORM),
        gain=float(d.get("gain", 1.0)),
    )


def parse_config(text: str) -> AnalysisConfig:
    """Parse and validate a JSON configuration document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"parse error at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("top level: expected a JSON object")
    for key in ("domain", "gamma", "sensors"):
        if key not in doc:
            raise ConfigError(f"{key}: missing")
    domain = DiskDomain(a=float(doc["domain"].get("a", 0.0)))
    gamma = BoundaryArc(
        theta_lo=float(doc["gamma"].get("theta_lo", 0.0)),
        theta_hi=float(doc["gamma"].get("theta_hi", 0.0)),
    )
    sensors = tuple(_sensor_from_dict(d, i) for i, d in enumerate(doc["sensors"]))
    tr = doc.get("trunc", {})
    trunc = ModeTruncation(int(tr.get("n_max", 12)), int(tr.get("m_max", 8)))
    return AnalysisConfig(
        domain=domain,
        gamma=gamma,
        sensors=sensors,
        trunc=trunc,
        horizon=float(doc.get("horizon", 1.0)),
        rank_tol=float(doc.get("rank_tol", 1e-8)),
        gram_tol=float(doc.get("gram_tol", 1e-10)),
    )


def load_config(path) -> AnalysisConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def config_to_dict(config: AnalysisConfig) -> dict:
    sensors = []
    for s in config.sensors:
        d = {"kind": s.kind}
        if s.location is not None:
            d["location"] = list(s.location)
        if s.support is not None:
            d["support"] = list(s.support)
        d["weight"] = s.weight
        d["gain"] = s.gain
        sensors.append(d)
    return {
        "domain": {"a": config.domain.a},
        "gamma": {"theta_lo": config.gamma.theta_lo, "theta_hi": config.gamma.theta_hi},
        "sensors": sensors,
        "trunc": {"n_max": config.trunc.n_max, "m_max": config.trunc.m_max},
        "horizon": config.horizon,
        "rank_tol": config.rank_tol,
        "gram_tol": config.gram_tol,
    }


def emit_config(config: AnalysisConfig) -> str:
    """Canonical JSON form; parse_config(emit_config(c)) reproduces c."""
    from .report import json_text

    return json_text(config_to_dict(config))


def _zone_measure(sensor: SensorSpec, a: float) -> float:
    if sensor.kind == BOUNDARY_ZONE:
        t1, t2 = sensor.support
        return a * (t2 - t1)
    r1, r2, t1, t2 = sensor.support
    return 0.5 * (r2 * r2 - r1 * r1) * (t2 - t1)


def sensor_weight(sensor: SensorSpec, a: float, r, theta) -> float:
    """Sensing density f at a polar point; 0 outside the support."""
    if sensor.kind == POINTWISE:
        raise ValueError("pointwise sensors carry a Dirac weight, not a density")
    if sensor.kind == BOUNDARY_ZONE:
        t1, t2 = sensor.support
        if abs(r - a) > 1e-9 * a or not t1 <= theta <= t2:
            return 0.0
    else:
        r1, r2, t1, t2 = sensor.support
        if not (r1 <= r <= r2 and t1 <= theta <= t2):
            return 0.0
    base = sensor.gain / _zone_measure(sensor, a)
    if sensor.weight == UNIFORM:
        return base
    mid = 0.5 * (t1 + t2)
    width = t2 - t1
    return base * (1.0 + np.cos(TWO_PI * (theta - mid) / width))


def zone_quadrature(sensor: SensorSpec, a: float):
    """Quadrature points and weights for integrals of g(r, theta) * f over the
    sensor support (weights include the measure jacobian and the density f)."""
    if sensor.kind == POINTWISE:
        raise ValueError("pointwise sensors have no support quadrature")
    base = sensor.gain / _zone_measure(sensor, a)

    def profile(theta, t1, t2):
        if sensor.weight == UNIFORM:
            return np.ones_like(theta)
        mid = 0.5 * (t1 + t2)
        return 1.0 + np.cos(TWO_PI * (theta - mid) / (t2 - t1))

    if sensor.kind == BOUNDARY_ZONE:
        t1, t2 = sensor.support
        x, w = _gauss_legendre(BOUNDARY_ZONE_NODES)
        th = 0.5 * (t2 - t1) * (x + 1.0) + t1
        wq = 0.5 * (t2 - t1) * w * a * base * profile(th, t1, t2)
        return np.full_like(th, a), th, wq
    r1, r2, t1, t2 = sensor.support
    xr, wr = _gauss_legendre(ZONE_RADIAL_NODES)
    xt, wt = _gauss_legendre(ZONE_ANGULAR_NODES)
    rr = 0.5 * (r2 - r1) * (xr + 1.0) + r1
    tt = 0.5 * (t2 - t1) * (xt + 1.0) + t1
    R, TH = np.meshgrid(rr, tt, indexing="ij")
    W = np.outer(0.5 * (r2 - r1) * wr * rr, 0.5 * (t2 - t1) * wt)
    W = W * base * profile(TH, t1, t2)
    return R.ravel(), TH.ravel(), W.ravel()


def rotate_sensor(sensor: SensorSpec, delta: float) -> SensorSpec:
    """Sensor rotated by delta around the disk center (support shape kept)."""
    if sensor.kind == POINTWISE:
        r, th = sensor.location
        return replace(sensor, location=(r, th + delta))
    if sensor.kind == BOUNDARY_ZONE:
        t1, t2 = sensor.support
        return replace(sensor, support=(t1 + delta, t2 + delta))
    r1, r2, t1, t2 = sensor.support
    return replace(sensor, support=(r1, r2, t1 + delta, t2 + delta))
