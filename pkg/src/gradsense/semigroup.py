"""Modal simulation of the diffusion system and sensor measurement synthesis.

The evolution operator is diagonal in the eigenbasis, so time propagation is
an exact coefficient-wise exponential; no time-stepping error enters.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from scipy import special

from . import report
from .basis import (
    ANGULAR_QUAD_NODES,
    COS,
    RADIAL_QUAD_NODES,
    SIN,
    EigenBasis,
    ModeTruncation,
    _trig,
    angular_rule,
    build_eigenbasis,
    eval_eigenfunction,
    radial_rule,
)
from .model import POINTWISE, AnalysisConfig, emit_config, zone_quadrature


@dataclass
class ModalState:
    """State coefficients over the active truncated basis at a given time."""

    coeffs: np.ndarray
    time: float = 0.0


@dataclass
class MeasurementSeries:
    """Per-sensor output samples on a strictly increasing time grid."""

    times: np.ndarray  # (K,)
    values: np.ndarray  # (q, K)
    noise_sigma: float = 0.0
    seed: int = 0


def project_initial(z0, basis: EigenBasis, radial_nodes: int = RADIAL_QUAD_NODES,
                    angular_nodes: int = ANGULAR_QUAD_NODES) -> ModalState:
    """L2 projection of a pointwise-evaluable field onto the basis."""
    r, wr = radial_rule(basis.a, radial_nodes)
    th, wth = angular_rule(angular_nodes)
    R, TH = np.meshgrid(r, th, indexing="ij")
    try:
        Z = np.asarray(z0(R, TH), dtype=float)
        if Z.shape != R.shape:
            raise ValueError
    except Exception:
        Z = np.array([[float(z0(ri, tj)) for tj in th] for ri in r])
    wZ = (wr * r)[:, None] * wth[None, :] * Z
    # separable quadrature: radial Bessel profiles against wZ contracted with
    # the angular trig factors, instead of a full grid pass per mode
    coeffs = np.empty(len(basis))
    trig_cols = {}
    for k, mode in enumerate(basis.modes):
        tkey = (mode.n, mode.branch)
        col = trig_cols.get(tkey)
        if col is None:
            col = wZ @ _trig(mode.branch, mode.n * th)
            trig_cols[tkey] = col
        radial = mode.norm_const * special.jv(mode.n, mode.beta * r / basis.a)
        coeffs[k] = radial @ col
    return ModalState(coeffs=coeffs, time=0.0)


def evolve(state: ModalState, basis: EigenBasis, dt: float) -> ModalState:
    """Propagate the state by dt via exact modal exponentials."""
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    return ModalState(coeffs=state.coeffs * np.exp(basis.rates * dt),
                      time=state.time + dt)


def measurement_functionals(sensor, basis: EigenBasis) -> np.ndarray:
    """Per-mode output functional of one sensor (cached on the basis):
    pointwise value for pointwise sensors, weighted support integral for zones."""
    key = ("meas", sensor)
    cached = basis._functional_cache.get(key)
    if cached is not None:
        return cached
    if sensor.kind == POINTWISE:
        r0, t0 = sensor.location
        out = np.array(
            [sensor.gain * eval_eigenfunction(mode, r0, t0) for mode in basis.modes]
        )
    else:
        rq, tq, wq = zone_quadrature(sensor, basis.a)
        out = np.array(
            [np.sum(wq * eval_eigenfunction(mode, rq, tq)) for mode in basis.modes]
        )
    basis._functional_cache[key] = out
    return out


def measure(state: ModalState, sensor, basis: EigenBasis) -> float:
    """Sensor output for the current state."""
    return float(measurement_functionals(sensor, basis) @ state.coeffs)


def forward_operator(config: AnalysisConfig, basis: EigenBasis,
                     times: np.ndarray) -> np.ndarray:
    """Matrix mapping initial-state coefficients to stacked samples; row
    order is sensor-major: (sensor i, time k) -> row i * K + k."""
    F = np.vstack([measurement_functionals(s, basis) for s in config.sensors])
    E = np.exp(np.outer(times, basis.rates))  # (K, n_modes)
    K = len(times)
    M = np.empty((len(config.sensors) * K, len(basis)))
    for i in range(len(config.sensors)):
        M[i * K:(i + 1) * K] = E * F[i][None, :]
    return M


def synthesize_measurements(config: AnalysisConfig, z0, sample_count: int,
                            noise_sigma: float = 0.0, seed: int = 0,
                            basis: EigenBasis = None) -> MeasurementSeries:
    """Simulate the autonomous system from z0 and sample every sensor on a
    uniform grid over [0, T]; optional seeded Gaussian noise."""
    if sample_count < 2:
        raise ValueError("sample_count must be >= 2")
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be nonnegative")
    if basis is None:
        basis = build_eigenbasis(config.domain.a, config.trunc)
    state = z0 if isinstance(z0, ModalState) else project_initial(z0, basis)
    times = np.linspace(0.0, config.horizon, sample_count)
    F = np.vstack([measurement_functionals(s, basis) for s in config.sensors])
    C = state.coeffs[None, :] * np.exp(np.outer(times, basis.rates))  # (K, n)
    values = F @ C.T  # (q, K)
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        values = values + rng.normal(0.0, noise_sigma, size=values.shape)
    return MeasurementSeries(times=times, values=values,
                             noise_sigma=noise_sigma, seed=seed)


def initial_field(preset: str, a: float):
    """Named initial-state presets for simulation runs.

    mode:n,m,branch  -- a single normalized eigenfunction
    bump:thetac,width -- smooth angular bump concentrated near the boundary
    poly:rcos        -- the field r cos(theta)
    """
    name, _, args = preset.partition(":")
    if name == "mode":
        try:
            n_s, m_s, branch = args.split(",")
            n, m = int(n_s), int(m_s)
        except ValueError as exc:
            raise ValueError(f"bad mode preset {preset!r}") from exc
        if branch not in (COS, SIN) or (n == 0 and branch == SIN):
            raise ValueError(f"bad mode preset {preset!r}")
        basis = build_eigenbasis(a, ModeTruncation(n, m))
        mode = basis.modes[basis.index(n, m, branch)]
        return lambda r, theta: eval_eigenfunction(mode, r, theta)
    if name == "bump":
        try:
            tc_s, w_s = args.split(",")
            tc, width = float(tc_s), float(w_s)
        except ValueError as exc:
            raise ValueError(f"bad bump preset {preset!r}") from exc
        if width <= 0:
            raise ValueError("bump width must be positive")
        return _mollified_bump(tc, width, a)
    if name == "poly" and args == "rcos":
        return lambda r, theta: r * np.cos(theta)
    raise ValueError(f"unknown initial-field preset {preset!r}")


# spectral mollification strength of the bump preset (units of a^2 time)
BUMP_SMOOTHING = 0.6
_BUMP_TRUNC = ModeTruncation(12, 8)


def _mollified_bump(tc: float, width: float, a: float):
    """Smooth zero-mean angular bump concentrated near the boundary.

    The raw bump (von Mises angular profile minus its angular mean, times a
    boundary-hugging radial profile) is mollified by a short diffusion of the
    evolution operator, which leaves a smooth field dominated by the slow
    modes.  The zero angular mean removes the gradient-unobservable n = 0
    content exactly.
    """
    mean = np.exp(-1.0 / width ** 2) * special.iv(0, 1.0 / width ** 2)

    def raw(r, theta):
        ang = np.exp((np.cos(theta - tc) - 1.0) / (width * width)) - mean
        rad = np.exp(-2.0 * (1.0 - (r / a) ** 2) ** 2)
        return ang * rad

    basis = build_eigenbasis(a, _BUMP_TRUNC)
    coeffs = project_initial(raw, basis).coeffs
    coeffs = coeffs * np.exp(-BUMP_SMOOTHING * (np.array(
        [mo.beta for mo in basis.modes]) / a) ** 2)
    active = [(c, mo) for c, mo in zip(coeffs, basis.modes)
              if abs(c) > 1e-300 and mo.n >= 1]

    def bump(r, theta):
        r_arr, th_arr = np.broadcast_arrays(np.asarray(r, float),
                                            np.asarray(theta, float))
        shape = r_arr.shape
        # grids repeat radii/angles heavily; evaluate on the unique values
        ru, ri = np.unique(r_arr.ravel(), return_inverse=True)
        tu, ti = np.unique(th_arr.ravel(), return_inverse=True)
        out = np.zeros(r_arr.size)
        for c, mo in active:
            radial = c * mo.norm_const * special.jv(mo.n, mo.beta * ru / a)
            out += radial[ri] * _trig(mo.branch, mo.n * tu)[ti]
        out = out.reshape(shape)
        return out if out.ndim else float(out)

    return bump


def write_series(series: MeasurementSeries, path, config: AnalysisConfig = None):
    """CSV export `t, y1, ..., yq` plus a JSON metadata sidecar."""
    q = series.values.shape[0]
    header = ["t"] + [f"y{i + 1}" for i in range(q)]
    rows = [
        [float(series.times[k])] + [float(series.values[i, k]) for i in range(q)]
        for k in range(len(series.times))
    ]
    path = str(path)
    with open(path, "wb") as fh:
        fh.write(report.csv_bytes(header, rows))
    meta = {
        "noise_sigma": float(series.noise_sigma),
        "seed": int(series.seed),
        "config_digest": report.digest(emit_config(config)) if config else None,
    }
    with open(path + ".meta.json", "wb") as fh:
        fh.write(report.json_bytes(meta))


def read_series(path) -> MeasurementSeries:
    """Load a measurement CSV written by write_series (sidecar optional)."""
    import json
    import os

    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    times = data[:, 0]
    values = data[:, 1:].T
    sigma, seed = 0.0, 0
    meta_path = str(path) + ".meta.json"
    if os.path.exists(meta_path):
        with open(meta_path, "r", encoding="utf-8") as fh:
            meta = json.load(fh)
        sigma = float(meta.get("noise_sigma", 0.0))
        seed = int(meta.get("seed", 0))
    return MeasurementSeries(times=times, values=values,
                             noise_sigma=sigma, seed=seed)
