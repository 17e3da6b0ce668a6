"""Sensor-mode matrices, the strategic rank test, and the truncated
observability Gramian for boundary-gradient trace coordinates.

Sensor responses to eigenfunction gradients are assembled per angular index
into a matrix whose full rank (for every index up to the truncation) is the
strategic criterion; the Gramian's smallest eigenvalue quantifies the margin
and yields the observability-constant estimate.

Gradient entries default to stacked Cartesian component rows (two channels
per sensor), which keeps singular values covariant under rotations of the
sensor suite; a scalar-sum variant (one channel, the sum of the two
components) is available via components="sum".
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import (
    COS,
    SIN,
    EigenBasis,
    EigenMode,
    build_eigenbasis,
    eval_eigengradient,
    tangential_boundary_trace,
    _gauss_legendre,
)
from .model import POINTWISE, AnalysisConfig, zone_quadrature

VECTOR = "vector"
SUM = "sum"

TRACE_QUAD_NODES = 256
TRACE_RANK_TOL = 1e-10


@dataclass
class GnMatrix:
    """Sensor-response matrix of one angular eigenspace.

    entries has one column per branch (m_n columns) and, in the default
    vector form, two rows per sensor (x and y gradient channels).
    """

    n: int
    entries: np.ndarray
    m_n: int
    singular_values: np.ndarray


@dataclass
class GramianMatrix:
    """Observability Gramian over orthonormalized boundary-gradient trace
    coordinates restricted to the target arc."""

    dim: int
    entries: np.ndarray
    lambda_min: float
    lambda_max: float
    coordinate_index: list  # coordinate -> dominating (n, m, branch)


@dataclass
class StrategicVerdict:
    strategic: bool
    q_check: bool
    failing_modes: list  # angular indices with rank deficiency
    mode_singular_values: dict  # n -> singular values of G_n
    lambda_min: float
    lambda_max: float
    nu_estimate: float
    trunc_used: tuple


def gradient_functional(mode: EigenMode, sensor, basis: EigenBasis,
                        components: str = SUM):
    """Sensor response to the gradient of one eigenfunction.

    components="sum" gives the scalar sum of Cartesian components;
    components="vector" gives the (x, y) channel pair.
    """
    gx, gy = _gradient_channels(sensor, basis)[:, basis.index(mode.n, mode.m, mode.branch)]
    if components == SUM:
        return float(gx + gy)
    if components == VECTOR:
        return np.array([gx, gy])
    raise ValueError(f"unknown components mode {components!r}")


def _gradient_channels(sensor, basis: EigenBasis) -> np.ndarray:
    """(2, n_modes) array of x/y gradient channels, cached on the basis."""
    key = ("grad", sensor)
    cached = basis._functional_cache.get(key)
    if cached is not None:
        return cached
    out = np.empty((2, len(basis)))
    if sensor.kind == POINTWISE:
        r0, t0 = sensor.location
        for k, mode in enumerate(basis.modes):
            gx, gy = eval_eigengradient(mode, r0, t0)
            out[0, k] = sensor.gain * gx
            out[1, k] = sensor.gain * gy
    else:
        rq, tq, wq = zone_quadrature(sensor, basis.a)
        for k, mode in enumerate(basis.modes):
            gx, gy = eval_eigengradient(mode, rq, tq)
            out[0, k] = np.sum(wq * gx)
            out[1, k] = np.sum(wq * gy)
    basis._functional_cache[key] = out
    return out


def channel_matrix(sensors, basis: EigenBasis, components: str = VECTOR) -> np.ndarray:
    """Stacked gradient channels for a sensor suite: (n_channels, n_modes)."""
    blocks = [_gradient_channels(s, basis) for s in sensors]
    if components == VECTOR:
        return np.vstack(blocks) if blocks else np.empty((0, len(basis)))
    if components == SUM:
        return np.vstack([b[0] + b[1] for b in blocks]) if blocks \
            else np.empty((0, len(basis)))
    raise ValueError(f"unknown components mode {components!r}")


def assemble_Gn(n: int, sensors, basis: EigenBasis, radial_policy: str = "first",
                components: str = VECTOR) -> GnMatrix:
    """Sensor-response matrix for angular index n.

    radial_policy "first" uses radial index 1 only (the radial factor is a
    common column scalar for boundary pointwise sensors); "all" stacks the
    channel rows of every radial index, which matters for zone sensors.
    """
    if n > basis.trunc.n_max:
        raise ValueError("angular index outside the truncation")
    if radial_policy == "first":
        radial = [1]
    elif radial_policy == "all":
        radial = list(range(1, basis.trunc.m_max + 1))
    else:
        raise ValueError(f"unknown radial policy {radial_policy!r}")
    branches = [COS] if n == 0 else [COS, SIN]
    ch = channel_matrix(sensors, basis, components)
    rows = []
    for m in radial:
        cols = [basis.index(n, m, b) for b in branches]
        rows.append(ch[:, cols])
    entries = np.vstack(rows)
    sv = np.linalg.svd(entries, compute_uv=False) if entries.size else np.zeros(0)
    return GnMatrix(n=n, entries=entries, m_n=len(branches), singular_values=sv)


def _numerical_rank(singular_values: np.ndarray, rel_tol: float) -> int:
    if singular_values.size == 0 or singular_values[0] == 0.0:
        return 0
    return int(np.sum(singular_values > rel_tol * singular_values[0]))


def _time_integrals(rates: np.ndarray, horizon: float) -> np.ndarray:
    """Closed-form matrix of integral_0^T e^{(mu_a + mu_b) s} ds."""
    s = rates[:, None] + rates[None, :]
    out = np.full_like(s, horizon)
    nz = np.abs(s) > 1e-14
    out[nz] = np.expm1(s[nz] * horizon) / s[nz]
    return out


def trace_coordinate_transform(config: AnalysisConfig, basis: EigenBasis):
    """Orthonormalize boundary-gradient traces restricted to the target arc.

    Returns (selected mode indices, transform T) where the columns of T give
    the arc-orthonormal coordinate combinations of the selected traces.
    Near-dependent restricted traces are compressed away by a rank-revealing
    SVD with a relative threshold, so they cannot fake Gramian null vectors.
    """
    sel = [k for k, mo in enumerate(basis.modes) if mo.n >= 1]
    if not sel:
        return sel, np.zeros((0, 0))
    lo, hi = config.gamma.theta_lo, config.gamma.theta_hi
    x, w = _gauss_legendre(TRACE_QUAD_NODES)
    th = 0.5 * (hi - lo) * (x + 1.0) + lo
    wq = 0.5 * (hi - lo) * w * basis.a  # arc length measure
    P = np.column_stack(
        [tangential_boundary_trace(basis.modes[k], th) for k in sel]
    ) * np.sqrt(wq)[:, None]
    U, s, Vt = np.linalg.svd(P, full_matrices=False)
    keep = s > TRACE_RANK_TOL * s[0] if s.size else np.zeros(0, bool)
    # each column is an arc-orthonormal combination of the selected traces;
    # eigenvalues of the projected Gramian are basis-independent, so the SVD
    # basis is equivalent to a pivoted-QR orthonormalization of the family
    T = Vt[keep].T
    return sel, T


def assemble_gramian(config: AnalysisConfig, basis: EigenBasis = None,
                     components: str = VECTOR) -> GramianMatrix:
    """Truncated observability Gramian on arc-restricted trace coordinates."""
    if basis is None:
        basis = build_eigenbasis(config.domain.a, config.trunc)
    sel, T = trace_coordinate_transform(config, basis)
    dim = T.shape[1]
    if dim == 0:
        return GramianMatrix(0, np.zeros((0, 0)), 0.0, 0.0, [])
    F = channel_matrix(config.sensors, basis, components)[:, sel]
    rates = basis.rates[sel]
    raw = (F.T @ F) * _time_integrals(rates, config.horizon)
    N = T.T @ raw @ T
    N = 0.5 * (N + N.T)
    evals = np.linalg.eigvalsh(N)
    coord_index = []
    for k in range(dim):
        mo = basis.modes[sel[int(np.argmax(np.abs(T[:, k])))]]
        coord_index.append((mo.n, mo.m, mo.branch))
    return GramianMatrix(dim=dim, entries=N, lambda_min=float(evals[0]),
                         lambda_max=float(evals[-1]),
                         coordinate_index=coord_index)


def nu_estimate(gramian: GramianMatrix) -> float:
    """Observability-constant estimate 1/sqrt(lambda_min); inf when the
    Gramian is singular (no exact-observability estimate)."""
    if gramian.lambda_min > 0.0:
        return 1.0 / np.sqrt(gramian.lambda_min)
    return float("inf")


def strategic_check(config: AnalysisConfig, basis: EigenBasis = None,
                    components: str = VECTOR) -> StrategicVerdict:
    """Full strategic test: sensor count, per-mode rank, Gramian margin.

    Angular index 0 is exempt from the rank requirement: its boundary
    gradient trace vanishes identically under the Neumann condition, so no
    sensor can (or needs to) gradient-observe it on the arc.
    """
    if basis is None:
        basis = build_eigenbasis(config.domain.a, config.trunc)
    m = 2 if config.trunc.n_max >= 1 else 1
    q_check = len(config.sensors) >= m
    any_zone = any(s.kind != POINTWISE for s in config.sensors)
    policy = "all" if any_zone else "first"
    failing = []
    mode_sv = {}
    for n in range(1, config.trunc.n_max + 1):
        gn = assemble_Gn(n, config.sensors, basis, radial_policy=policy,
                         components=components)
        mode_sv[n] = gn.singular_values
        if _numerical_rank(gn.singular_values, config.rank_tol) < gn.m_n:
            failing.append(n)
    gram = assemble_gramian(config, basis, components)
    margin_ok = gram.lambda_min > config.gram_tol * gram.lambda_max
    strategic = q_check and not failing and margin_ok
    return StrategicVerdict(
        strategic=strategic,
        q_check=q_check,
        failing_modes=failing,
        mode_singular_values=mode_sv,
        lambda_min=gram.lambda_min,
        lambda_max=gram.lambda_max,
        nu_estimate=nu_estimate(gram),
        trunc_used=(config.trunc.n_max, config.trunc.m_max),
    )


def verdict_to_dict(verdict: StrategicVerdict) -> dict:
    return {
        "strategic": verdict.strategic,
        "q_check": verdict.q_check,
        "failing_modes": list(verdict.failing_modes),
        "lambda_min": verdict.lambda_min,
        "lambda_max": verdict.lambda_max,
        "nu_estimate": verdict.nu_estimate,
        "trunc": {"n_max": verdict.trunc_used[0], "m_max": verdict.trunc_used[1]},
        "mode_singular_values": {
            str(n): [float(s) for s in sv]
            for n, sv in verdict.mode_singular_values.items()
        },
    }
