import math
from types import SimpleNamespace

import numpy as np
import pytest

from conftest import boundary_pair_config, random_config
from gradsense.basis import ModeTruncation, build_eigenbasis, eval_eigengradient
from gradsense.model import (
    AnalysisConfig,
    BoundaryArc,
    DiskDomain,
    SensorSpec,
    rotate_sensor,
)
from gradsense.observability import (
    GramianMatrix,
    _time_integrals,
    assemble_Gn,
    assemble_gramian,
    gradient_functional,
    nu_estimate,
    strategic_check,
    trace_coordinate_transform,
    verdict_to_dict,
)


def test_gradient_functional_constant_mode(small_basis):
    const = small_basis.modes[small_basis.index(0, 1)]
    for sensor in (
        SensorSpec(kind="pointwise", location=(0.5, 0.2)),
        SensorSpec(kind="internal_zone", support=(0.2, 0.6, 0.0, 1.0)),
    ):
        assert gradient_functional(const, sensor, small_basis) == 0.0


def test_gradient_functional_pointwise_sum(small_basis):
    mode = small_basis.modes[small_basis.index(1, 1, "cos")]
    sensor = SensorSpec(kind="pointwise", location=(1.0, 0.0))
    gx, gy = eval_eigengradient(mode, 1.0, 0.0)
    assert abs(gradient_functional(mode, sensor, small_basis) - (gx + gy)) < 1e-13
    vec = gradient_functional(mode, sensor, small_basis, components="vector")
    assert np.allclose(vec, [gx, gy], atol=1e-13)
    with pytest.raises(ValueError):
        gradient_functional(mode, sensor, small_basis, components="norm")


def test_symmetric_zone_sine_channel_vanishes(small_basis):
    # for a zone symmetric about theta = 0, the x-channel response to any
    # sine mode vanishes by parity (the integrand is odd under theta -> -theta)
    sensor = SensorSpec(kind="internal_zone", support=(0.3, 0.6, -0.4, 0.4))
    mode = small_basis.modes[small_basis.index(1, 1, "sin")]
    vec = gradient_functional(mode, sensor, small_basis, components="vector")
    assert abs(vec[0]) <= 1e-8


def test_assemble_Gn_n0_zero_for_boundary_pointwise(small_basis):
    sensors = [SensorSpec(kind="pointwise", location=(1.0, 0.0)),
               SensorSpec(kind="pointwise", location=(1.0, 1.0))]
    g_sum = assemble_Gn(0, sensors, small_basis, components="sum")
    assert g_sum.entries.shape == (2, 1)
    assert np.max(np.abs(g_sum.entries)) <= 1e-8
    g_vec = assemble_Gn(0, sensors, small_basis)
    assert g_vec.entries.shape == (4, 1)
    assert np.max(np.abs(g_vec.entries)) <= 1e-8
    assert g_sum.m_n == 1


def test_assemble_Gn_rank_examples(small_basis):
    s0 = SensorSpec(kind="pointwise", location=(1.0, 0.0))
    s_half_pi = SensorSpec(kind="pointwise", location=(1.0, np.pi / 2))
    s_one = SensorSpec(kind="pointwise", location=(1.0, 1.0))

    g2 = assemble_Gn(2, [s0, s_half_pi], small_basis)
    assert g2.m_n == 2
    # cos-branch column vanishes, rows proportional: rank 1
    assert g2.singular_values[0] > 1e-3
    assert g2.singular_values[1] <= 1e-8 * g2.singular_values[0]
    g2s = assemble_Gn(2, [s0, s_half_pi], small_basis, components="sum")
    assert g2s.singular_values[1] <= 1e-8 * g2s.singular_values[0]

    g1 = assemble_Gn(1, [s0, s_one], small_basis)
    assert g1.singular_values[1] > 1e-8 * g1.singular_values[0]

    with pytest.raises(ValueError):
        assemble_Gn(20, [s0], small_basis)
    with pytest.raises(ValueError):
        assemble_Gn(1, [s0], small_basis, radial_policy="last")


def test_time_integrals_closed_form():
    rates = np.array([0.4, -1.3])
    T = 0.9
    out = _time_integrals(rates, T)
    for i in range(2):
        for j in range(2):
            s = rates[i] + rates[j]
            assert abs(out[i, j] - (math.exp(s * T) - 1.0) / s) < 1e-14
    # degenerate pair mu_a + mu_b = 0: the integral is the horizon itself
    out = _time_integrals(np.array([0.7, -0.7]), T)
    assert out[0, 1] == T and out[1, 0] == T


def test_gramian_zero_sensors_singular(small_basis):
    cfg = SimpleNamespace(gamma=BoundaryArc(0.0, 2.0), sensors=(), horizon=1.0)
    gram = assemble_gramian(cfg, small_basis)
    assert gram.dim > 0
    assert np.all(gram.entries == 0.0)
    assert gram.lambda_min == 0.0
    assert nu_estimate(gram) == float("inf")


def test_gramian_matches_closed_form_entries(small_basis):
    # independent reassembly from scalar pieces: trace-orthonormal transform,
    # per-mode functionals, and the analytic time integral per entry
    cfg = boundary_pair_config(1.0, trunc=ModeTruncation(8, 4), horizon=0.8)
    gram = assemble_gramian(cfg, small_basis)
    sel, T = trace_coordinate_transform(cfg, small_basis)
    rows = []
    for s in cfg.sensors:
        ch = np.array([gradient_functional(small_basis.modes[k], s, small_basis,
                                           components="vector") for k in sel])
        rows.append(ch[:, 0])
        rows.append(ch[:, 1])
    # rebuild entrywise: N_ab = sum_pq T_pa T_qb (F^T F)_pq I(mu_p + mu_q)
    q2 = np.vstack(rows)
    raw = np.zeros((len(sel), len(sel)))
    for p in range(len(sel)):
        for qq in range(len(sel)):
            s = small_basis.rates[sel[p]] + small_basis.rates[sel[qq]]
            if abs(s) > 1e-14:
                tint = (math.exp(s * cfg.horizon) - 1.0) / s
            else:
                tint = cfg.horizon
            raw[p, qq] = float(q2[:, p] @ q2[:, qq]) * tint
    N = T.T @ raw @ T
    assert np.max(np.abs(N - gram.entries)) < 1e-10 * max(1.0, gram.lambda_max)
    assert np.max(np.abs(gram.entries - gram.entries.T)) <= 1e-12
    evals = np.linalg.eigvalsh(gram.entries)
    assert abs(gram.lambda_min - evals[0]) < 1e-12 * max(1.0, abs(evals[0]))


def test_gramian_coordinate_index(small_basis):
    cfg = boundary_pair_config(1.0, trunc=ModeTruncation(8, 4))
    gram = assemble_gramian(cfg, small_basis)
    assert len(gram.coordinate_index) == gram.dim
    for (n, m, branch) in gram.coordinate_index:
        assert 1 <= n <= 8 and 1 <= m <= 4 and branch in ("cos", "sin")


def test_nu_estimate_values():
    def fake(lmin):
        return GramianMatrix(dim=1, entries=np.array([[lmin]]), lambda_min=lmin,
                             lambda_max=max(lmin, 1.0), coordinate_index=[])

    assert nu_estimate(fake(1.0)) == 1.0
    assert nu_estimate(fake(4.0)) == 0.5
    assert nu_estimate(fake(0.0)) == float("inf")


def test_strategic_check_q_insufficient(small_basis):
    cfg = AnalysisConfig(domain=DiskDomain(1.0), gamma=BoundaryArc(0.0, 1.0),
                         sensors=(SensorSpec(kind="pointwise", location=(1.0, 0.3)),),
                         trunc=ModeTruncation(8, 4))
    v = strategic_check(cfg, small_basis)
    assert not v.q_check
    assert not v.strategic


def test_strategic_check_rational_and_irrational(unit_basis):
    v = strategic_check(boundary_pair_config(np.pi / 2), unit_basis)
    assert not v.strategic and 2 in v.failing_modes
    v = strategic_check(boundary_pair_config(1.0), unit_basis)
    assert v.strategic and v.failing_modes == []
    assert np.isfinite(v.nu_estimate)


def test_rank_failing_config_has_null_margin(unit_basis):
    # on the full circle the rank-null direction lies inside the kept trace
    # coordinates, so the Gramian margin fails together with the rank test
    cfg = boundary_pair_config(np.pi / 2, arc=(0.0, 2.0 * np.pi))
    v = strategic_check(cfg, unit_basis)
    assert v.failing_modes
    assert v.lambda_min <= cfg.gram_tol * v.lambda_max


def test_agreement_verdict_iff_margin(small_basis):
    rng = np.random.default_rng(512)
    for _ in range(25):
        cfg = random_config(rng)
        v = strategic_check(cfg, small_basis)
        margin = v.lambda_min > cfg.gram_tol * v.lambda_max
        assert v.strategic == (v.q_check and not v.failing_modes and margin)


def test_scaling_covariance(small_basis):
    cfg = boundary_pair_config(1.0, trunc=ModeTruncation(8, 4))
    c = 3.7
    scaled = AnalysisConfig(
        domain=cfg.domain, gamma=cfg.gamma,
        sensors=tuple(SensorSpec(kind=s.kind, location=s.location,
                                 support=s.support, weight=s.weight,
                                 gain=s.gain * c) for s in cfg.sensors),
        trunc=cfg.trunc, horizon=cfg.horizon)
    for n in (1, 3, 6):
        g0 = assemble_Gn(n, cfg.sensors, small_basis)
        g1 = assemble_Gn(n, scaled.sensors, small_basis)
        assert np.allclose(g1.entries, c * g0.entries, rtol=1e-12)
    gram0 = assemble_gramian(cfg, small_basis)
    gram1 = assemble_gramian(scaled, small_basis)
    assert np.allclose(gram1.entries, c * c * gram0.entries, rtol=1e-12)
    v0 = strategic_check(cfg, small_basis)
    v1 = strategic_check(scaled, small_basis)
    assert v0.strategic == v1.strategic
    assert v0.failing_modes == v1.failing_modes


def test_monotonic_under_sensor_addition(small_basis):
    base = boundary_pair_config(1.0, trunc=ModeTruncation(8, 4))
    more = AnalysisConfig(
        domain=base.domain, gamma=base.gamma,
        sensors=base.sensors + (SensorSpec(kind="pointwise", location=(1.0, 2.2)),),
        trunc=base.trunc, horizon=base.horizon)
    g0 = assemble_gramian(base, small_basis)
    g1 = assemble_gramian(more, small_basis)
    assert g1.lambda_min >= g0.lambda_min - 1e-15 * g0.lambda_max


def test_arc_nesting_direction(small_basis):
    # enlarging the target arc brings in harder trace coordinates, so the
    # smallest eigenvalue can only shrink on nested arcs
    small_arc = boundary_pair_config(1.0, arc=(1.0, 1.3), trunc=ModeTruncation(8, 4))
    large_arc = boundary_pair_config(1.0, arc=(0.8, 1.8), trunc=ModeTruncation(8, 4))
    g_small = assemble_gramian(small_arc, small_basis)
    g_large = assemble_gramian(large_arc, small_basis)
    assert g_large.lambda_min <= g_small.lambda_min


def test_rotation_covariance_of_singular_values(small_basis):
    rng = np.random.default_rng(77)
    sensors = [SensorSpec(kind="pointwise", location=(1.0, 0.4)),
               SensorSpec(kind="internal_zone", support=(0.3, 0.7, 1.0, 1.6),
                          weight="cosine_bump")]
    delta = float(rng.uniform(0.1, 2.0))
    rotated = [rotate_sensor(s, delta) for s in sensors]
    for n in range(1, 9):
        sv0 = assemble_Gn(n, sensors, small_basis, radial_policy="all").singular_values
        sv1 = assemble_Gn(n, rotated, small_basis, radial_policy="all").singular_values
        assert np.max(np.abs(sv0 - sv1)) <= 1e-9


def test_verdict_to_dict_schema(small_basis):
    v = strategic_check(boundary_pair_config(1.0, trunc=ModeTruncation(8, 4)),
                        small_basis)
    d = verdict_to_dict(v)
    for key in ("strategic", "q_check", "failing_modes", "lambda_min",
                "lambda_max", "nu_estimate", "trunc", "mode_singular_values"):
        assert key in d
    assert d["trunc"] == {"n_max": 8, "m_max": 4}
    assert set(d["mode_singular_values"]) == {str(n) for n in range(1, 9)}
