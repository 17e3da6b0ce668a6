"""Placement predicates (angle-rationality tests) and configuration sweeps.

Whether the angular separation of two sensors is a rational multiple of pi,
scaled by each unstable-mode index, predicts rank deficiencies; the rank
test on the assembled matrices stays the ground truth the sweep reports.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction

from .model import AnalysisConfig, POINTWISE, SensorSpec
from .observability import assemble_gramian, strategic_check


@dataclass
class RationalityVerdict:
    n0: int
    value: float  # n0 * (theta1 - theta2) / pi
    numerator: int
    denominator: int
    error: float
    rational: bool


@dataclass
class RationalityReport:
    theta_diff: float
    verdicts: list
    predicted_strategic: bool


def rationality_predicate(theta1: float, theta2: float, J: int,
                          q_max: int = 10 ** 6, tol: float = 1e-9) -> RationalityReport:
    """Mark, for each unstable-mode index, whether n0*(theta1-theta2)/pi is
    rational within tol (best approximant with denominator <= q_max, found by
    continued fractions); strategic is predicted iff no index is rational.

    The acceptance threshold is tol scaled down by the approximant's squared
    denominator: continued fractions approximate *every* real to ~1/q^2, so a
    flat tolerance would flag all irrationals once q_max is large.  A truly
    rational value (up to float representation noise ~1e-16) beats the
    generic 1/q^2 level by many orders; an irrational never does.
    """
    import math

    if q_max < 2:
        raise ValueError("q_max must be >= 2")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if J < 1:
        raise ValueError("J must be >= 1")
    diff = theta1 - theta2
    verdicts = []
    for n0 in range(1, J + 1):
        x = n0 * diff / math.pi
        frac = Fraction(x).limit_denominator(q_max)
        err = abs(x - float(frac))
        verdicts.append(
            RationalityVerdict(
                n0=n0,
                value=x,
                numerator=frac.numerator,
                denominator=frac.denominator,
                error=err,
                rational=err <= tol / frac.denominator ** 2,
            )
        )
    predicted = not any(v.rational for v in verdicts)
    return RationalityReport(theta_diff=diff, verdicts=verdicts,
                             predicted_strategic=predicted)


def _reposition(sensor: SensorSpec, theta: float) -> SensorSpec:
    """Move a sensor so its angular position (or support midpoint) is theta."""
    if sensor.kind == POINTWISE:
        r, _ = sensor.location
        return replace(sensor, location=(r, theta))
    from .model import rotate_sensor

    return rotate_sensor(sensor, theta - sensor.midangle())


def place_sensors(config: AnalysisConfig, angles) -> AnalysisConfig:
    """Config with each sensor repositioned to the corresponding angle."""
    if len(angles) != len(config.sensors):
        raise ValueError("angle tuple length must match the sensor count")
    sensors = tuple(_reposition(s, t) for s, t in zip(config.sensors, angles))
    return replace(config, sensors=sensors)


def _worker_count() -> int:
    env = os.environ.get("GRADSENSE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def sweep_placements(config_template: AnalysisConfig, angle_grid, basis=None):
    """Evaluate candidate angle tuples and rank them by Gramian lambda_min.

    Duplicate tuples are evaluated once (set semantics); ranking is by
    lambda_min descending with lexicographic tie-break on the angles.
    Returns a list of (angles, lambda_min, strategic) triples.
    """
    tuples = sorted({tuple(float(t) for t in angles) for angles in angle_grid})
    if not tuples:
        raise ValueError("angle grid must be non-empty")
    if basis is None:
        from .basis import build_eigenbasis

        basis = build_eigenbasis(config_template.domain.a, config_template.trunc)

    def evaluate(angles):
        cfg = place_sensors(config_template, angles)
        verdict = strategic_check(cfg, basis)
        return angles, verdict.lambda_min, verdict.strategic

    workers = min(_worker_count(), len(tuples))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(evaluate, tuples))
    else:
        results = [evaluate(t) for t in tuples]
    results.sort(key=lambda item: (-item[1], item[0]))
    return results
