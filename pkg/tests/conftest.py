import numpy as np
import pytest

from gradsense.basis import ModeTruncation, build_eigenbasis
from gradsense.model import AnalysisConfig, BoundaryArc, DiskDomain, SensorSpec

# one pass/fail line per acceptance criterion, echoed after the test table
ACCEPTANCE_LINES = []


def record_acceptance(num: int, ok: bool, detail: str):
    line = f"ACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} -- {detail}"
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def unit_basis():
    """Unit-disk basis at the reference truncation (12, 8)."""
    return build_eigenbasis(1.0, ModeTruncation(12, 8))


@pytest.fixture(scope="session")
def small_basis():
    """Unit-disk basis at the randomized-sweep truncation (8, 4)."""
    return build_eigenbasis(1.0, ModeTruncation(8, 4))


def boundary_pair_config(delta: float, base: float = 0.2,
                         arc=(1.0, 1.3), trunc=ModeTruncation(12, 8),
                         **kwargs) -> AnalysisConfig:
    """Two boundary pointwise sensors separated by delta radians."""
    return AnalysisConfig(
        domain=DiskDomain(1.0),
        gamma=BoundaryArc(*arc),
        sensors=(
            SensorSpec(kind="pointwise", location=(1.0, base)),
            SensorSpec(kind="pointwise", location=(1.0, base + delta)),
        ),
        trunc=trunc,
        **kwargs,
    )


def random_config(rng: np.random.Generator,
                  trunc=ModeTruncation(8, 4)) -> AnalysisConfig:
    """Seeded random 2-4 sensor configuration with mixed kinds/weights."""
    q = int(rng.integers(2, 5))
    sensors = []
    for _ in range(q):
        kind = ("pointwise", "internal_zone", "boundary_zone")[int(rng.integers(3))]
        weight = ("uniform", "cosine_bump")[int(rng.integers(2))]
        th = float(rng.uniform(0.0, 2.0 * np.pi))
        if kind == "pointwise":
            sensors.append(SensorSpec(kind=kind,
                                      location=(float(rng.uniform(0.3, 1.0)), th)))
        elif kind == "internal_zone":
            r1 = float(rng.uniform(0.2, 0.6))
            r2 = min(r1 + float(rng.uniform(0.1, 0.3)), 1.0)
            w = float(rng.uniform(0.2, 0.8))
            sensors.append(SensorSpec(kind=kind, support=(r1, r2, th, th + w),
                                      weight=weight))
        else:
            w = float(rng.uniform(0.2, 0.8))
            sensors.append(SensorSpec(kind=kind, support=(th, th + w),
                                      weight=weight))
    lo = float(rng.uniform(0.0, 2.0))
    hi = lo + float(rng.uniform(0.3, 0.8))
    return AnalysisConfig(domain=DiskDomain(1.0), gamma=BoundaryArc(lo, hi),
                          sensors=tuple(sensors), trunc=trunc)
