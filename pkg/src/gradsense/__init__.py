"""gradsense: boundary-gradient strategic sensor analysis for diffusion on a disk."""

from .basis import (
    COS,
    SIN,
    DomainError,
    EigenBasis,
    EigenMode,
    ModeTruncation,
    bessel_j,
    bessel_jprime,
    bessel_jprime_zero,
    build_eigenbasis,
    eval_eigenfunction,
    eval_eigengradient,
    tangential_boundary_trace,
)
from .model import (
    BOUNDARY_ZONE,
    INTERNAL_ZONE,
    POINTWISE,
    AnalysisConfig,
    BoundaryArc,
    ConfigError,
    DiskDomain,
    SensorSpec,
    emit_config,
    load_config,
    parse_config,
    rotate_sensor,
    sensor_weight,
)
from .observability import (
    GnMatrix,
    GramianMatrix,
    StrategicVerdict,
    assemble_Gn,
    assemble_gramian,
    gradient_functional,
    nu_estimate,
    strategic_check,
)
from .placement import (
    RationalityReport,
    place_sensors,
    rationality_predicate,
    sweep_placements,
)
from .reconstruct import (
    InnerRegion,
    ReconstructionResult,
    SingularSystemError,
    build_inner_region,
    invert_measurements,
    reconstruct_boundary_gradient,
    trace_gradient_to_gamma,
)
from .semigroup import (
    MeasurementSeries,
    ModalState,
    evolve,
    initial_field,
    measure,
    project_initial,
    read_series,
    synthesize_measurements,
    write_series,
)

__version__ = "0.1.0"
