"""Balance control of the variable-height inverted pendulum.

Linear feedback of a 4D divergent component of motion (spatial DCM plus
natural frequency), realized as best-effort pole placement solved by a
per-tick quadratic program, with a perfect-simulation harness comparing it
against standard DCM-eCMP feedback under lateral push impulses.
"""

from .admittance import (
    ForceMeasurement,
    measure_lambda,
    run_vertical_compliance,
    vertical_com_admittance,
)
from .controllers import (
    ControllerGains,
    ControlOutput,
    Measurement,
    SaturationFlags,
    build_vhip_qp,
    closed_loop_rates,
    fip_feedback,
    lip_feedback,
    vhip_feedback,
)
from .geometry import (
    ContactGeometry,
    DegenerateGeometryError,
    FeasibilityLimits,
    clamp_zmp,
    ecmp_to_zmp,
    lambda_bounds,
    omega_bounds,
    zmp_halfspaces,
)
from .models import (
    GRAVITY,
    DCMState,
    PendulumState,
    ReducedInput,
    ReferenceSetpoint,
    dcm,
    dcm_rates,
    fip_accel,
    gravity_vector,
    lip_accel,
    riccati_rate,
    vhip_accel,
)
from .qp import (
    ActiveSetSolver,
    QPProblem,
    QPSolution,
    RankDeficientError,
    kkt_residuals,
)
from .simulation import (
    BracketError,
    ComparisonReport,
    Impulse,
    Scenario,
    Trajectory,
    apply_impulse,
    compare_controllers,
    find_threshold,
    run_scenario,
    step,
)

__version__ = "0.1.0"
