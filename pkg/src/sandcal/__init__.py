"""sandcal: calibration of the sand-hypoplasticity law against
oedometer and drained-triaxial test data with a real-coded GA."""

from .constitutive import (
    SHParameters,
    SoilState,
    StateRate,
    VoidRatioLimits,
    barotropy_a,
    flow_coefficients,
    pyknotropy_fd,
    rate_oe,
    rate_td,
    stiffness_fs,
    void_ratio_limits,
)
from .cost import (
    CostBreakdown,
    cost_total,
    delta_plane,
    evaluate_population,
    point_polyline_distance,
    scale_oe,
    scale_td,
)
from .io_config import LoadedRun, OutputBundle, load_inputs, write_outputs
from .optimizer import (
    GAConfig,
    RunResult,
    SearchDomain,
    init_population,
    mutation_schedule,
    run,
    triangular_sample,
    update_population,
)
from .simulator import (
    ResponseCurve,
    TestCase,
    elaborate_td,
    integrate,
    integrate_population,
    integration_time_oe,
    integration_time_td,
)

__version__ = "0.1.0"
