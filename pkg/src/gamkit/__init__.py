"""Golden angle modulation: constellation builders, AWGN mutual information,
radius optimisation and symbol-level link simulation."""

from .constellation import (
    GOLDEN_ANGLE_RAD,
    PHI_FRAC,
    Constellation,
    Scheme,
    build,
    build_disc_gam,
    build_gb_gam_hr,
    build_psk,
    build_qam,
    dc_offset,
    golden_angle_phase,
    load_json,
    remove_dc,
    save_json,
    with_radii,
)
from .metrics import MetricReport, entropy_bits, min_distance, report
from .mi import ChannelSpec, MiEstimate, mi_grid, mi_monte_carlo, mi_sweep, shannon_capacity
from .optimize import G1Problem, G1Result, solve_g1

__version__ = "0.1.0"
