"""mink2d: numerical toolkit for 2-dimensional Minkowski (normed) planes."""

from .geometry import Vec2
from .norms import (
    ClassificationResult,
    IndeterminateClassification,
    NormError,
    NormSpace,
    NormSpec,
    boundary_point,
    classify,
    custom_spec,
    euclidean_spec,
    eval_norm,
    load_norm_spec,
    lp_spec,
    make_space,
    parse_norm_spec,
    polygon_spec,
    trig_perturbed_circle_spec,
)
from .natural_param import (
    BuildError,
    NaturalParam,
    NonSmoothSpaceError,
    UnitSpeedError,
    build_natural_param,
    eval_r,
    eval_r_prime,
    pushforward_param,
    write_samples_csv,
)
from .phase import (
    PhaseError,
    PhaseProfile,
    build_phase_profile,
    phase,
    phase_derivative,
    supercurvature,
    write_phase_csv,
)
from .chords import (
    ChordError,
    ChordFrameData,
    ExpansionReport,
    FixedPointError,
    FrameDegenerateError,
    WitnessReport,
    axis_params,
    chord_frame_data,
    chord_map,
    chord_sweep,
    expansion_report,
    mu_eta,
    mu_second_closed,
    mu_second_fd,
    nu,
    nu_derivatives_closed,
    nu_derivatives_fd,
    recover_phi_prime,
    special_direction_witness,
    write_expansion_csv,
)
from .isometries import (
    ExtensionCheck,
    IsometryError,
    LinearMap2,
    MazurUlamReport,
    SphereIsometry,
    antipodality_check,
    apply_many,
    load_isometry_spec,
    mazur_ulam_check,
    reconstruct_linear_extension,
    recover_param_line_isometry,
    verify_extension,
    verify_isometry,
)
from .diagnostics import (
    LipschitzScan,
    SmoothnessProxyReport,
    absolute_smoothness_proxy,
    lipschitz_scan,
    write_scans_csv,
)

__version__ = "0.1.0"
