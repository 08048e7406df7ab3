"""Near-field multiuser MIMO beamforming simulation library."""

from .channel import (
    PathComponent,
    Scenario,
    UserChannel,
    make_user_channel,
    random_scenario,
    received_signal,
    scenario_from_json,
    scenario_to_json,
    synthesize_channel,
)
from .codebook import (
    AuxiliaryGrid,
    CodewordIndex,
    PolarCodebook,
    approximate_channel_matrices,
    auxiliary_points,
    beam_sweep,
    build_codebook,
    export_codebook_csv,
)
from .geometry import (
    ArrayConfig,
    CartesianCoord,
    PolarCoord,
    cartesian_to_polar,
    element_distance,
    element_distances,
    farfield_steering,
    nearfield_steering,
    polar_to_cartesian,
    rayleigh_distance,
)
from .harness import (
    BeamPatternResult,
    ExperimentSpec,
    ResultRow,
    ResultTable,
    run_beam_pattern,
    run_experiment,
    spec_from_dict,
)
from .hbf import (
    EffectiveChannel,
    HybridBeamformer,
    SingularEffectiveChannelError,
    WMMSEReport,
    analog_beam_steering,
    effective_channel,
    hbf_wmmse,
    hbf_zf,
)
from .metrics import (
    BeamformerMatrix,
    PowerModel,
    achievable_rate,
    beam_gain,
    beam_pattern_grid,
    energy_efficiency,
    noise_from_snr,
    sinr,
    slnr,
    sum_rate,
    total_power,
)
from .mm import (
    MMConfig,
    MMReport,
    aobf_imperfect_csi,
    aobf_perfect_csi,
    imperfect_objective,
    mm_update_imperfect,
    mm_update_perfect,
    slnr_objective,
)
from .selftest import run_selftest

__version__ = "0.1.0"

__all__ = [
    "PathComponent",
    "Scenario",
    "UserChannel",
    "make_user_channel",
    "random_scenario",
    "received_signal",
    "scenario_from_json",
    "scenario_to_json",
    "synthesize_channel",
    "AuxiliaryGrid",
    "CodewordIndex",
    "PolarCodebook",
    "approximate_channel_matrices",
    "auxiliary_points",
    "beam_sweep",
    "build_codebook",
    "export_codebook_csv",
    "ArrayConfig",
    "CartesianCoord",
    "PolarCoord",
    "cartesian_to_polar",
    "element_distance",
    "element_distances",
    "farfield_steering",
    "nearfield_steering",
    "polar_to_cartesian",
    "rayleigh_distance",
    "BeamPatternResult",
    "ExperimentSpec",
    "ResultRow",
    "ResultTable",
    "run_beam_pattern",
    "run_experiment",
    "spec_from_dict",
    "EffectiveChannel",
    "HybridBeamformer",
    "SingularEffectiveChannelError",
    "WMMSEReport",
    "analog_beam_steering",
    "effective_channel",
    "hbf_wmmse",
    "hbf_zf",
    "BeamformerMatrix",
    "PowerModel",
    "achievable_rate",
    "beam_gain",
    "beam_pattern_grid",
    "energy_efficiency",
    "noise_from_snr",
    "sinr",
    "slnr",
    "sum_rate",
    "total_power",
    "MMConfig",
    "MMReport",
    "aobf_imperfect_csi",
    "aobf_perfect_csi",
    "imperfect_objective",
    "mm_update_imperfect",
    "mm_update_perfect",
    "slnr_objective",
    "run_selftest",
    "__version__",
]
