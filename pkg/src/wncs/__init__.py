"""Simulator and scheduling policies for multi-loop wireless networked control
sharing an erasure channel, with an AoI-indexed quadratic cost-offset metric."""

from .aoi import AoiTracker
from .channel import ErasureChannel
from .experiment import (
    PRESETS,
    DivergenceError,
    ExperimentConfig,
    ExperimentResult,
    SlotTrace,
    empiric_lq_cost,
    empiric_offset_cost,
    mean_and_se,
    preset_table1,
    preset_table2,
    run_simulation,
    sweep,
)
from .model import (
    NoiseSource,
    SubsystemSpec,
    closed_loop_matrix,
    control,
    state_after_misses,
    step_estimator,
    step_ideal,
    step_plant,
)
from .offset import (
    OffsetWeightTable,
    expected_estimation_error,
    offset_weight,
    state_offset_after_misses,
)
from .policies import POLICY_NAMES, make_policy

__version__ = "0.1.0"

__all__ = [
    "AoiTracker",
    "ErasureChannel",
    "PRESETS",
    "DivergenceError",
    "ExperimentConfig",
    "ExperimentResult",
    "SlotTrace",
    "empiric_lq_cost",
    "empiric_offset_cost",
    "mean_and_se",
    "preset_table1",
    "preset_table2",
    "run_simulation",
    "sweep",
    "NoiseSource",
    "SubsystemSpec",
    "closed_loop_matrix",
    "control",
    "state_after_misses",
    "step_estimator",
    "step_ideal",
    "step_plant",
    "OffsetWeightTable",
    "expected_estimation_error",
    "offset_weight",
    "state_offset_after_misses",
    "POLICY_NAMES",
    "make_policy",
    "__version__",
]
