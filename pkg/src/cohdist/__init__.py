"""Approximate coherence distillation under strictly incoherent operations."""

from cohdist.errors import CohDistError
from cohdist.states import (
    DEFAULT_TOL,
    DensityMatrix,
    KrausSet,
    PureState,
    PureStateEnsemble,
    ToleranceConfig,
    apply_channel,
    apply_stochastic,
    classify_kraus,
    dephase,
    fidelity_general,
    fidelity_pure_mixed,
    fidelity_pure_pure,
    validate_density,
)
from cohdist.majorization import (
    majorizes,
    pure_to_ensemble_feasible,
    pure_to_pure_feasible,
    tail_sums,
)
from cohdist.subspaces import (
    comparison_matrix,
    decompose,
    pure_blocks,
    verify_block_purity,
)
from cohdist.transform import (
    check_transformation,
    ensemble_average_fidelity,
    ensemble_collapse,
    find_feasible_partition,
    incoherent_unitary_align,
)
from cohdist.distill import can_reach, distill_mixed, distill_pure, p_max

__version__ = "0.1.0"

__all__ = [
    "CohDistError",
    "DEFAULT_TOL",
    "DensityMatrix",
    "KrausSet",
    "PureState",
    "PureStateEnsemble",
    "ToleranceConfig",
    "apply_channel",
    "apply_stochastic",
    "can_reach",
    "check_transformation",
    "classify_kraus",
    "comparison_matrix",
    "decompose",
    "dephase",
    "distill_mixed",
    "distill_pure",
    "ensemble_average_fidelity",
    "ensemble_collapse",
    "fidelity_general",
    "fidelity_pure_mixed",
    "fidelity_pure_pure",
    "find_feasible_partition",
    "incoherent_unitary_align",
    "majorizes",
    "p_max",
    "pure_blocks",
    "pure_to_ensemble_feasible",
    "pure_to_pure_feasible",
    "tail_sums",
    "validate_density",
    "verify_block_purity",
]
