"""Torus n-point reduction: oracle traces, recursion steps, coboundaries."""

from .coboundary import (
    VARIANTS,
    FunctionFamily,
    ProbeResult,
    StageContribution,
    chain_condition_residual,
    coboundary_apply,
    cohomology_probe,
    oracle_family,
    reduction_family,
    sample_grid,
    stage_contributions,
)
from .identities import (
    identity_rec1,
    identity_v0_sum,
    identity_zero_res,
    kz_residual,
)
from .steps import (
    StepResult,
    StepTerm,
    reduce_full,
    reduce_negative_mode,
    reduce_step,
)
from .types import (
    Branch,
    BranchSelector,
    CoefficientLedger,
    JacobiParams,
    LedgerTerm,
    NPointRequest,
    element_weight_charge,
    npoint_oracle,
    specfun_kernel,
    vacuum_module,
)

__all__ = [
    "VARIANTS",
    "FunctionFamily",
    "ProbeResult",
    "StageContribution",
    "chain_condition_residual",
    "coboundary_apply",
    "cohomology_probe",
    "oracle_family",
    "reduction_family",
    "sample_grid",
    "stage_contributions",
    "identity_rec1",
    "identity_v0_sum",
    "identity_zero_res",
    "kz_residual",
    "StepResult",
    "StepTerm",
    "reduce_full",
    "reduce_negative_mode",
    "reduce_step",
    "Branch",
    "BranchSelector",
    "CoefficientLedger",
    "JacobiParams",
    "LedgerTerm",
    "NPointRequest",
    "element_weight_charge",
    "npoint_oracle",
    "specfun_kernel",
    "vacuum_module",
]
