"""Coherence and correlation measures for multi-qudit states.

Subpackages: ``qmat`` (dense operator core), ``measures`` (coherence,
basis-free coherence, discord, hierarchy), ``channels`` (incoherent
operations), ``gates`` (two-qubit coherence creation), ``multiparty``
(tripartite additivity), ``cli`` (command-line front end).

The optimizer inner loops run on a compiled extension when available; see
``qcoh.kernels.backend_name`` for the active backend.
"""

from .kernels import backend_name as kernel_backend
from .qmat import (
    DensityMatrix,
    LocalBasisAssignment,
    PureState,
    SubsystemShape,
    UnitaryMatrix,
    ValidationError,
    conjugate,
    dephase,
    eig_hermitian,
    entropy,
    partial_trace,
    random_state,
    random_unitary,
    relative_entropy,
    tensor,
)
from .measures import (
    HierarchyViolation,
    MeasureReport,
    OptimizerConfig,
    basis_free_coherence,
    coherence_l1,
    coherence_rel_entropy,
    discord_rel_entropy,
    entanglement_pure,
    hierarchy_check,
)
from .channels import (
    KrausSet,
    StructureMask,
    apply_channel,
    apply_selective,
    enumerate_structures,
    is_incoherent_kraus,
    monotonicity_suite,
    random_incoherent_kraus_set,
    structure_count,
)
from .gates import (
    CartanVector,
    DiagonalSpectrum,
    bell_diagonal_image_check,
    cartan_kernel,
    coherent_power,
    copt_kernel,
    copt_numeric,
    copt_one_side,
    copt_ordering,
    copt_two_side,
    hadamard_like,
    maximally_coherent_state,
)
from .multiparty import (
    SSABlock,
    SSABlockSpec,
    additivity_gap,
    counterexample_search,
    delta_decomposition,
    ghz_family,
    ssa_saturating_state,
    w_family,
)

__version__ = "0.1.0"
