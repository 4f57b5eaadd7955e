"""spincat: collective-spin dynamics generating cat states, squeezing and
multiple-cat fractional revivals from spin coherent states."""

from .boson import (
    BosonModelSpec,
    FockState,
    build_boson_hamiltonian,
    coherent_state,
    compare_spin_to_boson,
    default_cutoff,
)
from .dynamics import (
    ExcitationBlock,
    HamiltonianSpec,
    JointOperator,
    NonConservingOperatorError,
    Picture,
    Trajectory,
    build_hamiltonian,
    evolve,
    excitation_blocks,
    propagate,
    total_excitation_operator,
)
from .models import (
    ApproximationWarning,
    GaussCatPrediction,
    GeaComponentSpec,
    Regime,
    RevivalTimes,
    ansatz_evolve,
    combined_to_joint,
    fractional_revival_state,
    gauss_dft,
    gea_component,
    gea_superposition,
    oat_hamiltonian,
    revival_times,
    validity_window,
    verify_q_transform,
)
from .observables import (
    QFunctionField,
    SqueezingResult,
    expectation,
    fidelity,
    q_function,
    squeezing_kitagawa_ueda,
    variance,
)
from .spin import (
    CollectiveOperator,
    CollectiveSpinParams,
    DickeVector,
    JointState,
    OperatorKind,
    dicke_basis_state,
    inner_product,
    make_operator,
    product_state,
    rotated_dicke,
    scs_overlap,
    spin_coherent_state,
    spin_coherent_state_angles,
)

__version__ = "0.1.0"
