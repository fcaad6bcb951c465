"""Maximal output p-norms of completely positive maps and their
multiplicativity on tensor products."""

__version__ = "0.1.0"

from .channels import (
    Channel,
    NotCompletelyPositiveError,
    adjoint_channel,
    channel_from_dict,
    channel_from_linear_map,
    channel_to_dict,
    choi_of,
    compose,
    identity_channel,
    is_cp,
    is_tp,
    is_unital,
    kraus_from_choi,
    superop_matrix,
    tensor_channel,
)
from .conditions import (
    FormParams,
    check_postr,
    choi_entrywise_nonneg,
    condition_matrix,
    recognize_form,
    search_basis,
    transform_condition_matrix,
)
from .experiments import (
    bell_crossing,
    bell_crossing_bracket,
    condition_family_pairs,
    rows_to_csv,
    run_condition_batch,
    sweep,
)
from .linalg import (
    block_compose,
    block_decompose,
    is_psd,
    matrix_unit,
    partial_trace,
    schatten_norm,
)
from .norms import (
    OptimizerConfig,
    bell_obstruction,
    bell_witness_ratio,
    mult_ratio,
    norm_2_to_2_exact,
    norm_q_to_p,
    nu_p,
    singular_basis,
    top_singular_operator,
)
from .qubit import (
    QubitMapParams,
    bloch_compose,
    bloch_decompose,
    canonical_channel,
    canonicalize,
    eig_AdaggerA_closed,
    eig_PhiA_closed,
    eig_PhiA_general,
    trace_norm_sq_closed,
    traceless_ratio,
    qubit_channel,
    qubit_map_params,
    verify_strong_inequality,
)
from .zoo import (
    ZooSpec,
    convex_mixture,
    depolarizing,
    diagonal_map,
    extreme_cp,
    form_map,
    parse_zoo_spec,
    qc_map,
    qubit_canonical,
    random_channel,
    werner_holevo,
)
