"""Classical, probabilistic and quantum Cop-and-Robber games on reflexive digraphs."""

from .engine import (
    ControlledInit,
    GameError,
    GameModel,
    GameTrace,
    MoveContext,
    PrepareContext,
    Strategy,
    p_copwin_joint,
    p_copwin_probabilistic,
    p_copwin_separable,
    play,
    play_unfair_probabilistic,
    qc_initial_joint,
    qc_operation_joint,
)
from .graphs import (
    Digraph,
    GraphError,
    SpanningTree,
    complete_graph,
    copwin_value_tables,
    cycle_graph,
    digraph,
    directed_cycle,
    disjoint_union,
    dominating_set,
    is_connected,
    is_copwin_dismantle,
    is_corner,
    is_reversible,
    neighbors,
    path_graph,
    random_connected_graph,
    random_graph_with_universal_vertex,
    reverse_digraph,
    solve_copwin_game,
    spanning_tree,
    star_graph,
    support_ball,
    universal_vertex,
)
from .operators import (
    ATOL,
    ATOL_DERIVED,
    CertificationError,
    ControlledOp,
    GraphStochastic,
    GraphUnitary,
    OpReport,
    QuantumState,
    apply_sequence,
    basis_state,
    certify_stochastic,
    certify_unitary,
    constant_controlled_op,
    controlled_identity,
    controlled_op,
    cycle_unitary,
    gather_unitary,
    gather_unitary_c4,
    haar_unitary,
    identity_stochastic,
    identity_unitary,
    is_graph_preserving_stochastic,
    is_graph_preserving_unitary,
    joint_as_union_matrix,
    quantum_state,
    reach_sequence,
    sample_controlled_op,
    sample_graph_stochastic,
    sample_graph_unitary,
    sample_path3_unitary,
    state_vector,
    transposition_unitary,
    uniform_state,
)
from .scenario import (
    UNFAIR_MODEL,
    Scenario,
    controlled_op_from_json,
    controlled_op_to_json,
    graph_from_json,
    graph_to_json,
    operator_from_json,
    operator_to_json,
    run_scenario,
    scenario_from_json,
    scenario_to_json,
    state_from_json,
    state_to_json,
    trace_to_json,
)
from .strategies import (
    BUILTINS,
    build_strategy,
    c4_antipodal_evasion,
    c4_unfair_cop,
    classical_evader,
    classical_pursuit,
    dominating_set_sweep,
    uniform_spread,
    universal_vertex_catch,
)

__version__ = "0.1.0"
