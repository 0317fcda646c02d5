"""Graph-preserving operations: certification, gathers, reach chains, controlled blocks."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qpursuit import (
    ATOL,
    CertificationError,
    GraphError,
    GraphUnitary,
    QuantumState,
    apply_sequence,
    basis_state,
    certify_stochastic,
    certify_unitary,
    complete_graph,
    constant_controlled_op,
    controlled_identity,
    controlled_op,
    cycle_graph,
    cycle_unitary,
    digraph,
    directed_cycle,
    disjoint_union,
    gather_unitary,
    gather_unitary_c4,
    haar_unitary,
    identity_stochastic,
    identity_unitary,
    is_graph_preserving_stochastic,
    is_graph_preserving_unitary,
    joint_as_union_matrix,
    path_graph,
    quantum_state,
    random_connected_graph,
    reach_sequence,
    reverse_digraph,
    sample_controlled_op,
    sample_graph_stochastic,
    sample_graph_unitary,
    sample_path3_unitary,
    star_graph,
    state_vector,
    transposition_unitary,
    uniform_state,
)

# regression point for the 4-cycle collapse: polar amplitudes and free phases
C4_AMPS = (0.6, 0.3, 0.48, -0.2, 0.64, 1.1)
C4_PSI = 0.7
C4_ALPHA = -0.4

# all sixteen entries at the point above, frozen
C4_MATRIX = np.array([
    [-0.39616109515664555 + 0.27102838722961703j,
     0.59700249916681540 - 0.05990004998809694j,
     0.0,
     -0.58947903616184660 + 0.24922773907753620j],
    [0.59700249916681540 + 0.05990004998809694j,
     0.39616109515664555 + 0.27102838722961703j,
     0.48949899986207260 - 0.41229931983212226j,
     0.0],
    [0.0,
     0.48949899986207260 + 0.41229931983212226j,
     -0.39616109515664555 + 0.27102838722961703j,
     0.55263659640173100 + 0.23365100538519030j],
    [-0.58947903616184650 - 0.24922773907753634j,
     0.0,
     0.55263659640173100 - 0.23365100538519030j,
     0.39616109515664555 + 0.27102838722961703j],
])

# e^(i (k_c - psi)) = e^(0.4 i)
C4_IMAGE_PHASE = 0.9210609940028851 + 0.3894183423086505j


def test_quantum_state_roundtrip_and_validation():
    s = quantum_state([1.0, 0.0])
    assert isinstance(s, QuantumState) and s.dim == 2
    assert np.array_equal(state_vector(s), [1.0 + 0j, 0.0 + 0j])
    assert np.array_equal(state_vector([0, 1j]), [0, 1j])
    with pytest.raises(ValueError):
        quantum_state([1.0, 1.0])
    assert np.array_equal(basis_state(3, 1).amps, [0, 1, 0])
    assert np.allclose(uniform_state(4).amps, 0.5)


@pytest.mark.parametrize("g", [path_graph(3), cycle_graph(5), star_graph(4), directed_cycle(3)])
def test_identity_is_always_graph_preserving(g):
    assert is_graph_preserving_unitary(np.eye(g.n), g).ok
    assert is_graph_preserving_stochastic(np.eye(g.n), g).ok
    assert np.array_equal(identity_unitary(g).matrix, np.eye(g.n))
    assert np.array_equal(identity_stochastic(g).matrix, np.eye(g.n))


def test_unitary_check_reports_forbidden_entries():
    g = path_graph(3)
    swap02 = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=complex)
    report = is_graph_preserving_unitary(swap02, g)
    assert not report and not bool(report)
    assert report.residual <= ATOL  # it is unitary, just not on the right arcs
    assert {(w, v) for w, v, _ in report.violations} == {(0, 2), (2, 0)}
    assert all(mag == 1.0 for _, _, mag in report.violations)


def test_unitary_check_reports_residual():
    g = complete_graph(2)
    report = is_graph_preserving_unitary(0.5 * np.eye(2), g)
    assert not report.ok and report.violations == ()
    assert np.isclose(report.residual, 0.75)
    with pytest.raises(ValueError):
        is_graph_preserving_unitary(np.eye(3), g)


def test_stochastic_check_covers_all_defects():
    k3 = complete_graph(3)
    assert is_graph_preserving_stochastic(np.full((3, 3), 1 / 3), k3).ok
    # the same spreading matrix is illegal once arcs are missing
    report = is_graph_preserving_stochastic(np.full((4, 4), 0.25), cycle_graph(4))
    assert not report.ok and (2, 0, 0.25) in report.violations
    report = is_graph_preserving_stochastic(np.array([[0.5, 0], [0.4, 1]]), complete_graph(2))
    assert not report.ok and np.isclose(report.residual, 0.1)
    report = is_graph_preserving_stochastic(np.array([[1.5, 0], [-0.5, 1]]), complete_graph(2))
    assert not report.ok and np.isclose(report.residual, 0.5)
    report = is_graph_preserving_stochastic(np.eye(2) * (1 + 0.1j), complete_graph(2))
    assert not report.ok and np.isclose(report.residual, 0.1)
    assert is_graph_preserving_stochastic(np.eye(2) + 0j, complete_graph(2)).ok


def test_certify_raises_with_attached_report():
    g = path_graph(3)
    swap02 = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]])
    with pytest.raises(CertificationError) as err:
        certify_unitary(swap02, g)
    assert err.value.report.violations
    with pytest.raises(CertificationError):
        certify_stochastic(np.full((3, 3), 1 / 3), g)
    # the certified copy is decoupled from the caller's buffer
    m = np.eye(3, dtype=complex)
    u = certify_unitary(m, g)
    m[0, 0] = 5.0
    assert u.matrix[0, 0] == 1.0


def test_adjoint_certifies_against_reverse_graph():
    u = cycle_unitary(4, np.zeros(4))
    adj = u.adjoint()
    assert adj.graph == reverse_digraph(directed_cycle(4))
    assert np.allclose(adj.matrix, u.matrix.conj().T)
    assert np.allclose(adj.matrix @ u.matrix, np.eye(4))
    # on undirected graphs the adjoint lives on the same graph
    g = path_graph(3)
    v = gather_unitary(g, 0, 1, basis_state(3, 0), (0.0, 1.0))
    assert v.adjoint().graph == g
    assert np.allclose(v.adjoint().adjoint().matrix, v.matrix)


def test_gather_moves_block_amplitude():
    g = path_graph(3)
    phi = np.array([0.6, 0.8j, 0.0])
    u = gather_unitary(g, 0, 1, phi, (0.0, 1.0))
    out = u.apply(phi)
    assert np.allclose(out, [0.0, 1.0, 0.0], atol=1e-12)
    # partial gather keeps the untouched amplitude in place
    phi = uniform_state(3).amps
    s = np.hypot(abs(phi[0]), abs(phi[1]))
    out = gather_unitary(g, 0, 1, phi, (0.0, s)).apply(phi)
    assert np.allclose(out, [0.0, s, phi[2]], atol=1e-12)


def test_gather_zero_block_is_identity():
    g = path_graph(3)
    u = gather_unitary(g, 0, 1, basis_state(3, 2), (0.0, 0.0))
    assert np.array_equal(u.matrix, np.eye(3))


def test_gather_rejects_bad_requests():
    g = path_graph(3)
    phi = basis_state(3, 0)
    with pytest.raises(GraphError):
        gather_unitary(g, 0, 0, phi, (0.0, 1.0))
    with pytest.raises(GraphError):
        gather_unitary(g, 0, 2, phi, (0.0, 1.0))
    with pytest.raises(ValueError):
        gather_unitary(g, 0, 1, phi, (0.0, 0.5))
    loopless = digraph(2, [(0, 1)], undirected=True, reflexive=False)
    with pytest.raises(GraphError):
        gather_unitary(loopless, 0, 1, [1.0, 0.0], (0.0, 1.0))


def test_reach_path3_basis_to_basis():
    g = path_graph(3)
    ops = reach_sequence(g, basis_state(3, 0), basis_state(3, 2))
    assert len(ops) == 2
    out = apply_sequence(ops, basis_state(3, 0))
    assert abs(np.vdot(basis_state(3, 2).amps, out)) >= 1.0 - 1e-9
    for u in ops:
        assert is_graph_preserving_unitary(u.matrix, g).ok


def test_reach_trims_equal_states():
    g = cycle_graph(4)
    assert reach_sequence(g, uniform_state(4), uniform_state(4)) == []
    phi = uniform_state(4).amps * np.exp(0.3j)  # global phase is free
    assert reach_sequence(g, phi, uniform_state(4)) == []


def test_reach_path6_endpoint_takes_minimum_length():
    g = path_graph(6)
    ops = reach_sequence(g, basis_state(6, 0), basis_state(6, 5))
    assert len(ops) == 5
    out = apply_sequence(ops, basis_state(6, 0))
    assert abs(np.vdot(basis_state(6, 5).amps, out)) >= 1.0 - 1e-9


def test_reach_cycle4_uniform_to_basis():
    g = cycle_graph(4)
    ops = reach_sequence(g, uniform_state(4), basis_state(4, 1))
    assert 0 < len(ops) <= 2 * g.n - 2
    out = apply_sequence(ops, uniform_state(4))
    assert abs(np.vdot(basis_state(4, 1).amps, out)) >= 1.0 - 1e-9
    # a root on the target vertex spends nothing on the unfold half
    short = reach_sequence(g, uniform_state(4), basis_state(4, 1), root=1)
    assert len(short) == g.n - 1


def test_reach_random_instances_hold_bound_and_fidelity(rng):
    for _ in range(30):
        n = int(rng.integers(2, 10))
        g = random_connected_graph(n, rng)
        phi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        psi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        phi /= np.linalg.norm(phi)
        psi /= np.linalg.norm(psi)
        ops = reach_sequence(g, phi, psi)
        assert len(ops) <= 2 * n - 2
        cur = phi
        for u in ops:
            assert is_graph_preserving_unitary(u.matrix, g).ok
            cur = u.apply(cur)
            assert abs(np.linalg.norm(cur) - 1.0) < 1e-9
        assert abs(np.vdot(psi, cur)) >= 1.0 - 1e-9


def test_reach_preconditions():
    with pytest.raises(GraphError):
        reach_sequence(directed_cycle(3), basis_state(3, 0), basis_state(3, 1))
    with pytest.raises(GraphError):
        reach_sequence(digraph(2, [(0, 1)]), basis_state(2, 0), basis_state(2, 1))
    g = path_graph(3)
    with pytest.raises(ValueError):
        reach_sequence(g, basis_state(4, 0), basis_state(4, 1))
    with pytest.raises(ValueError):
        reach_sequence(g, [1.0, 1.0, 0.0], basis_state(3, 1))


def test_apply_sequence_empty_chain():
    phi = uniform_state(3)
    assert np.array_equal(apply_sequence([], phi), phi.amps)


def test_cycle_unitary_two_vertices():
    u = cycle_unitary(2, [0.0, np.pi])
    assert np.allclose(u.matrix, [[0, -1], [1, 0]], atol=1e-12)
    assert u.graph == directed_cycle(2)
    with pytest.raises(ValueError):
        cycle_unitary(3, [0.0, 0.0])


def test_transposition_unitary():
    g = path_graph(3)
    u = transposition_unitary(g, 0, 1)
    assert np.array_equal(u.matrix, [[0, 1, 0], [1, 0, 0], [0, 0, 1]])
    assert np.array_equal(transposition_unitary(g, 1, 1).matrix, np.eye(3))
    with pytest.raises(GraphError):
        transposition_unitary(g, 0, 2)


def test_directed_cycle_mixed_column_patterns_collide():
    # each column of a member may hit only rows {v, v+1}; whenever some
    # column steps and the next one stays, both land in the same row, so
    # any stay/step mix fails while the two pure patterns are members
    n = 5
    g = directed_cycle(n)
    for bits in range(2 ** n):
        rows = [(v + (bits >> v & 1)) % n for v in range(n)]
        m = np.zeros((n, n), dtype=complex)
        for v, r in enumerate(rows):
            m[r, v] = 1.0
        pure = bits in (0, 2 ** n - 1)
        assert (len(set(rows)) == n) == pure
        assert is_graph_preserving_unitary(m, g).ok == pure


def test_directed_cycle_members_keep_basis_states_basis():
    n = 4
    g = directed_cycle(n)
    rng = np.random.default_rng(7)
    state = basis_state(n, 0).amps
    for _ in range(12):
        phases = rng.uniform(0.0, 2.0 * np.pi, n)
        if rng.integers(2):
            u = certify_unitary(np.diag(np.exp(1j * phases)), g)
        else:
            u = cycle_unitary(n, phases)
        state = u.apply(state)
        assert np.isclose(np.max(np.abs(state)), 1.0)
    # so chains of members never build the uniform superposition
    assert abs(np.vdot(uniform_state(n).amps, state)) < 1.0 - 1e-9


def test_product_of_members_can_leave_the_set():
    g = path_graph(3)
    u1 = gather_unitary(g, 0, 1, basis_state(3, 0), (0.0, 1.0))
    u2 = gather_unitary(g, 1, 2, basis_state(3, 1), (0.0, 1.0))
    product = u2.matrix @ u1.matrix
    assert np.isclose(abs(product[2, 0]), 1.0)
    report = is_graph_preserving_unitary(product, g)
    assert not report.ok
    assert (2, 0) in {(w, v) for w, v, _ in report.violations}


def _c4_source_state(amps):
    ra, ka, rb, kb, rc, kc = amps
    return np.array([ra * np.exp(1j * ka), rb * np.exp(1j * kb), rc * np.exp(1j * kc), 0.0])


def test_c4_collapse_matrix_regression():
    u = gather_unitary_c4(C4_AMPS, C4_PSI, C4_ALPHA)
    assert u.graph == cycle_graph(4)
    assert np.allclose(u.matrix, C4_MATRIX, atol=1e-12)
    assert np.max(np.abs(u.matrix.conj().T @ u.matrix - np.eye(4))) <= 1e-12


def test_c4_collapse_sends_source_to_vertex_one():
    u = gather_unitary_c4(C4_AMPS, C4_PSI, C4_ALPHA)
    out = u.apply(_c4_source_state(C4_AMPS))
    assert np.allclose(out, [0.0, C4_IMAGE_PHASE, 0.0, 0.0], atol=1e-12)


def test_c4_collapse_fourth_column_image():
    ra, ka, rb, kb, rc, kc = C4_AMPS
    u = gather_unitary_c4(C4_AMPS, C4_PSI, C4_ALPHA)
    expected = np.array([
        -np.exp(-1j * (-ka + kc + C4_ALPHA)) * rc,
        0.0,
        np.exp(-1j * C4_ALPHA) * ra,
        np.exp(-1j * (kb - kc + C4_PSI)) * rb,
    ])
    assert np.allclose(u.matrix[:, 3], expected, atol=1e-12)
    frozen = np.array([-0.5894790361618466 + 0.2492277390775362j,
                       0.0,
                       0.5526365964017310 + 0.2336510053851903j,
                       0.3961610951566455 + 0.2710283872296170j])
    assert np.allclose(u.matrix[:, 3], frozen, atol=1e-12)


def test_c4_collapse_degenerate_and_default_phases():
    u = gather_unitary_c4((1.0, 0.5, 0.0, 0.0, 0.0, 0.0), C4_PSI)
    out = u.apply([np.exp(0.5j), 0.0, 0.0, 0.0])
    assert np.allclose(out, [0.0, np.exp(-1j * C4_PSI), 0.0, 0.0], atol=1e-12)
    amps = (0.6, 0.1, 0.8, -0.3, 0.0, 0.9)
    plain = gather_unitary_c4(amps)
    out = plain.apply(_c4_source_state(amps))
    assert np.allclose(out, [0.0, np.exp(1j * 0.9), 0.0, 0.0], atol=1e-12)


def test_c4_collapse_validates_norm():
    with pytest.raises(ValueError):
        gather_unitary_c4((0.6, 0.0, 0.48, 0.0, 0.9, 0.0))


def test_controlled_op_joint_layouts():
    g = complete_graph(2)
    x = transposition_unitary(g, 0, 1)
    op = controlled_op(g, [x, identity_unitary(g)], control="robber")
    expected = np.array([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], dtype=complex)
    assert np.array_equal(op.joint, expected)
    op = controlled_op(g, [x, identity_unitary(g)], control="cop")
    expected = np.array([[0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1]], dtype=complex)
    assert np.array_equal(op.joint, expected)
    assert all(isinstance(b, GraphUnitary) for b in op.blocks)


def test_controlled_op_accepts_callables_and_raw_matrices():
    g = path_graph(3)
    op = controlled_op(g, lambda v: np.eye(3), control="robber")
    assert np.array_equal(op.joint, np.eye(9))
    with pytest.raises(ValueError):
        controlled_op(g, {0: np.eye(3), 1: np.eye(3)}, control="robber")
    with pytest.raises(ValueError):
        controlled_op(g, [np.eye(3)] * 3, control="both")
    swap02 = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]])
    with pytest.raises(CertificationError):
        controlled_op(g, [swap02, np.eye(3), np.eye(3)], control="robber")


def test_controlled_identity_and_constant():
    g = cycle_graph(4)
    assert np.array_equal(controlled_identity(g, "cop").joint, np.eye(16))
    u = sample_graph_unitary(g, np.random.default_rng(3))
    op = constant_controlled_op(g, u, "robber")
    assert np.allclose(op.joint, np.kron(np.eye(4), u.matrix))


def test_controlled_joint_certifies_against_graph_copies(rng):
    for control in ("robber", "cop"):
        for _ in range(5):
            n = int(rng.integers(2, 6))
            g = random_connected_graph(n, rng)
            op = sample_controlled_op(g, rng, control)
            assert np.allclose(op.joint.conj().T @ op.joint, np.eye(n * n), atol=1e-9)
            stacked = joint_as_union_matrix(op)
            assert is_graph_preserving_unitary(stacked, disjoint_union(g, n)).ok


def test_haar_unitary_statistics(rng):
    u = haar_unitary(4, rng)
    assert np.allclose(u.conj().T @ u, np.eye(4), atol=1e-12)
    again = haar_unitary(4, np.random.default_rng(0))
    assert np.allclose(again, haar_unitary(4, np.random.default_rng(0)))


def test_sample_graph_unitary_certified(rng):
    for g in (path_graph(4), cycle_graph(5), star_graph(3), complete_graph(1)):
        for _ in range(5):
            u = sample_graph_unitary(g, rng)
            assert is_graph_preserving_unitary(u.matrix, g).ok


def test_sample_path3_unitary_branches(rng):
    zero_low, zero_high = 0, 0
    for _ in range(40):
        u = sample_path3_unitary(rng)
        assert is_graph_preserving_unitary(u.matrix, path_graph(3)).ok
        assert abs(u.matrix[1, 0]) * abs(u.matrix[1, 2]) == 0.0
        zero_low += u.matrix[1, 0] == 0.0
        zero_high += u.matrix[1, 2] == 0.0
    assert zero_low > 0 and zero_high > 0


def test_sample_graph_stochastic_certified(rng):
    for g in (path_graph(4), complete_graph(3)):
        m = sample_graph_stochastic(g, rng)
        assert is_graph_preserving_stochastic(m.matrix, g).ok
    with pytest.raises(GraphError):
        sample_graph_stochastic(digraph(2, [(0, 1)], reflexive=False), rng)


def test_sample_controlled_op(rng):
    op = sample_controlled_op(cycle_graph(4), rng, "robber")
    assert op.control == "robber" and len(op.blocks) == 4
    for b in op.blocks:
        assert is_graph_preserving_unitary(b.matrix, cycle_graph(4)).ok


@given(st.integers(min_value=0, max_value=10_000))
def test_sampled_operations_preserve_total_mass(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 8))
    g = random_connected_graph(n, rng)
    u = sample_graph_unitary(g, rng)
    vec = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    vec /= np.linalg.norm(vec)
    assert abs(np.linalg.norm(u.apply(vec)) - 1.0) < 1e-12
    assert np.allclose(u.adjoint().matrix @ u.matrix, np.eye(n), atol=1e-12)
    s = sample_graph_stochastic(g, rng)
    out = s.apply(rng.dirichlet(np.ones(n)))
    assert abs(out.sum() - 1.0) < 1e-12 and out.min() > -1e-15
