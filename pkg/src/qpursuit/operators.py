"""Graph-preserving unitary and stochastic operations on the vertex space.

Matrix layout: column index = source vertex, row index = target vertex, so
the entry <w|M|v> sits at m[w, v] and graph preservation reads "m[w, v] = 0
whenever (v, w) is not an arc".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import (
    Digraph,
    GraphError,
    cycle_graph,
    directed_cycle,
    is_reversible,
    neighbors,
    path_graph,
    reverse_digraph,
    spanning_tree,
)

# Certification and fidelity tolerance for dense double precision at n <= 256.
ATOL = 1e-9
# Looser tolerance for inequalities derived from certified quantities.
ATOL_DERIVED = 1e-8
# Below this block norm a gather rotation is underdetermined and we keep identity.
_ZERO_BLOCK = 1e-12
# Amplitudes below this carry nothing worth a gather step.
_SKIP = 1e-14


class CertificationError(ValueError):
    """A matrix failed unitarity/stochasticity or the graph zero pattern."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class OpReport:
    """Outcome of a certification check.

    violations lists forbidden entries as (row, col, magnitude); residual is
    the unitarity defect (or the worst column-sum/negativity defect for
    stochastic checks).
    """

    ok: bool
    violations: tuple
    residual: float
    kind: str

    def __bool__(self):
        return self.ok


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Normalized complex amplitude vector over vertices (or vertex pairs)."""

    amps: np.ndarray

    @property
    def dim(self) -> int:
        return self.amps.shape[0]


def quantum_state(amps, tau: float = ATOL) -> QuantumState:
    a = np.asarray(amps, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(a) - 1.0) > tau:
        raise ValueError("state vector is not normalized")
    return QuantumState(a)


def basis_state(n: int, v: int) -> QuantumState:
    a = np.zeros(n, dtype=complex)
    a[v] = 1.0
    return QuantumState(a)


def uniform_state(n: int) -> QuantumState:
    return QuantumState(np.full(n, 1.0 / np.sqrt(n), dtype=complex))


def state_vector(x) -> np.ndarray:
    """Plain complex vector from a QuantumState or array-like."""
    if isinstance(x, QuantumState):
        return x.amps
    return np.asarray(x, dtype=complex).reshape(-1)


@dataclass(frozen=True, eq=False)
class GraphUnitary:
    """Unitary certified against a graph's zero pattern."""

    matrix: np.ndarray
    graph: Digraph

    def apply(self, state) -> np.ndarray:
        return self.matrix @ state_vector(state)

    def adjoint(self) -> "GraphUnitary":
        """Hermitian transpose, certified against the reverse graph."""
        return certify_unitary(self.matrix.conj().T, reverse_digraph(self.graph))


@dataclass(frozen=True, eq=False)
class GraphStochastic:
    """Column-stochastic matrix certified against a graph's zero pattern."""

    matrix: np.ndarray
    graph: Digraph

    def apply(self, dist) -> np.ndarray:
        return self.matrix @ np.asarray(dist, dtype=float)


def _allowed_mask(g: Digraph) -> np.ndarray:
    # allowed[w, v] iff (v, w) is an arc
    return g.adjacency().T


def is_graph_preserving_unitary(m, g: Digraph, tau: float = ATOL) -> OpReport:
    """Unitarity within tau plus zeros on all non-arcs, with a violation report."""
    m = np.asarray(m, dtype=complex)
    if m.shape != (g.n, g.n):
        raise ValueError(f"matrix shape {m.shape} does not match graph size {g.n}")
    residual = float(np.max(np.abs(m.conj().T @ m - np.eye(g.n))))
    bad = (np.abs(m) > tau) & ~_allowed_mask(g)
    violations = tuple(
        (int(w), int(v), float(abs(m[w, v]))) for w, v in zip(*np.nonzero(bad))
    )
    return OpReport(residual <= tau and not violations, violations, residual, "unitary")


def is_graph_preserving_stochastic(m, g: Digraph, tau: float = ATOL) -> OpReport:
    """Column-stochastic within tau plus zeros on all non-arcs."""
    m = np.asarray(m)
    if m.shape != (g.n, g.n):
        raise ValueError(f"matrix shape {m.shape} does not match graph size {g.n}")
    if np.iscomplexobj(m):
        if np.max(np.abs(m.imag)) > tau:
            return OpReport(False, (), float(np.max(np.abs(m.imag))), "stochastic")
        m = m.real
    m = m.astype(float)
    defect = float(np.max(np.abs(m.sum(axis=0) - 1.0)))
    negativity = float(max(0.0, -m.min())) if m.size else 0.0
    residual = max(defect, negativity)
    bad = (np.abs(m) > tau) & ~_allowed_mask(g)
    violations = tuple(
        (int(w), int(v), float(abs(m[w, v]))) for w, v in zip(*np.nonzero(bad))
    )
    return OpReport(residual <= tau and not violations, violations, residual, "stochastic")


def certify_unitary(m, g: Digraph, tau: float = ATOL) -> GraphUnitary:
    report = is_graph_preserving_unitary(m, g, tau)
    if not report:
        raise CertificationError(
            f"matrix is not a graph-preserving unitary: residual={report.residual:.3e}, "
            f"{len(report.violations)} forbidden entries",
            report,
        )
    return GraphUnitary(np.asarray(m, dtype=complex).copy(), g)


def certify_stochastic(m, g: Digraph, tau: float = ATOL) -> GraphStochastic:
    report = is_graph_preserving_stochastic(m, g, tau)
    if not report:
        raise CertificationError(
            f"matrix is not a graph-preserving stochastic operation: "
            f"residual={report.residual:.3e}, {len(report.violations)} forbidden entries",
            report,
        )
    return GraphStochastic(np.asarray(m, dtype=float).copy(), g)


def identity_unitary(g: Digraph) -> GraphUnitary:
    return certify_unitary(np.eye(g.n, dtype=complex), g)


def identity_stochastic(g: Digraph) -> GraphStochastic:
    return certify_stochastic(np.eye(g.n), g)


def gather_unitary(g: Digraph, v: int, w: int, phi, target, tau: float = ATOL) -> GraphUnitary:
    """Identity outside {v, w}, and on that block a rotation taking phi's part to target.

    Needs both arcs (v, w) and (w, v) plus all loops, so the embedded
    rotation and the untouched identity part are both legal.  A zero-norm
    block leaves the rotation underdetermined and yields the identity.
    """
    if v == w:
        raise GraphError("gather needs two distinct vertices")
    if (v, w) not in g.arcs or (w, v) not in g.arcs:
        raise GraphError(f"vertices {v} and {w} are not mutually adjacent")
    if not g.is_reflexive:
        raise GraphError("gather needs a reflexive graph")
    amps = state_vector(phi)
    a = np.array([amps[v], amps[w]], dtype=complex)
    b = np.array([target[0], target[1]], dtype=complex)
    sa = float(np.linalg.norm(a))
    sb = float(np.linalg.norm(b))
    if abs(sa * sa - sb * sb) > tau:
        raise ValueError(f"gather norms differ: |source|^2={sa * sa:.3e}, |target|^2={sb * sb:.3e}")
    m = np.eye(g.n, dtype=complex)
    if sa > _ZERO_BLOCK:
        ua = a / sa
        ub = b / sb
        ua_perp = np.array([-ua[1].conj(), ua[0].conj()])
        ub_perp = np.array([-ub[1].conj(), ub[0].conj()])
        m[np.ix_([v, w], [v, w])] = np.outer(ub, ua.conj()) + np.outer(ub_perp, ua_perp.conj())
    return certify_unitary(m, g, tau)


def _gather_chain(tree_graph: Digraph, tree, vec: np.ndarray, tau: float):
    """Fold vec into the tree root; returns the gathers and the folded vector."""
    cur = vec.astype(complex).copy()
    ops = []
    for v in tree.order[:-1]:
        w = tree.parent[v]
        if abs(cur[v]) <= _SKIP:
            continue
        s = float(np.hypot(abs(cur[v]), abs(cur[w])))
        u = gather_unitary(tree_graph, v, w, cur, (0.0, s), tau)
        cur = u.apply(cur)
        ops.append(u)
    return ops, cur


def reach_sequence(g: Digraph, phi, psi, root: int = 0, tau: float = ATOL) -> list:
    """Certified operator chain of length <= 2n - 2 mapping phi to psi up to global phase.

    Phase 1 walks the spanning-tree order gathering all of phi's amplitude
    into the root; phase 2 is the reversed adjoint chain of the same
    construction run for psi.  Gathers over blocks carrying no amplitude are
    dropped, so equal states yield an empty chain.
    """
    a = state_vector(phi)
    b = state_vector(psi)
    if a.shape != (g.n,) or b.shape != (g.n,):
        raise ValueError("state dimension does not match the graph")
    for vec in (a, b):
        if abs(np.linalg.norm(vec) - 1.0) > tau:
            raise ValueError("reach needs normalized states")
    if not g.is_reflexive:
        raise GraphError("reach needs a reflexive graph")
    if not is_reversible(g):
        raise GraphError("reach needs a reversible graph")
    tree = spanning_tree(g, root)
    if abs(np.vdot(b, a)) >= 1.0 - tau:
        return []
    tree_graph = tree.as_digraph()
    forward, _ = _gather_chain(tree_graph, tree, a, tau)
    backward, _ = _gather_chain(tree_graph, tree, b, tau)
    return forward + [u.adjoint() for u in reversed(backward)]


def apply_sequence(ops, state) -> np.ndarray:
    cur = state_vector(state).copy()
    for u in ops:
        cur = u.apply(cur)
    return cur


def cycle_unitary(n: int, phases) -> GraphUnitary:
    """Phased clockwise shift sum_i e^(i a_i)|i+1><i| on the reflexive directed n-cycle."""
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (n,):
        raise ValueError(f"need {n} phases, got shape {phases.shape}")
    m = np.zeros((n, n), dtype=complex)
    for i in range(n):
        m[(i + 1) % n, i] = np.exp(1j * phases[i])
    return certify_unitary(m, directed_cycle(n))


def transposition_unitary(g: Digraph, v: int, w: int) -> GraphUnitary:
    """Swap of two mutually adjacent vertices, identity elsewhere; v == w gives identity."""
    if v == w:
        return identity_unitary(g)
    if (v, w) not in g.arcs or (w, v) not in g.arcs:
        raise GraphError(f"transposition needs mutually adjacent vertices, got {v}, {w}")
    m = np.eye(g.n, dtype=complex)
    m[v, v] = m[w, w] = 0.0
    m[v, w] = m[w, v] = 1.0
    return certify_unitary(m, g)


def gather_unitary_c4(amplitudes, psi: float = 0.0, alpha: float = 0.0,
                      tau: float = ATOL) -> GraphUnitary:
    """4x4 unitary on the reflexive 4-cycle collapsing a three-vertex superposition onto |1>.

    amplitudes = (r_a, k_a, r_b, k_b, r_c, k_c) is the polar form of the
    source state r_a e^(i k_a)|0> + r_b e^(i k_b)|1> + r_c e^(i k_c)|2>,
    with r_a^2 + r_b^2 + r_c^2 = 1.  The image of that state is
    e^(i (k_c - psi))|1>; alpha is a free phase on the complementary block.
    """
    ra, ka, rb, kb, rc, kc = (float(x) for x in amplitudes)
    if abs(ra * ra + rb * rb + rc * rc - 1.0) > tau:
        raise ValueError("source amplitudes must have unit norm")

    def e(x):
        return np.exp(1j * x)

    m = np.array(
        [
            [-e(kb - kc + psi) * rb, e(ka - kc + psi) * ra, 0.0,
             e(-(-ka + kc + alpha + np.pi)) * rc],
            [e(-(ka - kc + psi)) * ra, e(-(kb - kc + psi)) * rb, e(-psi) * rc, 0.0],
            [0.0, e(psi) * rc, -e(kb - kc + psi) * rb, e(-alpha) * ra],
            [-e(-(ka - kc - alpha)) * rc, 0.0, e(alpha) * ra, e(-(kb - kc + psi)) * rb],
        ],
        dtype=complex,
    )
    return certify_unitary(m, cycle_graph(4), tau)


@dataclass(frozen=True, eq=False)
class ControlledOp:
    """Two-register operator applying a block unitary chosen by the other register.

    The joint layout is robber-major: index r * n + c.  control='robber'
    means the robber register selects the block acting on the cop register
    (a Cop move); control='cop' is the mirror image (a Robber move).
    """

    blocks: tuple
    control: str
    graph: Digraph
    joint: np.ndarray


def controlled_op(g: Digraph, assignment, control: str) -> ControlledOp:
    """Block operator sum_v |v><v| (x) U(v) with every block certified against g."""
    if control not in ("cop", "robber"):
        raise ValueError("control must be 'cop' or 'robber'")
    blocks = []
    for v in range(g.n):
        try:
            u = assignment(v) if callable(assignment) else assignment[v]
        except (KeyError, IndexError):
            raise ValueError(f"assignment misses vertex {v}") from None
        if not isinstance(u, GraphUnitary):
            u = certify_unitary(u, g)
        elif u.matrix.shape != (g.n, g.n):
            raise ValueError(f"block for vertex {v} has wrong size")
        blocks.append(u)
    n = g.n
    joint = np.zeros((n * n, n * n), dtype=complex)
    for v, u in enumerate(blocks):
        sel = np.zeros((n, n))
        sel[v, v] = 1.0
        if control == "robber":
            joint += np.kron(sel, u.matrix)
        else:
            joint += np.kron(u.matrix, sel)
    return ControlledOp(tuple(blocks), control, g, joint)


def constant_controlled_op(g: Digraph, u: GraphUnitary, control: str) -> ControlledOp:
    return controlled_op(g, [u] * g.n, control)


def controlled_identity(g: Digraph, control: str) -> ControlledOp:
    return constant_controlled_op(g, identity_unitary(g), control)


def joint_as_union_matrix(op: ControlledOp) -> np.ndarray:
    """The joint matrix reindexed so the control register enumerates graph copies.

    In this layout a controlled operation is block-diagonal and certifiable
    against disjoint_union(g, n).
    """
    n = op.graph.n
    if op.control == "robber":
        return op.joint
    perm = np.arange(n * n).reshape(n, n).T.reshape(-1)
    return op.joint[np.ix_(perm, perm)]


def haar_unitary(dim: int, rng) -> np.ndarray:
    """Haar-distributed unitary via phase-fixed QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def sample_graph_unitary(g: Digraph, rng, tau: float = ATOL) -> GraphUnitary:
    """Random certified member: a Haar 2x2 block on a random edge times diagonal phases."""
    if not g.is_reflexive:
        raise GraphError("sampler needs a reflexive graph")
    edges = sorted({(u, v) for u, v in g.arcs if u < v and (v, u) in g.arcs})
    m = np.eye(g.n, dtype=complex)
    if edges:
        u, v = edges[int(rng.integers(len(edges)))]
        m[np.ix_([u, v], [u, v])] = haar_unitary(2, rng)
    m = np.diag(np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, g.n))) @ m
    return certify_unitary(m, g, tau)


def sample_path3_unitary(rng) -> GraphUnitary:
    """Random member over the path 0-1-2: one forced-zero branch plus a Haar block.

    Column orthogonality on the path's zero pattern forces U[1,0] = 0 or
    U[1,2] = 0; each branch then splits into a lone phase and a free 2x2
    block, and the sampler draws both branches.
    """
    h = haar_unitary(2, rng)
    phase = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
    m = np.zeros((3, 3), dtype=complex)
    if rng.integers(2):
        m[0, 0] = phase
        m[1:, 1:] = h
    else:
        m[:2, :2] = h
        m[2, 2] = phase
    return certify_unitary(m, path_graph(3))


def sample_graph_stochastic(g: Digraph, rng, tau: float = ATOL) -> GraphStochastic:
    """Random column distributions, each supported on its vertex's out-neighbourhood."""
    m = np.zeros((g.n, g.n))
    for v in range(g.n):
        targets = sorted(neighbors(g, v))
        if not targets:
            raise GraphError(f"vertex {v} has no out-neighbours")
        m[targets, v] = rng.dirichlet(np.ones(len(targets)))
    return certify_stochastic(m, g, tau)


def sample_controlled_op(g: Digraph, rng, control: str, tau: float = ATOL) -> ControlledOp:
    return controlled_op(g, [sample_graph_unitary(g, rng, tau) for _ in range(g.n)], control)
