"""Builtin strategies: the constructions each game model is analysed with."""

from __future__ import annotations

import numpy as np

from .engine import (
    ControlledInit,
    GameError,
    GameModel,
    MoveContext,
    Strategy,
    qc_initial_joint,
    qc_operation_joint,
    _move_source,
)
from .graphs import (
    Digraph,
    GraphError,
    copwin_value_tables,
    cycle_graph,
    dominating_set,
    neighbors,
    solve_copwin_game,
    universal_vertex,
)
from .operators import (
    ATOL,
    certify_unitary,
    controlled_op,
    gather_unitary_c4,
    identity_unitary,
    transposition_unitary,
)


def uniform_spread(g: Digraph) -> Strategy:
    """Uniform initial state with identity moves; pins p_copwin at 1/n from either side."""
    return Strategy(init="uniform", move=None, name="uniform_spread")


def universal_vertex_catch(g: Digraph, vertex: int = None) -> Strategy:
    """Cop plan for the quantum controlled game on a graph with a universal vertex.

    Start on the universal vertex and, in round one, swap with whatever the
    robber register holds; the joint state lands on the diagonal and the
    capture probability is 1 whatever separable state the Robber chose.
    """
    hub = universal_vertex(g) if vertex is None else int(vertex)
    if hub is None:
        raise GraphError("graph has no universal vertex")
    if neighbors(g, hub) != set(range(g.n)):
        raise GraphError(f"vertex {hub} is not universal")
    entangler = controlled_op(g, [transposition_unitary(g, v, hub) for v in range(g.n)],
                              control="robber")

    def move(ctx):
        return entangler if ctx.round == 1 else None

    return Strategy(init=hub, move=move, role="cop", model=GameModel.QUANTUM_CONTROLLED,
                    name="universal_vertex_catch", params={"vertex": hub})


def _require_c4(g: Digraph):
    if g != cycle_graph(4):
        raise GraphError("this strategy is specific to the reflexive 4-cycle on vertices 0..3")


def _rotation_permutation(shift: int) -> np.ndarray:
    p = np.zeros((4, 4))
    for j in range(4):
        p[(j + shift) % 4, j] = 1.0
    return p


def _recentred_collapse(g: Digraph, amps: np.ndarray, target: int) -> "GraphUnitary":
    """Certified unitary sending the normalized amps (supported off target+2) onto |target>.

    amps must live on the closed neighbourhood of target; the collapse matrix
    is written for target 1 and conjugated by the cycle rotation that moves 1
    onto the requested target.
    """
    shift = (target - 1) % 4
    dd = np.array([amps[(j + shift) % 4] for j in range(4)])
    trio = np.linalg.norm(dd[:3])
    params = (
        abs(dd[0]) / trio, float(np.angle(dd[0])),
        abs(dd[1]) / trio, float(np.angle(dd[1])),
        abs(dd[2]) / trio, float(np.angle(dd[2])),
    )
    base = gather_unitary_c4(params, 0.0, 0.0)
    rot = _rotation_permutation(shift)
    return certify_unitary(rot @ base.matrix @ rot.T, g)


class _AntipodalEvasion:
    """Robber bookkeeping for the 4-cycle: keep the joint state on pairs (i, i+2).

    The strategy knows only the round number during play, so it replays the
    Cop's declared operations on a private copy of the joint state; the Cop's
    move callback must therefore be a pure function of the round index.
    """

    def __init__(self, g: Digraph):
        self.g = g
        self.opponent = None
        self.shadow = None
        self.next_round = 1
        self.ops = {}

    def prepare(self, ctx):
        self.opponent = ctx.opponent
        self.rounds = ctx.rounds
        self.shadow = qc_initial_joint(self.g, ctx.opponent, self.strategy)
        self.next_round = 1
        self.ops = {}

    def _respond(self):
        joint = self.shadow.reshape(4, 4)
        blocks = []
        for c in range(4):
            conditional = joint[:, c].copy()
            weight = np.linalg.norm(conditional)
            if weight <= 1e-12:
                blocks.append(identity_unitary(self.g))
                continue
            conditional /= weight
            if abs(conditional[c]) > ATOL:
                raise GameError(
                    "cop amplitude reached the robber's vertex: the conditional state "
                    "left the expected neighbourhood, which signals an illegal cop move"
                )
            blocks.append(_recentred_collapse(self.g, conditional, (c + 2) % 4))
        return controlled_op(self.g, blocks, control="cop")

    def _advance(self, upto: int):
        opp_move = _move_source(self.opponent)
        while self.next_round <= upto:
            k = self.next_round
            cop_op = opp_move(MoveContext(k, "cop", self.g, self.rounds))
            self.shadow = qc_operation_joint(cop_op, self.g, "cop") @ self.shadow
            mine = self._respond()
            self.ops[k] = mine
            self.shadow = mine.joint @ self.shadow
            self.next_round += 1

    def move(self, ctx):
        if self.opponent is None:
            raise GameError("antipodal evasion needs the pre-game prepare step")
        self._advance(ctx.round)
        return self.ops[ctx.round]


def c4_antipodal_evasion(g: Digraph) -> Strategy:
    """Robber plan on the reflexive 4-cycle that keeps capture probability at zero.

    The initial preparation entangles antipodally (cop at v, robber at v+2).
    After each Cop move the conditional robber states sit on the neighbourhood
    of the antipode, and a re-centred collapse restores the antipodal form.
    """
    _require_c4(g)
    plan = _AntipodalEvasion(g)
    chi = np.zeros((4, 4), dtype=complex)
    for v in range(4):
        chi[(v + 2) % 4, v] = 1.0
    strategy = Strategy(init=ControlledInit(chi), move=plan.move, prepare=plan.prepare,
                        role="robber", model=GameModel.QUANTUM_CONTROLLED,
                        name="c4_antipodal_evasion")
    plan.strategy = strategy
    return strategy


def c4_unfair_cop(g: Digraph) -> Strategy:
    """Cop plan for the unfair 4-cycle game against a local Robber: capture at 3/4.

    Starting uniform, the Cop collapses his three-neighbour component onto
    the robber register's value; the diagonal amplitudes come out as
    sqrt(3/4) times the Robber's, independent of the Robber's choice.
    """
    _require_c4(g)
    uniform = np.full(4, 0.5, dtype=complex)
    blocks = [_recentred_collapse(g, uniform, i) for i in range(4)]
    op = controlled_op(g, blocks, control="robber")

    def move(ctx):
        return op if ctx.round == 1 else None

    return Strategy(init="uniform", move=move, role="cop",
                    model=GameModel.QUANTUM_CONTROLLED, name="c4_unfair_cop")


def dominating_set_sweep(g: Digraph, dset=None) -> Strategy:
    """Package a dominating set as the unfair-pursuit cop policy."""
    if dset is None:
        dset = dominating_set(g)
    dset = sorted({int(d) for d in dset})
    covered = set()
    for d in dset:
        covered |= neighbors(g, d)
    if covered != set(range(g.n)):
        raise GraphError(f"set {dset} does not dominate the graph")
    return Strategy(role="cop", name="dominating_set_sweep",
                    params={"dominating_set": tuple(dset)})


def classical_pursuit(g: Digraph, cap: int = 10) -> Strategy:
    """Cop plan read off the backward-induction tables; wins on cop-win graphs.

    From any cell the cop moves to minimise the robber-to-move capture time,
    which drops by at least one per round, so capture lands within n*n rounds
    against every robber.
    """
    if not solve_copwin_game(g, cap):
        raise GraphError("graph is not cop-win")
    vc, vr = copwin_value_tables(g, cap)
    a = g.adjacency()
    start = int(np.argmin(vc.max(axis=1)))

    def move(ctx):
        c, r = ctx.cop_state, ctx.robber_state
        if c == r:
            return c
        options = [c2 for c2 in range(g.n) if a[c, c2]]
        return min(options, key=lambda c2: (vr[c2, r], c2))

    return Strategy(init=start, move=move, role="cop", model=GameModel.CLASSICAL,
                    name="classical_pursuit")


def classical_evader(g: Digraph, cap: int = 10) -> Strategy:
    """Adversarial robber from the same tables: always climb the capture time."""
    vc, _ = copwin_value_tables(g, cap)
    a = g.adjacency()

    def init(ctx):
        c = ctx.cop_state
        return max(range(g.n), key=lambda r: (vc[c, r], -r))

    def move(ctx):
        c, r = ctx.cop_state, ctx.robber_state
        options = [r2 for r2 in range(g.n) if a[r, r2]]
        return max(options, key=lambda r2: (vc[c, r2], -r2))

    return Strategy(init=init, move=move, role="robber", model=GameModel.CLASSICAL,
                    name="classical_evader")


BUILTINS = {
    "uniform_spread": uniform_spread,
    "universal_vertex_catch": universal_vertex_catch,
    "c4_antipodal_evasion": c4_antipodal_evasion,
    "c4_unfair_cop": c4_unfair_cop,
    "dominating_set_sweep": dominating_set_sweep,
    "classical_pursuit": classical_pursuit,
}


def build_strategy(name: str, g: Digraph, params: dict = None) -> Strategy:
    """Instantiate a builtin strategy by name with JSON-style parameters."""
    if name not in BUILTINS:
        raise GameError(f"unknown builtin strategy '{name}'; known: {sorted(BUILTINS)}")
    params = dict(params or {})
    if name == "universal_vertex_catch":
        return universal_vertex_catch(g, params.get("vertex"))
    if name == "dominating_set_sweep":
        return dominating_set_sweep(g, params.get("set"))
    if name == "classical_pursuit":
        return classical_pursuit(g, params.get("cap", 10))
    return BUILTINS[name](g)
