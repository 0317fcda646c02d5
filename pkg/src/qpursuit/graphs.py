"""Reflexive digraphs and the classical pursuit analysis the games are built on."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

import numpy as np


class GraphError(ValueError):
    """A graph value violates an operation's requirements."""


@dataclass(frozen=True)
class Digraph:
    """Directed graph on vertices 0..n-1 with an explicit arc set.

    Arcs are ordered pairs (u, v).  A loop (v, v) means the player standing
    at v may stay put, so game boards are always reflexive.  Undirected
    graphs are represented by symmetric arc sets.
    """

    n: int
    arcs: frozenset

    def __post_init__(self):
        if self.n < 1:
            raise GraphError("a graph needs at least one vertex")
        arcs = frozenset((int(u), int(v)) for u, v in self.arcs)
        object.__setattr__(self, "arcs", arcs)
        for u, v in arcs:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"arc ({u}, {v}) references a vertex outside 0..{self.n - 1}")

    @property
    def is_reflexive(self) -> bool:
        return all((v, v) in self.arcs for v in range(self.n))

    @property
    def is_undirected(self) -> bool:
        return all((v, u) in self.arcs for u, v in self.arcs)

    def adjacency(self) -> np.ndarray:
        """Boolean matrix a with a[u, v] true iff (u, v) is an arc."""
        a = np.zeros((self.n, self.n), dtype=bool)
        for u, v in self.arcs:
            a[u, v] = True
        return a


def digraph(n, arcs, *, undirected=False, reflexive=True) -> Digraph:
    """Build a Digraph, optionally closing the arcs symmetrically and adding all loops."""
    full = {(int(u), int(v)) for u, v in arcs}
    if undirected:
        full |= {(v, u) for u, v in full}
    if reflexive:
        full |= {(v, v) for v in range(n)}
    return Digraph(n, frozenset(full))


def path_graph(n: int) -> Digraph:
    return digraph(n, [(i, i + 1) for i in range(n - 1)], undirected=True)


def cycle_graph(n: int) -> Digraph:
    return digraph(n, [(i, (i + 1) % n) for i in range(n)], undirected=True)


def directed_cycle(n: int) -> Digraph:
    return digraph(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves: int) -> Digraph:
    """Star with center 0 and the given number of leaves."""
    return digraph(leaves + 1, [(0, i) for i in range(1, leaves + 1)], undirected=True)


def complete_graph(n: int) -> Digraph:
    return digraph(n, itertools.combinations(range(n), 2), undirected=True)


def _check_vertex(g: Digraph, v: int):
    if not 0 <= v < g.n:
        raise GraphError(f"vertex {v} outside 0..{g.n - 1}")


def neighbors(g: Digraph, v: int) -> set:
    """Out-neighbourhood S(v) = {w : (v, w) in arcs}; contains v itself on reflexive graphs."""
    _check_vertex(g, v)
    return {w for u, w in g.arcs if u == v}


def _bfs_reach(g: Digraph, start: int, forward: bool) -> set:
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for a, b in g.arcs:
            s, t = (a, b) if forward else (b, a)
            if s == u and t not in seen:
                seen.add(t)
                queue.append(t)
    return seen


def is_reversible(g: Digraph) -> bool:
    """True iff there is a directed path between every ordered pair of vertices."""
    if g.n == 1:
        return True
    return len(_bfs_reach(g, 0, True)) == g.n and len(_bfs_reach(g, 0, False)) == g.n


def is_connected(g: Digraph) -> bool:
    """Connectivity of the underlying undirected graph (arcs taken both ways)."""
    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for a, b in g.arcs:
            for s, t in ((a, b), (b, a)):
                if s == u and t not in seen:
                    seen.add(t)
                    queue.append(t)
    return len(seen) == g.n


def is_corner(g: Digraph, v: int):
    """Return some u != v whose neighbourhood contains S(v), else None.

    Containment is non-strict, so every vertex of a reflexive clique is a
    corner; strict containment would wedge the dismantling of cliques.
    """
    if not g.is_undirected:
        raise GraphError("corners are defined on undirected graphs")
    _check_vertex(g, v)
    sv = neighbors(g, v)
    for u in range(g.n):
        if u != v and sv <= neighbors(g, u):
            return u
    return None


def _require_board(g: Digraph, op: str):
    if not g.is_undirected:
        raise GraphError(f"{op} needs an undirected graph")
    if not g.is_reflexive:
        raise GraphError(f"{op} needs a reflexive graph")


def is_copwin_dismantle(g: Digraph) -> bool:
    """Dismantle by repeated corner deletion; True iff a single vertex remains."""
    _require_board(g, "dismantling")
    if not is_connected(g):
        raise GraphError("dismantling needs a connected graph")
    nb = [0] * g.n
    for u, v in g.arcs:
        nb[u] |= 1 << v
    alive = (1 << g.n) - 1
    count = g.n
    changed = True
    while count > 1 and changed:
        changed = False
        for v in range(g.n):
            if not alive >> v & 1:
                continue
            sv = nb[v] & alive
            rest = alive & ~(1 << v)
            while rest:
                low = rest & -rest
                u = low.bit_length() - 1
                if sv & ~(nb[u] & alive) == 0:
                    alive &= ~(1 << v)
                    count -= 1
                    changed = True
                    break
                rest ^= low
    return count == 1


def _copwin_fixpoint(a: np.ndarray):
    """Monotone fixpoint of the winning regions (Cop to move, Robber to move)."""
    n = a.shape[0]
    eye = np.eye(n, dtype=bool)
    au8 = a.astype(np.uint8)
    wc = eye.copy()
    wr = eye.copy()
    while True:
        # Robber to move at (c, r): caught already, or every r' in S(r) stays losing.
        escapes = (~wc).astype(np.uint8) @ au8.T
        wr_new = eye | (escapes == 0)
        # Cop to move at (c, r): caught, or some c' in S(c) reaches a winning cell.
        wc_new = eye | ((au8 @ wr_new.astype(np.uint8)) > 0)
        if np.array_equal(wc_new, wc) and np.array_equal(wr_new, wr):
            return wc, wr
        wc, wr = wc_new, wr_new


def solve_copwin_game(g: Digraph, cap: int = 10) -> bool:
    """Backward-induction oracle for the classical game.

    The Cop picks a start, the Robber answers seeing it, then they alternate
    single-arc moves with the Cop first.  True iff some Cop start wins
    against every Robber answer.
    """
    _require_board(g, "the game solver")
    if not is_connected(g):
        raise GraphError("the game solver needs a connected graph")
    if g.n > cap:
        raise GraphError(f"game solver capped at {cap} vertices, got {g.n}")
    wc, _ = _copwin_fixpoint(g.adjacency())
    return bool(wc.all(axis=1).any())


def copwin_value_tables(g: Digraph, cap: int = 10):
    """Optimal capture times in half-moves for Cop-to-move and Robber-to-move cells.

    Returns (vc, vr) float arrays; inf marks cells the Cop cannot force.
    The pursuit policy descends vr, an evader climbs vc.
    """
    _require_board(g, "the game solver")
    if g.n > cap:
        raise GraphError(f"game solver capped at {cap} vertices, got {g.n}")
    a = g.adjacency()
    n = g.n
    eye = np.eye(n, dtype=bool)
    vc = np.where(eye, 0.0, np.inf)
    vr = vc.copy()
    for _ in range(4 * n * n + 4):
        # Robber to move: he maximises the next Cop-to-move value over S(r).
        worst = np.where(a[None, :, :], vc[:, None, :], -np.inf).max(axis=2)
        vr_new = np.where(eye, 0.0, 1.0 + worst)
        # Cop to move: he minimises the next Robber-to-move value over S(c).
        best = np.where(a[:, :, None], vr_new[None, :, :], np.inf).min(axis=1)
        vc_new = np.where(eye, 0.0, 1.0 + best)
        if np.array_equal(vc_new, vc) and np.array_equal(vr_new, vr):
            break
        vc, vr = vc_new, vr_new
    return vc, vr


def _dominates(g: Digraph, ds) -> bool:
    cover = set()
    for d in ds:
        cover |= neighbors(g, d)
    return len(cover) == g.n


def dominating_set(g: Digraph, exact: bool = False) -> set:
    """A dominating set: every vertex is in the set or adjacent to a member.

    Greedy maximum-coverage by default; exact=True searches the true minimum
    (n <= 10 only).
    """
    _require_board(g, "dominating sets")
    if exact:
        if g.n > 10:
            raise GraphError("exact dominating set limited to 10 vertices")
        for k in range(1, g.n + 1):
            for combo in itertools.combinations(range(g.n), k):
                if _dominates(g, combo):
                    return set(combo)
    uncovered = set(range(g.n))
    chosen = set()
    while uncovered:
        v = max(range(g.n), key=lambda u: (len(neighbors(g, u) & uncovered), -u))
        chosen.add(v)
        uncovered -= neighbors(g, v)
    return chosen


def universal_vertex(g: Digraph):
    """Lowest-index vertex adjacent to every vertex, or None."""
    _require_board(g, "universal vertex lookup")
    everything = set(range(g.n))
    for v in range(g.n):
        if neighbors(g, v) == everything:
            return v
    return None


@dataclass(frozen=True)
class SpanningTree:
    """BFS tree over the symmetric arcs, with the fold order the reach algorithm walks.

    order lists vertices by non-increasing distance from the root with ties
    broken by ascending index, so each vertex appears before its parent and
    the root comes last.
    """

    root: int
    parent: tuple
    order: tuple
    dist: tuple

    def as_digraph(self) -> Digraph:
        """Reflexive digraph holding exactly the tree edges, both directions."""
        n = len(self.parent)
        arcs = {(v, v) for v in range(n)}
        for v, p in enumerate(self.parent):
            if p != v:
                arcs |= {(v, p), (p, v)}
        return Digraph(n, frozenset(arcs))


def spanning_tree(g: Digraph, root: int) -> SpanningTree:
    """BFS spanning tree over mutual arcs, lowest-index-first exploration."""
    _check_vertex(g, root)
    sym = [[] for _ in range(g.n)]
    for u, v in g.arcs:
        if u != v and (v, u) in g.arcs:
            sym[u].append(v)
    for row in sym:
        row.sort()
    parent = [-1] * g.n
    dist = [-1] * g.n
    parent[root] = root
    dist[root] = 0
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in sym[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                parent[v] = u
                queue.append(v)
    if min(dist) < 0:
        raise GraphError("graph has no undirected spanning tree")
    order = sorted(range(g.n), key=lambda v: (-dist[v], v))
    return SpanningTree(root, tuple(parent), tuple(order), tuple(dist))


def disjoint_union(g: Digraph, k: int) -> Digraph:
    """k disjoint copies of g; copy j occupies the vertex block [j*n, (j+1)*n)."""
    if k < 1:
        raise GraphError("disjoint union needs at least one copy")
    arcs = set()
    for j in range(k):
        off = j * g.n
        arcs |= {(u + off, v + off) for u, v in g.arcs}
    return Digraph(k * g.n, frozenset(arcs))


def reverse_digraph(g: Digraph) -> Digraph:
    return Digraph(g.n, frozenset((v, u) for u, v in g.arcs))


def support_ball(g: Digraph, v: int, k: int) -> set:
    """Vertices reachable from v by at most k arcs."""
    _check_vertex(g, v)
    if k < 0:
        raise GraphError("negative step count")
    frontier = {v}
    ball = {v}
    for _ in range(k):
        frontier = {w for u in frontier for w in neighbors(g, u)} - ball
        if not frontier:
            break
        ball |= frontier
    return ball


def random_connected_graph(n: int, rng, extra_edge_prob: float = 0.3) -> Digraph:
    """Random undirected reflexive connected graph: a random tree plus extra edges."""
    perm = [int(x) for x in rng.permutation(n)]
    edges = set()
    for i in range(1, n):
        j = int(rng.integers(0, i))
        edges.add((perm[i], perm[j]))
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < extra_edge_prob:
                edges.add((u, v))
    return digraph(n, edges, undirected=True)


def random_graph_with_universal_vertex(n: int, rng, extra_edge_prob: float = 0.3) -> Digraph:
    g = random_connected_graph(n, rng, extra_edge_prob)
    hub = int(rng.integers(0, n))
    edges = {(u, v) for u, v in g.arcs} | {(hub, v) for v in range(n)}
    return digraph(n, edges, undirected=True)
