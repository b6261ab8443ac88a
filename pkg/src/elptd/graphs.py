"""Graph representations of a program: primal, epistemic primal, incidence."""

from __future__ import annotations

from collections import deque
from typing import Iterable

from .program import Program

__all__ = [
    "Graph",
    "conn",
    "dump_edge_list",
    "epistemic_primal_graph",
    "incidence_graph",
    "load_edge_list",
    "primal_graph",
    "pure_epistemic_atoms",
]


class Graph:
    """Undirected simple graph over integer vertices."""

    def __init__(self, vertices: Iterable[int] = (), edges: Iterable[tuple[int, int]] = ()):
        self.adj: dict[int, set[int]] = {v: set() for v in vertices}
        for u, v in edges:
            self.add_edge(u, v)

    def add_vertex(self, v: int) -> None:
        self.adj.setdefault(v, set())

    def add_edge(self, u: int, v: int) -> None:
        if u == v:
            raise ValueError(f"self-loop on {u}")
        self.add_vertex(u)
        self.add_vertex(v)
        self.adj[u].add(v)
        self.adj[v].add(u)

    @property
    def vertices(self) -> list[int]:
        return sorted(self.adj)

    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, v) for u in self.adj for v in self.adj[u] if u < v)

    def neighbors(self, v: int) -> list[int]:
        return sorted(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj.get(u, ())

    def __len__(self) -> int:
        return len(self.adj)

    @property
    def n_edges(self) -> int:
        return sum(len(n) for n in self.adj.values()) // 2

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.adj == other.adj

    def __repr__(self) -> str:
        return f"Graph(|V|={len(self)}, |E|={self.n_edges})"


def primal_graph(p: Program) -> Graph:
    g = Graph(range(len(p.atoms)))
    for r in p.rules:
        atoms = sorted(r.atoms)
        for i, a in enumerate(atoms):
            for b in atoms[i + 1:]:
                g.add_edge(a, b)
    return g


def pure_epistemic_atoms(p: Program) -> frozenset[int]:
    """Atoms that occur in the program only inside epistemic literals."""
    plain = set()
    for r in p.rules:
        plain.update(r.head)
        plain.update(lit.atom for lit in r.body if not lit.epistemic)
    return p.elit - plain


def _reach(g: Graph, sources: Iterable[int], barrier: frozenset[int]) -> tuple[set[int], set[int]]:
    """BFS from ``sources`` that walks only through non-barrier vertices.

    Returns (non-barrier vertices reached, barrier vertices touched).
    """
    seen: set[int] = set()
    touched: set[int] = set()
    queue = deque()
    for s in sources:
        for v in g.adj[s]:
            if v in barrier:
                touched.add(v)
            elif v not in seen:
                seen.add(v)
                queue.append(v)
    while queue:
        u = queue.popleft()
        for v in g.adj[u]:
            if v in barrier:
                touched.add(v)
            elif v not in seen:
                seen.add(v)
                queue.append(v)
    return seen, touched


def conn(p: Program, x: Iterable[int], g: Graph | None = None) -> frozenset[int]:
    """Atoms on non-epistemic paths between members of ``x``.

    Paths may start and end at the same member, so every non-epistemic atom
    reachable from ``x`` without passing an epistemic atom is included.
    """
    x = frozenset(x)
    bad = x - p.elit
    if bad:
        raise ValueError(f"conn() expects epistemic atoms, got {p.names(bad)}")
    g = g or primal_graph(p)
    reached, _ = _reach(g, x, p.elit)
    return x | reached


def epistemic_primal_graph(p: Program, barrier: Iterable[int] | None = None) -> Graph:
    """Graph on the epistemic atoms; edges join atoms connected through non-epistemic ones.

    ``barrier`` selects which atoms block paths (default: all epistemic atoms).
    """
    barrier = p.elit if barrier is None else frozenset(barrier)
    g = primal_graph(p)
    ep = Graph(sorted(p.elit))
    for a in sorted(p.elit):
        # a path of length one counts, whatever the endpoints are
        for b in g.adj[a]:
            if b in p.elit:
                ep.add_edge(a, b)
        reached, touched = _reach(g, [a], barrier)
        for b in touched | (reached & p.elit):
            if b != a:
                ep.add_edge(a, b)
    return ep


def incidence_graph(p: Program) -> Graph:
    """Bipartite atom/rule graph; rule ``j`` is vertex ``len(p.atoms) + j``."""
    n = len(p.atoms)
    g = Graph(list(range(n)) + [n + j for j in range(len(p.rules))])
    for j, r in enumerate(p.rules):
        for a in r.atoms:
            g.add_edge(a, n + j)
    return g


def dump_edge_list(g: Graph) -> str:
    """``p tw |V| |E|`` header then one 1-based ``u v`` line per edge.

    Vertices are renumbered densely in ascending order.
    """
    ids = {v: i + 1 for i, v in enumerate(g.vertices)}
    lines = [f"p tw {len(g)} {g.n_edges}"]
    lines += [f"{ids[u]} {ids[v]}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def load_edge_list(text: str, labels: list[int] | None = None) -> Graph:
    """Inverse of ``dump_edge_list``; ``labels[i]`` is the id of vertex ``i + 1``."""
    g = None
    for line in text.splitlines():
        parts = line.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "p":
            n = int(parts[2])
            labels = labels or list(range(n))
            g = Graph(labels)
            continue
        if g is None:
            raise ValueError("edge line before the 'p tw' header")
        u, v = int(parts[0]), int(parts[1])
        g.add_edge(labels[u - 1], labels[v - 1])
    if g is None:
        raise ValueError("missing 'p tw' header")
    return g
