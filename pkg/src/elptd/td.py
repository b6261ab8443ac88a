"""Tree decompositions: heuristic construction, nice form, validation, I/O."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .graphs import Graph

__all__ = [
    "Diagnostics",
    "TreeDecomposition",
    "decompose",
    "dump_td",
    "elimination_order",
    "load_td",
    "make_nice",
    "nice_violation",
    "validate",
]

LEAF, INTR, REM, JOIN = "leaf", "intr", "rem", "join"


@dataclass
class TreeDecomposition:
    """Rooted tree of bags.

    For nice decompositions produced by ``make_nice`` node ids are post-order
    indices (children before parents, root last), ``kinds[t]`` is one of
    leaf/intr/rem/join and ``vertex[t]`` is the introduced or removed vertex.
    """

    bags: list[frozenset[int]]
    children: list[list[int]]
    root: int
    kinds: list[str] | None = None
    vertex: list[int | None] | None = None
    parent: list[int | None] = field(init=False, repr=False)

    def __post_init__(self):
        self.parent = [None] * len(self.bags)
        for t, cs in enumerate(self.children):
            for c in cs:
                self.parent[c] = t

    def __len__(self) -> int:
        return len(self.bags)

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    @property
    def is_nice(self) -> bool:
        return self.kinds is not None

    def postorder(self) -> list[int]:
        order, stack = [], [(self.root, False)]
        while stack:
            t, done = stack.pop()
            if done:
                order.append(t)
                continue
            stack.append((t, True))
            for c in reversed(self.children[t]):
                stack.append((c, False))
        return order

    def nodes_of_kind(self, kind: str) -> list[int]:
        return [t for t in range(len(self)) if self.kinds[t] == kind]


# -- construction --------------------------------------------------------


def _fill_in(adj: dict[int, set[int]], v: int) -> int:
    ns = sorted(adj[v])
    return sum(1 for i, a in enumerate(ns) for b in ns[i + 1:] if b not in adj[a])


def elimination_order(g: Graph, heuristic: str = "min-fill", seed: int | None = None) -> list[int]:
    """Greedy elimination ordering.

    ``min-fill`` picks the vertex adding the fewest fill edges (ties by
    degree), ``min-degree`` the vertex of smallest degree.  Remaining ties go
    to the smallest vertex id, or to a seeded random priority when ``seed`` is
    given.
    """
    if heuristic not in ("min-fill", "min-degree"):
        raise ValueError(f"unknown heuristic {heuristic!r}")
    adj = {v: set(ns) for v, ns in g.adj.items()}
    vs = sorted(adj)
    if seed is None:
        prio = {v: v for v in vs}
    else:
        shuffled = vs[:]
        random.Random(seed).shuffle(shuffled)
        prio = {v: i for i, v in enumerate(shuffled)}
    order = []
    while adj:
        if heuristic == "min-fill":
            v = min(adj, key=lambda u: (_fill_in(adj, u), len(adj[u]), prio[u]))
        else:
            v = min(adj, key=lambda u: (len(adj[u]), prio[u]))
        ns = adj.pop(v)
        for a in ns:
            adj[a].discard(v)
            adj[a].update(ns - {a})
        order.append(v)
    return order


def decompose(g: Graph, heuristic: str = "min-fill", seed: int | None = None) -> TreeDecomposition:
    """Tree decomposition from a greedy elimination ordering.

    One node per vertex with bag ``{v} + N(v)`` at elimination time, attached
    to the node of the neighbour eliminated next.  Components are hung below
    the last node.
    """
    order = elimination_order(g, heuristic, seed)
    if not order:
        return TreeDecomposition([frozenset()], [[]], 0)
    pos = {v: i for i, v in enumerate(order)}
    adj = {v: set(ns) for v, ns in g.adj.items()}
    bags, children = [], [[] for _ in order]
    roots = []
    for i, v in enumerate(order):
        ns = adj.pop(v)
        for a in ns:
            adj[a].discard(v)
            adj[a].update(ns - {a})
        bags.append(frozenset(ns | {v}))
        if ns:
            children[min(pos[a] for a in ns)].append(i)
        else:
            roots.append(i)
    root = roots[-1]
    children[root].extend(r for r in roots[:-1])
    return TreeDecomposition(bags, children, root)


def make_nice(td: TreeDecomposition) -> TreeDecomposition:
    """Equivalent nice decomposition with empty leaves and an empty root."""
    diag = _tree_problem(td)
    if diag:
        raise ValueError(f"invalid tree decomposition: {diag}")
    bags: list[frozenset[int]] = []
    kinds: list[str] = []
    vertex: list[int | None] = []
    children: list[list[int]] = []

    def add(bag, kind, v, cs):
        bags.append(frozenset(bag))
        kinds.append(kind)
        vertex.append(v)
        children.append(list(cs))
        return len(bags) - 1

    def lift(top: int, target: frozenset[int]) -> int:
        bag = bags[top]
        for v in sorted(bag - target):
            bag = bag - {v}
            top = add(bag, REM, v, [top])
        for v in sorted(target - bag):
            bag = bag | {v}
            top = add(bag, INTR, v, [top])
        return top

    tops: dict[int, int] = {}
    for t in td.postorder():
        bag = td.bags[t]
        subs = [lift(tops.pop(c), bag) for c in td.children[t]]
        if not subs:
            subs = [lift(add((), LEAF, None, []), bag)]
        top = subs[0]
        for other in subs[1:]:
            top = add(bag, JOIN, None, [top, other])
        tops[t] = top
    root = lift(tops[td.root], frozenset())

    # renumber in post-order so that node ids give the order used by the DPs
    old = TreeDecomposition(bags, children, root)
    order = old.postorder()
    new_id = {t: i for i, t in enumerate(order)}
    return TreeDecomposition(
        [bags[t] for t in order],
        [[new_id[c] for c in children[t]] for t in order],
        new_id[root],
        [kinds[t] for t in order],
        [vertex[t] for t in order],
    )


# -- validation -------------------------------------------------------------


@dataclass
class Diagnostics:
    ok: bool
    width: int | None = None
    condition: str | None = None
    witness: object = None

    def __bool__(self) -> bool:
        return self.ok


def _tree_problem(td: TreeDecomposition) -> str | None:
    n = len(td)
    if len(td.children) != n or not 0 <= td.root < n:
        return "malformed node arrays"
    seen = set()
    stack = [td.root]
    while stack:
        t = stack.pop()
        if t in seen:
            return f"node {t} reachable twice (not a tree)"
        seen.add(t)
        stack.extend(td.children[t])
    if len(seen) != n:
        return f"nodes {sorted(set(range(n)) - seen)} unreachable from the root"
    return None


def validate(td: TreeDecomposition, g: Graph) -> Diagnostics:
    """Check the three decomposition conditions; report the first violation."""
    problem = _tree_problem(td)
    if problem:
        return Diagnostics(False, condition="tree", witness=problem)
    where: dict[int, list[int]] = {}
    for t, bag in enumerate(td.bags):
        for v in bag:
            where.setdefault(v, []).append(t)
    for v in g.vertices:
        if v not in where:
            return Diagnostics(False, condition="(i)", witness=v)
    for u, v in g.edges():
        if not any(v in td.bags[t] for t in where[u]):
            return Diagnostics(False, condition="(ii)", witness=(u, v))
    for v, nodes in sorted(where.items()):
        tops = [t for t in nodes if td.parent[t] is None or v not in td.bags[td.parent[t]]]
        if len(tops) != 1:
            return Diagnostics(False, condition="(iii)", witness=(v, sorted(nodes)))
    return Diagnostics(True, width=td.width)


def nice_violation(td: TreeDecomposition) -> str | None:
    """Why ``td`` is not a nice decomposition with empty root, or None."""
    if td.kinds is None:
        return "no node types"
    if td.bags[td.root]:
        return "root bag not empty"
    for t, kind in enumerate(td.kinds):
        bag, cs = td.bags[t], td.children[t]
        if kind == LEAF:
            ok = not cs and not bag
        elif kind == JOIN:
            ok = len(cs) == 2 and cs[0] != cs[1] and all(td.bags[c] == bag for c in cs)
        elif kind in (INTR, REM):
            if len(cs) != 1:
                return f"node {t} ({kind}) has {len(cs)} children"
            child = td.bags[cs[0]]
            v = td.vertex[t]
            if kind == INTR:
                ok = bag == child | {v} and v not in child
            else:
                ok = child == bag | {v} and v not in bag
        else:
            return f"node {t} has unknown type {kind!r}"
        if not ok:
            return f"node {t} is not a valid {kind} node"
    if any(c >= t for t in range(len(td)) for c in td.children[t]):
        return "node ids are not a post-order"
    return None


# -- text format --------------------------------------------------------------


def dump_td(td: TreeDecomposition, g: Graph) -> str:
    """``s td`` / ``b`` / edge lines with 1-based ids; vertices renumbered as in ``dump_edge_list``."""
    vid = {v: i + 1 for i, v in enumerate(g.vertices)}
    order = [td.root] + [t for t in range(len(td)) if t != td.root]
    nid = {t: i + 1 for i, t in enumerate(order)}
    lines = [f"s td {len(td)} {td.width + 1} {len(g)}"]
    for t in order:
        lines.append(" ".join(["b", str(nid[t])] + [str(vid[v]) for v in sorted(td.bags[t])]))
    for t in order:
        for c in td.children[t]:
            lines.append(f"{nid[t]} {nid[c]}")
    return "\n".join(lines) + "\n"


def load_td(text: str, g: Graph, root: int = 1) -> TreeDecomposition:
    """Read a decomposition of ``g``; node ``root`` (1-based) becomes the root."""
    labels = g.vertices
    bags: dict[int, frozenset[int]] = {}
    edges: list[tuple[int, int]] = []
    n = None
    for line in text.splitlines():
        parts = line.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "s":
            n = int(parts[2])
        elif parts[0] == "b":
            bags[int(parts[1])] = frozenset(labels[int(v) - 1] for v in parts[2:])
        else:
            edges.append((int(parts[0]), int(parts[1])))
    if n is None:
        raise ValueError("missing 's td' line")
    adj: dict[int, list[int]] = {t: [] for t in range(1, n + 1)}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    children: list[list[int]] = [[] for _ in range(n)]
    seen = {root}
    stack = [root]
    while stack:
        t = stack.pop()
        for u in sorted(adj[t]):
            if u not in seen:
                seen.add(u)
                children[t - 1].append(u - 1)
                stack.append(u)
    return TreeDecomposition([bags.get(t, frozenset()) for t in range(1, n + 1)], children, root - 1)
