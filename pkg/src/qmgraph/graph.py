"""Relation graphs G(Pi_n) of the n x n quantum matrix algebra.

Vertices are the generators x_ij.  Two generators in the same row or the same
column are joined by one arc pointing away from x_11; an antidiagonal pair
(x_ij, x_kl with i < k, j > l) is joined in both directions; a diagonal pair
(i < k, j < l) is not joined.  This reproduces both printed figures arc for arc
and gives n^2 (n^2 - 1) / 2 arcs in total.
"""

from __future__ import annotations

import itertools
import json
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument

Vertex = tuple[int, int]


@dataclass(frozen=True)
class Edge:
    id: str
    src: Vertex
    dst: Vertex


# Arc labels of the figure for G(Pi_2).
FIG1_EDGES: tuple[Edge, ...] = (
    Edge("e", (1, 1), (1, 2)),
    Edge("f", (1, 1), (2, 1)),
    Edge("h", (1, 2), (2, 2)),
    Edge("g", (2, 1), (2, 2)),
    Edge("i", (1, 2), (2, 1)),
    Edge("j", (2, 1), (1, 2)),
)

# Arc labels of the figure for G(Pi_3).  A label "a=b=c" names one arc that
# several Hamiltonian paths share; the first name is used as the edge id.
FIG2_ARCS: tuple[tuple[Vertex, Vertex, str], ...] = (
    ((2, 1), (2, 2), "j5"),
    ((2, 2), (2, 3), "g6=f6"),
    ((2, 1), (3, 1), "e3=f3"),
    ((1, 1), (2, 1), "g1=h1"),
    ((2, 3), (3, 3), "i8=e8=j8=h8"),
    ((3, 1), (3, 3), "1"),
    ((1, 1), (3, 1), "i1"),
    ((1, 2), (1, 3), "g3=h3"),
    ((1, 3), (3, 3), "14"),
    ((1, 2), (3, 2), "13"),
    ((1, 3), (2, 3), "7"),
    ((2, 2), (3, 2), "e6=h6=i6=j6"),
    ((1, 1), (1, 2), "e1=f1"),
    ((1, 1), (1, 3), "j1"),
    ((1, 2), (2, 2), "i5"),
    ((2, 1), (2, 3), "12"),
    ((3, 2), (3, 3), "g8=f8"),
    ((2, 2), (3, 1), "10"),
    ((3, 1), (2, 2), "g5=h5"),
    ((1, 3), (3, 1), "g4=h4=j2"),
    ((3, 1), (1, 3), "e4=f4=i2"),
    ((1, 3), (2, 1), "i3"),
    ((2, 1), (1, 3), "8"),
    ((2, 1), (1, 2), "g2=h2=i4"),
    ((1, 2), (2, 1), "e2=f2=j4"),
    ((2, 2), (1, 3), "9"),
    ((1, 3), (2, 2), "e5=f5"),
    ((3, 2), (2, 3), "e7=h7=i7=j7"),
    ((2, 3), (3, 2), "g7=f7"),
    ((1, 3), (3, 2), "2"),
    ((3, 2), (1, 3), "3"),
    ((2, 3), (3, 1), "5"),
    ((3, 1), (2, 3), "4"),
    ((3, 1), (3, 2), "11"),
    ((1, 2), (3, 1), "6"),
    ((3, 1), (1, 2), "j3"),
)

FIG2_ALIASES: dict[str, tuple[str, ...]] = {
    label.split("=")[0]: tuple(label.split("=")) for _, _, label in FIG2_ARCS
}

# Hamiltonian paths named in the text, as vertex sequences.
PAPER_PATHS_PI2: dict[str, tuple[str, ...]] = {"P1": ("e", "i", "g"), "P2": ("f", "j", "h")}
PAPER_PATHS_PI3: dict[str, tuple[Vertex, ...]] = {
    "H1": ((1, 1), (1, 2), (2, 1), (3, 1), (1, 3), (2, 2), (3, 2), (2, 3), (3, 3)),
    "H2": ((1, 1), (1, 2), (2, 1), (3, 1), (1, 3), (2, 2), (2, 3), (3, 2), (3, 3)),
    "H3": ((1, 1), (2, 1), (1, 2), (1, 3), (3, 1), (2, 2), (2, 3), (3, 2), (3, 3)),
    "H4": ((1, 1), (2, 1), (1, 2), (1, 3), (3, 1), (2, 2), (3, 2), (2, 3), (3, 3)),
    "H5": ((1, 1), (3, 1), (1, 3), (2, 1), (1, 2), (2, 2), (3, 2), (2, 3), (3, 3)),
    "H6": ((1, 1), (1, 3), (3, 1), (1, 2), (2, 1), (2, 2), (3, 2), (2, 3), (3, 3)),
}


def vertex_label(v: Vertex, n: int = 2) -> str:
    i, j = v
    return f"x{i}{j}" if n < 10 else f"x{i},{j}"


@dataclass(frozen=True)
class DirectedMultigraph:
    n: int
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]

    def edge(self, edge_id: str) -> Edge:
        for e in self.edges:
            if e.id == edge_id:
                return e
        raise KeyError(edge_id)

    def out_edges(self, v: Vertex) -> list[Edge]:
        return [e for e in self.edges if e.src == v]

    def in_edges(self, v: Vertex) -> list[Edge]:
        return [e for e in self.edges if e.dst == v]

    def out_degree(self, v: Vertex) -> int:
        return sum(1 for e in self.edges if e.src == v)

    def in_degree(self, v: Vertex) -> int:
        return sum(1 for e in self.edges if e.dst == v)

    def sources(self) -> list[Vertex]:
        return [v for v in self.vertices if self.in_degree(v) == 0]

    def sinks(self) -> list[Vertex]:
        return [v for v in self.vertices if self.out_degree(v) == 0]

    def label(self, v: Vertex) -> str:
        return vertex_label(v, self.n)


@dataclass(frozen=True)
class HamiltonianPath:
    edge_ids: tuple[str, ...]
    vertex_sequence: tuple[Vertex, ...]


def _edge_id(kind: str, a: Vertex, b: Vertex) -> str:
    return f"{kind}:{a[0]},{a[1]}→{b[0]},{b[1]}"


def build_graph(n: int) -> DirectedMultigraph:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 2:
        raise InvalidArgument(f"n must be an integer >= 2, got {n!r}")
    n = int(n)
    vertices = tuple((i, j) for i in range(1, n + 1) for j in range(1, n + 1))
    arcs: list[tuple[str, Vertex, Vertex]] = []
    for a, b in itertools.combinations(vertices, 2):
        (i, j), (k, l) = a, b  # a precedes b, so i <= k
        if i == k:
            arcs.append(("r", a, b))
        elif j == l:
            arcs.append(("c", a, b))
        elif j > l:
            arcs.append(("a", a, b))
            arcs.append(("a", b, a))
    if n == 2:
        edges = FIG1_EDGES
    elif n == 3:
        labels = {(s, d): lab.split("=")[0] for s, d, lab in FIG2_ARCS}
        edges = tuple(Edge(labels[(s, d)], s, d) for _, s, d in arcs)
    else:
        edges = tuple(Edge(_edge_id(kind, s, d), s, d) for kind, s, d in arcs)
    edges = tuple(sorted(edges, key=lambda e: (e.src, e.dst)))
    return DirectedMultigraph(n, vertices, edges)


def adjacency_matrix(g: DirectedMultigraph) -> np.ndarray:
    """Edge multiplicities, rows/columns in the order of ``g.vertices``."""
    index = {v: k for k, v in enumerate(g.vertices)}
    a = np.zeros((len(g.vertices), len(g.vertices)), dtype=np.int64)
    for e in g.edges:
        a[index[e.src], index[e.dst]] += 1
    return a


def graph_stats(g: DirectedMultigraph) -> dict:
    sources, sinks = g.sources(), g.sinks()
    return {
        "vertexCount": len(g.vertices),
        "edgeCount": len(g.edges),
        "sources": [g.label(v) for v in sources],
        "sinks": [g.label(v) for v in sinks],
        "sourceOutDegree": g.out_degree(sources[0]) if len(sources) == 1 else None,
        "sinkInDegree": g.in_degree(sinks[0]) if len(sinks) == 1 else None,
    }


def _start_vertices(g: DirectedMultigraph) -> list[Vertex]:
    if len(g.vertices) == 1:
        return list(g.vertices)
    sources = g.sources()
    if len(sources) > 1:
        return []
    return sources or list(g.vertices)


def iter_hamiltonian_paths(g: DirectedMultigraph) -> Iterator[HamiltonianPath]:
    """Depth-first backtracking; out-edges are tried in target order."""
    succ: dict[Vertex, list[Edge]] = {v: [] for v in g.vertices}
    for e in g.edges:
        succ[e.src].append(e)
    for v in succ:
        succ[v].sort(key=lambda e: (e.dst, e.id))
    total = len(g.vertices)
    for start in _start_vertices(g):
        visited = {start}
        verts = [start]
        path: list[str] = []
        stack = [iter(succ[start])]
        if total == 1:
            yield HamiltonianPath((), (start,))
            continue
        while stack:
            e = next(stack[-1], None)
            if e is None:
                stack.pop()
                if path:
                    path.pop()
                    visited.discard(verts.pop())
                continue
            if e.dst in visited:
                continue
            path.append(e.id)
            verts.append(e.dst)
            visited.add(e.dst)
            if len(verts) == total:
                yield HamiltonianPath(tuple(path), tuple(verts))
                path.pop()
                visited.discard(verts.pop())
            else:
                stack.append(iter(succ[e.dst]))


def enumerate_hamiltonian_paths(g: DirectedMultigraph) -> list[HamiltonianPath]:
    """All Hamiltonian paths, sorted by edge-id sequence."""
    return sorted(iter_hamiltonian_paths(g), key=lambda p: p.edge_ids)


def count_hamiltonian_paths(g: DirectedMultigraph, labeled: bool = True) -> int:
    """Exact count by dynamic programming over visited vertex sets.

    With ``labeled=False`` parallel arcs with the same orientation are counted
    once, giving the number of distinct vertex sequences.
    """
    from ._hamcount import count_paths

    nv = len(g.vertices)
    if nv == 1:
        return 1
    mult = adjacency_matrix(g)
    if not labeled:
        mult = (mult > 0).astype(np.int64)
    indeg = mult.sum(axis=0)
    outdeg = mult.sum(axis=1)
    sources = [k for k in range(nv) if indeg[k] == 0]
    sinks = [k for k in range(nv) if outdeg[k] == 0]
    if len(sources) > 1 or len(sinks) > 1:
        return 0
    start = sources[0] if sources else None
    end = sinks[0] if sinks else None
    if start is not None and start == end:
        return 0
    free = [k for k in range(nv) if k != start and k != end]
    if not free:
        return int(mult[start, end])
    sub = mult[np.ix_(free, free)].astype(np.uint64)
    init = (mult[start, free] if start is not None else np.ones(len(free), np.int64)).astype(np.uint64)
    final = (mult[free, end] if end is not None else np.ones(len(free), np.int64)).astype(np.uint64)
    return count_paths(sub, init, final)


def export_graph(g: DirectedMultigraph, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(
            {
                "n": g.n,
                "vertices": [list(v) for v in g.vertices],
                "edges": [{"id": e.id, "src": list(e.src), "dst": list(e.dst)} for e in g.edges],
            },
            ensure_ascii=False,
            indent=2,
        )
    if fmt == "dot":
        lines = [f"digraph G_Pi_{g.n} {{"]
        for v in g.vertices:
            lines.append(f'  "{g.label(v)}";')
        for e in g.edges:
            lines.append(f'  "{g.label(e.src)}" -> "{g.label(e.dst)}" [label="{e.id}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise InvalidArgument(f"unsupported graph format {fmt!r}; expected 'json' or 'dot'")


def _as_vertex(obj) -> Vertex:
    if not (isinstance(obj, list) and len(obj) == 2 and all(isinstance(x, int) and not isinstance(x, bool) for x in obj)):
        raise InvalidArgument(f"vertex must be a pair of integers, got {obj!r}")
    return (obj[0], obj[1])


def parse_graph(text: str) -> DirectedMultigraph:
    try:
        data = json.loads(text)
        n = data["n"]
        vertices = tuple(_as_vertex(v) for v in data["vertices"])
        edges = tuple(Edge(str(e["id"]), _as_vertex(e["src"]), _as_vertex(e["dst"])) for e in data["edges"])
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InvalidArgument(f"malformed graph JSON: {exc}") from exc
    if not isinstance(n, int) or n < 1:
        raise InvalidArgument(f"malformed graph JSON: bad n {n!r}")
    known = set(vertices)
    for e in edges:
        if e.src not in known or e.dst not in known:
            raise InvalidArgument(f"edge {e.id} references an unknown vertex")
    return DirectedMultigraph(n, vertices, edges)


def path_from_vertices(g: DirectedMultigraph, seq) -> HamiltonianPath:
    """Resolve a vertex sequence to edge ids (first matching arc per step)."""
    ids = []
    for a, b in zip(seq, seq[1:]):
        match = [e for e in g.edges if e.src == a and e.dst == b]
        if not match:
            raise InvalidArgument(f"no arc {vertex_label(a)} -> {vertex_label(b)}")
        ids.append(match[0].id)
    return HamiltonianPath(tuple(ids), tuple(seq))


def path_from_edges(g: DirectedMultigraph, edge_ids) -> HamiltonianPath:
    edges = [g.edge(k) for k in edge_ids]
    if not edges:
        return HamiltonianPath((), ())
    for a, b in zip(edges, edges[1:]):
        if a.dst != b.src:
            raise InvalidArgument(f"edges {a.id} and {b.id} do not chain")
    return HamiltonianPath(tuple(edge_ids), (edges[0].src,) + tuple(e.dst for e in edges))


def is_hamiltonian(g: DirectedMultigraph, p: HamiltonianPath) -> bool:
    if sorted(p.vertex_sequence) != sorted(g.vertices):
        return False
    if len(p.edge_ids) != len(p.vertex_sequence) - 1:
        return False
    for k, eid in enumerate(p.edge_ids):
        e = g.edge(eid)
        if (e.src, e.dst) != (p.vertex_sequence[k], p.vertex_sequence[k + 1]):
            return False
    return True
