"""Cuntz-Krieger families for G(Pi_2) and G(Pi_3) and their verification.

The families are built exactly as printed.  Every relation is decided twice:
symbolically with :mod:`qmgraph.ap`, and numerically on sparse truncations
compared only on the window interior.  Failures carry the first offending
matrix entry as a witness.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from . import ap
from .ap import APOperator, Truncated
from .errors import InvalidArgument
from .graph import (
    FIG2_ARCS,
    PAPER_PATHS_PI2,
    PAPER_PATHS_PI3,
    DirectedMultigraph,
    HamiltonianPath,
    build_graph,
    path_from_edges,
    path_from_vertices,
)

Vertex = tuple[int, int]

# S_x = sum_t E_{row(t), col(t)}; (slope, offset) pairs.
PI2_PRINTED: dict[str, tuple[tuple[int, int], tuple[int, int]]] = {
    "e": ((6, 0), (3, -2)),
    "f": ((6, -4), (3, -2)),
    "h": ((6, -3), (3, 0)),
    "g": ((6, -4), (3, -1)),
    "i": ((6, -1), (3, 0)),
    "j": ((6, -3), (3, -1)),
}

# The G(Pi_3) list in printed order, repeats included.  The last entry is
# printed as a second "S_5"; it is read as S_10, which is used in the relations
# but never defined.
PI3_PRINTED: tuple[tuple[tuple[str, ...], tuple[int, int], tuple[int, int]], ...] = (
    (("e1", "f1"), (32, -31), (8, 0)),
    (("g1", "h1"), (32, -23), (8, -1)),
    (("i1",), (32, -7), (8, -2)),
    (("j1",), (32, -15), (8, -3)),
    (("g2", "h2", "i4"), (40, -25), (8, 0)),
    (("e2", "f2", "j4"), (40, -32), (8, -1)),
    (("j2",), (48, -35), (8, -2)),
    (("i2",), (48, -42), (8, -3)),
    (("j3",), (48, -10), (8, 0)),
    (("i3",), (48, -27), (8, -1)),
    (("e3", "f3"), (40, -33), (8, -2)),
    (("g3", "h3"), (40, -24), (8, -3)),
    (("i4",), (40, -25), (8, 0)),
    (("j4",), (40, -32), (8, -1)),
    (("g4", "h4", "j2"), (48, -35), (8, -2)),
    (("e4", "f4", "i2"), (48, -42), (8, -3)),
    (("e5", "f5"), (48, -43), (8, -4)),
    (("g5", "h5"), (48, -34), (8, -4)),
    (("i5",), (40, -8), (8, -4)),
    (("j5",), (40, -1), (8, -4)),
    (("e6", "h6", "i6", "j6"), (32, -28), (8, -5)),
    (("g6", "f6"), (24, -14), (8, -5)),
    (("i6",), (32, -28), (8, -5)),
    (("j6",), (32, -28), (8, -5)),
    (("e7", "h7", "i7", "j7"), (24, -21), (8, -6)),
    (("g7", "f7"), (32, -20), (8, -6)),
    (("i7",), (24, -21), (8, -6)),
    (("j7",), (24, -21), (8, -6)),
    (("e8", "h8", "i8", "j8"), (24, -22), (8, -7)),
    (("g8", "f8"), (24, -13), (8, -7)),
    (("i8",), (24, -22), (8, -7)),
    (("j8",), (24, -22), (8, -7)),
    (("1",), (48, -2), (8, -7)),
    (("14",), (48, -11), (8, -7)),
    (("4",), (48, -29), (8, -7)),
    (("7",), (48, -19), (8, -6)),
    (("12",), (40, -9), (8, -6)),
    (("2",), (48, -3), (8, -5)),
    (("11",), (48, -26), (8, -5)),
    (("13",), (40, -11), (8, -5)),
    (("3",), (24, -5), (8, -3)),
    (("8",), (40, -17), (8, -3)),
    (("9",), (32, -12), (8, -3)),
    (("5",), (24, -6), (8, -2)),
    (("6",), (40, -16), (8, -2)),
    (("10",), (32, -4), (8, -2)),
)

# Factor (label, adjointed) lists; a relation side is a sum of monomials.
Monomial = tuple[tuple[str, bool], ...]
Expr = tuple[Monomial, ...]


def _ss(x: str) -> Monomial:
    """S_x^* S_x"""
    return ((x, True), (x, False))


def _rr(x: str) -> Monomial:
    """S_x S_x^*"""
    return ((x, False), (x, True))


def _chain(*sides) -> tuple[Expr, ...]:
    return tuple(side if isinstance(side[0][0], tuple) else (side,) for side in sides)


# The displayed vertex relations for G(Pi_3), transcribed literally (the
# P_{e_11} line mixes S^*S and SS^* exactly as printed).
PI3_CHAINS: dict[str, tuple[Vertex, tuple[Expr, ...]]] = {
    "P_x13": ((1, 3), _chain(_ss("3"), _ss("g3"), _ss("j1"), _ss("e4"), _ss("9"), _ss("8"),
                             (_rr("e5"), _rr("g4"), _rr("i3"), _rr("7"), _rr("14"), _rr("2")))),
    "P_x22": ((2, 2), _chain(_ss("e5"), _ss("g5"), _ss("j5"), _ss("i5"),
                             (_rr("e6"), _rr("g6"), _rr("9"), _rr("10")))),
    "P_x23": ((2, 3), _chain(_ss("e7"), _ss("12"), _ss("g6"), _ss("7"), _ss("4"),
                             (_rr("e8"), _rr("g7"), _rr("5")))),
    "P_x32": ((3, 2), _chain(_ss("2"), _ss("g7"), _ss("e6"), _ss("13"), _ss("11"),
                             (_rr("e7"), _rr("g8"), _rr("3")))),
    "P_x33": ((3, 3), _chain(_ss("1"), _ss("14"), _ss("e8"), _ss("g8"))),
    "P_x31": ((3, 1), _chain(_ss("i1"), _ss("e3"), _ss("10"), _ss("g4"), _ss("5"), _ss("6"),
                             (_rr("e4"), _rr("g5"), _rr("11"), _rr("4"), _rr("j3"), _rr("1")))),
    "P_x11": ((1, 1), _chain((_ss("e1"), _rr("g1"), _rr("i1"), _rr("j1")))),
    "P_x21": ((2, 1), _chain(_ss("g1"), _ss("e2"), _ss("i3"),
                             (_rr("e3"), _rr("g2"), _rr("8"), _rr("12"), _rr("j5")))),
    "P_x12": ((1, 2), _chain(_ss("g2"), _ss("e1"), _ss("j3"),
                             (_rr("e2"), _rr("g3"), _rr("6"), _rr("i5"), _rr("13")))),
}


@dataclass
class CKFamily:
    name: str
    graph: DirectedMultigraph
    isometries: dict[str, APOperator]
    aliases: dict[str, str] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    paper_paths: dict[str, HamiltonianPath] = field(default_factory=dict)
    chains: dict[str, tuple[Vertex, tuple[Expr, ...]]] = field(default_factory=dict)

    def __post_init__(self):
        missing = [e.id for e in self.graph.edges if e.id not in self.isometries]
        if missing:
            raise InvalidArgument(f"family has no operator for edges {missing}")

    def resolve(self, label: str) -> str:
        return self.aliases.get(label, label)

    def __getitem__(self, label: str) -> APOperator:
        return self.isometries[self.resolve(label)]

    def aliases_of(self, label: str) -> set[str]:
        edge = self.resolve(label)
        return {a for a, e in self.aliases.items() if e == edge} | {edge}

    @cached_property
    def vertex_projections(self) -> dict[Vertex, APOperator]:
        """P_v from the first incoming edge; at a source, the sum of S S^*."""
        out = {}
        for v in self.graph.vertices:
            incoming = self.graph.in_edges(v)
            if incoming:
                s = self.isometries[incoming[0].id]
                out[v] = s.H @ s
            else:
                total = APOperator.zero()
                for e in self.graph.out_edges(v):
                    s = self.isometries[e.id]
                    total = total + s @ s.H
                out[v] = total
        return out

    def max_index(self, window: int) -> int:
        return max(op.max_index(window) for op in self.isometries.values())


def family_pi2() -> CKFamily:
    g = build_graph(2)
    ops = {k: APOperator.progression(row, col) for k, (row, col) in PI2_PRINTED.items()}
    paths = {name: path_from_edges(g, ids) for name, ids in PAPER_PATHS_PI2.items()}
    return CKFamily("pi2", g, ops, paper_paths=paths)


def family_pi3() -> CKFamily:
    g = build_graph(3)
    by_alias: dict[str, APOperator] = {}
    notes = ["S_10 is used in the relations but not defined; the second printed S_5 = sum E_{32t-4,8t-2} is read as S_10"]
    for names, row, col in PI3_PRINTED:
        op = APOperator.progression(row, col)
        for name in names:
            if name in by_alias and by_alias[name] != op:
                notes.append(f"S_{name} printed twice with different formulas: {by_alias[name]} and {op}")
                continue
            by_alias.setdefault(name, op)
    ops: dict[str, APOperator] = {}
    aliases: dict[str, str] = {}
    for src, dst, label in FIG2_ARCS:
        names = label.split("=")
        edge_id = names[0]
        defined = [by_alias[n] for n in names if n in by_alias]
        if not defined:
            raise InvalidArgument(f"no printed operator for arc {label}")
        if any(op != defined[0] for op in defined):
            notes.append(f"aliases {label} printed with different formulas")
        ops[edge_id] = defined[0]
        for n in names:
            aliases[n] = edge_id
    paths = {name: path_from_vertices(g, seq) for name, seq in PAPER_PATHS_PI3.items()}
    return CKFamily("pi3", g, ops, aliases=aliases, notes=notes, paper_paths=paths, chains=dict(PI3_CHAINS))


# --- verification -----------------------------------------------------------


@dataclass
class Check:
    relation_id: str
    kind: str
    relation: str
    symbolic: bool
    numeric: bool
    witness: tuple | None = None
    numeric_witness: tuple | None = None
    interior: int | None = None
    details: dict = field(default_factory=dict)

    @property
    def agree(self) -> bool:
        return self.symbolic == self.numeric

    def to_json(self) -> dict:
        return {
            "id": self.relation_id,
            "kind": self.kind,
            "relation": self.relation,
            "symbolic": "pass" if self.symbolic else "fail",
            "numeric": "pass" if self.numeric else "fail",
            "witness": _witness_json(self.witness),
            "numericWitness": _witness_json(self.numeric_witness),
            "interior": self.interior,
            **({"details": self.details} if self.details else {}),
        }


def _witness_json(w):
    if w is None:
        return None
    r, c, v = w
    return {"row": r, "col": c, "value": [v.real, v.imag]}


@dataclass
class VerificationReport:
    family: str
    window: int
    checks: list[Check]
    errata: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return all(c.symbolic and c.numeric for c in self.checks)

    @property
    def disagreements(self) -> list[Check]:
        return [c for c in self.checks if not c.agree]

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not (c.symbolic and c.numeric)]

    def check(self, relation_id: str) -> Check:
        for c in self.checks:
            if c.relation_id == relation_id:
                return c
        raise KeyError(relation_id)

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "window": self.window,
            "summary": {
                "checks": len(self.checks),
                "failed": len(self.failures()),
                "disagreements": len(self.disagreements),
                "windowInterior": min((c.interior for c in self.checks if c.interior is not None), default=None),
            },
            "checks": [c.to_json() for c in self.checks],
            "errata": self.errata,
            "notes": self.notes,
        }


def _fmt_monomial(m: Monomial) -> str:
    return "".join(f"S_{x}" + ("*" if dag else "") for x, dag in m)


def _fmt_expr(e: Expr) -> str:
    return " + ".join(_fmt_monomial(m) for m in e) if e else "0"


class _Evaluator:
    """Evaluates relation sides symbolically and on one truncation window."""

    def __init__(self, fam: CKFamily, window: int):
        self.fam = fam
        self.window = window
        self.dim = fam.max_index(window)
        self._trunc: dict[str, Truncated] = {}
        self._sym_cache: dict[Monomial, APOperator] = {}
        self._num_cache: dict[Monomial, Truncated] = {}

    def _base(self, label: str) -> Truncated:
        edge = self.fam.resolve(label)
        if edge not in self._trunc:
            self._trunc[edge] = Truncated.of(self.fam.isometries[edge], self.window, self.dim)
        return self._trunc[edge]

    def sym(self, e: Expr) -> APOperator:
        total = APOperator.zero()
        for m in e:
            if m not in self._sym_cache:
                acc = None
                for x, dag in m:
                    f = self.fam[x].H if dag else self.fam[x]
                    acc = f if acc is None else acc @ f
                self._sym_cache[m] = acc
            total = total + self._sym_cache[m]
        return total

    def num(self, e: Expr) -> Truncated:
        total = None
        for m in e:
            if m not in self._num_cache:
                acc = None
                for x, dag in m:
                    f = self._base(x).H if dag else self._base(x)
                    acc = f if acc is None else acc @ f
                self._num_cache[m] = acc
            t = self._num_cache[m]
            total = t if total is None else total + t
        return total

    def compare(self, relation_id, kind, lhs, rhs, relation=None, lhs_op=None, rhs_op=None,
                lhs_num=None, rhs_num=None) -> Check:
        a = lhs_op if lhs_op is not None else self.sym(lhs)
        b = rhs_op if rhs_op is not None else (self.sym(rhs) if rhs else APOperator.zero())
        witness = (a - b).first_nonzero()
        na = lhs_num if lhs_num is not None else self.num(lhs)
        if rhs_num is not None:
            nb = rhs_num
        elif rhs:
            nb = self.num(rhs)
        else:
            nb = None
        diff = na - nb if nb is not None else na
        interior = diff.interior()
        nwit = diff.first_nonzero(interior)
        if relation is None:
            relation = f"{_fmt_expr(lhs)} = {_fmt_expr(rhs) if rhs else '0'}"
        return Check(relation_id, kind, relation, witness is None, nwit is None, witness, nwit, interior)


def _vlabel(v: Vertex) -> str:
    return f"x{v[0]}{v[1]}"


def _vertex_expr(fam: CKFamily, v: Vertex) -> Expr:
    incoming = fam.graph.in_edges(v)
    if incoming:
        return (_ss(incoming[0].id),)
    return tuple(_rr(e.id) for e in fam.graph.out_edges(v))


def _exact(c: complex):
    k = round(c.real)
    return Fraction(k) if abs(c - k) < 1e-12 else c.real


def path_completeness(fam: CKFamily, path: HamiltonianPath, window: int = 64, _ev: _Evaluator | None = None,
                      name: str | None = None) -> Check:
    if not path.edge_ids:
        raise InvalidArgument("path has no edges")
    for eid in path.edge_ids:
        if fam.resolve(eid) not in fam.isometries:
            raise InvalidArgument(f"edge {eid} not in family {fam.name}")
    ev = _ev or _Evaluator(fam, window)
    lhs = tuple(_ss(e) for e in path.edge_ids)
    total = ev.sym(lhs)
    identity = Truncated.identity(ev.dim)
    chk = ev.compare(f"path:{name or '-'.join(path.edge_ids)}", "path-completeness", lhs, None,
                     relation=f"{_fmt_expr(lhs)} = I", rhs_op=APOperator.identity(), rhs_num=identity)
    diagonal = all(t.is_diagonal for t in total.terms)
    exact_cover = diagonal and ap.is_diagonal_projection(total) and ap.progressions_cover_N(total.terms)
    density = sum((Fraction(1, t.row_slope) * _exact(t.coeff) for t in total.terms if not t.is_single), Fraction(0)) \
        if diagonal else None
    chk.symbolic = exact_cover
    chk.details = {"density": str(density) if density is not None else None,
                   "progressions": [str(t) for t in total.terms]}
    return chk


def verify_ck(fam: CKFamily, window: int = 64) -> VerificationReport:
    if window < 1:
        raise InvalidArgument("window must be >= 1")
    ev = _Evaluator(fam, window)
    g = fam.graph
    checks: list[Check] = []
    ids = [e.id for e in g.edges]

    for eid in ids:
        s = fam.isometries[eid]
        chk = ev.compare(f"pi:{eid}", "partial-isometry", (((eid, False), (eid, True), (eid, False)),),
                         ((( eid, False),),))
        proj = s.H @ s
        chk.details = {"SstarS": str(proj), "diagonalProjection": ap.is_diagonal_projection(proj),
                       "infiniteRank": any(not t.is_single for t in proj.terms)}
        checks.append(chk)

    for a, b in itertools.combinations(ids, 2):
        checks.append(ev.compare(f"orth:{a}|{b}", "range-orthogonality", ((_rr(a) + _rr(b)),), None,
                                 relation=f"(S_{a}S_{a}*)(S_{b}S_{b}*) = 0"))

    for v in g.vertices:
        incoming = [e.id for e in g.in_edges(v)]
        for a, b in itertools.combinations(incoming, 2):
            checks.append(ev.compare(f"sss:{_vlabel(v)}:{a}|{b}", "SstarS-equals-Ptarget", (_ss(a),), (_ss(b),)))

    for v in g.vertices:
        outgoing = [e.id for e in g.out_edges(v)]
        if not outgoing:
            continue
        rhs = tuple(_rr(e) for e in outgoing)
        lhs = _vertex_expr(fam, v)
        if g.in_edges(v):
            chk = ev.compare(f"vsum:{_vlabel(v)}", "vertex-sum", lhs, rhs, relation=f"P_{_vlabel(v)} = {_fmt_expr(rhs)}")
        else:
            q_sym, q_num = ev.sym(rhs), ev.num(rhs)
            chk = ev.compare(f"vsum:{_vlabel(v)}", "vertex-sum", rhs, None, relation=f"({_fmt_expr(rhs)})^2 = {_fmt_expr(rhs)}",
                             lhs_op=q_sym @ q_sym, rhs_op=q_sym, lhs_num=q_num @ q_num, rhs_num=q_num)
        p = fam.vertex_projections[v]
        chk.details = {"P": str(p), "diagonalProjection": ap.is_diagonal_projection(p),
                       "infiniteRank": any(not t.is_single for t in p.terms)}
        checks.append(chk)

    for v, w in itertools.combinations(g.vertices, 2):
        pv, pw = fam.vertex_projections[v], fam.vertex_projections[w]
        nv, nw = ev.num(_vertex_expr(fam, v)), ev.num(_vertex_expr(fam, w))
        checks.append(ev.compare(f"vorth:{_vlabel(v)}|{_vlabel(w)}", "vertex-orthogonality", (), None,
                                 relation=f"P_{_vlabel(v)} P_{_vlabel(w)} = 0",
                                 lhs_op=pv @ pw, rhs_op=APOperator.zero(), lhs_num=nv @ nw,
                                 rhs_num=None))

    for name, path in fam.paper_paths.items():
        checks.append(path_completeness(fam, path, window, _ev=ev, name=name))

    for name, (v, sides) in fam.chains.items():
        chain = [_vertex_expr(fam, v)] + list(sides)
        for k in range(1, len(chain)):
            lhs, rhs = chain[k - 1], chain[k]
            plain = all(len(side) == 1 and side[0][0][1] for side in (lhs, rhs))
            label = f"P_{_vlabel(v)}" if k == 1 else _fmt_expr(lhs)
            checks.append(ev.compare(f"chain:{name}:{k}", "SstarS-equals-Ptarget" if plain else "vertex-sum",
                                     lhs, rhs, relation=f"{label} = {_fmt_expr(rhs)}"))

    checks.sort(key=lambda c: _natural_key(c.relation_id))
    return VerificationReport(fam.name, window, checks, errata=errata(fam), notes=list(fam.notes))


def _natural_key(s: str):
    import re

    return [int(p) if p.isdigit() else p for p in re.split(r"(\d+)", s)]


# --- parameters of the general construction ----------------------------------


def h_sequence(n: int) -> int:
    """Column modulus from h_2 = 3, h_{n+1} = h_n + 2n + 1."""
    if not isinstance(n, int) or n < 2:
        raise InvalidArgument(f"n must be an integer >= 2, got {n!r}")
    h = 3
    for k in range(2, n):
        h += 2 * k + 1
    return h


@dataclass(frozen=True)
class GeneralFamilyTemplate:
    n: int
    column_modulus: int
    edge_index_bound: int
    d_range: tuple[int, int]
    # vertex -> (out-degree, row slope E = deg (n^2-1), largest row shift A)
    vertices: dict

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "columnModulus": self.column_modulus,
            "edgeIndexBound": self.edge_index_bound,
            "D": list(self.d_range),
            "vertices": {
                _vlabel(v) if self.n < 10 else f"x{v[0]},{v[1]}": {"outDegree": d, "E": e, "A": [0, a]}
                for v, (d, e, a) in self.vertices.items()
            },
        }


def template_for(n: int) -> GeneralFamilyTemplate:
    h = h_sequence(n)
    g = build_graph(n)
    per_vertex = {}
    for v in g.vertices:
        deg = g.out_degree(v)
        per_vertex[v] = (deg, deg * h, deg * h)
    return GeneralFamilyTemplate(
        n=n,
        column_modulus=h,
        edge_index_bound=(n**3 + n**2) * (n - 1) // 2,
        d_range=(0, n * n - 2),
        vertices=per_vertex,
    )


def errata(fam: CKFamily) -> list[dict]:
    """Printed formulas that break the pattern the construction implies."""
    g = fam.graph
    h = h_sequence(g.n)
    out: list[dict] = []
    col_class: dict[Vertex, set[tuple[int, int]]] = {}
    for v in g.vertices:
        col_class[v] = {(t.col_slope, t.col_offset) for e in g.in_edges(v) for t in fam.isometries[e.id].terms}
    for e in g.edges:
        (t,) = fam.isometries[e.id].terms
        expected_slope = g.out_degree(e.src) * h
        if t.row_slope != expected_slope:
            out.append({"edge": e.id, "issue": f"row slope {t.row_slope}, expected out-degree x {h} = {expected_slope}"})
        src_cols = col_class[e.src]
        if len(src_cols) == 1:
            (cs, co), = src_cols
            if cs == h and (t.row_offset - co) % h:
                out.append({"edge": e.id,
                            "issue": f"row progression {t.row_slope}t{t.row_offset:+d} is not in the column class "
                                     f"{cs}t{co:+d} of its source {_vlabel(e.src)}"})
    for v, cls in col_class.items():
        if len(cls) > 1:
            out.append({"vertex": _vlabel(v),
                        "issue": "incoming edges have different column progressions: "
                                 + ", ".join(f"{e.id}:{fam.isometries[e.id]}" for e in g.in_edges(v))})
    for a, b in itertools.combinations(g.edges, 2):
        (ta,), (tb,) = fam.isometries[a.id].terms, fam.isometries[b.id].terms
        sol = ap._match(ta.row_slope, ta.row_offset, tb.row_slope, tb.row_offset)
        if sol is not None:
            out.append({"edges": [a.id, b.id], "issue": f"row progressions overlap, first shared row {ta.row_at(sol[0])}"})
    return out
