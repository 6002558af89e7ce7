"""Exact operators on l^2(N) built from arithmetic-progression matrix units.

A term ``c * sum_{t>=1} E_{a t + b, c t + d}`` is stored as an :class:`APTerm`.
Both slopes are positive (an infinite family) or both are zero (a single
matrix unit E_{b,d}).  Index arithmetic is exact; products are found by solving
the linear Diophantine equation that matches a column of the left factor with
a row of the right factor.
"""

from __future__ import annotations

import heapq
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np
import scipy.sparse as sp

from .errors import InvalidArgument

# Coefficients below this magnitude are dropped during canonicalization.
COEFF_EPS = 1e-12


def _lcm(values) -> int:
    return reduce(lambda x, y: x * y // math.gcd(x, y), values, 1)


@dataclass(frozen=True)
class APTerm:
    coeff: complex
    row_slope: int
    row_offset: int
    col_slope: int
    col_offset: int

    def __post_init__(self):
        for name in ("row_slope", "row_offset", "col_slope", "col_offset"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool):
                raise InvalidArgument(f"{name} must be an integer, got {v!r}")
        a, b, c, d = self.key
        if a < 0 or c < 0:
            raise InvalidArgument("slopes must be non-negative")
        if (a == 0) != (c == 0):
            raise InvalidArgument("row and column slopes must both be zero or both positive")
        if a + b < 1 or c + d < 1:
            raise InvalidArgument(f"indices must be >= 1 for every t >= 1, got {self.key}")
        object.__setattr__(self, "coeff", complex(self.coeff))

    @property
    def key(self) -> tuple[int, int, int, int]:
        return (int(self.row_slope), int(self.row_offset), int(self.col_slope), int(self.col_offset))

    @property
    def is_single(self) -> bool:
        return self.row_slope == 0

    @property
    def is_diagonal(self) -> bool:
        return self.row_slope == self.col_slope and self.row_offset == self.col_offset

    def row_at(self, t: int) -> int:
        return self.row_slope * t + self.row_offset

    def col_at(self, t: int) -> int:
        return self.col_slope * t + self.col_offset

    def step_of_row(self, r: int) -> int | None:
        a, b = self.row_slope, self.row_offset
        if a == 0:
            return 1 if r == b else None
        if r - b >= a and (r - b) % a == 0:
            return (r - b) // a
        return None

    def contains(self, r: int, c: int) -> bool:
        t = self.step_of_row(r)
        return t is not None and self.col_at(t) == c

    def adjoint(self) -> APTerm:
        return APTerm(self.coeff.conjugate(), self.col_slope, self.col_offset, self.row_slope, self.row_offset)

    def with_coeff(self, coeff: complex) -> APTerm:
        return APTerm(coeff, *self.key)

    def __str__(self):
        a, b, c, d = self.key
        coeff = "" if self.coeff == 1 else f"({self.coeff:g})·"
        if a == 0:
            return f"{coeff}E[{b},{d}]"
        return f"{coeff}Σ E[{_affine(a, b)},{_affine(c, d)}]"


def _affine(a: int, b: int) -> str:
    if b == 0:
        return f"{a}t"
    return f"{a}t{b:+d}"


def _canonical_terms(terms) -> tuple[APTerm, ...]:
    acc: dict[tuple, complex] = defaultdict(complex)
    for t in terms:
        acc[t.key] += t.coeff
    out = [APTerm(c, *k) for k, c in acc.items() if abs(c) > COEFF_EPS]
    out.sort(key=lambda t: t.key)
    return tuple(out)


def _point_key(r: int, c: int) -> tuple[int, int, int]:
    # Order in which witnesses are reported: smallest enclosing window first.
    return (max(r, c), r, c)


@dataclass(frozen=True)
class APOperator:
    """Finite sum of AP terms in canonical order (use :meth:`of` to build)."""

    terms: tuple[APTerm, ...] = ()

    @classmethod
    def of(cls, terms) -> APOperator:
        return cls(_canonical_terms(terms))

    @classmethod
    def zero(cls) -> APOperator:
        return cls(())

    @classmethod
    def unit(cls, r: int, c: int, coeff: complex = 1) -> APOperator:
        return cls.of([APTerm(coeff, 0, r, 0, c)])

    @classmethod
    def progression(cls, row: tuple[int, int], col: tuple[int, int], coeff: complex = 1) -> APOperator:
        """``coeff * sum_t E_{row[0] t + row[1], col[0] t + col[1]}``."""
        return cls.of([APTerm(coeff, row[0], row[1], col[0], col[1])])

    @classmethod
    def identity(cls) -> APOperator:
        return cls.progression((1, 0), (1, 0))

    @classmethod
    def diagonal(cls, progressions) -> APOperator:
        return cls.of([APTerm(1, a, b, a, b) for a, b in progressions])

    def canonical(self) -> APOperator:
        return APOperator.of(self.terms)

    def __add__(self, other: APOperator) -> APOperator:
        return add(self, other)

    def __sub__(self, other: APOperator) -> APOperator:
        return add(self, scale(-1, other))

    def __neg__(self) -> APOperator:
        return scale(-1, self)

    def __matmul__(self, other: APOperator) -> APOperator:
        return multiply(self, other)

    def __rmul__(self, c: complex) -> APOperator:
        return scale(c, self)

    @property
    def H(self) -> APOperator:
        return adjoint(self)

    def value_at(self, r: int, c: int) -> complex:
        return sum((t.coeff for t in self.terms if t.contains(r, c)), 0j)

    def is_zero(self) -> bool:
        return not self.terms or (not _has_nonzero_tail(self.terms) and _first_nonzero_finite(self.terms) is None)

    def equals(self, other: APOperator) -> bool:
        """Equality as operators, independent of how the sums are split."""
        return (self - other).is_zero()

    def first_nonzero(self):
        """Smallest (by enclosing window, then row, then column) nonzero entry."""
        if self.is_zero():
            return None
        return _first_nonzero_search(self.terms)

    def max_index(self, window: int) -> int:
        m = 0
        for t in self.terms:
            n = 1 if t.is_single else window
            m = max(m, t.row_at(n), t.col_at(n))
        return m

    def __str__(self):
        return " + ".join(str(t) for t in self.terms) if self.terms else "0"

    def to_json(self) -> dict:
        return {
            "terms": [
                {"coeff": [t.coeff.real, t.coeff.imag], "row": [t.row_slope, t.row_offset], "col": [t.col_slope, t.col_offset]}
                for t in self.terms
            ]
        }

    @classmethod
    def from_json(cls, data) -> APOperator:
        try:
            terms = []
            for item in data["terms"]:
                re, im = item.get("coeff", [1, 0])
                (a, b), (c, d) = item["row"], item["col"]
                terms.append(APTerm(complex(re, im), a, b, c, d))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidArgument):
                raise
            raise InvalidArgument(f"malformed operator JSON: {exc}") from exc
        return cls.of(terms)


def adjoint(a: APOperator) -> APOperator:
    return APOperator.of(t.adjoint() for t in a.terms)


def add(a: APOperator, b: APOperator) -> APOperator:
    return APOperator.of(a.terms + b.terms)


def scale(c: complex, a: APOperator) -> APOperator:
    return APOperator.of(t.with_coeff(c * t.coeff) for t in a.terms)


def _match(c: int, d: int, a2: int, b2: int):
    """Solve c t + d = a2 u + b2 over t, u >= 1.

    Returns None, or (t0, t_step, u0, u_step) describing the solutions
    t = t0 + t_step (w - 1), u = u0 + u_step (w - 1) for w >= 1.  A zero slope
    stands for a single matrix unit whose only parameter value is 1.
    """
    if c == 0 and a2 == 0:
        return (1, 0, 1, 0) if d == b2 else None
    if c == 0:
        diff = d - b2
        if diff >= a2 and diff % a2 == 0:
            return (1, 0, diff // a2, 0)
        return None
    if a2 == 0:
        diff = b2 - d
        if diff >= c and diff % c == 0:
            return (diff // c, 0, 1, 0)
        return None
    g = math.gcd(c, a2)
    rhs = b2 - d
    if rhs % g:
        return None
    cg, ag, rg = c // g, a2 // g, rhs // g
    # c t - a2 u = rhs  =>  t ≡ rg * cg^{-1} (mod ag)
    residue = (rg * pow(cg, -1, ag)) % ag if ag > 1 else 0
    # u >= 1  <=>  c t >= a2 + rhs
    t_min = max(1, -(-(a2 + rhs) // c))
    t0 = t_min + ((residue - t_min) % ag)
    u0 = (c * t0 - rhs) // a2
    return (t0, ag, u0, cg)


def _multiply_terms(x: APTerm, y: APTerm) -> APTerm | None:
    a, b, c, d = x.key
    a2, b2, c2, d2 = y.key
    sol = _match(c, d, a2, b2)
    if sol is None:
        return None
    t0, ts, u0, us = sol
    coeff = x.coeff * y.coeff
    if ts == 0 and us == 0:
        return APTerm(coeff, 0, a * t0 + b, 0, c2 * u0 + d2)
    return APTerm(coeff, a * ts, a * (t0 - ts) + b, c2 * us, c2 * (u0 - us) + d2)


def multiply(a: APOperator, b: APOperator) -> APOperator:
    out = []
    for x in a.terms:
        for y in b.terms:
            z = _multiply_terms(x, y)
            if z is not None:
                out.append(z)
    return APOperator.of(out)


# --- zero testing -----------------------------------------------------------


def _line_key(t: APTerm) -> tuple[int, int, int]:
    a, b, c, d = t.key
    g = math.gcd(a, c)
    p, q = a // g, c // g
    # every point (r, s) of the term satisfies q r - p s = q b - p d
    return (p, q, q * b - p * d)


def _lines(terms):
    groups = defaultdict(list)
    for t in terms:
        if not t.is_single:
            groups[_line_key(t)].append(t)
    return groups


def _tail_start_and_period(group):
    start = max(t.row_at(1) for t in group)
    period = _lcm(t.row_slope for t in group)
    return start, period


def _has_nonzero_tail(terms) -> bool:
    for group in _lines(terms).values():
        start, period = _tail_start_and_period(group)
        for r in range(start, start + period):
            s = sum((t.coeff for t in group if t.step_of_row(r) is not None), 0j)
            if abs(s) > COEFF_EPS:
                return True
    return False


def _candidate_points(terms):
    """Points outside every line's periodic tail; finite."""
    pts = set()
    for t in terms:
        if t.is_single:
            pts.add((t.row_offset, t.col_offset))
    for group in _lines(terms).values():
        start, _ = _tail_start_and_period(group)
        for t in group:
            step = 1
            while t.row_at(step) < start:
                pts.add((t.row_at(step), t.col_at(step)))
                step += 1
    return pts


def _first_nonzero_finite(terms):
    op = APOperator(terms)
    for r, c in sorted(_candidate_points(terms), key=lambda p: _point_key(*p)):
        v = op.value_at(r, c)
        if abs(v) > COEFF_EPS:
            return (r, c, v)
    return None


def _first_nonzero_search(terms):
    op = APOperator(terms)
    heap = []
    for k, t in enumerate(terms):
        heapq.heappush(heap, (_point_key(t.row_at(1), t.col_at(1)), k, 1))
    seen = set()
    while heap:
        key, k, step = heapq.heappop(heap)
        t = terms[k]
        r, c = t.row_at(step), t.col_at(step)
        if not t.is_single:
            heapq.heappush(heap, (_point_key(t.row_at(step + 1), t.col_at(step + 1)), k, step + 1))
        if (r, c) in seen:
            continue
        seen.add((r, c))
        v = op.value_at(r, c)
        if abs(v) > COEFF_EPS:
            return (r, c, v)
    return None


# --- diagonal progressions --------------------------------------------------


def is_diagonal_projection(a: APOperator) -> bool:
    a = a.canonical()
    for t in a.terms:
        if not t.is_diagonal or abs(t.coeff - 1) > COEFF_EPS:
            return False
    terms = a.terms
    for i in range(len(terms)):
        for j in range(i + 1, len(terms)):
            if not progressions_disjoint(terms[i], terms[j]):
                return False
    return True


def _require_diagonal(t: APTerm):
    if not t.is_diagonal:
        raise InvalidArgument(f"not a diagonal progression: {t}")


def progressions_disjoint(p: APTerm, q: APTerm) -> bool:
    _require_diagonal(p)
    _require_diagonal(q)
    return _match(p.row_slope, p.row_offset, q.row_slope, q.row_offset) is None


def progressions_cover_N(ps) -> bool:
    """True iff the diagonal progressions partition {1, 2, 3, ...} exactly."""
    ps = list(ps)
    for p in ps:
        _require_diagonal(p)
    for i in range(len(ps)):
        for j in range(i + 1, len(ps)):
            if not progressions_disjoint(ps[i], ps[j]):
                return False
    infinite = [p for p in ps if not p.is_single]
    if sum((Fraction(1, p.row_slope) for p in infinite), Fraction(0)) != 1:
        return False
    # Disjoint with density one: check every integer before the periodic
    # regime, then one full period of residues.
    start = max((p.row_at(1) for p in ps), default=1)
    period = _lcm(p.row_slope for p in infinite)
    hit = set()
    for p in ps:
        if p.is_single:
            hit.add(p.row_offset)
    for x in range(1, start + period):
        if x in hit:
            continue
        if not any(p.step_of_row(x) is not None for p in infinite):
            return False
    return True


# --- truncation -------------------------------------------------------------


def to_sparse(a: APOperator, window: int, dim: int | None = None) -> sp.csr_matrix:
    """Realize steps t = 1..window as a sparse matrix (index r -> row r-1)."""
    if window < 1:
        raise InvalidArgument("window must be >= 1")
    size = a.max_index(window) if dim is None else dim
    rows, cols, vals = [], [], []
    for t in a.terms:
        steps = np.arange(1, 2 if t.is_single else window + 1)
        rows.append(t.row_slope * steps + t.row_offset - 1)
        cols.append(t.col_slope * steps + t.col_offset - 1)
        vals.append(np.full(len(steps), t.coeff))
    if not rows:
        return sp.csr_matrix((size, size), dtype=complex)
    r, c, v = np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)
    if size < (max(r.max(), c.max()) + 1 if len(r) else 0):
        raise InvalidArgument(f"dim {size} too small for window {window}")
    return sp.csr_matrix((v, (r, c)), shape=(size, size), dtype=complex)


def to_dense(a: APOperator, window: int, dim: int | None = None) -> np.ndarray:
    return to_sparse(a, window, dim).toarray()


class Truncated:
    """A truncated operator together with which rows/columns are exact.

    Row r is exact when the truncated row equals the row of the infinite
    operator.  Exactness propagates through products and sums, so the leading
    block on which every row and column is exact (the window interior) can be
    compared without boundary artifacts.
    """

    def __init__(self, matrix: sp.csr_matrix, rows_exact: np.ndarray, cols_exact: np.ndarray):
        self.matrix = matrix
        self.rows_exact = rows_exact
        self.cols_exact = cols_exact

    @classmethod
    def of(cls, a: APOperator, window: int, dim: int) -> Truncated:
        rows_exact = np.ones(dim, dtype=bool)
        cols_exact = np.ones(dim, dtype=bool)
        for t in a.terms:
            if t.is_single:
                continue
            # steps t > window are lost
            lo_r, lo_c = t.row_at(window + 1), t.col_at(window + 1)
            rows_exact[np.arange(lo_r, dim + 1, t.row_slope) - 1] = False
            cols_exact[np.arange(lo_c, dim + 1, t.col_slope) - 1] = False
        return cls(to_sparse(a, window, dim), rows_exact, cols_exact)

    @classmethod
    def identity(cls, dim: int) -> Truncated:
        ones = np.ones(dim, dtype=bool)
        return cls(sp.identity(dim, dtype=complex, format="csr"), ones, ones.copy())

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def H(self) -> Truncated:
        return Truncated(self.matrix.conj().T.tocsr(), self.cols_exact, self.rows_exact)

    def __matmul__(self, other: Truncated) -> Truncated:
        support_a = abs(self.matrix) > 0
        support_b = abs(other.matrix) > 0
        bad_rows = (support_a @ (~other.rows_exact).astype(np.int64)) > 0
        bad_cols = ((~self.cols_exact).astype(np.int64) @ support_b) > 0
        return Truncated(
            (self.matrix @ other.matrix).tocsr(),
            self.rows_exact & ~np.asarray(bad_rows).ravel(),
            other.cols_exact & ~np.asarray(bad_cols).ravel(),
        )

    def __add__(self, other: Truncated) -> Truncated:
        return Truncated((self.matrix + other.matrix).tocsr(), self.rows_exact & other.rows_exact, self.cols_exact & other.cols_exact)

    def __sub__(self, other: Truncated) -> Truncated:
        return Truncated((self.matrix - other.matrix).tocsr(), self.rows_exact & other.rows_exact, self.cols_exact & other.cols_exact)

    def __rmul__(self, c: complex) -> Truncated:
        return Truncated((c * self.matrix).tocsr(), self.rows_exact, self.cols_exact)

    def interior(self) -> int:
        """Largest L such that indices 1..L are exact as rows and columns."""
        ok = self.rows_exact & self.cols_exact
        bad = np.flatnonzero(~ok)
        return int(bad[0]) if len(bad) else self.dim

    def first_nonzero(self, limit: int | None = None, tol: float = 1e-9):
        """Smallest nonzero entry inside the leading ``limit`` x ``limit`` block."""
        limit = self.interior() if limit is None else limit
        block = self.matrix[:limit, :limit].tocoo()
        best = None
        for r, c, v in zip(block.row, block.col, block.data):
            if abs(v) > tol:
                key = _point_key(int(r) + 1, int(c) + 1)
                if best is None or key < best[0]:
                    best = (key, (int(r) + 1, int(c) + 1, complex(v)))
        return None if best is None else best[1]
