"""Quantum channels in Kraus, Choi and Stinespring form.

Channels built from a Hamiltonian path act on a truncation of l^2(N).  Those
carry an ``interior``: the leading index range on which the truncated Kraus
operators agree with the infinite ones, and trace preservation is judged
only there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .ap import APOperator, Truncated, to_dense
from .ck import CKFamily
from .errors import InvalidArgument, NotCompletelyPositive
from .graph import HamiltonianPath

HERMITIAN_TOL = 1e-10
# above this dimension conjugations run through sparse Kraus operators
SPARSE_DIM = 128


@dataclass(frozen=True)
class KrausChannel:
    dim: int
    kraus: tuple[np.ndarray, ...]
    interior: int | None = None

    def __post_init__(self):
        if not self.kraus:
            raise InvalidArgument("a channel needs at least one Kraus operator")
        for k in self.kraus:
            if k.shape != (self.dim, self.dim):
                raise InvalidArgument(f"Kraus operator of shape {k.shape}, expected {(self.dim, self.dim)}")

    @classmethod
    def of(cls, kraus, interior: int | None = None) -> KrausChannel:
        mats = tuple(np.asarray(k, dtype=complex) for k in kraus)
        if not mats:
            raise InvalidArgument("a channel needs at least one Kraus operator")
        if mats[0].ndim != 2 or mats[0].shape[0] != mats[0].shape[1]:
            raise InvalidArgument("Kraus operators must be square matrices")
        return cls(mats[0].shape[0], mats, interior)

    @property
    def r(self) -> int:
        return len(self.kraus)

    @property
    def window_range(self) -> int:
        return self.dim if self.interior is None else self.interior


@dataclass(frozen=True)
class ChoiMatrix:
    dim: int
    matrix: np.ndarray


@dataclass(frozen=True)
class StinespringIsometry:
    m: int
    r: int
    V: np.ndarray


@dataclass(frozen=True)
class ConfusabilityBasis:
    dim: int
    basis: tuple[np.ndarray, ...]
    diagonal_span_dimension: int
    identity_residual: float

    @property
    def dimension(self) -> int:
        return len(self.basis)


def channel_from_path(fam: CKFamily, path: HamiltonianPath, window: int) -> KrausChannel:
    if not path.edge_ids:
        raise InvalidArgument("path has no edges")
    if window < 1:
        raise InvalidArgument("window must be >= 1")
    ops: list[APOperator] = []
    for eid in path.edge_ids:
        if fam.resolve(eid) not in fam.isometries:
            raise InvalidArgument(f"edge {eid} not in family {fam.name}")
        ops.append(fam[eid])
    dim = max(op.max_index(window) for op in ops)
    total = None
    for op in ops:
        t = Truncated.of(op, window, dim)
        t = t.H @ t
        total = t if total is None else total + t
    kraus = tuple(to_dense(op, window, dim) for op in ops)
    return KrausChannel(dim, kraus, total.interior())


def _check_input(ch: KrausChannel, X) -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    if X.shape != (ch.dim, ch.dim):
        raise InvalidArgument(f"input of shape {X.shape}, channel acts on {ch.dim}x{ch.dim}")
    return X


def _conjugate_sum(mats, X: np.ndarray) -> np.ndarray:
    """sum_k S_k X S_k^*"""
    out = np.zeros_like(X)
    for s in mats:
        if X.shape[0] > SPARSE_DIM:
            s = sp.csr_matrix(s)
            y = np.asarray(s @ X)
            out += np.asarray(s @ y.conj().T).conj().T
        else:
            out += s @ X @ s.conj().T
    return out


def apply(ch: KrausChannel, X) -> np.ndarray:
    return _conjugate_sum(ch.kraus, _check_input(ch, X))


@dataclass(frozen=True)
class TPResult:
    flag: bool
    max_deviation: float
    interior: int


def is_trace_preserving(ch: KrausChannel, tol: float = 1e-10) -> TPResult:
    if not tol > 0:
        raise InvalidArgument("tol must be positive")
    total = sum(s.conj().T @ s for s in ch.kraus)
    L = ch.window_range
    dev = float(np.max(np.abs(total[:L, :L] - np.eye(L)))) if L else 0.0
    return TPResult(dev <= tol, dev, L)


def choi(ch: KrausChannel) -> ChoiMatrix:
    """C = sum_ij E_ij (x) Psi(E_ij), unnormalized."""
    m = ch.dim
    vecs = np.stack([s.T.reshape(-1) for s in ch.kraus], axis=1)
    return ChoiMatrix(m, vecs @ vecs.conj().T)


def choi_of_map(fn, m: int) -> ChoiMatrix:
    """Blockwise assembly for an arbitrary linear map on M_m."""
    c = np.zeros((m * m, m * m), dtype=complex)
    for i in range(m):
        for j in range(m):
            e = np.zeros((m, m), dtype=complex)
            e[i, j] = 1
            c[i * m:(i + 1) * m, j * m:(j + 1) * m] = fn(e)
    return ChoiMatrix(m, c)


@dataclass(frozen=True)
class CPResult:
    flag: bool
    min_eigenvalue: float


def is_completely_positive(c: ChoiMatrix, tol: float = 1e-10) -> CPResult:
    if not tol > 0:
        raise InvalidArgument("tol must be positive")
    herm = float(np.max(np.abs(c.matrix - c.matrix.conj().T))) if c.matrix.size else 0.0
    if herm > HERMITIAN_TOL:
        raise InvalidArgument(f"Choi matrix is not Hermitian (deviation {herm:.3g})")
    lo = float(np.linalg.eigvalsh(c.matrix).min()) if c.matrix.size else 0.0
    return CPResult(lo >= -tol, lo)


def gram_min_eigenvalue(ch: KrausChannel) -> float:
    """Smallest Choi eigenvalue from the r x r Gram matrix of the Kraus vectors.

    The Choi matrix is V V^* with V the stacked vectorized Kraus operators, so
    its nonzero spectrum is that of V^* V.  Cheap when m is large.
    """
    vecs = np.stack([s.reshape(-1) for s in ch.kraus], axis=1)
    ev = np.linalg.eigvalsh(vecs.conj().T @ vecs)
    lo = float(ev.min())
    return min(lo, 0.0) if ch.dim * ch.dim > ch.r else lo


def partial_traces(c: ChoiMatrix, interior: int | None = None) -> dict:
    """Both partial traces of C and which of them is the identity.

    For a truncated channel only the leading ``interior`` block is compared.
    """
    m = c.dim
    L = m if interior is None else interior
    t = c.matrix.reshape(m, m, m, m)
    over_first = np.einsum("iaib->ab", t)
    over_second = np.einsum("iaja->ij", t)
    eye = np.eye(L)
    return {
        "overFirst": over_first,
        "overSecond": over_second,
        "firstIsIdentity": bool(np.allclose(over_first[:L, :L], eye, atol=1e-9)),
        "secondIsIdentity": bool(np.allclose(over_second[:L, :L], eye, atol=1e-9)),
    }


def stinespring(ch: KrausChannel) -> StinespringIsometry:
    """V = sum_k e_k (x) S_k, i.e. the Kraus operators stacked vertically."""
    return StinespringIsometry(ch.dim, ch.r, np.vstack(ch.kraus))


def trace_environment(Y: np.ndarray, m: int, r: int) -> np.ndarray:
    return np.einsum("kakb->ab", Y.reshape(r, m, r, m))


def dilated_action(V: StinespringIsometry, X: np.ndarray) -> np.ndarray:
    """(I (x) Tr_env)(V X V^*), summing only the diagonal environment blocks."""
    m = V.m
    return _conjugate_sum([V.V[k * m:(k + 1) * m] for k in range(V.r)], X)


@dataclass(frozen=True)
class StinespringCheck:
    flag: bool
    action_deviation: float
    isometry_deviation: float | None


def verify_stinespring(ch: KrausChannel, V: StinespringIsometry, tol: float = 1e-10, seed: int = 0,
                       samples: int = 20) -> StinespringCheck:
    if V.V.shape != (ch.dim * V.r, ch.dim):
        raise InvalidArgument(f"isometry of shape {V.V.shape} does not fit the channel")
    rng = np.random.default_rng(seed)
    m = ch.dim
    worst = 0.0
    for _ in range(max(samples, 20)):
        X = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        lhs = apply(ch, X)
        if m * V.r <= 256:
            rhs = trace_environment(V.V @ X @ V.V.conj().T, m, V.r)
        else:
            rhs = dilated_action(V, X)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    iso = None
    ok = worst <= tol
    if is_trace_preserving(ch, tol).flag:
        L = ch.window_range
        vv = V.V.conj().T @ V.V
        iso = float(np.max(np.abs(vv[:L, :L] - np.eye(L)))) if L else 0.0
        ok = ok and iso <= tol
    return StinespringCheck(ok, worst, iso)


def choi_to_kraus(c: ChoiMatrix, tol: float = 1e-10) -> list[np.ndarray]:
    w, v = np.linalg.eigh(c.matrix)
    if w.size and w.min() < -tol:
        raise NotCompletelyPositive(float(w.min()), tol)
    m = c.dim
    return [np.sqrt(lam) * v[:, k].reshape(m, m).T for k, lam in enumerate(w) if lam > tol]


def _span_basis(mats, tol: float) -> list[np.ndarray]:
    basis: list[np.ndarray] = []
    q: list[np.ndarray] = []
    for a in mats:
        vec = a.reshape(-1).astype(complex)
        res = vec.copy()
        for _ in range(2):
            for u in q:
                res -= (u.conj() @ res) * u
        norm = np.linalg.norm(res)
        if norm > tol * max(1.0, np.linalg.norm(vec)):
            q.append(res / norm)
            basis.append(a)
    return basis


def _residual(vec: np.ndarray, basis: list[np.ndarray]) -> float:
    if not basis:
        return float(np.linalg.norm(vec))
    A = np.stack([b.reshape(-1) for b in basis], axis=1)
    coef, *_ = np.linalg.lstsq(A, vec, rcond=None)
    return float(np.linalg.norm(A @ coef - vec))


def confusability_basis(ch: KrausChannel, tol: float = 1e-10) -> ConfusabilityBasis:
    """Basis of span{S_i^* S_j}; truncated channels are cut to their interior."""
    L = ch.window_range
    if ch.dim > SPARSE_DIM:
        ks = [sp.csr_matrix(s) for s in ch.kraus]
        prods = [(a.conj().T @ b)[:L, :L].toarray() for a in ks for b in ks]
    else:
        ks = list(ch.kraus)
        prods = [(a.conj().T @ b)[:L, :L] for a in ks for b in ks]
    basis = _span_basis(prods, tol)
    r = len(ks)
    diag = _span_basis([prods[i * r + i] for i in range(r)], tol)
    return ConfusabilityBasis(L, tuple(basis), len(diag), _residual(np.eye(L, dtype=complex).reshape(-1), basis))


def matrix_to_json(X: np.ndarray) -> dict:
    X = np.asarray(X, dtype=complex)
    return {"dim": int(X.shape[0]), "entries": [[float(z.real), float(z.imag)] for z in X.reshape(-1)]}


def matrix_from_json(data) -> np.ndarray:
    try:
        m = int(data["dim"])
        entries = data["entries"]
        if m < 1 or len(entries) != m * m:
            raise InvalidArgument(f"expected {m * m} entries")
        vals = [complex(float(re), float(im)) for re, im in entries]
    except InvalidArgument:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidArgument(f"malformed matrix: {exc}") from exc
    return np.array(vals, dtype=complex).reshape(m, m)
