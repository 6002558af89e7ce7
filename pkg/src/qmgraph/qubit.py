"""Multi-qubit pure states, Schmidt ranks and product-state factorization."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument

NORM_TOL = 1e-9
RANK_TOL = 1e-10


@dataclass(frozen=True)
class QubitState:
    q: int
    amplitudes: np.ndarray
    norm_deviation: float = 0.0

    def to_json(self) -> dict:
        return {"q": self.q, "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes]}


def make_state(q: int, amplitudes) -> QubitState:
    if not isinstance(q, (int, np.integer)) or isinstance(q, bool) or q < 1:
        raise InvalidArgument(f"q must be a positive integer, got {q!r}")
    try:
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
    except (TypeError, ValueError) as exc:
        raise InvalidArgument(f"amplitudes are not complex numbers: {exc}") from exc
    if amps.size != 2**q:
        raise InvalidArgument(f"expected {2**q} amplitudes for q={q}, got {amps.size}")
    if not np.all(np.isfinite(amps)):
        raise InvalidArgument("amplitudes must be finite")
    norm = float(np.linalg.norm(amps))
    if norm == 0.0:
        raise InvalidArgument("zero vector is not a state")
    if abs(norm - 1.0) > NORM_TOL:
        raise InvalidArgument(f"state norm {norm:.6g} is not 1")
    return QubitState(int(q), amps / norm, abs(norm - 1.0))


def state_from_json(data) -> QubitState:
    try:
        q = data["q"]
        amps = [complex(float(re), float(im)) for re, im in data["amplitudes"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidArgument(f"malformed state: {exc}") from exc
    if not isinstance(q, int) or isinstance(q, bool):
        raise InvalidArgument("q must be an integer")
    return make_state(q, amps)


def _cut_matrix(amps: np.ndarray, q: int, cut: int) -> np.ndarray:
    return amps.reshape(2**cut, 2 ** (q - cut))


def schmidt_rank(s: QubitState, cut: int, tol: float = RANK_TOL) -> int:
    if not 1 <= cut <= s.q - 1:
        raise InvalidArgument(f"cut must lie in 1..{s.q - 1}, got {cut}")
    sv = np.linalg.svd(_cut_matrix(s.amplitudes, s.q, cut), compute_uv=False)
    return int(np.sum(sv > tol))


@dataclass(frozen=True)
class FactorizationResult:
    is_product: bool
    factors: tuple[np.ndarray, ...] | None = None
    failing_cut: int | None = None

    def to_json(self) -> dict:
        return {
            "isProduct": self.is_product,
            "factors": None if self.factors is None
            else [[[float(z.real), float(z.imag)] for z in f] for f in self.factors],
            "failingCut": self.failing_cut,
        }


def tensor(factors) -> np.ndarray:
    out = np.ones(1, dtype=complex)
    for f in factors:
        out = np.kron(out, np.asarray(f, dtype=complex))
    return out


def factor_product(s: QubitState, tol: float = RANK_TOL) -> FactorizationResult:
    """Peel one qubit at a time off the leading singular pair.

    The state is product iff every cut has Schmidt rank 1.  Factors are unit
    vectors; the global phase and the leftover scale land on the first one.
    """
    for cut in range(1, s.q):
        if schmidt_rank(s, cut, tol) > 1:
            return FactorizationResult(False, None, cut)
    rest = s.amplitudes
    factors = []
    for k in range(s.q - 1):
        u, sv, vh = np.linalg.svd(rest.reshape(2, -1), full_matrices=False)
        factors.append(u[:, 0])
        rest = sv[0] * vh[0]
    factors.append(rest)
    scale = np.linalg.norm(factors[-1])
    factors[-1] = factors[-1] / scale
    factors[0] = factors[0] * scale
    # move the phase: coefficient of the full tensor against the state
    recon = tensor(factors)
    phase = np.vdot(recon, s.amplitudes)
    factors[0] = factors[0] * (phase / abs(phase))
    return FactorizationResult(True, tuple(factors), None)


def reconstruction_error(s: QubitState, res: FactorizationResult) -> float:
    if not res.is_product:
        raise InvalidArgument("state is not a product")
    return float(np.max(np.abs(tensor(res.factors) - s.amplitudes)))


@dataclass
class ClaimReport:
    q: int
    mode: str
    total: int
    valid: int
    product_count: int
    entangled_count: int
    example_counterexamples: list = field(default_factory=list)
    seed: int | None = None

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "mode": self.mode,
            "seed": self.seed,
            "total": self.total,
            "valid": self.valid,
            "productCount": self.product_count,
            "entangledCount": self.entangled_count,
            "exampleCounterexamples": self.example_counterexamples,
        }


_PHASES = np.array([1, -1, 1j, -1j], dtype=complex)


def _phase_label(z: complex) -> str:
    return {1: "+1", -1: "-1", 1j: "+i", -1j: "-i"}[complex(z)]


def test_restricted_amplitude_claim(q: int, mode: str = "exhaustive", sample_count: int = 1000, seed: int = 0,
                                    tol: float = RANK_TOL) -> ClaimReport:
    """Classify states whose amplitudes all lie in {+-2^(-q/2), +-i 2^(-q/2)}."""
    if not isinstance(q, int) or q < 2:
        raise InvalidArgument(f"q must be an integer >= 2, got {q!r}")
    size = 2**q
    if mode == "exhaustive":
        if q >= 3:
            raise InvalidArgument(f"exhaustive mode is limited to q = 2 (4^{size} states for q={q}); use sampled mode")
        choices = itertools.product(range(4), repeat=size)
        seed = None
    elif mode == "sampled":
        if sample_count < 1:
            raise InvalidArgument("sample_count must be >= 1")
        rng = np.random.default_rng(seed)
        choices = (tuple(row) for row in rng.integers(0, 4, size=(sample_count, size)))
    else:
        raise InvalidArgument(f"unknown mode {mode!r}")
    scale = 2 ** (-q / 2)
    report = ClaimReport(q, mode, 0, 0, 0, 0, seed=seed)
    for idx in choices:
        phases = _PHASES[list(idx)]
        report.total += 1
        state = make_state(q, phases * scale)
        report.valid += 1
        if factor_product(state, tol).is_product:
            report.product_count += 1
        else:
            report.entangled_count += 1
            if len(report.example_counterexamples) < 10:
                report.example_counterexamples.append([_phase_label(p) for p in phases])
    return report


test_restricted_amplitude_claim.__test__ = False  # not a pytest test


def dimension_bookkeeping(i: int) -> dict:
    if not isinstance(i, int) or i < 2:
        raise InvalidArgument(f"i must be an integer >= 2, got {i!r}")
    k = i * i - 1 - ((i - 1) ** 2 + 1)
    return {"k": k, "subsystemQubits": k, "stateDim": 2 ** (4 * i - 6)}
