import time

import numpy as np
import pytest

from qmgraph.errors import InvalidArgument
from qmgraph.qubit import (
    dimension_bookkeeping,
    factor_product,
    make_state,
    reconstruction_error,
    schmidt_rank,
    state_from_json,
    tensor,
    test_restricted_amplitude_claim as claim,
)


def is_product_by_purity(amps, q, tol=1e-9):
    """A pure state is product iff each single-qubit reduced state is pure."""
    psi = amps.reshape([2] * q)
    for k in range(q):
        m = np.moveaxis(psi, k, 0).reshape(2, -1)
        rho = m @ m.conj().T
        if abs(np.trace(rho @ rho).real - 1) > tol:
            return False
    return True


def random_state(rng, q):
    v = rng.standard_normal(2**q) + 1j * rng.standard_normal(2**q)
    return v / np.linalg.norm(v)


def random_product(rng, q):
    return tensor([random_state(rng, 1) for _ in range(q)])


def test_make_state():
    s = make_state(1, [1, 0])
    assert np.array_equal(s.amplitudes, [1, 0])
    make_state(2, [0.5, 0.5j, -0.5, -0.5j])
    for q, amps in [(2, [1, 1, 0, 0]), (2, [0, 0, 0, 0]), (2, [1, 0]), (0, [1]), (1, [np.nan, 1])]:
        with pytest.raises(InvalidArgument):
            make_state(q, amps)


def test_schmidt_rank_examples():
    assert schmidt_rank(make_state(2, [1, 0, 0, 0]), 1) == 1
    bell = make_state(2, np.array([1, 0, 0, 1]) / np.sqrt(2))
    assert schmidt_rank(bell, 1) == 2
    assert np.allclose(np.linalg.svd(bell.amplitudes.reshape(2, 2), compute_uv=False), [2**-0.5] * 2)
    assert schmidt_rank(make_state(2, [0.5] * 4), 1) == 1
    with pytest.raises(InvalidArgument):
        schmidt_rank(bell, 2)


def test_factor_examples():
    r = factor_product(make_state(2, [1, 0, 0, 0]))
    assert r.is_product
    assert np.allclose(np.abs(r.factors[0]), [1, 0]) and np.allclose(np.abs(r.factors[1]), [1, 0])
    r = factor_product(make_state(2, [0.5, 0.5, 0.5, -0.5]))
    assert not r.is_product and r.failing_cut == 1
    plus = np.array([1, 1]) / np.sqrt(2)
    s = make_state(3, tensor([plus] * 3))
    r = factor_product(s)
    assert r.is_product and reconstruction_error(s, r) <= 1e-9


def test_schmidt_rank_phase_invariant():
    rng = np.random.default_rng(0)
    for q in (2, 3, 4):
        s = make_state(q, random_state(rng, q))
        t = make_state(q, np.exp(1.3j) * s.amplitudes)
        for cut in range(1, q):
            assert schmidt_rank(s, cut) == schmidt_rank(t, cut)


@pytest.mark.parametrize("q", [2, 3, 4])
def test_factor_agrees_with_purity_oracle(q):
    rng = np.random.default_rng(100 + q)
    agree = 0
    for k in range(1000):
        amps = random_product(rng, q) if k % 2 else random_state(rng, q)
        s = make_state(q, amps)
        r = factor_product(s)
        agree += r.is_product == is_product_by_purity(s.amplitudes, q)
        if r.is_product:
            assert reconstruction_error(s, r) <= 1e-9
    assert agree == 1000


def test_restricted_claim_q2():
    t = time.perf_counter()
    rep = claim(2, "exhaustive")
    assert time.perf_counter() - t < 1.0
    assert rep.total == 256 and rep.valid == 256
    assert rep.product_count + rep.entangled_count == 256
    assert ["+1", "+1", "+1", "-1"] in rep.example_counterexamples
    assert len(rep.example_counterexamples) <= 10
    assert factor_product(make_state(2, [0.5] * 4)).is_product


def test_restricted_claim_q2_matches_oracle():
    import itertools

    phases = [1, -1, 1j, -1j]
    expected = sum(is_product_by_purity(np.array(p) / 2, 2) for p in itertools.product(phases, repeat=4))
    assert claim(2).product_count == expected


def test_restricted_claim_sampled_reproducible():
    a = claim(6, "sampled", 1000, seed=7)
    b = claim(6, "sampled", 1000, seed=7)
    assert a.to_json() == b.to_json()
    assert a.total == 1000


def test_restricted_claim_rejects():
    with pytest.raises(InvalidArgument):
        claim(3, "exhaustive")
    with pytest.raises(InvalidArgument):
        claim(1)
    with pytest.raises(InvalidArgument):
        claim(2, "other")


def test_dimension_bookkeeping():
    assert [dimension_bookkeeping(i)["stateDim"] for i in (2, 3, 4)] == [4, 64, 1024]
    assert [dimension_bookkeeping(i)["k"] for i in (2, 3, 4)] == [1, 3, 5]
    for i in range(2, 7):
        d = dimension_bookkeeping(i)
        assert d["stateDim"] == (2 ** d["subsystemQubits"]) ** 2 == 2 ** (4 * i - 6)


def test_state_json():
    s = state_from_json({"q": 1, "amplitudes": [[0, 1], [0, 0]]})
    assert s.amplitudes[0] == 1j
    for bad in [{}, {"q": 1}, {"q": "1", "amplitudes": [[1, 0], [0, 0]]}, {"q": 1, "amplitudes": [[1, 0]]}]:
        with pytest.raises(InvalidArgument):
            state_from_json(bad)
