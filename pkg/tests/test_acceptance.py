"""The ten acceptance criteria, one test each.

Every test prints one PASS/FAIL line; the lines are repeated in the terminal
summary.  Tolerances and time limits are the fixed ones of the criteria.
"""

import itertools
import json
import time

import numpy as np

from qmgraph.channel import (
    KrausChannel,
    apply,
    channel_from_path,
    choi,
    choi_of_map,
    choi_to_kraus,
    confusability_basis,
    is_completely_positive,
    stinespring,
    verify_stinespring,
)
from qmgraph.ck import family_pi2, family_pi3, h_sequence, verify_ck
from qmgraph.cli import main
from qmgraph.errors import NotCompletelyPositive
from qmgraph.graph import (
    FIG1_EDGES,
    FIG2_ARCS,
    PAPER_PATHS_PI3,
    build_graph,
    count_hamiltonian_paths,
    enumerate_hamiltonian_paths,
    graph_stats,
)
from qmgraph.graph import HamiltonianPath
from qmgraph.qubit import dimension_bookkeeping, factor_product, make_state, tensor
from qmgraph.qubit import test_restricted_amplitude_claim as restricted_claim

from cli_cases import MALFORMED, expand, write_fixtures

CHOI_HERMITIAN_TOL = 1e-12
CHOI_PSD_TOL = 1e-10
ROUND_TRIP_TOL = 1e-9
STINESPRING_TOL = 1e-10
TRANSPOSE_EIG_TOL = 1e-9


def test_criterion_01_figure_fidelity(criterion):
    t = time.perf_counter()
    g2, g3 = build_graph(2), build_graph(3)
    elapsed = time.perf_counter() - t
    ok2 = len(g2.vertices) == 4 and set(g2.edges) == set(FIG1_EDGES)
    ok3 = len(g3.edges) == 36 and {(e.src, e.dst) for e in g3.edges} == {(s, d) for s, d, _ in FIG2_ARCS}
    ok = ok2 and ok3 and elapsed < 1.0
    assert criterion(1, "figure fidelity", ok, f"{elapsed:.3f} s")


def test_criterion_02_counting_formulas(criterion):
    bad = []
    for n in range(2, 7):
        g = build_graph(n)
        s = graph_stats(g)
        if len(g.edges) != n * n * (n * n - 1) // 2:
            bad.append(f"edges n={n}")
        if not s["sourceOutDegree"] == s["sinkInDegree"] == 2 * (n - 1):
            bad.append(f"degree n={n}")
    assert criterion(2, "counting formulas", not bad, ", ".join(bad))


def test_criterion_03_hamiltonian_paths(criterion):
    p2 = [p.edge_ids for p in enumerate_hamiltonian_paths(build_graph(2))]
    seqs = {p.vertex_sequence for p in enumerate_hamiltonian_paths(build_graph(3))}
    ok = p2 == [("e", "i", "g"), ("f", "j", "h")] and all(s in seqs for s in PAPER_PATHS_PI3.values())
    findings = []
    for n in (3, 4, 5):
        t = time.perf_counter()
        count = count_hamiltonian_paths(build_graph(n))
        elapsed = time.perf_counter() - t
        verdict = "agree" if count == 4 * n - 6 else "disagree"
        findings.append(f"n={n}: count={count} vs 4n-6={4 * n - 6} ({verdict})")
        print(f"    n={n}: count={count}, paper_formula=4n-6={4 * n - 6}, {verdict}, {elapsed:.2f} s")
        if n == 5:
            ok = ok and elapsed < 30.0
    assert criterion(3, "Hamiltonian paths", ok, "; ".join(findings))


def test_criterion_04_ck_exactness(criterion):
    fam = family_pi2()
    r = verify_ck(fam, 64)
    pis = all(r.check(f"pi:{e}").symbolic for e in "efhgij")
    paths = all(r.check(f"path:{p}").symbolic for p in ("P1", "P2"))
    fg = r.check("orth:f|g")
    overlap = (not fg.symbolic) and fg.witness is not None and fg.witness[0] == 2
    assert criterion(4, "CK exactness (pi2)", pis and paths and overlap,
                     f"f/g overlap witness row {fg.witness[0] if fg.witness else None}")


def test_criterion_05_oracle_agreement(criterion):
    detail = []
    ok = True
    for fam in (family_pi2(), family_pi3()):
        verdicts = {}
        for n in (16, 64, 256):
            r = verify_ck(fam, n)
            ok = ok and not r.disagreements
            verdicts[n] = [(c.relation_id, c.symbolic, c.numeric) for c in r.checks]
        stable = verdicts[16] == verdicts[64] == verdicts[256]
        ok = ok and stable
        detail.append(f"{fam.name}: {len(verdicts[64])} checks, "
                      f"{sum(not s for _, s, _ in verdicts[64])} failing, stable={stable}")
    assert criterion(5, "oracle agreement", ok, "; ".join(detail))


def _random_tp_channel(rng, m, r):
    z = rng.standard_normal((m * r, m)) + 1j * rng.standard_normal((m * r, m))
    v, _ = np.linalg.qr(z)
    return KrausChannel.of([v[k * m:(k + 1) * m] for k in range(r)])


def test_criterion_06_channel_round_trips(criterion):
    rng = np.random.default_rng(2024)
    worst = {"herm": 0.0, "eig": np.inf, "round": 0.0, "stine": 0.0}
    count = 0
    for _ in range(12):
        for m in (2, 3, 4):
            for r in (1, 2, 3):
                ch = _random_tp_channel(rng, m, r)
                c = choi(ch)
                worst["herm"] = max(worst["herm"], float(np.max(np.abs(c.matrix - c.matrix.conj().T))))
                worst["eig"] = min(worst["eig"], float(np.linalg.eigvalsh(c.matrix).min()))
                back = KrausChannel.of(choi_to_kraus(c))
                for _ in range(5):
                    X = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
                    worst["round"] = max(worst["round"], float(np.max(np.abs(apply(ch, X) - apply(back, X)))))
                st = verify_stinespring(ch, stinespring(ch), STINESPRING_TOL, seed=count)
                worst["stine"] = max(worst["stine"], st.action_deviation, st.isometry_deviation or 0.0)
                count += 1
    transpose = choi_of_map(lambda e: e.T, 2)
    cp = is_completely_positive(transpose)
    try:
        choi_to_kraus(transpose)
        rejected = False
    except NotCompletelyPositive:
        rejected = True
    ok = (count >= 100 and worst["herm"] <= CHOI_HERMITIAN_TOL and worst["eig"] >= -CHOI_PSD_TOL
          and worst["round"] <= ROUND_TRIP_TOL and worst["stine"] <= STINESPRING_TOL
          and not cp.flag and abs(cp.min_eigenvalue + 1) <= TRANSPOSE_EIG_TOL and rejected)
    detail = (f"{count} channels, herm {worst['herm']:.1e}, min eig {worst['eig']:.1e}, "
              f"round trip {worst['round']:.1e}, stinespring {worst['stine']:.1e}, transpose min eig {cp.min_eigenvalue:.12f}")
    assert criterion(6, "channel round trips", ok, detail)


def test_criterion_07_confusability(criterion):
    e11 = np.array([[1, 0], [0, 0]])
    e12 = np.array([[0, 1], [0, 0]])
    d_units = confusability_basis(KrausChannel.of([e11, e12])).dimension
    d_id = confusability_basis(KrausChannel.of([np.eye(2)])).dimension
    fam = family_pi2()
    stable = []
    for path in (("e", "i", "g"), ("f", "j", "h")):
        dims = [confusability_basis(channel_from_path(fam, HamiltonianPath(path, ()), n)).dimension for n in (2, 4)]
        stable.append(dims[0] == dims[1])
    ok = d_units == 4 and d_id == 1 and all(stable)
    assert criterion(7, "confusability", ok, f"E11/E12 dim {d_units}, identity dim {d_id}")


def _product_by_all_cuts(amps, q, tol=1e-10):
    """Brute force: Schmidt rank 1 across every bipartition of the qubits."""
    psi = amps.reshape([2] * q)
    for size in range(1, q):
        for part in itertools.combinations(range(q), size):
            rest = [k for k in range(q) if k not in part]
            m = np.transpose(psi, list(part) + rest).reshape(2**size, -1)
            if np.linalg.matrix_rank(m, tol=tol) > 1:
                return False
    return True


def _random_state(rng, q):
    kind = rng.integers(3)
    if kind == 0:
        v = rng.standard_normal(2**q) + 1j * rng.standard_normal(2**q)
    elif kind == 1:
        v = tensor([rng.standard_normal(2) + 1j * rng.standard_normal(2) for _ in range(q)])
    else:
        # product of an entangled block and single qubits
        split = int(rng.integers(1, q))
        v = tensor([rng.standard_normal(2**split) + 1j * rng.standard_normal(2**split)]
                   + [rng.standard_normal(2) + 1j * rng.standard_normal(2) for _ in range(q - split)])
    return v / np.linalg.norm(v)


def test_criterion_08_qubit(criterion):
    rng = np.random.default_rng(8)
    agree = total = 0
    for q in (2, 3, 4):
        for _ in range(1000):
            s = make_state(q, _random_state(rng, q))
            agree += factor_product(s).is_product == _product_by_all_cuts(s.amplitudes, q)
            total += 1
    t = time.perf_counter()
    rep = restricted_claim(2, "exhaustive")
    elapsed = time.perf_counter() - t
    target = factor_product(make_state(2, [0.5, 0.5, 0.5, -0.5]))
    dims = [dimension_bookkeeping(i)["stateDim"] for i in (2, 3, 4)]
    ok = (agree == total and rep.total == 256 and elapsed < 1.0 and not target.is_product
          and ["+1", "+1", "+1", "-1"] in rep.example_counterexamples and dims == [4, 64, 1024])
    detail = (f"{agree}/{total} agree; q=2: {rep.product_count} product, {rep.entangled_count} entangled "
              f"in {elapsed:.3f} s; dims {dims}")
    assert criterion(8, "qubit", ok, detail)


def test_criterion_09_h_sequence(criterion):
    printed = [h_sequence(n) for n in range(2, 7)] == [3, 8, 15, 24, 35]
    closed = all(h_sequence(n) == n * n - 1 for n in range(2, 13))
    assert criterion(9, "h-sequence", printed and closed)


def test_criterion_10_cli_determinism(criterion, tmp_path, capsys):
    runs = [
        ["ck-verify", "--family", "pi2"],
        ["ck-verify", "--family", "pi3", "--window", "16"],
        ["channel", "--family", "pi2", "--path-index", "0", "--window", "4", "--seed", "5"],
        ["qubit", "claim", "--q", "5", "--samples", "300", "--seed", "11"],
        ["paths", "--n", "3", "--format", "json"],
    ]
    identical = True
    codes_ok = True
    for k, args in enumerate(runs):
        outs = []
        for rep in range(2):
            path = tmp_path / f"run{k}_{rep}.json"
            code = main(args + ["--out", str(path)])
            codes_ok = codes_ok and code in (0, 1)
            outs.append(path.read_bytes())
        identical = identical and outs[0] == outs[1]
        json.loads(outs[0])
    fixtures = write_fixtures(tmp_path)
    codes = [main(expand(args, fixtures)) for args in MALFORMED]
    capsys.readouterr()
    fuzz_ok = len(MALFORMED) >= 50 and all(c == 2 for c in codes)
    ok = identical and codes_ok and fuzz_ok
    assert criterion(10, "CLI determinism", ok,
                     f"{len(runs)} configs byte-identical={identical}; {len(MALFORMED)} malformed inputs, "
                     f"{sum(c == 2 for c in codes)} exit 2")
