"""Command-line front end.

Exit codes: 0 everything verified, 1 verified with failing checks,
2 usage or input error.
"""

from __future__ import annotations

import json
import os
import sys
import tempfile

import click
import numpy as np

from . import __version__
from .ck import family_pi2, family_pi3, verify_ck
from .channel import (
    channel_from_path,
    choi,
    confusability_basis,
    gram_min_eigenvalue,
    is_completely_positive,
    is_trace_preserving,
    partial_traces,
    stinespring,
    verify_stinespring,
)
from .errors import InvalidArgument
from .graph import (
    PAPER_PATHS_PI3,
    build_graph,
    count_hamiltonian_paths,
    enumerate_hamiltonian_paths,
    export_graph,
    iter_hamiltonian_paths,
)
from .qubit import factor_product, reconstruction_error, state_from_json, test_restricted_amplitude_claim

MAX_PATHS_N = 5
# dense channels beyond this dimension do not fit comfortably in memory
MAX_CHANNEL_DIM = 1024
# above this the Choi spectrum is taken from the r x r Gram matrix
MAX_CHOI_DIM = 32

FAMILIES = {"pi2": family_pi2, "pi3": family_pi3}


def _emit(text: str, out: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out is None:
        click.echo(text, nl=False)
        return
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qmgraph-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _report(command: str, config: dict, result: dict, interior=None) -> str:
    doc = {
        "tool": {"name": "qmgraph", "version": __version__},
        "command": command,
        "config": config,
        "windowInterior": None if interior is None else [1, interior],
        "result": result,
    }
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False)


def common_options(fn):
    fn = click.option("--format", "fmt", type=click.Choice(["json", "dot", "text"]), default=None,
                      help="Output format.")(fn)
    fn = click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None,
                      help="Write output to this file instead of stdout.")(fn)
    fn = click.option("--seed", type=int, default=0, show_default=True, help="Seed for random checks.")(fn)
    fn = click.option("--tol", type=float, default=1e-10, show_default=True, help="Numerical tolerance.")(fn)
    fn = click.option("--window", type=int, default=64, show_default=True,
                      help="Truncation window (progression steps kept).")(fn)
    return fn


def _config(**kw) -> dict:
    kw.pop("out", None)
    return {k: v for k, v in sorted(kw.items())}


def _check_common(window: int, tol: float) -> None:
    if window < 1:
        raise InvalidArgument("--window must be >= 1")
    if not (tol > 0 and np.isfinite(tol)):
        raise InvalidArgument("--tol must be a positive finite number")


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="qmgraph")
def cli():
    """Verify the computational claims about the quantum-matrix graphs G(Pi_n)."""


@cli.command("graph")
@click.option("--n", "n", type=int, required=True, help="Matrix size n >= 2.")
@common_options
def cmd_graph(n, window, tol, seed, out, fmt):
    """Build G(Pi_n) and export it as JSON or DOT."""
    fmt = fmt or "json"
    if fmt == "text":
        raise InvalidArgument("graph supports --format json or dot")
    _emit(export_graph(build_graph(n), fmt), out)
    return 0


@cli.command("paths")
@click.option("--n", "n", type=int, required=True, help="Matrix size, 2..5.")
@click.option("--limit", type=int, default=200, show_default=True, help="Maximum number of paths listed.")
@common_options
def cmd_paths(n, limit, window, tol, seed, out, fmt):
    """Count and list Hamiltonian paths and compare with 4n-6."""
    if not 2 <= n <= MAX_PATHS_N:
        raise InvalidArgument(f"--n must lie in 2..{MAX_PATHS_N} (exhaustive enumeration budget)")
    if limit < 0:
        raise InvalidArgument("--limit must be >= 0")
    fmt = fmt or "text"
    if fmt == "dot":
        raise InvalidArgument("paths supports --format text or json")
    g = build_graph(n)
    count = count_hamiltonian_paths(g)
    formula = 4 * n - 6
    if n <= 3:
        listed = enumerate_hamiltonian_paths(g)[:limit]
        order = "edge-id lexicographic"
    else:
        listed = []
        for p in iter_hamiltonian_paths(g):
            if len(listed) >= limit:
                break
            listed.append(p)
        order = "depth-first, targets in lexicographic order"
    found = None
    if n == 3:
        seqs = {p.vertex_sequence for p in enumerate_hamiltonian_paths(g)}
        found = {name: seq in seqs for name, seq in PAPER_PATHS_PI3.items()}
    agree = count == formula
    summary = f"count={count}, paper_formula=4n-6={formula}, agree={'yes' if agree else 'no'}"
    if fmt == "json":
        result = {
            "n": n,
            "count": count,
            "vertexSequenceCount": count_hamiltonian_paths(g, labeled=False),
            "paperFormula": formula,
            "agree": agree,
            "listed": len(listed),
            "order": order,
            "paths": [{"edges": list(p.edge_ids), "vertices": [g.label(v) for v in p.vertex_sequence]}
                      for p in listed],
            "paperPathsFound": found,
        }
        _emit(_report("paths", _config(n=n, limit=limit, window=window, tol=tol, seed=seed, format=fmt), result), out)
    else:
        lines = [" ".join(g.label(v) for v in p.vertex_sequence) + "  [" + ",".join(p.edge_ids) + "]"
                 for p in listed]
        if count > len(listed):
            lines.append(f"... {count - len(listed)} more not listed")
        if found is not None:
            lines += [f"{name}: {'present' if ok else 'MISSING'}" for name, ok in found.items()]
        lines.append(summary)
        _emit("\n".join(lines), out)
    return 0


@cli.command("ck-verify")
@click.option("--family", type=click.Choice(sorted(FAMILIES)), required=True)
@common_options
def cmd_ck_verify(family, window, tol, seed, out, fmt):
    """Verify the Cuntz-Krieger relations of a printed family."""
    _check_common(window, tol)
    if fmt not in (None, "json"):
        raise InvalidArgument("ck-verify writes JSON only")
    report = verify_ck(FAMILIES[family](), window)
    data = report.to_json()
    text = _report("ck-verify", _config(family=family, window=window, tol=tol, seed=seed, format="json"), data,
                   data["summary"]["windowInterior"])
    _emit(text, out)
    return 0 if report.all_pass else 1


@cli.command("channel")
@click.option("--family", type=click.Choice(sorted(FAMILIES)), default="pi2", show_default=True)
@click.option("--path-index", type=int, required=True, help="Index into the sorted Hamiltonian path list.")
@common_options
def cmd_channel(family, path_index, window, tol, seed, out, fmt):
    """Build the Kraus channel of one Hamiltonian path and check it."""
    _check_common(window, tol)
    if fmt not in (None, "json"):
        raise InvalidArgument("channel writes JSON only")
    fam = FAMILIES[family]()
    paths = enumerate_hamiltonian_paths(fam.graph)
    if not 0 <= path_index < len(paths):
        raise InvalidArgument(f"--path-index must lie in 0..{len(paths) - 1}")
    path = paths[path_index]
    dim = max(fam[e].max_index(window) for e in path.edge_ids)
    if dim > MAX_CHANNEL_DIM:
        raise InvalidArgument(f"dense dimension {dim} exceeds {MAX_CHANNEL_DIM}; use a smaller --window")
    ch = channel_from_path(fam, path, window)
    tp = is_trace_preserving(ch, tol)
    result = {
        "path": list(path.edge_ids),
        "dim": ch.dim,
        "krausCount": ch.r,
        "tracePreserving": {"flag": tp.flag, "maxDeviation": tp.max_deviation},
    }
    if ch.dim <= MAX_CHOI_DIM:
        c = choi(ch)
        cp = is_completely_positive(c, tol)
        pt = partial_traces(c, ch.interior)
        result["completelyPositive"] = {"flag": cp.flag, "minEigenvalue": cp.min_eigenvalue, "method": "choi"}
        result["choiPartialTraces"] = {"firstIsIdentity": pt["firstIsIdentity"],
                                       "secondIsIdentity": pt["secondIsIdentity"]}
    else:
        lo = gram_min_eigenvalue(ch)
        result["completelyPositive"] = {"flag": lo >= -tol, "minEigenvalue": lo, "method": "gram"}
    st = verify_stinespring(ch, stinespring(ch), tol, seed=seed)
    result["stinespring"] = {"flag": st.flag, "actionDeviation": st.action_deviation,
                             "isometryDeviation": st.isometry_deviation, "environmentDim": ch.r}
    cb = confusability_basis(ch, tol)
    result["confusability"] = {"dimension": cb.dimension, "diagonalSpanDimension": cb.diagonal_span_dimension,
                               "identityResidual": cb.identity_residual}
    ok = tp.flag and result["completelyPositive"]["flag"] and st.flag
    config = _config(family=family, path_index=path_index, window=window, tol=tol, seed=seed, format="json")
    _emit(_report("channel", config, result, ch.interior), out)
    return 0 if ok else 1


@cli.group("qubit")
def cmd_qubit():
    """Product-state factorization and the restricted-amplitude claim."""


@cmd_qubit.command("factor")
@click.option("--file", "path", type=click.Path(exists=True, dir_okay=False), required=True,
              help='State fixture {"q": int, "amplitudes": [[re, im], ...]}.')
@common_options
def cmd_qubit_factor(path, window, tol, seed, out, fmt):
    """Decide whether a state is a product state."""
    _check_common(window, tol)
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InvalidArgument(f"cannot parse {path}: {exc}") from exc
    s = state_from_json(data)
    res = factor_product(s, tol)
    result = res.to_json()
    result["q"] = s.q
    if res.is_product:
        result["reconstructionError"] = reconstruction_error(s, res)
    _emit(_report("qubit factor", _config(file=os.path.basename(path), tol=tol, seed=seed, format="json"), result), out)
    return 0


@cmd_qubit.command("claim")
@click.option("--q", "q", type=int, required=True, help="Number of qubits, >= 2.")
@click.option("--exhaustive/--sampled", default=False, help="Enumerate every state (q=2 only) or sample.")
@click.option("--samples", type=int, default=1000, show_default=True)
@common_options
def cmd_qubit_claim(q, exhaustive, samples, window, tol, seed, out, fmt):
    """Classify restricted-amplitude states as product or entangled."""
    _check_common(window, tol)
    mode = "exhaustive" if exhaustive else "sampled"
    rep = test_restricted_amplitude_claim(q, mode, samples, seed, tol)
    config = _config(q=q, mode=mode, samples=None if exhaustive else samples, tol=tol, seed=seed, format="json")
    _emit(_report("qubit claim", config, rep.to_json()), out)
    return 0


def main(argv=None) -> int:
    try:
        rv = cli.main(args=argv, prog_name="qmgraph", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 2
    except click.exceptions.ClickException as exc:
        exc.show()
        return 2
    except (InvalidArgument, ValueError, OverflowError, OSError, MemoryError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    if isinstance(rv, int):
        return rv
    return 0


if __name__ == "__main__":
    sys.exit(main())
