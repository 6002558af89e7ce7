"""Shared CLI inputs: state fixtures and a malformed-input fuzz set."""

import json


def write_fixtures(tmp_path):
    files = {
        "bell.json": {"q": 2, "amplitudes": [[2**-0.5, 0], [0, 0], [0, 0], [2**-0.5, 0]]},
        "zero-state.json": {"q": 2, "amplitudes": [[0, 0]] * 4},
        "plus.json": {"q": 2, "amplitudes": [[0.5, 0]] * 4},
    }
    for name, data in files.items():
        (tmp_path / name).write_text(json.dumps(data))
    (tmp_path / "broken.json").write_text("{not json")
    (tmp_path / "binary.json").write_bytes(b"\xff\xfe\x00")
    (tmp_path / "list.json").write_text("[1, 2]")
    (tmp_path / "short.json").write_text(json.dumps({"q": 2, "amplitudes": [[1, 0]]}))
    (tmp_path / "strings.json").write_text(json.dumps({"q": 1, "amplitudes": [["a", "b"], [0, 0]]}))
    (tmp_path / "floatq.json").write_text(json.dumps({"q": 1.0, "amplitudes": [[1, 0], [0, 0]]}))
    (tmp_path / "unnormed.json").write_text(json.dumps({"q": 1, "amplitudes": [[1, 0], [1, 0]]}))
    return tmp_path


MALFORMED = [
    [],
    ["nope"],
    ["graph"],
    ["graph", "--n"],
    ["graph", "--n", "x"],
    ["graph", "--n", "0"],
    ["graph", "--n", "-5"],
    ["graph", "--n", "2.5"],
    ["graph", "--n", "2", "--format", "xml"],
    ["graph", "--n", "2", "--format", "text"],
    ["graph", "--n", "2", "--bogus"],
    ["paths"],
    ["paths", "--n", "1"],
    ["paths", "--n", "6"],
    ["paths", "--n", "99999"],
    ["paths", "--n", "2", "--limit", "-1"],
    ["paths", "--n", "2", "--format", "dot"],
    ["paths", "--n", ""],
    ["ck-verify"],
    ["ck-verify", "--family", "pi4"],
    ["ck-verify", "--family", ""],
    ["ck-verify", "--family", "pi2", "--window", "0"],
    ["ck-verify", "--family", "pi2", "--window", "-3"],
    ["ck-verify", "--family", "pi2", "--window", "abc"],
    ["ck-verify", "--family", "pi2", "--tol", "0"],
    ["ck-verify", "--family", "pi2", "--tol", "-1"],
    ["ck-verify", "--family", "pi2", "--tol", "nan"],
    ["ck-verify", "--family", "pi2", "--tol", "inf"],
    ["ck-verify", "--family", "pi2", "--format", "dot"],
    ["ck-verify", "--family", "pi2", "--seed", "x"],
    ["channel"],
    ["channel", "--path-index", "9"],
    ["channel", "--path-index", "-1"],
    ["channel", "--path-index", "x"],
    ["channel", "--path-index", "0", "--family", "pi9"],
    ["channel", "--path-index", "0", "--window", "0"],
    ["channel", "--path-index", "0", "--family", "pi3", "--window", "64"],
    ["channel", "--path-index", "500", "--family", "pi3"],
    ["channel", "--path-index", "0", "--format", "text"],
    ["qubit"],
    ["qubit", "factor"],
    ["qubit", "factor", "--file", "/nonexistent/state.json"],
    ["qubit", "factor", "--file", "{dir}/zero-state.json"],
    ["qubit", "factor", "--file", "{dir}/broken.json"],
    ["qubit", "factor", "--file", "{dir}/binary.json"],
    ["qubit", "factor", "--file", "{dir}/list.json"],
    ["qubit", "factor", "--file", "{dir}/short.json"],
    ["qubit", "factor", "--file", "{dir}/strings.json"],
    ["qubit", "factor", "--file", "{dir}/floatq.json"],
    ["qubit", "factor", "--file", "{dir}/unnormed.json"],
    ["qubit", "factor", "--file", "{dir}"],
    ["qubit", "claim"],
    ["qubit", "claim", "--q", "1"],
    ["qubit", "claim", "--q", "3", "--exhaustive"],
    ["qubit", "claim", "--q", "x"],
    ["qubit", "claim", "--q", "2", "--samples", "0"],
    ["qubit", "entangle", "--q", "2"],
    ["graph", "--n", "2", "--out", "/nonexistent/dir/out.json"],
]



def expand(args, directory):
    return [a.replace("{dir}", str(directory)) for a in args]
