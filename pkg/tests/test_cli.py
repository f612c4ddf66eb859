import importlib
import json
import subprocess
import sys
from pathlib import Path

import pytest

from entkit import cli

DATA = Path(__file__).resolve().parent.parent / "data"


def d(name):
    return str(DATA / name)


S2, S3, S4 = d("s2_bell.json"), d("s3_partial.json"), d("s4_rank2_3x3.json")
HAD, DEC = d("basis_hadamard.json"), d("decomp_hadamard_s3.json")

# One or more invocations per subcommand, all on bundled files.
CASES: dict[str, list[list[str]]] = {
    "schmidt": [["schmidt", "--state", S3]],
    "correlation-op": [["correlation-op", "--state", S3]],
    "reduce": [["reduce", "--state", S4]],
    "antilinear": [["antilinear", "--state", S3, "--vector", d("vector_chi.json"), "--other", S2]],
    "linalg eig": [["linalg", "eig", "--matrix", d("rho_diag.json")]],
    "linalg svd": [["linalg", "svd", "--matrix", d("rho_diag.json")]],
    "linalg sqrt": [["linalg", "sqrt", "--matrix", d("rho_diag.json")]],
    "linalg projector": [["linalg", "projector", "--matrix", d("rho_diag.json")]],
    "linalg pinv": [["linalg", "pinv", "--matrix", d("rho_diag.json"), "--power", "-0.5"]],
    "independence": [["independence", "--vectors", d("vectors_dependent.json")]],
    "cvl": [["cvl", "--state", S3, "--basis", HAD]],
    "cvl-inverse": [["cvl-inverse", "--rho", d("rho_diag.json"), "--decomp", DEC]],
    "char-weight": [["char-weight", "--rho", d("rho_diag.json"), "--target", d("target_plus.json")]],
    "expand": [["expand", "--decomp", DEC, "--vector", d("vector_chi.json")]],
    "observable": [["observable", "--state", S3, "--observable", d("observable_z1.json")]],
    "twin": [["twin", "--state", S3, "--observable", d("observable_z1.json"), "--spectrum", "2", "-5"]],
    "classify-pair": [["classify-pair", "--state", S3, "--observable", d("observable_x1.json"), "--partner", d("observable_x2.json")]],
    "remote-decomposition": [["remote-decomposition", "--state", S3, "--basis", HAD]],
    "diagram-map": [
        ["diagram-map", "--state", S3, "--arrow", "A->D", "--basis", HAD],
        ["diagram-map", "--state", S3, "--arrow", "D->A", "--decomp", DEC],
        ["diagram-map", "--state", S3, "--arrow", "B->C", "--basis", HAD],
        ["diagram-map", "--state", S3, "--arrow", "C->B", "--decomp", DEC],
        ["diagram-map", "--state", S3, "--arrow", "A->B", "--basis", HAD],
        ["diagram-map", "--state", S3, "--arrow", "B->A", "--basis", HAD],
        ["diagram-map", "--state", S3, "--arrow", "C->D", "--decomp", DEC],
        ["diagram-map", "--state", S3, "--arrow", "D->C", "--decomp", DEC],
        ["diagram-map", "--state", S3, "--arrow", "A->D", "--vector", d("target_plus.json"), "--diagram2"],
    ],
    "diagram-check": [["diagram-check", "--state", S3, "--basis", HAD], ["diagram-check", "--random", "3", "--dims", "2", "3"]],
    "prepare": [["prepare", "--state", S4, "--target", d("target_s4.json")]],
    "event": [["event", "--state", S3, "--event", d("event_plus.json")]],
    "simulate": [
        ["simulate", "--state", S3, "--basis", HAD, "--shots", "2000", "--seed", "5", "--select", "1"],
        ["simulate", "--state", S2, "--basis", d("basis_standard.json"), "--shots", "100", "--seed", "5", "--second-kind", d("post_vectors.json")],
    ],
    "random-state": [["random-state", "--dims", "2", "3", "--seed", "4", "--rank", "1"]],
}


def run(*argv):
    code, doc = cli.run(list(argv))
    # every document must serialize
    cli.fmt.dumps(doc)
    return code, doc


# --- documented examples ---------------------------------------------------


def test_schmidt_on_bell_file():
    code, doc = run("schmidt", "--state", S2)
    assert code == 0
    assert doc["results"]["coefficients"] == [0.7071067811865476, 0.7071067811865476]
    assert doc["inputs"]["state"]["path"] == S2


def test_char_weight_hand_value():
    code, doc = run("char-weight", "--rho", d("rho_diag.json"), "--target", d("target_plus.json"))
    assert code == 0
    assert abs(doc["results"]["characteristic_weight"] - 0.375) < 1e-12
    assert doc["results"]["bounds"] == [0.25, 0.75]


def test_diagram_check_random():
    code, doc = run("diagram-check", "--random", "20", "--dims", "3", "3", "--seed", "7")
    assert code == 0
    assert len(doc["results"]["instances"]) == 20
    assert all(r["passed"] for r in doc["results"]["instances"])
    assert all(c["passed"] for c in doc["checks"])


# --- exit codes -------------------------------------------------------------


@pytest.mark.parametrize("name", sorted(CASES))
def test_every_case_succeeds(name):
    for argv in CASES[name]:
        code, doc = run(*argv)
        assert code == 0, doc
        assert doc["status"] == "pass"


def test_correlation_op_reports_identities():
    code, doc = run("correlation-op", "--state", S4)
    assert code == 0
    assert len(doc["checks"]) == 9
    assert all(c["max_deviation"] < 1e-12 for c in doc["checks"])


def test_verification_failure_exits_1():
    code, doc = run("diagram-check", "--random", "2", "--dims", "3", "4", "--tol", "1e-20")
    assert code == 1
    assert doc["status"] == "fail"
    assert any(not c["passed"] for c in doc["checks"])


def test_precondition_failure_names_condition():
    code, doc = run("prepare", "--state", S4, "--target", d("target_outside_s4.json"))
    assert code == 2
    assert doc["error"] == {"kind": "precondition", "condition": "is_preparable", "message": doc["error"]["message"]}
    code, doc = run("cvl", "--state", S3, "--basis", d("post_vectors.json"))
    assert (code, doc["error"]["condition"]) == (2, "orthonormal")


def test_malformed_file_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"d1": 1, "d2": 1,\n "coefficients": [[[1, 0]]')
    code, doc = run("schmidt", "--state", str(bad))
    assert code == 2
    assert doc["error"]["kind"] == "format"
    assert f"{bad}:2:" in doc["error"]["message"]
    bad.write_text(json.dumps({"d1": 1, "d2": 1, "coefficients": [[[2, 0]]]}))
    code, doc = run("schmidt", "--state", str(bad))
    assert code == 2 and "norm = 2.0" in doc["error"]["message"]


def test_usage_errors_exit_2(capsys):
    assert run("no-such-command")[0] == 2
    assert run("schmidt")[0] == 2
    code, doc = run("diagram-map", "--state", S3, "--arrow", "A->D")
    assert code == 2 and doc["error"]["kind"] == "usage"
    assert cli.main(["schmidt"]) == 2
    err = capsys.readouterr().err
    assert err.startswith("entkit: ") and "entkit: entkit" not in err


def test_main_writes_output_file(tmp_path):
    out = tmp_path / "out.json"
    assert cli.main(["-o", str(out), "schmidt", "--state", S3]) == 0
    doc = json.loads(out.read_text())
    assert doc["results"]["schmidt_rank"] == 2


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "entkit.cli", "schmidt", "--state", S2], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["status"] == "pass"


# --- determinism ------------------------------------------------------------


def test_repeated_runs_are_byte_identical(tmp_path):
    for name, cases in CASES.items():
        for i, argv in enumerate(cases):
            outs = []
            # the output path is echoed in argv, so both runs write to the same file
            path = tmp_path / f"{name.replace(' ', '_')}_{i}.json"
            for _ in range(2):
                cli.main(["-o", str(path), *argv])
                outs.append(path.read_bytes())
            assert outs[0] == outs[1], argv


def test_parallel_shots_give_identical_counts():
    base = ["simulate", "--state", S3, "--basis", HAD, "--shots", "150000", "--seed", "9"]
    _, serial = run(*base)
    _, parallel = run(*base, "--parallel-shots")
    assert serial["results"] == parallel["results"]


# --- coverage ---------------------------------------------------------------


def resolve(op):
    module, func = op.rsplit(".", 1)
    fn = getattr(importlib.import_module(f"entkit.{module}"), func)
    assert callable(fn), op
    return fn


def parser_commands():
    parser = cli.build_parser()
    sub = next(a for a in parser._actions if a.dest == "command")
    names = set(sub.choices) - {"linalg"}
    for choice in sub.choices["linalg"]._actions:
        if choice.dest == "linalg_op":
            names |= {f"linalg {c}" for c in choice.choices}
    return names


def traced_calls(argv):
    seen = set()

    def prof(frame, event, arg):
        if event == "call":
            seen.add(frame.f_code)

    sys.setprofile(prof)
    try:
        cli.run(argv)
    finally:
        sys.setprofile(None)
    return seen


def test_operation_table_is_complete():
    commands = parser_commands()
    assert set(CASES) == commands
    for op, command in cli.OPERATIONS.items():
        resolve(op)
        assert command == "*" or command in commands, op


@pytest.mark.parametrize("op", sorted(k for k, v in cli.OPERATIONS.items() if v != "*"))
def test_subcommand_reaches_operation(op):
    code = resolve(op).__code__
    seen = set()
    for argv in CASES[cli.OPERATIONS[op]]:
        seen |= traced_calls(argv)
    assert code in seen, f"{op} not called by {cli.OPERATIONS[op]}"
