import io
import json
import os
from contextlib import redirect_stdout

from nhq.cli import main

DATA = os.path.join(os.path.dirname(__file__), "data")


def run(*argv):
    out = io.StringIO()
    with redirect_stdout(out):
        code = main(list(argv))
    return code, out.getvalue()


def q(name):
    return os.path.join(DATA, f"{name}.json")


def test_bracket_example():
    code, out = run("bracket", "-q", q("jordan"), "[x]", "[x']")
    assert code == 0
    assert out.strip() == "[ev]"


def test_bracket_reverse_sign():
    code, out = run("bracket", "-q", q("jordan"), "[x']", "[x]")
    assert code == 0
    assert out.strip() == "-[ev]"


def test_qcomm_paper_example():
    code, out = run(
        "qcomm", "-q", q("a3p"), "(a0',1)(a1',2)(a2',3)", "(a2',1)(a2,2)"
    )
    assert code == 0
    assert out.strip() == "h*(a0',1)(a1',2)(a2',3)"


def test_qmul_stacks_heights():
    code, out = run("qmul", "-q", q("jordan"), "(x',1)", "(x,1)")
    assert code == 0
    assert out.strip() == "h*ev + (x,1) & (x',2)"


def test_dbracket():
    code, out = run("dbracket", "-q", q("jordan"), "x", "x'")
    assert code == 0
    assert out.strip() == "ev (x) ev"


def test_trace_and_qtrace():
    code, out = run("trace", "-q", q("jordan"), "--dim", "v=1", "[x.x']")
    assert code == 0
    assert out.strip() == "(x)_{1,1}*(x')_{1,1}"
    code, out = run("qtrace", "-q", q("jordan"), "--dim", "v=1", "(x',1)(x,2)")
    assert code == 0
    assert out.strip() == "h + [x]_{1,1}*d(x)_{1,1}"


def test_moment_components():
    code, out = run("moment", "-q", q("a3p"))
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[1] == "w_0 = -a0'.a0 + a2.a2' + p.p'"
    assert lines[4] == "w_inf = -p'.p"


def test_moment_deformed():
    code, out = run("moment", "-q", q("jordan"), "--lambda", "v=5")
    assert code == 0
    assert out.splitlines()[0] == "w = -5*ev + x.x' - x'.x"


def test_round_trip_of_printed_output():
    from nhq.expr import parse_qpa_element
    from nhq.quiver import parse_quiver

    with open(q("a3p")) as fh:
        quiver = parse_quiver(fh.read())
    _, out = run("qcomm", "-q", q("a3p"), "(a0',1)(a1',2)(a2',3)", "(a2',1)(a2,2)")
    reparsed = parse_qpa_element(quiver, out.strip())
    _, out2 = run("qmul", "-q", q("a3p"), out.strip(), "1")
    assert out2.strip() == out.strip()
    assert not reparsed.is_zero()


def test_exit_code_parse_error(capsys):
    code, _ = run("bracket", "-q", q("jordan"), "[x", "[x']")
    assert code == 2
    code, _ = run("bracket", "-q", q("jordan"), "[zz]", "[x]")
    assert code == 2


def test_exit_code_dimension_error():
    code, _ = run("trace", "-q", q("jordan"), "--dim", "v=0", "[x]")
    assert code == 3
    code, _ = run("trace", "-q", q("jordan"), "[x]")
    assert code == 3


def test_exit_code_missing_file():
    code, _ = run("bracket", "-q", "/nonexistent.json", "[x]", "[x]")
    assert code == 2


def test_verify_suite_exit_codes_and_json():
    code, out = run(
        "verify", "lie", "--seed", "3", "--cases", "5", "--json"
    )
    assert code == 0
    lines = [json.loads(line) for line in out.strip().splitlines()]
    assert all(doc["status"] == "verified" for doc in lines)
    assert len(lines) == 5


def test_verify_deterministic_output():
    args = ("verify", "dirac", "--seed", "11", "--cases", "8")
    code1, out1 = run(*args)
    code2, out2 = run(*args)
    assert (code1, out1) == (code2, out2)
    assert code1 == 0
    assert "summary: 8 ok, 0 failed" in out1


def test_verify_cubic_on_a3p_small():
    code, out = run(
        "verify",
        "cubic",
        "-q",
        q("a3p"),
        "--dim",
        "0=2,1=2,2=2,inf=1",
        "--cases",
        "5",
        "--seed",
        "7",
    )
    assert code == 0
    assert "summary: 5 ok, 0 failed" in out


def test_solve_chi_cli():
    code, out = run("solve-chi", "-q", q("a2"), "--dim", "1=1,2=1", "--json")
    assert code == 0
    doc = json.loads(out.strip().splitlines()[0])
    assert doc["status"] == "solved"
    assert doc["character"] == {"1": "-1", "2": "0"}


def test_kernel_cli():
    code, out = run(
        "kernel", "-q", q("a3p"), "--dim", "0=2,1=2,2=2,inf=1"
    )
    assert code == 0
    assert "-14 + 2*r_0 + 2*r_1 + 2*r_2 + r_inf = 0" in out
    assert "14 + 4*r_0 + 2*r_1 + 2*r_2 = 0" in out
