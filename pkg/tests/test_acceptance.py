"""Acceptance criteria: one test per criterion, exact equality throughout.

Each test prints a single PASS line with its runtime; run with -s to see
them.  Budgets are wall-clock upper bounds and part of the assertion.
"""

import time

from nhq import (
    HBarPolynomial,
    kernel_constraint,
    make_dimension_vector,
    necklace_bracket,
    qpa_comm,
)
from nhq.expr import parse_hh0_element, parse_qpa_element
from nhq.sampling import a3p
from nhq.suites import (
    suite_cubic,
    suite_dirac,
    suite_gauge,
    suite_ideal,
    suite_invariance,
    suite_lie,
    suite_pbw,
    suite_poisson,
    suite_qmoment,
    suite_trace_hom,
)
from nhq.trace import verify_cubic

SEED = 20260809


def _finish(number, name, t0, budget, ok):
    elapsed = time.time() - t0
    status = "PASS" if ok and elapsed < budget else "FAIL"
    print(f"ACCEPTANCE {number:02d} {name}: {status} ({elapsed:.1f}s / budget {budget}s)")
    assert ok, f"criterion {number} failed"
    assert elapsed < budget, f"criterion {number} exceeded {budget}s ({elapsed:.1f}s)"


def _all_ok(reports):
    return all(r.ok for r in reports)


def test_01_quantum_a3_commutator():
    t0 = time.time()
    q = a3p()
    x = parse_qpa_element(q, "(a0',1)(a1',2)(a2',3)")
    y = parse_qpa_element(q, "(a2',1)(a2,2)")
    ok = qpa_comm(x, y) == x.scale(HBarPolynomial.h())
    # the same computation through the command line
    import io
    from contextlib import redirect_stdout
    import os

    from nhq.cli import main

    path = os.path.join(os.path.dirname(__file__), "data", "a3p.json")
    out = io.StringIO()
    with redirect_stdout(out):
        code = main(
            ["qcomm", "-q", path, "(a0',1)(a1',2)(a2',3)", "(a2',1)(a2,2)"]
        )
    ok = ok and code == 0 and out.getvalue().strip() == "h*(a0',1)(a1',2)(a2',3)"
    _finish(1, "quantum A3 commutator", t0, 1, ok)


def test_02_necklace_commuting_family():
    t0 = time.time()
    q = a3p()

    def member(k):
        return parse_hh0_element(q, "[p'." + "a0'.a1'.a2'." * k + "p]")

    ok = all(
        necklace_bracket(member(k), member(l)).is_zero()
        for k in (1, 2, 3)
        for l in (1, 2, 3)
    )
    _finish(2, "commuting family", t0, 1, ok)


def test_03_dirac_property():
    t0 = time.time()
    reports = suite_dirac(SEED, 200)
    _finish(3, "Dirac property (200 pairs)", t0, 60, _all_ok(reports) and len(reports) == 200)


def test_04_pbw_and_rewriting():
    t0 = time.time()
    reports = suite_pbw(SEED, 200, 100, 50)
    _finish(4, "PBW section/confluence/associativity", t0, 120, _all_ok(reports) and len(reports) == 350)


def test_05_necklace_lie_axioms():
    t0 = time.time()
    reports = suite_lie(SEED, 100)
    _finish(5, "Lie axioms (100 triples)", t0, 30, _all_ok(reports) and len(reports) == 100)


def test_06_trace_homomorphism():
    t0 = time.time()
    reports = suite_trace_hom(SEED, 50)
    _finish(6, "quantum trace is an algebra map", t0, 120, _all_ok(reports) and len(reports) == 50)


def test_07_pre_reduction_square():
    t0 = time.time()
    reports = suite_cubic(SEED, 50)
    q = a3p()
    d = make_dimension_vector(q, {"0": 2, "1": 2, "2": 2, "inf": 1})
    worked = verify_cubic(
        parse_hh0_element(q, "[a0'.a1'.a2']"),
        parse_hh0_element(q, "[a2'.a2]"),
        d,
        name="cubic[worked-example]",
    )
    _finish(
        7,
        "pre-reduction square (50 + worked example)",
        t0,
        180,
        _all_ok(reports) and worked.ok,
    )


def test_08_quantum_moment_identity():
    t0 = time.time()
    reports = suite_qmoment(SEED)
    _finish(8, "quantum moment map identity", t0, 60, _all_ok(reports))


def test_09_post_reduction_square():
    t0 = time.time()
    reports = suite_ideal(SEED, max_len=3)
    # any closed-form sign mismatch lives in notes, never fails the check
    solved = [r for r in reports if r.name.startswith("ideal-chi")]
    ok = _all_ok(reports) and all(r.status == "solved" for r in solved)
    _finish(9, "ideal decomposition and character", t0, 300, ok)


def test_10_gl_invariance():
    t0 = time.time()
    reports = suite_invariance(SEED, 50)
    _finish(10, "gl-invariance of quantum traces", t0, 60, _all_ok(reports) and len(reports) == 50)


def test_11_poisson_consistency():
    t0 = time.time()
    reports = suite_poisson()
    _finish(11, "coordinate Poisson bracket consistency", t0, 10, _all_ok(reports))


def test_12_gauge_correspondence():
    t0 = time.time()
    reports = suite_gauge()
    _finish(12, "gauge action correspondence", t0, 10, _all_ok(reports))


def test_13_example_constraint():
    t0 = time.time()
    q = a3p()
    d = make_dimension_vector(q, {"0": 2, "1": 2, "2": 2, "inf": 1})
    report = kernel_constraint(q, d)
    ok = (
        report.status == "solved"
        and report.constraints == ["-14 + 2*r_0 + 2*r_1 + 2*r_2 + r_inf = 0"]
        and any("14 + 4*r_0 + 2*r_1 + 2*r_2 = 0" in n for n in report.notes)
        and any("not independently derivable" in n for n in report.notes)
    )
    _finish(13, "example constraint comparison", t0, 10, ok)
