import itertools
import random
from fractions import Fraction

import pytest

from nhq import (
    HBarPolynomial,
    HH0Element,
    Letter,
    PolyElement,
    ReductionParameters,
    WeylElement,
    canonical_necklace,
    classical_symbol,
    decompose_ideal_image,
    idempotent_class,
    kernel_constraint,
    lift_necklace,
    make_dimension_vector,
    make_params,
    qpa_mul,
    solve_chi,
    straighten,
    trace_classical,
    trace_quantum,
    trace_quantum_config,
    verify_cubic,
    verify_equivariance,
    verify_quantum_moment,
    verify_trace_homomorphism,
    weyl_mul,
)
from nhq.expr import parse_hh0_element, parse_qpa_element
from nhq.quiver import make_quiver
from nhq.sampling import (
    random_configuration,
    random_dimension,
    random_gl,
    random_necklace,
    random_quiver,
)
from nhq.trace import enumerate_generators

H = HBarPolynomial.h()


# -- classical trace ---------------------------------------------------------


def test_trace_classical_idempotent(A2):
    d = (2, 3)
    x = HH0Element.of(A2, idempotent_class(1))
    assert trace_classical(x, d) == PolyElement.constant(A2, d, 3)


def test_trace_classical_single_letter(J):
    d = (1,)
    x = parse_hh0_element(J, "[x]")
    assert trace_classical(x, d) == PolyElement.coordinate(J, d, 0, False, 1, 1)


def test_trace_classical_two_letter_expansion(J):
    # oracle: direct index expansion
    d = (2,)
    x = parse_hh0_element(J, "[x.x']")
    expected = PolyElement(J, d)
    for i in (1, 2):
        for j in (1, 2):
            expected = expected + PolyElement.coordinate(
                J, d, 0, False, i, j
            ) * PolyElement.coordinate(J, d, 0, True, j, i)
    assert trace_classical(x, d) == expected


# -- quantum trace -----------------------------------------------------------


def test_trace_quantum_idempotent_factors(J):
    d = (3,)
    assert trace_quantum_config(J, d, (), (0, 0)) == WeylElement.constant(J, d, 9)


def test_trace_quantum_two_letters_d1(J):
    d = (1,)
    X = parse_qpa_element(J, "(x,1)(x',2)")
    expected = weyl_mul(
        WeylElement.position(J, d, 0, 1, 1), WeylElement.derivative(J, d, 0, 1, 1)
    )
    assert trace_quantum(X, d) == expected


def test_trace_quantum_height_order_cross_check(J):
    # Tr_q((x',1)(x,2)) = Tr_q((x,1)(x',2)) + h d^2, raw configurations
    for n in (1, 2):
        d = (n,)
        lhs = trace_quantum_config(J, d, (((Letter(0, True), 1), (Letter(0, False), 2)),), ())
        rhs = trace_quantum_config(
            J, d, (((Letter(0, False), 1), (Letter(0, True), 2)),), ()
        ) + WeylElement.constant(J, d, H * n * n)
        assert lhs == rhs


def test_trace_quantum_invariant_under_single_rewrite():
    # a skein rewrite never changes the quantum trace
    rng = random.Random(41)
    for _ in range(20):
        q = random_quiver(rng, 2, 2)
        d = random_dimension(rng, q)
        cfg = random_configuration(rng, q, max_letters=5)
        direct = trace_quantum_config(q, d, cfg.components, cfg.idempotents)
        normal = trace_quantum(straighten(q, cfg), d)
        assert direct == normal


def test_trace_hom_unit(J):
    d = (2,)
    one = parse_qpa_element(J, "1")
    X = parse_qpa_element(J, "(x,1)(x',2)")
    assert verify_trace_homomorphism(one, X, d).ok
    assert verify_trace_homomorphism(X, one, d).ok


def test_trace_hom_jordan_pair(J):
    d = (1,)
    X = parse_qpa_element(J, "(x',1)")
    Y = parse_qpa_element(J, "(x,1)")
    report = verify_trace_homomorphism(X, Y, d)
    assert report.ok
    both = trace_quantum(qpa_mul(X, Y), d)
    expected = weyl_mul(
        WeylElement.position(J, d, 0, 1, 1), WeylElement.derivative(J, d, 0, 1, 1)
    ) + WeylElement.constant(J, d, H)
    assert both == expected


def test_trace_hom_a3p_paper_elements(A3P):
    d = (1, 1, 1, 1)
    X = parse_qpa_element(A3P, "(a0',1)(a1',2)(a2',3)")
    Y = parse_qpa_element(A3P, "(a2',1)(a2,2)")
    assert verify_trace_homomorphism(X, Y, d).ok
    assert verify_trace_homomorphism(Y, X, d).ok


def test_trace_hom_randomized():
    rng = random.Random(42)
    for _ in range(15):
        q = random_quiver(rng, 2, 2)
        d = random_dimension(rng, q)
        X = lift_necklace(q, random_necklace(rng, q, 4))
        Y = lift_necklace(q, random_necklace(rng, q, 4))
        assert verify_trace_homomorphism(X, Y, d).ok


def test_classical_compatibility_randomized():
    # classical_symbol(Tr_q(lift x)) = Tr(x)
    rng = random.Random(43)
    for _ in range(20):
        q = random_quiver(rng, 2, 2)
        d = random_dimension(rng, q)
        neck = random_necklace(rng, q, 4)
        x = HH0Element.of(q, neck)
        lhs = classical_symbol(trace_quantum(lift_necklace(q, neck), d))
        assert lhs == trace_classical(x, d)


# -- the commuting squares ---------------------------------------------------


def test_cubic_self_is_zero(J):
    x = parse_hh0_element(J, "[x.x']")
    assert verify_cubic(x, x, (2,)).ok


def test_cubic_jordan(J):
    x = parse_hh0_element(J, "[x.x']")
    y = parse_hh0_element(J, "[x]")
    assert verify_cubic(x, y, (2,)).ok


def test_cubic_a3p_worked_example(A3P):
    d = make_dimension_vector(A3P, {"0": 2, "1": 2, "2": 2, "inf": 1})
    x = parse_hh0_element(A3P, "[a0'.a1'.a2']")
    y = parse_hh0_element(A3P, "[a2'.a2]")
    assert verify_cubic(x, y, d).ok
    # the classical side is the contracted triple product with a minus sign
    from nhq.repspace import poisson

    lhs = poisson(trace_classical(x, d), trace_classical(y, d))
    expected = PolyElement(A3P, d)
    for l1, l2, l3 in itertools.product((1, 2), repeat=3):
        mono = {}
        for (ai, r, c) in ((0, l1, l2), (1, l2, l3), (2, l3, l1)):
            var = (ai, True, r, c)
            mono[var] = mono.get(var, 0) + 1
        expected = expected + PolyElement(A3P, d, {tuple(sorted(mono.items())): -1})
    assert lhs == expected


def test_quantum_moment_reports(J, A2):
    q0 = make_quiver(["u"], [])
    assert verify_quantum_moment(q0, (2,)).ok
    rep = verify_quantum_moment(J, (1,))
    assert rep.ok
    assert verify_quantum_moment(A2, (2, 3)).ok


def test_equivariance_randomized():
    rng = random.Random(44)
    for _ in range(10):
        q = random_quiver(rng, 2, 2)
        d = random_dimension(rng, q)
        v = random_gl(rng, q, d)
        X = lift_necklace(q, random_necklace(rng, q, 4))
        assert verify_equivariance(v, X, d).ok


# -- ideal decomposition and the character -----------------------------------


def test_decompose_idempotent_generator(J, A2):
    for q, d in ((J, (2,)), (A2, (2, 1)), (A2, (1, 2))):
        for i in range(len(q.vertices)):
            dec = decompose_ideal_image(q, d, idempotent_class(i), i, 0)
            assert dec.verified
            # v = 0 chains carry identity coefficients and diagonal directions
            assert all(
                coeff == WeylElement.constant(q, d, 1) for coeff, _ in dec.pairs
            )
            assert len(dec.pairs) == d[i]


def test_decompose_jordan_cycle(J):
    d = (2,)
    neck = canonical_necklace(J, (Letter(0, False), Letter(0, True)))
    dec = decompose_ideal_image(J, d, neck, 0, 1)
    assert dec.verified
    assert dec.chi_value is not None
    # re-expansion is exactly the traced generator
    assert (dec.target - dec.re_expand()).is_zero()


def test_decompose_deformed_orthogonal_lambda(A2):
    d = (2, 1)
    lam = {"1": Fraction(1), "2": Fraction(-2)}  # 1*2 + (-2)*1 = 0
    params = make_params(A2, r={"1": 3, "2": -1}, lam=lam)
    for necklace, vertex, mark in enumerate_generators(A2, 2):
        dec = decompose_ideal_image(A2, d, necklace, vertex, mark, params)
        if dec.chi_value is None:
            assert (dec.target - dec.re_expand(Fraction(0))).is_zero()
        else:
            assert dec.verified


def test_decompose_all_short_generators_jordan(J):
    rng = random.Random(45)
    for d in ((1,), (2,)):
        r = (Fraction(rng.randint(-3, 3)),)
        params = ReductionParameters(r, (Fraction(0),))
        for necklace, vertex, mark in enumerate_generators(J, 3):
            dec = decompose_ideal_image(J, d, necklace, vertex, mark, params)
            assert dec.chi_value is None or dec.verified
            if dec.chi_value is None:
                assert (dec.target - dec.re_expand(Fraction(0))).is_zero()


def test_solve_chi_jordan_matches_closed_form(J):
    for n in (1, 2, 3):
        report, chi = solve_chi(J, (n,))
        assert report.status == "solved"
        assert chi.values == (Fraction(-n),)
        assert any("matches closed form 'main'" in note for note in report.notes)


def test_solve_chi_a2(A2):
    report, chi = solve_chi(A2, (1, 1))
    assert chi.values == (Fraction(-1), Fraction(0))


def test_solve_chi_r_linearity_adjudicates_sign(A2):
    d = (1, 2)
    zero = (Fraction(0), Fraction(0))
    _, base = solve_chi(A2, d)
    for k in (0, 1):
        unit = tuple(Fraction(1 if i == k else 0) for i in (0, 1))
        _, shifted = solve_chi(A2, d, ReductionParameters(unit, zero))
        delta = tuple(s - b for s, b in zip(shifted.values, base.values))
        # +r_k enters with coefficient +1: the r-sign of the main closed form
        assert delta == unit


def test_kernel_constraint_no_arrows():
    q = make_quiver(["u", "w"], [])
    rep = kernel_constraint(q, (1, 1))
    assert rep.status == "solved"
    # tau = 0, so all of gl is kernel; each diagonal direction constrains one r
    assert rep.constraints == ["0 + r_u = 0", "0 + r_w = 0"]


def test_kernel_constraint_a2(A2):
    rep = kernel_constraint(A2, (1, 1))
    assert rep.constraints == ["-1 + r_1 + r_2 = 0"]


def test_kernel_constraint_a3p_reports_reference(A3P):
    d = make_dimension_vector(A3P, {"0": 2, "1": 2, "2": 2, "inf": 1})
    rep = kernel_constraint(A3P, d)
    assert rep.status == "solved"
    assert rep.constraints == ["-14 + 2*r_0 + 2*r_1 + 2*r_2 + r_inf = 0"]
    assert any("14 + 4*r_0 + 2*r_1 + 2*r_2 = 0" in note for note in rep.notes)
    assert any("not independently derivable" in note for note in rep.notes)


def test_report_serialization_round_trip(J):
    import json

    rep = verify_quantum_moment(J, (1,))
    doc = json.loads(rep.to_json())
    assert doc["name"] == "qmoment"
    assert doc["status"] == "verified"
    text = rep.to_text()
    assert text.startswith("qmoment: verified")


def test_report_verified_requires_zero_residual():
    from nhq.trace import VerificationReport

    with pytest.raises(ValueError):
        VerificationReport("bad", "verified", residual="x")
