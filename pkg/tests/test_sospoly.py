import json

import numpy as np
import pytest

from diovqa import sospoly
from diovqa.errors import BudgetExceeded, DimensionMismatch
from diovqa.sospoly import IntPolynomial, SosPolynomial


def var(i, nv=2, power=1):
    return IntPolynomial.variable(nv, i, power)


def test_evaluate_examples():
    p = var(0) ** 2 + var(1) ** 2
    assert sospoly.evaluate(p, (3, 4)) == 25
    assert sospoly.evaluate(var(0) - var(1), (7, 7)) == 0
    q = 5 * var(0) ** 3 + var(1) + 11
    assert sospoly.evaluate(q, (0, 0)) == q.constant_term() == 11


def test_evaluate_sos_examples():
    # eta_x x^2 + eta_y y^2 + eta_xy x^2 y^2 with unit coefficients
    s = SosPolynomial(2, (var(0), var(1), var(0) * var(1)))
    assert sospoly.evaluate_sos(s, (0, 0)) == 0
    assert sospoly.evaluate_sos(s, (1, 2)) == 1 + 4 + 4
    assert sospoly.evaluate_sos(s, (5, -3)) >= 1  # non-root integer point


def test_sos_nonnegative_and_zero_iff_common_root():
    rng = np.random.default_rng(0)
    for _ in range(200):
        nv = int(rng.integers(1, 4))
        summands = []
        for _ in range(int(rng.integers(1, 4))):
            terms = {}
            for _ in range(int(rng.integers(1, 4))):
                exp = tuple(int(e) for e in rng.integers(0, 3, nv))
                terms[exp] = terms.get(exp, 0) + int(rng.integers(-5, 6))
            summands.append(IntPolynomial.from_terms(nv, terms))
        s = SosPolynomial(nv, tuple(summands))
        pt = [int(v) for v in rng.integers(-6, 7, nv)]
        total = sospoly.evaluate_sos(s, pt)
        assert total >= 0
        assert (total == 0) == all(sospoly.evaluate(q, pt) == 0 for q in s.summands)


def test_arithmetic_agrees_with_evaluation():
    rng = np.random.default_rng(1)
    for _ in range(100):
        nv = int(rng.integers(1, 4))
        def draw():
            terms = {}
            for _ in range(int(rng.integers(1, 5))):
                exp = tuple(int(e) for e in rng.integers(0, 4, nv))
                terms[exp] = terms.get(exp, 0) + int(rng.integers(-9, 10))
            return IntPolynomial.from_terms(nv, terms)
        p, q = draw(), draw()
        pt = [int(v) for v in rng.integers(-4, 5, nv)]
        assert sospoly.evaluate(p + q, pt) == sospoly.evaluate(p, pt) + sospoly.evaluate(q, pt)
        assert sospoly.evaluate(p * q, pt) == sospoly.evaluate(p, pt) * sospoly.evaluate(q, pt)
        assert sospoly.evaluate(p ** 3, pt) == sospoly.evaluate(p, pt) ** 3


def test_no_zero_coefficients_survive():
    p = var(0) - var(0)
    assert p.terms == {}
    q = (var(0) + 1) * (var(0) - 1) - var(0) ** 2
    assert q.terms == {(0, 0): -1}


def test_polyplussin_objective():
    p = IntPolynomial.variable(1, 0, 2)
    assert sospoly.polyplussin_objective(p, [0.0]) == pytest.approx(0.0)
    assert sospoly.polyplussin_objective(p, [0.5]) == pytest.approx(1.25)
    shifted = (IntPolynomial.variable(1, 0) - 2) ** 2
    assert sospoly.polyplussin_objective(shifted, [2.0]) == pytest.approx(0.0, abs=1e-12)


def test_polyplussin_penalizes_half_integers():
    p = IntPolynomial.variable(1, 0, 2)
    for k in range(-3, 4):
        assert sospoly.polyplussin_objective(p, [k + 0.5]) >= 1.0


def test_count_monomials():
    assert sospoly.count_monomials(2, 2) == 6
    assert sospoly.count_monomials(58, 4) == 557845
    assert sospoly.count_monomials(1, 0) == 1
    with pytest.raises(ValueError):
        sospoly.count_monomials(0, 2)


def test_budget_exceeded_carries_monomial():
    p = IntPolynomial.variable(1, 0, 5 ** 60)
    with pytest.raises(BudgetExceeded) as err:
        sospoly.evaluate(p, [2], bit_budget=10 ** 6)
    assert err.value.monomial == (5 ** 60,)
    # |base| <= 1 stays exact even under the tower exponent
    assert sospoly.evaluate(p, [1]) == 1
    assert sospoly.evaluate(p, [-1]) == -1
    assert sospoly.evaluate(p, [0]) == 0


def test_ude_has_18_clauses_and_28_variables():
    ude = sospoly.ude_d28(0, 0, 0, 0)
    assert len(ude.summands) == 18
    assert ude.num_vars == 28
    assert len(sospoly.UDE_VARIABLES) == 28
    assert sospoly.UDE_PARAMETERS == ("u", "x", "y", "z")


def test_ude_tower_clause_structure():
    ude = sospoly.ude_d28(0, 0, 0, 0)
    q_idx = sospoly.UDE_VARIABLES.index("q")
    b_idx = sospoly.UDE_VARIABLES.index("b")
    clause = ude.summands[1]  # q - b^(5^60)
    assert len(clause.terms) == 2
    e_q = tuple(1 if i == q_idx else 0 for i in range(28))
    e_b = tuple(5 ** 60 if i == b_idx else 0 for i in range(28))
    assert clause.terms[e_q] == 1
    assert clause.terms[e_b] == -1


def test_ude_theta_clause_structure():
    theta_idx = sospoly.UDE_VARIABLES.index("theta")
    b_idx = sospoly.UDE_VARIABLES.index("b")
    e_theta = tuple(1 if i == theta_idx else 0 for i in range(28))
    e_b5 = tuple(5 if i == b_idx else 0 for i in range(28))
    clause = sospoly.ude_d28(0, 0, 0, 0).summands[3]  # theta + 2z - b^5 at z=0
    assert clause.terms == {e_theta: 1, e_b5: -1}
    clause_z = sospoly.ude_d28(0, 0, 0, 3).summands[3]
    assert clause_z.constant_term() == 6


def test_ude_origin_value_matches_constant_terms():
    ude = sospoly.ude_d28(0, 0, 0, 0)
    origin = [0] * 28
    expected = sum(q.constant_term() ** 2 for q in ude.summands)
    assert sospoly.evaluate_sos(ude, origin) == expected == 7


def test_ude_exponent_cap_replaces_tower():
    ude = sospoly.ude_d28(1, 2, 3, 4, exponent_cap=8)
    b_idx = sospoly.UDE_VARIABLES.index("b")
    e_b = tuple(8 if i == b_idx else 0 for i in range(28))
    assert ude.summands[1].terms[e_b] == -1
    point = [1] * 28
    point[b_idx] = 2
    assert sospoly.evaluate_sos(ude, point) >= 0


def test_ude_uncapped_tower_raises_on_large_base():
    ude = sospoly.ude_d28(0, 0, 0, 0)
    b_idx = sospoly.UDE_VARIABLES.index("b")
    point = [0] * 28
    point[b_idx] = 2
    with pytest.raises(BudgetExceeded):
        sospoly.evaluate_sos(ude, point)


def test_json_roundtrip_preserves_big_coefficients():
    big = 7 ** 200
    p = IntPolynomial.from_terms(2, {(1, 0): big, (0, 3): -1})
    text = json.dumps(p.to_json())
    back = IntPolynomial.from_json(json.loads(text))
    assert back.terms == p.terms
    s = SosPolynomial(2, (p, var(1)))
    s_back = SosPolynomial.from_json(json.loads(json.dumps(s.to_json())))
    assert s_back.summands[0].terms == p.terms


def test_dimension_checks():
    with pytest.raises(DimensionMismatch):
        sospoly.evaluate(var(0), [1, 2, 3])
    with pytest.raises(DimensionMismatch):
        var(0) + IntPolynomial.variable(3, 0)
