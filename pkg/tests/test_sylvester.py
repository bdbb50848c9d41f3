import numpy as np
import pytest

from diovqa import matcore, sylvester
from diovqa.errors import DegenerateSpectrum, NonCommutingFamily, NotDiagonal


def closed_form_kappas(x1, x2, k):
    """Independent two-eigenvalue solution of the defining linear system."""
    e1, e2 = np.exp(k * x1), np.exp(k * x2)
    return (e2 * x1 - e1 * x2) / (x1 - x2), (e1 - e2) / (x1 - x2)


def test_solve_kappas_unit_pair():
    c = sylvester.solve_kappas([0.0, 1.0], 1.0)
    assert c.kappas[0] == pytest.approx(1.0)
    assert c.kappas[1] == pytest.approx(np.e - 1.0)


def test_solve_kappas_matches_two_eigenvalue_closed_form():
    rng = np.random.default_rng(0)
    for _ in range(300):
        x1 = rng.uniform(-5, 5)
        x2 = x1 + rng.choice([-1, 1]) * rng.uniform(0.1, 5)
        k = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        k0, k1 = closed_form_kappas(x1, x2, k)
        c = sylvester.solve_kappas([x1, x2], k)
        scale = max(1.0, abs(k0), abs(k1))
        assert abs(c.kappas[0] - k0) <= 1e-12 * scale
        assert abs(c.kappas[1] - k1) <= 1e-12 * scale


def test_solve_kappas_exact_for_unit_modulus_scalar():
    # the circuit expansions always use k = -i, where the coefficients stay
    # O(1/gap) and the solve is exact to 1e-12 absolute
    rng = np.random.default_rng(12)
    for _ in range(300):
        x1 = rng.uniform(-5, 5)
        x2 = x1 + rng.choice([-1, 1]) * rng.uniform(0.1, 5)
        k0, k1 = closed_form_kappas(x1, x2, -1j)
        c = sylvester.solve_kappas([x1, x2], -1j)
        assert abs(c.kappas[0] - k0) <= 1e-12
        assert abs(c.kappas[1] - k1) <= 1e-12


def test_solve_kappas_five_point_residual():
    c = sylvester.solve_kappas([1.0, 2.0, 3.0, 4.0, 5.0], -1j)
    assert c.max_residual() <= 1e-9


def test_solve_kappas_rejects_degenerate():
    with pytest.raises(DegenerateSpectrum):
        sylvester.solve_kappas([1.0, 1.0 + 1e-9], -1j)


def test_expand_single_two_by_two_closed_form():
    # e^A = (q-p)^{-1} [(q e^p - p e^q) 1 + (e^q - e^p) A] for eigenvalues p, q
    a = np.array([[1.0, 0.4], [0.4, -0.5]], dtype=complex)
    p, q = np.linalg.eigvalsh(a)
    expected = ((q * np.exp(p) - p * np.exp(q)) * np.eye(2) + (np.exp(q) - np.exp(p)) * a) / (q - p)
    summands = sylvester.expand_single(a, 1.0)
    assert np.abs(sum(summands) - expected).max() <= 1e-12


def test_expand_single_diagonal():
    summands = sylvester.expand_single(np.diag([0.0, 1.0, 2.0]), -1j)
    rebuilt = sum(summands)
    assert np.abs(rebuilt - np.diag(np.exp([-0j, -1j, -2j]))).max() <= 1e-12


def test_expand_single_matches_matrix_exp():
    rng = np.random.default_rng(1)
    d = np.diag(np.cumsum(0.2 + rng.uniform(0, 1, size=5)))
    rebuilt = sum(sylvester.expand_single(d, -1j))
    reference = matcore.matrix_exp(d, -1j)
    assert np.abs(rebuilt - reference).max() <= 1e-9 * max(1.0, np.abs(reference).max())


def test_multinomial():
    assert sylvester.multinomial((1, 1)) == 2
    assert sylvester.multinomial((2, 1)) == 3
    assert sylvester.multinomial((3, 1)) == 4
    assert sylvester.multinomial((2, 2)) == 6
    assert sylvester.multinomial((0, 0, 4)) == 1


def test_monomial_indices_graded_and_complete():
    idx = sylvester.monomial_indices(2, 2)
    assert idx == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert len(sylvester.monomial_indices(2, 4)) == 15


def test_family_two_generators_qutrit_structure():
    x = np.diag([0.3, 1.1, 2.4])
    y = np.diag([-0.5, 0.9, 1.7])
    phi = np.array([0.8, -0.4])
    poly = sylvester.expand_commuting_family([x, y], phi)
    assert poly.term_count() == 6
    kappas = sylvester.solve_kappas(np.diag(phi[0] * x + phi[1] * y).real, -1j).kappas
    eye = np.eye(3)
    expected = {
        (0, 0): kappas[0] * eye,
        (1, 0): kappas[1] * x,
        (0, 1): kappas[1] * y,
        (2, 0): kappas[2] * (x @ x),
        (0, 2): kappas[2] * (y @ y),
        (1, 1): 2 * kappas[2] * (x @ y),
    }
    for exp, coeff in expected.items():
        assert np.abs(poly.terms[exp] - coeff).max() <= 1e-12


def test_family_two_generators_dim_five_multinomials():
    rng = np.random.default_rng(2)
    h1 = np.diag(rng.uniform(-1, 1, 5))
    h2 = np.diag(rng.uniform(-1, 1, 5))
    phi = np.array([1.3, 0.7])
    poly = sylvester.expand_commuting_family([h1, h2], phi)
    assert poly.term_count() == 15
    kappas = sylvester.solve_kappas(np.diag(phi[0] * h1 + phi[1] * h2).real, -1j).kappas
    coeff = poly.terms[(2, 2)]
    assert np.abs(coeff - 6 * kappas[4] * (h1 @ h1 @ h2 @ h2)).max() <= 1e-12
    coeff = poly.terms[(3, 1)]
    assert np.abs(coeff - 4 * kappas[4] * (h1 @ h1 @ h1 @ h2)).max() <= 1e-12


def test_family_single_diagonal_generator():
    poly = sylvester.expand_commuting_family([np.diag([1.0, -1.0])], [np.pi])
    contracted = poly.contract([np.pi])
    assert np.abs(contracted - np.diag([np.exp(-1j * np.pi), np.exp(1j * np.pi)])).max() <= 1e-10


def test_family_reconstruction_sample():
    rng = np.random.default_rng(3)
    done = 0
    while done < 100:
        big_l = int(rng.integers(1, 4))
        hams = [np.diag(rng.uniform(-2, 2, 4)) for _ in range(big_l)]
        phi = rng.uniform(-2, 2, big_l)
        total = sum(p * h for p, h in zip(phi, hams))
        if np.min(np.diff(np.sort(np.diag(total).real))) < 0.1:
            continue
        poly = sylvester.expand_commuting_family(hams, phi)
        direct = matcore.matrix_exp(total, -1j)
        assert np.abs(poly.contract(phi) - direct).max() <= 1e-8
        done += 1


def test_family_coefficients_symmetric_under_generator_swap():
    rng = np.random.default_rng(4)
    h1 = np.diag(rng.uniform(-1, 1, 3))
    h2 = np.diag(rng.uniform(-1, 1, 3))
    phi = np.array([0.9, 0.4])
    poly = sylvester.expand_commuting_family([h1, h2], phi)
    swapped = sylvester.expand_commuting_family([h2, h1], phi[::-1])
    for (e1, e2), coeff in poly.terms.items():
        assert np.abs(swapped.terms[(e2, e1)] - coeff).max() <= 1e-12


def test_family_rejects_noncommuting():
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sz = np.diag([1.0, -1.0])
    with pytest.raises(NonCommutingFamily):
        sylvester.expand_commuting_family([sx, sz], [1.0, 1.0])


def test_family_rejects_degenerate_at_phi():
    h = np.diag([1.0, 1.0 + 1e-10])
    with pytest.raises(DegenerateSpectrum):
        sylvester.expand_commuting_family([h], [1.0])


def test_eigenvalue_sums_examples():
    assert np.allclose(sylvester.eigenvalue_sums([np.diag([1.0, 2.0])], [3.0]), [3.0, 6.0])
    out = sylvester.eigenvalue_sums([np.diag([1.0, -1.0]), np.diag([2.0, 0.0])], [1.0, 1.0])
    assert np.allclose(out, [3.0, -1.0])


def test_eigenvalue_sums_against_direct_summation():
    rng = np.random.default_rng(11)
    hams = [np.diag(rng.uniform(-3, 3, 5)) for _ in range(58)]
    phi = rng.uniform(-1, 1, 58)
    out = sylvester.eigenvalue_sums(hams, phi)
    direct = np.diag(sum(p * h for p, h in zip(phi, hams))).real
    assert np.abs(out - direct).max() <= 1e-12


def test_eigenvalue_sums_rejects_offdiagonal():
    with pytest.raises(NotDiagonal):
        sylvester.eigenvalue_sums([np.array([[1.0, 0.1], [0.1, 2.0]])], [1.0])


def test_matrix_polynomial_json_roundtrip():
    poly = sylvester.expand_commuting_family(
        [np.diag([0.2, 1.0, 2.1]), np.diag([1.5, -0.3, 0.4])], [0.6, 1.1]
    )
    back = sylvester.MatrixPolynomial.from_json(poly.to_json())
    assert back.num_vars == poly.num_vars and back.degree_cap == poly.degree_cap
    for exp, coeff in poly.terms.items():
        assert np.array_equal(back.terms[exp], coeff)
