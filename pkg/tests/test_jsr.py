import itertools

import numpy as np
import pytest

from diovqa import jsr, vqasim
from diovqa.errors import CapExceeded

SHEAR_UP = np.array([[1.0, 1.0], [0.0, 1.0]])
SHEAR_DOWN = np.array([[1.0, 0.0], [1.0, 1.0]])


def shear_pair():
    return jsr.MatrixVocabulary([SHEAR_UP, SHEAR_DOWN])


def brute_force_bounds(matrices, depth):
    """Exhaustive word enumeration, no pruning: the reference sandwich."""
    lower, upper = 0.0, np.inf
    for t in range(1, depth + 1):
        level_norm, level_rho = 0.0, 0.0
        for word in itertools.product(range(len(matrices)), repeat=t):
            prod = np.eye(matrices[0].shape[0], dtype=complex)
            for i in word:
                prod = prod @ matrices[i]
            level_norm = max(level_norm, np.linalg.norm(prod, 2) ** (1 / t))
            level_rho = max(level_rho, np.abs(np.linalg.eigvals(prod)).max() ** (1 / t))
        lower = max(lower, level_rho)
        upper = min(upper, level_norm)
    return lower, upper


def test_shear_pair_sandwich():
    bounds = jsr.jsr_bounds(shear_pair(), 16)
    golden = (1 + np.sqrt(5)) / 2
    assert bounds.lower >= golden - 1e-3
    assert bounds.upper <= 1.62
    assert bounds.lower <= bounds.upper


def test_bounds_dominated_by_brute_force():
    brute_lower, brute_upper = brute_force_bounds([SHEAR_UP, SHEAR_DOWN], 4)
    bounds = jsr.jsr_bounds(shear_pair(), 4, prune_threshold=0.0)
    assert bounds.lower <= brute_lower + 1e-12
    assert bounds.upper >= brute_lower - 1e-12  # sandwich contains the truth
    assert bounds.upper <= brute_upper + 1e-12


def test_witness_word_achieves_lower_bound():
    vocab = shear_pair()
    bounds = jsr.jsr_bounds(vocab, 8)
    by_label = dict(zip(vocab.labels, vocab.matrices))
    prod = np.eye(2, dtype=complex)
    for label in bounds.witness_word:
        prod = prod @ by_label[label]
    rho = np.abs(np.linalg.eigvals(prod)).max()
    assert rho ** (1 / len(bounds.witness_word)) == pytest.approx(bounds.lower, abs=1e-12)


def test_single_normal_matrix_collapses():
    m = np.diag([0.7, -0.3]).astype(complex)
    bounds = jsr.jsr_bounds(jsr.MatrixVocabulary([m]), 8)
    assert bounds.lower == pytest.approx(0.7, abs=1e-9)
    assert bounds.upper == pytest.approx(0.7, abs=1e-9)


def test_single_symmetric_matrix_converges_by_depth_eight():
    rng = np.random.default_rng(0)
    m = rng.standard_normal((3, 3))
    m = (m + m.T) / 2
    rho = np.abs(np.linalg.eigvals(m)).max()
    bounds = jsr.jsr_bounds(jsr.MatrixVocabulary([m]), 8)
    assert bounds.lower == pytest.approx(rho, abs=1e-6)
    assert bounds.upper == pytest.approx(rho, abs=1e-6)


def test_zero_vocabulary():
    bounds = jsr.jsr_bounds(jsr.MatrixVocabulary([np.zeros((3, 3))]), 5)
    assert bounds.lower == 0.0
    assert bounds.upper == 0.0


def test_commuting_normal_vocabulary_converges():
    d1 = np.diag([0.9, 0.2]).astype(complex)
    d2 = np.diag([0.5, -0.8]).astype(complex)
    bounds = jsr.jsr_bounds(jsr.MatrixVocabulary([d1, d2]), 8)
    assert bounds.lower == pytest.approx(0.9, abs=1e-6)
    assert bounds.upper == pytest.approx(0.9, abs=1e-6)


def test_unitary_vocabulary_pins_to_one():
    theta = 0.7
    u1 = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]], dtype=complex)
    u2 = np.diag([np.exp(0.3j), np.exp(-1.1j)])
    bounds = jsr.jsr_bounds(jsr.MatrixVocabulary([u1, u2]), 10)
    assert abs(bounds.lower - 1.0) <= 1e-9
    assert abs(bounds.upper - 1.0) <= 1e-9
    assert jsr.classify_convergence(bounds, margin=0.01) == jsr.UNDECIDED


def test_scaling_covariance():
    vocab = shear_pair()
    base = jsr.jsr_bounds(vocab, 10)
    for c in (0.25, 3.0):
        scaled = jsr.jsr_bounds(jsr.MatrixVocabulary([c * m for m in vocab.matrices]), 10)
        assert abs(scaled.lower - c * base.lower) <= 1e-9
        assert abs(scaled.upper - c * base.upper) <= 1e-9


def test_monotone_refinement():
    rng = np.random.default_rng(1)
    mats = [rng.standard_normal((2, 2)) * 0.8 for _ in range(2)]
    vocab = jsr.MatrixVocabulary(mats)
    prev = jsr.jsr_bounds(vocab, 2)
    for depth in (4, 6, 10):
        cur = jsr.jsr_bounds(vocab, depth)
        assert cur.lower >= prev.lower - 1e-12
        assert cur.upper <= prev.upper + 1e-12
        prev = cur


def test_classification_thresholds():
    assert jsr.classify_convergence(jsr.JsrBounds(0.5, 0.8, 4, ("A1",))) == jsr.CONVERGES
    assert jsr.classify_convergence(jsr.JsrBounds(1.2, 1.6, 4, ("A1",))) == jsr.DIVERGES
    assert jsr.classify_convergence(jsr.JsrBounds(0.97, 1.03, 4, ("A1",)), margin=0.01) == jsr.UNDECIDED


def test_bounds_must_be_ordered():
    with pytest.raises(ValueError):
        jsr.JsrBounds(2.0, 1.0, 3, ("A1",))


def test_product_cap():
    with pytest.raises(CapExceeded):
        jsr.jsr_bounds(shear_pair(), 16, prune_threshold=0.0, product_cap=10)


def qaoa_unit_instance():
    h_b = np.diag([-1.0, 1.0])
    h_c = np.array([[0.2, 0.4], [0.4, -0.6]])
    return vqasim.QaoaInstance(h_b=h_b, h_c=h_c, layers=1, psi0=[1.0, 0.0])


def test_qaoa_vocabulary_cartesian_count():
    vocab = jsr.build_qaoa_vocabulary(qaoa_unit_instance(), [0.1, 0.7], [0.3, 0.9])
    assert vocab.size == 4
    assert len(set(vocab.labels)) == 4


def test_qaoa_vocabulary_noise_free_is_unitary():
    vocab = jsr.build_qaoa_vocabulary(qaoa_unit_instance(), [0.1, 0.7], [0.3, 0.9])
    for m in vocab.matrices:
        assert np.abs(m @ m.conj().T - np.eye(2)).max() <= 1e-12
    bounds = jsr.jsr_bounds(vocab, 6)
    assert abs(bounds.upper - 1.0) <= 1e-9


def test_qaoa_vocabulary_unitary_noise_boundary():
    # additive noise at its unitary boundary: member = (unitary + unitary)
    # is not unitary, but the eps = 0 noise term itself is
    eta0 = vqasim.two_level_noise(1.0, 0.0, 0.0, 0.0)
    assert np.abs(eta0 @ eta0.conj().T - np.eye(2)).max() <= 1e-12
    inst = vqasim.QaoaInstance(
        h_b=np.diag([-1.0, 1.0]),
        h_c=np.diag([0.5, -0.5]),
        layers=1,
        psi0=[1.0, 0.0],
        noise_b=vqasim.two_level_noise(0.01, 0.0, 0.0, 0.05),
    )
    vocab = jsr.build_qaoa_vocabulary(inst, [0.2], [0.4])
    assert vocab.size == 1
    assert np.abs(vocab.matrices[0] @ vocab.matrices[0].conj().T - np.eye(2)).max() > 1e-6


def test_block_reduce_degenerate_single_member():
    vocab = jsr.MatrixVocabulary([np.diag([0.5, 0.5]).astype(complex)], labels=["U1"])
    reduced = jsr.block_reduce(vocab)
    assert reduced.size == 2
    assert np.array_equal(reduced.matrices[0], vocab.matrices[0])
    assert np.array_equal(reduced.matrices[1], np.eye(2))


def test_block_reduce_shift_order():
    vocab = jsr.MatrixVocabulary([np.eye(2, dtype=complex), np.eye(2, dtype=complex)])
    reduced = jsr.block_reduce(vocab)
    t = reduced.matrices[1]
    assert reduced.dim == 4
    assert np.abs(t @ t - np.eye(4)).max() == 0.0


def test_block_reduce_classification_agreement():
    rng = np.random.default_rng(2)
    agreements = 0
    for _ in range(20):
        scale = rng.choice([0.3, 0.6, 1.0, 1.4])
        mats = [scale * rng.standard_normal((2, 2)) for _ in range(2)]
        vocab = jsr.MatrixVocabulary(mats)
        original = jsr.classify_convergence(jsr.jsr_bounds(vocab, 10, product_cap=500_000))
        reduced = jsr.classify_convergence(jsr.jsr_bounds(jsr.block_reduce(vocab), 12, product_cap=500_000))
        if jsr.UNDECIDED in (original, reduced):
            continue
        assert original == reduced
        agreements += 1
    assert agreements > 0


def test_vocabulary_json_roundtrip():
    vocab = shear_pair()
    back = jsr.MatrixVocabulary.from_json(vocab.to_json())
    assert back.labels == vocab.labels
    for a, b in zip(back.matrices, vocab.matrices):
        assert np.array_equal(a, b)
