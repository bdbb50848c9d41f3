"""Finite matrix-exponential expansions for commuting Hermitian families.

Sylvester's formula (a consequence of Cayley-Hamilton) writes the exponential
of an n x n matrix as a polynomial of degree n-1 in the matrix itself,

    e^{kA} = sum_{j=0}^{n-1} kappa_j A^j,

where the kappa_j solve the Vandermonde system e^{k x_i} = sum_j kappa_j x_i^j
over the eigenvalues x_i of A. For a pairwise-commuting family {H_i} the same
expansion applied to A = sum_i phi_i H_i produces a matrix-coefficient
polynomial in the parameters phi: the coefficient of the monomial
phi_1^{a_1} ... phi_L^{a_L} is

    kappa_{|a|} * multinomial(|a|; a) * H_1^{a_1} ... H_L^{a_L}.

Degenerate spectra are rejected (the confluent case is deliberately out of
scope); Vandermonde systems are solved by partial-pivot elimination in double
precision with a residual check as the safety net.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import matcore
from .errors import DegenerateSpectrum, DimensionMismatch, NonCommutingFamily, NotDiagonal

DEFAULT_EIGENVALUE_GAP = 1e-8
COMMUTATOR_ATOL = 1e-10
KAPPA_RESIDUAL_ATOL = 1e-9


@dataclass(frozen=True)
class SylvesterCoefficients:
    """Solution of the Vandermonde system defining the expansion coefficients."""

    order: int
    kappas: np.ndarray       # complex, length `order`
    eigenvalues: np.ndarray  # real, length `order`
    scalar_k: complex

    def __post_init__(self):
        residual = self.max_residual()
        if residual > KAPPA_RESIDUAL_ATOL:
            raise DegenerateSpectrum(
                f"Vandermonde solve residual {residual:.3e} exceeds {KAPPA_RESIDUAL_ATOL:.1e}; "
                "eigenvalues are too close for a reliable expansion"
            )

    def max_residual(self) -> float:
        """max_i |e^{k x_i} - sum_j kappa_j x_i^j|."""
        powers = np.vander(self.eigenvalues, self.order, increasing=True)
        return float(np.abs(powers @ self.kappas - np.exp(self.scalar_k * self.eigenvalues)).max())


def solve_kappas(eigenvalues, k: complex, gap_tol: float = DEFAULT_EIGENVALUE_GAP) -> SylvesterCoefficients:
    """Solve e^{k x_i} = sum_j kappa_j x_i^j for the expansion coefficients.

    Requires pairwise-distinct eigenvalues: any gap below `gap_tol` raises
    DegenerateSpectrum rather than silently producing huge coefficients.
    """
    x = np.asarray(eigenvalues, dtype=float).reshape(-1)
    n = x.size
    if n == 0:
        raise DimensionMismatch("need at least one eigenvalue")
    _check_gaps(x, gap_tol)
    vander = np.vander(x, n, increasing=True)
    kappas = np.linalg.solve(vander, np.exp(complex(k) * x))
    return SylvesterCoefficients(order=n, kappas=kappas, eigenvalues=x, scalar_k=complex(k))


def kappas_order_two(x1: float, x2: float, k: complex) -> tuple[complex, complex]:
    """Closed-form coefficients for n = 2: the two-eigenvalue special case."""
    e1, e2 = np.exp(complex(k) * x1), np.exp(complex(k) * x2)
    return (e2 * x1 - e1 * x2) / (x1 - x2), (e1 - e2) / (x1 - x2)


def _check_gaps(x: np.ndarray, gap_tol: float):
    xs = np.sort(x)
    if xs.size > 1:
        gap = float(np.min(np.diff(xs)))
        if gap < gap_tol:
            raise DegenerateSpectrum(f"minimum eigenvalue gap {gap:.3e} < {gap_tol:.1e}")


def expand_single(a, k: complex, gap_tol: float = DEFAULT_EIGENVALUE_GAP) -> list[np.ndarray]:
    """Summands kappa_j A^j of e^{kA} for a Hermitian A with distinct eigenvalues."""
    m = matcore.hermitian(a)
    w, _ = matcore.eigen_hermitian(m)
    coeffs = solve_kappas(w, k, gap_tol)
    out = []
    power = np.eye(m.shape[0], dtype=complex)
    for j in range(m.shape[0]):
        out.append(coeffs.kappas[j] * power)
        power = power @ m
    return out


def multinomial(exponents) -> int:
    """(|a|)! / (a_1! ... a_L!) for a multi-index a."""
    total = sum(exponents)
    out = 1
    for e in exponents:
        out *= math.comb(total, e)
        total -= e
    return out


def monomial_indices(num_vars: int, degree_cap: int) -> list[tuple[int, ...]]:
    """All multi-indices with total degree <= degree_cap, in graded lexicographic order."""
    out: list[tuple[int, ...]] = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for e in range(remaining, -1, -1):
            rec(prefix + (e,), remaining - e, slots - 1)

    for degree in range(degree_cap + 1):
        rec((), degree, num_vars)
    return out


@dataclass
class MatrixPolynomial:
    """Polynomial in L real parameters with square-matrix coefficients."""

    num_vars: int
    degree_cap: int
    terms: dict[tuple[int, ...], np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        dims = {m.shape for m in self.terms.values()}
        if len(dims) > 1:
            raise DimensionMismatch(f"coefficient matrices disagree in shape: {sorted(dims)}")
        for exp in self.terms:
            if len(exp) != self.num_vars:
                raise DimensionMismatch(f"exponent {exp} has length {len(exp)}, expected {self.num_vars}")
            if sum(exp) > self.degree_cap:
                raise ValueError(f"exponent {exp} exceeds degree cap {self.degree_cap}")
        cap = math.comb(self.num_vars + self.degree_cap, self.degree_cap)
        if len(self.terms) > cap:
            raise ValueError(f"{len(self.terms)} terms exceed the {cap} monomials of degree <= {self.degree_cap}")

    @property
    def dim(self) -> int:
        return next(iter(self.terms.values())).shape[0]

    def term_count(self) -> int:
        return len(self.terms)

    def contract(self, phi) -> np.ndarray:
        """Evaluate sum_a C_a * phi^a at a parameter point."""
        phi = np.asarray(phi, dtype=float).reshape(-1)
        if phi.size != self.num_vars:
            raise DimensionMismatch(f"phi has length {phi.size}, expected {self.num_vars}")
        acc = np.zeros_like(next(iter(self.terms.values())))
        for exp, coeff in self.terms.items():
            acc = acc + coeff * float(np.prod(phi ** np.asarray(exp)))
        return acc

    def to_json(self) -> dict:
        return {
            "num_vars": self.num_vars,
            "degree_cap": self.degree_cap,
            "terms": [
                {"exponents": list(exp), "matrix": matcore.matrix_to_json(coeff)}
                for exp, coeff in self.terms.items()
            ],
        }

    @classmethod
    def from_json(cls, obj) -> "MatrixPolynomial":
        terms = {
            tuple(int(e) for e in t["exponents"]): matcore.matrix_from_json(t["matrix"])
            for t in obj["terms"]
        }
        return cls(num_vars=int(obj["num_vars"]), degree_cap=int(obj["degree_cap"]), terms=terms)


def commutation_defect(hams) -> float:
    """max-entry norm of the worst pairwise commutator in a family."""
    worst = 0.0
    for a, b in combinations(hams, 2):
        worst = max(worst, float(np.abs(a @ b - b @ a).max()))
    return worst


def expand_commuting_family(
    hams,
    phi,
    gap_tol: float = DEFAULT_EIGENVALUE_GAP,
    commute_tol: float = COMMUTATOR_ATOL,
) -> MatrixPolynomial:
    """Expand e^{-i sum_i phi_i H_i} into a matrix-coefficient polynomial.

    The family must commute pairwise within `commute_tol` and the spectrum of
    sum_i phi_i H_i must be non-degenerate at the supplied phi: the scalar
    coefficients kappa_j are evaluated there, so the returned polynomial is
    valid pointwise at that phi. Contracting it against the monomials phi^a
    reproduces the dense exponential.
    """
    mats = [matcore.hermitian(h, name=f"H_{i + 1}") for i, h in enumerate(hams)]
    if not mats:
        raise DimensionMismatch("need at least one generator")
    n = mats[0].shape[0]
    for i, m in enumerate(mats):
        if m.shape[0] != n:
            raise DimensionMismatch(f"H_{i + 1} has dimension {m.shape[0]}, expected {n}")
    phi = np.asarray(phi, dtype=float).reshape(-1)
    if phi.size != len(mats):
        raise DimensionMismatch(f"phi has length {phi.size}, expected {len(mats)}")
    defect = commutation_defect(mats)
    if defect > commute_tol:
        raise NonCommutingFamily(f"worst pairwise commutator max-entry {defect:.3e} > {commute_tol:.1e}")

    total = sum(p * m for p, m in zip(phi, mats))
    eigenvalues, _ = matcore.eigen_hermitian(total)
    coeffs = solve_kappas(eigenvalues, -1j, gap_tol)

    # H^a for all multi-indices of degree <= n-1, built by extending lower
    # degrees one generator power at a time.
    degree_cap = n - 1
    indices = monomial_indices(len(mats), degree_cap)
    powers: dict[tuple[int, ...], np.ndarray] = {indices[0]: np.eye(n, dtype=complex)}
    for exp in indices[1:]:
        i = next(k for k, e in enumerate(exp) if e > 0)
        parent = exp[:i] + (exp[i] - 1,) + exp[i + 1:]
        powers[exp] = mats[i] @ powers[parent]

    terms = {
        exp: coeffs.kappas[sum(exp)] * multinomial(exp) * powers[exp]
        for exp in indices
    }
    return MatrixPolynomial(num_vars=len(mats), degree_cap=degree_cap, terms=terms)


def eigenvalue_sums(hams, phi) -> np.ndarray:
    """x_i = sum_j (phi_j H_j)_{ii} for a family of diagonal generators."""
    phi = np.asarray(phi, dtype=float).reshape(-1)
    if phi.size != len(hams):
        raise DimensionMismatch(f"phi has length {phi.size}, expected {len(hams)}")
    diags = []
    for j, h in enumerate(hams):
        m = matcore.as_square_matrix(h, name=f"H_{j + 1}")
        if np.count_nonzero(m - np.diag(np.diag(m))) != 0:
            raise NotDiagonal(f"H_{j + 1} has off-diagonal entries")
        diags.append(np.diag(m).real)
    return np.sum([p * d for p, d in zip(phi, diags)], axis=0)
