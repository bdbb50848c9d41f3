"""Coefficient-matching between squared circuit amplitudes and integer
sum-of-squares targets.

The pipeline restricts the L generators to diagonal matrices (so they
commute and the finite exponential expansion applies) and asks whether an
observable O, a state psi0 and generator eigenvalues exist such that

    || O (sum_a C_a phi^a) |psi0> ||^2  =  sum_j c_j phi^j

holds monomial by monomial, where C_a = kappa_|a| * multinomial(a) * H^a
is the expansion of e^{-i sum phi_i H_i} and the right-hand side is the
expanded target. One complex equation per monomial of degree <= 2(n-1);
the imaginary parts must vanish since the target coefficients are real, so
the system counts twice as many real equations.

The scalar coefficients kappa_j depend on phi through the eigenvalue sums,
so the matching cannot be literal for all phi at once. Two readings are
implemented:

- anchored (default): kappa is evaluated at a fixed phi anchor and the
  equations are taken at that anchor; `verify_encoding` then checks the
  operational claim (circuit value equals target value) pointwise on an
  integer grid.
- free-kappa: the kappa_j become additional complex unknowns, tied to the
  eigenvalue data only through the defining Vandermonde residuals, which
  are added to the least-squares objective.

The solver is deliberately plain: multistart gradient descent with a
backtracking line search on the smooth residual, finite-difference
gradients, deterministic seeding. It reports a Solution only when the
residual clears the tolerance; otherwise a BestEffort point with a small
gradient norm, and BudgetExhausted when not even stationarity was reached.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product as iter_product

import numpy as np

from . import matcore, sylvester, vqasim
from .errors import BudgetExhausted, DegenerateSpectrum, DegreeOverflow, DimensionMismatch
from .sospoly import SosPolynomial, count_monomials, evaluate_sos


# ---------------------------------------------------------------------------
# Parameter charts
# ---------------------------------------------------------------------------

def hermitian_basis(n: int) -> np.ndarray:
    """Orthonormal Hermitian basis of C^{n x n}: identity direction first,
    then the n^2 - 1 traceless directions (symmetric pairs, antisymmetric
    pairs, diagonal ladder), normalized to Tr(B_i B_j) = delta_ij."""
    basis = [np.eye(n, dtype=complex) / math.sqrt(n)]
    for i in range(n):
        for j in range(i + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[i, j] = m[j, i] = 1 / math.sqrt(2)
            basis.append(m)
            m = np.zeros((n, n), dtype=complex)
            m[i, j] = -1j / math.sqrt(2)
            m[j, i] = 1j / math.sqrt(2)
            basis.append(m)
    for k in range(1, n):
        m = np.zeros((n, n), dtype=complex)
        m[:k, :k] = np.eye(k)
        m[k, k] = -k
        basis.append(m / math.sqrt(k * (k + 1)))
    return np.stack(basis)


@dataclass
class ObservableParams:
    """Hermitian observable in the orthonormal-basis chart: n^2 real coords
    (one identity coordinate plus n^2 - 1 traceless-generator coordinates)."""

    n: int
    coords: np.ndarray

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=float).reshape(-1)
        if self.coords.size != self.n * self.n:
            raise DimensionMismatch(f"need {self.n * self.n} coordinates, got {self.coords.size}")

    def matrix(self) -> np.ndarray:
        return np.tensordot(self.coords, hermitian_basis(self.n), axes=1)

    @classmethod
    def from_matrix(cls, o) -> "ObservableParams":
        m = matcore.hermitian(o, name="observable")
        n = m.shape[0]
        coords = np.array([np.trace(b.conj().T @ m).real for b in hermitian_basis(n)])
        return cls(n=n, coords=coords)


@dataclass
class StateParams:
    """Unit state in the phase-fixed chart: amplitudes (1, z_1, ..., z_{n-1})
    normalized, with z_j = coords[2j] + i coords[2j+1]. The first amplitude
    is real and positive, so the chart has exactly 2n - 2 coordinates and no
    gauge freedom."""

    n: int
    coords: np.ndarray

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=float).reshape(-1)
        if self.coords.size != 2 * self.n - 2:
            raise DimensionMismatch(f"need {2 * self.n - 2} coordinates, got {self.coords.size}")

    def vector(self) -> np.ndarray:
        z = self.coords[0::2] + 1j * self.coords[1::2]
        psi = np.concatenate([[1.0 + 0j], z])
        return psi / np.linalg.norm(psi)

    @classmethod
    def from_vector(cls, psi) -> "StateParams":
        v = matcore.state_vector(psi)
        if abs(v[0]) < 1e-12:
            raise ValueError("chart requires a nonzero first amplitude")
        z = v[1:] / v[0]
        coords = np.empty(2 * (v.size - 1))
        coords[0::2] = z.real
        coords[1::2] = z.imag
        return cls(n=v.size, coords=coords)


@dataclass(frozen=True)
class DofReport:
    """Real-parameter counts of the encoding unknowns."""

    num_layers: int
    dim: int
    psi0: int
    observable: int
    generator: int
    family: int

    def as_dict(self) -> dict:
        return {
            "psi0": self.psi0,
            "observable": self.observable,
            "generator": self.generator,
            "family": self.family,
        }


def dof_report(num_layers: int, dim: int) -> DofReport:
    """Pure-state chart 2n-2, observable n^2, one diagonal generator n,
    generator family nL."""
    if num_layers < 1 or dim < 1:
        raise ValueError("need num_layers >= 1 and dim >= 1")
    return DofReport(
        num_layers=num_layers,
        dim=dim,
        psi0=2 * dim - 2,
        observable=dim * dim,
        generator=dim,
        family=dim * num_layers,
    )


# ---------------------------------------------------------------------------
# System construction
# ---------------------------------------------------------------------------

@dataclass
class EncodingSystem:
    """The matching equations for one target polynomial at fixed (L, n).

    `pairs_by_monomial` maps each parameter monomial j to the ordered factor
    pairs (a1, a2) with a1 + a2 = j contributing the inner product
    <psi0| (O C_{a1})^dagger (O C_{a2}) |psi0> to the left-hand side.
    """

    num_layers: int
    dim: int
    target: SosPolynomial
    monomials: list[tuple[int, ...]]
    rhs: np.ndarray
    factor_monomials: list[tuple[int, ...]]
    pairs_by_monomial: dict[tuple[int, ...], list[tuple[tuple[int, ...], tuple[int, ...]]]]
    _basis: np.ndarray = field(repr=False)
    _factor_exponents: np.ndarray = field(repr=False)
    _factor_multinomials: np.ndarray = field(repr=False)
    _factor_degrees: np.ndarray = field(repr=False)
    _pair_left: np.ndarray = field(repr=False)
    _pair_right: np.ndarray = field(repr=False)
    _pair_segment: np.ndarray = field(repr=False)

    @property
    def equation_count(self) -> int:
        """Complex matching equations: one per parameter monomial."""
        return len(self.monomials)

    @property
    def real_equation_count(self) -> int:
        """Real equations: real and imaginary parts listed separately."""
        return 2 * len(self.monomials)

    def unknown_count(self, free_kappa: bool = False) -> int:
        n, L = self.dim, self.num_layers
        base = n * n + (2 * n - 2) + L * n
        return base + 2 * n if free_kappa else base

    def to_json(self) -> dict:
        return {"num_layers": self.num_layers, "dim": self.dim, "target": self.target.to_json()}

    @classmethod
    def from_json(cls, obj) -> "EncodingSystem":
        return build_system(SosPolynomial.from_json(obj["target"]), int(obj["num_layers"]), int(obj["dim"]))


def build_system(target: SosPolynomial, num_layers: int, dim: int) -> EncodingSystem:
    """Set up one matching equation per parameter monomial of degree <= 2(n-1).

    The target's expanded degree must not exceed 2(n-1), the highest degree
    the squared circuit expansion can produce.
    """
    if target.num_vars != num_layers:
        raise DimensionMismatch(
            f"target has {target.num_vars} variables, expected {num_layers}"
        )
    expanded = target.expanded()
    max_degree = 2 * (dim - 1)
    if expanded.degree() > max_degree:
        raise DegreeOverflow(
            f"target degree {expanded.degree()} exceeds 2(n-1) = {max_degree} for n = {dim}"
        )

    factor_monomials = sylvester.monomial_indices(num_layers, dim - 1)
    findex = {a: i for i, a in enumerate(factor_monomials)}
    monomials = sylvester.monomial_indices(num_layers, max_degree)
    mindex = {j: i for i, j in enumerate(monomials)}

    pairs_by_monomial: dict[tuple[int, ...], list] = {j: [] for j in monomials}
    left, right, segment = [], [], []
    for a1 in factor_monomials:
        for a2 in factor_monomials:
            j = tuple(x + y for x, y in zip(a1, a2))
            pairs_by_monomial[j].append((a1, a2))
            left.append(findex[a1])
            right.append(findex[a2])
            segment.append(mindex[j])

    rhs = np.zeros(len(monomials))
    for exp, coef in expanded.terms.items():
        rhs[mindex[exp]] = float(coef)

    return EncodingSystem(
        num_layers=num_layers,
        dim=dim,
        target=target,
        monomials=monomials,
        rhs=rhs,
        factor_monomials=factor_monomials,
        pairs_by_monomial=pairs_by_monomial,
        _basis=hermitian_basis(dim),
        _factor_exponents=np.array(factor_monomials, dtype=float),
        _factor_multinomials=np.array([sylvester.multinomial(a) for a in factor_monomials], dtype=float),
        _factor_degrees=np.array([sum(a) for a in factor_monomials], dtype=int),
        _pair_left=np.array(left, dtype=int),
        _pair_right=np.array(right, dtype=int),
        _pair_segment=np.array(segment, dtype=int),
    )


def _as_eigs(sys: EncodingSystem, eigs) -> np.ndarray:
    e = np.asarray(eigs, dtype=float)
    if e.shape != (sys.num_layers, sys.dim):
        raise DimensionMismatch(f"eigenvalues must have shape ({sys.num_layers}, {sys.dim})")
    return e


def anchored_kappas(sys: EncodingSystem, eigs, phi_anchor) -> np.ndarray:
    """kappa_j at the anchor, from the eigenvalue sums of the diagonal family."""
    e = _as_eigs(sys, eigs)
    anchor = np.asarray(phi_anchor, dtype=float).reshape(-1)
    if anchor.size != sys.num_layers:
        raise DimensionMismatch(f"anchor has length {anchor.size}, expected {sys.num_layers}")
    x = anchor @ e
    return sylvester.solve_kappas(x, -1j).kappas


def equation_values(
    sys: EncodingSystem,
    observable: ObservableParams,
    state: StateParams,
    eigs,
    phi_anchor,
    kappas: np.ndarray | None = None,
) -> np.ndarray:
    """g_j = <psi0|(O C)^dagger (O C)|psi0>_j - rhs_j for every monomial j."""
    e = _as_eigs(sys, eigs)
    if observable.n != sys.dim or state.n != sys.dim:
        raise DimensionMismatch("observable/state dimension disagrees with the system")
    if kappas is None:
        kappas = anchored_kappas(sys, e, phi_anchor)
    o = np.tensordot(observable.coords, sys._basis, axes=1)
    psi = state.vector()
    # Diagonal of H^a per factor monomial, then v_a = s_a * O (d_a . psi).
    d = np.prod(e[None, :, :] ** sys._factor_exponents[:, :, None], axis=1)
    scal = kappas[sys._factor_degrees] * sys._factor_multinomials
    v = scal[:, None] * ((d * psi[None, :]) @ o.T)
    gram = v.conj() @ v.T
    vals = gram[sys._pair_left, sys._pair_right]
    lhs = (
        np.bincount(sys._pair_segment, weights=vals.real, minlength=len(sys.monomials))
        + 1j * np.bincount(sys._pair_segment, weights=vals.imag, minlength=len(sys.monomials))
    )
    return lhs - sys.rhs


def residual(sys: EncodingSystem, observable: ObservableParams, state: StateParams, eigs, phi_anchor) -> float:
    """sum_j |g_j|^2 with kappa evaluated at the anchor; zero iff all
    matching equations hold there."""
    g = equation_values(sys, observable, state, eigs, phi_anchor)
    return float(np.sum(np.abs(g) ** 2))


def residual_free_kappa(
    sys: EncodingSystem,
    observable: ObservableParams,
    state: StateParams,
    eigs,
    kappas,
    phi_anchor,
) -> float:
    """Matching residual with kappa as free unknowns, plus the Vandermonde
    defining residuals |sum_l kappa_l x_i^l - e^{-i x_i}|^2."""
    e = _as_eigs(sys, eigs)
    kappas = np.asarray(kappas, dtype=complex).reshape(-1)
    if kappas.size != sys.dim:
        raise DimensionMismatch(f"need {sys.dim} kappa values, got {kappas.size}")
    g = equation_values(sys, observable, state, e, phi_anchor, kappas=kappas)
    anchor = np.asarray(phi_anchor, dtype=float).reshape(-1)
    x = anchor @ e
    vand = np.vander(x, sys.dim, increasing=True) @ kappas - np.exp(-1j * x)
    return float(np.sum(np.abs(g) ** 2) + np.sum(np.abs(vand) ** 2))


# ---------------------------------------------------------------------------
# Multistart descent
# ---------------------------------------------------------------------------

@dataclass
class SolveConfig:
    multistarts: int = 64
    max_iterations: int = 10_000
    tolerance: float = 1e-10
    gradient_tolerance: float = 1e-8
    seed: int = 0
    free_kappa: bool = False
    fd_step: float = 1e-6
    threads: int = 1


@dataclass
class Solution:
    """Solver outcome: a Solution when residual <= tolerance, otherwise a
    BestEffort point whose small gradient norm certifies local stationarity."""

    status: str
    observable: ObservableParams
    state: StateParams
    eigenvalues: np.ndarray
    residual: float
    gradient_norm: float
    start_index: int
    iterations: int
    phi_anchor: np.ndarray
    kappas: np.ndarray | None = None

    @property
    def is_solution(self) -> bool:
        return self.status == "solution"


def finite_difference_gradient(fn, point: np.ndarray, step: float, scheme: str = "central") -> np.ndarray:
    """Finite-difference gradient; `scheme` is "central" or "forward"."""
    grad = np.empty_like(point)
    if scheme == "forward":
        base = fn(point)
    for i in range(point.size):
        bumped = point.copy()
        bumped[i] += step
        up = fn(bumped)
        if scheme == "central":
            bumped[i] = point[i] - step
            grad[i] = (up - fn(bumped)) / (2 * step)
        else:
            grad[i] = (up - base) / step
    return grad


def _pack(observable, state, eigs, kappas=None) -> np.ndarray:
    parts = [observable.coords, state.coords, np.asarray(eigs, dtype=float).reshape(-1)]
    if kappas is not None:
        k = np.asarray(kappas, dtype=complex).reshape(-1)
        parts.extend([k.real, k.imag])
    return np.concatenate(parts)


def _unpack(sys: EncodingSystem, p: np.ndarray, free_kappa: bool):
    n, big_l = sys.dim, sys.num_layers
    i0 = n * n
    i1 = i0 + 2 * n - 2
    i2 = i1 + big_l * n
    obs = ObservableParams(n=n, coords=p[:i0])
    state = StateParams(n=n, coords=p[i0:i1])
    eigs = p[i1:i2].reshape(big_l, n)
    kappas = None
    if free_kappa:
        kappas = p[i2:i2 + n] + 1j * p[i2 + n:i2 + 2 * n]
    return obs, state, eigs, kappas


def _objective(sys: EncodingSystem, anchor: np.ndarray, free_kappa: bool):
    def fn(p: np.ndarray) -> float:
        obs, state, eigs, kappas = _unpack(sys, p, free_kappa)
        try:
            if free_kappa:
                return residual_free_kappa(sys, obs, state, eigs, kappas, anchor)
            return residual(sys, obs, state, eigs, anchor)
        except DegenerateSpectrum:
            return np.inf
    return fn


def _initial_point(sys: EncodingSystem, anchor, config: SolveConfig, start: int, fn) -> np.ndarray:
    n, big_l = sys.dim, sys.num_layers
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, start]))
    ladder = np.tile(np.arange(n, dtype=float), (big_l, 1)) / big_l
    for attempt in range(25):
        if start == 0 and attempt == 0:
            obs = np.zeros(n * n)
            st = np.zeros(2 * n - 2)
            eigs = ladder
        else:
            obs = rng.standard_normal(n * n)
            st = rng.standard_normal(2 * n - 2)
            eigs = ladder + rng.standard_normal((big_l, n))
        kappas = None
        if config.free_kappa:
            try:
                kappas = anchored_kappas(sys, eigs, anchor)
            except DegenerateSpectrum:
                kappas = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        p = _pack(ObservableParams(n, obs), StateParams(n, st), eigs, kappas)
        if np.isfinite(fn(p)):
            return p
    raise DegenerateSpectrum("could not draw a start with a non-degenerate anchored spectrum")


def _descend(fn, p0: np.ndarray, config: SolveConfig):
    """Backtracking gradient descent; returns (p, value, grad_norm, iterations, stationary)."""
    p = p0
    value = fn(p)
    step = 1.0
    grad_norm = np.inf
    for iteration in range(config.max_iterations):
        if value <= config.tolerance:
            return p, value, grad_norm, iteration, True
        grad = finite_difference_gradient(fn, p, config.fd_step)
        grad_norm = float(np.linalg.norm(grad))
        if not np.isfinite(grad_norm):
            return p, value, np.inf, iteration, False
        if grad_norm <= config.gradient_tolerance:
            return p, value, grad_norm, iteration, True
        step = min(step * 2.0, 1e6 / max(grad_norm, 1e-30))
        accepted = False
        while step > 1e-18:
            trial = p - step * grad
            trial_value = fn(trial)
            if trial_value <= value - 1e-4 * step * grad_norm ** 2:
                p, value = trial, trial_value
                accepted = True
                break
            step *= 0.5
        if not accepted:
            grad = finite_difference_gradient(fn, p, config.fd_step)
            grad_norm = float(np.linalg.norm(grad))
            return p, value, grad_norm, iteration, grad_norm <= config.gradient_tolerance
    grad = finite_difference_gradient(fn, p, config.fd_step)
    grad_norm = float(np.linalg.norm(grad))
    return p, value, grad_norm, config.max_iterations, grad_norm <= config.gradient_tolerance


def solve_system(sys: EncodingSystem, config: SolveConfig | None = None, phi_anchor=None) -> Solution:
    """Multistart descent on the matching residual.

    Deterministic for a fixed seed: every start derives its own generator
    from (seed, start index) and aggregation prefers lower residual with
    ties broken by start index, so thread scheduling cannot change the
    result. Raises BudgetExhausted when no start reaches the tolerance or a
    certified stationary point.
    """
    config = config or SolveConfig()
    anchor = np.ones(sys.num_layers) if phi_anchor is None else np.asarray(phi_anchor, dtype=float).reshape(-1)
    if anchor.size != sys.num_layers:
        raise DimensionMismatch(f"anchor has length {anchor.size}, expected {sys.num_layers}")
    fn = _objective(sys, anchor, config.free_kappa)

    def run(start: int):
        p0 = _initial_point(sys, anchor, config, start, fn)
        p, value, grad_norm, iterations, stationary = _descend(fn, p0, config)
        return start, p, value, grad_norm, iterations, stationary

    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(run, range(config.multistarts)))
    else:
        results = [run(s) for s in range(config.multistarts)]

    solved = [r for r in results if r[2] <= config.tolerance]
    certified = [r for r in results if r[5] and np.isfinite(r[2])]
    pool_ = solved or certified
    if not pool_:
        best = min(results, key=lambda r: (r[2], r[0]))
        raise BudgetExhausted(
            f"no Solution or stationary point in {config.multistarts} starts "
            f"(best residual {best[2]:.3e}, gradient norm {best[3]:.3e})"
        )
    start, p, value, grad_norm, iterations, _ = min(pool_, key=lambda r: (r[2], r[0]))
    obs, state, eigs, kappas = _unpack(sys, p, config.free_kappa)
    return Solution(
        status="solution" if value <= config.tolerance else "best_effort",
        observable=obs,
        state=state,
        eigenvalues=eigs,
        residual=value,
        gradient_norm=grad_norm,
        start_index=start,
        iterations=iterations,
        phi_anchor=anchor,
        kappas=kappas,
    )


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

def integer_grid(num_vars: int, lo: int = -2, hi: int = 2) -> list[tuple[int, ...]]:
    return list(iter_product(range(lo, hi + 1), repeat=num_vars))


@dataclass(frozen=True)
class VerificationReport:
    passed: bool
    max_deviation: float
    rows: tuple[tuple[tuple[int, ...], float, float], ...]  # (phi, circuit, target)


def verify_encoding(
    sol: Solution,
    target: SosPolynomial,
    grid=None,
    deviation_atol: float = 1e-6,
) -> VerificationReport:
    """Compare the circuit value ||O U(phi) psi0||^2 against the target on an
    integer grid. Pointwise equality on the grid is the operational meaning
    of the encoding; the report carries failures instead of raising."""
    big_l = sol.eigenvalues.shape[0]
    grid = integer_grid(big_l) if grid is None else [tuple(int(v) for v in pt) for pt in grid]
    inst = vqasim.VqaInstance(
        psi0=sol.state.vector(),
        generators=[np.diag(sol.eigenvalues[l]).astype(complex) for l in range(big_l)],
        observable=sol.observable.matrix(),
    )
    rows = []
    worst = 0.0
    for pt in grid:
        circuit = vqasim.vqa_norm_objective(inst, np.asarray(pt, dtype=float))
        tgt = float(evaluate_sos(target, pt))
        worst = max(worst, abs(circuit - tgt))
        rows.append((pt, circuit, tgt))
    return VerificationReport(passed=worst <= deviation_atol, max_deviation=worst, rows=tuple(rows))


# ---------------------------------------------------------------------------
# Ideal export
# ---------------------------------------------------------------------------

class _CPoly:
    """Complex-coefficient polynomial over a fixed variable list, used only
    to write the matching equations out symbolically."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[tuple[int, ...], complex]):
        self.terms = terms

    @classmethod
    def constant(cls, nvars: int, value: complex) -> "_CPoly":
        value = complex(value)
        return cls({} if value == 0 else {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars: int, index: int, power: int = 1) -> "_CPoly":
        exp = [0] * nvars
        exp[index] = power
        return cls({tuple(exp): 1.0 + 0j})

    def __add__(self, other: "_CPoly") -> "_CPoly":
        out = dict(self.terms)
        for exp, c in other.terms.items():
            new = out.get(exp, 0) + c
            if new == 0:
                out.pop(exp, None)
            else:
                out[exp] = new
        return _CPoly(out)

    def __mul__(self, other) -> "_CPoly":
        if not isinstance(other, _CPoly):
            scalar = complex(other)
            if scalar == 0:
                return _CPoly({})
            return _CPoly({e: c * scalar for e, c in self.terms.items()})
        out: dict[tuple[int, ...], complex] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                new = out.get(exp, 0) + c1 * c2
                if new == 0:
                    out.pop(exp, None)
                else:
                    out[exp] = new
        return _CPoly(out)

    __rmul__ = __mul__


def ideal_variable_names(sys: EncodingSystem) -> list[str]:
    """o* (observable coords), wr*/wi* (state amplitude parts), kr*/ki*
    (expansion coefficient parts), h<l>_<r> (generator eigenvalues)."""
    n, big_l = sys.dim, sys.num_layers
    names = [f"o{i + 1}" for i in range(n * n)]
    names += [f"wr{r + 1}" for r in range(n)] + [f"wi{r + 1}" for r in range(n)]
    names += [f"kr{j}" for j in range(n)] + [f"ki{j}" for j in range(n)]
    names += [f"h{l + 1}_{r + 1}" for l in range(big_l) for r in range(n)]
    return names


def _ideal_polynomials(sys: EncodingSystem) -> list[_CPoly]:
    n, big_l = sys.dim, sys.num_layers
    names = ideal_variable_names(sys)
    nv = len(names)
    idx = {name: i for i, name in enumerate(names)}
    var = lambda name: _CPoly.variable(nv, idx[name])

    o_entry = [
        [
            sum(
                (var(f"o{i + 1}") * complex(sys._basis[i][r, t]) for i in range(n * n)),
                _CPoly.constant(nv, 0),
            )
            for t in range(n)
        ]
        for r in range(n)
    ]
    o_squared = [
        [
            sum((o_entry[r][u] * o_entry[u][t] for u in range(n)), _CPoly.constant(nv, 0))
            for t in range(n)
        ]
        for r in range(n)
    ]
    psi = [var(f"wr{r + 1}") + var(f"wi{r + 1}") * 1j for r in range(n)]
    psi_conj = [var(f"wr{r + 1}") + var(f"wi{r + 1}") * (-1j) for r in range(n)]

    def diag_monomial(a: tuple[int, ...], r: int) -> _CPoly:
        exp = [0] * nv
        for l, e in enumerate(a):
            if e:
                exp[idx[f"h{l + 1}_{r + 1}"]] = e
        return _CPoly({tuple(exp): 1.0 + 0j})

    # left[a][r] = conj(s_a d_{a,r} psi_r), right[a][t] = s_a d_{a,t} psi_t
    left: dict[tuple[int, ...], list[_CPoly]] = {}
    right: dict[tuple[int, ...], list[_CPoly]] = {}
    for a in sys.factor_monomials:
        mult = float(sylvester.multinomial(a))
        deg = sum(a)
        s = (var(f"kr{deg}") + var(f"ki{deg}") * 1j) * mult
        s_bar = (var(f"kr{deg}") + var(f"ki{deg}") * (-1j)) * mult
        left[a] = [s_bar * diag_monomial(a, r) * psi_conj[r] for r in range(n)]
        right[a] = [s * diag_monomial(a, t) * psi[t] for t in range(n)]

    out = []
    for j, monomial in enumerate(sys.monomials):
        g = _CPoly.constant(nv, -float(sys.rhs[j]))
        for a1, a2 in sys.pairs_by_monomial[monomial]:
            for r in range(n):
                for t in range(n):
                    g = g + left[a1][r] * o_squared[r][t] * right[a2][t]
        out.append(g)
    return out


def _render_cpoly(poly: _CPoly, names: list[str]) -> str:
    if not poly.terms:
        return "0"
    pieces = []
    for exp in sorted(poly.terms, key=lambda e: (sum(e), e)):
        c = poly.terms[exp]
        coeff = f"({c.real:.17g}{c.imag:+.17g}*I)"
        factors = [coeff]
        for name, e in zip(names, exp):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}**{e}")
        pieces.append("*".join(factors))
    return " + ".join(pieces)


def export_ideal(sys: EncodingSystem) -> str:
    """The matching equations as explicit polynomials, one per line, in a
    plain-text form (I is the imaginary unit, ** is exponentiation) that
    computer-algebra systems can ingest directly.

    The expansion coefficients appear as free unknowns kr*/ki*; binding them
    to the anchored values (see `unknown_bindings`) recovers the anchored
    residual exactly.
    """
    names = ideal_variable_names(sys)
    polys = _ideal_polynomials(sys)
    lines = [
        "# coefficient-matching ideal: one complex polynomial per line, graded monomial order",
        "# zero set = parameter choices matching the target; real and imaginary parts must vanish separately",
        "# unknown ordering: " + " ".join(names),
        "# equations correspond to parameter monomials:",
    ]
    for i, monomial in enumerate(sys.monomials):
        lines.append(f"#   eq {i + 1}: {monomial}")
    lines.extend(_render_cpoly(p, names) for p in polys)
    return "\n".join(lines) + "\n"


def unknown_bindings(
    sys: EncodingSystem,
    observable: ObservableParams,
    state: StateParams,
    eigs,
    phi_anchor,
) -> dict[str, float]:
    """Numeric values for every exported unknown at a parameter point, with
    kappa bound to its anchored value."""
    e = _as_eigs(sys, eigs)
    kappas = anchored_kappas(sys, e, phi_anchor)
    psi = state.vector()
    n, big_l = sys.dim, sys.num_layers
    bindings: dict[str, float] = {}
    for i in range(n * n):
        bindings[f"o{i + 1}"] = float(observable.coords[i])
    for r in range(n):
        bindings[f"wr{r + 1}"] = float(psi[r].real)
        bindings[f"wi{r + 1}"] = float(psi[r].imag)
    for j in range(n):
        bindings[f"kr{j}"] = float(kappas[j].real)
        bindings[f"ki{j}"] = float(kappas[j].imag)
    for l in range(big_l):
        for r in range(n):
            bindings[f"h{l + 1}_{r + 1}"] = float(e[l, r])
    return bindings
