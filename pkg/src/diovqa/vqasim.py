"""Reference statevector simulators for layered variational circuits.

Dense simulation at arbitrary Hilbert dimension n (qudits are native; no
power-of-two assumption). Three instance kinds:

- VqaInstance: initial state, L Hermitian generators, observable, and an
  optional finite digit set for the digitized decision search.
- QaoaInstance: alternating mixer/cost layers, optionally with additive
  (generally non-unitary) noise terms on each layer.
- BkInstance: an explicit mixer/cost/observable family on C^(2d+1) whose
  single-layer energy has the closed form
      E(beta, gamma) = sin^2(tau gamma) f(beta)
                       + 2 tau cos(tau gamma) sin(tau gamma) g(beta),
      f(beta) = 1/4 sum_{ij} A_ij (cos(E_i beta) cos(E_j beta) - 1) <= 0,
      g(beta) = -(sin(beta)/d) sum_j cos(E_j beta).

Expectation values assert |Im| <= 1e-10 before truncating to a real; a
violation raises NumericIntegrityError (it means the observable was not
Hermitian after all).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import matcore
from .errors import DimensionMismatch, EnumerationCapExceeded, NumericIntegrityError

IMAG_RESIDUE_ATOL = 1e-10
GROUND_STATE_ATOL = 1e-8
DEFAULT_ENUMERATION_CAP = 10 ** 7


def _real_expectation(value: complex, what: str) -> float:
    if abs(value.imag) > IMAG_RESIDUE_ATOL:
        raise NumericIntegrityError(f"{what} has imaginary residue {value.imag:.3e}")
    return float(value.real)


@dataclass
class VqaInstance:
    """Layered single-generator-per-layer ansatz with a fixed observable."""

    psi0: np.ndarray
    generators: list[np.ndarray]
    observable: np.ndarray
    digit_set: np.ndarray | None = None

    def __post_init__(self):
        self.psi0 = matcore.state_vector(self.psi0, "psi0")
        self.generators = [matcore.hermitian(h, name=f"H_{i + 1}") for i, h in enumerate(self.generators)]
        self.observable = matcore.hermitian(self.observable, name="observable")
        n = self.psi0.size
        for i, h in enumerate(self.generators):
            if h.shape[0] != n:
                raise DimensionMismatch(f"H_{i + 1} has dimension {h.shape[0]}, state has {n}")
        if self.observable.shape[0] != n:
            raise DimensionMismatch("observable dimension disagrees with the state")
        if self.digit_set is not None:
            d = np.asarray(self.digit_set, dtype=float).reshape(-1)
            if d.size == 0 or not np.all(np.isfinite(d)):
                raise ValueError("digit set must be a nonempty finite set")
            d = np.unique(d)  # sorted and duplicate-free
            self.digit_set = d

    @property
    def dim(self) -> int:
        return self.psi0.size

    @property
    def num_layers(self) -> int:
        return len(self.generators)

    def to_json(self) -> dict:
        obj = {
            "psi0": matcore.matrix_to_json(self.psi0),
            "generators": [matcore.matrix_to_json(h) for h in self.generators],
            "observable": matcore.matrix_to_json(self.observable),
        }
        if self.digit_set is not None:
            obj["digit_set"] = [float(v) for v in self.digit_set]
        return obj

    @classmethod
    def from_json(cls, obj) -> "VqaInstance":
        return cls(
            psi0=matcore.matrix_from_json(obj["psi0"], "psi0"),
            generators=[matcore.matrix_from_json(h, f"H_{i + 1}") for i, h in enumerate(obj["generators"])],
            observable=matcore.matrix_from_json(obj["observable"], "observable"),
            digit_set=obj.get("digit_set"),
        )


def vqa_state(inst: VqaInstance, phi) -> np.ndarray:
    """U_L(phi_L) ... U_1(phi_1) |psi0> with U_i = e^{-i phi_i H_i}."""
    phi = np.asarray(phi, dtype=float).reshape(-1)
    if phi.size != inst.num_layers:
        raise DimensionMismatch(f"phi has length {phi.size}, expected {inst.num_layers}")
    psi = inst.psi0
    for h, p in zip(inst.generators, phi):
        psi = matcore.matrix_exp(h, -1j * p) @ psi
    return psi


def vqa_objective(inst: VqaInstance, phi) -> float:
    """<psi(phi)| O |psi(phi)>."""
    psi = vqa_state(inst, phi)
    return _real_expectation(complex(psi.conj() @ (inst.observable @ psi)), "expectation value")


def vqa_norm_objective(inst: VqaInstance, phi) -> float:
    """||O psi(phi)||^2 = sum_j lambda_j^2 ||P_j psi(phi)||^2."""
    psi = vqa_state(inst, phi)
    v = inst.observable @ psi
    return float(np.real(v.conj() @ v))


@dataclass(frozen=True)
class DecisionOutcome:
    """Result of the digitized decision search."""

    satisfiable: bool
    witness: tuple[float, ...] | None = None
    value: float | None = None
    points_checked: int = 0


def digitized_decision(inst: VqaInstance, a: float, enumeration_cap: int = DEFAULT_ENUMERATION_CAP) -> DecisionOutcome:
    """Decide whether some phi in the digit grid achieves objective <= a.

    Enumerates the grid in lexicographic order over the sorted digit set and
    returns the first witness, so witnesses are deterministic and
    lexicographically minimal. A NO answer certifies exhaustive enumeration.
    """
    if inst.digit_set is None:
        raise ValueError("instance carries no digit set")
    digits = inst.digit_set
    size = len(digits) ** inst.num_layers
    if size > enumeration_cap:
        raise EnumerationCapExceeded(f"|D|^L = {size} exceeds the cap {enumeration_cap}")
    checked = 0
    for phi in itertools.product(digits, repeat=inst.num_layers):
        checked += 1
        value = vqa_objective(inst, phi)
        if value <= a:
            return DecisionOutcome(True, tuple(float(p) for p in phi), value, checked)
    return DecisionOutcome(False, None, None, checked)


def two_level_noise(z: complex, w: complex, theta: float, epsilon: float) -> np.ndarray:
    """Additive two-level noise term [[z, w], [-e^{i(theta+eps)} w*, e^{i theta} z*]].

    Unitary exactly when epsilon = 0 and |z|^2 + |w|^2 = 1; any epsilon > 0
    breaks unitarity.
    """
    z, w = complex(z), complex(w)
    return np.array(
        [
            [z, w],
            [-np.exp(1j * (theta + epsilon)) * np.conj(w), np.exp(1j * theta) * np.conj(z)],
        ],
        dtype=complex,
    )


@dataclass
class QaoaInstance:
    """Alternating mixer/cost ansatz, optionally with additive layer noise."""

    h_b: np.ndarray
    h_c: np.ndarray
    layers: int
    psi0: np.ndarray
    noise_b: np.ndarray | None = None
    noise_c: np.ndarray | None = None

    def __post_init__(self):
        self.h_b = matcore.hermitian(self.h_b, name="h_b")
        self.h_c = matcore.hermitian(self.h_c, name="h_c")
        self.psi0 = matcore.state_vector(self.psi0, "psi0")
        n = self.h_b.shape[0]
        if self.h_c.shape[0] != n or self.psi0.size != n:
            raise DimensionMismatch("h_b, h_c and psi0 dimensions disagree")
        if self.layers < 0:
            raise ValueError("layer count must be nonnegative")
        # Noise terms stay general square matrices: the interesting ones are
        # the non-Hermitian near-unitary perturbations.
        if self.noise_b is not None:
            self.noise_b = matcore.as_square_matrix(self.noise_b, "noise_b")
            if self.noise_b.shape[0] != n:
                raise DimensionMismatch("noise_b dimension disagrees")
        if self.noise_c is not None:
            self.noise_c = matcore.as_square_matrix(self.noise_c, "noise_c")
            if self.noise_c.shape[0] != n:
                raise DimensionMismatch("noise_c dimension disagrees")
        residual = float(np.linalg.norm(self.h_b @ self.psi0 - self.ground_energy() * self.psi0))
        if residual > GROUND_STATE_ATOL:
            raise ValueError(
                f"psi0 is not a minimal-eigenvalue eigenvector of h_b (residual {residual:.3e})"
            )

    def ground_energy(self) -> float:
        return float(np.linalg.eigvalsh(self.h_b)[0])

    @property
    def dim(self) -> int:
        return self.h_b.shape[0]


def mixer_layer(inst: QaoaInstance, beta: float) -> np.ndarray:
    u = matcore.matrix_exp(inst.h_b, -1j * float(beta))
    return u if inst.noise_b is None else u + inst.noise_b


def cost_layer(inst: QaoaInstance, gamma: float) -> np.ndarray:
    u = matcore.matrix_exp(inst.h_c, -1j * float(gamma))
    return u if inst.noise_c is None else u + inst.noise_c


def qaoa_state(inst: QaoaInstance, beta, gamma) -> np.ndarray:
    """U_b(beta_L) U_c(gamma_L) ... U_b(beta_1) U_c(gamma_1) |psi0>.

    Layers apply right to left; with noise present the layers are not
    unitary and the output norm may drift from 1.
    """
    beta = np.asarray(beta, dtype=float).reshape(-1)
    gamma = np.asarray(gamma, dtype=float).reshape(-1)
    if beta.size != inst.layers or gamma.size != inst.layers:
        raise DimensionMismatch(f"expected {inst.layers} beta and gamma values")
    psi = inst.psi0.copy()
    for b, g in zip(beta, gamma):
        psi = cost_layer(inst, g) @ psi
        psi = mixer_layer(inst, b) @ psi
    return psi


def qaoa_energy(inst: QaoaInstance, beta, gamma) -> float:
    """<psi(beta, gamma)| h_c |psi(beta, gamma)> via direct simulation."""
    psi = qaoa_state(inst, beta, gamma)
    return _real_expectation(complex(psi.conj() @ (inst.h_c @ psi)), "energy")


@dataclass
class BkInstance:
    """Explicit mixer/cost family on C^(2d+1) with a closed-form landscape.

    energies: d reals with |E_i| < 1 (the +-E_i mixer blocks).
    adjacency: symmetric 0/1 matrix with zero diagonal.
    tau: the cost-coupling constant.
    """

    energies: np.ndarray
    adjacency: np.ndarray
    tau: float

    def __post_init__(self):
        self.energies = np.asarray(self.energies, dtype=float).reshape(-1)
        if self.energies.size == 0:
            raise ValueError("need at least one energy")
        if np.any(np.abs(self.energies) >= 1):
            raise ValueError("all |E_i| must be < 1")
        self.adjacency = np.asarray(self.adjacency, dtype=float)
        d = self.energies.size
        if self.adjacency.shape != (d, d):
            raise DimensionMismatch(f"adjacency must be {d}x{d}")
        if not np.array_equal(self.adjacency, self.adjacency.T):
            raise ValueError("adjacency must be symmetric")
        if np.any(np.diag(self.adjacency) != 0):
            raise ValueError("adjacency must have zero diagonal")
        if not np.all(np.isin(self.adjacency, (0.0, 1.0))):
            raise ValueError("adjacency entries must be 0 or 1")
        self.tau = float(self.tau)

    @property
    def d(self) -> int:
        return self.energies.size

    @property
    def dim(self) -> int:
        return 2 * self.d + 1

    def to_json(self) -> dict:
        return {
            "energies": [float(v) for v in self.energies],
            "adjacency": [[int(v) for v in row] for row in self.adjacency],
            "tau": float(self.tau),
        }

    @classmethod
    def from_json(cls, obj) -> "BkInstance":
        return cls(energies=obj["energies"], adjacency=obj["adjacency"], tau=obj["tau"])


def bk_observable(inst: BkInstance) -> np.ndarray:
    """The 2d x 2d observable: O' = (d/8) A (x) [[1,1],[1,1]] off the diagonal,
    with each diagonal entry set to minus its column sum so every column of O
    sums to zero (making the uniform vector a null vector)."""
    d = inst.d
    o_prime = (d / 8.0) * np.kron(inst.adjacency, np.ones((2, 2)))
    o = o_prime.copy()
    for j in range(2 * d):
        o[j, j] = -o_prime[:, j].sum()
    return o


def bk_build(inst: BkInstance) -> QaoaInstance:
    """Assemble the mixer, cost and initial state as a single-layer instance.

    The mixer is diag(E_1, -E_1, ..., E_d, -E_d, -1): the corner entry is
    -1 so that the last basis state is the ground state with energy -1,
    which the rest of the construction relies on.
    """
    d, dim = inst.d, inst.dim
    h_b = np.zeros((dim, dim))
    for j in range(d):
        h_b[2 * j, 2 * j] = inst.energies[j]
        h_b[2 * j + 1, 2 * j + 1] = -inst.energies[j]
    h_b[2 * d, 2 * d] = -1.0

    o = bk_observable(inst)
    h_c = np.zeros((dim, dim))
    h_c[: 2 * d, : 2 * d] = o
    plus = np.zeros(dim)
    plus[: 2 * d] = 1.0 / np.sqrt(2 * d)
    last = np.zeros(dim)
    last[2 * d] = 1.0
    h_c += inst.tau * (np.outer(plus, last) + np.outer(last, plus))

    return QaoaInstance(h_b=h_b, h_c=h_c, layers=1, psi0=last)


def bk_state_closed_form(inst: BkInstance, beta: float, gamma: float) -> np.ndarray:
    """The single-layer state, written out:
    cos(tau gamma) e^{i beta} |2d+1>
    - i sin(tau gamma)/sqrt(2d) sum_j (e^{-i E_j beta}|2j-1> + e^{i E_j beta}|2j>)."""
    d = inst.d
    tg = inst.tau * gamma
    psi = np.zeros(inst.dim, dtype=complex)
    psi[2 * d] = np.cos(tg) * np.exp(1j * beta)
    amp = -1j * np.sin(tg) / np.sqrt(2 * d)
    for j in range(d):
        psi[2 * j] = amp * np.exp(-1j * inst.energies[j] * beta)
        psi[2 * j + 1] = amp * np.exp(1j * inst.energies[j] * beta)
    return psi


def bk_f(inst: BkInstance, beta: float) -> float:
    """f(beta) = 1/4 sum_ij A_ij (cos(E_i beta) cos(E_j beta) - 1); always <= 0."""
    c = np.cos(inst.energies * beta)
    return 0.25 * float(inst.adjacency @ c @ c - inst.adjacency.sum())


def bk_g(inst: BkInstance, beta: float) -> float:
    """g(beta) = -(sin(beta)/d) sum_j cos(E_j beta)."""
    return -float(np.sin(beta) / inst.d * np.cos(inst.energies * beta).sum())


def bk_energy_closed_form(inst: BkInstance, beta: float, gamma: float) -> float:
    """sin^2(tau gamma) f(beta) + 2 tau cos(tau gamma) sin(tau gamma) g(beta)."""
    tg = inst.tau * gamma
    return (
        np.sin(tg) ** 2 * bk_f(inst, beta)
        + 2 * inst.tau * np.cos(tg) * np.sin(tg) * bk_g(inst, beta)
    )


@dataclass(frozen=True)
class LandscapeTable:
    """Grid evaluation rows (beta, gamma, E_closed, E_direct)."""

    rows: tuple[tuple[float, float, float, float], ...]
    max_deviation: float

    def argmin(self) -> tuple[float, float, float]:
        """(beta, gamma, E) of the grid minimum of the direct energy."""
        best = min(self.rows, key=lambda r: r[3])
        return best[0], best[1], best[3]

    def to_csv(self) -> str:
        lines = ["beta,gamma,E_closed,E_direct"]
        for b, g, ec, ed in self.rows:
            lines.append(f"{b:.17g},{g:.17g},{ec:.17g},{ed:.17g}")
        return "\n".join(lines) + "\n"


def bk_landscape(inst: BkInstance, beta_grid, gamma_grid, deviation_atol: float = 1e-8) -> LandscapeTable:
    """Tabulate closed-form and direct energies over a (beta, gamma) grid.

    Asserts f(beta) <= 0 on the grid and that the closed form tracks the
    direct simulation within `deviation_atol`.
    """
    qaoa = bk_build(inst)
    # One eigendecomposition of h_c; the mixer is diagonal already.
    w_c, q_c = np.linalg.eigh(qaoa.h_c)
    h_b_diag = np.diag(qaoa.h_b).real
    rows = []
    worst = 0.0
    for beta in np.asarray(beta_grid, dtype=float).reshape(-1):
        f_val = bk_f(inst, float(beta))
        if f_val > 1e-12:
            raise NumericIntegrityError(f"f(beta) = {f_val:.3e} > 0 at beta = {beta}")
        for gamma in np.asarray(gamma_grid, dtype=float).reshape(-1):
            psi = q_c @ (np.exp(-1j * w_c * gamma) * (q_c.conj().T @ qaoa.psi0))
            psi = np.exp(-1j * h_b_diag * beta) * psi
            e_direct = _real_expectation(complex(psi.conj() @ (qaoa.h_c @ psi)), "energy")
            e_closed = bk_energy_closed_form(inst, float(beta), float(gamma))
            worst = max(worst, abs(e_closed - e_direct))
            rows.append((float(beta), float(gamma), float(e_closed), float(e_direct)))
    if worst > deviation_atol:
        raise NumericIntegrityError(
            f"closed form deviates from direct simulation by {worst:.3e} > {deviation_atol:.1e}"
        )
    return LandscapeTable(rows=tuple(rows), max_deviation=worst)
