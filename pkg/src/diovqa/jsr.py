"""Joint spectral radius bounds and convergence classification for
vocabularies of square matrices.

For a finite set A = {A_1, ..., A_m}, long products grow like rho_hat(A)^t
where rho_hat is the joint spectral radius. Two computable quantities
sandwich it:

- every word w of length t gives the lower bound rho(A_w)^{1/t} (spectral
  radius of the product), and
- every prefix-complete cut of the word tree gives the upper bound
  max over cut words f of ||A_f||^{1/|f|} (spectral norm, submultiplicative).

The search walks the word tree level by level. A node is pruned when its
norm bound cannot beat the incumbent lower bound by more than a relative
threshold; pruned nodes stay in the cut, so the reported upper bound remains
valid. Both bounds tighten monotonically with depth. Exact computation is
out of reach in general, so `classify_convergence` returns Undecided as a
first-class answer whenever the sandwich straddles 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matcore, vqasim
from .errors import CapExceeded, DimensionMismatch

DEFAULT_PRUNE_THRESHOLD = 0.01
DEFAULT_PRODUCT_CAP = 2_000_000
DEFAULT_MARGIN = 0.01

CONVERGES = "converges"
DIVERGES = "diverges"
UNDECIDED = "undecided"


@dataclass
class MatrixVocabulary:
    """A finite labeled set of equal-dimension square matrices."""

    matrices: list[np.ndarray]
    labels: list[str] | None = None

    def __post_init__(self):
        if not self.matrices:
            raise ValueError("vocabulary must be nonempty")
        self.matrices = [matcore.as_square_matrix(m, f"matrix {i}") for i, m in enumerate(self.matrices)]
        n = self.matrices[0].shape[0]
        for i, m in enumerate(self.matrices):
            if m.shape[0] != n:
                raise DimensionMismatch(f"matrix {i} has dimension {m.shape[0]}, expected {n}")
        if self.labels is None:
            self.labels = [f"A{i + 1}" for i in range(len(self.matrices))]
        if len(self.labels) != len(self.matrices):
            raise ValueError("label count disagrees with matrix count")

    @property
    def dim(self) -> int:
        return self.matrices[0].shape[0]

    @property
    def size(self) -> int:
        return len(self.matrices)

    def to_json(self) -> dict:
        return {
            "matrices": [matcore.matrix_to_json(m) for m in self.matrices],
            "labels": list(self.labels),
        }

    @classmethod
    def from_json(cls, obj) -> "MatrixVocabulary":
        mats = [matcore.matrix_from_json(m, f"matrix {i}") for i, m in enumerate(obj["matrices"])]
        return cls(matrices=mats, labels=obj.get("labels"))


@dataclass(frozen=True)
class JsrBounds:
    """Certified sandwich lower <= rho_hat <= upper with the witness word."""

    lower: float
    upper: float
    depth: int
    witness_word: tuple[str, ...]

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"lower {self.lower!r} exceeds upper {self.upper!r}")


def _batch_spectral_norms(stack: np.ndarray) -> np.ndarray:
    return np.linalg.svd(stack, compute_uv=False)[:, 0]


def _batch_spectral_radii(stack: np.ndarray) -> np.ndarray:
    return np.abs(np.linalg.eigvals(stack)).max(axis=1)


def jsr_bounds(
    vocab: MatrixVocabulary,
    depth: int,
    prune_threshold: float = DEFAULT_PRUNE_THRESHOLD,
    product_cap: int = DEFAULT_PRODUCT_CAP,
) -> JsrBounds:
    """Sandwich the joint spectral radius by exploring words up to `depth`.

    Pruning is relative: a node survives only while its norm bound exceeds
    lower * (1 + prune_threshold), which keeps the bounds exactly covariant
    under scaling the vocabulary. Raises CapExceeded when the explored
    product count would pass `product_cap`.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if prune_threshold < 0:
        raise ValueError("prune threshold must be >= 0")
    mats = np.stack(vocab.matrices).astype(complex)
    m = vocab.size

    lower = 0.0
    witness: tuple[str, ...] = (vocab.labels[0],)
    pruned_max = 0.0
    upper = np.inf
    explored = 0
    max_level = 0

    level_products = np.eye(vocab.dim, dtype=complex)[None, :, :]
    level_words: list[tuple[int, ...]] = [()]

    for t in range(1, depth + 1):
        count = len(level_words) * m
        if explored + count > product_cap:
            raise CapExceeded(
                f"exploring level {t} needs {count} more products (cap {product_cap})"
            )
        explored += count
        max_level = t
        # Children: append each letter on the right of each surviving word.
        products = np.einsum("wij,ljk->wlik", level_products, mats).reshape(count, vocab.dim, vocab.dim)
        words = [w + (l,) for w in level_words for l in range(m)]

        radii = _batch_spectral_radii(products) ** (1.0 / t)
        best = int(np.argmax(radii))
        if radii[best] > lower:
            lower = float(radii[best])
            witness = tuple(vocab.labels[i] for i in words[best])

        norm_bounds = _batch_spectral_norms(products) ** (1.0 / t)
        # Pruned-so-far plus the whole current level is a prefix-complete cut.
        upper = min(upper, max(pruned_max, float(norm_bounds.max())))

        keep = norm_bounds > lower * (1.0 + prune_threshold)
        if not np.all(keep):
            dropped = norm_bounds[~keep]
            pruned_max = max(pruned_max, float(dropped.max()))
        if not np.any(keep) or t == depth:
            break
        level_products = products[keep]
        level_words = [w for w, k in zip(words, keep) if k]

    return JsrBounds(lower=lower, upper=float(max(upper, lower)), depth=max_level, witness_word=witness)


def classify_convergence(bounds: JsrBounds, margin: float = DEFAULT_MARGIN) -> str:
    """Converges iff upper < 1 - margin, diverges iff lower > 1 + margin,
    otherwise undecided (an expected outcome, not an error)."""
    if bounds.upper < 1.0 - margin:
        return CONVERGES
    if bounds.lower > 1.0 + margin:
        return DIVERGES
    return UNDECIDED


def build_qaoa_vocabulary(inst: vqasim.QaoaInstance, betas, gammas) -> MatrixVocabulary:
    """One layer matrix U_b(beta) U_c(gamma) per (beta, gamma) digit pair.

    Noise terms from the instance are applied additively per layer, so the
    members are generally not unitary.
    """
    betas = np.asarray(betas, dtype=float).reshape(-1)
    gammas = np.asarray(gammas, dtype=float).reshape(-1)
    if betas.size == 0 or gammas.size == 0:
        raise ValueError("digit sets must be nonempty")
    matrices, labels = [], []
    for b in betas:
        u_b = vqasim.mixer_layer(inst, float(b))
        for g in gammas:
            matrices.append(u_b @ vqasim.cost_layer(inst, float(g)))
            labels.append(f"b={float(b)!r},g={float(g)!r}")
    return MatrixVocabulary(matrices=matrices, labels=labels)


def block_reduce(vocab: MatrixVocabulary) -> MatrixVocabulary:
    """Embed an L-matrix vocabulary into two nL x nL matrices.

    U = blockdiag(U_1, ..., U_L) and T the block cyclic shift
    [[0, I_{n(L-1)}], [I_n, 0]]. The classification rho <= 1 is preserved in
    both directions (T itself has spectral radius 1, so the reduced pair can
    never certify strict convergence; agreement is up to Undecided).
    """
    n = vocab.dim
    big_l = vocab.size
    u = np.zeros((n * big_l, n * big_l), dtype=complex)
    for i, mat in enumerate(vocab.matrices):
        u[i * n:(i + 1) * n, i * n:(i + 1) * n] = mat
    t = np.zeros((n * big_l, n * big_l), dtype=complex)
    if big_l == 1:
        t = np.eye(n, dtype=complex)
    else:
        t[: n * (big_l - 1), n:] = np.eye(n * (big_l - 1))
        t[n * (big_l - 1):, :n] = np.eye(n)
    return MatrixVocabulary(matrices=[u, t], labels=["U", "T"])


def bounds_to_json(bounds: JsrBounds, margin: float = DEFAULT_MARGIN) -> dict:
    return {
        "lower": float(bounds.lower),
        "upper": float(bounds.upper),
        "depth": int(bounds.depth),
        "witness_word": list(bounds.witness_word),
        "classification": classify_convergence(bounds, margin),
    }
