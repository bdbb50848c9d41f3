"""Integer multivariate polynomials, sum-of-squares containers, and a
universal Diophantine sum-of-squares equation with guarded bignum evaluation.

Coefficients are Python ints (arbitrary precision); exponent vectors are
dense fixed-length tuples. Evaluation is exact, but every intermediate power
is screened against a bit budget so that astronomically large terms (the
equation below contains b^(5^60)) raise BudgetExceeded instead of grinding
forever -- there is no wraparound to guard against, only runaway growth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import BudgetExceeded, DimensionMismatch

DEFAULT_BIT_BUDGET = 1_000_000


def count_monomials(num_vars: int, degree: int) -> int:
    """Number of monomials of total degree <= degree in num_vars variables."""
    if num_vars < 1 or degree < 0:
        raise ValueError(f"need num_vars >= 1 and degree >= 0, got ({num_vars}, {degree})")
    return math.comb(num_vars + degree, degree)


def _checked_pow(base: int, exponent: int, bit_budget: int, monomial) -> int:
    """base**exponent with a pre-flight size check against the bit budget."""
    if exponent == 0:
        return 1
    if base == 0:
        return 0
    if base == 1:
        return 1
    if base == -1:
        return -1 if exponent % 2 else 1
    bits = exponent * abs(base).bit_length()
    if bits > bit_budget:
        raise BudgetExceeded(
            f"{base}^{exponent} needs ~{bits} bits, over the {bit_budget}-bit budget",
            monomial=monomial,
        )
    return base ** exponent


@dataclass(frozen=True)
class IntPolynomial:
    """Multivariate polynomial with arbitrary-precision integer coefficients.

    `terms` maps exponent tuples (length num_vars) to nonzero coefficients.
    Arithmetic returns new values; nothing is mutated in place.
    """

    num_vars: int
    terms: dict[tuple[int, ...], int] = field(default_factory=dict)

    def __post_init__(self):
        for exp, coef in self.terms.items():
            if len(exp) != self.num_vars:
                raise DimensionMismatch(f"exponent {exp} has length {len(exp)}, expected {self.num_vars}")
            if coef == 0:
                raise ValueError(f"zero coefficient stored at {exp}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")

    @classmethod
    def from_terms(cls, num_vars: int, raw: dict) -> "IntPolynomial":
        return cls(num_vars, {tuple(int(e) for e in k): int(v) for k, v in raw.items() if int(v) != 0})

    @classmethod
    def constant(cls, num_vars: int, value: int) -> "IntPolynomial":
        value = int(value)
        if value == 0:
            return cls(num_vars, {})
        return cls(num_vars, {(0,) * num_vars: value})

    @classmethod
    def variable(cls, num_vars: int, index: int, power: int = 1) -> "IntPolynomial":
        exp = [0] * num_vars
        exp[index] = int(power)
        return cls(num_vars, {tuple(exp): 1})

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def constant_term(self) -> int:
        return self.terms.get((0,) * self.num_vars, 0)

    def _coerce(self, other) -> "IntPolynomial":
        if isinstance(other, IntPolynomial):
            if other.num_vars != self.num_vars:
                raise DimensionMismatch("mixing polynomials over different variable counts")
            return other
        return IntPolynomial.constant(self.num_vars, other)

    def __add__(self, other) -> "IntPolynomial":
        other = self._coerce(other)
        merged = dict(self.terms)
        for exp, coef in other.terms.items():
            new = merged.get(exp, 0) + coef
            if new == 0:
                merged.pop(exp, None)
            else:
                merged[exp] = new
        return IntPolynomial(self.num_vars, merged)

    __radd__ = __add__

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(self.num_vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "IntPolynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "IntPolynomial":
        return (-self) + other

    def __mul__(self, other) -> "IntPolynomial":
        other = self._coerce(other)
        out: dict[tuple[int, ...], int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                new = out.get(exp, 0) + c1 * c2
                if new == 0:
                    out.pop(exp, None)
                else:
                    out[exp] = new
        return IntPolynomial(self.num_vars, out)

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "IntPolynomial":
        if not isinstance(power, int) or power < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        result = IntPolynomial.constant(self.num_vars, 1)
        base = self
        while power:
            if power & 1:
                result = result * base
            power >>= 1
            if power:
                base = base * base
        return result

    def evaluate(self, point, bit_budget: int = DEFAULT_BIT_BUDGET) -> int:
        return evaluate(self, point, bit_budget)

    def to_json(self) -> dict:
        ordered = sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]))
        return {
            "num_vars": self.num_vars,
            "terms": [{"exp": [int(e) for e in exp], "coef": str(coef)} for exp, coef in ordered],
        }

    @classmethod
    def from_json(cls, obj) -> "IntPolynomial":
        terms = {tuple(int(e) for e in t["exp"]): int(t["coef"]) for t in obj["terms"]}
        return cls(int(obj["num_vars"]), {e: c for e, c in terms.items() if c != 0})


def evaluate(p: IntPolynomial, point, bit_budget: int = DEFAULT_BIT_BUDGET) -> int:
    """Exact value of p at an integer point, guarded by the bit budget."""
    pt = [int(v) for v in point]
    if len(pt) != p.num_vars:
        raise DimensionMismatch(f"point has length {len(pt)}, expected {p.num_vars}")
    if bit_budget <= 0:
        raise ValueError("bit_budget must be positive")
    total = 0
    for exp, coef in p.terms.items():
        mono = 1
        for v, e in zip(pt, exp):
            if e == 0:
                continue
            mono *= _checked_pow(v, e, bit_budget, exp)
            if mono.bit_length() > bit_budget:
                raise BudgetExceeded(
                    f"monomial value at {exp} exceeds the {bit_budget}-bit budget", monomial=exp
                )
        total += coef * mono
    return total


@dataclass(frozen=True)
class SosPolynomial:
    """Sum of squares sum_j q_j^2 of integer polynomials.

    Nonnegative at every integer point, and zero exactly at the common
    integer roots of the summands.
    """

    num_vars: int
    summands: tuple[IntPolynomial, ...]

    def __post_init__(self):
        object.__setattr__(self, "summands", tuple(self.summands))
        for q in self.summands:
            if q.num_vars != self.num_vars:
                raise DimensionMismatch("summand variable count mismatch")

    def evaluate(self, point, bit_budget: int = DEFAULT_BIT_BUDGET) -> int:
        return evaluate_sos(self, point, bit_budget)

    def expanded(self) -> IntPolynomial:
        """The expanded polynomial sum_j q_j^2 (desk-scale summands only)."""
        acc = IntPolynomial.constant(self.num_vars, 0)
        for q in self.summands:
            acc = acc + q * q
        return acc

    def degree(self) -> int:
        return max((2 * q.degree() for q in self.summands), default=0)

    def to_json(self) -> dict:
        return {"num_vars": self.num_vars, "summands": [q.to_json() for q in self.summands]}

    @classmethod
    def from_json(cls, obj) -> "SosPolynomial":
        return cls(int(obj["num_vars"]), tuple(IntPolynomial.from_json(q) for q in obj["summands"]))


def evaluate_sos(s: SosPolynomial, point, bit_budget: int = DEFAULT_BIT_BUDGET) -> int:
    """sum_j q_j(point)^2, exact and nonnegative."""
    total = 0
    for q in s.summands:
        v = evaluate(q, point, bit_budget)
        if v.bit_length() * 2 > bit_budget:
            raise BudgetExceeded(f"squaring a {v.bit_length()}-bit summand value exceeds the budget")
        total += v * v
    return total


def polyplussin_objective(p: IntPolynomial, x) -> float:
    """p(x) + sum_i sin^2(pi x_i) over real x.

    Zero value certifies that x is integral and a root of p (up to floating
    tolerance); the sine penalty lifts every non-integer point.
    """
    import numpy as np

    xv = np.asarray(x, dtype=float).reshape(-1)
    if xv.size != p.num_vars:
        raise DimensionMismatch(f"point has length {xv.size}, expected {p.num_vars}")
    value = 0.0
    for exp, coef in p.terms.items():
        value += float(coef) * float(np.prod(xv ** np.asarray(exp, dtype=float)))
    return value + float(np.sum(np.sin(np.pi * xv) ** 2))


# ---------------------------------------------------------------------------
# Universal Diophantine sum-of-squares equation: 28 variables, 18 squared
# clauses, 4 integer parameters (u, x, y, z). The second clause contains the
# tower exponent 5^60, kept exact unless an exponent cap is supplied.
# ---------------------------------------------------------------------------

UDE_VARIABLES: tuple[str, ...] = (
    "a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l", "m", "n",
    "o", "p", "q", "r", "s", "t", "w",
    "alpha", "gamma", "nu", "theta", "lam", "tau", "phi",
)

UDE_PARAMETERS: tuple[str, ...] = ("u", "x", "y", "z")

UDE_TOWER_EXPONENT = 5 ** 60


@dataclass(frozen=True)
class UdeInstance:
    """The 18-clause equation body with parameter values substituted."""

    variables: tuple[str, ...]
    parameters: dict[str, int]
    body: SosPolynomial

    def __post_init__(self):
        if len(self.body.summands) != 18:
            raise ValueError(f"expected 18 clauses, got {len(self.body.summands)}")


def ude_instance(u: int, x: int, y: int, z: int, exponent_cap: int | None = None) -> UdeInstance:
    nv = len(UDE_VARIABLES)
    v = {name: IntPolynomial.variable(nv, idx) for idx, name in enumerate(UDE_VARIABLES)}
    u, x, y, z = int(u), int(x), int(y), int(z)
    tower = UDE_TOWER_EXPONENT if exponent_cap is None else int(exponent_cap)
    if tower < 1:
        raise ValueError("exponent cap must be >= 1")

    a, b, c, d, e, f, g, h, i_, j, k, l, m, n = (v[s] for s in "abcdefghijklmn")
    o, p, q, r, s, t, w = (v[s] for s in "opqrstw")
    alpha, gamma, nu, theta, lam, tau, phi = (
        v["alpha"], v["gamma"], v["nu"], v["theta"], v["lam"], v["tau"], v["phi"],
    )

    b5 = b ** 5
    clauses = [
        e * l * g ** 2 + alpha - (b - x * y) * q ** 2,
        q - b ** tower,
        lam + q ** 4 - 1 - lam * b5,
        theta + 2 * z - b5,
        u + t * theta - l,
        y + m * theta - e,
        q ** 16 - n,
        (
            (g + e * q ** 3 + l * q ** 5
             + (2 * (e - z * lam) * (1 + x * b5 + g) ** 4 + lam * b5 + lam * b5 * q ** 4) * q ** 4)
            * (n ** 2 - n)
            + (q ** 3 - b * l + 1 + theta * lam * q ** 3 + (b5 - 2) * q ** 5) * (n ** 2 - 1)
            - r
        ),
        2 * w * s ** 2 * r ** 2 * n ** 2 - p,
        p ** 2 * k ** 2 - k ** 2 + 1 - tau ** 2,
        4 * (c - k * s * n ** 2) ** 2 + nu - k ** 2,
        r + 1 + h * p - h - k,
        (w * n ** 2 + 1) * r * s * n ** 2 - a,
        2 * r + 1 + phi - c,
        b * w + c * a - 2 * c + 4 * a * gamma - 5 * gamma - d,
        (a ** 2 - 1) * c ** 2 + 1 - d ** 2,
        (a ** 2 - 1) * i_ ** 2 * c ** 4 + 1 - f ** 2,
        ((a + f ** 2 * (d ** 2 - a)) ** 2 - 1) * (2 * r + 1 + j * c) ** 2 + 1 - (d + o * f) ** 2,
    ]
    body = SosPolynomial(nv, tuple(clauses))
    return UdeInstance(UDE_VARIABLES, {"u": u, "x": x, "y": y, "z": z}, body)


def ude_d28(u: int, x: int, y: int, z: int, exponent_cap: int | None = None) -> SosPolynomial:
    """The 18-clause sum-of-squares body with parameters substituted.

    With no exponent cap the b^(5^60) clause is constructed exactly; callers
    are expected to evaluate it only where the bit budget allows (|b| <= 1,
    or with a cap in place).
    """
    return ude_instance(u, x, y, z, exponent_cap).body
