"""diovqa: desk-scale numerics for variational-circuit hardness constructions.

Modules:

- matcore: dense complex linear algebra (Hermitian checks, exponentials, norms)
- sylvester: finite exponential expansions of commuting Hermitian families
- sospoly: integer polynomials, sum-of-squares forms, guarded bignum evaluation
- vqasim: statevector simulators for layered and alternating-layer ansatze
- encoder: coefficient matching between squared amplitudes and target polynomials
- jsr: joint spectral radius bounds and convergence classification
- cli: the `diovqa` command-line entry point
"""

from . import cli, encoder, errors, jsr, matcore, sospoly, sylvester, vqasim

__version__ = "0.1.0"

__all__ = [
    "cli",
    "encoder",
    "errors",
    "jsr",
    "matcore",
    "sospoly",
    "sylvester",
    "vqasim",
    "__version__",
]
