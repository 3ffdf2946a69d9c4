"""weilstats: exact statistics of curves over small finite fields.

Library layout:

- gf: finite field arithmetic and embeddings
- zeta_bounds: Weil polynomials, zeta utilities, point-count bounds
- curve_models: concrete curve equations and exact point counting
- moduli_stats: isomorphism-class ensembles and weighted character sums
- eichler_selberg: class numbers and the classical trace formula
- motive_ring: the ring Z[L, S[k], ...] and polynomial point counts
- siegel_extract: degree-2/3 Hecke trace extraction and congruences
- tables: shipped record tables and the bound-consistency diff
- cli: the command-line surface
"""

from .errors import IntegrityError, UnsupportedRangeError, ValidationError

__version__ = "0.1.0"

__all__ = [
    "IntegrityError",
    "UnsupportedRangeError",
    "ValidationError",
    "__version__",
]
