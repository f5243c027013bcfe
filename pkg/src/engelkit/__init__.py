"""engelkit: verification toolkit for Engel and contact structures.

Symbolic certification of non-integrability conditions on coordinate
charts, the model round-handle catalog, curve invariants, dividing-set
combinatorics, and the integer framing solver.
"""

__version__ = "0.1.0"

from .scalar import ScalarExpr, num, sym, sin_of, cos_of, simplify, try_divide  # noqa: F401
