"""srk: surface representation kit for genus-2 PSL(2,R) character varieties.

Pants-and-twist coordinates for genus-2 surface group representations,
closed trace formulas with matrix cross-checks, Euler classes through the
universal cover, the sign invariant on the Euler class 0 component, twist
dynamics, and a certified search for simple closed curves with
non-hyperbolic image.
"""

from . import cli, genus2, hyptrig, inequalities, pants, psl2r, search, torus

__version__ = "0.1.0"

__all__ = ["psl2r", "hyptrig", "pants", "genus2", "torus", "search",
           "inequalities", "cli", "__version__"]
