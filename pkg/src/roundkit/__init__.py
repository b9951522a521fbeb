"""roundkit: numerical convex geometry for symmetric bodies.

Gauge/support oracles, polar duality, slices and projections, Monte Carlo
volume functionals, ellipsoid fitting, and a randomized pipeline that
extracts round subquotients with machine-checkable certificates.
"""

from .kernels import backend_name

__version__ = "0.1.0"

__all__ = ["backend_name", "__version__"]
