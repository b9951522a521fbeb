"""Pure-numpy reference implementations of the hot evaluation kernels.

These are the import-time fallback when the compiled extension is missing.
Both backends must agree to close to machine precision; see
tests/test_kernels.py for the parity checks and benchmarks/bench_kernels.py
for the speed comparison.
"""

import numpy as np

BACKEND = "python"


def abs_dot_max(rows, points):
    """max_j |<rows[j], points[i]>| for each point i.

    Evaluates a facet-form gauge (rows = outward normals) or a vertex-form
    support function (rows = vertices) on a batch of points.
    """
    return np.abs(points @ rows.T).max(axis=1)


def factor_norm(factor, points):
    """Euclidean norm of factor @ points[i] for each point i.

    With factor the upper Cholesky transpose L^T of a quadratic form
    Q = L L^T this is the ellipsoidal gauge sqrt(x^T Q x).
    """
    return np.linalg.norm(points @ factor.T, axis=1)


def pnorm_rows(points, p):
    """Row-wise l_p norm, p in [1, inf]."""
    if np.isinf(p):
        return np.abs(points).max(axis=1)
    if p == 1.0:
        return np.abs(points).sum(axis=1)
    if p == 2.0:
        return np.linalg.norm(points, axis=1)
    return (np.abs(points) ** p).sum(axis=1) ** (1.0 / p)
