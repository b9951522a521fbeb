"""Dense small-dimension linear algebra, seeded randomness, and random subspaces.

Vectors and matrices are plain float64 numpy arrays throughout the package;
this module adds the two value types built on top of them: a reproducible
random stream and an orthonormal-basis subspace.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, RankDeficient

ORTHO_TOL = 1e-10


class RngStream:
    """Counter-based random stream, reproducible from (seed, stream_id).

    Wraps a Philox generator keyed by a SeedSequence. Two streams built from
    the same (seed, stream_id) produce identical draws; `spawn` derives
    independent child streams deterministically, so chunked Monte Carlo loops
    are bitwise reproducible given the chunk layout. Parallel consumers must
    use distinct stream_ids or spawned children.
    """

    def __init__(self, seed: int, stream_id: int = 0, _sequence=None):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        if _sequence is None:
            _sequence = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self._sequence = _sequence
        self._gen = None

    @property
    def gen(self) -> np.random.Generator:
        if self._gen is None:
            self._gen = np.random.Generator(np.random.Philox(self._sequence))
        return self._gen

    def spawn(self, n: int) -> list["RngStream"]:
        return [RngStream(self.seed, self.stream_id, _sequence=s) for s in self._sequence.spawn(n)]

    def normal(self, shape):
        return self.gen.standard_normal(shape)

    def uniform(self, shape):
        return self.gen.random(shape)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


@dataclass(frozen=True)
class Subspace:
    """A d-dimensional subspace of R^n carried by an orthonormal basis.

    basis has shape (ambient_dim, d) with orthonormal columns (checked to
    ORTHO_TOL at construction).
    """

    ambient_dim: int
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        basis = np.ascontiguousarray(np.atleast_2d(np.asarray(self.basis, dtype=float)))
        if basis.shape[0] != self.ambient_dim:
            raise DimensionMismatch(
                f"basis has {basis.shape[0]} rows, ambient dimension is {self.ambient_dim}"
            )
        if basis.shape[1] < 1 or basis.shape[1] > self.ambient_dim:
            raise RankDeficient(f"subspace dimension {basis.shape[1]} out of range")
        gram = basis.T @ basis
        if not np.allclose(gram, np.eye(basis.shape[1]), atol=ORTHO_TOL):
            raise RankDeficient("basis columns are not orthonormal to tolerance")
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def embed(self, coords):
        """Map subspace coordinates to ambient coordinates."""
        return np.asarray(coords) @ self.basis.T

    def coords(self, points):
        """Orthogonal coordinates of ambient points in this basis."""
        return np.asarray(points) @ self.basis

    def project(self, points):
        """Orthogonal projection of ambient points onto the subspace."""
        return self.coords(points) @ self.basis.T

    def complement(self) -> "Subspace":
        """Orthogonal complement (requires dim < ambient_dim)."""
        q, _ = np.linalg.qr(self.basis, mode="complete")
        return Subspace(self.ambient_dim, np.ascontiguousarray(q[:, self.dim :]))

    def contains(self, other: "Subspace", tol: float = ORTHO_TOL) -> bool:
        """Whether every basis vector of `other` lies in this subspace."""
        resid = other.basis - self.basis @ (self.basis.T @ other.basis)
        return bool(np.linalg.norm(resid, axis=0).max() <= max(tol, 1e-9))

    @staticmethod
    def full(ambient_dim: int) -> "Subspace":
        return Subspace(ambient_dim, np.eye(ambient_dim))


def orthonormalize(vectors) -> Subspace:
    """Orthonormalize a spanning list of vectors into a Subspace.

    QR-based with a deterministic sign fix (positive diagonal of R), so
    axis-aligned inputs map to axis-aligned bases. Raises RankDeficient when
    the numerical rank is below the vector count.
    """
    mat = np.atleast_2d(np.asarray(vectors, dtype=float))
    if mat.ndim != 2 or mat.size == 0:
        raise RankDeficient("need a nonempty list of vectors")
    cols = mat.T  # vectors as columns
    n, d = cols.shape
    if d > n:
        raise RankDeficient(f"{d} vectors cannot be independent in dimension {n}")
    q, r = np.linalg.qr(cols)
    diag = np.diag(r)
    scale = np.abs(cols).max()
    if np.abs(diag).min() <= 1e-12 * max(scale, 1.0):
        raise RankDeficient("vectors are numerically dependent")
    signs = np.sign(diag)
    return Subspace(n, np.ascontiguousarray(q * signs))


def haar_subspace(ambient_dim: int, d: int, rng: RngStream) -> Subspace:
    """Rotation-invariant random d-dimensional subspace of R^ambient_dim.

    Orthonormalizes d independent standard Gaussian vectors; invariance under
    any fixed rotation follows from the rotational invariance of the Gaussian.
    """
    if not 1 <= d <= ambient_dim:
        raise DimensionMismatch(f"need 1 <= d <= ambient_dim, got d={d}, n={ambient_dim}")
    gauss = rng.normal((d, ambient_dim))
    return orthonormalize(gauss)


def sphere_sample(dim: int, rng: RngStream):
    """One uniform point on the Euclidean unit sphere in R^dim."""
    return sphere_sample_many(dim, 1, rng)[0]


def sphere_sample_many(dim: int, count: int, rng: RngStream):
    """(count, dim) array of independent uniform unit vectors."""
    if dim < 1:
        raise DimensionMismatch("dim must be >= 1")
    g = rng.normal((count, dim))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    # resample is never needed in practice; guard against exact zeros anyway
    bad = norms[:, 0] == 0.0
    if bad.any():
        g[bad] = rng.normal((int(bad.sum()), dim))
        norms = np.linalg.norm(g, axis=1, keepdims=True)
    return np.ascontiguousarray(g / norms)


def solve_qr(mat, rhs):
    """Least-squares solve used for small exact systems."""
    sol, *_ = np.linalg.lstsq(np.asarray(mat, float), np.asarray(rhs, float), rcond=None)
    return sol
