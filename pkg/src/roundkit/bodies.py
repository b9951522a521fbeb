"""Symmetric convex bodies as paired gauge/support oracles.

Every body answers two questions about a direction: the gauge (Minkowski
functional, whose unit ball is the body) and the support function (the gauge
of the polar body). Closed-form representations keep exact answers under the
operations that matter here: invertible linear images, polar duality, slices,
and orthogonal projections. The slice/projection pair is wired so that
polar(slice(K, W)) and project(polar(K), W) are literally the same object.

Batch evaluation (`gauge_many`, `support_many`) is the hot path; it routes
through the kernels backend.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linprog, minimize
from scipy.spatial import ConvexHull, HalfspaceIntersection

from . import kernels
from .errors import (
    Degenerate,
    DimensionMismatch,
    NonFiniteGauge,
    RankDeficient,
    SingularMap,
    UnsupportedRepresentation,
)
from .linear import RngStream, Subspace

CONVERSION_MAX_DIM = 8
CONVERSION_TOL = 1e-8
PROJECTION_GAUGE_TOL = 1e-9


def _conversion_feasible(dim: int, generator_count: int) -> bool:
    """Whether an exact H/V conversion is worth attempting.

    Unguarded through dimension 6; in dimensions 7 and 8 only for bodies with
    few generators (cubes, cross-polytopes, small slices), where the output
    stays small enough for exact enumeration.
    """
    if dim <= 6:
        return True
    return dim <= CONVERSION_MAX_DIM and generator_count <= 2 * dim


def _as_points(x, dim):
    pts = np.ascontiguousarray(np.atleast_2d(np.asarray(x, dtype=float)))
    if pts.shape[1] != dim:
        raise DimensionMismatch(f"points have dimension {pts.shape[1]}, body has {dim}")
    return pts


class Body:
    """Base class; subclasses fill in the batched oracles."""

    dim: int
    representation: str

    def gauge_many(self, points):
        raise NotImplementedError

    def support_many(self, points):
        raise NotImplementedError

    def gauge(self, x) -> float:
        return float(self.gauge_many(_as_points(x, self.dim))[0])

    def support(self, y) -> float:
        return float(self.support_many(_as_points(y, self.dim))[0])

    def polar(self) -> "Body":
        return Polar(self)

    def vertex_form(self):
        """Vertex array if this body is (convertibly) a V-polytope, else None."""
        return None

    def facet_form(self):
        """Facet-normal array if this body is (convertibly) an H-polytope, else None."""
        return None

    def payload(self) -> dict:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


class Ellipsoid(Body):
    """{x : x^T Q x <= 1} for symmetric positive-definite Q."""

    representation = "ellipsoid"

    def __init__(self, q):
        q = np.atleast_2d(np.asarray(q, dtype=float))
        if q.shape[0] != q.shape[1]:
            raise DimensionMismatch("quadratic form must be square")
        if not np.all(np.isfinite(q)):
            raise Degenerate("quadratic form has non-finite entries")
        if np.abs(q - q.T).max() > 1e-12 * max(1.0, np.abs(q).max()):
            raise Degenerate("quadratic form is not symmetric")
        q = 0.5 * (q + q.T)
        try:
            lower = np.linalg.cholesky(q)
        except np.linalg.LinAlgError:
            raise Degenerate("quadratic form is not positive definite") from None
        self.q = q
        self.dim = q.shape[0]
        self._gauge_factor = np.ascontiguousarray(lower.T)
        self._support_factor = np.ascontiguousarray(
            np.linalg.solve(lower, np.eye(self.dim))
        )

    @staticmethod
    def unit_ball(dim: int) -> "Ellipsoid":
        return Ellipsoid(np.eye(dim))

    @property
    def q_inverse(self):
        return self._support_factor.T @ self._support_factor

    def volume(self) -> float:
        from .measure import unit_ball_volume

        sign, logdet = np.linalg.slogdet(self.q)
        if sign <= 0:
            raise Degenerate("quadratic form lost positive definiteness")
        return unit_ball_volume(self.dim) * float(np.exp(-0.5 * logdet))

    def gauge_many(self, points):
        return kernels.factor_norm(self._gauge_factor, _as_points(points, self.dim))

    def support_many(self, points):
        return kernels.factor_norm(self._support_factor, _as_points(points, self.dim))

    def polar(self) -> "Ellipsoid":
        return Ellipsoid(self.q_inverse)

    def payload(self):
        return {"kind": "ellipsoid", "q": self.q.tolist()}


class PolytopeH(Body):
    """{x : |<a_i, x>| <= 1} given by facet normals a_i."""

    representation = "polytope_h"

    def __init__(self, normals):
        normals = np.ascontiguousarray(np.atleast_2d(np.asarray(normals, dtype=float)))
        if not np.all(np.isfinite(normals)):
            raise Degenerate("normals have non-finite entries")
        if np.linalg.norm(normals, axis=1).min() <= 0:
            raise Degenerate("zero facet normal")
        if np.linalg.matrix_rank(normals) < normals.shape[1]:
            raise Degenerate("normals do not span; body would be unbounded")
        self.normals = normals
        self.dim = normals.shape[1]
        self._vertex_cache = None

    def gauge_many(self, points):
        return kernels.abs_dot_max(self.normals, _as_points(points, self.dim))

    def support_many(self, points):
        verts = self.vertex_form()
        if verts is not None:
            return kernels.abs_dot_max(verts, _as_points(points, self.dim))
        pts = _as_points(points, self.dim)
        return np.array([self.support_lp(p) for p in pts])

    def support_lp(self, y) -> float:
        """Support via the LP max <y, x> s.t. |<a_i, x>| <= 1."""
        y = np.asarray(y, dtype=float)
        a_ub = np.vstack([self.normals, -self.normals])
        res = linprog(
            -y,
            A_ub=a_ub,
            b_ub=np.ones(2 * len(self.normals)),
            bounds=[(None, None)] * self.dim,
            method="highs",
        )
        if not res.success:
            raise Degenerate(f"support LP failed: {res.message}")
        return float(-res.fun)

    def vertex_form(self):
        if self._vertex_cache is None and _conversion_feasible(self.dim, len(self.normals)):
            self._vertex_cache = halfspaces_to_vertices(self.normals)
        return self._vertex_cache

    def facet_form(self):
        return self.normals

    def polar(self) -> "PolytopeV":
        return PolytopeV(self.normals)

    def payload(self):
        return {"kind": "polytope_h", "normals": self.normals.tolist()}


class PolytopeV(Body):
    """conv{±v_i} given by generating vertices v_i."""

    representation = "polytope_v"

    def __init__(self, vertices):
        vertices = np.ascontiguousarray(np.atleast_2d(np.asarray(vertices, dtype=float)))
        if not np.all(np.isfinite(vertices)):
            raise Degenerate("vertices have non-finite entries")
        if np.linalg.matrix_rank(vertices) < vertices.shape[1]:
            raise Degenerate("vertices do not span; body has no interior")
        self.vertices = vertices
        self.dim = vertices.shape[1]
        self._facet_cache = None

    def gauge_many(self, points):
        facets = self.facet_form()
        if facets is not None:
            return kernels.abs_dot_max(facets, _as_points(points, self.dim))
        pts = _as_points(points, self.dim)
        return np.array([self.gauge_lp(p) for p in pts])

    def gauge_lp(self, x) -> float:
        """Gauge via the LP min sum|c| s.t. x = sum c_i v_i."""
        x = np.asarray(x, dtype=float)
        m = len(self.vertices)
        a_eq = np.hstack([self.vertices.T, -self.vertices.T])
        res = linprog(
            np.ones(2 * m),
            A_eq=a_eq,
            b_eq=x,
            bounds=[(0, None)] * (2 * m),
            method="highs",
        )
        if not res.success:
            raise Degenerate(f"gauge LP failed: {res.message}")
        return float(res.fun)

    def support_many(self, points):
        return kernels.abs_dot_max(self.vertices, _as_points(points, self.dim))

    def vertex_form(self):
        return self.vertices

    def facet_form(self):
        if self._facet_cache is None and _conversion_feasible(self.dim, len(self.vertices)):
            self._facet_cache = vertices_to_halfspaces(self.vertices)
        return self._facet_cache

    def polar(self) -> "PolytopeH":
        return PolytopeH(self.vertices)

    def payload(self):
        return {"kind": "polytope_v", "vertices": self.vertices.tolist()}


class LpBall(Body):
    """Unit ball of the l_p norm, p in [1, inf]."""

    representation = "lp_ball"

    def __init__(self, dim: int, p: float):
        p = float(p)
        if not (p >= 1.0):
            raise Degenerate("p must be >= 1")
        if dim < 1:
            raise DimensionMismatch("dim must be >= 1")
        self.dim = int(dim)
        self.p = p
        self.p_dual = dual_exponent(p)

    def gauge_many(self, points):
        return kernels.pnorm_rows(_as_points(points, self.dim), self.p)

    def support_many(self, points):
        return kernels.pnorm_rows(_as_points(points, self.dim), self.p_dual)

    def polar(self) -> "LpBall":
        return LpBall(self.dim, self.p_dual)

    def payload(self):
        p = "inf" if np.isinf(self.p) else self.p
        return {"kind": "lp_ball", "dim": self.dim, "p": p}


def dual_exponent(p: float) -> float:
    if np.isinf(p):
        return 1.0
    if p == 1.0:
        return np.inf
    return p / (p - 1.0)


class LinearImage(Body):
    """T K for an invertible map T and a base body K (oracle composition)."""

    representation = "linear_image"

    def __init__(self, mat, base: Body):
        mat = np.atleast_2d(np.asarray(mat, dtype=float))
        if mat.shape[0] != mat.shape[1] or mat.shape[0] != base.dim:
            raise DimensionMismatch("map must be square and match the body dimension")
        det = np.linalg.det(mat)
        if abs(det) < 1e-12:
            raise SingularMap(f"|det T| = {abs(det):.3e} below 1e-12")
        self.mat = mat
        self.mat_inv = np.linalg.inv(mat)
        svals = np.linalg.svd(mat, compute_uv=False)
        self.condition_number = float(svals[0] / svals[-1])
        self.base = base
        self.dim = base.dim

    def gauge_many(self, points):
        return self.base.gauge_many(_as_points(points, self.dim) @ self.mat_inv.T)

    def support_many(self, points):
        return self.base.support_many(_as_points(points, self.dim) @ self.mat)

    def polar(self) -> "Body":
        return linear_image(self.mat_inv.T, self.base.polar())

    def vertex_form(self):
        verts = self.base.vertex_form()
        return None if verts is None else verts @ self.mat.T

    def facet_form(self):
        facets = self.base.facet_form()
        return None if facets is None else facets @ self.mat_inv

    def payload(self):
        return {"kind": "linear_image", "map": self.mat.tolist(), "base": self.base.payload()}


class Polar(Body):
    """Generic polar wrapper: swaps the two oracles."""

    representation = "polar"

    def __init__(self, base: Body):
        self.base = base
        self.dim = base.dim

    def gauge_many(self, points):
        return self.base.support_many(points)

    def support_many(self, points):
        return self.base.gauge_many(points)

    def polar(self) -> Body:
        return self.base

    def payload(self):
        return {"kind": "polar", "base": self.base.payload()}


class Slice(Body):
    """K ∩ W in the coordinates of W's orthonormal basis."""

    representation = "slice"

    def __init__(self, base: Body, subspace: Subspace):
        if subspace.ambient_dim != base.dim:
            raise DimensionMismatch("slice subspace must live in the body's space")
        self.base = base
        self.subspace = subspace
        self.dim = subspace.dim
        self._dual = None

    def gauge_many(self, points):
        return self.base.gauge_many(_as_points(points, self.dim) @ self.subspace.basis.T)

    def support_many(self, points):
        # support of a slice = gauge of the projected polar, computed there
        if self._dual is None:
            self._dual = project(self.base.polar(), self.subspace)
        return self._dual.gauge_many(points)

    def polar(self) -> Body:
        return project(self.base.polar(), self.subspace)

    def payload(self):
        return {
            "kind": "slice",
            "basis": self.subspace.basis.tolist(),
            "base": self.base.payload(),
        }


class Projection(Body):
    """Orthogonal image of K on W, in the coordinates of W's basis."""

    representation = "projection"

    def __init__(self, base: Body, subspace: Subspace):
        if subspace.ambient_dim != base.dim:
            raise DimensionMismatch("projection subspace must live in the body's space")
        self.base = base
        self.subspace = subspace
        self.dim = subspace.dim
        comp_dim = base.dim - subspace.dim
        self._complement = subspace.complement().basis if comp_dim > 0 else None

    def support_many(self, points):
        return self.base.support_many(_as_points(points, self.dim) @ self.subspace.basis.T)

    def gauge_many(self, points):
        pts = _as_points(points, self.dim)
        if self._complement is None:
            return self.base.gauge_many(pts @ self.subspace.basis.T)
        facets = self.base.facet_form()
        if facets is not None:
            return np.array([self._gauge_lp(facets, z) for z in pts])
        return np.array([self._gauge_minimize(z) for z in pts])

    def _gauge_lp(self, facets, z) -> float:
        # min t s.t. |<a_i, Bz> + <a_i, C u>| <= t over (u, t)
        offs = facets @ (self.subspace.basis @ z)
        block = facets @ self._complement
        m, c = block.shape
        cost = np.zeros(c + 1)
        cost[-1] = 1.0
        a_ub = np.block(
            [[block, -np.ones((m, 1))], [-block, -np.ones((m, 1))]]
        )
        b_ub = np.concatenate([-offs, offs])
        res = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * (c + 1), method="highs")
        if not res.success:
            raise NonFiniteGauge(f"projection gauge LP failed: {res.message}")
        return float(res.x[-1])

    def _gauge_minimize(self, z) -> float:
        # convex objective, so multi-start local search finds the global value
        shift = self.subspace.basis @ z
        fun = lambda u: self.base.gauge(shift + self._complement @ u)
        comp_dim = self._complement.shape[1]
        scale = max(float(np.linalg.norm(shift)), 1.0)
        starts = [np.zeros(comp_dim)]
        start_rng = np.random.Generator(np.random.Philox(key=0))
        starts.extend(scale * start_rng.standard_normal(comp_dim) for _ in range(4))
        best = np.inf
        for u0 in starts:
            res = minimize(fun, u0, method="Powell", options={"xtol": PROJECTION_GAUGE_TOL, "ftol": PROJECTION_GAUGE_TOL})
            best = min(best, float(res.fun))
        return best

    def polar(self) -> Body:
        return slice(self.base.polar(), self.subspace)

    def payload(self):
        return {
            "kind": "projection",
            "basis": self.subspace.basis.tolist(),
            "base": self.base.payload(),
        }


# -- operations -------------------------------------------------------------


def gauge(body: Body, x) -> float:
    return body.gauge(x)


def support(body: Body, y) -> float:
    return body.support(y)


def polar(body: Body) -> Body:
    return body.polar()


def linear_image(mat, body: Body) -> Body:
    """T K, folding into exact representations whenever one exists."""
    mat = np.atleast_2d(np.asarray(mat, dtype=float))
    if mat.shape[0] != mat.shape[1] or mat.shape[0] != body.dim:
        raise DimensionMismatch("map must be square and match the body dimension")
    det = np.linalg.det(mat)
    if abs(det) < 1e-12:
        raise SingularMap(f"|det T| = {abs(det):.3e} below 1e-12")
    if isinstance(body, Ellipsoid):
        inv = np.linalg.inv(mat)
        return Ellipsoid(inv.T @ body.q @ inv)
    if isinstance(body, PolytopeH):
        return PolytopeH(body.normals @ np.linalg.inv(mat))
    if isinstance(body, PolytopeV):
        return PolytopeV(body.vertices @ mat.T)
    if isinstance(body, LinearImage):
        return linear_image(mat @ body.mat, body.base)
    return LinearImage(mat, body)


def slice(body: Body, subspace: Subspace) -> Body:
    """K ∩ W in W-coordinates. W.dim == body.dim acts as a rotation."""
    if subspace.ambient_dim != body.dim:
        raise DimensionMismatch("subspace ambient dimension must match the body")
    basis = subspace.basis
    if isinstance(body, PolytopeH):
        rows = body.normals @ basis
        # facets parallel to the subspace restrict nothing on it
        keep = np.linalg.norm(rows, axis=1) > 1e-12 * max(1.0, np.abs(rows).max())
        return PolytopeH(rows[keep])
    if isinstance(body, Ellipsoid):
        return Ellipsoid(basis.T @ body.q @ basis)
    if isinstance(body, Polar):
        return project(body.base, subspace).polar()
    if isinstance(body, Slice):
        return Slice(body.base, Subspace(body.base.dim, body.subspace.basis @ basis))
    return Slice(body, subspace)


def project(body: Body, subspace: Subspace) -> Body:
    """Orthogonal image of K on W, in W-coordinates."""
    if subspace.ambient_dim != body.dim:
        raise DimensionMismatch("subspace ambient dimension must match the body")
    basis = subspace.basis
    if isinstance(body, PolytopeV):
        return PolytopeV(body.vertices @ basis)
    if isinstance(body, Ellipsoid):
        return Ellipsoid(np.linalg.inv(basis.T @ body.q_inverse @ basis))
    if isinstance(body, Polar):
        return slice(body.base, subspace).polar()
    if isinstance(body, Projection):
        return Projection(body.base, Subspace(body.base.dim, body.subspace.basis @ basis))
    if isinstance(body, PolytopeH):
        verts = body.vertex_form()
        if verts is not None:
            return PolytopeV(verts @ basis)
    return Projection(body, subspace)


# -- H/V conversion ---------------------------------------------------------


def _dedup_rows(rows, tol=CONVERSION_TOL):
    """Drop duplicate rows up to sign (vectorized; keeps one representative)."""
    rows = np.asarray(rows, dtype=float)
    lead = np.abs(rows).argmax(axis=1)
    signs = np.sign(rows[np.arange(len(rows)), lead])
    signs[signs == 0] = 1.0
    canonical = rows * signs[:, None]
    _, index = np.unique(np.round(canonical / tol).astype(np.int64), axis=0, return_index=True)
    return np.ascontiguousarray(canonical[np.sort(index)])


def vertices_to_halfspaces(vertices):
    """Facet normals of conv{±v_i}, scaled so the body is {x : |<a, x>| <= 1}."""
    vertices = np.asarray(vertices, dtype=float)
    dim = vertices.shape[1]
    if dim > CONVERSION_MAX_DIM:
        raise UnsupportedRepresentation(f"conversion limited to dimension {CONVERSION_MAX_DIM}")
    if dim == 1:
        return np.array([[1.0 / np.abs(vertices).max()]])
    points = np.vstack([vertices, -vertices])
    hull = ConvexHull(points)
    # qhull equations: n.x + b <= 0 with b < 0 (origin interior)
    normals = -hull.equations[:, :-1] / hull.equations[:, -1:]
    return np.ascontiguousarray(_dedup_rows(normals))


def halfspaces_to_vertices(normals):
    """Vertices of {x : |<a_i, x>| <= 1}."""
    normals = np.asarray(normals, dtype=float)
    dim = normals.shape[1]
    if dim > CONVERSION_MAX_DIM:
        raise UnsupportedRepresentation(f"conversion limited to dimension {CONVERSION_MAX_DIM}")
    if dim == 1:
        return np.array([[1.0 / np.abs(normals).max()]])
    stacked = np.vstack([normals, -normals])
    halfspaces = np.hstack([stacked, -np.ones((len(stacked), 1))])
    intersection = HalfspaceIntersection(halfspaces, np.zeros(dim))
    return np.ascontiguousarray(_dedup_rows(intersection.intersections))


# -- constructors and serialization ------------------------------------------


def cube(dim: int) -> PolytopeH:
    return PolytopeH(np.eye(dim))


def cross_polytope(dim: int) -> PolytopeV:
    return PolytopeV(np.eye(dim))


def ball(dim: int) -> Ellipsoid:
    return Ellipsoid.unit_ball(dim)


def random_v_polytope(dim: int, count: int, rng: RngStream, spread: float = 1.0) -> PolytopeV:
    """Spanning random V-polytope: scaled directions on the sphere."""
    from .linear import sphere_sample_many

    if count < dim:
        raise Degenerate("need at least dim generating vertices")
    for _ in range(16):
        dirs = sphere_sample_many(dim, count, rng)
        radii = np.exp(spread * rng.normal(count))
        vertices = dirs * radii[:, None]
        if np.linalg.matrix_rank(vertices) == dim:
            return PolytopeV(vertices)
    raise Degenerate("failed to draw a spanning vertex set")


def random_h_polytope(dim: int, count: int, rng: RngStream, spread: float = 1.0) -> PolytopeH:
    """Spanning random H-polytope: the polar of a random V-polytope."""
    return random_v_polytope(dim, count, rng, spread).polar()


def body_to_json(body: Body) -> dict:
    return body.payload()


def body_from_json(doc: dict) -> Body:
    kind = doc.get("kind")
    if kind == "ellipsoid":
        return Ellipsoid(np.array(doc["q"], dtype=float))
    if kind == "polytope_h":
        return PolytopeH(np.array(doc["normals"], dtype=float))
    if kind == "polytope_v":
        return PolytopeV(np.array(doc["vertices"], dtype=float))
    if kind == "lp_ball":
        p = doc["p"]
        return LpBall(int(doc["dim"]), np.inf if p == "inf" else float(p))
    if kind == "linear_image":
        return LinearImage(np.array(doc["map"], dtype=float), body_from_json(doc["base"]))
    if kind == "polar":
        return Polar(body_from_json(doc["base"]))
    if kind == "slice":
        base = body_from_json(doc["base"])
        return Slice(base, Subspace(base.dim, np.array(doc["basis"], dtype=float)))
    if kind == "projection":
        base = body_from_json(doc["base"])
        return Projection(base, Subspace(base.dim, np.array(doc["basis"], dtype=float)))
    raise UnsupportedRepresentation(f"unknown body kind {kind!r}")
