"""Ellipsoid fitting and roundness/semiroundness certificates.

The enclosing-ellipsoid solver is a multiplicative-weights ascent on the
centered log-det problem (with away steps, so tight tolerances converge
quickly at desk scale). Inscribed John ellipsoids for symmetric polytopes
come from the enclosing ellipsoid of the polar's generators, by polarity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bodies as bd
from .errors import Degenerate, InnerContainmentFailed, UnsupportedRepresentation, WitnessViolated
from .linear import RngStream, sphere_sample_many
from .measure import McEstimate, ascend_direction_ratio, mc_volume

CONTAINMENT_TOL = 1e-6
MVEE_MAX_ITER = 200_000


@dataclass(frozen=True)
class RoundnessCertificate:
    """Numerically certified sandwich E ⊆ body ⊆ s·E."""

    ellipsoid: bd.Ellipsoid
    s: float
    inner_check: float
    outer_check: float
    probes: int
    seed: int
    exact: bool = False

    def to_json(self) -> dict:
        return {
            "ellipsoid_q": self.ellipsoid.q.tolist(),
            "s": self.s,
            "inner_check": self.inner_check,
            "outer_check": self.outer_check,
            "probes": self.probes,
            "seed": self.seed,
            "exact": self.exact,
        }


@dataclass(frozen=True)
class SemiroundWitness:
    """Inscribed ellipsoid with a certified n-th-root volume ratio bound."""

    ellipsoid: bd.Ellipsoid
    ratio_bound: float
    measured_ratio: McEstimate

    def to_json(self) -> dict:
        return {
            "ellipsoid_q": self.ellipsoid.q.tolist(),
            "ratio_bound": self.ratio_bound,
            "measured_ratio": self.measured_ratio.to_json(),
        }


def mvee(points, eps: float = 1e-6) -> bd.Ellipsoid:
    """Minimum-volume centered ellipsoid enclosing the symmetric set {±p_i}.

    Only p p^T enters the centered problem, so sign pairs need not be given
    explicitly. Volume is within (1+eps) of optimal; every input point
    satisfies p^T Q p <= 1.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    m, n = pts.shape
    if np.linalg.matrix_rank(pts) < n:
        raise Degenerate("points do not span the ambient space")
    delta = (1.0 + eps) ** (2.0 / n) - 1.0
    u = np.full(m, 1.0 / m)
    for _ in range(MVEE_MAX_ITER):
        mat = (pts * u[:, None]).T @ pts
        kappa = np.einsum("ij,jk,ik->i", pts, np.linalg.inv(mat), pts)
        j_add = int(kappa.argmax())
        excess = kappa[j_add] / n - 1.0
        support = u > 0
        j_away = int(np.where(support)[0][kappa[support].argmin()])
        shortfall = 1.0 - kappa[j_away] / n
        if excess <= delta and shortfall <= delta:
            break
        if excess >= shortfall:
            beta = (kappa[j_add] - n) / (n * (kappa[j_add] - 1.0))
            u *= 1.0 - beta
            u[j_add] += beta
        else:
            # away step; for kappa <= 1 the line search drops the point entirely
            cap = -u[j_away] / (1.0 - u[j_away])
            if kappa[j_away] > 1.0:
                beta = max((kappa[j_away] - n) / (n * (kappa[j_away] - 1.0)), cap)
            else:
                beta = cap
            u *= 1.0 - beta
            u[j_away] += beta
        u = np.maximum(u, 0.0)
        u /= u.sum()
    mat = (pts * u[:, None]).T @ pts
    kappa_max = np.einsum("ij,jk,ik->i", pts, np.linalg.inv(mat), pts).max()
    return bd.Ellipsoid(np.linalg.inv(mat) / max(kappa_max, n))


def john_inscribed(body, eps: float = 1e-6) -> bd.Ellipsoid:
    """Maximum-volume inscribed ellipsoid, within (1+eps)^n of optimal.

    Polytopes route through the polar: the inscribed ellipsoid of
    {x : |<a_i,x>| <= 1} is the polar of the enclosing ellipsoid of {±a_i}.
    Linear images use covariance of the John ellipsoid under invertible maps.
    """
    if isinstance(body, bd.Ellipsoid):
        return body
    if isinstance(body, bd.LinearImage):
        return bd.linear_image(body.mat, john_inscribed(body.base, eps))
    if isinstance(body, bd.LpBall):
        # signed-permutation symmetry forces a round ball; radius is the inradius
        radius = 1.0 if body.p >= 2.0 else body.dim ** (0.5 - 1.0 / body.p)
        return bd.Ellipsoid(np.eye(body.dim) / radius**2)
    facets = body.facet_form()
    if facets is None:
        raise UnsupportedRepresentation(
            f"no inscribed-ellipsoid path for {body.representation} in dim {body.dim}"
        )
    inscribed = mvee(facets, eps).polar()
    _check_inner(body, inscribed, probes=4096, rng=RngStream(0))
    return inscribed


def _boundary_points(ellipsoid: bd.Ellipsoid, directions):
    """Points of the ellipsoid boundary along the given sphere directions."""
    return directions @ ellipsoid._support_factor


def _check_inner(body, ellipsoid, probes, rng, tol=CONTAINMENT_TOL):
    dirs = sphere_sample_many(body.dim, probes, rng)
    worst = float(body.gauge_many(_boundary_points(ellipsoid, dirs)).max())
    if worst > 1.0 + tol:
        raise InnerContainmentFailed(
            f"ellipsoid boundary leaves the body: max gauge {worst:.9f}"
        )
    return worst


def roundness(body, ellipsoid, probes: int | None = None, rng: RngStream | None = None) -> RoundnessCertificate:
    """Certify E ⊆ body ⊆ s·E, measuring the smallest working s.

    Exact for bodies with an available vertex form (the maximum is attained
    at a vertex); otherwise probe directions plus local ascent refinement.
    """
    rng = rng if rng is not None else RngStream(0)
    if probes is None:
        probes = max(10_000, 200 * body.dim)
    inner_rng, outer_rng, ascent_rng = rng.spawn(3)
    inner = _check_inner(body, ellipsoid, probes, inner_rng)

    verts = body.vertex_form()
    if verts is not None:
        ratios = ellipsoid.gauge_many(verts) / body.gauge_many(verts)
        s = float(ratios.max())
        return RoundnessCertificate(ellipsoid, s, inner, s, probes, rng.seed, exact=True)

    dirs = sphere_sample_many(body.dim, probes, outer_rng)
    ratios = ellipsoid.gauge_many(dirs) / body.gauge_many(dirs)
    if float(ratios.max() - ratios.min()) <= 1e-12 * float(ratios.max()):
        # constant ratio: the body is a multiple of the ellipsoid, s is exact
        s = float(ratios.max())
        return RoundnessCertificate(ellipsoid, s, inner, s, probes, rng.seed, exact=True)
    top = dirs[np.argsort(ratios)[-8:]]
    _, s = ascend_direction_ratio(ellipsoid, body, top, rng=ascent_rng)
    s = max(s, float(ratios.max()))
    return RoundnessCertificate(ellipsoid, s, inner, s, probes, rng.seed, exact=False)


def semiround_ratio(
    body,
    ellipsoid,
    samples: int = 50_000,
    rng: RngStream | None = None,
    probes: int = 10_000,
) -> McEstimate:
    """(Vol body / Vol E)^(1/n) with the error propagated from the volume estimate."""
    rng = rng if rng is not None else RngStream(0)
    check_rng, vol_rng = rng.spawn(2)
    _check_inner(body, ellipsoid, probes, check_rng)
    n = body.dim
    vol = mc_volume(body, ellipsoid, samples, vol_rng)
    ratio = (vol.value / ellipsoid.volume()) ** (1.0 / n)
    err = ratio * (vol.std_error / vol.value) / n
    return McEstimate(ratio, err, samples, rng.seed)


def round_to_semiround(body, cert: RoundnessCertificate, samples: int = 50_000, rng: RngStream | None = None):
    """Turn an s-round certificate into a sqrt(s)-semiround witness.

    Measures a = (Vol K / Vol E)^(1/n). If a <= sqrt(q) the body itself is
    sqrt(q)-semiround with the same ellipsoid; otherwise the volume-product
    inequality puts the witness on the polar side, with ellipsoid E°/q.
    Ties go to the primal side. Returns ("primal"|"dual", SemiroundWitness).
    """
    rng = rng if rng is not None else RngStream(0)
    q = cert.s
    bound = math.sqrt(q)
    primal_rng, dual_rng = rng.spawn(2)
    measured = semiround_ratio(body, cert.ellipsoid, samples, primal_rng)
    if measured.value <= bound:
        return "primal", SemiroundWitness(cert.ellipsoid, bound, measured)
    dual_ellipsoid = bd.Ellipsoid(q * q * cert.ellipsoid.q_inverse)
    dual_measured = semiround_ratio(body.polar(), dual_ellipsoid, samples, dual_rng)
    if dual_measured.value > bound + 3.0 * dual_measured.std_error:
        raise WitnessViolated(
            f"dual ratio {dual_measured.value:.6f} exceeds bound {bound:.6f} beyond 3 sigma"
        )
    return "dual", SemiroundWitness(dual_ellipsoid, bound, dual_measured)
