"""Randomized extraction of round subquotients, with verifiable certificates.

The pipeline repeatedly halves the dimension of a semiround body: pick a
random half-plus-one-dimensional subspace whose sphere integral of the
negative gauge power is no worse than average, slice, cut away the farthest
boundary direction, and either keep the slice or pass to its polar, tightening
the semiroundness bound from r to (2r)^(2/3) each time. The base step bounds
the farthest point by 4*8^2 = 256 and certifies the final body directly.

Alongside the bodies themselves the pipeline maintains a subquotient frame
over the ORIGINAL space: nested subspaces F ⊆ G plus a primal/dual parity
bit, under the dictionary "slice a dual = project the primal". A certificate
can therefore be re-checked from scratch: rebuild the subquotient from
(F, G, parity) alone and probe the claimed ellipsoid sandwich.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import bodies as bd
from .errors import (
    BoundViolated,
    DimensionMismatch,
    FrameMismatch,
    SearchExhausted,
    WitnessViolated,
)
from .fitting import (
    RoundnessCertificate,
    SemiroundWitness,
    john_inscribed,
    roundness,
    round_to_semiround,
    semiround_ratio,
)
from .linear import RngStream, Subspace, haar_subspace, orthonormalize, sphere_sample_many
from .measure import McEstimate, _log_power_mean, ascend_direction_ratio

FRAME_TOL = 1e-10
VERIFY_TOL = 1e-6
FINAL_BOUND = 256.0


def theorem_bound(k: int) -> float:
    """Semiroundness hypothesis at induction depth k: 2^((3/2)^k) * 4."""
    return 2.0 ** (1.5**k) * 4.0


@dataclass
class PipelineConfig:
    slack: float = 1.0
    subspace_samples: int = 4000
    max_tries: int = 64
    farthest_probes: int = 4000
    ratio_samples: int = 20_000
    roundness_probes: int | None = None
    verify_probes: int = 1000
    slack_s: float = 0.0
    eps: float = 1e-6


@dataclass
class SubquotientFrame:
    """How the current body sits inside the original one.

    The current body is the image of (original ∩ G) projected onto
    H = G ∩ F-perp, expressed in the columns of h_basis, polarized once if
    parity is "dual".
    """

    original_dim: int
    f_basis: np.ndarray
    g_basis: np.ndarray
    h_basis: np.ndarray
    parity: str = "primal"
    steps: list = field(default_factory=list)

    @staticmethod
    def identity(dim: int) -> "SubquotientFrame":
        eye = np.eye(dim)
        return SubquotientFrame(dim, np.zeros((dim, 0)), eye.copy(), eye.copy())

    @property
    def current_dim(self) -> int:
        return self.h_basis.shape[1]

    def check(self):
        f, g, h = self.f_basis, self.g_basis, self.h_basis
        if g.shape[1] - f.shape[1] != h.shape[1]:
            raise FrameMismatch("frame dimensions inconsistent")
        for name, basis in (("F", f), ("G", g), ("H", h)):
            if basis.shape[1] and not np.allclose(
                basis.T @ basis, np.eye(basis.shape[1]), atol=FRAME_TOL
            ):
                raise FrameMismatch(f"{name} basis is not orthonormal")
        if f.shape[1]:
            if np.abs(f - g @ (g.T @ f)).max() > FRAME_TOL:
                raise FrameMismatch("F is not contained in G")
            if np.abs(f.T @ h).max() > FRAME_TOL:
                raise FrameMismatch("H is not orthogonal to F")
        if np.abs(h - g @ (g.T @ h)).max() > FRAME_TOL:
            raise FrameMismatch("H is not contained in G")

    def to_json(self) -> dict:
        return {
            "original_dim": self.original_dim,
            "f_basis": self.f_basis.tolist(),
            "g_basis": self.g_basis.tolist(),
            "h_basis": self.h_basis.tolist(),
            "parity": self.parity,
            "steps": list(self.steps),
        }

    @staticmethod
    def from_json(doc: dict) -> "SubquotientFrame":
        dim = int(doc["original_dim"])
        f = np.array(doc["f_basis"], dtype=float).reshape(dim, -1)
        return SubquotientFrame(
            dim,
            f,
            np.array(doc["g_basis"], dtype=float),
            np.array(doc["h_basis"], dtype=float),
            doc["parity"],
            list(doc["steps"]),
        )


class PipelineState:
    """Current body + frame + the linear map tying the two presentations.

    Invariant: gauge_body(map_to_pipeline @ w) equals the gauge of the frame's
    canonical subquotient at w, and the current witness ellipsoid is the unit
    ball of the body's coordinates.
    """

    def __init__(self, body, frame: SubquotientFrame, map_to_pipeline, r: float = math.inf):
        self.body = body
        self.frame = frame
        self.map_to_pipeline = map_to_pipeline
        self.r = r

    @staticmethod
    def start(body) -> "PipelineState":
        return PipelineState(body, SubquotientFrame.identity(body.dim), np.eye(body.dim))

    def slice_by(self, subspace: Subspace, note: str):
        if subspace.ambient_dim != self.body.dim:
            raise DimensionMismatch("slice subspace does not match the current body")
        raw = np.linalg.solve(self.map_to_pipeline, subspace.basis)
        q, rmat = np.linalg.qr(raw)
        signs = np.sign(np.diag(rmat))
        signs[signs == 0] = 1.0
        canon = q * signs  # orthonormal image of the slice in canonical coords
        frame = self.frame
        w_ambient = frame.h_basis @ canon
        if frame.parity == "primal":
            frame.g_basis = np.hstack([frame.f_basis, w_ambient])
        else:
            perp = Subspace(frame.current_dim, canon).complement().basis
            frame.f_basis = np.hstack([frame.f_basis, frame.h_basis @ perp])
        frame.h_basis = w_ambient
        frame.steps.append(note)
        frame.check()
        self.body = bd.slice(self.body, subspace)
        self.map_to_pipeline = np.linalg.inv(rmat * signs[:, None])

    def flip(self, note: str):
        self.body = self.body.polar()
        self.map_to_pipeline = np.linalg.inv(self.map_to_pipeline).T
        self.frame.parity = "dual" if self.frame.parity == "primal" else "primal"
        self.frame.steps.append(note)

    def renormalize(self, witness_q, note: str):
        if np.array_equal(witness_q, np.eye(self.body.dim)):
            return
        factor = np.linalg.cholesky(witness_q).T
        self.body = bd.linear_image(factor, self.body)
        self.map_to_pipeline = factor @ self.map_to_pipeline
        self.frame.steps.append(note)


# -- pipeline primitives ------------------------------------------------------


def find_good_subspace(
    body,
    r: float,
    slack: float = 1.0,
    mc_samples: int = 4000,
    max_tries: int = 64,
    rng: RngStream | None = None,
):
    """First random (dim/2 + 1)-subspace whose gauge^(-dim) sphere integral
    is <= (1+slack) * r^dim at the one-sigma level.

    The average of the integral over subspaces equals the full-sphere value,
    which is at most r^dim for an r-semiround body in witness-normalized
    coordinates, so each trial succeeds with probability >= slack/(1+slack)
    up to Monte Carlo error.
    """
    rng = rng if rng is not None else RngStream(0)
    dim = body.dim
    sub_dim = dim // 2 + 1
    log_threshold = dim * math.log(r) + math.log1p(slack)
    best = None
    for stream in rng.spawn(max_tries):
        w_stream, s_stream = stream.spawn(2)
        w = haar_subspace(dim, sub_dim, w_stream)
        pts = sphere_sample_many(sub_dim, mc_samples, s_stream) @ w.basis.T
        g = body.gauge_many(pts)
        log_mean, rel = _log_power_mean(np.log(g), -float(dim))
        value = math.exp(log_mean)
        est = McEstimate(value, value * rel, mc_samples, rng.seed)
        if best is None or est.value < best[1].value:
            best = (w, est)
        if rel >= 1.0 or log_mean + math.log1p(-rel) <= log_threshold:
            return w, est
    raise SearchExhausted(
        f"no acceptable subspace in {max_tries} tries "
        f"(best estimate {best[1].value:.4g} vs threshold {math.exp(log_threshold):.4g})",
        best=best[1],
    )


def farthest_point(body, probes: int = 4000, rng: RngStream | None = None):
    """Boundary point p maximizing the Euclidean norm, and s = |p|.

    Exact over vertices when a vertex form is available, otherwise probed
    directions with local ascent refinement. Requires the unit ball to sit
    inside the body, so s >= 1.
    """
    rng = rng if rng is not None else RngStream(0)
    verts = body.vertex_form()
    if verts is not None:
        g = body.gauge_many(verts)
        vals = np.linalg.norm(verts, axis=1) / g
        j = int(vals.argmax())
        p = verts[j] / g[j]
        s = float(vals[j])
    else:
        probe_rng, ascent_rng = rng.spawn(2)
        dirs = sphere_sample_many(body.dim, probes, probe_rng)
        vals = 1.0 / body.gauge_many(dirs)
        top = dirs[np.argsort(vals)[-8:]]
        u, s = ascend_direction_ratio(bd.ball(body.dim), body, top, rng=ascent_rng)
        s = max(s, float(vals.max()))
        p = u / body.gauge(u)
    if s < 1.0 - 1e-9:
        raise WitnessViolated(f"farthest point has norm {s:.6f} < 1; unit ball not inscribed")
    return p, s


# -- step records -------------------------------------------------------------


@dataclass
class ClaimOutcome:
    body: object
    witness: SemiroundWitness
    parity_flip: bool
    s: float
    subspace: Subspace
    p: np.ndarray
    estimate: McEstimate

    def to_json(self) -> dict:
        return {
            "dim": self.body.dim,
            "witness": self.witness.to_json(),
            "parity_flip": self.parity_flip,
            "s": self.s,
            "subspace_basis": self.subspace.basis.tolist(),
            "p": self.p.tolist(),
            "estimate": self.estimate.to_json(),
        }


@dataclass
class BaseStepRecord:
    s: float
    subspace: Subspace
    p: np.ndarray
    estimate: McEstimate

    def to_json(self) -> dict:
        return {
            "s": self.s,
            "subspace_basis": self.subspace.basis.tolist(),
            "p": self.p.tolist(),
            "estimate": self.estimate.to_json(),
        }


@dataclass
class VerificationReport:
    passed: bool
    gauge_mismatch: float
    inner_violation: float
    outer_violation: float
    probes: int

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "gauge_mismatch": self.gauge_mismatch,
            "inner_violation": self.inner_violation,
            "outer_violation": self.outer_violation,
            "probes": self.probes,
        }


@dataclass
class TheoremCertificate:
    frame: SubquotientFrame
    final_body: object
    ellipsoid: bd.Ellipsoid
    s_final: float
    bound: float
    verified: bool
    trace: list
    base_step: BaseStepRecord | None
    map_to_pipeline: np.ndarray
    verification: VerificationReport | None = None
    meta: dict = field(default_factory=dict)

    @property
    def final_dim(self) -> int:
        return self.final_body.dim

    def canonical_ellipsoid(self) -> bd.Ellipsoid:
        """The certified ellipsoid expressed in the frame's coordinates."""
        m = self.map_to_pipeline
        return bd.Ellipsoid(m.T @ self.ellipsoid.q @ m)

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "kind": "subquotient_certificate",
            "frame": self.frame.to_json(),
            "final_body": bd.body_to_json(self.final_body),
            "ellipsoid_q": self.ellipsoid.q.tolist(),
            "s_final": self.s_final,
            "bound": self.bound,
            "verified": self.verified,
            "trace": [t.to_json() for t in self.trace],
            "base_step": self.base_step.to_json() if self.base_step else None,
            "map_to_pipeline": self.map_to_pipeline.tolist(),
            "verification": self.verification.to_json() if self.verification else None,
            "meta": dict(self.meta),
        }

    @staticmethod
    def from_json(doc: dict) -> "TheoremCertificate":
        if doc.get("schema") != 1 or doc.get("kind") != "subquotient_certificate":
            raise ValueError("not a schema-1 subquotient certificate")
        frame = SubquotientFrame.from_json(doc["frame"])
        verification = doc.get("verification")
        return TheoremCertificate(
            frame=frame,
            final_body=bd.body_from_json(doc["final_body"]),
            ellipsoid=bd.Ellipsoid(np.array(doc["ellipsoid_q"], dtype=float)),
            s_final=float(doc["s_final"]),
            bound=float(doc["bound"]),
            verified=bool(doc["verified"]),
            trace=[],
            base_step=None,
            map_to_pipeline=np.array(doc["map_to_pipeline"], dtype=float),
            verification=VerificationReport(**verification) if verification else None,
            meta=dict(doc.get("meta", {})),
        )


# -- the induction steps ------------------------------------------------------


def _claim(state: PipelineState, cfg: PipelineConfig, rng: RngStream) -> ClaimOutcome:
    dim = state.body.dim
    if dim % 2:
        raise DimensionMismatch("claim step needs an even-dimensional body")
    n = dim // 2
    r = state.r
    sub_rng, far_rng, ratio_rng = rng.spawn(3)

    subspace, estimate = find_good_subspace(
        state.body, r, cfg.slack, cfg.subspace_samples, cfg.max_tries, sub_rng
    )
    state.slice_by(subspace, f"slice to a good subspace (dim {n + 1})")
    p, s = farthest_point(state.body, cfg.farthest_probes, far_rng)
    state.slice_by(
        orthonormalize([p]).complement(), f"slice orthogonal to the farthest point (dim {n})"
    )

    bound = (2.0 * r) ** (2.0 / 3.0)
    threshold = (2.0 * r) ** (4.0 / 3.0)
    if s <= threshold:
        # the slice is s-round, hence threshold-round; the volume-product
        # inequality then puts a sqrt(threshold)-semiround witness on one side
        cert = RoundnessCertificate(
            bd.ball(n), threshold, 1.0, threshold, probes=0, seed=rng.seed, exact=False
        )
        branch, witness = round_to_semiround(state.body, cert, cfg.ratio_samples, ratio_rng)
        flipped = branch == "dual"
    else:
        measured = semiround_ratio(state.body, bd.ball(n), cfg.ratio_samples, ratio_rng)
        if measured.value > bound + 3.0 * measured.std_error:
            raise WitnessViolated(
                f"direct branch ratio {measured.value:.6f} exceeds bound {bound:.6f}"
            )
        witness = SemiroundWitness(bd.ball(n), bound, measured)
        flipped = False

    outcome = ClaimOutcome(state.body, witness, flipped, s, subspace, p, estimate)
    if flipped:
        state.flip("pass to the polar body (volume-product branch)")
    state.renormalize(witness.ellipsoid.q, "renormalize the witness ellipsoid to the unit ball")
    state.r = bound
    return outcome


def _base_step(state: PipelineState, cfg: PipelineConfig, rng: RngStream) -> BaseStepRecord:
    dim = state.body.dim
    if dim % 2:
        raise DimensionMismatch("base step needs an even-dimensional body")
    n = dim // 2
    if state.r > 8.0 + 1e-9:
        raise WitnessViolated(f"base step requires an 8-semiround body, bound is {state.r:.3f}")
    sub_rng, far_rng = rng.spawn(2)
    subspace, estimate = find_good_subspace(
        state.body, state.r, cfg.slack, cfg.subspace_samples, cfg.max_tries, sub_rng
    )
    state.slice_by(subspace, f"slice to a good subspace (dim {n + 1})")
    p, s = farthest_point(state.body, cfg.farthest_probes, far_rng)
    if s > FINAL_BOUND * (1.0 + cfg.slack_s):
        raise BoundViolated(f"farthest point norm {s:.3f} exceeds {FINAL_BOUND}")
    state.slice_by(
        orthonormalize([p]).complement(), f"slice orthogonal to the farthest point (dim {n})"
    )
    return BaseStepRecord(s, subspace, p, estimate)


def claim_step(body, witness, r: float, cfg: PipelineConfig | None = None, rng: RngStream | None = None) -> ClaimOutcome:
    """One induction step on an r-semiround body with inscribed witness ellipsoid."""
    cfg = cfg if cfg is not None else PipelineConfig()
    rng = rng if rng is not None else RngStream(0)
    state = PipelineState.start(body)
    state.renormalize(witness.q, "normalize the witness ellipsoid to the unit ball")
    state.r = r
    return _claim(state, cfg, rng)


def k0_step(body, witness, cfg: PipelineConfig | None = None, rng: RngStream | None = None) -> TheoremCertificate:
    """Base case on an 8-semiround body: certify a half-dimensional slice."""
    cfg = cfg if cfg is not None else PipelineConfig()
    rng = rng if rng is not None else RngStream(0)
    pre_rng, step_rng, fin_rng = rng.spawn(3)
    state = PipelineState.start(body)
    state.renormalize(witness.q, "normalize the witness ellipsoid to the unit ball")
    pre = semiround_ratio(state.body, bd.ball(body.dim), cfg.ratio_samples, pre_rng)
    if pre.value > 8.0 + 3.0 * pre.std_error:
        raise WitnessViolated(f"body is not 8-semiround: measured ratio {pre.value:.4f}")
    state.r = min(8.0, pre.value)
    record = _base_step(state, cfg, step_rng)
    return _finalize(state, body, cfg, fin_rng, base_step=record, meta={"k": 0})


def _finalize(
    state: PipelineState,
    original,
    cfg: PipelineConfig,
    rng: RngStream,
    base_step=None,
    trace=None,
    meta=None,
) -> TheoremCertificate:
    round_rng, verify_rng = rng.spawn(2)
    n = state.body.dim
    if n == 1:
        # a symmetric segment [-a, a] is exactly 1-round with itself as witness
        a = 1.0 / state.body.gauge([1.0])
        cert = RoundnessCertificate(
            bd.Ellipsoid([[1.0 / (a * a)]]), 1.0, 1.0, 1.0, probes=1, seed=rng.seed, exact=True
        )
    else:
        cert = roundness(state.body, bd.ball(n), cfg.roundness_probes, round_rng)
    certificate = TheoremCertificate(
        frame=state.frame,
        final_body=state.body,
        ellipsoid=cert.ellipsoid,
        s_final=cert.s,
        bound=FINAL_BOUND,
        verified=False,
        trace=trace or [],
        base_step=base_step,
        map_to_pipeline=state.map_to_pipeline,
        meta=meta or {},
    )
    report = verify_certificate(original, certificate, cfg.verify_probes, verify_rng)
    if report.gauge_mismatch > VERIFY_TOL:
        raise FrameMismatch(
            f"frame reconstruction disagrees with the pipeline body "
            f"(relative gauge mismatch {report.gauge_mismatch:.3e})"
        )
    certificate.verified = report.passed
    certificate.verification = report
    return certificate


def run_theorem(
    body,
    k: int,
    n: int,
    cfg: PipelineConfig | None = None,
    rng: RngStream | None = None,
    witness=None,
    bound: float | None = None,
) -> TheoremCertificate:
    """Extract a 256-round n-dimensional subquotient from a (2^(k+1) n)-dimensional
    body that is 2^((3/2)^k)*4-semiround (witness supplied or John-derived)."""
    cfg = cfg if cfg is not None else PipelineConfig()
    rng = rng if rng is not None else RngStream(0)
    expected = (2 ** (k + 1)) * n
    if body.dim != expected:
        raise DimensionMismatch(f"body has dimension {body.dim}, need 2^(k+1)*n = {expected}")
    r_k = theorem_bound(k)
    r0 = r_k if bound is None else float(bound)
    if r0 > r_k + 1e-9:
        raise WitnessViolated(f"claimed bound {r0:.4f} exceeds the hypothesis {r_k:.4f}")
    if witness is None:
        witness = john_inscribed(body, cfg.eps)
    streams = rng.spawn(k + 3)
    state = PipelineState.start(body)
    state.renormalize(witness.q, "normalize the witness ellipsoid to the unit ball")
    pre = semiround_ratio(state.body, bd.ball(expected), cfg.ratio_samples, streams[0])
    if pre.value > r0 + 3.0 * pre.std_error:
        raise WitnessViolated(
            f"input is not {r0:.3f}-semiround: measured ratio {pre.value:.4f}"
        )
    state.r = r0
    trace = []
    for j in range(k):
        trace.append(_claim(state, cfg, streams[1 + j]))
    record = _base_step(state, cfg, streams[k + 1])
    return _finalize(
        state,
        body,
        cfg,
        streams[k + 2],
        base_step=record,
        trace=trace,
        meta={"k": k, "n": n, "initial_bound": r0, "initial_ratio": pre.value},
    )


def run_corollary(body, cfg: PipelineConfig | None = None, rng: RngStream | None = None) -> TheoremCertificate:
    """John-based driver: any N-dimensional body yields a 256-round subquotient
    of dimension floor(N / 2^(k+1)), k minimal with 2^((3/2)^k)*4 >= sqrt(s_John)."""
    cfg = cfg if cfg is not None else PipelineConfig()
    rng = rng if rng is not None else RngStream(0)
    dim = body.dim
    if dim < 2:
        raise DimensionMismatch("need dimension >= 2")
    streams = rng.spawn(16)
    e0 = john_inscribed(body, cfg.eps)
    cert0 = roundness(body, e0, cfg.roundness_probes, streams[0])
    q = cert0.s
    if not cert0.exact:
        # probe measurements can undershoot; the inscribed-ellipsoid theorem
        # guarantees sqrt(dim) regardless, so certify with whichever is larger
        q = max(q, math.sqrt(dim) * (1.0 + cfg.eps))
    k = 0
    while theorem_bound(k) < math.sqrt(q):
        k += 1
    m = dim // (2 ** (k + 1))
    if m < 1:
        raise DimensionMismatch(f"dimension {dim} too small for induction depth {k}")
    target = (2 ** (k + 1)) * m

    state = PipelineState.start(body)
    state.renormalize(e0.q, "normalize the John ellipsoid to the unit ball")
    if target < dim:
        # roundness survives slicing: E∩W ⊆ K∩W ⊆ q(E∩W) follows from K ⊆ qE
        state.slice_by(
            haar_subspace(dim, target, streams[1]), f"restrict to a random subspace (dim {target})"
        )
    cert_slice = RoundnessCertificate(
        bd.ball(target), q, cert0.inner_check, q, cert0.probes, rng.seed, exact=cert0.exact
    )
    branch, witness = round_to_semiround(state.body, cert_slice, cfg.ratio_samples, streams[2])
    if branch == "dual":
        state.flip("pass to the polar body (volume-product branch)")
    state.renormalize(witness.ellipsoid.q, "renormalize the witness ellipsoid to the unit ball")
    state.r = min(math.sqrt(q), theorem_bound(k))
    trace = []
    for j in range(k):
        trace.append(_claim(state, cfg, streams[3 + j]))
    record = _base_step(state, cfg, streams[3 + k])
    return _finalize(
        state,
        body,
        cfg,
        streams[4 + k],
        base_step=record,
        trace=trace,
        meta={"k": k, "n": m, "john_s": cert0.s, "certified_q": q, "branch": branch},
    )


def reconstruct_from_frame(original, frame: SubquotientFrame):
    """Rebuild the subquotient body from (F, G, parity) alone."""
    frame.check()
    if original.dim != frame.original_dim:
        raise DimensionMismatch("certificate frame does not match the body dimension")
    sliced = bd.slice(original, Subspace(frame.original_dim, frame.g_basis))
    inner = Subspace(frame.g_basis.shape[1], frame.g_basis.T @ frame.h_basis)
    if frame.f_basis.shape[1] == 0:
        body = bd.slice(sliced, inner)
    else:
        body = bd.project(sliced, inner)
    return body.polar() if frame.parity == "dual" else body


def verify_certificate(original, certificate: TheoremCertificate, probes: int = 1000, rng: RngStream | None = None) -> VerificationReport:
    """Re-check a certificate from scratch; returns a report, never raises.

    Rebuilds the subquotient from the frame, compares its gauge against the
    pipeline body transported through the recorded linear map, and re-probes
    the ellipsoid sandwich E ⊆ body ⊆ s_final·E.
    """
    rng = rng if rng is not None else RngStream(0)
    gauge_rng, sandwich_rng = rng.spawn(2)
    reconstructed = reconstruct_from_frame(original, certificate.frame)
    h = reconstructed.dim

    dirs = sphere_sample_many(h, probes, gauge_rng)
    g_rec = reconstructed.gauge_many(dirs)
    g_pipe = certificate.final_body.gauge_many(dirs @ certificate.map_to_pipeline.T)
    mismatch = float((np.abs(g_rec - g_pipe) / np.maximum(g_rec, 1e-30)).max())

    e_canon = certificate.canonical_ellipsoid()
    dirs2 = sphere_sample_many(h, probes, sandwich_rng)
    boundary = dirs2 @ e_canon._support_factor
    inner_violation = float(reconstructed.gauge_many(boundary).max() - 1.0)
    ratios = e_canon.gauge_many(dirs2) / reconstructed.gauge_many(dirs2)
    outer_violation = float(ratios.max() / certificate.s_final - 1.0)

    passed = (
        mismatch <= VERIFY_TOL
        and inner_violation <= VERIFY_TOL
        and outer_violation <= VERIFY_TOL
    )
    return VerificationReport(passed, mismatch, inner_violation, outer_violation, probes)
