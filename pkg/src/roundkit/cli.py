"""Command-line front end: seeded, reproducible runs emitting JSON and CSV.

Identical (command, flags, seed) invocations produce byte-identical JSON.
Exit codes: 0 success, 2 verification failure, 1 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import bodies as bd
from . import engine, inequalities
from .errors import RoundkitError
from .fitting import john_inscribed, roundness
from .linear import RngStream
from .measure import exact_volume, mc_volume, slice_average_experiment, unit_ball_volume

SCHEMA = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(1)


def _positive(kind):
    def convert(text):
        value = kind(text)
        if value <= 0:
            raise argparse.ArgumentTypeError(f"{text} is not positive")
        return value

    return convert


def load_body(spec: str, dim: int | None, seed: int):
    """Body from a JSON file path, inline JSON, or a named built-in.

    Built-ins: cube, cross, ball, lp:<p>, random-polytope:<vertex count>.
    Built-ins need --dim; random polytopes are seeded deterministically.
    """
    if os.path.exists(spec):
        with open(spec) as fh:
            return bd.body_from_json(json.load(fh))
    if spec.lstrip().startswith("{"):
        return bd.body_from_json(json.loads(spec))
    name, _, arg = spec.partition(":")
    if name in ("cube", "cross", "ball") and not arg:
        if dim is None:
            raise ValueError(f"built-in body {name!r} needs --dim")
        return {"cube": bd.cube, "cross": bd.cross_polytope, "ball": bd.ball}[name](dim)
    if name == "lp":
        if dim is None:
            raise ValueError("built-in body lp:<p> needs --dim")
        return bd.LpBall(dim, math.inf if arg == "inf" else float(arg))
    if name == "random-polytope":
        if dim is None:
            raise ValueError("built-in body random-polytope:<count> needs --dim")
        return bd.random_v_polytope(dim, int(arg), RngStream(seed, 999))
    raise ValueError(f"unrecognized body spec {spec!r}")


def _flatten(doc, prefix=""):
    flat = {}
    for key in sorted(doc):
        value = doc[key]
        name = prefix + key
        if isinstance(value, dict):
            flat.update(_flatten(value, name + "."))
        elif isinstance(value, (str, int, float, bool)) or value is None:
            flat[name] = value
    return flat


def _emit(doc: dict, out: str | None, fmt: str = "json") -> None:
    if fmt == "csv":
        flat = _flatten(doc)
        keys = list(flat)
        text = ",".join(keys) + "\n" + ",".join(repr(float(flat[k])) if isinstance(flat[k], float) else str(flat[k]) for k in keys) + "\n"
    else:
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_common(parser, body=True):
    parser.add_argument("--seed", type=int, default=0, help="master random seed")
    parser.add_argument("--out", default=None, help="output path (default: stdout)")
    parser.add_argument("--format", choices=["json", "csv"], default="json", help="output format")
    if body:
        parser.add_argument("--body", required=True, help="body JSON file, inline JSON, or built-in name")
        parser.add_argument("--dim", type=_positive(int), default=None, help="dimension for built-in bodies")


def build_parser() -> _Parser:
    parser = _Parser(prog="roundkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("volume", help="Monte Carlo volume with exact cross-check when available")
    _add_common(p)
    p.add_argument("--samples", type=_positive(int), default=100_000)

    p = sub.add_parser("mahler", help="normalized volume product of a body and its polar")
    _add_common(p)
    p.add_argument("--samples", type=_positive(int), default=100_000)

    p = sub.add_parser("john", help="inscribed John ellipsoid and roundness certificate")
    _add_common(p)
    p.add_argument("--eps", type=_positive(float), default=1e-6)
    p.add_argument("--probes", type=_positive(int), default=None)

    p = sub.add_parser("subquotient", help="run the dimension-halving extraction")
    _add_common(p)
    p.add_argument("--k", type=int, required=True, help="induction depth (>= 0)")
    p.add_argument("--n", type=_positive(int), required=True, help="target dimension")
    p.add_argument("--samples", type=_positive(int), default=4000)
    p.add_argument("--probes", type=_positive(int), default=4000)
    p.add_argument("--slack", type=_positive(float), default=1.0)
    p.add_argument("--eps", type=_positive(float), default=1e-6)

    p = sub.add_parser("corollary", help="John-driven extraction for arbitrary dimension")
    _add_common(p)
    p.add_argument("--samples", type=_positive(int), default=4000)
    p.add_argument("--probes", type=_positive(int), default=4000)
    p.add_argument("--slack", type=_positive(float), default=1.0)
    p.add_argument("--eps", type=_positive(float), default=1e-6)

    p = sub.add_parser("averaging", help="full-sphere versus random-slice integrals")
    _add_common(p, body=False)
    p.add_argument("--f", choices=["x1sq", "cube-gauge"], default="x1sq")
    p.add_argument("--dim", type=_positive(int), required=True)
    p.add_argument("--d", type=_positive(int), required=True)
    p.add_argument("--outer", type=_positive(int), default=200)
    p.add_argument("--inner", type=_positive(int), default=2000)

    p = sub.add_parser("inequality-lab", help="write the scalar-identity tables and findings")
    _add_common(p, body=False)
    p.add_argument("--n-max", type=_positive(int), default=60)
    p.add_argument("--samples", type=_positive(int), default=100_000)

    p = sub.add_parser("verify", help="re-check a certificate against its body")
    _add_common(p)
    p.add_argument("--cert", required=True, help="certificate JSON path")
    p.add_argument("--probes", type=_positive(int), default=1000)

    return parser


def _cmd_volume(args) -> int:
    body = load_body(args.body, args.dim, args.seed)
    est = mc_volume(body, bd.ball(body.dim), args.samples, RngStream(args.seed))
    exact = exact_volume(body)
    _emit(
        {
            "schema": SCHEMA,
            "command": "volume",
            "body": bd.body_to_json(body),
            "estimate": est.to_json(),
            "exact": exact,
            "unit_ball_volume": unit_ball_volume(body.dim),
        },
        args.out,
        args.format,
    )
    return 0


def _cmd_mahler(args) -> int:
    body = load_body(args.body, args.dim, args.seed)
    rows = inequalities.santalo_sweep([("body", body)], args.samples, RngStream(args.seed))
    doc = rows[0].to_json()
    doc.update({"schema": SCHEMA, "command": "mahler", "body": bd.body_to_json(body)})
    if body.dim >= 4:
        doc["reverse_bound"] = inequalities.reverse_bound(body.dim)
    _emit(doc, args.out, args.format)
    return 0


def _cmd_john(args) -> int:
    body = load_body(args.body, args.dim, args.seed)
    ellipsoid = john_inscribed(body, args.eps)
    cert = roundness(body, ellipsoid, args.probes, RngStream(args.seed))
    _emit(
        {
            "schema": SCHEMA,
            "command": "john",
            "body": bd.body_to_json(body),
            "certificate": cert.to_json(),
            "sqrt_dim": math.sqrt(body.dim),
        },
        args.out,
        args.format,
    )
    return 0


def _pipeline_config(args) -> engine.PipelineConfig:
    return engine.PipelineConfig(
        slack=args.slack,
        subspace_samples=args.samples,
        farthest_probes=args.probes,
        eps=args.eps,
    )


def _cmd_subquotient(args) -> int:
    dim = args.dim if args.dim is not None else (2 ** (args.k + 1)) * args.n
    body = load_body(args.body, dim, args.seed)
    cert = engine.run_theorem(
        body, args.k, args.n, cfg=_pipeline_config(args), rng=RngStream(args.seed)
    )
    _emit(cert.to_json(), args.out, args.format)
    return 0 if cert.verified else 2


def _cmd_corollary(args) -> int:
    body = load_body(args.body, args.dim, args.seed)
    cert = engine.run_corollary(body, cfg=_pipeline_config(args), rng=RngStream(args.seed))
    _emit(cert.to_json(), args.out, args.format)
    return 0 if cert.verified else 2


def _cmd_averaging(args) -> int:
    if args.d >= args.dim:
        raise ValueError("--d must be below --dim")
    if args.f == "x1sq":
        f = lambda pts: pts[:, 0] ** 2
        reference = 1.0 / args.dim
    else:
        gauge_dim = args.dim
        f = lambda pts: bd.cube(gauge_dim).gauge_many(pts) ** (-float(gauge_dim))
        reference = None
    full, averaged = slice_average_experiment(
        f, args.dim, args.d, args.outer, args.inner, RngStream(args.seed)
    )
    gap = abs(full.value - averaged.value)
    sigma = math.hypot(full.std_error, averaged.std_error)
    _emit(
        {
            "schema": SCHEMA,
            "command": "averaging",
            "f": args.f,
            "dim": args.dim,
            "d": args.d,
            "full": full.to_json(),
            "averaged": averaged.to_json(),
            "agrees_3sigma": gap <= 3.0 * sigma + 1e-12,
            "reference": reference,
        },
        args.out,
        args.format,
    )
    return 0


def _cmd_inequality_lab(args) -> int:
    out_dir = args.out or "inequality-lab"
    findings = inequalities.write_tables(out_dir, args.n_max, args.samples, RngStream(args.seed))
    sys.stdout.write(
        f"wrote stirling.csv ratio.csv beta.csv santalo.csv findings.json to {out_dir} "
        f"({len(findings['findings'])} findings)\n"
    )
    return 0


def _cmd_verify(args) -> int:
    body = load_body(args.body, args.dim, args.seed)
    with open(args.cert) as fh:
        cert = engine.TheoremCertificate.from_json(json.load(fh))
    report = engine.verify_certificate(body, cert, args.probes, RngStream(args.seed))
    _emit(
        {
            "schema": SCHEMA,
            "command": "verify",
            "report": report.to_json(),
            "s_final": cert.s_final,
            "bound": cert.bound,
        },
        args.out,
        args.format,
    )
    return 0 if report.passed and cert.s_final <= cert.bound else 2


_COMMANDS = {
    "volume": _cmd_volume,
    "mahler": _cmd_mahler,
    "john": _cmd_john,
    "subquotient": _cmd_subquotient,
    "corollary": _cmd_corollary,
    "averaging": _cmd_averaging,
    "inequality-lab": _cmd_inequality_lab,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (RoundkitError, ValueError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
