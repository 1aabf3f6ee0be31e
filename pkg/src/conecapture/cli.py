"""Command-line surface tying the eigenvalue and simulation modules together.

Subcommands emit JSON/CSV/text reports; when an output directory is given
(``--out`` or the CONECAPTURE_OUT environment variable), the delimited
output is written there and the matching figures are rendered alongside
as SVG.  Every emitted document carries a provenance header (tool
version, hash of the effective configuration, seed).

Exit codes: 0 success or verified, 1 verification failed, 2 invalid
configuration, 3 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from dataclasses import asdict
from pathlib import Path

from . import __version__

OUT_ENV = "CONECAPTURE_OUT"

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_BAD_CONFIG = 2
EXIT_SOLVER_FAILURE = 3

_CONFIG_KEYS = {
    "out", "format", "seed", "tol", "threads",
    "max_n", "n", "lam", "r0", "mu", "c", "safety",
    "dims", "h", "quad_nodes", "predators", "paths", "dt", "t_max",
    "bridge", "no_plot",
}


class ConfigError(ValueError):
    pass


def _provenance(config: dict, seed=None) -> dict:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return {
        "tool": "conecapture",
        "version": __version__,
        "config_sha": hashlib.sha256(blob).hexdigest()[:16],
        "seed": seed,
    }


def _emit_json(doc: dict, out_dir: Path | None, name: str) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True, default=str)
    if out_dir is None:
        print(text)
    else:
        (out_dir / f"{name}.json").write_text(text + "\n")
        print(f"wrote {out_dir / (name + '.json')}")


def _emit_csv(header: list[str], rows: list[list], provenance: dict,
              out_dir: Path | None, name: str) -> None:
    buf = io.StringIO()
    for key, val in provenance.items():
        buf.write(f"# {key}: {val}\n")
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    if out_dir is None:
        sys.stdout.write(buf.getvalue())
    else:
        (out_dir / f"{name}.csv").write_text(buf.getvalue())
        print(f"wrote {out_dir / (name + '.csv')}")


def _emit_text(lines: list[str], out_dir: Path | None, name: str) -> None:
    text = "\n".join(lines) + "\n"
    if out_dir is None:
        sys.stdout.write(text)
    else:
        (out_dir / f"{name}.txt").write_text(text)
        print(f"wrote {out_dir / (name + '.txt')}")


def _resolve_out(args) -> Path | None:
    out = getattr(args, "out", None) or os.environ.get(OUT_ENV)
    if out is None:
        return None
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _apply_config_file(args: argparse.Namespace) -> None:
    """Fold config-file values under the explicit flags (flags win)."""
    if not getattr(args, "config", None):
        return
    try:
        raw = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config file must hold a JSON object")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key, val in raw.items():
        attr = key
        if hasattr(args, attr) and attr not in args._explicit:
            setattr(args, attr, val)


class _TrackingParser(argparse.ArgumentParser):
    """Remembers which destinations were set on the command line, so the
    config file can fill in only the rest."""

    def parse_args(self, argv=None, namespace=None):
        ns = super().parse_args(argv, namespace)
        explicit = set()
        argv = sys.argv[1:] if argv is None else list(argv)
        for action in self._iter_all_actions():
            for opt in action.option_strings:
                if any(a == opt or a.startswith(opt + "=") for a in argv):
                    explicit.add(action.dest)
        ns._explicit = explicit
        return ns

    def _iter_all_actions(self):
        yield from self._actions
        for action in self._actions:
            if isinstance(action, argparse._SubParsersAction):
                for sub in action.choices.values():
                    yield from sub._actions


def build_parser() -> _TrackingParser:
    parser = _TrackingParser(prog="conecapture", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output directory (default from "
                        f"${OUT_ENV}; stdout if unset)")
    common.add_argument("--format", choices=["json", "csv", "text"],
                        default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None,
                        help="root-finding tolerance override")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--config", help="JSON config file; flags override")
    common.add_argument("--no-plot", action="store_true",
                        help="skip SVG figures next to file output")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table", parents=[common],
                       help="comparison-cone eigenvalue/exponent table")
    p.add_argument("--max-n", type=int, default=6)

    p = sub.add_parser("eigen", parents=[common],
                       help="one truncated/full cone eigenvalue")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--r0", type=float, default=None)
    p.add_argument("--r0-delta", type=int, default=None,
                   help="use the simplex-face radius delta(k) as r0")

    sub.add_parser("lambda-cr", parents=[common],
                   help="critical base eigenvalue and its residual")

    p = sub.add_parser("verify-g2", parents=[common],
                       help="containment certificate for the perturbed domain")
    p.add_argument("--mu", type=float, default=5.102)
    p.add_argument("--c", type=float, default=0.0003)
    p.add_argument("--safety", type=float, default=2.0)

    p = sub.add_parser("sinc", parents=[common],
                       help="collocation convergence study")
    p.add_argument("--dims", default="16,100,1024",
                   help="comma-separated collocation dimensions (2n+2)^2")
    p.add_argument("--h", type=float, default=None)
    p.add_argument("--quad-nodes", type=int, default=None)

    p = sub.add_parser("mc", parents=[common],
                       help="pursuit simulation, exponent fit, prediction")
    p.add_argument("--predators", type=int, required=True)
    p.add_argument("--paths", type=int, default=200_000)
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--t-max", type=float, default=1000.0)
    p.add_argument("--bridge", dest="bridge", action="store_true",
                   default=True)
    p.add_argument("--no-bridge", dest="bridge", action="store_false")

    p = sub.add_parser("verdict", parents=[common],
                       help="finiteness chain for n predators")
    p.add_argument("--n", type=int, required=True)

    sub.add_parser("figures", parents=[common],
                   help="render the domain/overlay/decomposition figures")
    return parser


def cmd_table(args) -> int:
    from .cone_spectra import hat_t_table
    rows = hat_t_table(args.max_n)
    out = _resolve_out(args)
    config = {"command": "table", "max_n": args.max_n}
    prov = _provenance(config, args.seed)
    if args.format == "json":
        _emit_json({"provenance": prov,
                    "rows": [asdict(r) for r in rows]}, out, "table")
    elif args.format == "csv":
        _emit_csv(["n", "lambda_hat", "a_lower"],
                  [[r.n, repr(r.lambda_hat), repr(r.a_lower)] for r in rows],
                  prov, out, "table")
    else:
        lines = [f"# conecapture {__version__} table",
                 f"{'n':>3} {'lambda_hat':>14} {'a_lower':>12}"]
        lines += [f"{r.n:>3} {r.lambda_hat:>14.8f} {r.a_lower:>12.8f}"
                  for r in rows]
        _emit_text(lines, out, "table")
    return EXIT_OK


def cmd_eigen(args) -> int:
    from .cone_spectra import ConeSpec, truncated_cone_eigen, vertex_angle_delta
    if (args.r0 is None) == (args.r0_delta is None):
        raise ConfigError("give exactly one of --r0 / --r0-delta")
    r0 = args.r0 if args.r0 is not None else vertex_angle_delta(args.r0_delta)
    tol = args.tol if args.tol is not None else 1e-10
    res = truncated_cone_eigen(ConeSpec(args.n, args.lam, r0), tol=tol)
    out = _resolve_out(args)
    config = {"command": "eigen", "n": args.n, "lam": args.lam, "r0": r0}
    doc = {"provenance": _provenance(config, args.seed),
           "n": args.n, "lam": args.lam, "r0": r0,
           "mu": res.mu, "m": res.m,
           "bracket": list(res.bracket), "evals": res.evals}
    if args.format == "text":
        _emit_text([f"mu = {res.mu!r}  (m = {res.m!r}, "
                    f"bracket {res.bracket}, {res.evals} evaluations)"],
                   out, "eigen")
    else:
        _emit_json(doc, out, "eigen")
    return EXIT_OK


def cmd_lambda_cr(args) -> int:
    from .cone_spectra import (ConeSpec, lambda_critical,
                               truncated_cone_eigen, vertex_angle_delta)
    lam = lambda_critical()
    residual = truncated_cone_eigen(
        ConeSpec(3, lam, vertex_angle_delta(3))).mu - 8.0
    out = _resolve_out(args)
    doc = {"provenance": _provenance({"command": "lambda-cr"}, args.seed),
           "lambda_critical": lam, "defining_residual": residual}
    if args.format == "text":
        _emit_text([f"lambda_critical = {lam!r} (residual {residual:.2e})"],
                   out, "lambda_cr")
    else:
        _emit_json(doc, out, "lambda_cr")
    return EXIT_OK


def cmd_verify_g2(args) -> int:
    from .perturbed_domain import NodalDomainSpec, verify_containment
    spec = NodalDomainSpec(mu=args.mu, c=args.c)
    cert = verify_containment(spec, safety=args.safety)
    out = _resolve_out(args)
    config = {"command": "verify-g2", "mu": args.mu, "c": args.c,
              "safety": args.safety}
    doc = {"provenance": _provenance(config, args.seed),
           "passed": cert.passed,
           "note": cert.note,
           "failure": cert.failure,
           "derivative_bound": cert.derivative_bound,
           "checkpoints": [{"theta": t, "H": h} for t, h in cert.checkpoints],
           "intervals": len(cert.intervals),
           "min_interval_bound": (min(b for _, _, b in cert.intervals)
                                  if cert.intervals else None)}
    if args.format == "text":
        lines = [f"containment {'VERIFIED' if cert.passed else 'FAILED'}"]
        if cert.failure:
            lines.append(f"reason: {cert.failure}")
        lines += [f"H({t:.6f}) = {h!r}" for t, h in cert.checkpoints]
        _emit_text(lines, out, "verify_g2")
    else:
        _emit_json(doc, out, "verify_g2")
    return EXIT_OK if cert.passed else EXIT_VERIFY_FAILED


def cmd_sinc(args) -> int:
    from .figures import plot_convergence
    from .sinc_galerkin import convergence_study
    dims = [int(d) for d in str(args.dims).split(",") if d]
    rows = convergence_study(dims, h=args.h, quad_n=args.quad_nodes,
                             workers=max(1, args.threads))
    out = _resolve_out(args)
    config = {"command": "sinc", "dims": dims, "h": args.h,
              "quad_nodes": args.quad_nodes}
    prov = _provenance(config, args.seed)
    if args.format == "json":
        _emit_json({"provenance": prov, "rows": rows}, out, "sinc")
    elif args.format == "csv":
        _emit_csv(["dim", "n", "h", "lambda_estimate", "mu", "iterations"],
                  [[r["dim"], r["n"], repr(r["h"]),
                    repr(r["lambda_estimate"]), repr(r["mu"]),
                    r["iterations"]] for r in rows],
                  prov, out, "sinc")
    else:
        lines = [f"{'dim':>6} {'lambda estimate':>18}"]
        lines += [f"{r['dim']:>6} {r['lambda_estimate']:>18.12f}"
                  for r in rows]
        _emit_text(lines, out, "sinc")
    if out is not None and not args.no_plot:
        plot_convergence(rows, None, out / "sinc_convergence.svg")
        print(f"wrote {out / 'sinc_convergence.svg'}")
    return EXIT_OK


def cmd_mc(args) -> int:
    from .figures import plot_survival
    from .pursuit_mc import (PursuitConfig, fit_tail_exponent,
                             predicted_exponent, simulate, survival_curve)
    cfg = PursuitConfig(predators=args.predators, dt=args.dt,
                        t_max=args.t_max, paths=args.paths, seed=args.seed,
                        bridge=args.bridge)
    result = simulate(cfg)
    curve = survival_curve(result)
    fit = fit_tail_exponent(curve, seed=args.seed)
    predicted = predicted_exponent(args.predators)
    out = _resolve_out(args)
    config = {"command": "mc", "predators": args.predators, "dt": args.dt,
              "t_max": args.t_max, "paths": args.paths,
              "bridge": args.bridge}
    prov = _provenance(config, args.seed)
    doc = {"provenance": prov,
           "fit": asdict(fit),
           "predicted_exponent": predicted,
           "censored": curve.censored,
           "truncated_mean_capture_time": result.truncated_mean}
    _emit_csv(["time", "survival", "stderr"],
              [[repr(t), repr(s), repr(e)] for t, s, e in
               zip(curve.times, curve.survival, curve.stderr)],
              prov, out, "mc_survival")
    if args.format == "text":
        _emit_text([f"fitted exponent  {fit.a_hat!r} "
                    f"(95% CI {fit.ci_low:.4f}..{fit.ci_high:.4f})",
                    f"predicted        {predicted!r}",
                    f"censored paths   {curve.censored}",
                    f"truncated mean   {result.truncated_mean!r}"],
                   out, "mc_fit")
    else:
        _emit_json(doc, out, "mc_fit")
    if out is not None and not args.no_plot:
        plot_survival(curve, fit, predicted, out / "mc_survival.svg")
        print(f"wrote {out / 'mc_survival.svg'}")
    return EXIT_OK


def cmd_verdict(args) -> int:
    from .cone_spectra import verdict
    v = verdict(args.n)
    out = _resolve_out(args)
    doc = {"provenance": _provenance({"command": "verdict", "n": args.n},
                                     args.seed),
           "n": v.n,
           "finite_expected_capture_time": v.finite,
           "chain": [asdict(s) for s in v.chain]}
    if args.format == "text":
        lines = [f"n = {v.n}: expected capture time is "
                 f"{'FINITE' if v.finite else 'INFINITE'}"]
        lines += [f"  {s.label} = {s.value!r}   [{s.source}]"
                  for s in v.chain]
        _emit_text(lines, out, "verdict")
    else:
        _emit_json(doc, out, "verdict")
    return EXIT_OK


def cmd_figures(args) -> int:
    from .figures import (figure_domains, figure_sixth_triangle,
                          figure_stereographic_overlay)
    out = _resolve_out(args) or Path.cwd()
    out.mkdir(parents=True, exist_ok=True)
    for fn, name in ((figure_domains, "domains.svg"),
                     (figure_stereographic_overlay, "overlay.svg"),
                     (figure_sixth_triangle, "sixth_triangle.svg")):
        if fn is figure_stereographic_overlay:
            path = fn(None, out / name)
        else:
            path = fn(out / name)
        print(f"wrote {path}")
    return EXIT_OK


_COMMANDS = {
    "table": cmd_table,
    "eigen": cmd_eigen,
    "lambda-cr": cmd_lambda_cr,
    "verify-g2": cmd_verify_g2,
    "sinc": cmd_sinc,
    "mc": cmd_mc,
    "verdict": cmd_verdict,
    "figures": cmd_figures,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage, matching the invalid-config code
        return int(exc.code or 0)
    try:
        _apply_config_file(args)
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except ValueError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except (ArithmeticError, RuntimeError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER_FAILURE


if __name__ == "__main__":
    sys.exit(main())
