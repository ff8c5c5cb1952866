"""Command-line front end: ``nestfn <subcommand> ...``.

Exit codes: 0 success, 2 invalid input or flags, 3 fit finished without
converging, 4 domain error, 5 numerical breakdown.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

from . import audit as audit_mod
from . import diagnostics
from .data_io import ReportDocument, SynthSpec, parse_panel_csv, synth_panel, write_panel_csv, write_report_json
from .errors import (
    AllStartsFailed,
    DomainError,
    FormMismatch,
    InvalidParameters,
    NestFnError,
    NonPositiveBracket,
    NumericalBreakdown,
    PanelFormatError,
    TooFewObservations,
    UnsatisfiableRegion,
    ZeroMarginalProduct,
)
from .estimation import FitConfig, fit, fit_report_document
from .model import (
    InputPoint,
    Parameters,
    elasticity_k,
    elasticity_l,
    eval_v,
    gradient,
    hessian,
    strict_from_env,
    substitution_elasticity,
)
from .special_cases import DEFAULT_TOL, classify_special_case, reduced_eval

EXIT_OK, EXIT_USAGE, EXIT_NOT_CONVERGED, EXIT_DOMAIN, EXIT_NUMERICAL = 0, 2, 3, 4, 5


@dataclass
class CommandOutcome:
    exit_code: int
    stdout: str
    stderr: str


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _fmt(x) -> str:
    if x is None:
        return "null"
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    text = repr(float(x))
    return text[:-2] if text.endswith(".0") else text


def _table(rows) -> str:
    width = max(len(k) for k, _ in rows)
    return "".join(f"{k:<{width}}  {_fmt(v) if not isinstance(v, str) else v}\n" for k, v in rows)


# -- argument plumbing -----------------------------------------------------


def _param_flags(p: argparse.ArgumentParser, required=True):
    g = p.add_argument_group("parameters")
    for name in ("A", "sigma", "delta", "p", "q"):
        g.add_argument(f"--{name}", type=float)
    g.add_argument("--params", type=Path, help="JSON object with A, sigma, delta, p, q; overrides flags")


def _point_flags(p):
    p.add_argument("--K", type=float, required=True)
    p.add_argument("--L", type=float, required=True)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nestfn", description="Nested capital/labor/intensity production function tools.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, helptext in (
        ("eval", "evaluate V"),
        ("grad", "marginal products"),
        ("elasticity", "output elasticities and elasticity of substitution"),
        ("hessian", "finite-difference Hessian and eigenvalues"),
        ("reduce", "classify the parameter restriction and evaluate its reduced form"),
        ("audit", "compare published closed forms against computed values"),
    ):
        p = sub.add_parser(name, help=helptext)
        _param_flags(p)
        _point_flags(p)
        p.add_argument("--json", action="store_true")
        if name == "reduce":
            p.add_argument("--tol", type=float, default=DEFAULT_TOL)

    p = sub.add_parser("diagnose", help="scan a region for positivity, homogeneity, curvature, monotonicity")
    _param_flags(p)
    for flag in ("--kmin", "--kmax", "--lmin", "--lmax"):
        p.add_argument(flag, type=float, required=True)
    p.add_argument("--grid", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--linear", action="store_true", help="linear instead of logarithmic spacing")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("synth", help="generate a synthetic panel")
    _param_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--noise", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--kmin", type=float, default=0.5)
    p.add_argument("--kmax", type=float, default=10.0)
    p.add_argument("--lmin", type=float, default=0.5)
    p.add_argument("--lmax", type=float, default=10.0)
    p.add_argument("--industry", default="SYN")
    p.add_argument("--out", type=Path)

    p = sub.add_parser("fit", help="multistart least-squares fit of a panel")
    p.add_argument("--input", required=True, help="panel CSV path, or - for stdin")
    p.add_argument("--industry")
    p.add_argument("--starts", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--user-start", type=Path, help="JSON object or list of objects with A, sigma, delta, p, q")
    p.add_argument("--max-iters", type=int, default=2000)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", type=Path)
    return parser


def _load_json(path: Path):
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _params(args) -> Parameters:
    values = {name: getattr(args, name) for name in ("A", "sigma", "delta", "p", "q")}
    if args.params is not None:
        data = _load_json(args.params)
        if not isinstance(data, dict):
            raise UsageError("--params file must hold a JSON object")
        values.update({k: data[k] for k in values if k in data})
    missing = [f"--{k}" for k, v in values.items() if v is None]
    if missing:
        raise UsageError(f"missing parameter(s): {', '.join(missing)}")
    return Parameters(**values, strict=strict_from_env())


def _point(args) -> InputPoint:
    return InputPoint(args.K, args.L)


# -- subcommands -----------------------------------------------------------


def _pointwise(args, out):
    P, x = _params(args), _point(args)
    cmd = args.command
    if cmd == "eval":
        e = eval_v(P, x)
        result = asdict(e)
        text = _fmt(e.v) + "\n"
    elif cmd == "grad":
        g = gradient(P, x)
        result = asdict(g)
        text = _table(list(result.items()))
    elif cmd == "elasticity":
        result = {"elasticity_k": elasticity_k(P, x), "elasticity_l": elasticity_l(P, x)}
        try:
            s = substitution_elasticity(P, x)
            result["substitution_elasticity"] = s.value
            result["substitution_degenerate"] = s.degenerate
        except ZeroMarginalProduct:
            result["substitution_elasticity"] = None
            result["substitution_degenerate"] = True
        text = _table(list(result.items()))
    elif cmd == "hessian":
        result = asdict(hessian(P, x))
        text = _table(list(result.items()))
    elif cmd == "reduce":
        form = classify_special_case(P, args.tol)
        value = reduced_eval(P, x, form)
        result = {"form": form.tag.value, "tolerance_used": form.tolerance_used, "v": value}
        text = _table(list(result.items()))
    else:
        record = audit_mod.audit_paper_formulas(P, x)
        doc = ReportDocument(
            "audit",
            {"params": P.as_dict(), "point": asdict(x), "formulas": audit_mod.audit_as_dict(record)},
        )
        if args.json:
            out.write(write_report_json(doc).decode())
        else:
            rows = ["formula                          printed        computed       abs_deviation\n"]
            for key, e in record.items():
                if e.error:
                    rows.append(f"{key:<32} {'undefined':<14} {_fmt(e.computed_value):<14} ({e.error})\n")
                else:
                    rows.append(
                        f"{key:<32} {e.paper_value:<14.6g} {e.computed_value:<14.6g} {e.abs_deviation:.6g}\n"
                    )
            out.write("".join(rows))
        return EXIT_OK

    if args.json:
        doc = ReportDocument(
            "evaluation", {"command": cmd, "params": P.as_dict(), "point": asdict(x), "result": result}
        )
        out.write(write_report_json(doc).decode())
    else:
        out.write(text)
    return EXIT_OK


def _diagnose(args, out):
    P = _params(args)
    try:
        cfg = diagnostics.ScanConfig(
            k_range=(args.kmin, args.kmax),
            l_range=(args.lmin, args.lmax),
            grid=args.grid,
            samples=args.samples,
            seed=args.seed,
            log_spacing=not args.linear,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = diagnostics.run_all(P, cfg)
    if args.json:
        payload = {"params": P.as_dict(), "config": asdict(cfg), **report.as_dict()}
        out.write(write_report_json(ReportDocument("diagnostics", payload)).decode())
    else:
        h, pos, c, m = report.homogeneity, report.positivity, report.concavity, report.monotonicity
        out.write(
            _table(
                [
                    ("positivity.checked", pos.checked),
                    ("positivity.violations", pos.violations),
                    ("homogeneity.degree_min", h.degree_min),
                    ("homogeneity.degree_max", h.degree_max),
                    ("homogeneity.is_homogeneous", h.is_homogeneous),
                    ("homogeneity.claimed_degree_one", h.claimed_degree_one),
                    ("concavity.points_checked", c.points_checked),
                    ("concavity.negative_semidefinite_count", c.negative_semidefinite_count),
                    ("concavity.max_eig_over_region", c.max_eig_over_region),
                    ("monotonicity.share_dVdK_positive", m.share_dVdK_positive),
                    ("monotonicity.share_dVdL_positive", m.share_dVdL_positive),
                    ("euler_identity_max_abs_err", report.euler_identity_max_abs_err),
                ]
            )
        )
    return EXIT_OK


def _synth(args, out):
    P = _params(args)
    try:
        spec = SynthSpec(
            P,
            args.n,
            k_range=(args.kmin, args.kmax),
            l_range=(args.lmin, args.lmax),
            noise_sd=args.noise,
            seed=args.seed,
            industry_code=args.industry,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    data = write_panel_csv(synth_panel(spec))
    if args.out is not None:
        args.out.write_bytes(data)
    else:
        out.write(data.decode())
    return EXIT_OK


def _user_starts(path):
    if path is None:
        return ()
    data = _load_json(path)
    items = data if isinstance(data, list) else [data]
    try:
        return tuple(Parameters.from_dict(item) for item in items)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"bad user start in {path}: {exc}") from None


def _fit(args, out, stdin):
    if args.input == "-":
        raw = stdin if stdin is not None else b""
    else:
        try:
            raw = Path(args.input).read_bytes()
        except OSError as exc:
            raise UsageError(f"cannot read {args.input}: {exc}") from None
    panel = parse_panel_csv(raw, source_label=args.input)
    if args.industry is not None:
        panel = panel.filter_industry(args.industry)
    codes = panel.industry_codes()
    industry = args.industry if args.industry is not None else (codes[0] if len(codes) == 1 else None)
    try:
        cfg = FitConfig(
            n_starts=args.starts,
            seed=args.seed,
            max_iters_per_start=args.max_iters,
            include_user_starts=_user_starts(args.user_start),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = fit(panel, cfg)
    doc = fit_report_document(result, industry, args.seed)
    data = write_report_json(doc)
    if args.out is not None:
        args.out.write_bytes(data)
    if args.json:
        out.write(data.decode())
    else:
        pl = doc.payload
        out.write(
            _table(
                [
                    ("industry_code", pl["industry_code"] or "-"),
                    ("R2", pl["r_squared"]),
                    ("StdError", pl["std_error"]),
                    ("Elasticity of Substitution", pl["substitution_elasticity"]),
                    ("delta", pl["delta"]),
                    ("sigma", pl["sigma"]),
                    ("p", pl["p"]),
                    ("q", pl["q"]),
                    ("A", pl["A"]),
                    ("RSS", pl["rss"]),
                    ("Convergence", pl["converged"]),
                ]
            )
        )
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def run(argv, stdin: bytes | None = None) -> CommandOutcome:
    out, err = io.StringIO(), io.StringIO()
    parser = _build_parser()
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            try:
                args = parser.parse_args(list(argv))
            except SystemExit as exc:  # --help
                return CommandOutcome(int(exc.code or 0), out.getvalue(), err.getvalue())
        if args.command == "diagnose":
            code = _diagnose(args, out)
        elif args.command == "synth":
            code = _synth(args, out)
        elif args.command == "fit":
            code = _fit(args, out, stdin)
        else:
            code = _pointwise(args, out)
        return CommandOutcome(code, out.getvalue(), err.getvalue())
    except UsageError as exc:
        return CommandOutcome(EXIT_USAGE, "", f"{exc}\n")
    except (InvalidParameters, PanelFormatError, TooFewObservations) as exc:
        return CommandOutcome(EXIT_USAGE, "", f"error: {exc}\n")
    except (DomainError, NonPositiveBracket, FormMismatch, ZeroMarginalProduct, UnsatisfiableRegion,
            AllStartsFailed) as exc:
        return CommandOutcome(EXIT_DOMAIN, "", f"domain error: {exc}\n")
    except NumericalBreakdown as exc:
        return CommandOutcome(EXIT_NUMERICAL, "", f"numerical breakdown: {exc}\n")
    except NestFnError as exc:
        return CommandOutcome(EXIT_NUMERICAL, "", f"error: {exc}\n")
    except ValueError as exc:
        return CommandOutcome(EXIT_USAGE, "", f"error: {exc}\n")


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    stdin = None
    if "-" in argv and not sys.stdin.isatty():
        stdin = sys.stdin.buffer.read()
    outcome = run(argv, stdin)
    sys.stdout.write(outcome.stdout)
    sys.stderr.write(outcome.stderr)
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
