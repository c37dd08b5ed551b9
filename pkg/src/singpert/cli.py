"""Command-line front end.

Usage::

    singpert measure validate --measure m.json
    singpert measure dyadic --depth 8 --decay 4
    singpert herglotz eval --measure m.json --z 0,1
    singpert herglotz boundary --measure m.json --y 1
    singpert herglotz classify --measure m.json --y 1
    singpert spectrum extension --measure m.json --theta0 pi/2 --theta pi/4 --window 0.5,1.5
    singpert spectrum energy2theta --measure m.json --theta0 pi/2 --y 1
    singpert scan energies --measure m.json --window -1,1 --grid 10000 --theta-count 100
    singpert scan couplings --measure m.json --c 0 --alphas 0.1,1,10 --window -1,1
    singpert couple map --alpha 1 --c 0
    singpert oracle verify --seed 1 --dim 4 --alphas 0.1,1,10

Exit codes: 0 success, 1 usage error, 2 invalid input, 3 numerical error.
"""
from __future__ import annotations

import argparse
import datetime
import math
import os
import re
import sys
from dataclasses import dataclass


from . import __version__, kernels
from .errors import NumericalError, SameExtension, ValidationError
from .herglotz import ClassifierConfig, boundary_value, inverse_square_moment, transform
from .measure import Measure, Window, dyadic_benchmark, validate
from .oracle import (
    SUITE_SCHEMA,
    MatrixModel,
    random_model,
    suite_case,
    suite_models,
)
from .params import chain, coupling_from_theta, theta_from_coupling
from .report import complex_text, csv_lines, dumps
from .spectral import (
    ROOT_TOL,
    AdProblem,
    coupling_sweep,
    default_theta_sweep,
    extension_for_energy,
    forbidden_energy_scan,
    locate_eigenvalues,
)

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2, 3
ORACLE_TOL = 1e-8


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


@dataclass(frozen=True)
class RunConfig:
    root_tol: float = ROOT_TOL
    cap: float = 1e12
    kmax: int = 60
    stab_rtol: float = 1e-10
    stab_window: int = 3
    parallel: int = 1
    fmt: str = "json"
    seed: int = 0
    meta: bool = True

    def __post_init__(self):
        if not (self.root_tol > 0 and self.cap > 0 and self.stab_rtol > 0):
            raise ValidationError("tolerances must be > 0")
        if self.parallel < 1:
            raise ValidationError("--parallel must be >= 1")

    @property
    def classifier(self):
        return ClassifierConfig(self.kmax, self.stab_rtol, self.stab_window, self.cap)


_PI_RE = re.compile(r"^\s*([+-]?\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?\s*$")


def parse_real(text):
    """Float, ``inf``, or a multiple of pi such as ``pi/2`` or ``3pi/4``."""
    try:
        return float(text)
    except ValueError:
        pass
    mt = _PI_RE.match(text.lower())
    if not mt:
        raise argparse.ArgumentTypeError(f"not a real number: {text!r}")
    num = mt.group(1)
    k = 1.0 if num in ("", "+") else -1.0 if num == "-" else float(num)
    den = float(mt.group(2)) if mt.group(2) else 1.0
    return k * math.pi / den


def parse_list(text):
    return [parse_real(t) for t in text.split(",") if t.strip()]


def parse_pair(text):
    vals = parse_list(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}")
    return vals


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--tol-root", type=float, default=ROOT_TOL)
    common.add_argument("--cap", type=float, default=1e12)
    common.add_argument("--kmax", type=int, default=60,
                        help="G_n ladder depth, n = 2^0..2^kmax")
    common.add_argument("--parallel", type=_positive_int,
                        default=int(os.environ.get("HS_NUM_THREADS", "1") or 1))
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--no-meta", action="store_true",
                        help="omit timestamp/version metadata for byte-stable output")

    parser = _Parser(prog="singpert", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def sub(group, name, help_text):
        return group.add_parser(name, parents=[common], help=help_text)

    g = groups.add_parser("measure").add_subparsers(dest="cmd", required=True)
    p = sub(g, "validate", "check measure invariants")
    p.add_argument("--measure", required=True)
    p = sub(g, "dyadic", "emit the dyadic benchmark measure")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--decay", type=float, default=4.0)

    g = groups.add_parser("herglotz").add_subparsers(dest="cmd", required=True)
    p = sub(g, "eval", "F(z) for Im z > 0")
    p.add_argument("--measure", required=True)
    p.add_argument("--z", type=parse_pair, required=True, metavar="RE,IM")
    for name, text in (("boundary", "F(y + i0)"), ("classify", "inverse-square moment test")):
        p = sub(g, name, text)
        p.add_argument("--measure", required=True)
        p.add_argument("--y", type=parse_real, required=True)

    g = groups.add_parser("spectrum").add_subparsers(dest="cmd", required=True)
    p = sub(g, "extension", "eigenvalues of T_theta in a window")
    p.add_argument("--measure", required=True)
    p.add_argument("--theta0", type=parse_real, default=math.pi / 2)
    p.add_argument("--theta", type=parse_real, required=True)
    p.add_argument("--window", type=parse_pair, required=True)
    p = sub(g, "energy2theta", "extension angle having y as eigenvalue")
    p.add_argument("--measure", required=True)
    p.add_argument("--theta0", type=parse_real, default=math.pi / 2)
    p.add_argument("--y", type=parse_real, required=True)

    g = groups.add_parser("scan").add_subparsers(dest="cmd", required=True)
    p = sub(g, "energies", "forbidden-energy grid scan")
    p.add_argument("--measure", required=True)
    p.add_argument("--theta0", type=parse_real, default=math.pi / 2)
    p.add_argument("--window", type=parse_pair, required=True)
    p.add_argument("--grid", type=int, required=True)
    p.add_argument("--thetas", type=parse_list, default=None)
    p.add_argument("--theta-count", type=int, default=0)
    p = sub(g, "couplings", "coupling sweep at fixed c")
    p.add_argument("--measure", required=True)
    p.add_argument("--c", type=parse_real, required=True)
    p.add_argument("--alphas", type=parse_list, required=True)
    p.add_argument("--window", type=parse_pair, required=True)
    p.add_argument("--grid", type=int, default=0)
    p.add_argument("--include-infinity", action="store_true")

    g = groups.add_parser("couple").add_subparsers(dest="cmd", required=True)
    p = sub(g, "map", "(alpha, c) -> gamma -> v -> theta, or theta -> alpha")
    p.add_argument("--alpha", type=parse_real)
    p.add_argument("--theta", type=parse_real)
    p.add_argument("--c", type=parse_real, required=True)

    g = groups.add_parser("oracle").add_subparsers(dest="cmd", required=True)
    p = sub(g, "verify", "matrix oracle suite")
    p.add_argument("--alphas", type=parse_list, required=True)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--models", type=_positive_int, default=1)
    p.add_argument("--model", default=None, help="JSON file {\"A\": ..., \"phi\": ...}")
    return parser


# --- commands -------------------------------------------------------------------

def _load_measure(path, require=True):
    try:
        with open(path) as fh:
            m = Measure.from_json(fh.read())
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    if require:
        rep = validate(m)
        if not rep.valid:
            raise ValidationError("invalid measure: " + "; ".join(rep.problems))
    return m


def _window(pair):
    return Window(pair[0], pair[1])


def cmd_measure_validate(args, cfg):
    rep = validate(_load_measure(args.measure, require=False))
    out = {"schema": "measure-validate/1", **rep.to_dict()}
    return out, (EXIT_OK if rep.valid else EXIT_INVALID)


def cmd_measure_dyadic(args, cfg):
    return dyadic_benchmark(args.depth, args.decay).to_dict(), EXIT_OK


def cmd_herglotz_eval(args, cfg):
    m = _load_measure(args.measure)
    z = complex(*args.z)
    val = transform(m, z).value
    return {"schema": "herglotz-eval/1", "z": z, "value": val,
            "display": complex_text(val)}, EXIT_OK


def cmd_herglotz_boundary(args, cfg):
    m = _load_measure(args.measure)
    val = boundary_value(m, args.y, cfg.classifier)
    return {"schema": "herglotz-boundary/1", "y": args.y, "value": val}, EXIT_OK


def cmd_herglotz_classify(args, cfg):
    m = _load_measure(args.measure)
    cls = inverse_square_moment(m, args.y, cfg.classifier)
    return {"schema": "herglotz-classify/1", "y": args.y, **cls.to_dict()}, EXIT_OK


def cmd_spectrum_extension(args, cfg):
    p = AdProblem(_load_measure(args.measure), args.theta0)
    w = _window(args.window)
    out = {"schema": "spectrum-extension/1", "theta0": args.theta0,
           "theta": args.theta, "window": list(args.window)}
    try:
        res = locate_eigenvalues(p, args.theta, w, cfg.root_tol)
    except SameExtension as exc:
        out.update(same_extension=True, eigenvalues=exc.atoms, near_atom=[])
        return out, EXIT_OK
    out.update(same_extension=False, eigenvalues=res.values, near_atom=res.near_atom)
    return out, EXIT_OK


def cmd_spectrum_energy2theta(args, cfg):
    p = AdProblem(_load_measure(args.measure), args.theta0)
    theta = extension_for_energy(p, args.y, cfg.classifier)
    return {"schema": "spectrum-energy2theta/1", "theta0": args.theta0,
            "y": args.y, "theta": theta}, EXIT_OK


def cmd_scan_energies(args, cfg):
    p = AdProblem(_load_measure(args.measure), args.theta0)
    thetas = list(args.thetas or [])
    if args.theta_count:
        thetas += default_theta_sweep(args.theta_count, args.theta0)
    rep = forbidden_energy_scan(p, _window(args.window), args.grid, thetas,
                                cfg.classifier, cfg.root_tol, cfg.parallel)
    return rep, EXIT_OK


def cmd_scan_couplings(args, cfg):
    p = AdProblem(_load_measure(args.measure), math.pi / 2)
    rep = coupling_sweep(p, args.c, args.alphas, _window(args.window),
                         args.include_infinity, args.grid, cfg.classifier,
                         cfg.root_tol, cfg.parallel)
    return rep, EXIT_OK


def cmd_couple_map(args, cfg):
    if (args.alpha is None) == (args.theta is None):
        raise UsageError("give exactly one of --alpha or --theta")
    if args.alpha is not None:
        out = {"schema": "couple-map/1", **chain(args.alpha, args.c)}
        if math.isfinite(args.alpha):
            out["theta_direct"] = theta_from_coupling(args.alpha, args.c)
        out["v_display"] = complex_text(out["v"])
        return out, EXIT_OK
    k = coupling_from_theta(args.theta, args.c)
    return {"schema": "couple-map/1", "theta": args.theta, "c": args.c,
            "alpha": k.alpha}, EXIT_OK


def cmd_oracle_verify(args, cfg):
    if args.model:
        try:
            import json
            with open(args.model) as fh:
                models = [(None, MatrixModel.from_dict(json.load(fh)))]
        except (OSError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"cannot read model: {exc}") from exc
    elif args.dim is not None:
        models = [(cfg.seed + k, random_model(cfg.seed + k, args.dim))
                  for k in range(args.models)]
    else:
        models = suite_models(args.models, cfg.seed)
    cases = [suite_case(m, a, seed, ORACLE_TOL)
             for seed, m in models for a in args.alphas]
    worst = max((c["deviation"] for c in cases), default=0.0)
    worst_sec = max((c["secular_deviation"] for c in cases), default=0.0)
    ok = all(not c["flags"] for c in cases)
    out = {"schema": SUITE_SCHEMA, "tolerance": ORACLE_TOL,
           "max_deviation": worst, "max_secular_deviation": worst_sec,
           "passed": ok, "cases": cases}
    return out, (EXIT_OK if ok else EXIT_NUMERIC)


COMMANDS = {
    ("measure", "validate"): cmd_measure_validate,
    ("measure", "dyadic"): cmd_measure_dyadic,
    ("herglotz", "eval"): cmd_herglotz_eval,
    ("herglotz", "boundary"): cmd_herglotz_boundary,
    ("herglotz", "classify"): cmd_herglotz_classify,
    ("spectrum", "extension"): cmd_spectrum_extension,
    ("spectrum", "energy2theta"): cmd_spectrum_energy2theta,
    ("scan", "energies"): cmd_scan_energies,
    ("scan", "couplings"): cmd_scan_couplings,
    ("couple", "map"): cmd_couple_map,
    ("oracle", "verify"): cmd_oracle_verify,
}


# --- rendering -----------------------------------------------------------------

def _meta(argv):
    return {"tool": "singpert", "version": __version__, "backend": kernels.BACKEND,
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "argv": list(argv)}


def _flat_rows(d, prefix=""):
    rows = []
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            rows += _flat_rows(v, key + ".")
        elif isinstance(v, (list, tuple)):
            rows.append((key, ";".join(str(x) if not isinstance(x, float)
                                       else format(x, ".17g") for x in v)))
        elif isinstance(v, complex):
            rows += [(key + ".re", v.real), (key + ".im", v.imag)]
        else:
            rows.append((key, v))
    return rows


def render(result, cfg, argv, command):
    is_scan = hasattr(result, "csv_rows")
    if cfg.fmt == "csv":
        if is_scan:
            return csv_lines(*result.csv_rows())
        if command == ("oracle", "verify"):
            return csv_lines(["seed", "n", "alpha", "deviation", "secular_deviation", "flags"],
                             [(c["seed"], c["n"], c["alpha"], c["deviation"],
                               c["secular_deviation"], ";".join(c["flags"]))
                              for c in result["cases"]])
        return csv_lines(["key", "value"], _flat_rows(result))
    data = result.to_dict() if is_scan else result
    if cfg.meta and command != ("measure", "dyadic"):
        data = {**data, "meta": _meta(argv)}
    return dumps(data)


_NUMERIC_ARG = re.compile(r"^-[\d.]|^-(inf|pi)", re.I)


def _join_negative_values(argv):
    """Let ``--window -3,3`` parse: attach numeric-looking values to the flag."""
    out = []
    for tok in argv:
        if (out and out[-1].startswith("--") and "=" not in out[-1]
                and _NUMERIC_ARG.match(tok)):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def run(argv=None, stdout=None, stderr=None):
    """Execute one CLI invocation; returns the exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(_join_negative_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = RunConfig(root_tol=args.tol_root, cap=args.cap, kmax=args.kmax,
                        parallel=args.parallel, fmt=args.format, seed=args.seed,
                        meta=not args.no_meta)
        command = (args.group, args.cmd)
        result, code = COMMANDS[command](args, cfg)
        stdout.write(render(result, cfg, argv, command))
        return code
    except UsageError as exc:
        stderr.write(f"singpert: error: {exc}\n")
        return EXIT_USAGE
    except ValidationError as exc:
        stderr.write(f"singpert: invalid input: {exc}\n")
        return EXIT_INVALID
    except (NumericalError, ArithmeticError) as exc:
        stderr.write(f"singpert: numerical error: {exc}\n")
        return EXIT_NUMERIC
    except ValueError as exc:
        stderr.write(f"singpert: invalid input: {exc}\n")
        return EXIT_INVALID


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
