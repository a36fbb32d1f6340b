"""Command-line runner: ``check <suite>``, ``eval <target> [flags]``, ``spec <file>``.

Exit codes: 0 when everything passes, 1 when a check fails, 2 on usage or
parse errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from typing import Any, Callable, Sequence

import yaml

from . import archzeta as az
from . import constants as cs
from . import padic as pa
from . import special as sp
from . import whittaker as wh
from .checks import SUITES, RunConfig, run_suite

__all__ = ["main", "parse_complex", "format_complex", "reports_to_json", "load_spec", "SpecError", "TARGETS"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class SpecError(Exception):
    """A spec document that does not describe a valid set of places."""

    def __init__(self, message: str, mark=None):
        where = f"line {mark.line + 1}, column {mark.column + 1}: " if mark is not None else ""
        super().__init__(where + message)


# --------------------------------------------------------------------------
# numbers
# --------------------------------------------------------------------------

def parse_complex(text: str) -> complex:
    """Parse "1.5", "0.3i", "0.2-0.1i" or the Python form "0.3j"."""
    body = str(text).strip()
    if body.endswith("i"):
        body = body[:-1] + "j"
    try:
        z = complex(body)
    except ValueError:
        raise ValueError(f"not a number: {text!r}") from None
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"not a finite number: {text!r}")
    return z


def format_complex(z: complex) -> str:
    """The "re+imi" form used in reports and spec files."""
    z = complex(z)
    return f"{z.real!r}{'+' if z.imag >= 0 or math.isnan(z.imag) else '-'}{abs(z.imag)!r}i"


def _json_number(z: complex):
    z = complex(z)
    if math.isnan(z.real) or math.isnan(z.imag):
        return None
    if z.imag == 0:
        return z.real
    return format_complex(z)


def _json_float(x: float):
    return None if math.isnan(x) else x


def reports_to_json(reports: Sequence[cs.CheckReport]) -> str:
    rows = [
        {
            "id": r.id,
            "paper_ref": r.paper_ref,
            "lhs": _json_number(r.lhs),
            "rhs": _json_number(r.rhs),
            "abs_err": _json_float(r.abs_err),
            "rel_err": _json_float(r.rel_err),
            "tol": r.tol,
            "status": r.status,
        }
        for r in sorted(reports, key=lambda r: r.id)
    ]
    return json.dumps(rows, indent=2, allow_nan=False)


def _text_value(z) -> str:
    if isinstance(z, (Fraction, cs.PiMonomial)):
        return str(z)
    z = complex(z)
    return repr(z.real) if z.imag == 0 else format_complex(z)


def _print_reports(reports, rc: RunConfig, header: str) -> None:
    if rc.fmt == "json":
        print(reports_to_json(reports))
        return
    print(header)
    for r in reports:
        print(
            f"{r.status.upper():7s} {r.id}  lhs={_text_value(r.lhs)}  rhs={_text_value(r.rhs)}"
            f"  rel_err={r.rel_err:.3g}  tol={r.tol:g}"
        )


def _exit_code(reports) -> int:
    return EXIT_FAIL if any(r.status == "fail" for r in reports) else EXIT_OK


# --------------------------------------------------------------------------
# eval targets
# --------------------------------------------------------------------------


def _int(x: str) -> int:
    v = float(x)
    if v != int(v):
        raise ValueError(f"not an integer: {x}")
    return int(v)


def _bool(x: str) -> bool:
    if x.lower() in ("1", "true", "yes"):
        return True
    if x.lower() in ("0", "false", "no"):
        return False
    raise ValueError(f"not a boolean: {x}")


def _float(x: str) -> float:
    return float(x)


class Target:
    """An evaluable formula; ``decimal`` targets print a float and then the exact form."""

    def __init__(self, ref: str, params: dict[str, tuple[Callable, Any]], fn: Callable, decimal: bool = False):
        self.ref = ref
        self.params = params
        self.fn = fn
        self.decimal = decimal


_REQUIRED = object()


def _zeta_local(q=None, s=2):
    if q is None:
        return sp.zeta_local(sp.LocalZetaPlace.real(), s)
    if float(s) == int(s) and int(s) != 0:
        return sp.zeta_local_exact(q, int(s))
    return sp.zeta_local(sp.LocalZetaPlace.finite(q), s)


def _constant(place, q=2, c=0, l1=0.0, l2=0.0, eps=0, lam=0.0, in_s=True):
    if place == "unram":
        spec = cs.UnramifiedPlace(q, c, l1, l2)
    elif place == "iia":
        spec = cs.IIaPlace(q, c, eps, lam)
    elif place == "ds":
        spec = cs.DSPlace(int(l1.real), int(l2.real), in_s)
    elif place == "ps":
        spec = cs.PSPlace(l1, l2, eps)
    else:
        raise ValueError("place is one of unram, iia, ds, ps")
    return cs.c_constant_exact(spec)


def _place_name(x: str) -> str:
    if x not in ("unram", "iia", "ds", "ps"):
        raise ValueError("place is one of unram, iia, ds, ps")
    return x


TARGETS: dict[str, Target] = {
    "whittaker-ds": Target(
        "DS Whittaker function on the torus, double Mellin-Barnes route",
        {"l1": (_int, _REQUIRED), "l2": (_int, _REQUIRED), "a1": (_float, 1.0), "a2": (_float, 1.0)},
        lambda l1, l2, a1, a2: wh.ds_whittaker_mb(wh.DSParams(l1, l2), wh.TorusPoint(a1, a2)),
    ),
    "whittaker-ds-direct": Target(
        "DS Whittaker function on the torus, h-integral route",
        {"l1": (_int, _REQUIRED), "l2": (_int, _REQUIRED), "a1": (_float, 1.0), "a2": (_float, 1.0)},
        lambda l1, l2, a1, a2: wh.ds_whittaker_direct(wh.DSParams(l1, l2), wh.TorusPoint(a1, a2)),
    ),
    "whittaker-ps": Target(
        "PS Whittaker function on the torus, double Mellin-Barnes route",
        {"l1": (parse_complex, _REQUIRED), "l2": (parse_complex, _REQUIRED), "a1": (_float, 1.0), "a2": (_float, 1.0)},
        lambda l1, l2, a1, a2: wh.ps_whittaker_mb(wh.PSParams(l1, l2), wh.TorusPoint(a1, a2)),
    ),
    "whittaker-ps-direct": Target(
        "PS Whittaker function on the torus, K-Bessel integral route",
        {"l1": (parse_complex, _REQUIRED), "l2": (parse_complex, _REQUIRED), "a1": (_float, 1.0), "a2": (_float, 1.0)},
        lambda l1, l2, a1, a2: wh.ps_whittaker_direct(wh.PSParams(l1, l2), wh.TorusPoint(a1, a2)),
    ),
    "j": Target(
        "Hermite-Gaussian integral J_n, closed form",
        {"n": (_int, _REQUIRED), "r1": (_float, _REQUIRED), "r2": (_float, _REQUIRED), "r3": (_float, _REQUIRED)},
        wh.j_closed,
    ),
    "h-mellin": Target(
        "double Mellin transform of h_n, Gamma-product value",
        {"n": (_int, _REQUIRED), "s1": (parse_complex, _REQUIRED), "s2": (parse_complex, _REQUIRED)},
        wh.h_mellin_rhs,
    ),
    "constant": Target(
        "per-place constant of the Petersson norm formula",
        {
            "place": (_place_name, _REQUIRED),
            "q": (_int, 2),
            "c": (_int, 0),
            "l1": (parse_complex, 0.0),
            "l2": (parse_complex, 0.0),
            "eps": (_int, 0),
            "lam": (parse_complex, 0.0),
            "in_s": (_bool, True),
        },
        _constant,
        decimal=True,
    ),
    "zeta-local": Target(
        "local zeta factor; exact at a finite place and integer s",
        {"q": (_int, None), "s": (parse_complex, 2)},
        lambda q, s: _zeta_local(q, s.real if isinstance(s, complex) and s.imag == 0 else s),
    ),
    "iia-zeta": Target(
        "local zeta integral at a level place, exact closed form",
        {"q": (_int, _REQUIRED)},
        lambda q: pa.iia_rallis_zeta_closed(pa.FinitePlace(q)),
    ),
    "ds-zeta": Target(
        "local zeta integral at a discrete series place, closed form",
        {"l1": (_int, _REQUIRED), "l2": (_int, _REQUIRED), "in_s": (_bool, True)},
        lambda l1, l2, in_s: az.ds_rallis_zeta_closed(az.DSWeight.from_blattner(l1, l2), in_s),
    ),
    "ps-zeta": Target(
        "local zeta integral at a principal series place, assembled by quadrature",
        {"mu1": (parse_complex, 0.0), "mu2": (parse_complex, 0.0)},
        lambda mu1, mu2: az.ps_rallis_zeta(az.PSPairing(mu1, mu2)),
    ),
    "f-n0": Target(
        "Gaussian moment f_n(0), closed form",
        {"n": (_int, _REQUIRED), "a": (_float, 1.0), "b": (_float, 1.0)},
        az.f_n0_closed,
    ),
    "bessel-norm": Target(
        "square-integral of K_mu(2 pi |t|), Gamma product",
        {"mu": (parse_complex, 0.0)},
        lambda mu: az.bessel_norm(az.PSPairing(mu, 0), 1)[1],
    ),
    "hyp3f2": Target(
        "3F2 at unit argument",
        {
            "a1": (parse_complex, _REQUIRED),
            "a2": (parse_complex, _REQUIRED),
            "a3": (parse_complex, _REQUIRED),
            "b1": (parse_complex, _REQUIRED),
            "b2": (parse_complex, _REQUIRED),
        },
        sp.hyp3f2_unit,
    ),
}


def _parse_params(target: Target, tokens: Sequence[str]) -> dict[str, Any]:
    raw: dict[str, str] = {}
    it = iter(tokens)
    for tok in it:
        if not tok.startswith("--"):
            raise UsageError(f"unexpected argument {tok!r}")
        key = tok[2:].replace("-", "_")
        if "=" in key:
            key, val = key.split("=", 1)
        else:
            val = next(it, None)
            if val is None:
                raise UsageError(f"missing value for {tok}")
        if key not in target.params:
            raise UsageError(f"unknown parameter --{key} (known: {', '.join(sorted(target.params))})")
        raw[key] = val
    out = {}
    for key, (conv, default) in target.params.items():
        if key in raw:
            try:
                out[key] = conv(raw[key])
            except ValueError as exc:
                raise UsageError(f"--{key}: {exc}") from None
        elif default is _REQUIRED:
            raise UsageError(f"missing required parameter --{key}")
        else:
            out[key] = default
    return out


# --------------------------------------------------------------------------
# spec files
# --------------------------------------------------------------------------


def _scalar(node, conv, what: str):
    if not isinstance(node, yaml.ScalarNode):
        raise SpecError(f"{what} must be a scalar", node.start_mark)
    try:
        return conv(node.value)
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecError(f"{what}: {exc}", node.start_mark) from None


def _mapping(node, what: str) -> dict:
    if not isinstance(node, yaml.MappingNode):
        raise SpecError(f"{what} must be a mapping", node.start_mark)
    out = {}
    for k, v in node.value:
        key = _scalar(k, str, "key")
        out[key] = v
    return out


_PLACE_FIELDS = {
    "unramified": {"q": _int, "c": _int, "lambda1": parse_complex, "lambda2": parse_complex},
    "iia": {"q": _int, "c": _int, "epsilon": _int, "lambda": parse_complex},
    "ds": {"lambda1": _int, "lambda2": _int, "in_S": _bool},
    "ps": {"lambda1": parse_complex, "lambda2": parse_complex, "epsilon": _int},
}
_PLACE_TYPES = {"unramified": cs.UnramifiedPlace, "iia": cs.IIaPlace, "ds": cs.DSPlace, "ps": cs.PSPlace}


def _place(node) -> cs.PlaceSpec:
    fields = _mapping(node, "a place")
    if "kind" not in fields:
        raise SpecError("a place needs a 'kind'", node.start_mark)
    kind = _scalar(fields.pop("kind"), str, "kind")
    if kind not in _PLACE_FIELDS:
        raise SpecError(f"unknown place kind {kind!r}", node.start_mark)
    kwargs = {}
    for key, val in fields.items():
        if key not in _PLACE_FIELDS[kind]:
            raise SpecError(f"unknown field {key!r} for a {kind} place", val.start_mark)
        kwargs["lam" if key == "lambda" else key] = _scalar(val, _PLACE_FIELDS[kind][key], key)
    try:
        return _PLACE_TYPES[kind](**kwargs)
    except (TypeError, ValueError) as exc:
        raise SpecError(str(exc), node.start_mark) from None


def load_spec(text: str) -> cs.GlobalSpec:
    """Build a GlobalSpec from a YAML document; errors carry line and column."""
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise SpecError(getattr(exc, "problem", None) or str(exc), mark) from None
    if root is None:
        raise SpecError("empty spec document")
    top = _mapping(root, "the top level")
    known = {"places", "endoscopic", "discriminant", "zeta2", "zeta4", "real_places", "l_ad_at_1"}
    for key, val in top.items():
        if key not in known:
            raise SpecError(f"unknown top-level field {key!r}", val.start_mark)
    if "places" not in top or not isinstance(top["places"], yaml.SequenceNode):
        raise SpecError("'places' must be a list", root.start_mark)
    kwargs: dict[str, Any] = {"places": tuple(_place(n) for n in top["places"].value)}
    convs = {
        "endoscopic": _bool,
        "discriminant": Fraction,
        "zeta2": _float,
        "zeta4": _float,
        "real_places": _int,
        "l_ad_at_1": _float,
    }
    for key, conv in convs.items():
        if key in top:
            kwargs[key] = _scalar(top[key], conv, key)
    try:
        return cs.GlobalSpec(**kwargs)
    except (TypeError, ValueError) as exc:
        raise SpecError(str(exc), root.start_mark) from None


def spec_reports(g: cs.GlobalSpec, rc: RunConfig) -> list[cs.CheckReport]:
    reports = []
    assembly_ref = "explicit Rallis inner product, local factor product"
    if g.endoscopic:
        reports.append(cs.rallis_assembly_check(g, rc.tol))
    else:
        reports.append(cs.CheckReport.skipped("constants.rallis_assembly", assembly_ref, rc.tol))
    norm_ref = "Petersson norm: constants table against constants rebuilt from local factors"
    if g.l_ad_at_1 is None:
        reports.append(cs.CheckReport.skipped("constants.petersson_norm", norm_ref, rc.tol))
    else:
        lhs = cs.petersson_norm(g)
        prod = cs.PiMonomial(1)
        for p in g.places:
            prod = prod * cs.c_prime_constant(p)
        c = 2 if g.endoscopic else 1
        rhs = 2**c * g.l_ad_at_1 / (g.zeta2 * g.zeta4) * float(prod)
        reports.append(cs.CheckReport.compare("constants.petersson_norm", norm_ref, lhs, rhs, rc.tol))
    return sorted(reports, key=lambda r: r.id)


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--json", action="store_true", default=argparse.SUPPRESS if suppress else False)
    parser.add_argument("--tol", type=float, default=d if suppress else 1e-6)
    parser.add_argument("--prec", choices=("machine-double", "extended"), default=d if suppress else "machine-double")
    parser.add_argument("--max-nodes", type=int, dest="max_nodes", default=d)
    parser.add_argument("--seed", type=int, default=d if suppress else 0)
    parser.add_argument("--jobs", type=int, default=d if suppress else 1)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 2 with usage, as argparse does, but catchable
        raise UsageError(f"{message}\n{self.format_usage()}")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gsp4norms", description="Verify local formulas for GSp(4) Petersson norms.")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    pc = sub.add_parser("check", help="run a verification suite")
    pc.add_argument("suite", help=f"one of {', '.join(SUITES)}")
    _global_flags(pc, suppress=True)
    pe = sub.add_parser("eval", help="evaluate one formula")
    pe.add_argument("target", help=f"one of {', '.join(sorted(TARGETS))}")
    _global_flags(pe, suppress=True)
    ps = sub.add_parser("spec", help="run the assembly checks for a spec file")
    ps.add_argument("file")
    _global_flags(ps, suppress=True)
    return parser


def _run_config(ns) -> RunConfig:
    if ns.max_nodes is not None and ns.max_nodes < 16:
        raise UsageError("--max-nodes must be at least 16")
    try:
        return RunConfig(ns.tol, ns.prec, ns.max_nodes, ns.seed, ns.jobs, "json" if ns.json else "text")
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _cmd_eval(ns, extra, rc: RunConfig) -> int:
    if ns.target not in TARGETS:
        raise UsageError(f"unknown target {ns.target!r}; known: {', '.join(sorted(TARGETS))}")
    target = TARGETS[ns.target]
    params = _parse_params(target, extra)
    try:
        value = target.fn(**params)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"{ns.target}: {exc}") from None
    exact = isinstance(value, (Fraction, cs.PiMonomial))
    if rc.fmt == "json":
        doc = {"target": ns.target, "value": str(value) if exact else _json_number(value), "paper_ref": target.ref}
        if exact and target.decimal:
            doc["value"], doc["exact"] = float(value), str(value)
        print(json.dumps(doc, indent=2))
    else:
        if exact and target.decimal:
            print(repr(float(value)))
            print(f"exact: {value}")
        else:
            print(_text_value(value))
        print(f"ref: {target.ref}")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        ns, extra = parser.parse_known_args(argv)
        rc = _run_config(ns)
        if ns.command == "eval":
            return _cmd_eval(ns, extra, rc)
        if extra:
            raise UsageError(f"unrecognized arguments: {' '.join(extra)}")
        if ns.command == "check":
            if ns.suite not in SUITES:
                raise UsageError(f"unknown suite {ns.suite!r}; known: {', '.join(SUITES)}\n{parser.format_usage()}")
            reports = run_suite(ns.suite, rc)
            _print_reports(reports, rc, f"# suite={ns.suite} seed={rc.seed} tol={rc.tol:g} prec={rc.prec}")
            return _exit_code(reports)
        try:
            with open(ns.file, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {ns.file}: {exc.strerror}") from None
        try:
            g = load_spec(text)
        except SpecError as exc:
            raise UsageError(f"{ns.file}: {exc}") from None
        reports = spec_reports(g, rc)
        _print_reports(reports, rc, f"# spec={ns.file} tol={rc.tol:g}")
        return _exit_code(reports)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
