"""Command-line front end.

Every subcommand builds a JSON-ready payload and a short text rendering.
Exit codes: 0 success, 2 precondition/parse error, 3 resource limit,
4 theorem violation (an engine inconsistency).
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from fractions import Fraction
from pathlib import Path
from typing import Callable

from . import __version__
from .bsato import INFINITY, bernstein_sato, format_minexp, reduced_b
from .cache import GBCache, default_cache, set_default_cache
from .deltamod import TheoremViolation, parse_delta
from .exponent import (
    check_lichtin,
    lct_from_minimal_exponent,
    multiplicity_bounds_check,
    parse_resolution,
    restriction_check,
    thom_sebastiani_check,
)
from .groebner_weyl import Budget, ResourceLimit
from .hodge import (
    QDivSpec,
    chain_jumps,
    hodge_ideal,
    jumping_chain,
    nonreduced_convert,
    property_report,
    roots_from_jumps,
    tilde_ideal,
)
from .polyring import MPoly, ParseError, PreconditionError, as_rat, format_rat, parse_poly
from .qcomb import IDENTITY_BOUND, verify_convolution_identity, verify_shift_identity
from .vfilt import criterion_for, jump_candidates, v_jumping_numbers, v_member

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_RESOURCE = 3
EXIT_THEOREM = 4


class Context:
    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.budget = Budget(args.max_pairs, args.max_degree)
        self.cache = default_cache()
        self.nvars = args.nvars

    def poly(self, text: str) -> MPoly:
        return parse_poly(text, self.nvars)

    @property
    def kw(self) -> dict:
        return {"budget": self.budget, "cache": self.cache}


def drop_unused_variables(f: MPoly) -> MPoly:
    used = sorted(f.variables_used())
    if len(used) == f.n:
        return f
    return MPoly(max(len(used), 1), {tuple(e[i] for i in used) or (0,): c for e, c in f.terms.items()})


# -- subcommands -------------------------------------------------------------


def cmd_bf(ctx: Context):
    f = ctx.poly(ctx.args.f)
    b = bernstein_sato(f, **ctx.kw)
    rb = reduced_b(b)
    top = rb.largest_root()
    m = INFINITY if top is None else -top
    payload = {
        "command": "bf",
        "f": str(f),
        "b": b.render(),
        "roots": b.to_json(),
        "reduced_b": rb.render(),
        "minimal_exponent": format_minexp(m),
        "lct": format_rat(lct_from_minimal_exponent(m)),
        "certified": True,
    }
    return payload, b.render()


def cmd_min_exp(ctx: Context):
    f = ctx.poly(ctx.args.f)
    rb = reduced_b(bernstein_sato(f, **ctx.kw))
    top = rb.largest_root()
    m = INFINITY if top is None else -top
    return {"command": "min-exp", "f": str(f), "minimal_exponent": format_minexp(m)}, format_minexp(m)


def cmd_lct(ctx: Context):
    f = ctx.poly(ctx.args.f)
    b = bernstein_sato(f, **ctx.kw)
    value = format_rat(-b.largest_root())
    return {"command": "lct", "f": str(f), "lct": value}, value


def cmd_hodge(ctx: Context):
    a = ctx.args
    f = ctx.poly(a.f)
    spec = QDivSpec.of(f, as_rat(a.alpha))
    if a.tilde:
        res = tilde_ideal(spec, a.p, a.degree_bound, check_stable=a.check_stable, **ctx.kw)
    else:
        res = hodge_ideal(spec, a.p, a.degree_bound, method=a.method, check_stable=a.check_stable, **ctx.kw)
    payload = {"command": "hodge", **res.to_json()}
    name = {"I": "I", "I''": "I''", "tilde": "tilde I"}[res.kind]
    lines = [f"{name}_{a.p}({format_rat(spec.alpha)} * div f) = {res.ideal}"]
    if res.kind == "I''":
        converted = nonreduced_convert(res.ideal, spec, a.p)
        payload["converted_ideal"] = converted.to_strs()
        lines.append(f"I_{a.p} = {converted}")
    lines.append(f"complete (degree <= {res.degree_bound}): {str(res.complete).lower()}")
    if res.stable is not None:
        lines.append(f"stable at degree {res.degree_bound + 1}: {str(res.stable).lower()}")
    return payload, "\n".join(lines)


def cmd_jumps(ctx: Context):
    a = ctx.args
    f = ctx.poly(a.f)
    crit = criterion_for(f, **ctx.kw)
    chain = jumping_chain(f, a.p, a.degree_bound, **ctx.kw)
    jumps = chain_jumps(chain)
    roots = roots_from_jumps(f, a.p, a.degree_bound, **ctx.kw)
    vjumps = v_jumping_numbers(f, a.p, a.degree_bound, **ctx.kw)
    payload = {
        "command": "jumps",
        "f": str(f),
        "p": a.p,
        "candidates": [format_rat(c) for c in jump_candidates(crit.bf, a.p)],
        "v_jumps": [format_rat(c) for c in vjumps],
        "chain": [{"upper": format_rat(s.upper), "ideal_mod_f": s.ideal.to_strs()} for s in chain],
        "jumps": [format_rat(c) for c in jumps],
        "certified_roots": [format_rat(r) for r in roots],
    }
    lines = [f"jumps of I_{a.p} + (f) in (0,1): {', '.join(map(format_rat, jumps)) or 'none'}"]
    for s in chain:
        lines.append(f"  up to {format_rat(s.upper)}: {s.ideal}")
    lines.append(f"V-filtration jumps (degree-bounded): {', '.join(map(format_rat, vjumps)) or 'none'}")
    lines.append(f"certified roots of the reduced b-function: {', '.join(map(format_rat, roots)) or 'none'}")
    return payload, "\n".join(lines)


def cmd_vmember(ctx: Context):
    a = ctx.args
    f = ctx.poly(a.f)
    u = parse_delta(a.elem, f)
    gamma = as_rat(a.gamma)
    if a.method == "sabbah":
        result = v_member(u, gamma, a.strict, **ctx.kw)
    else:
        result = criterion_for(f, **ctx.kw).member(u, gamma, a.strict)
    payload = {
        "command": "vmember",
        "f": str(f),
        "element": str(u),
        "gamma": format_rat(gamma),
        "strict": a.strict,
        "method": a.method,
        "member": result,
    }
    return payload, str(result).lower()


def cmd_verify_identities(ctx: Context):
    top = ctx.args.max_j
    rows = []
    for j in range(top + 1):
        rows.append({"j": j, "convolution": verify_convolution_identity(j), "shift": verify_shift_identity(j)})
    ok = all(r["convolution"] and r["shift"] for r in rows)
    if not ok:
        bad = [r["j"] for r in rows if not (r["convolution"] and r["shift"])]
        raise TheoremViolation(f"combinatorial identities fail for j in {bad}")
    return {"command": "verify-identities", "max_j": top, "all_pass": ok, "results": rows}, f"all identities hold for j <= {top}"


def cmd_lichtin(ctx: Context):
    f = ctx.poly(ctx.args.f)
    try:
        text = Path(ctx.args.resolution).read_text()
    except OSError as exc:
        raise PreconditionError(f"cannot read resolution file: {exc}") from None
    chk = check_lichtin(f, parse_resolution(text), **ctx.kw)
    v = chk.values
    return (
        {"command": "lichtin", "f": str(f), **chk.to_json()},
        f"gamma = {format_minexp(v['gamma'])} <= minimal exponent = {format_minexp(v['minimal_exponent'])}: {str(chk.holds).lower()}",
    )


def cmd_ts_check(ctx: Context):
    f = drop_unused_variables(parse_poly(ctx.args.f))
    g = drop_unused_variables(parse_poly(ctx.args.g))
    chk = thom_sebastiani_check(f, g, **ctx.kw)
    v = chk.values
    text = (
        f"{format_minexp(v['f'])} + {format_minexp(v['g'])} vs {format_minexp(v['sum'])}: "
        f"{str(chk.holds).lower()}"
    )
    return {"command": "ts-check", "f": str(f), "g": str(g), **chk.to_json()}, text


def cmd_bounds_check(ctx: Context):
    f = ctx.poly(ctx.args.f)
    checks = [multiplicity_bounds_check(f, ctx.args.r, **ctx.kw)]
    for i in range(f.n):
        try:
            checks.append(restriction_check(f, i, **ctx.kw))
        except PreconditionError:
            continue
    payload = {"command": "bounds-check", "f": str(f), "checks": [c.to_json() for c in checks]}
    payload["all_hold"] = all(c.holds for c in checks)
    lines = []
    for c in checks:
        vals = ", ".join(f"{k}={format_minexp(v) if isinstance(v, (Fraction, float)) else v}" for k, v in c.values.items())
        lines.append(f"{c.name}: {str(c.holds).lower()} ({vals})")
    return payload, "\n".join(lines)


def cmd_report(ctx: Context):
    a = ctx.args
    f = ctx.poly(a.f)
    spec = QDivSpec.of(f, as_rat(a.alpha))
    checks = property_report(spec, a.p, a.degree_bound, **ctx.kw)
    payload = {
        "command": "report",
        "f": str(f),
        "alpha": format_rat(spec.alpha),
        "p": a.p,
        "checks": [c.to_json() for c in checks],
    }
    payload["all_pass"] = all(c.passed is not False for c in checks)
    lines = []
    for c in checks:
        status = "n/a" if not c.applies else ("pass" if c.passed else "FAIL")
        lines.append(f"{c.name}: {status}  {c.detail}")
    return payload, "\n".join(lines)


# -- parser ------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--cache-dir", default=None, help="Groebner cache directory (overrides QHODGE_CACHE_DIR)")
    common.add_argument("--max-pairs", type=int, default=Budget().max_pairs)
    common.add_argument("--max-degree", type=int, default=Budget().max_degree)
    common.add_argument("--nvars", type=int, default=None, help="ring size (inferred from the input by default)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="qhodge", description="Exact Bernstein-Sato, V-filtration and Hodge ideal engine.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, fn: Callable, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(handler=fn)
        return p

    for name, fn, text in (
        ("bf", cmd_bf, "Bernstein-Sato polynomial"),
        ("min-exp", cmd_min_exp, "minimal exponent"),
        ("lct", cmd_lct, "log canonical threshold"),
    ):
        add(name, fn, text).add_argument("f")

    p = add("hodge", cmd_hodge, "Hodge ideal I_p(alpha Z) (or I'' for non-reduced f)")
    p.add_argument("f")
    p.add_argument("--alpha", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--tilde", action="store_true", help="ideal of top coefficients instead")
    p.add_argument("--method", choices=("shift", "direct"), default="shift")
    p.add_argument("--degree-bound", type=int, default=None)
    p.add_argument("--check-stable", action="store_true")

    p = add("jumps", cmd_jumps, "jumping coefficients and the roots they certify")
    p.add_argument("f")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--degree-bound", type=int, default=None)

    p = add("vmember", cmd_vmember, "V-filtration membership of sum v_j dt^j delta")
    p.add_argument("f")
    p.add_argument("--gamma", required=True)
    p.add_argument("--elem", required=True, help='comma-separated coefficients "v0, v1, ..."')
    p.add_argument("--strict", action="store_true")
    p.add_argument("--method", choices=("sabbah", "linear"), default="sabbah")

    p = add("verify-identities", cmd_verify_identities, "combinatorial identities for Q_j")
    p.add_argument("--max-j", type=int, default=IDENTITY_BOUND)

    p = add("lichtin", cmd_lichtin, "Lichtin's lower bound from resolution data")
    p.add_argument("f")
    p.add_argument("--resolution", required=True)

    p = add("ts-check", cmd_ts_check, "Thom-Sebastiani additivity")
    p.add_argument("f")
    p.add_argument("g")

    p = add("bounds-check", cmd_bounds_check, "multiplicity and restriction bounds")
    p.add_argument("f")
    p.add_argument("--r", type=int, default=None, help="singular-locus dimension of the projectivized tangent cone")

    p = add("report", cmd_report, "structural property report")
    p.add_argument("f")
    p.add_argument("--alpha", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--degree-bound", type=int, default=None)
    return parser


def load_schema(name: str) -> dict:
    """The published JSON schema for a subcommand payload (or "error", "vtruncation")."""
    return json.loads(resources.files("qhodge").joinpath("schemas", f"{name}.json").read_text())


def _error_payload(kind: str, exc: BaseException) -> dict:
    err = {"kind": kind, "message": str(exc)}
    if isinstance(exc, ParseError):
        err["position"] = exc.pos
        err["text"] = exc.text
    return {"error": err}


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.cache_dir:
        set_default_cache(GBCache(args.cache_dir))
    try:
        payload, text = args.handler(Context(args))
        code = EXIT_OK
    except PreconditionError as exc:
        payload, text, code = _error_payload("precondition", exc), f"error: {exc}", EXIT_PRECONDITION
    except ResourceLimit as exc:
        payload, text, code = _error_payload("resource_limit", exc), f"resource limit: {exc}", EXIT_RESOURCE
    except TheoremViolation as exc:
        payload, text, code = _error_payload("theorem_violation", exc), f"internal inconsistency: {exc}", EXIT_THEOREM
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True), file=out)
    else:
        print(text, file=out if code == EXIT_OK else err)
    return code


def main() -> None:
    sys.exit(run())
