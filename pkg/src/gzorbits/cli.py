"""Command-line front end.

Every subcommand prints one JSON document on stdout.  Exit status is 0
on success, 1 for domain errors (payload ``{"error": {"kind", "detail"}}``)
and 2 for usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .census import (ChoiceVector, classify, enumerate_orbits, fiber_class,
                     lower_pattern, nil_pattern, nil_permutation,
                     orbit_representative)
from .errors import GZError, SchemaError
from .flows import FlowStep, flow_word
from .hessenberg import hessenberg_from_spec
from .matrices import is_exact, matrix_from_json, matrix_to_json
from .moment import GZSpec, phi, strong_regularity
from .scalars import Spectrum, ToleranceContext, exact
from .solution import stabilizer_pattern, xi_charpoly, xi_solve


class UsageError(Exception):
    pass


def _load_json(text_or_path: str):
    path = Path(text_or_path)
    try:
        if path.is_file():
            return json.loads(path.read_text())
        return json.loads(text_or_path)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON in {text_or_path!r}: {exc}") from None
    except OSError as exc:
        raise UsageError(str(exc)) from None


def _need(args, name, flag=None):
    val = getattr(args, name)
    if val is None:
        raise UsageError(f"{flag or '--' + name} is required")
    return val


def _matrix(args):
    obj = _load_json(_need(args, "input", "--in"))
    if isinstance(obj, list):
        obj = {"entries": obj}
    return matrix_from_json(obj, args.mode)


def _spec(args, required=True) -> GZSpec | None:
    if args.spec is None and not required:
        return None
    return GZSpec.from_json(_load_json(_need(args, "spec")), args.mode)


def _choice(args) -> ChoiceVector | None:
    if args.choice is None:
        return None
    return ChoiceVector.from_json(_load_json(args.choice), args.mode)


def _ctx(args) -> ToleranceContext:
    try:
        return ToleranceContext(args.eps_rank, args.eps_root, args.eps_eq)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------------------
# subcommands

def cmd_phi(args, ctx):
    x = _matrix(args)
    c = phi(x)
    out = c.to_json(ctx)
    if args.verify:
        h = hessenberg_from_spec(c)
        out["checks"] = {"hessenberg_in_fibre": phi(h) == c if c.exact
                         else phi(h).max_coeff_error(c) <= ctx.eps_eq * 10}
    return out


def cmd_sreg(args, ctx):
    return strong_regularity(_matrix(args), ctx).to_json()


def cmd_hessenberg(args, ctx):
    c = _spec(args)
    h = hessenberg_from_spec(c)
    out = matrix_to_json(h)
    if args.verify:
        back = phi(h)
        out["checks"] = {"phi_error": 0.0 if back == c else back.max_coeff_error(c)}
    return out


def cmd_flow(args, ctx):
    x = _matrix(args)
    try:
        steps = [FlowStep.parse(s) for s in args.step or []]
    except (ValueError, IndexError) as exc:
        raise UsageError(str(exc)) from None
    y = flow_word(x, steps, ctx)
    out = matrix_to_json(y)
    if args.verify:
        rev = flow_word(x, steps[::-1], ctx)
        diff = rev - y
        out["checks"] = {
            "phi_drift": 0.0 if phi(x) == phi(y) else phi(y).max_coeff_error(phi(x)),
            "commutativity_residual": 0.0 if all(v == 0 for v in diff.flat)
            else float(np.max(np.abs(diff.astype(complex)))),
        }
    return out


def cmd_xi(args, ctx):
    c = _spec(args)
    v = _choice(args)
    spectra = c.spectra(ctx)
    levels = range(1, c.n) if args.level is None else [args.level]
    out = []
    for i in levels:
        if not 1 <= i < c.n:
            raise UsageError(f"--level must lie in 1..{c.n - 1}")
        choice = None if v is None else v.levels[i - 1]
        p = xi_solve(spectra[i - 1], c.level(i + 1), choice, None, ctx,
                     target_spec=spectra[i])
        entry = {"point": p.to_json(),
                 "stabilizer": stabilizer_pattern(p, ctx).to_json()}
        if args.verify:
            entry["checks"] = {"charpoly_matches": xi_charpoly(p) == c.level(i + 1)
                               if p.exact else True}
        out.append(entry)
    return {"levels": out}


def cmd_orbit_count(args, ctx):
    fc = fiber_class(_spec(args), ctx)
    return {"count": 2 ** sum(fc.j), "j": list(fc.j), "class": fc.tag}


def cmd_orbit_reps(args, ctx):
    c = _spec(args)
    v = _choice(args)
    pairs = enumerate_orbits(c, ctx) if v is None else [(v, orbit_representative(c, v, ctx))]
    out = []
    for choice, x in pairs:
        entry = {"choice": choice.to_json(), "matrix": matrix_to_json(x)}
        if args.verify:
            entry["checks"] = {
                "strongly_regular": strong_regularity(x, ctx).strongly_regular,
                "classify_round_trip": classify(x, ctx, spec=c) == choice,
                "phi_matches": phi(x) == c if c.exact
                else phi(x).max_coeff_error(c) <= 1e-8,
            }
        out.append(entry)
    return {"count": len(out), "orbits": out}


def cmd_classify(args, ctx):
    x = _matrix(args)
    c = _spec(args, required=False)
    if c is not None and is_exact(x) != c.exact:
        c = GZSpec.from_json(c.to_json(ctx), "exact" if is_exact(x) else "float")
    return {"choice": classify(x, ctx, spec=c).to_json()}


def cmd_nilfibre(args, ctx):
    n = _need(args, "n")
    if n < 1:
        raise UsageError("--n must be positive")
    ex = args.mode != "float"
    zero = exact(0) if ex else 0j
    c = GZSpec.from_spectra([Spectrum(((zero, i),)) for i in range(1, n + 1)])
    out = []
    for v, x in enumerate_orbits(c, ctx):
        labels = v.labels
        sigma = nil_permutation(labels)
        entry = {
            "choice": list(labels),
            "pattern": sorted([list(p) for p in nil_pattern(labels)]),
            "permutation": list(sigma.one_line),
            "cycles": [list(cyc) for cyc in sigma.cycles()],
            "representative": matrix_to_json(x),
        }
        if args.verify:
            support = {(r + 1, k + 1) for r in range(n) for k in range(n) if x[r, k] != 0}
            entry["checks"] = {
                "inside_pattern": support <= nil_pattern(labels),
                "permutation_conjugates": sigma.conjugate_positions(lower_pattern(n))
                == nil_pattern(labels),
                "classify_round_trip": classify(x, ctx, spec=c) == v,
            }
        out.append(entry)
    return {"n": n, "count": len(out), "orbits": out}


COMMANDS = {
    "phi": (cmd_phi, "cutoff characteristic polynomials of a matrix"),
    "sreg": (cmd_sreg, "strong regularity report"),
    "hessenberg": (cmd_hessenberg, "Hessenberg matrix in a fibre"),
    "flow": (cmd_flow, "apply commuting flows"),
    "xi": (cmd_xi, "solution-variety points and stabilizers per level"),
    "orbit-count": (cmd_orbit_count, "number of strongly regular orbits in a fibre"),
    "orbit-reps": (cmd_orbit_reps, "one representative per orbit"),
    "classify": (cmd_classify, "orbit label of a strongly regular matrix"),
    "nilfibre": (cmd_nilfibre, "nilradical patterns and permutations of the zero fibre"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=("exact", "float"))
    common.add_argument("--eps-rank", type=float, default=1e-9)
    common.add_argument("--eps-root", type=float, default=1e-8)
    common.add_argument("--eps-eq", type=float, default=1e-9)
    common.add_argument("--in", dest="input", metavar="FILE")
    common.add_argument("--spec", metavar="FILE")
    common.add_argument("--n", type=int)
    common.add_argument("--step", action="append", metavar="i,j,re[,im]")
    common.add_argument("--choice", metavar="JSON|FILE")
    common.add_argument("--level", type=int)
    common.add_argument("--verify", action="store_true")
    parser = argparse.ArgumentParser(prog="gzorbits", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def _emit(doc, stream):
    stream.write(json.dumps(doc, indent=2) + "\n")


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        ctx = _ctx(args)
        doc = COMMANDS[args.command][0](args, ctx)
    except UsageError as exc:
        stderr.write(f"gzorbits {args.command}: {exc}\n")
        return 2
    except GZError as exc:
        _emit({"error": {"kind": exc.kind, "detail": str(exc)}}, stdout)
        return 1
    except (ValueError, IndexError, ZeroDivisionError) as exc:
        _emit({"error": {"kind": "domain", "detail": str(exc)}}, stdout)
        return 1
    _emit(doc, stdout)
    return 0


def main() -> None:
    sys.exit(run())
