"""Command-line front end for assignments stored as JSON files.

    superpoint validate|decompose|spectral|eval|verify|hull INPUT [options]

Exit codes: 0 success, 1 validation failure, 2 input error, 3 internal error.
"""
from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from fractions import Fraction

import jsonschema

from . import __version__
from .azumaya_map import AssignmentEta, MapHandle, check_admissibility_axioms, validate, verify_homomorphism
from .coefficients import EXACT, NUMERIC, format_coefficient, real_part, to_exact
from .errors import (
    ConditionViolation,
    ExpressionError,
    InternalConsistencyError,
    NeedsHintError,
    NotInvertibleError,
    ParityError,
    PreconditionError,
    StructuralError,
    SuperpointError,
)
from .grassmann import ANTICOMMUTE, COMMUTE, GrassmannElement, Signature
from .smoothfn import SmoothFunction, SuperFunction
from .spectral import DEFAULT_TOL, USER, EigenData
from .supermatrix import SuperMatrix

COMMANDS = ("validate", "decompose", "spectral", "eval", "verify", "hull")
BACKEND_ENV = "SUPERPOINT_BACKEND"

EXIT_OK, EXIT_VALIDATION, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3

_scalar = {"oneOf": [{"type": "string"}, {"type": "number"}]}
_term = {
    "type": "object",
    "required": ["subset"],
    "properties": {
        "subset": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "re": _scalar,
        "im": _scalar,
    },
    "additionalProperties": False,
}
_entry = {"oneOf": [_scalar, {"type": "array", "items": _term}]}
_matrix = {"type": "array", "items": {"type": "array", "items": _entry}}
_super_function = {
    "type": "object",
    "required": ["components"],
    "properties": {
        "components": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["coefficient_expr"],
                "properties": {
                    "odd_monomial": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                    "coefficient_expr": {"type": "string"},
                },
                "additionalProperties": False,
            },
        }
    },
    "additionalProperties": False,
}

SCHEMA = {
    "type": "object",
    "required": ["n", "s1", "r", "matrices"],
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "s1": {"type": "integer", "minimum": 0, "maximum": 63},
        "s2": {"type": "integer", "minimum": 0},
        "r": {"type": "integer", "minimum": 1},
        "backend": {"enum": [EXACT, NUMERIC]},
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "matrices": {
            "type": "object",
            "required": ["y"],
            "properties": {"y": {"type": "array", "items": _matrix}, "theta": {"type": "array", "items": _matrix}},
            "additionalProperties": False,
        },
        "eigen_hints": {
            "type": "array",
            "items": {
                "oneOf": [
                    {"type": "null"},
                    {
                        "type": "object",
                        "required": ["eigenvalues", "multiplicities"],
                        "properties": {
                            "eigenvalues": {"type": "array", "items": _scalar},
                            "multiplicities": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                        },
                        "additionalProperties": False,
                    },
                ]
            },
        },
        "functions": {"type": "array", "items": {"oneOf": [{"type": "string"}, _super_function]}},
        "samples": {"type": "array", "items": {"type": "string"}},
        "composers": {"type": "array", "items": {"type": "string"}},
    },
    "additionalProperties": False,
}


class InputError(SuperpointError):
    """Malformed input file; the message names the position or field."""


# -- decoding ----------------------------------------------------------------------


def _path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def load_input(text: str, source: str = "<input>") -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    errors = sorted(jsonschema.Draft7Validator(SCHEMA).iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise InputError(f"{source}: schema violation at {_path(err.absolute_path)}: {err.message}")
    return data


def _scalar_value(v, backend: str):
    if isinstance(v, str):
        try:
            v = Fraction(v.strip())
        except (ValueError, ZeroDivisionError):
            raise InputError(f"not a rational literal: {v!r}") from None
    if backend == EXACT:
        return to_exact(v)
    return complex(v)


def _decode_entry(e, sig: Signature, backend: str) -> GrassmannElement:
    if isinstance(e, list):
        terms = [
            {"subset": t["subset"], "re": _encode_part(t.get("re", 0)), "im": _encode_part(t.get("im", 0))}
            for t in e
        ]
        g = GrassmannElement.from_json(terms, sig, backend)
        return g
    return GrassmannElement(sig, {0: _scalar_value(e, backend)}, backend)


def _encode_part(v):
    # integers and "p/q" strings are exact; floats stay floats
    if isinstance(v, str):
        return str(Fraction(v.strip()))
    return v


def _decode_matrix(rows, r: int, sig: Signature, backend: str, where: str) -> SuperMatrix:
    if len(rows) != r or any(len(row) != r for row in rows):
        raise InputError(f"{where}: expected a {r}x{r} matrix")
    try:
        return SuperMatrix([[_decode_entry(e, sig, backend) for e in row] for row in rows])
    except (StructuralError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{where}: {exc}") from None


def _decode_hint(h, backend: str):
    if h is None:
        return None
    ev = tuple(_scalar_value(x, backend) for x in h["eigenvalues"])
    return EigenData(ev, tuple(h["multiplicities"]), USER)


def resolve_backend(flag: str | None, data: dict) -> str:
    """Flag, then file, then environment, then exact."""
    if flag:
        return flag
    if "backend" in data:
        return data["backend"]
    env = os.environ.get(BACKEND_ENV)
    if env:
        if env not in (EXACT, NUMERIC):
            raise InputError(f"{BACKEND_ENV} must be 'exact' or 'numeric', not {env!r}")
        return env
    return EXACT


def build_eta(data: dict, backend: str, tol: float, merge: str) -> AssignmentEta:
    n, s1, r = data["n"], data["s1"], data["r"]
    ys = data["matrices"]["y"]
    thetas = data["matrices"].get("theta", [])
    s2 = data.get("s2", len(thetas))
    if len(ys) != n:
        raise InputError(f"$.matrices.y: expected {n} matrices, got {len(ys)}")
    if len(thetas) != s2:
        raise InputError(f"$.matrices.theta: expected {s2} matrices, got {len(thetas)}")
    sig = Signature(s1, convention=merge)
    my = tuple(_decode_matrix(m, r, sig, backend, f"$.matrices.y[{k}]") for k, m in enumerate(ys))
    mt = tuple(_decode_matrix(m, r, sig, backend, f"$.matrices.theta[{k}]") for k, m in enumerate(thetas))
    hints = data.get("eigen_hints")
    if hints is not None and len(hints) != n:
        raise InputError(f"$.eigen_hints: expected {n} entries, got {len(hints)}")
    try:
        decoded = tuple(_decode_hint(h, backend) for h in hints) if hints else ()
    except PreconditionError as exc:
        raise InputError(f"$.eigen_hints: {exc}") from None
    return AssignmentEta(my, mt, decoded, tol)


def decode_functions(data: dict, n: int, s2: int) -> list:
    out = []
    for k, f in enumerate(data.get("functions", [])):
        try:
            if isinstance(f, str):
                out.append((f, SuperFunction.even(SmoothFunction.parse(f, n), s2)))
            else:
                sf = SuperFunction.from_json(f, n, s2)
                out.append((_function_text(sf), sf))
        except (ExpressionError, StructuralError) as exc:
            raise InputError(f"$.functions[{k}]: {exc}") from None
    return out


def _function_text(sf: SuperFunction) -> str:
    parts = []
    for mask, f in sf.sorted_components():
        mono = "".join(f"ϑ{l}" for l in range(1, sf.s2 + 1) if mask >> (l - 1) & 1)
        parts.append(f"({f.text})" + (f"·{mono}" if mono else ""))
    return " + ".join(parts) if parts else "0"


def _parse_list(texts, n: int, where: str) -> list:
    out = []
    for k, t in enumerate(texts):
        try:
            out.append(SmoothFunction.parse(t, n))
        except (ExpressionError, StructuralError) as exc:
            raise InputError(f"{where}[{k}]: {exc}") from None
    return out


# -- reports -------------------------------------------------------------------------


def _eigen_json(e: EigenData) -> dict:
    return e.to_json()


def _label(q) -> list:
    return [format_coefficient(x) if not isinstance(x, complex) else real_part(x) for x in q]


def cmd_validate(eta: AssignmentEta, data: dict) -> tuple:
    rep = validate(eta)
    return rep.to_json(), str(rep), EXIT_OK if rep.passed else EXIT_VALIDATION


def cmd_decompose(handle: MapHandle, data: dict) -> tuple:
    dec = handle.decomposition
    sy = handle.system
    blocks = []
    for j, (q, e) in enumerate(sy):
        blocks.append(
            {
                "point": _label(q),
                "rank": sy.ranks[j],
                "nilpotency": list(handle.nilpotency[j]),
                "idempotent": e.to_json(),
                "restrictions": [dec.blocks[i][j].to_json() for i in range(handle.eta.n)],
            }
        )
    report = {
        "eigen": [_eigen_json(e) for e in handle.eigen],
        "blocks": blocks,
        "offsets": list(dec.offsets),
        "basis": dec.basis.to_json(),
        "basis_inverse": dec.basis_inverse.to_json(),
    }
    lines = []
    for b, (q, e) in zip(blocks, sy):
        lines.append(f"block q=({', '.join(map(str, b['point']))}): rank {b['rank']}, ν={b['nilpotency']}")
        lines.append("idempotent:")
        lines.append(str(e))
    lines.append("basis B:")
    lines.append(str(dec.basis))
    for i in range(handle.eta.n):
        lines.append(f"B^-1 y{i + 1} B:")
        lines.append(str(dec.conjugated(handle.eta.ys[i])))
    return report, "\n".join(lines), EXIT_OK


def cmd_spectral(handle: MapHandle, data: dict) -> tuple:
    rep = handle.spectral_locus()
    js = rep.to_json()
    text = "\n".join(
        [
            rep.summary(),
            f"rank sum: {js['rank_sum']}",
            f"truncation degrees: {js['truncation_degree']}",
            f"nilpotency within r_j(s1+1): {js['within_charpoly_bound']}",
            f"nilpotency within (r-1)(s1+1): {js['within_caption_bound']}",
        ]
    )
    return js, text, EXIT_OK


def cmd_eval(handle: MapHandle, data: dict) -> tuple:
    eta = handle.eta
    funcs = decode_functions(data, eta.n, eta.s2)
    if not funcs:
        raise InputError("$.functions: eval needs at least one function")
    results, lines = [], []
    for text, sf in funcs:
        m = handle.apply(sf)
        results.append({"function": text, "backend": m.backend, "image": m.to_json()})
        lines.append(f"φ({text}) =")
        lines.append(str(m))
    return {"results": results}, "\n".join(lines), EXIT_OK


def cmd_verify(handle: MapHandle, data: dict) -> tuple:
    eta = handle.eta
    funcs = decode_functions(data, eta.n, eta.s2)
    gens = [SuperFunction.coordinate(eta.n, eta.s2, i) for i in range(1, eta.n + 1)]
    gens += [SuperFunction.odd_coordinate(eta.n, eta.s2, l) for l in range(1, eta.s2 + 1)]
    targets = list(eta.ys) + list(eta.thetas)
    fidelity = all(handle.apply(g) == t for g, t in zip(gens, targets))
    pool = [sf for _, sf in funcs] or gens
    pairs = list(itertools.product(pool, repeat=2))
    hom = verify_homomorphism(handle, pairs)
    report = {
        "generator_fidelity": fidelity,
        "pairs": len(pairs),
        "homomorphism": {k: hom[k] for k in ("passed", "max_multiplicative", "max_additive")},
        "passed": fidelity and hom["passed"],
    }
    text = "\n".join(
        [
            f"generator fidelity: {'pass' if fidelity else 'FAIL'}",
            f"pairs checked: {len(pairs)}",
            f"max multiplicative residual: {hom['max_multiplicative']:.3e}",
            f"max additive residual: {hom['max_additive']:.3e}",
            f"homomorphism: {'pass' if hom['passed'] else 'FAIL'}",
        ]
    )
    return report, text, EXIT_OK if report["passed"] else EXIT_VALIDATION


def cmd_hull(eta: AssignmentEta, data: dict) -> tuple:
    samples = _parse_list(data.get("samples", []), eta.n, "$.samples")
    if not samples:
        raise InputError("$.samples: hull needs at least one sample function")
    composers = None
    if "composers" in data:
        composers = _parse_list(data["composers"], len(samples), "$.composers")
    try:
        rep = check_admissibility_axioms(eta.ys, samples, composers, eta.tol)
    except PreconditionError as exc:
        raise ConditionViolation(str(exc)) from None
    names = ("commutes_with_set", "mutually_commute", "composition", "projection")
    text = "\n".join(
        f"axiom ({k + 1}) {name}: {'pass' if rep[name]['passed'] else 'FAIL'} "
        f"(residual {rep[name]['residual']:.3e}, {rep[name]['checked']} checks)"
        for k, name in enumerate(names)
    )
    return rep, text, EXIT_OK if rep["passed"] else EXIT_VALIDATION


# -- driver ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="superpoint", description="Maps from superpoints to matrix superpoints.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("input", help="assignment JSON file, or - for stdin")
        sp.add_argument("--backend", choices=[EXACT, NUMERIC], default=None)
        sp.add_argument("--tol", type=float, default=None, help=f"numeric tolerance (default {DEFAULT_TOL})")
        sp.add_argument("--merge", choices=[ANTICOMMUTE, COMMUTE], default=ANTICOMMUTE)
        sp.add_argument("--format", choices=["text", "json"], default="text")
        sp.add_argument("--out", default=None, help="write the report here instead of stdout")
    return p


def _header(args, backend: str, tol: float) -> dict:
    return {
        "tool": "superpoint",
        "version": __version__,
        "command": args.command,
        "backend": backend,
        "tol": tol,
        "tol_applies": backend == NUMERIC,
        "merge": args.merge,
    }


def run(argv=None, stdin=None) -> tuple:
    """Execute one command; returns ``(exit_code, output_text, error_text)``."""
    args = build_parser().parse_args(argv)
    try:
        if args.input == "-":
            text, source = (stdin or sys.stdin).read(), "<stdin>"
        else:
            with open(args.input, encoding="utf-8") as fh:
                text, source = fh.read(), args.input
    except OSError as exc:
        return EXIT_INPUT, "", f"error: cannot read {args.input}: {exc.strerror}"

    try:
        data = load_input(text, source)
        backend = resolve_backend(args.backend, data)
        tol = args.tol if args.tol is not None else data.get("tol", DEFAULT_TOL)
        if tol <= 0:
            raise InputError("--tol must be positive")
        eta = build_eta(data, backend, tol, args.merge)
        if args.command == "validate":
            report, body, code = cmd_validate(eta, data)
        elif args.command == "hull":
            report, body, code = cmd_hull(eta, data)
        else:
            handle = MapHandle(eta)
            report, body, code = {
                "decompose": cmd_decompose,
                "spectral": cmd_spectral,
                "eval": cmd_eval,
                "verify": cmd_verify,
            }[args.command](handle, data)
    except ConditionViolation as exc:
        return EXIT_VALIDATION, "", f"validation failed: {exc}"
    except (InputError, StructuralError, ParityError, PreconditionError, NeedsHintError, ExpressionError) as exc:
        return EXIT_INPUT, "", f"input error: {exc}"
    except (InternalConsistencyError, NotInvertibleError) as exc:
        return EXIT_INTERNAL, "", f"internal error: {exc}"
    except SuperpointError as exc:
        return EXIT_INPUT, "", f"error: {exc}"
    except Exception as exc:  # noqa: BLE001 - reported as an internal failure
        return EXIT_INTERNAL, "", f"internal error: {type(exc).__name__}: {exc}"

    header = _header(args, backend, tol)
    if args.format == "json":
        out = json.dumps({"header": header, "report": report}, indent=2, ensure_ascii=False) + "\n"
    else:
        head = " ".join(f"{k}={v}" for k, v in header.items())
        out = f"# {head}\n{body}\n"
    return code, out, ""


def main(argv=None) -> int:
    parsed = build_parser().parse_args(argv)
    code, out, err = run(argv)
    if out:
        if parsed.out:
            with open(parsed.out, "w", encoding="utf-8") as fh:
                fh.write(out)
        else:
            sys.stdout.write(out)
    if err:
        print(err, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
