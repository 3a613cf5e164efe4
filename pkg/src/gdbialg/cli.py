"""Command-line entry point.

Exit codes: 0 all checks pass, 1 a law failed (witness in the report),
2 usage or parse error.  Every command prints a human summary; ``--report
PATH`` also writes the machine report (see README for the schema).

A file argument of the form ``@name.json`` refers to a shipped fixture.
"""
from __future__ import annotations

import argparse
import contextlib
import hashlib
import io
import json
import sys

from . import __version__
from .algcore import (
    Carrier, FiniteCarrier, GDBialgebra, LawId, LawViolation, NovikovModule, Product, is_irreducible, is_simple,
    law_check,
)
from .fileio import AlgebraDocument, ParseError, document_from, dumps, parse_algebra_file, serialize, to_json
from .recipes import BUILDERS, RecipeError
from .scalars import Field, FieldError

DEFAULT_RADIUS = 2
CONFORMAL_RADIUS = 1

REEVALUATE = ("Each failing result lists its witness arguments and both evaluated sides. "
              "Re-evaluate with gdbialg.algcore.evaluate_law(law, object, args) after loading the input "
              "with gdbialg.fileio.parse_algebra_file(bytes).object(); loop and conformal witnesses are "
              "reproduced by rerunning the same command with --window-radius/--t-range/--d-depth as recorded.")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------- inputs


def _resolve(path: str) -> str:
    if path.startswith("@"):
        from .fixtures import fixture_path
        return fixture_path(path[1:])
    return path


def _load(path: str) -> tuple[AlgebraDocument, bytes]:
    real = _resolve(path)
    try:
        with open(real, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_algebra_file(data), data


def _window(obj, radius):
    """Default windows: finite carriers use every basis label; graded ones radius 2 with i <= 2."""
    carrier = _carrier_of(obj)
    if carrier is None or isinstance(carrier, FiniteCarrier):
        return None
    return carrier.default_window(DEFAULT_RADIUS if radius is None else radius)


def _carrier_of(obj) -> Carrier | None:
    if isinstance(obj, dict):
        return obj.get("carrier")
    if isinstance(obj, NovikovModule):
        return obj.carrier
    return getattr(obj, "carrier", None)


def _module_window(M: NovikovModule, radius):
    from .algcore import ModuleWindow
    if isinstance(M.carrier, FiniteCarrier) and isinstance(M.algebra.carrier, FiniteCarrier):
        return None
    r = DEFAULT_RADIUS if radius is None else radius
    return ModuleWindow(tuple(M.algebra.carrier.default_window(r)), tuple(M.carrier.default_window(r)))


def _kind(obj) -> str:
    from .conformal import ConformalStructure
    if isinstance(obj, ConformalStructure):
        return "conformal"
    if isinstance(obj, GDBialgebra):
        return "gd_bialgebra"
    if isinstance(obj, NovikovModule):
        return "module"
    if isinstance(obj, Product):
        return "algebra"
    return "structure"


DEFAULT_LAWS = {
    "gd_bialgebra": "skew,jacobi,novikov,gd_compat",
    "algebra": "novikov",
    "module": "module_novikov",
    "conformal": "conformal",
    "structure": "comm,assoc,derivation",
}


# ---------------------------------------------------------------- reports


def _digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def _report(command: list, data: bytes | None, results: list, extra: dict | None = None) -> dict:
    out = {"tool": "gdbialg", "version": __version__, "command": command,
           "passed": all(r.get("verdict") != "fail" for r in results), "results": results,
           "reevaluate": REEVALUATE}
    if data is not None:
        out["input_digest"] = _digest(data)
    if extra:
        out.update(extra)
    return out


def _emit(report: dict, args, human: list[str]) -> None:
    for line in human:
        print(line)
    path = getattr(args, "report", None)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dumps(report))


def _write_doc(doc: AlgebraDocument, path: str) -> bytes:
    data = serialize(doc)
    with open(path, "wb") as fh:
        fh.write(data)
    return data


# ---------------------------------------------------------------- commands


def _run_law(name: str, obj, args):
    from .affinize import check_loop_jacobi
    from .conformal import CONFORMAL_LAWS, ConformalStructure, check_conformal_axioms
    if name == "loop_jacobi":
        if not isinstance(obj, GDBialgebra):
            raise UsageError("loop_jacobi needs a GD bialgebra")
        return check_loop_jacobi(obj, _window(obj, args.window_radius), tuple(args.t_range))
    if name == "conformal" or name in CONFORMAL_LAWS:
        if not isinstance(obj, ConformalStructure):
            raise UsageError(f"{name} needs a conformal structure")
        laws = CONFORMAL_LAWS if name == "conformal" else (name,)
        return check_conformal_axioms(obj, _conformal_window(obj, args.window_radius), args.d_depth, laws=laws)
    try:
        law = LawId.parse(name)
    except Exception:
        raise UsageError(f"unknown law {name!r}") from None
    if isinstance(obj, NovikovModule):
        if law is not LawId.MODULE_NOVIKOV:
            raise UsageError(f"{name} does not apply to a module file")
        return law_check(law, obj, _module_window(obj, args.window_radius))
    if law is LawId.MODULE_NOVIKOV:
        raise UsageError("module_novikov needs a module file")
    return law_check(law, obj, _window(obj, args.window_radius))


def _conformal_window(S, radius):
    if isinstance(S.carrier, FiniteCarrier):
        return None
    return S.carrier.default_window(CONFORMAL_RADIUS if radius is None else radius)


def _verdict_result(name, obj) -> dict:
    if name == "simple":
        if not (isinstance(obj, Product) and isinstance(obj.carrier, FiniteCarrier)):
            raise UsageError("simple needs a finite algebra")
        v = is_simple(obj)
        ok = v.kind == "Simple"
    else:
        if not isinstance(obj, NovikovModule):
            raise UsageError("irreducible needs a module file")
        v = is_irreducible(obj)
        ok = v.kind == "Irreducible"
    out = {"law": name, "verdict": "pass" if ok else "fail", "decision": v.kind, "exact": v.exact,
           "vectors_tested": v.tested}
    if v.generator is not None:
        C = obj.carrier
        out["witness"] = {"generator": v.generator.render(C.render_label)}
    return out


def cmd_check(args) -> tuple[int, dict]:
    doc, data = _load(args.file)
    obj = doc.object()
    laws = [x.strip() for x in (args.laws or DEFAULT_LAWS[_kind(obj)]).split(",") if x.strip()]
    results, human = [], []
    for name in laws:
        if name in ("simple", "irreducible"):
            res = _verdict_result(name, obj)
            human.append(f"{name}: {res['decision']} ({'exact' if res['exact'] else 'heuristic'})")
        else:
            rep = _run_law(name, obj, args)
            res = rep.to_json()
            human.append(rep.describe())
        results.append(res)
    report = _report(_command(args), data, results, {"object": _kind(obj)})
    _emit(report, args, human)
    return (0 if report["passed"] else 1), report


def cmd_affinize(args) -> tuple[int, dict]:
    args.laws = "loop_jacobi"
    return cmd_check(args)


def _params(pairs) -> dict:
    """``key=value`` pairs; values parse as JSON when they can.  ``source``/``inputs`` name files."""
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise UsageError(f"parameter {item!r} is not key=value")
        k, v = item.split("=", 1)
        try:
            out[k] = json.loads(v)
        except json.JSONDecodeError:
            out[k] = v
    if isinstance(out.get("source"), str):
        out["source"] = to_json(_load(out["source"])[0])
    if "inputs" in out:
        names = out["inputs"] if isinstance(out["inputs"], list) else str(out["inputs"]).split(",")
        out["inputs"] = [to_json(_load(n)[0]) for n in names]
    return out


def _scalar_params(p: dict) -> dict:
    return {k: (str(v) if isinstance(v, (int, float)) and not isinstance(v, bool) else v) for k, v in p.items()}


def _finite_document(name: str, p: dict, field: Field):
    from . import constructions as c
    from .fileio import parse_document
    if name == "fp_simple_novikov":
        return document_from(c.fp_simple_novikov(int(p["p"]), int(p.get("k", 1)), int(p.get("a", 0)),
                                                 int(p.get("b", 0))), name)
    if name == "fp_irreducible_module":
        M = c.fp_irreducible_module(int(p["p"]), int(p.get("k", 1)), int(p.get("a", 0)), int(p.get("b", 0)),
                                    int(p.get("lambda", 1)))
        return document_from(M, name)
    if name == "truncated_polynomials":
        return document_from(c.truncated_polynomials(field, int(p["n"])), name)
    if name == "one_dim_idempotent":
        return document_from(c.one_dim_idempotent(field), name)
    if name == "virasoro_gd":
        return document_from(c.virasoro_gd(field), name)
    if name == "direct_sum":
        tables = [parse_document(d).object() for d in p["inputs"]]
        return document_from(c.direct_sum(*tables), name)
    if name == "gd_witt":
        return document_from(c.gd_witt(parse_document(p["source"]).object()), name)
    return None


FINITE_FACTORIES = ("direct_sum", "fp_irreducible_module", "fp_simple_novikov", "gd_witt", "one_dim_idempotent",
                    "truncated_polynomials", "virasoro_gd")
FACTORIES = tuple(sorted(set(FINITE_FACTORIES) | set(BUILDERS)))


def _construct_document(name: str, params: dict, field: Field) -> AlgebraDocument:
    if name not in FACTORIES:
        raise UsageError(f"unknown factory {name!r}; choose from {', '.join(FACTORIES)}")
    if name in ("fp_simple_novikov", "fp_irreducible_module"):
        field = Field(int(params["p"]))
    doc = _finite_document(name, params, field)
    if doc is not None:
        return doc
    from .recipes import build
    recipe = {"factory": name, "params": _scalar_params(params)}
    obj = build(recipe, field)
    try:
        return document_from(obj, name)
    except TypeError:
        return AlgebraDocument(field, recipe=recipe, name=name)


def cmd_construct(args) -> tuple[int, dict]:
    field = Field.from_tag(args.field)
    params = _params(args.params)
    doc = _construct_document(args.factory, params, field)
    data = serialize(doc)
    if args.output:
        _write_doc(doc, args.output)
        human = [f"wrote {args.output} ({len(data)} bytes, {_digest(data)})"]
    else:
        human = [data.decode("utf-8").rstrip("\n")]
    report = _report(_command(args), None, [], {"output_digest": _digest(data), "document": to_json(doc)})
    _emit(report, args, human)
    return 0, report


def cmd_conformal(args) -> tuple[int, dict]:
    from .conformal import ClosureViolation, ConformalStructure, degree_of
    action = args.action
    if action == "verify":
        args.laws = "conformal"
        return cmd_check(args)
    if action == "degree":
        doc, data = _load(args.file)
        S = doc.object()
        if not isinstance(S, ConformalStructure):
            raise UsageError("degree needs a conformal structure")
        d = degree_of(S, _conformal_window(S, args.window_radius) or S.carrier.default_window())
        report = _report(_command(args), data, [], {"degree": d})
        _emit(report, args, [f"degree: {d}"])
        return 0, report
    if action == "from-gd":
        doc, data = _load(args.file)
        gdb = doc.object()
        if not isinstance(gdb, GDBialgebra):
            raise UsageError("from-gd needs a GD bialgebra file")
        params = {"source": to_json(doc)}
        if args.window_radius is not None:
            params["window_radius"] = args.window_radius
        out = _construct_document("from_gd", params, doc.field)
        blob = serialize(out)
        human = [f"from_gd({gdb.name}) built"]
        if args.output:
            _write_doc(out, args.output)
            human.append(f"wrote {args.output}")
        else:
            human.append(blob.decode("utf-8").rstrip("\n"))
        report = _report(_command(args), data, [], {"output_digest": _digest(blob)})
        _emit(report, args, human)
        return 0, report
    # build-r1 / build-r2
    params = _params(args.params)
    name = "build_r1" if action == "build-r1" else "build_r2"
    field = Field.from_tag(args.field)
    try:
        doc = _construct_document(name, params, field)
        S = doc.object()
    except ClosureViolation as exc:
        res = {"law": "closure", "verdict": "fail", "witness": {"detail": str(exc)}}
        report = _report(_command(args), None, [res])
        _emit(report, args, [f"closure: FAIL ({exc})"])
        return 1, report
    W = S.carrier.default_window(DEFAULT_RADIUS if args.window_radius is None else args.window_radius)
    d = degree_of(S, W)
    blob = serialize(doc)
    res = {"law": "closure", "verdict": "pass", "pairs_checked": S.meta.get("closure_pairs")}
    human = [f"{S.name}: closure pass ({res['pairs_checked']} pairs), degree {d}"]
    if args.output:
        _write_doc(doc, args.output)
        human.append(f"wrote {args.output}")
    report = _report(_command(args), None, [res], {"degree": d, "output_digest": _digest(blob)})
    _emit(report, args, human)
    return 0, report


def cmd_suite(args) -> tuple[int, dict]:
    from .suite import run_suite
    only = {int(x) for x in args.only.split(",")} if args.only else None
    res = run_suite(only, emit=print)
    report = {"tool": "gdbialg", "version": __version__, **res}
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(dumps(report))
    print("suite:", "PASS" if res["passed"] else "FAIL")
    return (0 if res["passed"] else 1), report


# ---------------------------------------------------------------- parser


def _command(args) -> list:
    return list(getattr(args, "_argv", []))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gdbialg", description="Exact checks for Novikov algebras, GD bialgebras and conformal algebras.")
    p.add_argument("--version", action="version", version=f"gdbialg {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def window_flags(sp, t=False, d=False):
        sp.add_argument("--window-radius", type=int, default=None,
                        help="radius of graded windows (default 2; conformal checks default 1)")
        if t:
            sp.add_argument("--t-range", type=int, nargs=2, default=[-3, 3], metavar=("A", "B"))
        if d:
            sp.add_argument("--d-depth", type=int, default=2)
        sp.add_argument("--report", help="write the machine-readable report here")

    c = sub.add_parser("check", help="check laws on an algebra file")
    c.add_argument("file")
    c.add_argument("--laws", help="comma list: law names, loop_jacobi, conformal, simple, irreducible")
    window_flags(c, t=True, d=True)
    c.set_defaults(func=cmd_check)

    a = sub.add_parser("affinize", help="loop Jacobi check of a GD bialgebra")
    a.add_argument("file")
    window_flags(a, t=True, d=True)
    a.set_defaults(func=cmd_affinize)

    k = sub.add_parser("construct", help="build an object and write its document")
    k.add_argument("factory", help=", ".join(FACTORIES))
    k.add_argument("--params", nargs="*", default=[], metavar="KEY=VALUE")
    k.add_argument("--field", default="Q")
    k.add_argument("-o", "--output")
    k.add_argument("--report")
    k.set_defaults(func=cmd_construct)

    cf = sub.add_parser("conformal", help="conformal structures")
    csub = cf.add_subparsers(dest="action", parser_class=_Parser)
    for act in ("from-gd", "verify", "degree"):
        sp = csub.add_parser(act)
        sp.add_argument("file")
        window_flags(sp, d=True)
        if act == "from-gd":
            sp.add_argument("-o", "--output")
        sp.set_defaults(func=cmd_conformal, laws=None, t_range=[-3, 3])
    for act in ("build-r1", "build-r2"):
        sp = csub.add_parser(act)
        sp.add_argument("--params", nargs="*", default=[], metavar="KEY=VALUE")
        sp.add_argument("--field", default="Q")
        sp.add_argument("-o", "--output")
        window_flags(sp)
        sp.set_defaults(func=cmd_conformal)

    s = sub.add_parser("suite", help="acceptance suite")
    ssub = s.add_subparsers(dest="action", parser_class=_Parser)
    run = ssub.add_parser("run")
    run.add_argument("--only", help="comma list of criterion numbers")
    run.add_argument("--report")
    run.set_defaults(func=cmd_suite)
    return p


def _dispatch(argv) -> tuple[int, dict | None]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "func", None) is None:
            raise UsageError("missing subcommand")
        args._argv = list(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"gdbialg: usage error: {exc}", file=sys.stderr)
        return 2, None
    except (ParseError, FieldError, RecipeError) as exc:
        print(f"gdbialg: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2, None
    except LawViolation as exc:
        rep = exc.report
        print(f"gdbialg: precondition failed: {rep.describe()}", file=sys.stderr)
        return 1, {"tool": "gdbialg", "version": __version__, "passed": False, "results": [rep.to_json()]}
    except (ValueError, KeyError, TypeError) as exc:
        print(f"gdbialg: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2, None


def run_command(argv) -> int:
    """Run one command; returns the exit code."""
    return _dispatch(list(argv))[0]


def run_captured(argv) -> tuple[int, dict | None]:
    """Run with stdout/stderr captured; returns ``(exit code, report)``."""
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(buf):
        return _dispatch(list(argv))


def main(argv=None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
