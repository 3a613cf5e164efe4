"""Canonical JSON documents for algebras, bialgebras, modules and conformal structures.

Finite objects are stored as sparse tables over named basis vectors::

    {"format": "gdbialg/1", "field": "F3", "basis": ["s-1", "s0", "s1"],
     "products": {"circ": [[i, j, [[k, "coeff"], ...]], ...]}}

Rule-based objects are stored as a recipe (factory name plus parameters) and
rebuilt on load.  ``serialize(parse(x))`` is the canonical form of ``x``:
sorted keys, sorted entries, coefficients in lowest terms.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .algcore import Element, FiniteCarrier, GDBialgebra, NovikovModule, Product, Table
from .scalars import Field, FieldError, ScalarParseError

FORMAT = "gdbialg/1"
PRODUCT_NAMES = ("bracket", "circ", "dot")


class ParseError(ValueError):
    def __init__(self, where: str, reason: str):
        super().__init__(f"{where}: {reason}")
        self.where = where
        self.reason = reason


@dataclass
class AlgebraDocument:
    """Parsed document; ``object()`` gives the law-checking context."""

    field: Field
    basis: list = dc_field(default_factory=list)
    products: dict = dc_field(default_factory=dict)       # name -> {(i, j): {k: raw}}
    module: dict | None = None                             # basis, left, right
    conformal: dict | None = None                          # {(u, v): {(i, j): {k: raw}}}
    recipe: dict | None = None
    name: str = ""
    _obj: object = dc_field(default=None, repr=False)

    # ------------------------------------------------------------ objects

    def carrier(self) -> FiniteCarrier:
        return FiniteCarrier(range(len(self.basis)), self.basis, self.name or "file")

    def _table(self, carrier, entries, name):
        return Table(self.field, carrier, {k: Element(self.field, v) for k, v in entries.items()}, name)

    def object(self):
        if self._obj is not None:
            return self._obj
        if self.recipe is not None:
            from .recipes import build
            self._obj = build(self.recipe, self.field)
            return self._obj
        if self.conformal is not None:
            from .conformal import ConformalStructure
            C = self.carrier()
            data = {k: {ij: Element(self.field, t) for ij, t in v.items()} for k, v in self.conformal.items()}
            self._obj = ConformalStructure(self.field, C, lambda u, v: data.get((u, v), {}), self.name or "Y")
            return self._obj
        C = self.carrier()
        tabs = {n: self._table(C, e, n) for n, e in self.products.items()}
        if self.module is not None:
            MC = FiniteCarrier(range(len(self.module["basis"])), self.module["basis"], "module")
            left = _ActionTable(self.field, C, MC, self.module["left"], "left")
            right = _ActionTable(self.field, MC, C, self.module["right"], "right")
            alg = tabs.get("circ")
            if alg is None:
                raise ParseError("products", "a module file needs the algebra product 'circ'")
            self._obj = NovikovModule(alg, MC, left, right, self.name or "module")
        elif "bracket" in tabs and "circ" in tabs:
            self._obj = GDBialgebra(C, tabs["bracket"], tabs["circ"], self.name or "file")
        elif len(tabs) == 1:
            self._obj = next(iter(tabs.values()))
        else:
            self._obj = {"carrier": C, **tabs}
        return self._obj


class _ActionTable(Product):
    """Finite action table; ``carrier`` is the module carrier (results live there)."""

    def __init__(self, field, first: FiniteCarrier, second: FiniteCarrier, entries, name):
        module_carrier = second if name == "left" else first
        super().__init__(field, module_carrier, name)
        self.entries = {k: Element(field, v) for k, v in entries.items()}

    def _basis(self, a, b):
        e = self.entries.get((a, b))
        return dict(e.terms) if e is not None else {}


# ---------------------------------------------------------------- parsing


def _coeff(field: Field, text, where: str):
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise ParseError(where, f"coefficient must be a string, got {text!r}")
    try:
        return field.coerce(str(text))
    except (ScalarParseError, ZeroDivisionError, ValueError) as exc:
        raise ParseError(where, str(exc)) from None


def _index(x, n, where):
    if isinstance(x, bool) or not isinstance(x, int) or not 0 <= x < n:
        raise ParseError(where, f"index {x!r} out of range 0..{n - 1}")
    return x


def _terms(field, raw, n, where) -> dict:
    if not isinstance(raw, list):
        raise ParseError(where, "expected a list of [index, coefficient] pairs")
    acc: dict = {}
    for q, pair in enumerate(raw):
        w = f"{where}[{q}]"
        if not (isinstance(pair, list) and len(pair) == 2):
            raise ParseError(w, "expected [index, coefficient]")
        k = _index(pair[0], n, w)
        c = _coeff(field, pair[1], w)
        acc[k] = field.normalize(field.add(acc.get(k, 0), c))
    return {k: v for k, v in acc.items() if v != 0}


def _entries(field, raw, n_left, n_right, n_out, where) -> dict:
    if not isinstance(raw, list):
        raise ParseError(where, "expected a list of [i, j, terms] entries")
    out: dict = {}
    for q, ent in enumerate(raw):
        w = f"{where}[{q}]"
        if not (isinstance(ent, list) and len(ent) == 3):
            raise ParseError(w, "expected [i, j, [[k, coeff], ...]]")
        i = _index(ent[0], n_left, w)
        j = _index(ent[1], n_right, w)
        if (i, j) in out:
            raise ParseError(w, f"duplicate entry ({i}, {j})")
        t = _terms(field, ent[2], n_out, w)
        if t:
            out[(i, j)] = t
    return out


def _names(raw, where) -> list:
    if not isinstance(raw, list) or not all(isinstance(x, str) for x in raw):
        raise ParseError(where, "expected a list of basis names")
    if len(set(raw)) != len(raw):
        raise ParseError(where, "duplicate basis names")
    return list(raw)


def parse_document(data) -> AlgebraDocument:
    if not isinstance(data, dict):
        raise ParseError("$", "top level must be an object")
    fmt = data.get("format", FORMAT)
    if fmt != FORMAT:
        raise ParseError("format", f"unsupported format {fmt!r}")
    if "field" not in data:
        raise ParseError("field", "missing field")
    field = Field.from_tag(data["field"])  # FieldError propagates
    allowed = {"format", "field", "basis", "products", "module", "conformal", "recipe", "name"}
    extra = set(data) - allowed
    if extra:
        raise ParseError("$", f"unknown keys {sorted(extra)}")
    doc = AlgebraDocument(field, name=str(data.get("name", "")))
    if "recipe" in data:
        r = data["recipe"]
        if not (isinstance(r, dict) and isinstance(r.get("factory"), str) and isinstance(r.get("params", {}), dict)):
            raise ParseError("recipe", "expected {factory, params}")
        if set(data) - {"format", "field", "recipe", "name"}:
            raise ParseError("$", "a recipe document holds no tables")
        doc.recipe = {"factory": r["factory"], "params": r.get("params", {})}
        from .recipes import validate
        try:
            validate(doc.recipe, field)
        except (ParseError, FieldError):
            raise
        except Exception as exc:
            raise ParseError("recipe", f"{type(exc).__name__}: {exc}") from None
        return doc
    doc.basis = _names(data.get("basis"), "basis")
    n = len(doc.basis)
    prods = data.get("products", {})
    if not isinstance(prods, dict):
        raise ParseError("products", "expected an object")
    for name, raw in prods.items():
        if name not in PRODUCT_NAMES:
            raise ParseError(f"products.{name}", f"unknown product name (use {', '.join(PRODUCT_NAMES)})")
        doc.products[name] = _entries(field, raw, n, n, n, f"products.{name}")
    if "module" in data:
        m = data["module"]
        if not isinstance(m, dict) or set(m) - {"basis", "left", "right"}:
            raise ParseError("module", "expected {basis, left, right}")
        mb = _names(m.get("basis"), "module.basis")
        nm = len(mb)
        doc.module = {"basis": mb,
                      "left": _entries(field, m.get("left", []), n, nm, nm, "module.left"),
                      "right": _entries(field, m.get("right", []), nm, n, nm, "module.right")}
    if "conformal" in data:
        raw = data["conformal"]
        if not isinstance(raw, list):
            raise ParseError("conformal", "expected a list of [u, v, i, j, terms]")
        conf: dict = {}
        for q, ent in enumerate(raw):
            w = f"conformal[{q}]"
            if not (isinstance(ent, list) and len(ent) == 5):
                raise ParseError(w, "expected [u, v, i, j, [[k, coeff], ...]]")
            u, v = _index(ent[0], n, w), _index(ent[1], n, w)
            i, j = ent[2], ent[3]
            if not (isinstance(i, int) and i >= 0 and isinstance(j, int) and j >= 1):
                raise ParseError(w, "need i >= 0 and j >= 1")
            t = _terms(field, ent[4], n, w)
            if (i, j) in conf.get((u, v), {}):
                raise ParseError(w, "duplicate coefficient")
            if t:
                conf.setdefault((u, v), {})[(i, j)] = t
        doc.conformal = conf
    if not doc.products and doc.conformal is None:
        raise ParseError("products", "no products given")
    return doc


def parse_algebra_file(data: bytes | str) -> AlgebraDocument:
    """Parse bytes or text; raises ParseError (with position) or FieldError."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"byte {exc.start}", "not UTF-8") from None
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    return parse_document(obj)


# ---------------------------------------------------------------- serializing


def _render_terms(field, terms: dict) -> list:
    return [[k, field.render(terms[k])] for k in sorted(terms)]


def _render_entries(field, entries: dict) -> list:
    return [[i, j, _render_terms(field, entries[(i, j)])] for (i, j) in sorted(entries)]


def to_json(doc: AlgebraDocument) -> dict:
    f = doc.field
    out: dict = {"format": FORMAT, "field": f.tag}
    if doc.name:
        out["name"] = doc.name
    if doc.recipe is not None:
        out["recipe"] = {"factory": doc.recipe["factory"], "params": doc.recipe.get("params", {})}
        return out
    out["basis"] = list(doc.basis)
    if doc.products:
        out["products"] = {n: _render_entries(f, e) for n, e in sorted(doc.products.items())}
    if doc.module is not None:
        out["module"] = {"basis": list(doc.module["basis"]),
                         "left": _render_entries(f, doc.module["left"]),
                         "right": _render_entries(f, doc.module["right"])}
    if doc.conformal is not None:
        out["conformal"] = [[u, v, i, j, _render_terms(f, doc.conformal[(u, v)][(i, j)])]
                            for (u, v) in sorted(doc.conformal) for (i, j) in sorted(doc.conformal[(u, v)])]
    return out


def _depth(x) -> int:
    if isinstance(x, list):
        return 1 + max((_depth(y) for y in x), default=0)
    if isinstance(x, dict):
        return 99
    return 0


def _dump(x, ind: int) -> str:
    pad = " " * ind
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = [f'{pad} {json.dumps(k, ensure_ascii=False)}: {_dump(x[k], ind + 1)}' for k in sorted(x)]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(x, list) and _depth(x) > 3:
        return "[\n" + ",\n".join(pad + " " + _dump(y, ind + 1) for y in x) + "\n" + pad + "]"
    return json.dumps(x, sort_keys=True, ensure_ascii=False, separators=(", ", ": "))


def dumps(obj) -> str:
    """Canonical text: sorted keys, shallow lists inline, one table entry per line."""
    return _dump(obj, 0) + "\n"


def serialize(doc: AlgebraDocument) -> bytes:
    return dumps(to_json(doc)).encode("utf-8")


def canonicalize(data: bytes | str) -> bytes:
    return serialize(parse_algebra_file(data))


# ---------------------------------------------------------------- from objects


def _positions(carrier):
    return {a: q for q, a in enumerate(carrier.order)}


def _table_entries(prod: Product, carrier, out_pos=None, left=None, right=None) -> dict:
    left = left or carrier
    right = right or carrier
    lp, rp = _positions(left), _positions(right)
    op = out_pos or _positions(carrier)
    out = {}
    for a in left.order:
        for b in right.order:
            r = prod.basis_product(a, b)
            if r:
                out[(lp[a], rp[b])] = {op[k]: v for k, v in r.items()}
    return out


def _names_of(carrier) -> list:
    return [carrier.render_label(a) for a in carrier.order]


def document_from(obj, name: str = "") -> AlgebraDocument:
    """Table-form document for a finite object (Table, GDBialgebra, NovikovModule, finite ConformalStructure)."""
    from .conformal import ConformalStructure
    if isinstance(obj, Table):
        C = obj.carrier
        return AlgebraDocument(obj.field, _names_of(C), {"circ": _table_entries(obj, C)}, name=name)
    if isinstance(obj, GDBialgebra):
        C = obj.carrier
        if not isinstance(C, FiniteCarrier):
            raise TypeError("only finite bialgebras have a table form")
        return AlgebraDocument(obj.field, _names_of(C),
                               {"bracket": _table_entries(obj.bracket, C), "circ": _table_entries(obj.circ, C)},
                               name=name)
    if isinstance(obj, NovikovModule):
        A, M = obj.algebra.carrier, obj.carrier
        mpos = _positions(M)
        doc = AlgebraDocument(obj.field, _names_of(A), {"circ": _table_entries(obj.algebra, A)}, name=name)
        doc.module = {"basis": _names_of(M),
                      "left": _table_entries(obj.left, M, mpos, A, M),
                      "right": _table_entries(obj.right, M, mpos, M, A)}
        return doc
    if isinstance(obj, ConformalStructure):
        C = obj.carrier
        if not isinstance(C, FiniteCarrier):
            raise TypeError("only finite conformal structures have a table form")
        pos = _positions(C)
        conf = {}
        for a in C.order:
            for b in C.order:
                w = obj.w(a, b)
                if w:
                    conf[(pos[a], pos[b])] = {ij: {pos[k]: v for k, v in e.terms.items()} for ij, e in w.items()}
        return AlgebraDocument(obj.field, _names_of(C), conformal=conf, name=name)
    raise TypeError(f"no table form for {type(obj).__name__}")


def recipe_document(field: Field, factory: str, params: dict, name: str = "") -> AlgebraDocument:
    doc = AlgebraDocument(field, recipe={"factory": factory, "params": params}, name=name)
    from .recipes import validate
    validate(doc.recipe, field)
    return doc


def scalar_text(field: Field, x) -> str:
    if isinstance(x, Fraction) or isinstance(x, int):
        return field.render(field.coerce(x))
    return field.render(field.coerce(str(x)))
