"""Elements, products, the law-checking engine and exact linear algebra.

Basis labels are hashable, mutually comparable Python values chosen by each
carrier (ints for finite tables, ``(alpha, i)`` tuples for graded algebras).
Elements store raw field values (see :mod:`gdbialg.scalars`).
"""
from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass, field as dc_field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels
from .scalars import Field, FieldMismatch, Scalar


class CarrierMismatch(ValueError):
    pass


class UnknownLaw(KeyError):
    pass


class InfiniteCarrier(ValueError):
    pass


class ZeroDimension(ValueError):
    pass


class LawViolation(ValueError):
    """A factory precondition failed; carries the failing report."""

    def __init__(self, report: "CheckReport"):
        super().__init__(report.describe())
        self.report = report


# ------------------------------------------------------------------ elements


def _raw(field: Field, c):
    if isinstance(c, Scalar):
        if c.field != field:
            raise FieldMismatch(f"{c.field!r} scalar in {field!r} element")
        return c.value
    return field.coerce(c)


class Element:
    """Finitely supported linear combination of basis labels."""

    __slots__ = ("field", "terms")

    def __init__(self, field: Field, terms=None):
        self.field = field
        acc: dict = {}
        for k, v in (terms.items() if isinstance(terms, dict) else (terms or ())):
            v = _raw(field, v)
            if v != 0:
                acc[k] = acc.get(k, 0) + v
        if field.p is not None:
            acc = {k: v % field.p for k, v in acc.items()}
        self.terms = {k: field.normalize(v) for k, v in acc.items() if v != 0}

    @classmethod
    def _trusted(cls, field: Field, terms: dict) -> "Element":
        obj = cls.__new__(cls)
        obj.field = field
        obj.terms = terms
        return obj

    @classmethod
    def basis(cls, field: Field, label, coeff=1) -> "Element":
        c = _raw(field, coeff)
        return cls._trusted(field, {label: c} if c != 0 else {})

    @classmethod
    def zero(cls, field: Field) -> "Element":
        return cls._trusted(field, {})

    def _check(self, other: "Element"):
        if not isinstance(other, Element):
            raise TypeError(f"expected Element, got {type(other).__name__}")
        if other.field != self.field:
            raise FieldMismatch(f"{self.field!r} vs {other.field!r}")

    def __add__(self, other: "Element") -> "Element":
        self._check(other)
        acc = dict(self.terms)
        _axpy(self.field, acc, 1, other.terms)
        return Element._trusted(self.field, acc)

    def __sub__(self, other: "Element") -> "Element":
        self._check(other)
        acc = dict(self.terms)
        _axpy(self.field, acc, self.field.neg(1), other.terms)
        return Element._trusted(self.field, acc)

    def __neg__(self) -> "Element":
        return self.scale(-1)

    def scale(self, c) -> "Element":
        c = _raw(self.field, c)
        if c == 0:
            return Element.zero(self.field)
        f = self.field
        return Element._trusted(f, {k: f.normalize(f.mul(c, v)) for k, v in self.terms.items()})

    def __mul__(self, c) -> "Element":
        if isinstance(c, Element):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self.field == other.field and self.terms == other.terms

    def __hash__(self):
        return hash((self.field, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def coeff(self, label):
        return self.terms.get(label, 0)

    def support(self) -> list:
        return sorted(self.terms)

    def items(self):
        return [(k, self.terms[k]) for k in sorted(self.terms)]

    def map_labels(self, fn) -> "Element":
        acc: dict = {}
        for k, v in self.terms.items():
            _axpy(self.field, acc, 1, {fn(k): v})
        return Element._trusted(self.field, acc)

    def render(self, fmt=None) -> str:
        if not self.terms:
            return "0"
        fmt = fmt or repr
        parts = []
        for k, v in self.items():
            c = self.field.render(v)
            lbl = fmt(k)
            if not lbl:
                parts.append(c)
            else:
                parts.append(lbl if c == "1" else f"{c}*{lbl}")
        return " + ".join(parts)

    def __repr__(self):
        return f"Element({self.render()})"


def _axpy(field: Field, acc: dict, a, terms: dict) -> None:
    """acc += a * terms, dropping zeros (in place)."""
    p = field.p
    for k, v in terms.items():
        nv = acc.get(k, 0) + a * v
        if p is not None:
            nv %= p
        if nv == 0:
            acc.pop(k, None)
        else:
            acc[k] = field.normalize(nv) if p is None else nv


def linear_combine(terms: Iterable[tuple]) -> Element:
    """Sum of ``c * x`` over ``(c, x)`` pairs sharing one field."""
    terms = list(terms)
    if not terms:
        raise ValueError("linear_combine needs at least one term to fix the field")
    field = terms[0][1].field
    acc: dict = {}
    for c, x in terms:
        if x.field != field:
            raise FieldMismatch(f"{field!r} vs {x.field!r}")
        _axpy(field, acc, _raw(field, c), x.terms)
    return Element._trusted(field, acc)


# ------------------------------------------------------------------ carriers


class Carrier:
    """Index domain of an algebra or module."""

    finite = False
    name = "carrier"

    def contains(self, label) -> bool:
        raise NotImplementedError

    def default_window(self, radius: int | None = None) -> tuple:
        raise NotImplementedError

    def render_label(self, label) -> str:
        return str(label)

    def describe(self) -> dict:
        return {"name": self.name}


class FiniteCarrier(Carrier):
    finite = True

    def __init__(self, basis: Sequence, names: Sequence[str] | None = None, name: str = "finite"):
        basis = tuple(basis)
        if len(set(basis)) != len(basis):
            raise ValueError("duplicate basis labels")
        self.basis = basis
        self.order = tuple(sorted(basis))
        self.position = {b: i for i, b in enumerate(self.order)}
        self.names = dict(zip(basis, names)) if names else {}
        self.name = name

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, label) -> bool:
        return label in self.position

    def default_window(self, radius=None) -> tuple:
        return self.order

    def render_label(self, label) -> str:
        return self.names.get(label, str(label))

    def describe(self) -> dict:
        return {"name": self.name, "dim": self.dim}

    def vector(self, x: Element) -> list:
        out = [0] * self.dim
        for k, v in x.terms.items():
            if k not in self.position:
                raise CarrierMismatch(f"label {k!r} not in {self.name}")
            out[self.position[k]] = v
        return out

    def element(self, field: Field, vec: Sequence) -> Element:
        return Element(field, {self.order[i]: c for i, c in enumerate(vec) if c != 0})


# ------------------------------------------------------------------ products


class Product:
    """Bilinear product given on basis labels; extended bilinearly."""

    def __init__(self, field: Field, carrier: Carrier, name: str = "product"):
        self.field = field
        self.carrier = carrier
        self.name = name
        self._cache: dict = {}

    def _basis(self, a, b) -> dict:
        raise NotImplementedError

    def basis_product(self, a, b) -> dict:
        key = (a, b)
        r = self._cache.get(key)
        if r is None:
            r = self._basis(a, b)
            if isinstance(r, Element):
                if r.field != self.field:
                    raise FieldMismatch(f"{self.name}: rule returned {r.field!r}")
                r = r.terms
            self._cache[key] = r
        return r

    def __call__(self, x: Element, y: Element) -> Element:
        return multiply(self, x, y)

    def on_labels(self, a, b) -> Element:
        return Element._trusted(self.field, dict(self.basis_product(a, b)))


class Table(Product):
    """Finite structure-constant table ``(a, b) -> Element``."""

    def __init__(self, field: Field, carrier: FiniteCarrier, entries: dict, name: str = "table"):
        super().__init__(field, carrier, name)
        clean = {}
        for (a, b), v in entries.items():
            if not (carrier.contains(a) and carrier.contains(b)):
                raise CarrierMismatch(f"{name}: entry ({a!r}, {b!r}) outside carrier")
            if not isinstance(v, Element):
                v = Element(field, v)
            if v.field != field:
                raise FieldMismatch(f"{name}: entry over {v.field!r}")
            for k in v.terms:
                if not carrier.contains(k):
                    raise CarrierMismatch(f"{name}: result label {k!r} outside carrier")
            if v:
                clean[(a, b)] = v
        self.entries = clean
        self._dense = None

    def _basis(self, a, b):
        v = self.entries.get((a, b))
        return dict(v.terms) if v is not None else {}

    def dense(self) -> np.ndarray:
        """``T[i, j, k]`` = coefficient of basis k in e_i e_j (prime fields only)."""
        if self.field.p is None:
            raise ValueError("dense tables are only built over F_p")
        if self._dense is None:
            n = self.carrier.dim
            T = np.zeros((n, n, n), dtype=np.int64)
            pos = self.carrier.position
            for (a, b), v in self.entries.items():
                for k, c in v.terms.items():
                    T[pos[a], pos[b], pos[k]] = c
            self._dense = T
        return self._dense

    def is_zero(self) -> bool:
        return not self.entries

    def with_entry(self, a, b, value: Element, name: str | None = None) -> "Table":
        entries = dict(self.entries)
        entries[(a, b)] = value
        return Table(self.field, self.carrier, entries, name or self.name)

    @classmethod
    def from_product(cls, prod: Product, carrier: FiniteCarrier, name: str | None = None) -> "Table":
        entries = {}
        for a in carrier.order:
            for b in carrier.order:
                r = prod.basis_product(a, b)
                if r:
                    entries[(a, b)] = Element._trusted(prod.field, dict(r))
        return cls(prod.field, carrier, entries, name or prod.name)


class Rule(Product):
    """Product computed by a function on basis labels."""

    def __init__(self, field: Field, carrier: Carrier, fn: Callable, name: str = "rule"):
        super().__init__(field, carrier, name)
        self.fn = fn

    def _basis(self, a, b):
        r = self.fn(a, b)
        if r is None:
            return {}
        if isinstance(r, Element):
            return r
        return Element(self.field, r).terms


def multiply(m: Product, x: Element, y: Element) -> Element:
    if x.field != m.field or y.field != m.field:
        raise FieldMismatch(f"{m.name} over {m.field!r}")
    f = m.field
    acc: dict = {}
    for a, ca in x.terms.items():
        for b, cb in y.terms.items():
            r = m.basis_product(a, b)
            if r:
                _axpy(f, acc, f.mul(ca, cb), r)
    return Element._trusted(f, acc)


def commutator(m: Product, name: str | None = None) -> Product:
    """The product ``u*v - v*u`` (same kind as ``m``)."""
    f = m.field

    def rule(a, b):
        acc = dict(m.basis_product(a, b))
        _axpy(f, acc, f.neg(1), m.basis_product(b, a))
        return Element._trusted(f, acc)

    r = Rule(f, m.carrier, rule, name or f"[{m.name}]")
    if isinstance(m, Table):
        return Table.from_product(r, m.carrier, r.name)
    return r


def perturb_entry(m: Product, a, b, label, delta=1, name: str | None = None) -> Product:
    """Copy of ``m`` whose product of labels (a, b) gains ``delta`` at ``label``."""
    f = m.field
    d = _raw(f, delta)

    def rule(x, y):
        r = dict(m.basis_product(x, y))
        if (x, y) == (a, b):
            _axpy(f, r, d, {label: 1})
        return Element._trusted(f, r)

    out = Rule(f, m.carrier, rule, name or f"{m.name}+perturbed")
    if isinstance(m, Table):
        return Table.from_product(out, m.carrier, out.name)
    return out


def zero_product(field: Field, carrier: Carrier, name: str = "zero") -> Product:
    if carrier.finite:
        return Table(field, carrier, {}, name)
    return Rule(field, carrier, lambda a, b: None, name)


class LinearMap:
    """Linear map given by images of basis labels (cached)."""

    def __init__(self, field: Field, image: Callable, name: str = "map", domain: Carrier | None = None):
        self.field = field
        self._image = image
        self.name = name
        self.domain = domain
        self._cache: dict = {}

    def basis_image(self, a) -> dict:
        r = self._cache.get(a)
        if r is None:
            r = self._image(a)
            if r is None:
                r = {}
            elif isinstance(r, Element):
                r = r.terms
            else:
                r = Element(self.field, r).terms
            self._cache[a] = r
        return r

    def __call__(self, x: Element) -> Element:
        if x.field != self.field:
            raise FieldMismatch(f"{self.name} over {self.field!r}")
        acc: dict = {}
        for a, c in x.terms.items():
            _axpy(self.field, acc, c, self.basis_image(a))
        return Element._trusted(self.field, acc)

    def matrix(self, carrier: FiniteCarrier) -> list:
        """Column j is the image of ``carrier.order[j]``."""
        n = carrier.dim
        M = [[0] * n for _ in range(n)]
        for j, a in enumerate(carrier.order):
            for k, c in self.basis_image(a).items():
                if k not in carrier.position:
                    raise CarrierMismatch(f"{self.name}: image leaves carrier")
                M[carrier.position[k]][j] = c
        return M

    @classmethod
    def from_matrix(cls, field: Field, carrier: FiniteCarrier, M, name: str = "map") -> "LinearMap":
        order = carrier.order

        def image(a):
            j = carrier.position[a]
            return {order[i]: M[i][j] for i in range(len(order)) if M[i][j] != 0}

        return cls(field, image, name, carrier)

    def compose(self, other: "LinearMap", name=None) -> "LinearMap":
        """``self o other``."""
        return LinearMap(self.field, lambda a: self(Element._trusted(self.field, dict(other.basis_image(a)))),
                         name or f"{self.name}*{other.name}", other.domain)


# ------------------------------------------------------------- bundled types


@dataclass(eq=False)
class GDBialgebra:
    carrier: Carrier
    bracket: Product
    circ: Product
    name: str = "gd"
    meta: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.bracket.field != self.circ.field:
            raise FieldMismatch("bracket and circ over different fields")
        if self.bracket.carrier is not self.circ.carrier:
            raise CarrierMismatch("bracket and circ on different carriers")

    @property
    def field(self) -> Field:
        return self.circ.field


@dataclass(eq=False)
class NovikovModule:
    """Module over ``(algebra.carrier, algebra)``; actions take labels (a, m) / (m, a)."""

    algebra: Product
    carrier: Carrier
    left: Product
    right: Product
    name: str = "module"
    flags: list = dc_field(default_factory=list)

    @property
    def field(self) -> Field:
        return self.algebra.field


@dataclass(frozen=True)
class ModuleWindow:
    algebra: tuple
    module: tuple


# ------------------------------------------------------------------ laws


class LawId(str, enum.Enum):
    COMM = "comm"
    ASSOC = "assoc"
    SKEW = "skew"
    JACOBI = "jacobi"
    RIGHT_COMM = "right_comm"
    LEFT_SYM = "left_sym"
    NOVIKOV = "novikov"
    GD_COMPAT = "gd_compat"
    LIE_POISSON = "lie_poisson"
    DERIVATION = "derivation"
    XI_DERIVATION = "xi_derivation"
    MODULE_NOVIKOV = "module_novikov"

    @classmethod
    def parse(cls, name) -> "LawId":
        if isinstance(name, LawId):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            raise UnknownLaw(name) from None


@dataclass
class CheckReport:
    law: str
    passed: bool
    window: dict
    witness: tuple | None = None
    lhs: Element | None = None
    rhs: Element | None = None
    tuples_checked: int = 0
    detail: str = ""
    render_label: Callable = repr

    def describe(self) -> str:
        if self.passed:
            return f"{self.law}: pass ({self.tuples_checked} tuples)"
        args = ", ".join(self.render_label(a) for a in self.witness)
        return (f"{self.law}: FAIL at ({args}): lhs = {self.lhs.render(self.render_label)}, "
                f"rhs = {self.rhs.render(self.render_label)}" + (f" [{self.detail}]" if self.detail else ""))

    def to_json(self) -> dict:
        out = {"law": self.law, "verdict": "pass" if self.passed else "fail",
               "window": self.window, "tuples_checked": self.tuples_checked}
        if not self.passed:
            out["witness"] = {
                "args": [self.render_label(a) for a in self.witness],
                "lhs": self.lhs.render(self.render_label),
                "rhs": self.rhs.render(self.render_label),
            }
            if self.detail:
                out["witness"]["detail"] = self.detail
        return out


def _roles(context) -> dict:
    if isinstance(context, dict):
        return dict(context)
    if isinstance(context, GDBialgebra):
        return {"bracket": context.bracket, "circ": context.circ, "dot": context.circ,
                "carrier": context.carrier}
    if isinstance(context, NovikovModule):
        return {"module": context}
    if isinstance(context, Product):
        return {"bracket": context, "circ": context, "dot": context, "carrier": context.carrier}
    if isinstance(context, tuple):
        roles = {}
        for item in context:
            if isinstance(item, LinearMap):
                roles["derivation"] = item
            elif isinstance(item, Product):
                roles.setdefault("dot", item)
                roles.setdefault("circ", item)
                roles.setdefault("bracket", item)
            else:
                roles["xi"] = item
        return roles
    raise TypeError(f"unsupported law context {type(context).__name__}")


def _need(roles, *names):
    out = []
    for n in names:
        if roles.get(n) is None:
            raise CarrierMismatch(f"law context lacks {n!r}")
        out.append(roles[n])
    return out


def _eq_terms(roles, law, args):
    """Return (lhs, rhs) Elements for one tuple of basis labels."""
    if law is LawId.COMM:
        (m,) = _need(roles, "dot")
        u, v = args
        return m.on_labels(u, v), m.on_labels(v, u)
    if law is LawId.ASSOC:
        (m,) = _need(roles, "dot")
        u, v, w = args
        return m(m.on_labels(u, v), _b(m, w)), m(_b(m, u), m.on_labels(v, w))
    if law is LawId.SKEW:
        (m,) = _need(roles, "bracket")
        u, v = args
        return m.on_labels(u, v), -m.on_labels(v, u)
    if law is LawId.JACOBI:
        (m,) = _need(roles, "bracket")
        u, v, w = args
        s = m(m.on_labels(u, v), _b(m, w)) + m(m.on_labels(v, w), _b(m, u)) + m(m.on_labels(w, u), _b(m, v))
        return s, Element.zero(m.field)
    if law is LawId.RIGHT_COMM:
        (m,) = _need(roles, "circ")
        u, v, w = args
        return m(m.on_labels(u, v), _b(m, w)), m(m.on_labels(u, w), _b(m, v))
    if law is LawId.LEFT_SYM:
        (m,) = _need(roles, "circ")
        u, v, w = args
        lhs = m(m.on_labels(u, v), _b(m, w)) - m(_b(m, u), m.on_labels(v, w))
        rhs = m(m.on_labels(v, u), _b(m, w)) - m(_b(m, v), m.on_labels(u, w))
        return lhs, rhs
    if law is LawId.GD_COMPAT:
        br, c = _need(roles, "bracket", "circ")
        u, v, w = args
        U, V, W = _b(c, u), _b(c, v), _b(c, w)
        s = (br(c.on_labels(w, u), V) - br(c.on_labels(w, v), U)
             + c(br.on_labels(w, u), V) - c(br.on_labels(w, v), U) - c(W, br.on_labels(u, v)))
        return s, Element.zero(c.field)
    if law is LawId.LIE_POISSON:
        dot, br = _need(roles, "dot", "bracket")
        u, v, w = args
        U, V, W = _b(dot, u), _b(dot, v), _b(dot, w)
        return br(U, dot.on_labels(v, w)), dot(br.on_labels(u, v), W) + dot(V, br.on_labels(u, w))
    if law is LawId.DERIVATION:
        dot, D = _need(roles, "dot", "derivation")
        u, v = args
        U, V = _b(dot, u), _b(dot, v)
        return D(dot.on_labels(u, v)), dot(D(U), V) + dot(U, D(V))
    if law is LawId.XI_DERIVATION:
        br, D, xi = _need(roles, "bracket", "derivation", "xi")
        u, v = args
        U, V = _b(br, u), _b(br, v)
        b_uv = br.on_labels(u, v)
        return D(b_uv), br(D(U), V) + br(U, D(V)) + b_uv.scale(xi)
    raise UnknownLaw(law)


def _b(m: Product, label) -> Element:
    return Element._trusted(m.field, {label: 1})


ARITY = {
    LawId.COMM: 2, LawId.SKEW: 2, LawId.DERIVATION: 2, LawId.XI_DERIVATION: 2,
    LawId.ASSOC: 3, LawId.JACOBI: 3, LawId.RIGHT_COMM: 3, LawId.LEFT_SYM: 3,
    LawId.GD_COMPAT: 3, LawId.LIE_POISSON: 3,
}

# placement of the module slot, in the order reported
_MODULE_PARTS = [(LawId.RIGHT_COMM, s) for s in range(3)] + [(LawId.LEFT_SYM, s) for s in range(3)]


class _ModuleProduct(Product):
    """Product on tagged labels ('a', x) / ('m', y) combining algebra and actions."""

    def __init__(self, module: NovikovModule):
        super().__init__(module.field, module.carrier, f"{module.name}-combined")
        self.module = module

    def _basis(self, a, b):
        (sa, xa), (sb, xb) = a, b
        mod = self.module
        if sa == "a" and sb == "a":
            r, tag = mod.algebra.basis_product(xa, xb), "a"
        elif sa == "a":
            r, tag = mod.left.basis_product(xa, xb), "m"
        elif sb == "a":
            r, tag = mod.right.basis_product(xa, xb), "m"
        else:
            raise CarrierMismatch("module x module product is undefined")
        return {(tag, k): v for k, v in r.items()}


def evaluate_law(law, context, args) -> tuple:
    """Both sides of one instance of ``law``; the re-evaluation route for witnesses."""
    law = LawId.parse(law)
    roles = _roles(context)
    if law is LawId.NOVIKOV:
        l1, r1 = _eq_terms(roles, LawId.RIGHT_COMM, args)
        if l1 != r1:
            return l1, r1
        return _eq_terms(roles, LawId.LEFT_SYM, args)
    if law is LawId.MODULE_NOVIKOV:
        (mod,) = _need(roles, "module")
        comb = _ModuleProduct(mod)
        part = args[0]
        sub = LawId.RIGHT_COMM if part.startswith("right_comm") else LawId.LEFT_SYM
        return _eq_terms({"circ": comb}, sub, args[1:])
    return _eq_terms(roles, law, args)


def _window_labels(window, carrier) -> tuple:
    w = tuple(window)
    if len(set(w)) != len(w):
        raise ValueError("window has duplicate labels")
    if carrier is not None:
        for a in w:
            if not carrier.contains(a):
                raise CarrierMismatch(f"window label {a!r} not in carrier {carrier.name}")
    return w


def _fmt_for(roles):
    c = roles.get("carrier")
    if c is None:
        for k in ("circ", "bracket", "dot"):
            if roles.get(k) is not None:
                c = roles[k].carrier
                break
    return c.render_label if c is not None else repr


def law_check(law, context, window=None, *, fast: bool = True) -> CheckReport:
    """Check ``law`` on every ordered tuple drawn from ``window``.

    Products are evaluated exactly wherever they land.  The first failure in
    lexicographic tuple order (with respect to the window order) is returned.
    """
    law = LawId.parse(law)
    roles = _roles(context)
    if law is LawId.MODULE_NOVIKOV:
        return _module_check(roles, window)
    carrier = roles.get("carrier")
    if carrier is None:
        for k in ("circ", "bracket", "dot"):
            if roles.get(k) is not None:
                carrier = roles[k].carrier
                break
    if window is None:
        window = carrier.default_window()
    w = _window_labels(window, carrier)
    fmt = _fmt_for(roles)
    wdesc = {"labels": [fmt(a) for a in w]}
    subs = [LawId.RIGHT_COMM, LawId.LEFT_SYM] if law is LawId.NOVIKOV else [law]
    if law is LawId.XI_DERIVATION and roles.get("xi") is not None:
        roles["xi"] = _raw(roles["bracket"].field, roles["xi"])
    count = 0
    for sub in subs:
        arity = ARITY[sub]
        flagged = _dense_flags(sub, roles, w) if fast else None
        for args in itertools.product(w, repeat=arity):
            count += 1
            if flagged is not None and not flagged(args):
                continue
            lhs, rhs = _eq_terms(roles, sub, args)
            if lhs != rhs:
                detail = sub.value if law is LawId.NOVIKOV else ""
                return CheckReport(law.value, False, wdesc, args, lhs, rhs, count, detail, fmt)
    return CheckReport(law.value, True, wdesc, None, None, None, count, "", fmt)


def _module_check(roles, window) -> CheckReport:
    (mod,) = _need(roles, "module")
    if window is None:
        window = ModuleWindow(mod.algebra.carrier.default_window(), mod.carrier.default_window())
    aw = _window_labels(window.algebra, mod.algebra.carrier)
    mw = _window_labels(window.module, mod.carrier)
    comb = _ModuleProduct(mod)
    ta = [("a", x) for x in aw]
    tm = [("m", x) for x in mw]
    afmt, mfmt = mod.algebra.carrier.render_label, mod.carrier.render_label

    def fmt(lbl):
        if isinstance(lbl, tuple) and len(lbl) == 2 and lbl[0] in ("a", "m"):
            return (afmt if lbl[0] == "a" else mfmt)(lbl[1]) + ("" if lbl[0] == "a" else "@M")
        return str(lbl)

    wdesc = {"algebra": [afmt(a) for a in aw], "module": [mfmt(m) for m in mw]}
    count = 0
    for sub, slot in _MODULE_PARTS:
        pools = [tm if i == slot else ta for i in range(3)]
        for args in itertools.product(*pools):
            count += 1
            lhs, rhs = _eq_terms({"circ": comb}, sub, args)
            if lhs != rhs:
                part = f"{sub.value}[M in slot {slot + 1}]"
                return CheckReport(LawId.MODULE_NOVIKOV.value, False, wdesc, (part,) + args, lhs, rhs,
                                   count, part, lambda x: x if isinstance(x, str) else fmt(x))
    return CheckReport(LawId.MODULE_NOVIKOV.value, True, wdesc, None, None, None, count, "", fmt)


def _dense_flags(law, roles, window):
    """Pre-screen with the dense mod-p kernel; returns a predicate or None.

    Only used for single-carrier F_p tables; the generic evaluation still
    produces the witness, so reports are identical with or without it.
    """
    names = {LawId.COMM: ("dot",), LawId.ASSOC: ("dot",), LawId.SKEW: ("bracket",),
             LawId.JACOBI: ("bracket",), LawId.RIGHT_COMM: ("circ",), LawId.LEFT_SYM: ("circ",),
             LawId.GD_COMPAT: ("bracket", "circ")}.get(law)
    if names is None:
        return None
    tabs = [roles.get(n) for n in names]
    if not all(isinstance(t, Table) for t in tabs):
        return None
    if tabs[0].field.p is None or any(t.carrier is not tabs[0].carrier for t in tabs):
        return None
    p = tabs[0].field.p
    pos = tabs[0].carrier.position
    mask = dense_residual_mask(law, [t.dense() for t in tabs], p)
    return lambda args: bool(mask[tuple(pos[a] for a in args)])


def dense_residual_mask(law, tensors, p, backend=None) -> np.ndarray:
    """Boolean array over index tuples: True where the law fails (F_p tables)."""
    law = LawId.parse(law)
    T = tensors[0]
    if law in (LawId.COMM, LawId.SKEW):
        other = np.transpose(T, (1, 0, 2))
        diff = T - other if law is LawId.COMM else T + other
        return (diff % p).any(axis=-1)
    if law is LawId.GD_COMPAT:
        B, C = tensors
        # [w o u, v]: C then B with (w,u,v); [w,u] o v: B then C with (w,u,v); w o [u,v]
        CB, _ = kernels.compose_mod_p(C, B, p, backend)   # CB[w,u,v] = [w o u, v]
        BC, CBr = kernels.compose_mod_p(B, C, p, backend)  # BC[w,u,v] = [w,u] o v ; CBr = w o [u,v]
        res = (CB - np.transpose(CB, (0, 2, 1, 3)) + BC - np.transpose(BC, (0, 2, 1, 3)) - CBr) % p
        # res is indexed (w, u, v); reorder to (u, v, w)
        return np.transpose(res, (1, 2, 0, 3)).any(axis=-1)
    X, Y = kernels.compose_mod_p(T, T, p, backend)
    if law is LawId.ASSOC:
        return ((X - Y) % p).any(axis=-1)
    if law is LawId.RIGHT_COMM:
        return ((X - np.transpose(X, (0, 2, 1, 3))) % p).any(axis=-1)
    if law is LawId.LEFT_SYM:
        A = X - Y
        return ((A - np.transpose(A, (1, 0, 2, 3))) % p).any(axis=-1)
    if law is LawId.JACOBI:
        J = X + np.transpose(X, (2, 0, 1, 3)) + np.transpose(X, (1, 2, 0, 3))
        return (J % p).any(axis=-1)
    raise UnknownLaw(law)


# ------------------------------------------------------------ linear algebra


def rref(rows: Sequence[Sequence], field: Field):
    """Reduced row echelon form over ``field``; returns (rows, pivot columns)."""
    if field.p is not None and rows and len(rows[0]):
        R, piv = kernels.rref_mod_p(np.array(rows, dtype=object).astype(np.int64), field.p)
        r = len(piv)
        return [[int(x) for x in R[i]] for i in range(r)], [int(c) for c in piv]
    R = [list(r) for r in rows]
    if not R:
        return [], []
    ncols = len(R[0])
    pivots = []
    r = 0
    for c in range(ncols):
        k = next((i for i in range(r, len(R)) if R[i][c] != 0), None)
        if k is None:
            continue
        R[r], R[k] = R[k], R[r]
        inv = field.inv(R[r][c])
        R[r] = [field.normalize(field.mul(x, inv)) for x in R[r]]
        for i in range(len(R)):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [field.normalize(field.sub(x, field.mul(f, y))) for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == len(R):
            break
    return R[:r], pivots


def nullspace(matrix: Sequence[Sequence], ncols: int, field: Field) -> list:
    """Basis of ``{x : matrix @ x = 0}``, one vector per free column (RREF convention)."""
    R, piv = rref(matrix, field) if matrix else ([], [])
    free = [c for c in range(ncols) if c not in set(piv)]
    basis = []
    for fcol in free:
        x = [0] * ncols
        x[fcol] = 1
        for row, pc in zip(R, piv):
            x[pc] = field.normalize(field.neg(row[fcol]))
        basis.append(x)
    return basis


class Subspace:
    """Subspace of a finite carrier stored in reduced echelon form.

    Pivot order is the sorted label order of the carrier, so equal subspaces
    have identical rows.
    """

    def __init__(self, field: Field, carrier: FiniteCarrier, rows: Sequence[Sequence]):
        self.field = field
        self.carrier = carrier
        R, _ = rref([list(r) for r in rows], field) if rows else ([], [])
        self.rows = tuple(tuple(r) for r in R)

    @classmethod
    def span(cls, field, carrier, elements: Iterable[Element]) -> "Subspace":
        return cls(field, carrier, [carrier.vector(e) for e in elements])

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def basis(self) -> list:
        return [self.carrier.element(self.field, r) for r in self.rows]

    def contains(self, x: Element) -> bool:
        return Subspace(self.field, self.carrier, list(self.rows) + [self.carrier.vector(x)]).dim == self.dim

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.field == other.field and self.rows == other.rows

    def __repr__(self):
        fmt = self.carrier.render_label
        return "span{" + ", ".join(e.render(fmt) for e in self.basis) + "}"


def operator_matrices(actions, carrier: FiniteCarrier, field: Field) -> list:
    """Expand an action list into matrices on ``carrier``.

    Items: a :class:`LinearMap`, a matrix, or ``(product, side)`` where side is
    ``"left"`` (x -> b*x) or ``"right"`` (x -> x*b) for every basis label b of
    the product's own carrier (which may differ from ``carrier`` for modules).
    """
    mats = []
    for act in actions:
        if isinstance(act, LinearMap):
            mats.append(act.matrix(carrier))
        elif isinstance(act, tuple) and len(act) == 2 and isinstance(act[0], Product):
            prod, side = act
            if not prod.carrier.finite:
                raise InfiniteCarrier(f"{prod.name} acts through an infinite carrier")
            for b in prod.carrier.order:
                if side == "left":
                    img = lambda a, b=b: prod.basis_product(b, a)
                elif side == "right":
                    img = lambda a, b=b: prod.basis_product(a, b)
                else:
                    raise ValueError(f"unknown side {side!r}")
                mats.append(LinearMap(field, img, f"{side}[{b}]").matrix(carrier))
        else:
            mats.append([list(r) for r in act])
    return mats


def _closure_rows(mats, gens_vectors, field, n):
    rows: list = []
    piv: list = []

    def insert(w):
        w = list(w)
        for r, c in zip(rows, piv):
            if w[c] != 0:
                f = w[c]
                w = [field.normalize(field.sub(x, field.mul(f, y))) for x, y in zip(w, r)]
        c = next((i for i, x in enumerate(w) if x != 0), None)
        if c is None:
            return False
        inv = field.inv(w[c])
        rows.append([field.normalize(field.mul(x, inv)) for x in w])
        piv.append(c)
        return True

    for g in gens_vectors:
        insert(g)
    q = 0
    while q < len(rows) and len(rows) < n:
        v = rows[q]
        for M in mats:
            img = [0] * n
            for i in range(n):
                s = 0
                Mi = M[i]
                for j in range(n):
                    if Mi[j] and v[j]:
                        s = s + Mi[j] * v[j]
                img[i] = field.coerce(s) if field.p is not None else field.normalize(s)
            insert(img)
            if len(rows) == n:
                break
        q += 1
    return rows


def invariant_closure(actions, generators: Sequence[Element], carrier: Carrier) -> Subspace:
    """Smallest subspace containing ``generators`` and stable under ``actions``."""
    if not carrier.finite:
        raise InfiniteCarrier(f"{carrier.name} is not finite-dimensional")
    if not generators:
        raise ValueError("need at least one generator")
    field = generators[0].field
    mats = operator_matrices(actions, carrier, field)
    rows = _closure_rows(mats, [carrier.vector(g) for g in generators], field, carrier.dim)
    return Subspace(field, carrier, rows)


# ------------------------------------------------------- derivations / simple


def derivations_of(A: Table) -> list:
    """Basis of Der(A) as :class:`LinearMap` objects, via the exact Leibniz nullspace.

    Unknown ``d[k][i]`` is the coefficient of e_k in D(e_i), flattened by
    source index; the nullspace basis is itself row-reduced in that order.
    """
    C = A.carrier
    f = A.field
    n = C.dim
    pos = C.position
    struct = {}
    for (a, b), v in A.entries.items():
        struct[(pos[a], pos[b])] = {pos[k]: c for k, c in v.terms.items()}

    def var(k, i):
        return i * n + k

    rows = []
    for i in range(n):
        for j in range(n):
            eq = [dict() for _ in range(n)]  # eq[m] = {var: coeff}
            # D(e_i e_j)
            for k, c in struct.get((i, j), {}).items():
                for m in range(n):
                    eq[m][var(m, k)] = eq[m].get(var(m, k), 0) + c
            # - D(e_i) e_j - e_i D(e_j)
            for k in range(n):
                for m, c in struct.get((k, j), {}).items():
                    eq[m][var(k, i)] = eq[m].get(var(k, i), 0) - c
                for m, c in struct.get((i, k), {}).items():
                    eq[m][var(k, j)] = eq[m].get(var(k, j), 0) - c
            for m in range(n):
                row = [0] * (n * n)
                for vi, c in eq[m].items():
                    row[vi] = f.coerce(c)
                if any(row):
                    rows.append(row)
    basis, _ = rref(nullspace(rows, n * n, f), f)
    out = []
    for idx, x in enumerate(basis):
        M = [[x[var(k, i)] for i in range(n)] for k in range(n)]
        out.append(LinearMap.from_matrix(f, C, M, f"der{idx}"))
    return out


@dataclass
class Verdict:
    kind: str
    exact: bool
    witness: Subspace | None = None
    generator: Element | None = None
    tested: int = 0

    def __bool__(self):
        return self.kind in ("Simple", "Irreducible")


SIMPLE_ENUMERATION_BOUND = 10**6


def _decide(mats, carrier, field, nonzero_action, positive, negative, bound, samples, seed):
    n = carrier.dim
    if n == 0:
        raise ZeroDimension("zero-dimensional carrier")
    exact = n == 1 or (field.p is not None and field.p ** n <= bound)
    if exact:
        vec = None
        tested = 1
        if n > 1:
            v = kernels.first_proper_closure(np.array(mats, dtype=np.int64), n, field.p)
            vec = None if v is None else [int(x) for x in v]
            tested = (field.p ** n - 1) // (field.p - 1)
        if vec is not None:
            rows = _closure_rows(mats, [vec], field, n)
            return Verdict(negative, True, Subspace(field, carrier, rows), carrier.element(field, vec), tested)
        if not nonzero_action:
            return Verdict(negative, True, Subspace(field, carrier, []), None, tested)
        return Verdict(positive, True, None, None, tested)
    rng = random.Random(seed)
    candidates = [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    for _ in range(samples):
        if field.p is None:
            vec = [rng.randint(-3, 3) for _ in range(n)]
        else:
            vec = [rng.randrange(field.p) for _ in range(n)]
        if any(vec):
            candidates.append([field.coerce(x) for x in vec])
    for vec in candidates:
        rows = _closure_rows(mats, [vec], field, n)
        if len(rows) < n:
            return Verdict(negative, True, Subspace(field, carrier, rows), carrier.element(field, vec), len(candidates))
    if not nonzero_action:
        return Verdict(negative, True, Subspace(field, carrier, []), None, len(candidates))
    return Verdict("Heuristic", False, None, None, len(candidates))


def is_simple(A: Table, *, bound: int = SIMPLE_ENUMERATION_BOUND, samples: int = 64, seed: int = 0) -> Verdict:
    """Decide simplicity: exact by enumeration over small F_p, else Heuristic."""
    C = A.carrier
    if C.dim == 0:
        raise ZeroDimension("zero-dimensional algebra")
    mats = operator_matrices([(A, "left"), (A, "right")], C, A.field)
    return _decide(mats, C, A.field, not A.is_zero(), "Simple", "NotSimple", bound, samples, seed)


def is_irreducible(M: NovikovModule, *, bound: int = SIMPLE_ENUMERATION_BOUND, samples: int = 64,
                   seed: int = 0) -> Verdict:
    """Same strategy as :func:`is_simple` with the two module actions."""
    C = M.carrier
    if not C.finite:
        raise InfiniteCarrier("module carrier is infinite")
    if C.dim == 0:
        raise ZeroDimension("zero module")
    A = M.algebra.carrier
    if not A.finite:
        raise InfiniteCarrier("algebra carrier is infinite")
    f = M.field
    mats = []
    for b in A.order:
        mats.append(LinearMap(f, lambda m, b=b: M.left.basis_product(b, m), f"L{b}").matrix(C))
        mats.append(LinearMap(f, lambda m, b=b: M.right.basis_product(m, b), f"R{b}").matrix(C))
    nonzero = any(any(x for row in mat for x in row) for mat in mats)
    return _decide(mats, C, f, nonzero, "Irreducible", "Reducible", bound, samples, seed)
