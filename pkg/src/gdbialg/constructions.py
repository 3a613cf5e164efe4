"""Factories for the Novikov algebras, modules and GD bialgebras.

Graded algebras are indexed by ``(coords, i)`` where ``coords`` is an integer
tuple over the generators of a :class:`GroupSpec` and ``i`` lies in J.  The
field value of a group label is computed from the generator values, so a rank-r
group behaves like Z^r mapped additively into the field.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable

from .algcore import (
    Carrier, Element, FiniteCarrier, GDBialgebra, LawId, LawViolation,
    LinearMap, NovikovModule, Product, Rule, Table, _axpy, _raw, commutator, derivations_of,
    law_check, rref,
)
from .scalars import Field, QQ, binomial


class GroupSpecViolation(ValueError):
    pass


class CocycleViolation(ValueError):
    pass


class FamilyConstraintViolation(ValueError):
    pass


class BadCharacteristic(ValueError):
    pass


class DimensionBound(ValueError):
    pass


class NonCommutingDerivations(ValueError):
    pass


class UnknownCondition(KeyError):
    pass


DEFAULT_DIM_BOUND = 2000


def _sub(s: str) -> str:
    return s.replace("-", "₋").translate(str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉"))


# ---------------------------------------------------------------- groups


def _rational_gcd(values) -> Fraction:
    g = Fraction(0)
    for v in values:
        v = Fraction(v)
        if v == 0:
            continue
        if g == 0:
            g = abs(v)
        else:
            den = g.denominator * v.denominator // math.gcd(g.denominator, v.denominator)
            g = Fraction(math.gcd(int(g * den), int(v * den)), den)
    return g


class GroupSpec:
    """Finitely generated additive group mapped into F (``vdim`` 1) or F^2 (``vdim`` 2).

    Labels are integer coordinate tuples over ``generators``.  Over Q the
    coordinates are free (a formal Z^r), so dependent generators give a
    covering group on which every polynomial identity still specializes.  Over
    F_p the generators are reduced to an F_p-independent set and coordinates
    live in [0, p), so labels are exactly the group elements.
    """

    def __init__(self, field: Field, generators, *, name: str = "Delta"):
        gens = []
        for g in generators:
            if isinstance(g, (tuple, list)):
                gens.append(tuple(field.coerce(x) for x in g))
            else:
                gens.append((field.coerce(g),))
        if not gens:
            raise GroupSpecViolation("a group needs at least one generator")
        vdim = len(gens[0])
        if any(len(g) != vdim for g in gens):
            raise GroupSpecViolation("generators of mixed dimension")
        if any(all(x == 0 for x in g) for g in gens):
            raise GroupSpecViolation("generators must be nonzero")
        if len(set(gens)) != len(gens):
            raise GroupSpecViolation("generators must be distinct")
        self.field = field
        if field.p is not None:
            rows, _ = rref([list(g) for g in gens], field)
            gens = [tuple(r) for r in rows if any(r)]
        self.generators = tuple(gens)
        self.rank = len(gens)
        self.vdim = vdim
        self.name = name

    @classmethod
    def integers(cls, field: Field = QQ) -> "GroupSpec":
        return cls(field, [1], name="Z")

    @classmethod
    def lattice2(cls, field: Field = QQ) -> "GroupSpec":
        return cls(field, [(1, 0), (0, 1)], name="Z^2")

    def zero(self) -> tuple:
        return (0,) * self.rank

    def reduce(self, a) -> tuple:
        p = self.field.p
        return tuple(a) if p is None else tuple(x % p for x in a)

    def add(self, a: tuple, b: tuple) -> tuple:
        return self.reduce(x + y for x, y in zip(a, b))

    def neg(self, a: tuple) -> tuple:
        return self.reduce(-x for x in a)

    def value(self, a: tuple) -> tuple:
        f = self.field
        out = []
        for d in range(self.vdim):
            s = 0
            for n, g in zip(a, self.generators):
                s = s + n * g[d]
            out.append(f.coerce(s) if f.p is not None else f.normalize(s))
        return tuple(out)

    def scalar(self, a: tuple):
        """Field value of a label of a group inside F."""
        if self.vdim != 1:
            raise GroupSpecViolation("scalar value requested from a 2-dimensional group")
        return self.value(a)[0]

    def contains(self, a) -> bool:
        if not (isinstance(a, tuple) and len(a) == self.rank and all(isinstance(x, int) for x in a)):
            return False
        return self.field.p is None or all(0 <= x < self.field.p for x in a)

    def window(self, radius: int = 2) -> tuple:
        pts = itertools.product(range(-radius, radius + 1), repeat=self.rank)
        if self.field.p is None:
            return tuple(pts)
        return tuple(sorted({self.reduce(a) for a in pts}))

    def value_in_span(self, v, coord: int = 0) -> bool:
        """Is ``v`` an integer combination of the generators' ``coord`` entries?"""
        f = self.field
        vals = [g[coord] for g in self.generators]
        if f.p is not None:
            return any(x != 0 for x in vals) or f.coerce(v) == 0
        g = _rational_gcd(vals)
        if g == 0:
            return Fraction(v) == 0
        return (Fraction(v) / g).denominator == 1

    def describe(self) -> dict:
        f = self.field
        return {"name": self.name,
                "generators": [[f.render(x) for x in g] if self.vdim > 1 else f.render(g[0])
                               for g in self.generators]}


class AdditiveMap:
    """Additive map on a GroupSpec given by its values on the generators."""

    def __init__(self, group: GroupSpec, values):
        if len(values) != group.rank:
            raise GroupSpecViolation("one value per generator required")
        self.group = group
        self.values = tuple(group.field.coerce(v) for v in values)

    def __call__(self, a: tuple):
        f = self.group.field
        s = 0
        for n, v in zip(a, self.values):
            s = s + n * v
        return f.coerce(s) if f.p is not None else f.normalize(s)


def bilinear_form(group: GroupSpec, matrix) -> Callable:
    """``(a, b) -> a^T M b`` on coordinate labels."""
    f = group.field
    M = [[f.coerce(x) for x in row] for row in matrix]

    def form(a, b):
        s = 0
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                if M[i][j]:
                    s = s + x * M[i][j] * y
        return f.coerce(s) if f.p is not None else f.normalize(s)

    return form


class GradedCarrier(Carrier):
    """Labels ``(coords, i)`` with coords in the group and i in J."""

    def __init__(self, group: GroupSpec, J: str = "zero", name: str = "A(Delta,J)", i_radius: int = 2,
                 offset=None):
        if J not in ("zero", "naturals"):
            raise GroupSpecViolation(f"J must be 'zero' or 'naturals', got {J!r}")
        self.group = group
        self.J = J
        self.name = name
        self.i_radius = i_radius
        self.offset = offset

    def contains(self, label) -> bool:
        try:
            a, i = label
        except (TypeError, ValueError):
            return False
        if not self.group.contains(a) or not isinstance(i, int) or i < 0:
            return False
        return self.J == "naturals" or i == 0

    def i_values(self, radius=None) -> range:
        return range(0, (self.i_radius if radius is None else radius) + 1) if self.J == "naturals" else range(1)

    def default_window(self, radius=None, i_radius=None) -> tuple:
        r = 2 if radius is None else radius
        return tuple((a, i) for a in self.group.window(r) for i in self.i_values(i_radius))

    def value(self, a):
        v = self.group.value(a)
        return v[0] if self.group.vdim == 1 else v

    def render_label(self, label) -> str:
        a, i = label
        f = self.group.field
        v = self.group.value(a)
        vs = f.render(v[0]) if len(v) == 1 else "(" + ",".join(f.render(x) for x in v) + ")"
        if self.group.rank > self.group.vdim or self.group.generators != tuple(
                tuple(1 if d == k else 0 for d in range(self.group.vdim)) for k in range(self.group.rank)):
            vs = "[" + ",".join(map(str, a)) + "]=" + vs
        return f"u({vs})" if self.J == "zero" else f"u({vs};{i})"

    def describe(self) -> dict:
        return {"name": self.name, "group": self.group.describe(), "J": self.J}


class FieldGradedCarrier(Carrier):
    """Labels ``(value, i)`` with the value any field element (the full group F)."""

    def __init__(self, field: Field, J: str = "zero", name: str = "A(F,J)", member: Callable | None = None,
                 window_values: tuple = (), i_radius: int = 2):
        self.field = field
        self.J = J
        self.name = name
        self.member = member
        self.window_values = tuple(window_values)
        self.i_radius = i_radius

    def contains(self, label) -> bool:
        try:
            v, i = label
        except (TypeError, ValueError):
            return False
        if not isinstance(i, int) or i < 0 or (self.J == "zero" and i != 0):
            return False
        return self.member is None or self.member(v)

    def default_window(self, radius=None) -> tuple:
        vals = self.window_values or tuple(range(-2, 3))
        irange = range(self.i_radius + 1) if self.J == "naturals" else range(1)
        return tuple((self.field.coerce(v), i) for v in vals for i in irange)

    def render_label(self, label) -> str:
        v, i = label
        vs = self.field.render(v)
        return f"u({vs})" if self.J == "zero" else f"u({vs};{i})"


class MonomialCarrier(Carrier):
    """Monomials x^a p^b with a, b >= 0."""

    name = "F[x,p]"

    def contains(self, label) -> bool:
        return (isinstance(label, tuple) and len(label) == 2
                and all(isinstance(x, int) and x >= 0 for x in label))

    def default_window(self, radius=None) -> tuple:
        r = 2 if radius is None else radius
        return tuple((a, b) for a in range(r + 1) for b in range(r + 1))

    def render_label(self, label) -> str:
        a, b = label
        parts = [s for s, e in (("x", a), ("p", b)) if e]
        parts = [f"{s}^{e}" if e > 1 else s for s, e in zip(parts, [e for e in (a, b) if e])]
        return "*".join(parts) or "1"


# ---------------------------------------------------------------- cocycles


class CocycleF:
    """Symmetric 2-cocycle f on a group with nonzero values; defaults to 1."""

    def __init__(self, group: GroupSpec, fn: Callable | None = None, table: dict | None = None):
        self.group = group
        self.fn = fn
        self.table = dict(table) if table else None

    def __call__(self, a, b):
        f = self.group.field
        if self.table is not None:
            key = (a, b) if (a, b) in self.table else (b, a)
            if key not in self.table:
                raise CocycleViolation(f"cocycle undefined on ({a}, {b})")
            return f.coerce(self.table[key])
        if self.fn is None:
            return 1
        return f.coerce(self.fn(a, b))

    def validate(self, window) -> None:
        rep = validate_side_conditions("Cocycle23", {"f": self, "group": self.group}, window)
        if not rep.passed:
            raise CocycleViolation(rep.describe())


# ---------------------------------------------------------------- indexed algebras


@dataclass(eq=False)
class IndexedAlgebra:
    """A commutative associative algebra with named derivations (and maybe a bracket)."""

    carrier: Carrier
    dot: Product
    derivations: dict
    bracket: Product | None = None
    name: str = "A"
    meta: dict = dc_field(default_factory=dict)

    @property
    def field(self) -> Field:
        return self.dot.field


def _graded_dot(group, carrier, f_cocycle=None, name="dot"):
    F = group.field

    def rule(x, y):
        (a, i), (b, j) = x, y
        c = 1 if f_cocycle is None else f_cocycle(a, b)
        return Element._trusted(F, {(group.add(a, b), i + j): c})

    return Rule(F, carrier, rule, name)


def _graded_d(group, carrier, component=0, with_i=True, name="d"):
    F = group.field

    def image(x):
        a, i = x
        out = {}
        v = group.value(a)[component]
        if v != 0:
            out[x] = v
        if with_i and i > 0:
            out[(a, i - 1)] = F.coerce(i)
        return Element(F, out)

    return LinearMap(F, image, name, carrier)


def indexed_algebra(kind: str, spec: dict | None = None) -> IndexedAlgebra:
    """Build one of ``ADeltaFJ``, ``AFullF``, ``PoissonXY``, ``GammaJ``.

    ``spec`` keys: ``field``, ``group`` (GroupSpec), ``J``, ``f`` (CocycleF),
    ``window`` (labels used to validate the cocycle).
    """
    spec = dict(spec or {})
    F = spec.get("field", QQ)
    J = spec.get("J", "zero")
    if kind == "ADeltaFJ":
        group = spec.get("group") or GroupSpec.integers(F)
        if group.vdim != 1:
            raise GroupSpecViolation("ADeltaFJ needs a group inside F")
        carrier = GradedCarrier(group, J, f"A({group.name},f,{J})")
        f = spec.get("f")
        if f is not None:
            f.validate(spec.get("window") or group.window(1))
        dot = _graded_dot(group, carrier, f, "dot")
        d = _graded_d(group, carrier, 0, True, "d")
        return IndexedAlgebra(carrier, dot, {"d": d}, None, carrier.name, {"group": group})
    if kind == "AFullF":
        carrier = FieldGradedCarrier(F, J, f"A(F,{J})", window_values=spec.get("window_values", ()))
        return _full_field_algebra(F, carrier)
    if kind == "PoissonXY":
        carrier = MonomialCarrier()

        def dot(x, y):
            return Element._trusted(F, {(x[0] + y[0], x[1] + y[1]): 1})

        def bracket(x, y):
            (a, b), (c, d) = x, y
            coeff = F.coerce(a * d - b * c)
            if coeff == 0:
                return None
            return Element._trusted(F, {(a + c - 1, b + d - 1): coeff})

        euler = LinearMap(F, lambda x: Element(F, {x: x[0] + x[1]}), "E", carrier)
        return IndexedAlgebra(carrier, Rule(F, carrier, dot, "dot"), {"E": euler},
                              Rule(F, carrier, bracket, "{,}"), "F[x,p]")
    if kind == "GammaJ":
        group = spec.get("group") or GroupSpec.lattice2(F)
        validate_gamma(group, J)
        carrier = GradedCarrier(group, J, f"A({group.name},{J})")
        dot = _graded_dot(group, carrier)
        d1 = _graded_d(group, carrier, 0, True, "d1")
        d2 = _graded_d(group, carrier, 1, False, "d2")
        return IndexedAlgebra(carrier, dot, {"d1": d1, "d2": d2}, None, carrier.name, {"group": group})
    raise ValueError(f"unknown indexed algebra kind {kind!r}")


def _full_field_algebra(F, carrier):
    def dot(x, y):
        return Element._trusted(F, {(F.normalize(F.add(x[0], y[0])), x[1] + y[1]): 1})

    def image(x):
        v, i = x
        out = {}
        if v != 0:
            out[x] = v
        if i > 0:
            out[(v, i - 1)] = F.coerce(i)
        return Element(F, out)

    return IndexedAlgebra(carrier, Rule(F, carrier, dot, "dot"), {"d": LinearMap(F, image, "d", carrier)},
                          None, carrier.name)


def validate_gamma(group: GroupSpec, J: str) -> None:
    if group.vdim != 2:
        raise GroupSpecViolation("Gamma must sit inside F^2")
    if J == "zero" and all(g[0] == 0 for g in group.generators):
        raise GroupSpecViolation("(J,0)+Gamma lies in (0,F)")
    if all(g[1] == 0 for g in group.generators):
        raise GroupSpecViolation("Gamma lies in (F,0)")


# ---------------------------------------------------------------- finite algebras


def fp_simple_novikov(p: int, k: int = 1, a=0, b=0, *, max_dim: int = DEFAULT_DIM_BOUND) -> Table:
    """Simple Novikov algebra of dimension p^k on sigma_j, j in [-1, p^k - 2]."""
    if not isinstance(p, int) or p <= 2:
        raise BadCharacteristic(f"need an odd prime, got {p!r}")
    try:
        F = Field(p)
    except ValueError as exc:
        raise BadCharacteristic(str(exc)) from None
    if k < 1:
        raise ValueError("k must be positive")
    n = p**k
    if n > max_dim:
        raise DimensionBound(f"p^k = {n} exceeds {max_dim}")
    top = n - 2
    a, b = F.coerce(a), F.coerce(b)
    labels = list(range(-1, top + 1))
    carrier = FiniteCarrier(labels, ["ς" + _sub(str(j)) for j in labels], f"N(p={p},k={k})")
    entries = {}
    for j1 in labels:
        for j2 in labels:
            acc = {}
            t = j1 + j2
            if -1 <= t <= top:
                _axpy(F, acc, F.coerce(binomial(t + 1, j2)), {t: 1})
            if j1 == -1 and j2 == 0:
                _axpy(F, acc, a, {top: 1})
            if j1 == -1 and j2 == -1:
                _axpy(F, acc, b, {top: 1})
            if acc:
                entries[(j1, j2)] = Element._trusted(F, acc)
    return Table(F, carrier, entries, f"sigma(p={p},k={k},a={a},b={b})")


def fp_irreducible_module(p: int, k: int = 1, a=0, b=0, lam=1, *, max_dim: int = DEFAULT_DIM_BOUND) -> NovikovModule:
    """Module on v_j over ``fp_simple_novikov(p, k, a, b)`` with parameter lambda."""
    alg = fp_simple_novikov(p, k, a, b, max_dim=max_dim)
    F = alg.field
    a, b, lam = F.coerce(a), F.coerce(b), F.coerce(lam)
    top = p**k - 2
    labels = list(range(-1, top + 1))
    carrier = FiniteCarrier(labels, ["v" + _sub(str(j)) for j in labels], f"M(p={p},k={k},lambda={lam})")

    def left(j1, j2):
        acc = {}
        t = j1 + j2
        if -1 <= t <= top:
            _axpy(F, acc, F.coerce(binomial(t + 1, j2)), {t: 1})
        if -1 <= t + 1 <= top and lam:
            _axpy(F, acc, F.mul(F.coerce(binomial(t + 2, j1 + 1)), lam), {t + 1: 1})
        if j1 == -1 and j2 == 0:
            _axpy(F, acc, a, {top: 1})
        return Element._trusted(F, acc)

    def right(j2, j1):
        acc = {}
        t = j1 + j2
        if -1 <= t <= top:
            _axpy(F, acc, F.coerce(binomial(t + 1, j1)), {t: 1})
        if j2 == -1 and j1 == 0:
            _axpy(F, acc, a, {top: 1})
        if j2 == -1 and j1 == -1:
            _axpy(F, acc, b, {top: 1})
        return Element._trusted(F, acc)

    flags = []
    if lam == 0 and a != 0:
        flags.append("lambda = 0 with a != 0: outside the irreducible family")
    return NovikovModule(alg, carrier, Rule(F, carrier, left, "left"), Rule(F, carrier, right, "right"),
                         carrier.name, flags)


def truncated_polynomials(field: Field, n: int) -> Table:
    """F[t]/(t^n) on the monomial basis 1, t, ..., t^(n-1)."""
    names = ["1"] + ["t" if e == 1 else f"t^{e}" for e in range(1, n)]
    carrier = FiniteCarrier(range(n), names, f"F[t]/(t^{n})")
    entries = {(i, j): Element._trusted(field, {i + j: 1}) for i in range(n) for j in range(n) if i + j < n}
    return Table(field, carrier, entries, f"F[t]/(t^{n})")


def one_dim_idempotent(field: Field = QQ) -> Table:
    carrier = FiniteCarrier([0], ["e"], "Fe")
    return Table(field, carrier, {(0, 0): Element._trusted(field, {0: 1})}, "e*e=e")


def direct_sum(*tables: Table) -> Table:
    field = tables[0].field
    labels, names, entries = [], [], {}
    for idx, t in enumerate(tables):
        for a in t.carrier.order:
            labels.append((idx, a))
            names.append(f"{t.carrier.render_label(a)}#{idx + 1}")
        for (a, b), v in t.entries.items():
            entries[((idx, a), (idx, b))] = v.map_labels(lambda k, idx=idx: (idx, k))
    return Table(field, FiniteCarrier(labels, names, "sum"), entries, "+".join(t.name for t in tables))


def virasoro_gd(field: Field = QQ) -> GDBialgebra:
    """The 1-dimensional GD bialgebra: e o e = e, zero bracket."""
    circ = one_dim_idempotent(field)
    return GDBialgebra(circ.carrier, Table(field, circ.carrier, {}, "0"), circ, "virasoro")


# ---------------------------------------------------------------- helpers


def _require(law, context, window, what):
    rep = law_check(law, context, window)
    if not rep.passed:
        raise LawViolation(rep)
    return rep


def _window(carrier, window):
    return carrier.default_window() if window is None else window


def novikov_from_derivation(A: Product, D: LinearMap, xi=0, *, window=None, check: bool = True) -> Product:
    """u o v = u D(v) + xi u v; ``xi`` is a scalar or an element of A."""
    F = A.field
    w = _window(A.carrier, window)
    if check:
        _require(LawId.COMM, A, w, "commutative")
        _require(LawId.ASSOC, A, w, "associative")
        _require(LawId.DERIVATION, (A, D), w, "derivation")
    if isinstance(xi, Element):
        xi_el = xi

        def rule(a, b):
            ua, ub = Element._trusted(F, {a: 1}), Element._trusted(F, {b: 1})
            return A(ua, D(ub)) + A(xi_el, A.on_labels(a, b))
    else:
        xs = _raw(F, xi)

        def rule(a, b):
            ua = Element._trusted(F, {a: 1})
            r = A(ua, Element._trusted(F, dict(D.basis_image(b))))
            if xs:
                r = r + A.on_labels(a, b).scale(xs)
            return r

    out = Rule(F, A.carrier, rule, f"o_xi[{A.name}]")
    if isinstance(A, Table):
        return Table.from_product(out, A.carrier, out.name)
    return out


def module_M_lambda(group: GroupSpec, J: str = "zero", xi=0, lam=0, *, radius: int = 2) -> NovikovModule:
    """The module M(lambda) = span u_{alpha+lambda,i} over N = span u_{alpha,i}, alpha in Delta."""
    F = group.field
    if group.vdim != 1:
        raise GroupSpecViolation("Delta must sit inside F")
    lam = F.coerce(lam)
    if J == "zero" and all(g[0] == 0 for g in group.generators):
        raise GroupSpecViolation("Delta + J = {0}")
    vals = sorted({group.scalar(a) for a in group.window(radius)})
    n_carrier = FieldGradedCarrier(F, J, f"N({group.name})", member=group.value_in_span, window_values=vals)
    m_vals = sorted({F.normalize(F.add(v, lam)) for v in vals})
    m_carrier = FieldGradedCarrier(F, J, f"M({F.render(lam)})",
                                   member=lambda v: group.value_in_span(F.sub(v, lam)), window_values=m_vals)
    base = _full_field_algebra(F, FieldGradedCarrier(F, J, "A(F,J)"))
    dot, d = base.dot, base.derivations["d"]
    if isinstance(xi, Element):
        xi_el = xi
    else:
        xi_el = Element(F, {(0, 0): xi})
    for k in xi_el.terms:
        if not n_carrier.contains(k):
            raise GroupSpecViolation("xi must lie in N")

    def circ(x, y):
        ux, uy = Element._trusted(F, {x: 1}), Element._trusted(F, {y: 1})
        return dot(ux, d(uy)) + dot(xi_el, dot.on_labels(x, y))

    alg = Rule(F, n_carrier, circ, "o")
    left = Rule(F, m_carrier, circ, "left")
    right = Rule(F, m_carrier, circ, "right")
    return NovikovModule(alg, m_carrier, left, right, m_carrier.name)


# ---------------------------------------------------------------- GD bialgebras


def gd_commutator(N: Product, *, window=None, check: bool = True) -> GDBialgebra:
    if check:
        _require(LawId.NOVIKOV, N, _window(N.carrier, window), "Novikov")
    return GDBialgebra(N.carrier, commutator(N, f"[{N.name}]-"), N, f"commutator({N.name})")


def solve_in_span(vectors, target, field: Field):
    """Coefficients c with sum c_i vectors[i] = target, or None."""
    n = len(target)
    rows = [[vectors[j][i] for j in range(len(vectors))] + [target[i]] for i in range(n)]
    R, piv = rref(rows, field)
    m = len(vectors)
    if m in piv:
        return None
    coeffs = [0] * m
    for row, c in zip(R, piv):
        coeffs[c] = row[m]
    return coeffs


def gd_witt(A: Table, *, check: bool = True) -> GDBialgebra:
    """Der(A) + A with the bracket and product built from derivations."""
    F = A.field
    if check:
        _require(LawId.COMM, A, None, "commutative")
        _require(LawId.ASSOC, A, None, "associative")
    ders = derivations_of(A)
    C = A.carrier
    n = C.dim
    mats = [d.matrix(C) for d in ders]
    flat = [[M[i][j] for i in range(n) for j in range(n)] for M in mats]

    def der_coords(M):
        c = solve_in_span(flat, [M[i][j] for i in range(n) for j in range(n)], F)
        if c is None:
            raise LawViolation.__new__(LawViolation)
        return {("d", k): x for k, x in enumerate(c) if x != 0}

    def mat_mul(X, Y):
        return [[F.coerce(sum(X[i][k] * Y[k][j] for k in range(n))) if F.p is not None
                 else F.normalize(sum(X[i][k] * Y[k][j] for k in range(n))) for j in range(n)] for i in range(n)]

    def mult_mat(y):
        """Matrix of u -> y*u."""
        return LinearMap(F, lambda a: A.basis_product(y, a), "mult").matrix(C)

    labels = [("d", k) for k in range(len(ders))] + [("a", a) for a in C.order]
    names = [f"D{k}" for k in range(len(ders))] + [C.render_label(a) for a in C.order]
    carrier = FiniteCarrier(labels, names, f"Der({C.name})+{C.name}")

    def lift(terms):
        return {("a", k): v for k, v in terms.items()}

    bracket = {}
    circ = {}
    for x in labels:
        for y in labels:
            if x[0] == "d" and y[0] == "d":
                P, Q = mats[x[1]], mats[y[1]]
                PQ, QP = mat_mul(P, Q), mat_mul(Q, P)
                bracket[(x, y)] = Element(F, der_coords([[F.sub(PQ[i][j], QP[i][j]) for j in range(n)] for i in range(n)]))
            elif x[0] == "d":
                bracket[(x, y)] = Element(F, lift(ders[x[1]].basis_image(y[1])))
            elif y[0] == "d":
                bracket[(x, y)] = Element(F, lift(ders[y[1]].basis_image(x[1]))).scale(-1)
            if y[0] == "a":
                if x[0] == "d":
                    circ[(x, y)] = Element(F, der_coords(mat_mul(mult_mat(y[1]), mats[x[1]])))
                else:
                    circ[(x, y)] = Element(F, lift(A.basis_product(y[1], x[1])))
    meta = {"derivations": [{C.render_label(a): Element(F, d.basis_image(a)).render(C.render_label)
                             for a in C.order} for d in ders]}
    return GDBialgebra(carrier, Table(F, carrier, bracket, "[,]"), Table(F, carrier, circ, "o"),
                       f"witt({C.name})", meta)


def gd_lie_poisson(P: IndexedAlgebra, D: LinearMap | None = None, xi=-2, *, window=None,
                   check: bool = True) -> GDBialgebra:
    """Bracket of P plus u o v = u D(v) + xi u v."""
    F = P.field
    D = D or next(iter(P.derivations.values()))
    xi = F.coerce(xi)
    w = _window(P.carrier, window)
    if check:
        ctx = {"dot": P.dot, "bracket": P.bracket, "carrier": P.carrier, "derivation": D, "xi": xi}
        for law in (LawId.COMM, LawId.ASSOC, LawId.SKEW, LawId.JACOBI, LawId.LIE_POISSON,
                    LawId.DERIVATION, LawId.XI_DERIVATION):
            _require(law, ctx, w, law.value)
    circ = novikov_from_derivation(P.dot, D, xi, check=False)
    circ.name = "o"
    return GDBialgebra(P.carrier, P.bracket, circ, f"lie-poisson({P.name},xi={F.render(xi)})")


def gd_two_derivations(A: IndexedAlgebra, variant: str = "V34", b=0, *, d1: LinearMap | None = None,
                       d2: LinearMap | None = None, window=None, check: bool = True) -> GDBialgebra:
    """Bialgebras from two commuting derivations (variant V34 or V35)."""
    F = A.field
    d1 = d1 or A.derivations["d1"]
    d2 = d2 or A.derivations["d2"]
    b = F.coerce(b)
    w = _window(A.carrier, window)
    if check:
        for D in (d1, d2):
            _require(LawId.DERIVATION, {"dot": A.dot, "derivation": D, "carrier": A.carrier}, w, "derivation")
        for x in w:
            ux = Element._trusted(F, {x: 1})
            if d1(d2(ux)) != d2(d1(ux)):
                raise NonCommutingDerivations(f"d1 d2 != d2 d1 on {A.carrier.render_label(x)}")
    dot = A.dot

    def e(x):
        return Element._trusted(F, {x: 1})

    def img(D, x):
        return Element._trusted(F, dict(D.basis_image(x)))

    if variant == "V34":
        def bracket(x, y):
            return (dot(img(d1, x), img(d2, y)) - dot(img(d2, x), img(d1, y))
                    + dot(e(x), img(d2, y)) - dot(img(d2, x), e(y)))

        def circ(x, y):
            return dot(e(x), img(d2, y))
    elif variant == "V35":
        def bracket(x, y):
            r = dot(img(d1, x), img(d2, y)) - dot(img(d2, x), img(d1, y))
            if b:
                r = r + (dot(e(x), img(d2, y)) - dot(img(d2, x), e(y))).scale(b)
            return r

        def circ(x, y):
            r = dot(e(x), img(d1, y))
            if b:
                r = r + dot.on_labels(x, y).scale(b)
            return r
    else:
        raise ValueError(f"unknown variant {variant!r}")
    tag = variant if variant == "V34" else f"V35,b={F.render(b)}"
    return GDBialgebra(A.carrier, Rule(F, A.carrier, bracket, "[,]"), Rule(F, A.carrier, circ, "o"),
                       f"two-derivations({A.name},{tag})")


# ---------------------------------------------------------------- section-4 families


@dataclass
class FamilySpec:
    family: str
    group: GroupSpec
    J: str = "zero"
    b: object = 0            # scalar for F43/F44/F45; group label for F49
    phi: AdditiveMap | None = None
    lam: object = 0
    phi_form: Callable | None = None
    a: object = 0
    theta: Callable | None = None
    xi: object = 0


def circ_b(group: GroupSpec, J: str, b, carrier=None) -> Rule:
    """u o_b v = u d(v) + b u v on A(Delta, J)."""
    F = group.field
    b = F.coerce(b)
    carrier = carrier or GradedCarrier(group, J, f"A({group.name},{J})")

    def rule(x, y):
        (a, i), (c, j) = x, y
        s = group.add(a, c)
        acc = {}
        _axpy(F, acc, F.add(group.scalar(c), b), {(s, i + j): 1})
        if j > 0:
            _axpy(F, acc, F.coerce(j), {(s, i + j - 1): 1})
        return Element._trusted(F, acc)

    return Rule(F, carrier, rule, f"o_{F.render(b)}")


def _family_b_value(spec: FamilySpec):
    F = spec.group.field
    if spec.family == "F49":
        return spec.group.scalar(tuple(spec.b))
    return F.coerce(spec.b)


def check_family_constraints(spec: FamilySpec) -> None:
    G = spec.group
    F = G.field
    fam = spec.family
    if G.vdim != 1:
        raise FamilyConstraintViolation("Delta must sit inside F")
    if fam in ("F45", "F49", "T45") and spec.J != "zero":
        raise FamilyConstraintViolation(f"{fam} requires J = {{0}}")
    if fam == "F44":
        if spec.phi is None:
            raise FamilyConstraintViolation("F44 needs phi")
        if G.value_in_span(F.coerce(spec.b)):
            raise FamilyConstraintViolation("F44 requires b outside Delta")
    if fam == "F45" and spec.phi_form is None:
        raise FamilyConstraintViolation("F45 needs a skew map phi(.,.)")
    if fam == "F49":
        blabel = tuple(spec.b) if isinstance(spec.b, (tuple, list)) else None
        if blabel is None or not G.contains(blabel) or all(x == 0 for x in blabel) or G.scalar(blabel) == 0:
            raise FamilyConstraintViolation("F49 requires 0 != b in Delta (given as a group label)")
        if spec.phi is None:
            raise FamilyConstraintViolation("F49 needs phi")
        if spec.theta is not None and spec.phi(blabel) != 0:
            raise FamilyConstraintViolation("theta must vanish unless phi(b) = 0")


def theta_from_maps(phi1: AdditiveMap, phi2: AdditiveMap, b=None) -> Callable:
    """theta(a, c) = phi1(a) phi2(c) - phi1(c) phi2(a); checks phi1(b) = 0 != phi2(b)."""
    F = phi1.group.field
    if b is not None:
        b = tuple(b)
        if phi1(b) != 0 or phi2(b) == 0:
            raise FamilyConstraintViolation("need phi1(b) = 0 and phi2(b) != 0")

    def theta(a, c):
        return F.sub(F.mul(phi1(a), phi2(c)), F.mul(phi1(c), phi2(a)))

    return theta


def phi_from_phi0(phi0: AdditiveMap) -> Callable:
    """phi(a, c) = a phi0(c) - c phi0(a) (field values of the labels)."""
    G = phi0.group
    F = G.field

    def phi(a, c):
        return F.normalize(F.sub(F.mul(G.scalar(a), phi0(c)), F.mul(G.scalar(c), phi0(a))))

    return phi


def bracket_family(spec: FamilySpec):
    """GD bialgebra (or, for T45, the Novikov product) of a section-4 family."""
    check_family_constraints(spec)
    G = spec.group
    F = G.field
    carrier = GradedCarrier(G, spec.J, f"A({G.name},{spec.J})")
    fam = spec.family
    if fam == "T45":
        return t45_product(G, spec.xi, carrier)
    bval = _family_b_value(spec)
    circ = circ_b(G, spec.J, bval, carrier)

    if fam == "F43":
        def br(x, y):
            (a, i), (c, j) = x, y
            s = G.add(a, c)
            acc = {}
            _axpy(F, acc, F.sub(G.scalar(c), G.scalar(a)), {(s, i + j): 1})
            if i + j > 0:
                _axpy(F, acc, F.coerce(j - i), {(s, i + j - 1): 1})
            return Element._trusted(F, acc)
    elif fam == "F44":
        phi, lam = spec.phi, F.coerce(spec.lam)

        def br(x, y):
            (a, i), (c, j) = x, y
            s = G.add(a, c)
            av, cv = G.scalar(a), G.scalar(c)
            acc = {}
            top = F.sub(F.mul(F.add(av, bval), phi(c)), F.mul(F.add(cv, bval), phi(a)))
            _axpy(F, acc, top, {(s, i + j): 1})
            if i + j > 0:
                low = F.add(F.mul(i, F.sub(phi(c), F.mul(lam, F.add(cv, bval)))),
                            F.mul(j, F.sub(F.mul(lam, F.add(av, bval)), phi(a))))
                _axpy(F, acc, low, {(s, i + j - 1): 1})
            return Element._trusted(F, acc)
    elif fam == "F45":
        phi, a_ = spec.phi_form, F.coerce(spec.a)

        def br(x, y):
            (a, _), (c, _) = x, y
            coeff = F.add(phi(a, c), F.mul(a_, F.sub(G.scalar(c), G.scalar(a))))
            return Element(F, {(G.add(a, c), 0): coeff})
    elif fam == "F49":
        phi, theta, blabel = spec.phi, spec.theta, tuple(spec.b)

        def br(x, y):
            (a, _), (c, _) = x, y
            s = G.add(a, c)
            acc = {}
            if theta is not None:
                _axpy(F, acc, F.coerce(theta(a, c)), {(G.add(s, blabel), 0): 1})
            coeff = F.sub(F.mul(F.add(G.scalar(a), bval), phi(c)), F.mul(F.add(G.scalar(c), bval), phi(a)))
            _axpy(F, acc, coeff, {(s, 0): 1})
            return Element._trusted(F, acc)
    else:
        raise FamilyConstraintViolation(f"unknown family {fam!r}")
    return GDBialgebra(carrier, Rule(F, carrier, br, f"[,]{fam}"), circ, f"{fam}")


def t45_product(group: GroupSpec, xi, carrier=None, *, window=None) -> Rule:
    """u_a o u_c = (c + xi) u_{a+c}; verifies that its commutator is (c - a) u_{a+c}."""
    F = group.field
    carrier = carrier or GradedCarrier(group, "zero", f"A({group.name},0)")
    if isinstance(xi, Element):
        xi_terms = dict(xi.terms)
        for k in xi_terms:
            if not carrier.contains(k):
                raise FamilyConstraintViolation("xi must lie in A(Delta,{0})")
    else:
        xi_terms = {(group.zero(), 0): F.coerce(xi)}

    def rule(x, y):
        (a, _), (c, _) = x, y
        s = group.add(a, c)
        acc = {}
        _axpy(F, acc, group.scalar(c), {(s, 0): 1})
        for (g, _), v in xi_terms.items():
            _axpy(F, acc, v, {(group.add(s, g), 0): 1})
        return Element._trusted(F, acc)

    prod = Rule(F, carrier, rule, "o_T45")
    w = carrier.default_window() if window is None else window
    for x in w:
        for y in w:
            lhs = prod.on_labels(x, y) - prod.on_labels(y, x)
            rhs = Element(F, {(group.add(x[0], y[0]), 0): F.sub(group.scalar(y[0]), group.scalar(x[0]))})
            if lhs != rhs:
                raise FamilyConstraintViolation(f"commutator identity fails at {x}, {y}")
    return prod


# ---------------------------------------------------------------- side conditions


def _scalar_report(name, passed, window, args=None, lhs=None, rhs=None, count=0, detail="", fmt=str, field=QQ):
    from .algcore import CheckReport

    def el(v):
        return Element(field, {"": v})

    if passed:
        return CheckReport(name, True, window, None, None, None, count, "", fmt)
    return CheckReport(name, False, window, args, el(lhs), el(rhs), count, detail,
                       lambda k: "" if k == "" else fmt(k))


def validate_side_conditions(which: str, data: dict, window=None):
    """Exact evaluation of a scalar side condition over all window triples."""
    G: GroupSpec = data["group"]
    F = G.field
    w = tuple(G.window(1) if window is None else window)
    fmt = lambda a: "(" + ",".join(map(str, a)) + ")"
    wdesc = {"labels": [fmt(a) for a in w]}
    count = 0

    def fail(args, lhs, rhs, detail):
        return _scalar_report(which, False, wdesc, args, lhs, rhs, count, detail, fmt, F)

    if which == "Cocycle23":
        f = data["f"]
        for a, c in itertools.product(w, repeat=2):
            count += 1
            if f(a, c) == 0:
                return fail((a, c), f(a, c), 1, "f must be nonzero")
            if f(a, c) != f(c, a):
                return fail((a, c), f(a, c), f(c, a), "symmetry")
        for a, c, g in itertools.product(w, repeat=3):
            count += 1
            lhs = F.mul(f(a, c), f(G.add(a, c), g))
            rhs = F.mul(f(a, G.add(c, g)), f(c, g))
            if lhs != rhs:
                return fail((a, c, g), lhs, rhs, "cocycle")
        return _scalar_report(which, True, wdesc, count=count)
    if which == "Phi46_47":
        phi, S0, a_ = data["phi"], data.get("S0") or (lambda x, y, z: 0), F.coerce(data.get("a", 0))
        for x, y in itertools.product(w, repeat=2):
            count += 1
            if phi(x, y) != F.neg(phi(y, x)):
                return fail((x, y), phi(x, y), F.neg(phi(y, x)), "phi skew-symmetry")
        for al, be, ga in itertools.product(w, repeat=3):
            count += 1
            s = F.coerce(S0(al, be, ga))
            for perm in itertools.permutations((al, be, ga)):
                if F.coerce(S0(*perm)) != s:
                    return fail((al, be, ga), s, F.coerce(S0(*perm)), "S0 symmetry")
            av, bv, gv = G.scalar(al), G.scalar(be), G.scalar(ga)
            lhs = F.coerce(phi(G.add(be, ga), al))
            rhs = F.add(F.add(F.coerce(phi(ga, al)), F.coerce(phi(be, al))), F.mul(av, s))
            if lhs != rhs:
                return fail((al, be, ga), lhs, rhs, "additivity defect of phi")
            cyc = F.add(F.add(F.mul(gv, phi(al, be)), F.mul(av, phi(be, ga))), F.mul(bv, phi(ga, al)))
            lhs = F.mul(cyc, F.sub(s, a_))
            if lhs != 0:
                return fail((al, be, ga), lhs, 0, "cyclic term times (S0 - a)")
        return _scalar_report(which, True, wdesc, count=count)
    if which == "Theta410_411":
        theta, b = data["theta"], tuple(data["b"])
        bv = G.scalar(b)
        th = lambda x, y: F.coerce(theta(x, y))
        for x, y in itertools.product(w, repeat=2):
            count += 1
            if th(x, y) != F.neg(th(y, x)):
                return fail((x, y), th(x, y), F.neg(th(y, x)), "theta skew-symmetry")
        for al, be, ga in itertools.product(w, repeat=3):
            count += 1
            av, bev = G.scalar(al), G.scalar(be)
            lhs = F.mul(F.add(av, bv), F.sub(F.sub(th(G.add(al, ga), be), th(ga, be)), th(al, be)))
            rhs = F.mul(F.add(bev, bv), F.sub(F.sub(th(G.add(be, ga), al), th(ga, al)), th(be, al)))
            if lhs != rhs:
                return fail((al, be, ga), lhs, rhs, "theta shifted-additivity condition")
            s = 0
            for x, y, z in ((al, be, ga), (be, ga, al), (ga, al, be)):
                s = F.add(s, F.mul(th(x, y), th(G.add(G.add(x, y), b), z)))
            if s != 0:
                return fail((al, be, ga), s, 0, "theta cyclic condition")
        return _scalar_report(which, True, wdesc, count=count)
    raise UnknownCondition(which)
