"""Named factories with JSON parameters.

A recipe ``{"factory": name, "params": {...}}`` rebuilds a rule-based object
(infinite carriers, conformal structures).  ``materialize`` turns finite
results into table documents instead.  Scalars in params are strings such as
``"1/2"``; groups are ``"Z"``, ``"Z^2"`` or a list of generators; graded
labels are nested lists, e.g. ``[[0, 1], 0]``.
"""
from __future__ import annotations

import json
from typing import Callable

from .algcore import GDBialgebra, Product, perturb_entry
from .scalars import QQ, Field

_CACHE: dict = {}


class RecipeError(ValueError):
    pass


def _tup(x):
    return tuple(_tup(y) for y in x) if isinstance(x, list) else x


def _group(field: Field, spec, default: str = "Z"):
    from .constructions import GroupSpec
    spec = default if spec is None else spec
    if spec == "Z":
        return GroupSpec(field, [1], name="Z")
    if spec == "Z^2":
        return GroupSpec(field, [(1, 0), (0, 1)], name="Z^2")
    if isinstance(spec, list) and spec:
        gens = [tuple(str(c) for c in g) if isinstance(g, list) else str(g) for g in spec]
        return GroupSpec(field, gens, name="Delta")
    raise RecipeError(f"bad group {spec!r}")


def _need(params, key):
    if key not in params:
        raise RecipeError(f"missing parameter {key!r}")
    return params[key]


def _source(params, field):
    from .fileio import parse_document
    src = _need(params, "source")
    doc = parse_document(src)
    if doc.field != field:
        raise RecipeError("source document is over a different field")
    return doc.object()


def _additive(G, values):
    from .constructions import AdditiveMap
    return AdditiveMap(G, [str(v) for v in values])


# ---------------------------------------------------------------- builders


def _circ_b(p, F):
    from .constructions import circ_b
    return circ_b(_group(F, p.get("group")), p.get("J", "zero"), str(p.get("b", "0")))


def _gd_commutator(p, F):
    from .constructions import gd_commutator
    if "source" in p:
        return gd_commutator(_source(p, F))
    return gd_commutator(_circ_b(p, F))


def _gd_lie_poisson(p, F):
    from .constructions import gd_lie_poisson, indexed_algebra
    return gd_lie_poisson(indexed_algebra("PoissonXY", {"field": F}), xi=str(p.get("xi", "-2")))


def _gd_two_derivations(p, F):
    from .constructions import gd_two_derivations, indexed_algebra
    G = _group(F, p.get("group"), "Z^2")
    A = indexed_algebra("GammaJ", {"field": F, "group": G, "J": p.get("J", "zero")})
    return gd_two_derivations(A, p.get("variant", "V34"), str(p.get("b", "0")))


def _bracket_family(p, F):
    from .constructions import FamilySpec, bilinear_form, bracket_family, phi_from_phi0, theta_from_maps
    G = _group(F, p.get("group"))
    fam = _need(p, "family")
    b = p.get("b", "0")
    b = _tup(b) if isinstance(b, list) else str(b)
    spec = FamilySpec(fam, G, p.get("J", "zero"), b, lam=str(p.get("lam", "0")),
                      a=str(p.get("a", "0")), xi=str(p.get("xi", "0")))
    if "phi" in p:
        spec.phi = _additive(G, p["phi"])
    if "phi_form" in p:
        spec.phi_form = bilinear_form(G, [[str(c) for c in row] for row in p["phi_form"]])
    if "phi0" in p:
        spec.phi_form = phi_from_phi0(_additive(G, p["phi0"]))
    if "theta" in p:
        phi1, phi2 = p["theta"]
        spec.theta = theta_from_maps(_additive(G, phi1), _additive(G, phi2), b if isinstance(b, tuple) else None)
    return bracket_family(spec)


def _module_m_lambda(p, F):
    from .constructions import module_M_lambda
    return module_M_lambda(_group(F, p.get("group")), p.get("J", "zero"), str(p.get("xi", "0")),
                           str(p.get("lambda", "0")))


def _indexed_algebra(p, F):
    from .constructions import indexed_algebra
    kind = _need(p, "kind")
    spec = {"field": F, "J": p.get("J", "zero")}
    if kind in ("ADeltaFJ", "GammaJ"):
        spec["group"] = _group(F, p.get("group"), "Z" if kind == "ADeltaFJ" else "Z^2")
    A = indexed_algebra(kind, spec)
    ctx = {"dot": A.dot, "carrier": A.carrier, "derivation": next(iter(A.derivations.values()))}
    if A.bracket is not None:
        ctx["bracket"] = A.bracket
    return ctx


def _novikov_from_derivation(p, F):
    from .constructions import novikov_from_derivation
    ctx = _indexed_algebra(p, F)
    return novikov_from_derivation(ctx["dot"], ctx["derivation"], str(p.get("xi", "0")))


def _t45(p, F):
    from .constructions import t45_product
    return t45_product(_group(F, p.get("group")), str(p.get("xi", "0")))


def _perturb_entry(p, F):
    obj = _source(p, F)
    which = p.get("product", "circ")
    a, b, lbl = _tup(_need(p, "a")), _tup(_need(p, "b")), _tup(_need(p, "label"))
    delta = F.coerce(str(p.get("delta", "1")))
    if isinstance(obj, GDBialgebra):
        if which == "circ":
            return GDBialgebra(obj.carrier, obj.bracket, perturb_entry(obj.circ, a, b, lbl, delta), obj.name + "*")
        if which == "bracket":
            return GDBialgebra(obj.carrier, perturb_entry(obj.bracket, a, b, lbl, delta), obj.circ, obj.name + "*")
        raise RecipeError(f"no product {which!r}")
    if isinstance(obj, Product):
        return perturb_entry(obj, a, b, lbl, delta)
    raise RecipeError("perturb_entry needs a product or bialgebra source")


def _from_gd(p, F):
    from .conformal import from_gd
    gdb = _source(p, F)
    if not isinstance(gdb, GDBialgebra):
        raise RecipeError("from_gd needs a bialgebra source")
    return from_gd(gdb, window=_window_param(gdb.carrier, p))


def _window_param(carrier, p):
    r = p.get("window_radius")
    return None if r is None else carrier.default_window(int(r))


def _build_r1(p, F):
    from .conformal import build_R1
    return build_R1(_group(F, p.get("group"), "Z^2"), p.get("J", "zero"), table=p.get("table", "printed"))


def _build_r2(p, F):
    from .conformal import build_R2
    return build_R2(_group(F, p.get("group"), "Z^2"), str(p.get("b", "0")), p.get("J", "zero"),
                    table=p.get("table", "printed"))


def _perturb_structure(p, F):
    from .conformal import ConformalStructure, perturb_structure
    S = _source(p, F)
    if not isinstance(S, ConformalStructure):
        raise RecipeError("perturb_structure needs a conformal source")
    return perturb_structure(S, _tup(_need(p, "u")), _tup(_need(p, "v")), tuple(_need(p, "ij")),
                             _tup(_need(p, "label")), str(p.get("delta", "1")))


BUILDERS: dict[str, Callable] = {
    "bracket_family": _bracket_family,
    "build_r1": _build_r1,
    "build_r2": _build_r2,
    "circ_b": _circ_b,
    "from_gd": _from_gd,
    "gd_commutator": _gd_commutator,
    "gd_lie_poisson": _gd_lie_poisson,
    "gd_two_derivations": _gd_two_derivations,
    "indexed_algebra": _indexed_algebra,
    "module_m_lambda": _module_m_lambda,
    "novikov_from_derivation": _novikov_from_derivation,
    "perturb_entry": _perturb_entry,
    "perturb_structure": _perturb_structure,
    "t45_product": _t45,
}


def build(recipe: dict, field: Field = QQ):
    name = recipe.get("factory")
    fn = BUILDERS.get(name)
    if fn is None:
        raise RecipeError(f"unknown factory {name!r}")
    key = (field.tag, json.dumps(recipe, sort_keys=True))
    hit = _CACHE.get(key)
    if hit is None:
        hit = fn(recipe.get("params", {}), field)
        _CACHE[key] = hit
    return hit


validate = build
