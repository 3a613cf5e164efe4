import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gdbialg.algcore import FiniteCarrier, GDBialgebra, LawId, Table, law_check
from gdbialg.conformal import ConformalStructure
from gdbialg.constructions import fp_irreducible_module, fp_simple_novikov
from gdbialg.fileio import (
    ParseError, canonicalize, document_from, dumps, parse_algebra_file, recipe_document, serialize,
)
from gdbialg.fixtures import fixture_bytes, fixture_names
from gdbialg.recipes import RecipeError, build
from gdbialg.scalars import GF, QQ, FieldError


@pytest.mark.parametrize("name", fixture_names())
def test_fixture_is_canonical(name):
    data = fixture_bytes(name)
    assert canonicalize(data) == data
    assert data.endswith(b"\n") and not data.endswith(b"\n\n")


@pytest.mark.parametrize("name", fixture_names())
def test_fixture_loads(name):
    assert parse_algebra_file(fixture_bytes(name)).object() is not None


def test_inverse_in_small_prime_field():
    doc = parse_algebra_file('{"field": "F5", "basis": ["e"], "products": {"circ": [[0, 0, [[0, "1/3"]]]]}}')
    assert doc.field == GF(5)
    assert doc.products["circ"][(0, 0)] == {0: 2}


def test_rational_coefficients():
    doc = parse_algebra_file('{"field": "Q", "basis": ["e"], "products": {"circ": [[0, 0, [[0, "-2/4"]]]]}}')
    assert doc.products["circ"][(0, 0)] == {0: Fraction(-1, 2)}
    assert b'"-1/2"' in serialize(doc)


@pytest.mark.parametrize("tag", ["F2", "F4", "F1", "G7"])
def test_bad_fields_rejected(tag):
    with pytest.raises(FieldError):
        parse_algebra_file(json.dumps({"field": tag, "basis": ["e"], "products": {"circ": []}}))


def test_json_error_reports_position():
    with pytest.raises(ParseError) as ei:
        parse_algebra_file(fixture_bytes("malformed.txt"))
    assert ei.value.where == "line 2 column 1"


@pytest.mark.parametrize("doc,where", [
    ({"field": "Q", "basis": ["e"], "products": {"star": []}}, "products.star"),
    ({"field": "Q", "basis": ["e"], "products": {"circ": [[0, 3, []]]}}, "products.circ"),
    ({"field": "Q", "basis": ["e"], "products": {}}, "products"),
    ({"field": "Q", "basis": ["e"], "products": {"circ": []}, "extra": 1}, "$"),
    ({"basis": ["e"], "products": {"circ": []}}, "field"),
    ({"field": "Q", "format": "other/2", "basis": ["e"], "products": {"circ": []}}, "format"),
])
def test_structural_errors_name_the_location(doc, where):
    with pytest.raises(ParseError) as ei:
        parse_algebra_file(json.dumps(doc))
    assert ei.value.where.startswith(where)


def test_non_utf8_rejected():
    with pytest.raises(ParseError):
        parse_algebra_file(b"\xff\xfe")


def test_module_round_trip():
    M = fp_irreducible_module(3, 1, 1, 0, 1)
    doc = document_from(M, "m")
    back = parse_algebra_file(serialize(doc))
    assert serialize(back) == serialize(doc)
    assert law_check(LawId.MODULE_NOVIKOV, back.object()).passed


def test_table_round_trip_preserves_laws():
    A = fp_simple_novikov(5, 1, 1, 0)
    back = parse_algebra_file(serialize(document_from(A))).object()
    assert law_check(LawId.NOVIKOV, back).passed


def test_recipe_document_rebuilds():
    doc = recipe_document(QQ, "circ_b", {"group": "Z", "b": "1/2"})
    again = parse_algebra_file(serialize(doc))
    assert again.recipe == doc.recipe
    assert again.object() is doc.object()


def test_unknown_factory():
    with pytest.raises(RecipeError):
        build({"factory": "nope", "params": {}})
    with pytest.raises(ParseError):
        parse_algebra_file('{"field": "Q", "recipe": {"factory": "nope"}}')


def test_conformal_round_trip():
    doc = parse_algebra_file(fixture_bytes("virasoro_conformal.json"))
    obj = doc.object()
    assert isinstance(obj, ConformalStructure)
    assert serialize(document_from(obj, doc.name)) == fixture_bytes("virasoro_conformal.json")


def test_dumps_layout():
    assert dumps({"b": [1, [2, [3]]], "a": 1}) == '{\n "a": 1,\n "b": [1, [2, [3]]]\n}\n'


@st.composite
def random_gd(draw):
    n = draw(st.integers(1, 3))
    p = draw(st.sampled_from([0, 3, 7]))
    field = QQ if p == 0 else GF(p)
    C = FiniteCarrier(range(n), [f"x{i}" for i in range(n)])
    coeff = st.fractions(min_value=-3, max_value=3, max_denominator=4) if p == 0 else st.integers(0, p - 1)

    def table():
        entries = {}
        for i in range(n):
            for j in range(n):
                terms = {k: field.coerce(draw(coeff)) for k in range(n)}
                entries[(i, j)] = {k: c for k, c in terms.items() if c}
        return Table(field, C, entries)

    return GDBialgebra(C, table(), table())


@given(random_gd())
def test_random_round_trip(g):
    data = serialize(document_from(g, "r"))
    back = parse_algebra_file(data)
    assert serialize(back) == data
    obj = back.object()
    for x in range(g.carrier.dim):
        for y in range(g.carrier.dim):
            assert obj.circ.on_labels(x, y).terms == g.circ.on_labels(x, y).terms
            assert obj.bracket.on_labels(x, y).terms == g.bracket.on_labels(x, y).terms
