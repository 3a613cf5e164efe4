"""Package module checks against the independent numpy oracle."""
import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gdbialg.algcore import LawId, NovikovModule, law_check, perturb_entry
from gdbialg.constructions import fp_irreducible_module, fp_simple_novikov
from oracles.module_oracle import failures_from_tensors, module_failures, tensors

PARAMS = [(p, 1, a, b, lam) for p in (3, 5) for a, b in ((0, 0), (1, 0), (0, 1)) for lam in range(p)]
PARAMS += [(3, 2, 0, 0, 1), (3, 2, 1, 0, 2)]


def dense(prod, left_carrier, right_carrier, out_carrier, p):
    n1, n2, n3 = (len(c.default_window()) for c in (left_carrier, right_carrier, out_carrier))
    T = np.zeros((n1, n2, n3), dtype=np.int64)
    for i, x in enumerate(left_carrier.default_window()):
        for j, y in enumerate(right_carrier.default_window()):
            for lbl, c in prod.on_labels(x, y).terms.items():
                T[i, j, lbl + 1] = c
    return T % p


def package_tensors(M, p):
    A = M.algebra
    return (dense(A, A.carrier, A.carrier, A.carrier, p),
            dense(M.left, A.carrier, M.carrier, M.carrier, p),
            dense(M.right, M.carrier, A.carrier, M.carrier, p))


@pytest.mark.parametrize("p,k,a,b,lam", PARAMS)
def test_structure_tensors_match(p, k, a, b, lam):
    M = fp_irreducible_module(p, k, a, b, lam)
    for mine, theirs in zip(package_tensors(M, p), tensors(p, k, a, b, lam)):
        assert (mine == theirs).all()


@pytest.mark.parametrize("p,k,a,b,lam", PARAMS)
def test_verdicts_match(p, k, a, b, lam):
    rep = law_check(LawId.MODULE_NOVIKOV, fp_irreducible_module(p, k, a, b, lam))
    assert rep.passed == (module_failures(p, k, a, b, lam) == [])


def test_algebra_tensor_matches_simple_novikov():
    A = fp_simple_novikov(5, 1, 1, 1)
    assert (dense(A, A.carrier, A.carrier, A.carrier, 5) == tensors(5, 1, 1, 1, 0)[0]).all()


@given(st.sampled_from(["left", "right"]), st.integers(-1, 1), st.integers(-1, 1), st.integers(-1, 1),
       st.sampled_from([(0, 0, 1), (1, 0, 2), (0, 1, 0)]))
def test_perturbed_modules_agree(side, x, y, z, abl):
    a, b, lam = abl
    M = fp_irreducible_module(3, 1, a, b, lam)
    prod = getattr(M, side)
    P = NovikovModule(M.algebra, M.carrier, perturb_entry(prod, x, y, z) if side == "left" else M.left,
                      perturb_entry(prod, x, y, z) if side == "right" else M.right)
    rep = law_check(LawId.MODULE_NOVIKOV, P)
    bad = failures_from_tensors(*package_tensors(P, 3), 3)
    assert rep.passed == (bad == [])
    if not rep.passed:
        assert rep.detail in bad


def test_every_placement_is_exercised():
    seen = set()
    M = fp_irreducible_module(3, 1, 0, 0, 1)
    for side, x, y, z in itertools.product(("left", "right"), (-1, 0, 1), (-1, 0, 1), (-1, 0, 1)):
        prod = getattr(M, side)
        pert = perturb_entry(prod, x, y, z)
        P = NovikovModule(M.algebra, M.carrier, pert if side == "left" else M.left,
                          pert if side == "right" else M.right)
        seen.update(failures_from_tensors(*package_tensors(P, 3), 3))
    assert len(seen) >= 4
