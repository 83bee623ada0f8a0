import math
import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from lacunary.lattice import IntMatrix
from lacunary.osculating import (
    VERDICT_NONE,
    OsculatingInstance,
    _pair_resultant_vanishes,
    build_minor_forms,
    hypersurface_part,
    in_resultant_variety,
    minor_system,
    pirola_check,
    rank,
)
from lacunary.poly import SparsePoly, divides
from lacunary.reduction import ReductionConfig

increasing = st.integers(2, 4).flatmap(
    lambda n: st.lists(st.integers(1, 40), min_size=n, max_size=n, unique=True).map(lambda v: tuple(sorted(v)))
).filter(lambda a: math.gcd(*a) == 1)


def sympy_minor(a, deleted):
    xs = sympy.symbols(f"x0:{len(a) + 1}")
    ex = (0,) + tuple(a)
    N = len(a)
    rows = [[sympy.Integer(e) ** p for p in range(N - 1)] + [xs[i]] for i, e in enumerate(ex) if i != deleted]
    det = sympy.expand(sympy.Matrix(rows).det())
    return tuple(int(det.coeff(x)) for x in xs)


def coeffs(L: SparsePoly):
    n = L.nvars
    return tuple(int(L.coefficient(tuple(int(i == j) for i in range(n)))) for j in range(n))


def test_n2_forms_match_cofactor_expansion():
    L1, L2 = build_minor_forms(OsculatingInstance((1, 2)))
    assert coeffs(L1) == sympy_minor((1, 2), 0) == (0, -1, 1)
    assert coeffs(L2) == sympy_minor((1, 2), 1) == (-1, 0, 1)


def test_n3_forms_contain_torsion_point():
    inst = OsculatingInstance((1, 2, 3))
    L1, L2 = build_minor_forms(inst)
    assert L1.evaluate((1, 1, 1, 1)) == 0 and L2.evaluate((1, 1, 1, 1)) == 0
    assert rank(inst.matrix([1, 1, 1, 1])) < inst.N
    assert rank([coeffs(L1), coeffs(L2)]) == 2


def test_rejects_bad_instances():
    with pytest.raises(ValueError):
        OsculatingInstance((2, 4, 6))
    with pytest.raises(ValueError):
        OsculatingInstance((3, 2, 5))
    with pytest.raises(ValueError):
        OsculatingInstance((0, 1, 2))


@settings(max_examples=60, deadline=None)
@given(increasing)
def test_forms_vanish_to_order_n_minus_1(a):
    inst = OsculatingInstance(a)
    N = inst.N
    t = SparsePoly.var(1, 0)
    bound = math.factorial(N) * inst.D ** (N * N)
    for L, deleted in zip(build_minor_forms(inst), (0, 1)):
        c = coeffs(L)
        assert c == sympy_minor(a, deleted)
        assert max(map(abs, c)) <= bound
        f = SparsePoly.from_dict(1, {(e,): x for e, x in zip((0,) + a, c)})
        assert divides((t - 1) ** (N - 1), f)


def test_minor_system_shape():
    sys = minor_system(OsculatingInstance((1, 3, 7)))
    assert sys.s == 2 and sys.a == (1, 3, 7)


def test_pair_resultant():
    # (y1 - 2)(y2 - 3) and (y1 - 2)(y2 + 1): common factor depends on y1 only
    y1, y2 = SparsePoly.var(2, 0), SparsePoly.var(2, 1)
    P, Q = (y1 - 2) * (y2 - 3), (y1 - 2) * (y2 + 1)
    sp, sq = P.support, Q.support
    rng = random.Random(1)
    assert _pair_resultant_vanishes(P, sp, Q, sq, 0, rng)
    assert not _pair_resultant_vanishes(P, sp, Q, sq, 1, rng)
    R, S = (y1 - 2) * (y2 - 3), (y1 + 5) * (y2 + 1)
    assert not _pair_resultant_vanishes(R, R.support, S, S.support, 0, rng)


def test_trivial_structure_is_torsion_only():
    # B = a as one column: every minor vanishes at y = 1, nothing else in common
    a = (1, 2, 3)
    B = IntMatrix.column(a)
    assert in_resultant_variety(a, B)
    comp = hypersurface_part(a, B)
    assert divides(SparsePoly.var(1, 0) - 1, comp)
    rep = pirola_check(OsculatingInstance(a), ReductionConfig(bound=3), theta_box=100)
    assert rep.verdict == VERDICT_NONE
    assert any(w.B.ncols == 1 and w.in_W and not w.candidate for w in rep.witness_subspaces)


@pytest.mark.parametrize("a", [(1, 2, 3), (1, 3, 7), (2, 3, 25), (3, 5, 8), (1, 2, 4, 5)])
def test_pirola_small_instances(a):
    bound = 4 if len(a) == 3 else 1
    rep = pirola_check(OsculatingInstance(a), ReductionConfig(bound=bound), theta_box=200)
    assert rep.verdict == VERDICT_NONE
    assert rep.torsion_point_flagged
    assert rep.discrepancies == ()
    for w in rep.witness_subspaces:
        # both routes agree, and every checked theta factors a
        assert w.in_W == (not w.component.is_monomial)
        assert tuple(sum(x * y for x, y in zip(row, w.theta)) for row in w.B.data) == a


def test_report_json():
    rep = pirola_check(OsculatingInstance((1, 3, 7)), ReductionConfig(bound=2))
    obj = rep.to_json()
    assert obj["verdict"] == VERDICT_NONE
    assert obj["torsion_point"]["rank_deficient"] is True
    assert obj["certificate"]["k"] == rep.certificate.k


def test_n_ceiling():
    with pytest.raises(ValueError):
        pirola_check(OsculatingInstance((1, 2, 3, 4, 5)), ReductionConfig(bound=1))
