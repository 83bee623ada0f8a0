import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lacunary.gcd_engine import (
    GcdCertificate,
    SparseSystem,
    cyclotomic_poly,
    exceptional_subsets,
    sparse_gcd,
    strip_cyclotomic,
    structural_failures,
    torsion_orders,
)
from lacunary.oracle import cyclotomic, densify, dense_gcd_many
from lacunary.poly import SparsePoly
from lacunary.reduction import ReductionConfig

t = SparsePoly.var(1, 0)


def pq_family(p, q):
    # (t^p - 2)(t^q - 3) and (t^p - 2)(t^q - 5)
    return SparseSystem(((6, -3, -2, 1), (10, -5, -2, 1)), (p, q, p + q))


def test_pq_family_small_matches_oracle():
    sys = pq_family(3, 5)
    cert = sparse_gcd(sys, ReductionConfig(bound=1))
    assert densify(cert.g).monic() == dense_gcd_many([densify(f) for f in sys.polys()])
    assert cert.g == t ** 3 - 2


def test_pq_family_large():
    p, q = 10 ** 6 + 3, 10 ** 6 + 33
    cert = sparse_gcd(pq_family(p, q), ReductionConfig(bound=1))
    assert cert.k == 1
    assert cert.G.nvars == 2 and cert.G.is_monomial is False
    assert cert.g == t ** p - 2
    assert structural_failures(pq_family(p, q), cert) == []


def test_single_polynomial():
    sys = SparseSystem(((4, -4, 1),), (1, 2))
    cert = sparse_gcd(sys)
    assert cert.g == 4 - 4 * t + t ** 2


def test_binomials_with_coprime_exponents():
    sys = SparseSystem(((-1, 1, 0), (-1, 0, 1)), (7, 11))
    cert = sparse_gcd(sys)
    assert cert.g.is_constant
    assert 1 in cert.torsion.orders


def test_torsion_orders_examples():
    assert torsion_orders(((1, 1, 1),), (2, 4), 6).orders == (3, 6)
    assert torsion_orders(((-2, 1),), (1,), 50).orders == ()
    assert 1 in torsion_orders(((1, -1),), (10 ** 9,), 5).orders


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=2, max_size=4), st.integers(2, 9))
def test_torsion_orders_match_dense(coeffs, maxexp):
    rng = random.Random(sum(coeffs) + maxexp)
    a = sorted(rng.sample(range(1, 3 * maxexp), len(coeffs) - 1))
    gamma = (tuple(coeffs),)
    if not any(coeffs[1:]):
        return
    f = SparsePoly.from_dict(1, {(0,): coeffs[0], **{(e,): c for e, c in zip(a, coeffs[1:])}})
    if f.is_zero:
        return
    bound = 40
    found = torsion_orders(gamma, a, bound).orders
    dense = densify(f)
    expected = tuple(n for n in range(1, bound + 1) if dense.divmod(cyclotomic(n))[1].is_zero)
    assert found == expected


def test_exceptional_example_one():
    sys = SparseSystem(((1, -1, -1, 1),), (3, 5, 8))
    exc = exceptional_subsets(sys, ReductionConfig(bound=1))
    assert (1,) in exc


def test_exceptional_generic_is_empty():
    sys = SparseSystem(((3, -7, 2, 5), (-4, 1, 6, -3)), (1000003, 1000033, 999983))
    assert exceptional_subsets(sys) == []


def test_exceptional_constant_polynomial():
    sys = SparseSystem(((5, 0, 0),), (1, 2))
    assert exceptional_subsets(sys) == []


def test_system_validation():
    with pytest.raises(ValueError):
        SparseSystem(((1, 1),), (0,))
    with pytest.raises(ValueError):
        SparseSystem(((1, 1, 1),), (2, 2))
    with pytest.raises(ValueError):
        SparseSystem(((1, 1, 1),), (2, 4))
    with pytest.raises(ValueError):
        SparseSystem(((0, 0),), (1,))
    sys, d = SparseSystem.normalized(((1, 1, 1),), (2, 4))
    assert d == 2 and sys.a == (1, 2)


def test_cyclotomic_helpers():
    assert cyclotomic_poly(12) == 1 - t ** 2 + t ** 4
    assert strip_cyclotomic((t ** 6 - 1) * (t - 2)) == t - 2
    assert strip_cyclotomic(t ** 2 + t + 1).is_constant


def test_certificate_json_round_trip():
    sys = pq_family(3, 5)
    cert = sparse_gcd(sys, ReductionConfig(bound=1))
    back = GcdCertificate.from_json(cert.to_json())
    assert back.to_json() == cert.to_json()
    assert SparseSystem.from_json(sys.to_json()) == sys


def test_tampered_certificate_fails_structurally():
    sys = pq_family(3, 5)
    cert = sparse_gcd(sys, ReductionConfig(bound=1))
    bad = GcdCertificate(cert.reduction, cert.G, cert.g * (t - 3), cert.fallback, cert.exceptional, cert.torsion)
    assert structural_failures(sys, bad)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 40), st.integers(2, 40), st.integers(-4, 4))
def test_planted_common_factor_found(p, q, c):
    if p == q or c == 0:
        return
    from math import gcd
    if gcd(p, q) != 1:
        return
    # (t^p - c)(t^q - 3), (t^p - c)(t^q - 5): the gcd contains t^p - c
    sys = SparseSystem(((3 * c, -3, -c, 1), (5 * c, -5, -c, 1)), (p, q, p + q))
    cert = sparse_gcd(sys, ReductionConfig(bound=2))
    assert structural_failures(sys, cert) == []
    dense = dense_gcd_many([densify(f) for f in sys.polys()])
    g = densify(cert.g)
    assert g.divides(dense)
