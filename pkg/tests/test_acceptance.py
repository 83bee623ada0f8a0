"""Acceptance gate: one test per criterion, each printing a pass/fail line."""

import contextlib
import io
import itertools
import json
import math
import random
import time
from functools import reduce as fold

import numpy as np
import pytest

from lacunary.cli import main, pirola_instances
from lacunary.gcd_engine import SparseSystem, sparse_gcd, subsum_polys
from lacunary.lattice import IntMatrix, is_primitive, kernel_basis
from lacunary.multiplicity import find_witness, polynomial_of, witness_failures
from lacunary.oracle import (
    cyclotomic_index,
    cyclotomic_strip,
    dense_gcd_many,
    dense_multiple_part,
    densify,
    irreducible_factors,
)
from lacunary.osculating import VERDICT_NONE, OsculatingInstance, pirola_check
from lacunary.poly import SparsePoly, squarefree_gap
from lacunary.reduction import ReductionConfig, reduce, reduce_exponents
from lacunary.torus import MonomialMap, Subtorus, compose, riduci, size

t = SparsePoly.var(1, 0)


@pytest.fixture
def report(capsys):
    def emit(name, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        assert ok, detail
    return emit


def sweep_cases(seed=20240601, count=500):
    rng = random.Random(seed)
    cases = []
    while len(cases) < count:
        N = rng.randint(1, 4)
        s = rng.randint(1, 3)
        a = rng.sample(range(1, 2001), N)
        if fold(math.gcd, a) != 1:
            continue
        gamma = [[rng.randint(-5, 5) for _ in range(N + 1)] for _ in range(s)]
        if not any(any(row) for row in gamma):
            continue
        cases.append(SparseSystem(tuple(map(tuple, gamma)), tuple(a)))
    return cases


@pytest.fixture(scope="module")
def sweep():
    cases = sweep_cases()
    start = time.perf_counter()
    certs = [sparse_gcd(sys, ReductionConfig(bound=6)) for sys in cases]
    elapsed = time.perf_counter() - start
    dense = [dense_gcd_many([densify(f) for f in sys.polys()]) for sys in cases]
    return cases, certs, dense, elapsed


def test_criterion_1_oracle_divisibility(sweep, report):
    cases, certs, dense, elapsed = sweep
    bad = [sys for sys, c, d in zip(cases, certs, dense) if not densify(c.g).divides(d)]
    ok = not bad and elapsed < 120
    report("1 oracle divisibility", ok, f"{len(cases) - len(bad)}/{len(cases)} divide, {elapsed:.1f}s")


def test_criterion_2_dichotomy(sweep, report):
    cases, certs, dense, _ = sweep
    unexplained = []
    nontrivial = 0
    for sys, cert, d in zip(cases, certs, dense):
        if d.is_zero:
            continue
        q, _ = d.divmod(densify(cert.g))
        if q.is_constant():
            continue
        nontrivial += 1
        for fac, _ in irreducible_factors(q):
            if fac.is_constant() or cyclotomic_index(fac, 3 * sys.D) is not None:
                continue
            if not any(
                fac.divides(dense_gcd_many([densify(p) for p in subsum_polys(sys, L)]))
                for L in cert.exceptional
            ):
                unexplained.append((sys, fac))
    report("2 dichotomy", not unexplained,
           f"{nontrivial} cases with a nontrivial quotient, {len(unexplained)} unexplained factors")


def test_criterion_3_example_double_root_at_one(report):
    y1, y2 = SparsePoly.var(2, 0), SparsePoly.var(2, 1)
    failures = []
    count = 0
    for a2 in range(2, 31):
        for a1 in range(1, a2):
            if math.gcd(a1, a2) != 1:
                continue
            count += 1
            a = (a1, a2, a1 + a2)
            gamma = (1, -1, -1, 1)
            cfg = ReductionConfig(bound=1)
            res = reduce_exponents(a, 1)
            w = find_witness(gamma, a, cfg)
            F = pullback_source(res)
            f = densify(polynomial_of(gamma, a))
            checks = (
                w is None,
                kernel_basis(a, 1) == [(1, 1, -1)],
                res.k == 1 and [T.normal for _, T in res.trace] == [(1, 1, -1)],
                F == (1 - y1) * (1 - y2),
                squarefree_gap(F).is_constant,
                dense_multiple_part(f) == densify(t - 1),
            )
            if not all(checks):
                failures.append((a, checks))
    report("3 double root at 1 unexplained", not failures, f"{count - len(failures)}/{count} pairs")


def pullback_source(res):
    # F for the fixed coefficients (1, -1, -1, 1): the sum of y^psi_i over the rows of psi
    y = [SparsePoly.var(res.psi.domain_dim, i) for i in range(res.psi.domain_dim)]
    F = SparsePoly.const(res.psi.domain_dim, 1)
    for coeff, row in zip((-1, -1, 1), res.psi.exponents.data):
        term = SparsePoly.const(res.psi.domain_dim, coeff)
        for v, e in zip(y, row):
            term = term * v ** e
        F = F + term
    return F


def planted(rng, small):
    while True:
        m = rng.choice((1, 2))
        ys = [SparsePoly.var(m, i) for i in range(m)]
        c = rng.choice([2, 3, -2, -3, 5])
        if m == 1:
            P = ys[0] - c
            Q = ys[0] + rng.choice([1, 2, -3, 4])
        else:
            P = ys[0] + rng.choice([1, -1, 2]) * ys[1] - c
            Q = ys[rng.randrange(2)] - rng.choice([1, 2, -1, 3, 7])
        F0 = P * P * Q
        if any(abs(x) > 3 for e, _ in F0.terms for x in e):
            continue
        terms = dict(F0.terms)
        zero = (0,) * m
        if zero not in terms:
            continue
        rows = [e for e, _ in F0.terms if e != zero]
        B0 = IntMatrix.from_rows(rows, m)
        if not is_primitive(B0):
            continue
        lim = 50 if small else 10 ** 6
        theta = tuple(rng.randint(-lim, lim) for _ in range(m))
        a = tuple(sum(x * y for x, y in zip(r, theta)) for r in rows)
        if 0 in a or len(set(a)) != len(a):
            continue
        gamma = (terms[zero],) + tuple(terms[e] for e in rows)
        return gamma, a


def test_criterion_4_planted_recovery(report):
    rng = random.Random(4)
    recovered = 0
    confirmed = 0
    small_total = 0
    for i in range(200):
        small = i < 50
        gamma, a = planted(rng, small)
        w = find_witness(gamma, a, ReductionConfig(bound=3))
        if w is None or witness_failures(gamma, a, w):
            continue
        recovered += 1
        if small:
            small_total += 1
            f = densify(polynomial_of(gamma, a))
            # both sides stripped by the dense oracle, independently of the engine's strip
            M = dense_multiple_part(f)
            bound = 2 * M.degree ** 2 + 2
            target, _ = cyclotomic_strip(M, bound)
            core, _ = cyclotomic_strip(densify(w.pullback_pi), bound)
            if not core.is_constant() and core.divides(target):
                confirmed += 1
    ok = recovered == 200 and confirmed == 50
    report("4 planted recovery", ok, f"{recovered}/200 recovered, {confirmed}/50 oracle-confirmed")


def time_multiple(D, repeat=7):
    argv = ["multiple", "--gamma", "[4,-4,1]", "--exponents", json.dumps([str(D), str(2 * D)])]
    best = math.inf
    out = None
    for _ in range(repeat):
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            start = time.perf_counter()
            code = main(argv)
            best = min(best, time.perf_counter() - start)
        assert code == 0
        out = json.loads(buf.getvalue())
    return best, out["witness"]


def nonnegative_fit(x, y):
    A = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    if coef.min() >= 0:
        return coef
    # one coefficient is pinned at zero; refit the other alone
    c2 = max(0.0, float(x @ y / (x @ x)))
    c1 = max(0.0, float(y.mean()))
    return np.array([c1, 0.0]) if np.sum((y - c1) ** 2) <= np.sum((y - c2 * x) ** 2) else np.array([0.0, c2])


def test_criterion_5_polylog_scaling(report):
    Ds = [10 ** e for e in range(3, 10)]
    times, rows = [], []
    for D in Ds:
        best, w = time_multiple(D)
        times.append(best)
        rows.append(w["B"] if w else None)
    x = np.array([math.log(D) ** 2 for D in Ds])
    y = np.array(times)
    c1, c2 = nonnegative_fit(x, y)
    fit = c1 + c2 * x
    ratio = times[-1] / times[0]
    same = all(r == rows[0] for r in rows) and rows[0] is not None
    B_ok = same and IntMatrix.from_json(rows[0]).data == ((1,), (2,))
    # timing noise at the millisecond scale: every point within twice the fitted envelope
    envelope = bool(np.all(y <= 2 * fit))
    ok = ratio <= 20 and B_ok and envelope
    detail = (f"t(1e9)/t(1e3) = {ratio:.2f}, fit c1={c1:.2e} c2={c2:.2e}, "
              f"envelope {'ok' if envelope else 'violated'}, witness B rows (1),(2) at every D: {B_ok}")
    report("5 polylog scaling", ok, detail)


def test_criterion_6_pirola_n3_scan(report):
    bound, box = 4, 2 * 25 * 4
    cfg = ReductionConfig(bound=bound)
    start = time.perf_counter()
    verdicts = {}
    for a in pirola_instances(3, 25):
        rep = pirola_check(OsculatingInstance(a), cfg, theta_box=box)
        verdicts[a] = rep.verdict == VERDICT_NONE and rep.torsion_point_flagged and not rep.discrepancies
    # a triple with common factor d traces the same curve as a/d
    triples = list(itertools.combinations(range(1, 26), 3))
    bad = [a for a in triples if not verdicts[tuple(x // math.gcd(*a) for x in a)]]
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 600
    report("6 pirola N=3 scan", ok,
           f"{len(triples) - len(bad)}/{len(triples)} triples no-small-structure and flagged "
           f"({len(verdicts)} coprime checked directly), {elapsed:.0f}s")


def test_criterion_7_reduction_invariants(report):
    rng = random.Random(7)
    violations = 0
    for _ in range(1000):
        N = rng.randint(2, 5)
        bound = rng.randint(1, 4)
        while True:
            b = tuple(rng.randint(-bound, bound) for _ in range(N))
            if any(b) and fold(math.gcd, b, 0) == 1:
                break
        # a random curve in T: a combination of the orthogonal lattice of b
        K = orthogonal_basis(b)
        coeffs = [rng.randint(-10 ** 6, 10 ** 6) for _ in K]
        a = tuple(sum(c * k[i] for c, k in zip(coeffs, K)) for i in range(N))
        psi, phi1 = riduci(MonomialMap.curve(a), Subtorus(b))
        phi = MonomialMap.curve(a)
        if not (compose(psi, phi1) == phi and is_primitive(psi.exponents)
                and size(phi1) <= N * max(map(abs, b)) * max(1, size(phi))):
            violations += 1
    for _ in range(1000):
        N = rng.randint(2, 5)
        bound = rng.randint(1, 4)
        m = rng.randint(1, N - 1)
        B0 = [[rng.randint(-bound, bound) for _ in range(m)] for _ in range(N)]
        theta = [rng.randint(-10 ** 6, 10 ** 6) for _ in range(m)]
        a = [sum(x * y for x, y in zip(r, theta)) for r in B0]
        g = fold(math.gcd, a, 0)
        if g == 0:
            a = [1] + [0] * (N - 1)
            g = 1
        a = tuple(x // g for x in a)
        res = reduce(MonomialMap.curve(a), ReductionConfig(bound=bound))
        phi = MonomialMap.curve(a)
        if not (compose(res.psi, res.phi1) == phi and is_primitive(res.psi.exponents)
                and size(res.phi1) <= N * bound * size(phi)):
            violations += 1
    report("7 reduction invariants", violations == 0, f"{violations} violations in 2000 runs")


def orthogonal_basis(b):
    from lacunary.lattice import left_kernel
    return left_kernel(IntMatrix.column(b)).data


def test_criterion_8_height_degrades_completeness(report):
    rows = []
    ok = True
    for B in (1, 2, 3, 4):
        for m in range(2, 12):
            sys = SparseSystem(((-2, 1, 0), (-2 ** m, 0, 1)), (1, m))
            res = reduce_exponents((1, m), B)
            cert = sparse_gcd(sys, ReductionConfig(bound=B))
            dense = dense_gcd_many([densify(f) for f in sys.polys()])
            if m > B:
                good = res.k == 0 and cert.g.is_constant and cert.fallback
            else:
                good = res.k == 1 and cert.g == t - 2 and not cert.fallback
            good = good and dense == densify(t - 2)
            ok = ok and good
            rows.append((B, m, good))
    report("8 height degrades completeness", ok,
           f"{sum(r[2] for r in rows)}/{len(rows)} (bound, m) pairs: g = 1 with fallback exactly when m > bound; "
           "oracle gcd t - 2 throughout")
