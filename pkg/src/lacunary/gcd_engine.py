"""Sparse gcd certificates for systems of lacunary polynomials on a common support.

A system is ``f_i(t) = gamma_i0 + sum_j gamma_ij * t**a_j``. Writing
``f_i = phi^#(L_i)`` with ``L_i`` linear in ``y_1..y_N`` and
``phi(t) = (t**a_1, ..., t**a_N)``, the certificate reduces ``phi`` to
``psi o phi1`` and takes ``G = gcd(psi^#(L_i))`` in few variables of small
degree; ``g = phi1^#(G)`` then divides every ``f_i``. Nothing here expands
a polynomial of degree ``D``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce as _fold
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .lattice import is_primitive
from .poly import (
    DEFAULT_DEGREE_CEILING,
    SparsePoly,
    divide_exact,
    gcd_many,
    normalize,
)
from .reduction import ReductionConfig, ReductionResult, reduce
from .torus import MonomialMap, compose, pullback

SMALL_N_CEILING = 6
ORDER_CAP = 10 ** 4


@dataclass(frozen=True)
class SparseSystem:
    gamma: Tuple[Tuple[Fraction, ...], ...]
    a: Tuple[int, ...]

    def __post_init__(self):
        a = tuple(int(x) for x in self.a)
        gamma = tuple(tuple(Fraction(c) for c in row) for row in self.gamma)
        N = len(a)
        if N == 0:
            raise ValueError("system needs at least one exponent")
        if not gamma:
            raise ValueError("system needs at least one polynomial")
        if any(len(row) != N + 1 for row in gamma):
            raise ValueError(f"every coefficient row needs {N + 1} entries")
        if not any(any(row) for row in gamma):
            raise ValueError("all polynomials of the system are zero")
        if any(x == 0 for x in a):
            raise ValueError("exponents must be nonzero")
        if len(set(a)) != N:
            raise ValueError("exponents must be pairwise distinct")
        if _fold(math.gcd, a, 0) != 1:
            raise ValueError(f"exponents {a} must have gcd 1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "gamma", gamma)

    @classmethod
    def normalized(cls, gamma: Sequence[Sequence], a: Sequence[int]) -> Tuple["SparseSystem", int]:
        """Divide the exponents by their gcd ``d``; the original system is this one at ``t**d``."""
        d = _fold(math.gcd, (int(x) for x in a), 0)
        if d == 0:
            raise ValueError("exponents must be nonzero")
        return cls(tuple(tuple(r) for r in gamma), tuple(int(x) // d for x in a)), d

    @property
    def N(self) -> int:
        return len(self.a)

    @property
    def s(self) -> int:
        return len(self.gamma)

    @property
    def D(self) -> int:
        return max(abs(x) for x in self.a)

    def linear_forms(self) -> List[SparsePoly]:
        N = self.N
        out = []
        for row in self.gamma:
            terms = {(0,) * N: row[0]}
            for j in range(N):
                terms[tuple(int(i == j) for i in range(N))] = row[j + 1]
            out.append(SparsePoly.from_dict(N, terms))
        return out

    def polys(self) -> List[SparsePoly]:
        out = []
        for row in self.gamma:
            terms: Dict[Tuple[int], Fraction] = {(0,): row[0]}
            for aj, c in zip(self.a, row[1:]):
                terms[(aj,)] = c
            out.append(SparsePoly.from_dict(1, terms))
        return out

    def to_json(self) -> dict:
        return {
            "gamma": [[f"{c.numerator}/{c.denominator}" for c in row] for row in self.gamma],
            "a": [str(x) for x in self.a],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "SparseSystem":
        try:
            gamma = [[Fraction(str(c)) for c in row] for row in obj["gamma"]]
            a = [int(x) for x in obj["a"]]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed system JSON: {exc!r}") from exc
        return cls(tuple(map(tuple, gamma)), tuple(a))


@dataclass(frozen=True)
class TorsionAnnotation:
    orders: Tuple[int, ...] = ()
    complete_up_to: int = 0

    def to_json(self) -> dict:
        return {"orders": list(self.orders), "complete_up_to": self.complete_up_to}

    @classmethod
    def from_json(cls, obj: Mapping) -> "TorsionAnnotation":
        return cls(tuple(int(n) for n in obj.get("orders", [])), int(obj.get("complete_up_to", 0)))


@dataclass(frozen=True)
class GcdCertificate:
    reduction: ReductionResult
    G: SparsePoly
    g: SparsePoly
    fallback: bool
    exceptional: Optional[Tuple[Tuple[int, ...], ...]] = None
    torsion: TorsionAnnotation = field(default_factory=TorsionAnnotation)

    @property
    def k(self) -> int:
        return self.reduction.k

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "psi": self.reduction.psi.to_json(),
            "phi1": self.reduction.phi1.to_json(),
            "G": self.G.to_json(),
            "g": self.g.to_json(),
            "fallback": self.fallback,
            "exceptional": None if self.exceptional is None else [list(x) for x in self.exceptional],
            "torsion": self.torsion.to_json(),
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "GcdCertificate":
        try:
            red = ReductionResult(
                k=int(obj["k"]),
                psi=MonomialMap.from_json(obj["psi"]),
                phi1=MonomialMap.from_json(obj["phi1"]),
            )
            exc = obj.get("exceptional")
            return cls(
                reduction=red,
                G=SparsePoly.from_json(obj["G"]),
                g=SparsePoly.from_json(obj["g"]),
                fallback=bool(obj["fallback"]),
                exceptional=None if exc is None else tuple(tuple(int(i) for i in x) for x in exc),
                torsion=TorsionAnnotation.from_json(obj.get("torsion", {})),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed certificate JSON: {exc!r}") from exc


def default_order_bound(sys: SparseSystem) -> int:
    return 3 * min(sys.D, ORDER_CAP)


def sparse_gcd(
    sys: SparseSystem,
    cfg: ReductionConfig = ReductionConfig(),
    *,
    order_bound: Optional[int] = None,
    with_exceptional: bool = True,
    degree_ceiling: Optional[int] = DEFAULT_DEGREE_CEILING,
) -> GcdCertificate:
    """Certificate ``(k, psi, phi1, G, g)`` with ``g | f_i`` for every ``i``.

    ``order_bound`` defaults to ``3*min(D, 10**4)`` (0 disables the
    torsion scan); exceptional subsets
    are computed only for ``N <= 6`` and when ``with_exceptional`` is set.
    """
    red = reduce(MonomialMap.curve(sys.a), cfg)
    F = [pullback(red.psi, L) for L in sys.linear_forms()]
    G = gcd_many(F, degree_ceiling)
    g = pullback(red.phi1, G)
    bound = default_order_bound(sys) if order_bound is None else order_bound
    # order_bound = 0 skips the torsion scan
    torsion = cyclotomic_scan(sys, bound) if bound > 0 else TorsionAnnotation((), 0)
    exceptional = None
    if with_exceptional and sys.N <= SMALL_N_CEILING:
        exceptional = tuple(exceptional_subsets(sys, cfg, degree_ceiling=degree_ceiling))
    return GcdCertificate(
        reduction=red,
        G=G,
        g=g,
        fallback=red.k == 0,
        exceptional=exceptional,
        torsion=torsion,
    )


# ---------------------------------------------------------------------------
# roots of unity


@lru_cache(maxsize=8)
def _smallest_prime_factors(limit: int) -> Tuple[int, ...]:
    spf = list(range(limit + 1))
    for p in range(2, int(limit ** 0.5) + 1):
        if spf[p] == p:
            for k in range(p * p, limit + 1, p):
                if spf[k] == k:
                    spf[k] = p
    return tuple(spf)


def _prime_divisors(n: int, spf: Sequence[int]) -> List[int]:
    out = []
    while n > 1:
        p = spf[n]
        out.append(p)
        while n % p == 0:
            n //= p
    return out


def vanishes_at_primitive_root(terms: Sequence[Tuple[int, Fraction]], n: int, primes: Sequence[int]) -> bool:
    """Exact test ``Phi_n | sum c * t**e``.

    With ``Q = prod_{p | n} (t**(n/p) - 1)`` every ``Phi_d`` for a proper
    divisor ``d`` of ``n`` divides ``Q`` and ``Phi_n`` does not, so
    ``Phi_n | r`` iff ``t**n - 1`` (squarefree) divides ``r*Q``. All
    arithmetic is on residues mod ``n``.
    """
    r: Dict[int, Fraction] = {}
    for e, c in terms:
        k = e % n
        r[k] = r.get(k, Fraction(0)) + c
    for p in primes:
        step = n // p
        nxt: Dict[int, Fraction] = {}
        for k, c in r.items():
            if not c:
                continue
            k2 = (k + step) % n
            nxt[k2] = nxt.get(k2, Fraction(0)) + c
            nxt[k] = nxt.get(k, Fraction(0)) - c
        r = nxt
    return not any(r.values())


def _residue_phases(a: Sequence[int], ns: np.ndarray) -> np.ndarray:
    """``exp(2*pi*i*(a_j mod n)/n)`` for every exponent and order, shape ``(N, len(ns))``."""
    out = np.empty((len(a), len(ns)), dtype=np.complex128)
    for j, aj in enumerate(a):
        if abs(aj) < 2 ** 62:
            res = np.mod(np.int64(aj), ns)
        else:
            res = np.array([aj % int(n) for n in ns], dtype=np.int64)
        out[j] = np.exp(2j * np.pi * res / ns)
    return out


def cyclotomic_scan(sys: SparseSystem, order_bound: int) -> TorsionAnnotation:
    """Orders ``n <= order_bound`` such that primitive ``n``-th roots of unity are common roots."""
    return torsion_orders(sys.gamma, sys.a, order_bound)


def torsion_orders(gamma: Sequence[Sequence], a: Sequence[int], order_bound: int) -> TorsionAnnotation:
    """Same scan on raw data; the exponents need not be coprime.

    A vectorized floating-point evaluation at ``exp(2*pi*i/n)`` discards
    orders that clearly fail; survivors are decided by the exact residue
    test, so the result is exact.
    """
    if order_bound < 1:
        raise ValueError("order_bound must be >= 1")
    a = [int(x) for x in a]
    rows = [tuple(Fraction(c) for c in row) for row in gamma]
    rows = [row for row in rows if any(row)]
    ns = np.arange(1, order_bound + 1, dtype=np.int64)
    phases = _residue_phases(a, ns)
    alive = np.ones(order_bound, dtype=bool)
    for row in rows:
        coeffs = np.array([float(c) for c in row[1:]], dtype=np.complex128)
        vals = float(row[0]) + coeffs @ phases
        scale = 1.0 + sum(abs(float(c)) for c in row)
        alive &= np.abs(vals) <= 1e-8 * scale
    candidates = [int(n) for n in ns[alive]]
    if not candidates:
        return TorsionAnnotation((), order_bound)
    spf = _smallest_prime_factors(order_bound)
    term_rows = [[(0, row[0])] + list(zip(a, row[1:])) for row in rows]
    orders = []
    for n in candidates:
        primes = _prime_divisors(n, spf)
        if all(vanishes_at_primitive_root(tr, n, primes) for tr in term_rows):
            orders.append(n)
    return TorsionAnnotation(tuple(orders), order_bound)


def _mobius(n: int) -> int:
    out, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            out = -out
        p += 1
    return -out if m > 1 else out


@lru_cache(maxsize=1024)
def cyclotomic_poly(n: int) -> SparsePoly:
    """``Phi_n = prod_{d | n} (t**d - 1)**mu(n/d)`` as a sparse polynomial."""
    if n < 1:
        raise ValueError("cyclotomic order must be positive")
    num = SparsePoly.const(1, 1)
    den = SparsePoly.const(1, 1)
    for d in range(1, n + 1):
        if n % d:
            continue
        mu = _mobius(n // d)
        if mu == 1:
            num = num * SparsePoly.univariate({d: 1, 0: -1})
        elif mu == -1:
            den = den * SparsePoly.univariate({d: 1, 0: -1})
    return divide_exact(num, den)


def _prime_factors(n: int) -> List[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _totient(n: int) -> int:
    out, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            out -= out // p
        p += 1
    if m > 1:
        out -= out // m
    return out


def strip_cyclotomic(p: SparsePoly) -> SparsePoly:
    """Remove every cyclotomic factor (to full multiplicity) of a univariate polynomial.

    Only orders with ``phi(n) <= deg`` can divide, and ``phi(n) >= sqrt(n/2)``
    bounds the scan by ``2*deg**2``.
    """
    if p.nvars != 1:
        raise ValueError("strip_cyclotomic needs a univariate polynomial")
    if p.is_zero:
        raise ValueError("strip_cyclotomic of zero")
    core = normalize(p)
    n = 1
    while True:
        deg = core.degree_spread()[0]
        if deg == 0 or n > 2 * deg * deg:
            break
        if _totient(n) <= deg:
            primes = _prime_factors(n)
            while core.degree_spread()[0] >= _totient(n) and vanishes_at_primitive_root(
                [(e[0], c) for e, c in core.terms], n, primes
            ):
                core = normalize(divide_exact(core, cyclotomic_poly(n)))
        n += 1
    return core


# ---------------------------------------------------------------------------
# subsum systems


def subsum_polys(sys: SparseSystem, subset: Sequence[int]) -> List[SparsePoly]:
    """``gamma_i0 + sum_{j in subset} gamma_ij t**a_j`` (indices 1-based), zero rows kept."""
    out = []
    for row in sys.gamma:
        terms = {(0,): row[0]}
        for j in subset:
            terms[(sys.a[j - 1],)] = row[j]
        out.append(SparsePoly.from_dict(1, terms))
    return out


def subsum_system(sys: SparseSystem, subset: Sequence[int]) -> Tuple[Optional[SparseSystem], int]:
    """The subsum system with exponents divided by their gcd ``d``.

    Rows that vanish identically are dropped; ``None`` means every row
    vanished (the subsum system is identically zero).
    """
    sub_a = [sys.a[j - 1] for j in subset]
    rows = []
    for row in sys.gamma:
        r = (row[0],) + tuple(row[j] for j in subset)
        if any(r):
            rows.append(r)
    d = _fold(math.gcd, sub_a, 0)
    if not rows:
        return None, d
    return SparseSystem(tuple(rows), tuple(x // d for x in sub_a)), d


def exceptional_subsets(
    sys: SparseSystem,
    cfg: ReductionConfig = ReductionConfig(),
    *,
    degree_ceiling: Optional[int] = DEFAULT_DEGREE_CEILING,
    order_bound: Optional[int] = None,
) -> List[Tuple[int, ...]]:
    """Nonempty proper subsets ``L`` of ``{1..N}`` whose subsum system has a common root.

    A subset is reported when the recursive certificate has a nonconstant
    ``g`` or a torsion root, or when the subsum system vanishes
    identically. Enumeration is by size, then lexicographically.
    """
    N = sys.N
    if N > SMALL_N_CEILING:
        raise ValueError(f"exceptional subsets are enumerated only for N <= {SMALL_N_CEILING}")
    bound = default_order_bound(sys) if order_bound is None else order_bound
    out = []
    for size_ in range(1, N):
        for subset in itertools.combinations(range(1, N + 1), size_):
            sub, d = subsum_system(sys, subset)
            if sub is None:
                out.append(subset)
                continue
            if _has_common_root(sub, cfg, degree_ceiling, max(1, bound)):
                out.append(subset)
    return out


def _has_common_root(sub: SparseSystem, cfg, degree_ceiling, order_bound) -> bool:
    cert = sparse_gcd(
        sub, cfg, order_bound=order_bound, with_exceptional=False, degree_ceiling=degree_ceiling
    )
    return not cert.g.is_monomial or bool(cert.torsion.orders)


# ---------------------------------------------------------------------------
# verification


def structural_failures(sys: SparseSystem, cert: GcdCertificate,
                        degree_ceiling: Optional[int] = DEFAULT_DEGREE_CEILING) -> List[str]:
    """Checks that need no dense expansion; an empty list means the certificate holds.

    ``G | psi^#(L_i)`` in the reduced ring implies ``g | f_i`` because
    pullback along ``phi1`` is a ring homomorphism.
    """
    fails = []
    psi, phi1 = cert.reduction.psi, cert.reduction.phi1
    if psi.codomain_dim != sys.N or psi.domain_dim != phi1.codomain_dim or phi1.domain_dim != 1:
        return ["certificate maps have inconsistent shapes"]
    if psi.domain_dim != sys.N - cert.k:
        fails.append(f"psi has {psi.domain_dim} columns, expected N - k = {sys.N - cert.k}")
    if not is_primitive(psi.exponents):
        fails.append("psi is not primitive (not injective)")
    if compose(psi, phi1).column != sys.a:
        fails.append("psi o phi1 does not reproduce the exponent vector")
        return fails
    if cert.G.nvars != psi.domain_dim:
        fails.append("G lives in the wrong number of variables")
        return fails
    if pullback(phi1, cert.G) != cert.g:
        fails.append("g is not the pullback of G along phi1")
    for i, L in enumerate(sys.linear_forms()):
        F = pullback(psi, L)
        if F.is_zero:
            continue
        try:
            divide_exact(F, cert.G)
        except ArithmeticError:
            fails.append(f"G does not divide the reduced form of f_{i + 1}")
    return fails
