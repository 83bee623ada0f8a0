"""Dense reference implementations for desk-scale checks.

Everything here expands polynomials to full coefficient arrays, so it is
only meant for degrees up to about ``10**4``. The gcd itself is delegated
to sympy's dense univariate routines over ``QQ``; the sparse engines never
call into this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Sequence, Tuple

import sympy
from sympy import QQ, Poly
from sympy.abc import t as _t

from .poly import SparsePoly

DEFAULT_ORACLE_CEILING = 10 ** 4


@dataclass(frozen=True)
class DensePoly:
    """Univariate polynomial over Q; ``coeffs[i]`` is the coefficient of ``t**i``."""

    coeffs: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        c = [Fraction(x) for x in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_sympy(cls, p: Poly) -> "DensePoly":
        cs = p.all_coeffs()[::-1]
        return cls(tuple(Fraction(int(c.p), int(c.q)) if hasattr(c, "p") else Fraction(c) for c in cs))

    def to_sympy(self) -> Poly:
        if not self.coeffs:
            return Poly(0, _t, domain=QQ)
        return Poly([QQ(c.numerator, c.denominator) for c in reversed(self.coeffs)], _t, domain=QQ)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def monic(self) -> "DensePoly":
        if not self.coeffs:
            return self
        lc = self.coeffs[-1]
        return DensePoly(tuple(c / lc for c in self.coeffs))

    def __mul__(self, other: "DensePoly") -> "DensePoly":
        return DensePoly.from_sympy(self.to_sympy() * other.to_sympy())

    def divmod(self, other: "DensePoly") -> Tuple["DensePoly", "DensePoly"]:
        q, r = self.to_sympy().div(other.to_sympy())
        return DensePoly.from_sympy(q), DensePoly.from_sympy(r)

    def divides(self, other: "DensePoly") -> bool:
        """True iff ``self`` divides ``other``."""
        if self.is_zero:
            return other.is_zero
        return other.divmod(self)[1].is_zero

    def evaluate(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __str__(self) -> str:
        return str(self.to_sympy().as_expr())


def densify(f: SparsePoly, ceiling: int = DEFAULT_ORACLE_CEILING) -> DensePoly:
    """Dense coefficients of a univariate Laurent polynomial, shifted by ``t**-min``."""
    if f.nvars != 1:
        raise ValueError("densify needs a univariate polynomial")
    if f.is_zero:
        return DensePoly()
    lo, hi = f.min_exponents()[0], f.max_exponents()[0]
    if hi - lo > ceiling:
        raise ValueError(f"degree spread {hi - lo} exceeds oracle ceiling {ceiling}")
    c = [Fraction(0)] * (hi - lo + 1)
    for (e,), v in f.terms:
        c[e - lo] = v
    return DensePoly(tuple(c))


def dense_gcd(f: DensePoly, g: DensePoly) -> DensePoly:
    if f.is_zero and g.is_zero:
        raise ValueError("gcd of two zero polynomials")
    return DensePoly.from_sympy(f.to_sympy().gcd(g.to_sympy())).monic()


def dense_gcd_many(polys: Sequence[DensePoly]) -> DensePoly:
    """Monic gcd of a family; the gcd of an all-zero family is zero."""
    out = DensePoly()
    for p in polys:
        if p.is_zero:
            continue
        out = p.monic() if out.is_zero else dense_gcd(out, p)
    return out


def dense_derivative(f: DensePoly) -> DensePoly:
    return DensePoly(tuple(i * c for i, c in enumerate(f.coeffs))[1:])


def dense_multiple_part(f: DensePoly) -> DensePoly:
    """``gcd(f, f')``: vanishes exactly at the multiple roots of ``f``."""
    if f.is_zero:
        raise ValueError("multiple part of zero")
    return dense_gcd(f, dense_derivative(f))


@lru_cache(maxsize=4096)
def cyclotomic(n: int) -> DensePoly:
    return DensePoly.from_sympy(Poly(sympy.cyclotomic_poly(n, _t), _t, domain=QQ))


@lru_cache(maxsize=16)
def _totients(limit: int) -> Tuple[int, ...]:
    phi = list(range(limit + 1))
    for p in range(2, limit + 1):
        if phi[p] == p:
            for k in range(p, limit + 1, p):
                phi[k] -= phi[k] // p
    return tuple(phi)


def cyclotomic_orders(max_degree: int, order_bound: int) -> List[int]:
    """All ``n <= order_bound`` whose cyclotomic polynomial has degree ``<= max_degree``.

    Uses ``phi(n) >= sqrt(n/2)``, so only ``n <= 2*max_degree**2`` can qualify.
    """
    limit = min(order_bound, 2 * max_degree * max_degree + 2)
    if limit < 1:
        return []
    phi = _totients(max(limit, 1))
    return [n for n in range(1, limit + 1) if phi[n] <= max_degree]


def cyclotomic_strip(f: DensePoly, order_bound: int) -> Tuple[DensePoly, List[Tuple[int, int]]]:
    """Divide out every ``Phi_n`` (``n <= order_bound``) to full multiplicity."""
    if f.is_zero:
        raise ValueError("cyclotomic_strip of zero")
    core = f
    stripped: List[Tuple[int, int]] = []
    for n in cyclotomic_orders(core.degree, order_bound):
        phi_n = cyclotomic(n)
        if phi_n.degree > core.degree:
            continue
        m = 0
        while phi_n.degree <= core.degree:
            q, r = core.divmod(phi_n)
            if not r.is_zero:
                break
            core, m = q, m + 1
        if m:
            stripped.append((n, m))
    return core.monic(), stripped


def irreducible_factors(f: DensePoly) -> List[Tuple[DensePoly, int]]:
    """Monic irreducible factors over Q with multiplicities (sympy factorization)."""
    if f.is_zero:
        raise ValueError("factorization of zero")
    _, facs = f.to_sympy().factor_list()
    return [(DensePoly.from_sympy(p).monic(), m) for p, m in facs]


def cyclotomic_index(f: DensePoly, order_bound: int) -> int | None:
    """The ``n <= order_bound`` with ``f`` associate to ``Phi_n``, if any."""
    for n in cyclotomic_orders(f.degree, order_bound):
        if cyclotomic(n).degree == f.degree and cyclotomic(n) == f.monic():
            return n
    return None
