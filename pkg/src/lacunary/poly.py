"""Exact sparse Laurent polynomials over the rationals.

A polynomial in ``n`` variables is a finite map from integer exponent
tuples (any sign, any magnitude) to nonzero ``Fraction`` coefficients.
Exponents are plain Python ints, so ``t**(10**12)`` costs one dict entry.

The multivariate gcd here is meant for *reduced* polynomials whose
per-variable degree spread is small; see ``DEFAULT_DEGREE_CEILING``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from typing import Dict, Iterable, Iterator, Mapping, Sequence, Tuple, Union

Exponent = Tuple[int, ...]
Terms = Dict[Exponent, Fraction]
Scalar = Union[int, Fraction]

DEFAULT_DEGREE_CEILING = 64


class DegreeCeilingError(ValueError):
    """Raised when a small-degree routine is handed a large-degree input."""


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, str):
        return Fraction(c)
    return Fraction(c)


@dataclass(frozen=True)
class SparsePoly:
    """Immutable sparse Laurent polynomial.

    ``terms`` is a tuple of ``(exponent, coefficient)`` pairs sorted
    lexicographically by exponent, with no zero coefficients, so that
    dataclass equality is structural equality.
    """

    nvars: int
    terms: Tuple[Tuple[Exponent, Fraction], ...] = ()

    # -- construction -----------------------------------------------------

    @classmethod
    def from_dict(cls, nvars: int, terms: Mapping[Sequence[int], Scalar]) -> "SparsePoly":
        clean: Terms = {}
        for e, c in terms.items():
            e = tuple(int(x) for x in e)
            if len(e) != nvars:
                raise ValueError(f"exponent {e} has length {len(e)}, expected {nvars}")
            c = _frac(c)
            if c:
                clean[e] = clean.get(e, Fraction(0)) + c
        return cls._from_clean(nvars, clean)

    @classmethod
    def _from_clean(cls, nvars: int, terms: Terms) -> "SparsePoly":
        return cls(nvars, tuple(sorted((e, c) for e, c in terms.items() if c)))

    @classmethod
    def zero(cls, nvars: int) -> "SparsePoly":
        return cls(nvars, ())

    @classmethod
    def const(cls, nvars: int, c: Scalar) -> "SparsePoly":
        return cls.from_dict(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int) -> "SparsePoly":
        e = [0] * nvars
        e[i] = 1
        return cls.from_dict(nvars, {tuple(e): 1})

    @classmethod
    def monomial(cls, exp: Sequence[int], c: Scalar = 1) -> "SparsePoly":
        return cls.from_dict(len(exp), {tuple(exp): c})

    @classmethod
    def univariate(cls, coeffs: Mapping[int, Scalar]) -> "SparsePoly":
        """Build ``sum c * t**e`` from a map ``{e: c}``."""
        return cls.from_dict(1, {(e,): c for e, c in coeffs.items()})

    # -- views ------------------------------------------------------------

    @cached_property
    def as_dict(self) -> Terms:
        return dict(self.terms)

    def __iter__(self) -> Iterator[Tuple[Exponent, Fraction]]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def coefficient(self, exp: Sequence[int]) -> Fraction:
        return self.as_dict.get(tuple(exp), Fraction(0))

    @property
    def support(self) -> Tuple[Exponent, ...]:
        return tuple(e for e, _ in self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(self.terms[0][0]))

    @property
    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def min_exponents(self) -> Exponent:
        if not self.terms:
            return (0,) * self.nvars
        return tuple(min(e[i] for e, _ in self.terms) for i in range(self.nvars))

    def max_exponents(self) -> Exponent:
        if not self.terms:
            return (0,) * self.nvars
        return tuple(max(e[i] for e, _ in self.terms) for i in range(self.nvars))

    def degree_spread(self) -> Exponent:
        """Per-variable ``max - min`` exponent (degree after clearing monomials)."""
        lo, hi = self.min_exponents(), self.max_exponents()
        return tuple(h - l for h, l in zip(hi, lo))

    def leading(self) -> Tuple[Exponent, Fraction]:
        """Lexicographically largest term."""
        return self.terms[-1]

    # -- arithmetic -------------------------------------------------------

    def _check(self, other: "SparsePoly") -> None:
        if self.nvars != other.nvars:
            raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other):
        if not isinstance(other, SparsePoly):
            other = SparsePoly.const(self.nvars, other)
        return add(self, other)

    __radd__ = __add__

    def __neg__(self) -> "SparsePoly":
        return SparsePoly(self.nvars, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other):
        if not isinstance(other, SparsePoly):
            other = SparsePoly.const(self.nvars, other)
        return add(self, -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, SparsePoly):
            return mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "SparsePoly":
        if k < 0:
            if not self.is_monomial:
                raise ValueError("negative power of a non-monomial")
            (e, c), = self.terms
            return SparsePoly.monomial([x * k for x in e], c ** k)
        out = SparsePoly.const(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def scale(self, c: Scalar) -> "SparsePoly":
        c = _frac(c)
        if not c:
            return SparsePoly.zero(self.nvars)
        return SparsePoly(self.nvars, tuple((e, v * c) for e, v in self.terms))

    def shift(self, exp: Sequence[int]) -> "SparsePoly":
        """Multiply by the monomial ``y**exp``."""
        return SparsePoly(
            self.nvars, tuple((tuple(a + b for a, b in zip(e, exp)), c) for e, c in self.terms)
        )

    def evaluate(self, point: Sequence[Scalar]) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms:
            v = c
            for x, k in zip(point, e):
                v *= Fraction(x) ** k
            total += v
        return total

    def partial(self, i: int) -> "SparsePoly":
        out: Terms = {}
        for e, c in self.terms:
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        return SparsePoly._from_clean(self.nvars, out)

    def embed(self, nvars: int, positions: Sequence[int]) -> "SparsePoly":
        """Re-home variable ``i`` at index ``positions[i]`` of a larger ring."""
        out: Terms = {}
        for e, c in self.terms:
            f = [0] * nvars
            for i, p in enumerate(positions):
                f[p] += e[i]
            out[tuple(f)] = out.get(tuple(f), Fraction(0)) + c
        return SparsePoly._from_clean(nvars, out)

    # -- (de)serialization ------------------------------------------------

    def to_json(self) -> dict:
        return {
            "vars": self.nvars,
            "terms": [
                {"exp": [str(x) for x in e], "coef": f"{c.numerator}/{c.denominator}"}
                for e, c in self.terms
            ],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "SparsePoly":
        try:
            n = int(obj["vars"])
            terms = {}
            for t in obj["terms"]:
                e = tuple(int(x) for x in t["exp"])
                c = Fraction(str(t["coef"]))
                if e in terms:
                    raise ValueError(f"duplicate exponent {e}")
                terms[e] = c
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed polynomial JSON: {exc!r}") from exc
        return cls.from_dict(n, terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        names = ["t"] if self.nvars == 1 else [f"y{i + 1}" for i in range(self.nvars)]
        parts = []
        for e, c in reversed(self.terms):
            mono = "*".join(
                n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


# ---------------------------------------------------------------------------
# ring operations


def add(p: SparsePoly, q: SparsePoly) -> SparsePoly:
    p._check(q)
    out = dict(p.as_dict)
    for e, c in q.terms:
        out[e] = out.get(e, Fraction(0)) + c
    return SparsePoly._from_clean(p.nvars, out)


def mul(p: SparsePoly, q: SparsePoly) -> SparsePoly:
    p._check(q)
    out: Terms = {}
    for e1, c1 in p.terms:
        for e2, c2 in q.terms:
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, Fraction(0)) + c1 * c2
    return SparsePoly._from_clean(p.nvars, out)


def euler_derivation(p: SparsePoly, theta: Sequence[int]) -> SparsePoly:
    """Apply ``sum_i theta_i * y_i * d/dy_i``: each ``y**b`` scales by ``<b, theta>``."""
    if len(theta) != p.nvars:
        raise ValueError(f"theta has length {len(theta)}, expected {p.nvars}")
    out = {}
    for e, c in p.terms:
        lam = sum(a * b for a, b in zip(e, theta))
        if lam:
            out[e] = c * lam
    return SparsePoly._from_clean(p.nvars, out)


def eigen_split(p: SparsePoly, theta: Sequence[int]) -> Dict[int, SparsePoly]:
    """Group the terms of ``p`` by their eigenvalue ``<b, theta>``."""
    groups: Dict[int, Terms] = {}
    for e, c in p.terms:
        groups.setdefault(sum(a * b for a, b in zip(e, theta)), {})[e] = c
    return {k: SparsePoly._from_clean(p.nvars, v) for k, v in groups.items()}


# ---------------------------------------------------------------------------
# normalization helpers


def content(p: SparsePoly) -> Fraction:
    """Positive rational ``c`` such that ``p / c`` has coprime integer coefficients."""
    if p.is_zero:
        return Fraction(0)
    num = reduce(math.gcd, (abs(c.numerator) for _, c in p.terms))
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (c.denominator for _, c in p.terms))
    return Fraction(num, den)


def strip_monomial(p: SparsePoly) -> SparsePoly:
    """Divide by the largest monomial factor so every variable has min exponent 0."""
    if p.is_zero:
        return p
    lo = p.min_exponents()
    if not any(lo):
        return p
    return p.shift([-x for x in lo])


def normalize(p: SparsePoly) -> SparsePoly:
    """Canonical associate in the Laurent ring.

    Monomial factor removed, coprime integer coefficients, and the
    lexicographically leading coefficient positive.
    """
    if p.is_zero:
        return p
    p = strip_monomial(p)
    c = content(p)
    if p.leading()[1] < 0:
        c = -c
    return p.scale(1 / c)


# ---------------------------------------------------------------------------
# exact division


def divide_exact(f: SparsePoly, g: SparsePoly) -> SparsePoly:
    """Return ``q`` with ``f == q * g``; raise ``ArithmeticError`` otherwise.

    Lexicographic division on the Laurent supports; both sides are first
    shifted to nonnegative exponents and the monomial difference restored.
    """
    f._check(g)
    if g.is_zero:
        raise ZeroDivisionError("division by zero polynomial")
    if f.is_zero:
        return f
    flo, glo = f.min_exponents(), g.min_exponents()
    q = _divide_poly(strip_monomial(f).as_dict, strip_monomial(g).as_dict, f.nvars)
    if q is None:
        raise ArithmeticError("not divisible")
    return SparsePoly._from_clean(f.nvars, q).shift([a - b for a, b in zip(flo, glo)])


def divides(g: SparsePoly, f: SparsePoly) -> bool:
    try:
        divide_exact(f, g)
    except ArithmeticError:
        return False
    return True


def _divide_poly(f: Terms, g: Terms, n: int) -> Terms | None:
    """Exact division in Q[y] (nonnegative exponents); None if it does not divide."""
    if not f:
        return {}
    lg = max(g)
    lc = g[lg]
    r = dict(f)
    q: Terms = {}
    while r:
        lr = max(r)
        d = tuple(a - b for a, b in zip(lr, lg))
        if any(x < 0 for x in d):
            return None
        c = r[lr] / lc
        q[d] = c
        for e, v in g.items():
            k = tuple(a + b for a, b in zip(e, d))
            w = r.get(k, Fraction(0)) - c * v
            if w:
                r[k] = w
            else:
                r.pop(k, None)
    return q


# ---------------------------------------------------------------------------
# multivariate gcd (content / primitive-part recursion, primitive PRS at the base)


def _shift_terms(f: Terms, n: int) -> Terms:
    if not f:
        return f
    lo = [min(e[i] for e in f) for i in range(n)]
    if not any(lo):
        return f
    return {tuple(a - b for a, b in zip(e, lo)): c for e, c in f.items()}


def _const(n: int, c=1) -> Terms:
    return {(0,) * n: Fraction(c)}


def _is_const(f: Terms) -> bool:
    return len(f) == 1 and not any(next(iter(f)))


def _coeffs_in(f: Terms, v: int) -> Dict[int, Terms]:
    out: Dict[int, Terms] = {}
    for e, c in f.items():
        k = e[v]
        out.setdefault(k, {})[e[:v] + (0,) + e[v + 1:]] = c
    return out


def _deg(f: Terms, v: int) -> int:
    return max(e[v] for e in f)


def _mul_terms(f: Terms, g: Terms) -> Terms:
    out: Terms = {}
    for e1, c1 in f.items():
        for e2, c2 in g.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, Fraction(0)) + c1 * c2
    return {e: c for e, c in out.items() if c}


def _sub_terms(f: Terms, g: Terms) -> Terms:
    out = dict(f)
    for e, c in g.items():
        w = out.get(e, Fraction(0)) - c
        if w:
            out[e] = w
        else:
            out.pop(e, None)
    return out


def _make_primitive_q(f: Terms) -> Terms:
    """Scale to coprime integer coefficients (keeps growth in check)."""
    if not f:
        return f
    num = reduce(math.gcd, (x.numerator for x in f.values()))
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (x.denominator for x in f.values()))
    s = Fraction(den, num)
    return {e: x * s for e, x in f.items()}


def _content_in(f: Terms, v: int, n: int) -> Terms:
    coeffs = list(_coeffs_in(f, v).values())
    g = coeffs[0]
    for c in coeffs[1:]:
        if _is_const(g):
            break
        g = _gcd_terms(g, c, n)
    return g


def _prem(a: Terms, b: Terms, v: int) -> Terms:
    """Pseudo-remainder of ``a`` by ``b`` w.r.t. variable ``v``."""
    db = _deg(b, v)
    lcb = _coeffs_in(b, v)[db]
    r = a
    while r and _deg(r, v) >= db:
        dr = _deg(r, v)
        lcr = _coeffs_in(r, v)[dr]
        shift = tuple(dr - db if i == v else 0 for i in range(len(next(iter(b)))))
        t = {tuple(x + y for x, y in zip(e, shift)): c for e, c in b.items()}
        r = _sub_terms(_mul_terms(lcb, r), _mul_terms(lcr, t))
    return r


def _to_int_primitive(f: Terms) -> Dict[Exponent, int]:
    p = _make_primitive_q(f)
    return {e: int(c) for e, c in p.items()}


def _int_divides(h: Dict[Exponent, int], f: Dict[Exponent, int]) -> bool:
    """Exact division of integer polynomials (nonnegative exponents); ``h`` primitive."""
    lh = max(h)
    lc = h[lh]
    r = dict(f)
    while r:
        lr = max(r)
        d = tuple(a - b for a, b in zip(lr, lh))
        if any(x < 0 for x in d):
            return False
        c, rem = divmod(r[lr], lc)
        if rem:
            return False
        for e, v in h.items():
            k = tuple(a + b for a, b in zip(e, d))
            w = r.get(k, 0) - c * v
            if w:
                r[k] = w
            else:
                r.pop(k, None)
    return True


HEU_ATTEMPTS = 6


def _heu_gcd(f: Dict[Exponent, int], g: Dict[Exponent, int], n: int) -> Dict[Exponent, int] | None:
    """Heuristic gcd of integer polynomials, or None when it gives up.

    Integer contents are split off first. The highest active variable of
    the primitive parts is evaluated at an integer ``xi`` above
    ``2*min(|f|, |g|) + 2``; the recursive gcd is lifted back by the
    balanced ``xi``-adic expansion of its coefficients. With that choice
    of ``xi`` a primitive lift dividing both inputs is the gcd.
    """
    cf = math.gcd(*f.values())
    cg = math.gcd(*g.values())
    c = math.gcd(cf, cg)
    active = [i for i in range(n) if any(e[i] for e in f) or any(e[i] for e in g)]
    if not active:
        return {(0,) * n: c}
    f = {e: x // cf for e, x in f.items()}
    g = {e: x // cg for e, x in g.items()}
    v = active[-1]
    xi = 2 * min(max(map(abs, f.values())), max(map(abs, g.values()))) + 29
    for _ in range(HEU_ATTEMPTS):
        fe = _eval_int(f, v, xi)
        ge = _eval_int(g, v, xi)
        if fe and ge:
            he = _heu_gcd(fe, ge, n)
            if he is None:
                return None
            h = _lift(he, v, xi)
            if h:
                cont = math.gcd(*h.values())
                if h[max(h)] < 0:
                    cont = -cont
                h = {e: c // cont for e, c in h.items()}
                if _int_divides(h, f) and _int_divides(h, g):
                    return {e: c * x for e, x in h.items()}
        xi = xi * 73794 * math.isqrt(math.isqrt(xi)) // 27011
    return None


def _eval_int(f: Dict[Exponent, int], v: int, x: int) -> Dict[Exponent, int]:
    out: Dict[Exponent, int] = {}
    for e, c in f.items():
        k = e[:v] + (0,) + e[v + 1:]
        out[k] = out.get(k, 0) + c * x ** e[v]
    return {e: c for e, c in out.items() if c}


def _lift(h: Dict[Exponent, int], v: int, x: int) -> Dict[Exponent, int]:
    out: Dict[Exponent, int] = {}
    half = x // 2
    for e, c in h.items():
        i = 0
        while c:
            d = c % x
            if d > half:
                d -= x
            if d:
                out[e[:v] + (i,) + e[v + 1:]] = d
            c = (c - d) // x
            i += 1
    return out


def _gcd_terms(f: Terms, g: Terms, n: int) -> Terms:
    """Gcd of two polynomials with nonnegative exponents, up to a scalar."""
    if not f:
        return g
    if not g:
        return f
    f = _shift_terms(f, n)
    g = _shift_terms(g, n)
    h = _heu_gcd(_to_int_primitive(f), _to_int_primitive(g), n)
    if h is not None:
        return {e: Fraction(c) for e, c in h.items()}
    return _gcd_prs(f, g, n)


def _gcd_prs(f: Terms, g: Terms, n: int) -> Terms:
    active = [i for i in range(n) if any(e[i] for e in f) or any(e[i] for e in g)]
    if not active:
        return _const(n)
    v = active[-1]
    cf = _content_in(f, v, n)
    cg = _content_in(g, v, n)
    cont = _gcd_terms(cf, cg, n) if not (_is_const(cf) or _is_const(cg)) else _const(n)
    pf = _divide_poly(f, cf, n) if not _is_const(cf) else f
    pg = _divide_poly(g, cg, n) if not _is_const(cg) else g
    assert pf is not None and pg is not None
    pf, pg = _make_primitive_q(pf), _make_primitive_q(pg)
    a, b = (pf, pg) if _deg(pf, v) >= _deg(pg, v) else (pg, pf)
    while b and _deg(b, v) > 0:
        r = _prem(a, b, v)
        if not r:
            a, b = b, {}
            break
        cr = _content_in(r, v, n)
        r = _divide_poly(r, cr, n) if not _is_const(cr) else r
        assert r is not None
        a, b = b, _make_primitive_q(r)
    if b:  # nonzero and free of v: primitive parts are coprime in v
        a = _const(n)
    out = _mul_terms(cont, a) if not _is_const(cont) else a
    return _make_primitive_q(out)


def _check_ceiling(p: SparsePoly, ceiling: int | None) -> None:
    if ceiling is None:
        return
    spread = p.degree_spread()
    if spread and max(spread) > ceiling:
        raise DegreeCeilingError(
            f"degree spread {max(spread)} exceeds small-degree ceiling {ceiling}"
        )


def gcd_small(
    p: SparsePoly, q: SparsePoly, ceiling: int | None = DEFAULT_DEGREE_CEILING
) -> SparsePoly:
    """Normalized gcd of two Laurent polynomials of small degree."""
    p._check(q)
    if p.is_zero and q.is_zero:
        raise ValueError("gcd of two zero polynomials")
    _check_ceiling(p, ceiling)
    _check_ceiling(q, ceiling)
    if p.is_zero:
        return normalize(q)
    if q.is_zero:
        return normalize(p)
    g = _gcd_terms(strip_monomial(p).as_dict, strip_monomial(q).as_dict, p.nvars)
    return normalize(SparsePoly._from_clean(p.nvars, g))


def gcd_many(polys: Iterable[SparsePoly], ceiling: int | None = DEFAULT_DEGREE_CEILING) -> SparsePoly:
    """Normalized gcd of a family; zero members are ignored."""
    polys = [p for p in polys if not p.is_zero]
    if not polys:
        raise ValueError("gcd of an all-zero family")
    g = normalize(polys[0])
    _check_ceiling(g, ceiling)
    for p in polys[1:]:
        if g.is_constant:
            break
        g = gcd_small(g, p, ceiling)
    return g


def squarefree_gap(p: SparsePoly, ceiling: int | None = DEFAULT_DEGREE_CEILING) -> SparsePoly:
    """``gcd(p, dp/dy_1, ..., dp/dy_n)``: the multiple factors of ``p``, each
    with multiplicity lowered by one. Equals 1 iff ``p`` is squarefree."""
    if p.is_zero:
        raise ValueError("squarefree_gap of zero")
    q = strip_monomial(p)
    _check_ceiling(q, ceiling)
    return gcd_many([q] + [q.partial(i) for i in range(q.nvars)], ceiling)
