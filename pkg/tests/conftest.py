from fractions import Fraction

import sympy

from lacunary.poly import SparsePoly


def symbols(n):
    return sympy.symbols(f"y1:{n + 1}") if n > 1 else (sympy.Symbol("t"),)


def to_expr(p: SparsePoly):
    ys = symbols(p.nvars)
    return sum(
        (sympy.Rational(c.numerator, c.denominator) * sympy.Mul(*[y ** e for y, e in zip(ys, exp)])
         for exp, c in p.terms),
        sympy.Integer(0),
    )


def from_expr(expr, nvars):
    ys = symbols(nvars)
    poly = sympy.Poly(sympy.expand(expr), *ys)
    return SparsePoly.from_dict(nvars, {m: Fraction(int(c.p), int(c.q)) for m, c in poly.terms()})


def same_up_to_unit(p: SparsePoly, q: SparsePoly) -> bool:
    """Equal up to a nonzero scalar and a monomial factor."""
    from lacunary.poly import normalize
    return normalize(p) == normalize(q)
