"""Monomial maps between tori, stored as integer exponent matrices.

A map ``G_m^n -> G_m^N`` is an ``N x n`` matrix whose row ``i`` is the
exponent vector of the ``i``-th coordinate: ``x -> (x**b_1, ..., x**b_N)``.
Composition is matrix product and pullback substitutes monomials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Mapping, Sequence, Tuple

from .lattice import (
    IntMatrix,
    Vector,
    _complete_column,
    is_primitive,
    sign_normalize,
    unimodular_inverse,
)
from .poly import SparsePoly

__all__ = [
    "MonomialMap",
    "Subtorus",
    "size",
    "compose",
    "pullback",
    "image_in_subtorus",
    "riduci",
]


@dataclass(frozen=True)
class MonomialMap:
    exponents: IntMatrix

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> "MonomialMap":
        return cls(IntMatrix.from_rows(rows, ncols))

    @classmethod
    def curve(cls, a: Sequence[int]) -> "MonomialMap":
        """``t -> (t**a_1, ..., t**a_N)``."""
        return cls(IntMatrix.column(a))

    @classmethod
    def identity(cls, n: int) -> "MonomialMap":
        return cls(IntMatrix.identity(n))

    @property
    def codomain_dim(self) -> int:
        return self.exponents.nrows

    @property
    def domain_dim(self) -> int:
        return self.exponents.ncols

    @property
    def column(self) -> Vector:
        """Exponent vector of a map out of ``G_m``."""
        if self.domain_dim != 1:
            raise ValueError("map does not have a one-dimensional domain")
        return self.exponents.col(0)

    def is_injective(self) -> bool:
        return self.domain_dim == 0 or is_primitive(self.exponents)

    def to_json(self) -> dict:
        return {"exponents": self.exponents.to_json()}

    @classmethod
    def from_json(cls, obj: Mapping) -> "MonomialMap":
        return cls(IntMatrix.from_json(obj["exponents"]))

    def __str__(self) -> str:
        return str(self.exponents)


@dataclass(frozen=True)
class Subtorus:
    """Codimension-one subtorus ``{x**normal = 1}``."""

    normal: Vector

    def __post_init__(self):
        b = tuple(int(x) for x in self.normal)
        if not any(b):
            raise ValueError("subtorus normal must be nonzero")
        if reduce(math.gcd, b, 0) != 1:
            raise ValueError(f"subtorus normal {b} is not primitive")
        object.__setattr__(self, "normal", sign_normalize(b))


def size(phi: MonomialMap) -> int:
    return phi.exponents.max_abs()


def compose(psi: MonomialMap, phi: MonomialMap) -> MonomialMap:
    """``psi o phi`` (apply ``phi`` first)."""
    if psi.domain_dim != phi.codomain_dim:
        raise ValueError(
            f"cannot compose: psi has domain dim {psi.domain_dim}, phi has codomain dim {phi.codomain_dim}"
        )
    return MonomialMap(psi.exponents @ phi.exponents)


def pullback(phi: MonomialMap, F: SparsePoly) -> SparsePoly:
    """``phi^#(F)``: substitute ``y_i -> x**b_i`` and merge like terms."""
    M = phi.exponents
    if F.nvars != M.nrows:
        raise ValueError(f"polynomial has {F.nvars} variables, map codomain has {M.nrows}")
    n = M.ncols
    rows = M.data
    out = {}
    for e, c in F.terms:
        x = [0] * n
        for k, r in zip(e, rows):
            if k:
                for j in range(n):
                    x[j] += k * r[j]
        x = tuple(x)
        out[x] = out.get(x, Fraction(0)) + c
    return SparsePoly.from_dict(n, out)


def image_in_subtorus(phi: MonomialMap, T: Subtorus) -> bool:
    a = phi.column
    if len(a) != len(T.normal):
        raise ValueError("dimension mismatch between map and subtorus")
    return sum(x * y for x, y in zip(a, T.normal)) == 0


def riduci(phi: MonomialMap, T: Subtorus) -> Tuple[MonomialMap, MonomialMap]:
    """Factor a curve lying in ``T`` through ``G_m^{N-1}``.

    Returns ``(psi_t, phi_t)`` with ``psi_t`` injective and
    ``psi_t o phi_t == phi``. ``V`` is a unimodular completion of the
    normal ``b`` with entries at most ``|b|``; the columns of ``psi_t`` are
    the last ``N-1`` rows of ``V^{-1}`` (a basis of ``b``'s orthogonal
    lattice) and ``phi_t`` is ``<v_i, a>`` over the remaining columns of
    ``V``. Hence ``size(phi_t) <= N*|b|*size(phi)``.
    """
    if not image_in_subtorus(phi, T):
        raise ValueError("image of the map is not contained in the subtorus")
    a = phi.column
    n = len(a)
    b = T.normal
    cols = _complete_column(b)
    V = IntMatrix.from_rows(list(zip(*cols)), n)
    Vinv = unimodular_inverse(V)
    K = IntMatrix.from_rows([Vinv.data[i] for i in range(1, n)], n).T
    theta = tuple(sum(x * y for x, y in zip(cols[i], a)) for i in range(1, n))
    return MonomialMap(K), MonomialMap.curve(theta)
