"""Iterated factorization of a monomial curve through small subtori.

Starting from ``phi(t) = (t**a_1, ..., t**a_N)`` and ``psi = Id``, each
level looks for a primitive relation ``b`` with ``<theta, b> = 0`` and
``|b| <= B_k`` in the current coordinates, factors through the subtorus
``{x**b = 1}`` and folds the new map into ``psi``. The loop halts after
the first level that finds no relation (or at ``N - 1`` levels), so at
most ``N`` scans happen in total.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import reduce as _fold
from typing import List, Mapping, Optional, Sequence, Tuple

from .lattice import (
    IntMatrix,
    Vector,
    hnf,
    kernel_basis,
    solve_factorization,
    unimodular_inverse,
)
from .torus import MonomialMap, Subtorus, compose, riduci, size

DEFAULT_BOUND = 6


@dataclass(frozen=True)
class ReductionConfig:
    """Relation bounds per level.

    ``schedule[k]`` is the bound used at level ``k``; the last entry
    repeats. Without a schedule every level uses ``bound``.
    """

    bound: int = DEFAULT_BOUND
    schedule: Optional[Tuple[int, ...]] = None
    max_levels: Optional[int] = None

    def __post_init__(self):
        if self.bound < 1:
            raise ValueError("bound must be >= 1")
        if self.schedule is not None:
            sched = tuple(int(b) for b in self.schedule)
            if not sched or min(sched) < 1:
                raise ValueError("schedule entries must be >= 1")
            object.__setattr__(self, "schedule", sched)

    def bound_at(self, level: int) -> int:
        if self.schedule is None:
            return self.bound
        return self.schedule[min(level, len(self.schedule) - 1)]

    def max_bound(self, levels: int) -> int:
        return max(self.bound_at(k) for k in range(max(levels, 1)))


@dataclass(frozen=True)
class ReductionResult:
    k: int
    psi: MonomialMap
    phi1: MonomialMap
    trace: Tuple[Tuple[int, Subtorus], ...] = ()
    psi_size_bound: int = 1

    @property
    def theta(self) -> Vector:
        return self.phi1.column

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "psi": self.psi.to_json(),
            "phi1": self.phi1.to_json(),
            "trace": [
                {"level": lvl, "normal": [str(x) for x in T.normal]} for lvl, T in self.trace
            ],
            "psi_size_bound": str(self.psi_size_bound),
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "ReductionResult":
        trace = tuple(
            (int(e["level"]), Subtorus(tuple(int(x) for x in e["normal"])))
            for e in obj.get("trace", [])
        )
        return cls(
            k=int(obj["k"]),
            psi=MonomialMap.from_json(obj["psi"]),
            phi1=MonomialMap.from_json(obj["phi1"]),
            trace=trace,
            psi_size_bound=int(obj.get("psi_size_bound", 1)),
        )


def canonical_basis(psi: IntMatrix, a: Sequence[int]) -> Tuple[IntMatrix, Vector]:
    """A canonical basis of the column lattice of ``psi`` and the coordinates of ``a``.

    Preferred form: the lex-first set of rows ``R`` with ``det(psi_R) = +-1``
    is turned into the identity, so ``theta = a_R`` and
    ``size(theta) <= size(a)``. When no such row set exists the row HNF of
    ``psi^T`` is used instead. Both depend only on the lattice, not on the
    basis handed in.
    """
    n, m = psi.shape
    if m == 0:
        return psi, ()
    for rows in itertools.combinations(range(n), m):
        sub = psi.submatrix(rows, range(m))
        if abs(sub.det()) == 1:
            canon = psi @ unimodular_inverse(sub)
            return canon, tuple(int(a[i]) for i in rows)
    H, _ = hnf(psi.T)
    canon = IntMatrix.from_rows([r for r in H.data if any(r)], n).T
    return canon, solve_factorization(canon, a)


def reduce(phi: MonomialMap, cfg: ReductionConfig = ReductionConfig()) -> ReductionResult:
    a = phi.column
    N = len(a)
    if not any(a):
        raise ValueError("cannot reduce the zero exponent vector")
    if _fold(math.gcd, a, 0) != 1:
        raise ValueError(f"exponent vector {a} does not have gcd 1; normalize it first")
    max_levels = N - 1 if cfg.max_levels is None else min(cfg.max_levels, N - 1)

    psi = IntMatrix.identity(N)
    theta: Vector = tuple(a)
    trace: List[Tuple[int, Subtorus]] = []
    psi_bound = 1
    k = 0
    while k < max_levels:
        B = cfg.bound_at(k)
        relations = kernel_basis(theta, B)
        if not relations:
            break
        # lex-smallest relation; every entry of Phi already satisfies <theta, b> = 0
        T = Subtorus(relations[0])
        psi_t, phi_t = riduci(MonomialMap.curve(theta), T)
        raw_psi = psi @ psi_t.exponents
        canon, canon_theta = canonical_basis(raw_psi, a)
        psi, theta = _pick_basis(raw_psi, phi_t.column, canon, canon_theta, N * B * max(map(abs, a)))
        trace.append((k, T))
        psi_bound *= (N * B) ** N
        k += 1
    return ReductionResult(
        k=k,
        psi=MonomialMap(psi),
        phi1=MonomialMap.curve(theta),
        trace=tuple(trace),
        psi_size_bound=psi_bound,
    )


def _pick_basis(raw, raw_theta, canon, canon_theta, limit):
    # the canonical basis wins unless it inflates theta past the riduci guarantee
    if max(map(abs, canon_theta), default=0) <= limit:
        return canon, tuple(canon_theta)
    return raw, tuple(raw_theta)


def reduce_exponents(a: Sequence[int], bound: int = DEFAULT_BOUND) -> ReductionResult:
    return reduce(MonomialMap.curve(a), ReductionConfig(bound=bound))
