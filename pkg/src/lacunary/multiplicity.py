"""Structure witnesses for multiple roots of ``f = gamma_0 + sum gamma_j t**a_j``.

A witness is a primitive ``B`` and ``theta`` with ``a = B @ theta`` such
that ``F = gamma_0 + sum gamma_j y**b_j`` (so ``f = F(t**theta)``) has a
multiple factor whose pullback is not a monomial. The search runs the gcd
engine on ``f`` and ``t*f'``; when a block of the support carries the
multiple root on its own, the support is split into blocks and each block
is treated as its own polynomial on a common reduced support.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce as _fold
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from .gcd_engine import SparseSystem, sparse_gcd, strip_cyclotomic
from .lattice import IntMatrix, Vector, box_vectors, hnf, is_primitive, vector_gcd_split
from .poly import (
    DEFAULT_DEGREE_CEILING,
    DegreeCeilingError,
    SparsePoly,
    euler_derivation,
    gcd_many,
    gcd_small,
    squarefree_gap,
)
from .reduction import ReductionConfig
from .torus import MonomialMap, pullback

REGIME_REDUCTION = "reduction"
REGIME_SPLIT = "split"
REGIME_FALLBACK = "fallback-small-D"


@dataclass(frozen=True)
class MultipleRootWitness:
    k: int
    B: IntMatrix
    theta: Vector
    F: SparsePoly
    multiple_part: SparsePoly
    pullback_pi: SparsePoly
    regime: str = REGIME_REDUCTION
    blocks: Optional[Tuple[Tuple[int, ...], ...]] = None

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "B": self.B.to_json(),
            "theta": [str(x) for x in self.theta],
            "F": self.F.to_json(),
            "multiple_part": self.multiple_part.to_json(),
            "pullback_pi": self.pullback_pi.to_json(),
            "regime": self.regime,
            "blocks": None if self.blocks is None else [list(b) for b in self.blocks],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "MultipleRootWitness":
        blocks = obj.get("blocks")
        return cls(
            k=int(obj["k"]),
            B=IntMatrix.from_json(obj["B"]),
            theta=tuple(int(x) for x in obj["theta"]),
            F=SparsePoly.from_json(obj["F"]),
            multiple_part=SparsePoly.from_json(obj["multiple_part"]),
            pullback_pi=SparsePoly.from_json(obj["pullback_pi"]),
            regime=str(obj.get("regime", REGIME_REDUCTION)),
            blocks=None if blocks is None else tuple(tuple(int(i) for i in b) for b in blocks),
        )


@dataclass(frozen=True)
class SplitDecomposition:
    """Partition of the term indices ``{0..N}`` (0 is the constant term) into blocks.

    Each block after the first is shifted by the exponent of its smallest
    member so that it contributes a constant term of its own.
    """

    blocks: Tuple[Tuple[int, ...], ...]
    shifts: Tuple[int, ...]

    def __post_init__(self):
        seen = sorted(i for b in self.blocks for i in b)
        if len(self.blocks) < 2 or any(not b for b in self.blocks):
            raise ValueError("a split needs at least two nonempty blocks")
        if seen != list(range(len(seen))):
            raise ValueError("blocks must be disjoint and cover 0..N")
        if 0 not in self.blocks[0]:
            raise ValueError("the first block must contain the constant term")


def polynomial_of(gamma: Sequence, a: Sequence[int]) -> SparsePoly:
    terms: Dict[Tuple[int], Fraction] = {(0,): Fraction(gamma[0])}
    for aj, c in zip(a, gamma[1:]):
        terms[(int(aj),)] = Fraction(c)
    return SparsePoly.from_dict(1, terms)


def form_from_matrix(gamma: Sequence, B: IntMatrix) -> SparsePoly:
    """``gamma_0 + sum_j gamma_j y**b_j`` where ``b_j`` are the rows of ``B``."""
    n = B.ncols
    terms: Dict[Tuple[int, ...], Fraction] = {(0,) * n: Fraction(gamma[0])}
    for row, c in zip(B.data, gamma[1:]):
        if row in terms:
            raise ValueError("rows of B must be distinct and nonzero")
        terms[row] = Fraction(c)
    return SparsePoly.from_dict(n, terms)


def _check_input(gamma: Sequence, a: Sequence[int]) -> Tuple[Tuple[Fraction, ...], Tuple[int, ...]]:
    gamma = tuple(Fraction(c) for c in gamma)
    a = tuple(int(x) for x in a)
    if len(gamma) != len(a) + 1:
        raise ValueError(f"need {len(a) + 1} coefficients for {len(a)} exponents")
    if not any(gamma):
        raise ValueError("the polynomial is zero")
    if not a or any(x == 0 for x in a) or len(set(a)) != len(a):
        raise ValueError("exponents must be nonzero and pairwise distinct")
    return gamma, a


@dataclass(frozen=True)
class Candidate:
    """Intermediate data of the non-split search, exposed for testing the eigen filter."""

    F1: SparsePoly
    G: SparsePoly
    M: SparsePoly
    theta_reduced: Vector
    pullback: SparsePoly
    d: int
    psi: IntMatrix
    k: int


def multiple_part_candidate(
    gamma: Sequence,
    a: Sequence[int],
    cfg: ReductionConfig = ReductionConfig(),
    degree_ceiling: Optional[int] = DEFAULT_DEGREE_CEILING,
) -> Candidate:
    gamma, a = _check_input(gamma, a)
    d, a1 = vector_gcd_split(a)
    # f_1 on the coprime exponents and f_2 = t f_1'
    rows = (gamma, (Fraction(0),) + tuple(g * x for g, x in zip(gamma[1:], a1)))
    sys = SparseSystem(rows, a1)
    cert = sparse_gcd(sys, cfg, order_bound=0, with_exceptional=False, degree_ceiling=degree_ceiling)
    red = cert.reduction
    F1 = pullback(red.psi, sys.linear_forms()[0])
    M = gcd_small(squarefree_gap(F1, degree_ceiling), cert.G, degree_ceiling)
    return Candidate(
        F1=F1,
        G=cert.G,
        M=M,
        theta_reduced=red.theta,
        pullback=pullback(red.phi1, M),
        d=d,
        psi=red.psi.exponents,
        k=red.k,
    )


def find_witness(
    gamma: Sequence,
    a: Sequence[int],
    cfg: ReductionConfig = ReductionConfig(),
    degree_ceiling: Optional[int] = DEFAULT_DEGREE_CEILING,
) -> Optional[MultipleRootWitness]:
    """Witness from the gcd certificate of ``f`` and ``t f'``, or ``None``.

    A factor ``P`` of ``G`` with ``Delta P = lambda P`` pulls back to a
    monomial, so requiring a non-monomial pullback of the multiple part
    removes exactly those. When the reduction yields no witness and the
    coprime exponents fit under ``degree_ceiling`` (the small-D case),
    the trivial one-variable structure ``B = a/d``, ``theta = d`` is
    tried with the cyclotomic factors removed.
    """
    gamma, a = _check_input(gamma, a)
    try:
        c = multiple_part_candidate(gamma, a, cfg, degree_ceiling)
    except DegreeCeilingError:
        w = _fallback_witness(gamma, a, degree_ceiling)
        if w is None:
            raise
        return w
    if c.k >= 1 and not (c.M.is_constant or c.pullback.is_monomial):
        theta = tuple(c.d * x for x in c.theta_reduced)
        return MultipleRootWitness(
            k=c.k,
            B=c.psi,
            theta=theta,
            F=c.F1,
            multiple_part=c.M,
            pullback_pi=pullback(MonomialMap.curve(theta), c.M),
            regime=REGIME_REDUCTION,
        )
    return _fallback_witness(gamma, a, degree_ceiling)


def _fallback_witness(gamma, a, degree_ceiling) -> Optional[MultipleRootWitness]:
    d, a1 = vector_gcd_split(a)
    lo, hi = min(min(a1), 0), max(max(a1), 0)
    if degree_ceiling is not None and hi - lo > degree_ceiling:
        return None
    B = IntMatrix.column(a1)
    F = form_from_matrix(gamma, B)
    M = strip_cyclotomic(squarefree_gap(F, degree_ceiling))
    if M.is_constant:
        return None
    theta = (d,)
    return MultipleRootWitness(
        k=len(a) - 1,
        B=B,
        theta=theta,
        F=F,
        multiple_part=M,
        pullback_pi=pullback(MonomialMap.curve(theta), M),
        regime=REGIME_FALLBACK,
    )


# ---------------------------------------------------------------------------
# split supports


def _set_partitions(n: int) -> Iterator[Tuple[Tuple[int, ...], ...]]:
    """Set partitions of ``range(n)`` via restricted growth strings (lex order)."""

    def grow(prefix: List[int], m: int):
        if len(prefix) == n:
            blocks: List[List[int]] = [[] for _ in range(m + 1)]
            for i, b in enumerate(prefix):
                blocks[b].append(i)
            yield tuple(tuple(b) for b in blocks)
            return
        for b in range(m + 2):
            prefix.append(b)
            yield from grow(prefix, max(m, b))
            prefix.pop()

    if n == 0:
        return
    yield from grow([0], 0)


def split_decompositions(gamma: Sequence, a: Sequence[int]) -> List[SplitDecomposition]:
    """Candidate splits: at least two blocks, each with two or more nonzero terms.

    Ordered by the number of blocks, then lexicographically, so the first
    success is deterministic.
    """
    ex = (0,) + tuple(a)
    out = []
    for blocks in _set_partitions(len(ex)):
        if len(blocks) < 2:
            continue
        if any(sum(1 for i in b if gamma[i]) < 2 for b in blocks):
            continue
        shifts = (0,) + tuple(min(ex[i] for i in b) for b in blocks[1:])
        out.append(SplitDecomposition(blocks, shifts))
    out.sort(key=lambda s: (len(s.blocks), s.blocks))
    return out


def find_witness_split(
    gamma: Sequence,
    a: Sequence[int],
    cfg: ReductionConfig = ReductionConfig(),
    degree_ceiling: Optional[int] = DEFAULT_DEGREE_CEILING,
) -> Optional[MultipleRootWitness]:
    """Witness through a block decomposition of the support.

    For blocks ``Lambda_1..Lambda_u`` with shifts ``s_r``, the block
    polynomials ``f_r`` (exponents ``(a_j - s_r)/d``) and ``t f_r'`` share
    one reduced support; the gcd engine runs on all ``2u`` of them. A
    common multiple factor ``P`` of the reduced blocks ``F_r`` is a
    multiple factor of ``F = F_1 + sum_r z_r F_r`` where each extra
    variable ``z_r`` pulls back to ``t**s_r``.
    """
    gamma, a = _check_input(gamma, a)
    for split in split_decompositions(gamma, a):
        w = _witness_for_split(gamma, a, split, cfg, degree_ceiling)
        if w is not None:
            return w
    return None


def find_any_witness(
    gamma: Sequence,
    a: Sequence[int],
    cfg: ReductionConfig = ReductionConfig(),
    degree_ceiling: Optional[int] = DEFAULT_DEGREE_CEILING,
) -> Optional[MultipleRootWitness]:
    w = find_witness(gamma, a, cfg, degree_ceiling)
    if w is None:
        w = find_witness_split(gamma, a, cfg, degree_ceiling)
    return w


def _witness_for_split(gamma, a, split: SplitDecomposition, cfg, degree_ceiling):
    ex = (0,) + tuple(a)
    N = len(a)
    block_of = {i: r for r, b in enumerate(split.blocks) for i in b}
    shift_index = {r: (0 if r == 0 else min(b, key=lambda i: ex[i])) for r, b in enumerate(split.blocks)}
    rel = {i: ex[i] - split.shifts[block_of[i]] for i in range(N + 1) if i != shift_index[block_of[i]]}
    d = _fold(math.gcd, rel.values(), 0)
    if d == 0:
        return None
    values = sorted({v // d for v in rel.values()})
    col = {v: j for j, v in enumerate(values)}
    u = len(split.blocks)
    rows = []
    for r, b in enumerate(split.blocks):
        base = [Fraction(0)] * (len(values) + 1)
        deriv = [Fraction(0)] * (len(values) + 1)
        for i in b:
            if i == shift_index[r]:
                base[0] += gamma[i]
            else:
                v = rel[i] // d
                base[col[v] + 1] += gamma[i]
                deriv[col[v] + 1] += gamma[i] * v
        rows.append(tuple(base))
        rows.append(tuple(deriv))
    if not any(any(r) for r in rows):
        return None
    sys = SparseSystem(tuple(rows), tuple(values))
    cert = sparse_gcd(sys, cfg, order_bound=0, with_exceptional=False, degree_ceiling=degree_ceiling)
    red = cert.reduction
    psi = red.psi.exponents
    m = psi.ncols
    forms = sys.linear_forms()
    blocks_F = [pullback(red.psi, forms[2 * r]) for r in range(u)]
    gaps = [squarefree_gap(Fr, degree_ceiling) for Fr in blocks_F if not Fr.is_zero]
    M = gcd_many([cert.G] + gaps, degree_ceiling)
    if M.is_constant or pullback(red.phi1, M).is_monomial:
        return None
    # lift to B with one extra column per shifted block
    Brows = []
    for j in range(1, N + 1):
        r = block_of[j]
        head = psi.data[col[rel[j] // d]] if j in rel else (0,) * m
        tail = tuple(int(r == s) for s in range(1, u))
        Brows.append(tuple(head) + tail)
    B = IntMatrix.from_rows(Brows, m + u - 1)
    theta = tuple(d * x for x in red.theta) + tuple(split.shifts[1:])
    if not is_primitive(B):
        return None
    F = form_from_matrix(gamma, B)
    mult = gcd_small(squarefree_gap(F, degree_ceiling), M.embed(m + u - 1, range(m)), degree_ceiling)
    if mult.is_constant:
        return None
    pi = pullback(MonomialMap.curve(theta), mult)
    if pi.is_monomial:
        return None
    return MultipleRootWitness(
        k=N - (m + u - 1),
        B=B,
        theta=theta,
        F=F,
        multiple_part=mult,
        pullback_pi=pi,
        regime=REGIME_SPLIT,
        blocks=split.blocks,
    )


# ---------------------------------------------------------------------------
# candidate subspaces


def _lattice_key(B: IntMatrix) -> Tuple[Tuple[int, ...], ...]:
    H, _ = hnf(B.T)
    return tuple(r for r in H.data if any(r))


@lru_cache(maxsize=16)
def _primitive_bases(N: int, bound: int) -> Tuple[IntMatrix, ...]:
    vecs = box_vectors(N, bound)
    out = []
    for m in range(1, N):
        seen = set()
        for combo in itertools.combinations(vecs, m):
            B = IntMatrix.from_rows(list(zip(*combo)), m)
            if not is_primitive(B):
                continue
            key = _lattice_key(B)
            if key in seen:
                continue
            seen.add(key)
            out.append(B)
    return tuple(out)


def enumerate_witness_subspaces(
    gamma: Optional[Sequence], N: int, bound: int,
    degree_ceiling: Optional[int] = DEFAULT_DEGREE_CEILING,
) -> List[IntMatrix]:
    """Primitive ``N x (N-k)`` matrices (``k >= 1``) with entries ``<= bound``, one per column lattice.

    With ``gamma`` given, only matrices whose form
    ``gamma_0 + sum gamma_j y**b_j`` has a multiple factor are kept: the
    exponent vectors ``a = B @ theta`` of those are the only ones a
    reduction-regime witness can produce.
    """
    if N < 1:
        raise ValueError("N must be positive")
    if bound < 1 or N == 1:
        return []
    bases = list(_primitive_bases(N, bound))
    if gamma is None:
        return bases
    gamma = tuple(Fraction(c) for c in gamma)
    if len(gamma) != N + 1:
        raise ValueError(f"need {N + 1} coefficients")
    out = []
    for B in bases:
        if len(set(B.data)) != N or any(not any(r) for r in B.data):
            continue
        F = form_from_matrix(gamma, B)
        if not squarefree_gap(F, degree_ceiling).is_constant:
            out.append(B)
    return out


def witness_failures(gamma: Sequence, a: Sequence[int], w: MultipleRootWitness,
                     degree_ceiling: Optional[int] = DEFAULT_DEGREE_CEILING) -> List[str]:
    """Structural checks of a witness; an empty list means it holds."""
    gamma, a = _check_input(gamma, a)
    fails = []
    if w.B.shape != (len(a), len(w.theta)):
        return [f"B has shape {w.B.shape}, expected {(len(a), len(w.theta))}"]
    if not is_primitive(w.B):
        fails.append("B is not primitive")
    if w.B.nrows - w.B.ncols != w.k:
        fails.append("k does not match the shape of B")
    if tuple(sum(x * y for x, y in zip(r, w.theta)) for r in w.B.data) != a:
        fails.append("a != B @ theta")
    if form_from_matrix(gamma, w.B) != w.F:
        fails.append("F is not gamma_0 + sum gamma_j y**b_j")
    if pullback(MonomialMap.curve(w.theta), w.F) != polynomial_of(gamma, a):
        fails.append("F does not pull back to f")
    gap = squarefree_gap(w.F, degree_ceiling)
    if w.multiple_part.is_constant:
        fails.append("multiple part is constant")
    elif gcd_small(gap, w.multiple_part, degree_ceiling) != w.multiple_part:
        fails.append("multiple part does not divide the squarefree gap of F")
    if pullback(MonomialMap.curve(w.theta), w.multiple_part) != w.pullback_pi:
        fails.append("pullback_pi is not the pullback of the multiple part")
    if w.pullback_pi.is_monomial:
        fails.append("pullback_pi is a monomial")
    return fails


def is_eigen(P: SparsePoly, theta: Sequence[int]) -> bool:
    """``Delta P = lambda P`` for a single scalar ``lambda``."""
    vals = {sum(x * y for x, y in zip(e, theta)) for e in P.support}
    if len(vals) > 1:
        return False
    lam = next(iter(vals), 0)
    return euler_derivation(P, theta) == P.scale(lam)
