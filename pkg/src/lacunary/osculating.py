"""Second intersections of a monomial curve with its osculating space at ``(1, ..., 1)``.

For ``0 = a_0 < a_1 < ... < a_N`` the osculating space is
``{x : rank A(a, x) < N}`` where ``A`` has rows ``(1, a_i, ..., a_i**(N-2), x_i)``.
It is cut out by two linear forms (two maximal minors). A point
``(1 : xi**a_1 : ... : xi**a_N)`` with ``xi`` not a root of unity lies on
it only if, for some small primitive ``B`` with ``a = B @ theta``, the
variety ``V_B = {y : rank(a_i, ..., a_i**(N-2), y**b_i - 1) < N - 1}`` has a
hypersurface component through ``xi**theta``.

Each ``(B, theta)`` is checked twice: by pairwise resultants of the
``(N-1) x (N-1)`` minors (a hypersurface component makes every pairwise
resultant vanish identically) and by the gcd of all minors. A candidate
needs both, plus a root of the pulled-back component off the unit roots.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce as _fold
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .gcd_engine import GcdCertificate, SparseSystem, sparse_gcd, strip_cyclotomic
from .lattice import IntMatrix, Vector, bareiss_det, left_kernel, solve_factorization
from .multiplicity import _lattice_key, enumerate_witness_subspaces
from .poly import DEFAULT_DEGREE_CEILING, SparsePoly, divides, gcd_many
from .reduction import ReductionConfig
from .torus import MonomialMap, pullback

VERDICT_NONE = "no-small-structure"
VERDICT_CANDIDATE = "candidate-found"
VERDICT_FALLBACK = "fallback-small-D"

MAX_N = 4


@dataclass(frozen=True)
class OsculatingInstance:
    a: Tuple[int, ...]

    def __post_init__(self):
        a = tuple(int(x) for x in self.a)
        if len(a) < 2:
            raise ValueError("need N >= 2 exponents")
        if a[0] <= 0 or any(x >= y for x, y in zip(a, a[1:])):
            raise ValueError(f"exponents {a} must be positive and strictly increasing")
        if _fold(math.gcd, a, 0) != 1:
            raise ValueError(f"exponents {a} are not coprime; use a/gcd(a) instead")
        object.__setattr__(self, "a", a)

    @property
    def N(self) -> int:
        return len(self.a)

    @property
    def D(self) -> int:
        return self.a[-1]

    def matrix(self, x: Sequence) -> List[List[Fraction]]:
        """``A(a, x)``, ``(N+1) x N``, with ``a_0 = 0`` prepended."""
        ex = (0,) + self.a
        if len(x) != len(ex):
            raise ValueError(f"need {len(ex)} coordinates")
        return [[Fraction(e) ** p for p in range(self.N - 1)] + [Fraction(xi)] for e, xi in zip(ex, x)]


def rank(rows: Sequence[Sequence]) -> int:
    m = [[Fraction(x) for x in r] for r in rows]
    rk = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(rk, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[rk], m[piv] = m[piv], m[rk]
        for i in range(len(m)):
            if i != rk and m[i][c]:
                f = m[i][c] / m[rk][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[rk])]
        rk += 1
    return rk


def _minor_form(inst: OsculatingInstance, deleted: int) -> Tuple[int, ...]:
    """Coefficients of ``x_0..x_N`` in the determinant of ``A`` without row ``deleted``."""
    ex = (0,) + inst.a
    N = inst.N
    rows = [i for i in range(N + 1) if i != deleted]
    coeffs = [0] * (N + 1)
    for pos, r in enumerate(rows):
        sub = [[ex[i] ** p for p in range(N - 1)] for i in rows if i != r]
        coeffs[r] = (-1) ** (pos + N - 1) * bareiss_det(sub)
    return tuple(coeffs)


def build_minor_forms(inst: OsculatingInstance) -> Tuple[SparsePoly, SparsePoly]:
    """Two independent linear forms in ``x_0..x_N`` cutting out the osculating space.

    Rows 0 and 1 of ``A`` are deleted first; later pairs are tried only if
    those forms are dependent.
    """
    N = inst.N
    forms: Dict[int, Tuple[int, ...]] = {}
    for i, j in itertools.combinations(range(N + 1), 2):
        for r in (i, j):
            if r not in forms:
                forms[r] = _minor_form(inst, r)
        if rank([forms[i], forms[j]]) == 2:
            bound = math.factorial(N) * inst.D ** (N * N)
            assert all(abs(c) <= bound for c in forms[i] + forms[j])
            return _linear(forms[i]), _linear(forms[j])
    raise AssertionError("all minors dependent; impossible for increasing exponents")


def _linear(coeffs: Sequence[int]) -> SparsePoly:
    n = len(coeffs)
    return SparsePoly.from_dict(n, {tuple(int(i == j) for i in range(n)): c for j, c in enumerate(coeffs)})


def minor_system(inst: OsculatingInstance) -> SparseSystem:
    """``f_i = L_i(1, t**a_1, ..., t**a_N)`` as a sparse system."""
    L1, L2 = build_minor_forms(inst)
    rows = []
    for L in (L1, L2):
        rows.append(tuple(L.coefficient(tuple(int(i == j) for i in range(inst.N + 1))) for j in range(inst.N + 1)))
    return SparseSystem(tuple(rows), inst.a)


# ---------------------------------------------------------------------------
# the rank variety V_B at a given theta


def remark_minors(a: Sequence[int], B: IntMatrix) -> List[Tuple[SparsePoly, Tuple[Vector, ...]]]:
    """The ``N`` minors of ``(l_i, ..., l_i**(N-2), y**b_i - 1)`` at ``l_i = a_i``.

    Returns each minor together with its formal support: the exponents
    present for generic ``theta`` (``b_i`` for the kept rows and ``0``).
    Only the constant coefficient can vanish on specialization.
    """
    N = len(a)
    m = B.ncols
    out = []
    for r in range(N):
        rows = [i for i in range(N) if i != r]
        terms: Dict[Vector, int] = {}
        for pos, i in enumerate(rows):
            sub = [[a[j] ** p for p in range(1, N - 1)] for j in rows if j != i]
            c = (-1) ** (pos + N - 2) * (bareiss_det(sub) if sub else 1)
            terms[B.data[i]] = terms.get(B.data[i], 0) + c
            terms[(0,) * m] = terms.get((0,) * m, 0) - c
        support = tuple(sorted({B.data[i] for i in rows} | {(0,) * m}))
        out.append((SparsePoly.from_dict(m, terms), support))
    return out


def _sylvester_det(p: List[Fraction], q: List[Fraction]) -> Fraction:
    """Resultant of two univariate polynomials given by formal coefficient lists (low to high)."""
    dp, dq = len(p) - 1, len(q) - 1
    if dp == 0 and dq == 0:
        return Fraction(1)
    n = dp + dq
    rows = []
    for i in range(dq):
        rows.append([Fraction(0)] * i + p[::-1] + [Fraction(0)] * (n - dp - 1 - i))
    for i in range(dp):
        rows.append([Fraction(0)] * i + q[::-1] + [Fraction(0)] * (n - dq - 1 - i))
    den = 1
    for r in rows:
        for x in r:
            den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [[int(x * den) for x in r] for r in rows]
    return Fraction(bareiss_det(ints), den ** n)


def _coeff_lists(P: SparsePoly, support: Sequence[Vector], var: int, point: Dict[int, Fraction]):
    """Coefficients in ``y_var`` (formal degree range) after substituting the other variables."""
    lo = min(e[var] for e in support)
    hi = max(e[var] for e in support)
    shift = [min(e[j] for e in support) for j in range(P.nvars)]
    coeffs = [Fraction(0)] * (hi - lo + 1)
    for e, c in P.terms:
        val = Fraction(c)
        for j, x in point.items():
            val *= x ** (e[j] - shift[j])
        coeffs[e[var] - lo] += val
    return coeffs


def _pair_resultant_vanishes(P, sp, Q, sq, var: int, rng: random.Random) -> bool:
    """Exact test ``Res_{y_var}(P, Q) == 0`` identically in the other variables.

    The resultant has degree at most ``dP*eQ + dQ*eP`` in each remaining
    variable, so vanishing on a full grid of that size is a proof; one
    random point is tried first as a cheap rejection.
    """
    m = P.nvars
    others = [j for j in range(m) if j != var]
    dP = max(e[var] for e in sp) - min(e[var] for e in sp)
    dQ = max(e[var] for e in sq) - min(e[var] for e in sq)
    degs = []
    for j in others:
        eP = max(e[j] for e in sp) - min(e[j] for e in sp)
        eQ = max(e[j] for e in sq) - min(e[j] for e in sq)
        degs.append(dP * eQ + dQ * eP)
    probe = {j: Fraction(rng.randint(2, 10 ** 6)) for j in others}
    if _sylvester_det(_coeff_lists(P, sp, var, probe), _coeff_lists(Q, sq, var, probe)) != 0:
        return False
    for pt in itertools.product(*[range(2, d + 3) for d in degs]):
        point = {j: Fraction(v) for j, v in zip(others, pt)}
        if _sylvester_det(_coeff_lists(P, sp, var, point), _coeff_lists(Q, sq, var, point)) != 0:
            return False
    return True


def in_resultant_variety(a: Sequence[int], B: IntMatrix, seed: int = 0) -> bool:
    """``theta`` lies on the resultant variety ``W`` of ``B`` for some elimination variable.

    For every pair of distinct minors the resultant with respect to
    ``y_var`` must vanish identically; the variable is tried in turn so a
    component not involving the last variable is not missed.
    """
    minors = remark_minors(a, B)
    rng = random.Random(seed)
    for var in reversed(range(B.ncols)):
        if all(
            _pair_resultant_vanishes(P, sp, Q, sq, var, rng)
            for (P, sp), (Q, sq) in itertools.combinations(minors, 2)
        ):
            return True
    return False


def hypersurface_part(a: Sequence[int], B: IntMatrix,
                      degree_ceiling: Optional[int] = DEFAULT_DEGREE_CEILING) -> SparsePoly:
    """Gcd of all minors: its zero set is the union of hypersurface components of ``V_B``."""
    return gcd_many([P for P, _ in remark_minors(a, B)], degree_ceiling)


# ---------------------------------------------------------------------------
# report


@dataclass(frozen=True)
class SubspaceCheck:
    B: IntMatrix
    theta: Vector
    source: str
    in_W: bool
    component: SparsePoly
    candidate: bool

    def to_json(self) -> dict:
        return {
            "B": self.B.to_json(),
            "theta": [str(x) for x in self.theta],
            "source": self.source,
            "in_W": self.in_W,
            "component": self.component.to_json(),
            "candidate": self.candidate,
        }


@dataclass(frozen=True)
class PirolaReport:
    a: Tuple[int, ...]
    certificate: GcdCertificate
    witness_subspaces: Tuple[SubspaceCheck, ...]
    verdict: str
    torsion_point_flagged: bool
    discrepancies: Tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "a": [str(x) for x in self.a],
            "verdict": self.verdict,
            "torsion_point": {"rank_deficient": self.torsion_point_flagged, "torsion": True},
            "certificate": self.certificate.to_json(),
            "witness_subspaces": [w.to_json() for w in self.witness_subspaces],
            "discrepancies": list(self.discrepancies),
        }


@lru_cache(maxsize=16)
def _subspace_normals(N: int, bound: int):
    """Candidate bases grouped by column count, with stacked left-kernel normals."""
    groups: Dict[int, Tuple[List[IntMatrix], List]] = {}
    for B in enumerate_witness_subspaces(None, N, bound):
        K = left_kernel(B)
        bs, ks = groups.setdefault(B.ncols, ([], []))
        bs.append(B)
        ks.append(K.data)
    out = {}
    for m, (bs, ks) in groups.items():
        out[m] = (bs, np.array(ks, dtype=np.int64))
    return out


def subspaces_containing(a: Sequence[int], bound: int) -> List[IntMatrix]:
    """Enumerated bases (entries ``<= bound``) whose column lattice contains ``a``."""
    N = len(a)
    out = []
    av = np.array(a, dtype=np.int64)
    for m, (bs, K) in sorted(_subspace_normals(N, bound).items()):
        hit = np.all(K @ av == 0, axis=1)
        out.extend(bs[i] for i in np.nonzero(hit)[0])
    return out


def torsion_point_rank_deficient(inst: OsculatingInstance) -> bool:
    return rank(inst.matrix([1] * (inst.N + 1))) < inst.N


def check_subspace(a, B: IntMatrix, theta: Vector, source: str,
                   degree_ceiling: Optional[int] = DEFAULT_DEGREE_CEILING) -> Tuple[SubspaceCheck, List[str]]:
    notes = []
    in_W = in_resultant_variety(a, B)
    comp = hypersurface_part(a, B, degree_ceiling)
    has_component = not comp.is_monomial
    if has_component != in_W:
        notes.append(f"B={B.data}: resultant route says {in_W}, gcd route says {has_component}")
    candidate = False
    if in_W and has_component:
        g = pullback(MonomialMap.curve(theta), comp)
        if not g.is_monomial and not strip_cyclotomic(g).is_constant:
            # rank drops along the whole component: every minor is a multiple of it
            candidate = all(divides(comp, P) for P, _ in remark_minors(a, B))
    return SubspaceCheck(B, tuple(theta), source, in_W, comp, candidate), notes


def pirola_check(
    inst: OsculatingInstance,
    cfg: ReductionConfig = ReductionConfig(),
    theta_box: Optional[int] = None,
    *,
    max_n: int = MAX_N,
    degree_ceiling: Optional[int] = DEFAULT_DEGREE_CEILING,
) -> PirolaReport:
    """Search small structures explaining a non-torsion point of rank ``< N``.

    ``theta_box`` defaults to ``2*D*bound``. The verdict is
    ``candidate-found`` if some checked ``(B, theta)`` passes,
    ``fallback-small-D`` if the only passing structure is the trivial
    one-column ``B = a``, and ``no-small-structure`` otherwise.
    """
    N = inst.N
    if N > max_n:
        raise ValueError(f"the resultant path is limited to N <= {max_n}")
    bound = cfg.bound_at(0)
    box = 2 * inst.D * bound if theta_box is None else theta_box
    if box < 1:
        raise ValueError("theta_box must be >= 1")
    sys = minor_system(inst)
    cert = sparse_gcd(sys, cfg, degree_ceiling=degree_ceiling)

    todo: List[Tuple[IntMatrix, Vector, str]] = []
    if cert.k >= 1:
        todo.append((cert.reduction.psi.exponents, cert.reduction.theta, "certificate"))
    for B in subspaces_containing(inst.a, bound):
        todo.append((B, solve_factorization(B, inst.a), "enumerated"))

    checks, notes = [], []
    seen = set()
    for B, theta, source in todo:
        key = _lattice_key(B)
        if key in seen or max(abs(x) for x in theta) > box:
            continue
        seen.add(key)
        chk, n = check_subspace(inst.a, B, theta, source, degree_ceiling)
        checks.append(chk)
        notes.extend(n)

    hits = [c for c in checks if c.candidate]
    if not hits:
        verdict = VERDICT_NONE
    elif all(c.B.ncols == 1 for c in hits):
        verdict = VERDICT_FALLBACK
    else:
        verdict = VERDICT_CANDIDATE
    return PirolaReport(
        a=inst.a,
        certificate=cert,
        witness_subspaces=tuple(checks),
        verdict=verdict,
        torsion_point_flagged=torsion_point_rank_deficient(inst),
        discrepancies=tuple(notes),
    )
