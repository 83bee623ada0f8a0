"""Exact sparse gcds and multiple-root structure for lacunary polynomials."""

from .gcd_engine import GcdCertificate, SparseSystem, TorsionAnnotation, sparse_gcd, structural_failures
from .lattice import IntMatrix, hnf, is_primitive, kernel_basis
from .multiplicity import MultipleRootWitness, find_any_witness, find_witness, find_witness_split
from .osculating import OsculatingInstance, PirolaReport, build_minor_forms, pirola_check
from .poly import SparsePoly, gcd_many, normalize, squarefree_gap
from .reduction import ReductionConfig, ReductionResult, reduce, reduce_exponents
from .torus import MonomialMap, Subtorus, compose, pullback, riduci

__all__ = [
    "GcdCertificate", "SparseSystem", "TorsionAnnotation", "sparse_gcd", "structural_failures",
    "IntMatrix", "hnf", "is_primitive", "kernel_basis",
    "MultipleRootWitness", "find_any_witness", "find_witness", "find_witness_split",
    "OsculatingInstance", "PirolaReport", "build_minor_forms", "pirola_check",
    "SparsePoly", "gcd_many", "normalize", "squarefree_gap",
    "ReductionConfig", "ReductionResult", "reduce", "reduce_exponents",
    "MonomialMap", "Subtorus", "compose", "pullback", "riduci",
]
