"""Rational cohomology rings of subspace arrangement complements from labeled lattices."""

from .chains import ChainComplexQ, Flag, QChain, atomic_complex, flag_complex, homology
from .cm import CMComplex, cm_complex, cm_differential, cm_element_product, cm_product
from .lattice import (
    LabeledLattice,
    LatticeError,
    Partition,
    SubspaceArrangement,
    builtin,
    intersection_lattice,
    kequal_lattice,
    lattice_from_json,
    load_lattice,
)
from .ring import GradedRing, LocalCohomology, betti_cm, betti_gm, poincare_polynomial, ring_structure

__version__ = "0.1.0"

__all__ = [
    "ChainComplexQ",
    "Flag",
    "QChain",
    "atomic_complex",
    "flag_complex",
    "homology",
    "CMComplex",
    "cm_complex",
    "cm_differential",
    "cm_element_product",
    "cm_product",
    "LabeledLattice",
    "LatticeError",
    "Partition",
    "SubspaceArrangement",
    "builtin",
    "intersection_lattice",
    "kequal_lattice",
    "lattice_from_json",
    "load_lattice",
    "GradedRing",
    "LocalCohomology",
    "betti_cm",
    "betti_gm",
    "poincare_polynomial",
    "ring_structure",
]
