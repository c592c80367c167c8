"""Algebraic core: fields, barcodes, annotated matrices and the presentation algorithms."""

from prescomplex.core.barcode import INFINITY, Bar, Barcode, Interval
from prescomplex.core.complexify import complexify_pair
from prescomplex.core.field import FieldElement, PrimeField
from prescomplex.core.graded import (
    AnnotatedMatrix,
    RawComplex,
    RawModule,
    RawModuleMorphism,
    barcode_of_presentation,
    compose,
    derive_relation_matrices,
    reconstruct_pointwise,
)
from prescomplex.core.homology import persistence_algorithm, pres_hom
from prescomplex.core.presentation import pres_complex, pres_pers_mod, present_module
from prescomplex.core.simplicial import SimplicialComplex

__all__ = [
    "INFINITY",
    "AnnotatedMatrix",
    "Bar",
    "Barcode",
    "FieldElement",
    "Interval",
    "PrimeField",
    "RawComplex",
    "RawModule",
    "RawModuleMorphism",
    "SimplicialComplex",
    "barcode_of_presentation",
    "complexify_pair",
    "compose",
    "derive_relation_matrices",
    "persistence_algorithm",
    "pres_complex",
    "pres_hom",
    "pres_pers_mod",
    "present_module",
    "reconstruct_pointwise",
]
