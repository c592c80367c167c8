"""prescomplex: barcodes of complexes of persistence modules via graded presentations."""

__version__ = "0.1.0"

from prescomplex.config.logging import configure_logging, get_logger
from prescomplex.config.settings import Settings, get_settings
from prescomplex.core.barcode import INFINITY, Bar, Barcode, Interval
from prescomplex.core.complexify import complexify_pair
from prescomplex.core.field import PrimeField
from prescomplex.core.formats import (
    format_barcode,
    parse_annmat,
    parse_cosheaf,
    parse_poset,
    parse_rawcplx,
    parse_rawmod,
    parse_sheaf,
    parse_tower,
    read_document,
    write_annmat,
)
from prescomplex.core.graded import (
    AnnotatedMatrix,
    RawComplex,
    RawModule,
    RawModuleMorphism,
    compose,
    reconstruct_pointwise,
)
from prescomplex.core.homology import pres_hom
from prescomplex.core.presentation import pres_complex, pres_pers_mod, present_module
from prescomplex.core.simplicial import SimplicialComplex
from prescomplex.core.validator import (
    AnnotationMismatch,
    InvariantViolation,
    NotAComplexError,
    ParseError,
    PresentationError,
    SizeLimitExceeded,
    TowerScriptError,
)
from prescomplex.pipelines.poset import (
    FinitePoset,
    PosetSheafInstance,
    alternating_subposet,
    order_complex,
    poset_cohomology,
)
from prescomplex.pipelines.sheaf import (
    SheafInstance,
    interval_sheaf,
    persistent_sheaf_cohomology,
)
from prescomplex.pipelines.tower import (
    ConstantCosheaf,
    CosheafData,
    TowerScript,
    cosheaf_tower_homology,
    cosheaf_tower_presentations,
    tower_homology,
    tower_presentations,
)
from prescomplex.utils.oracle import pointwise_barcode, pointwise_homology_barcode

# Initialize logging with default settings on package import
# This can be reconfigured by users if needed
_settings = Settings()
configure_logging(
    log_level=_settings.log_level,
    log_format=_settings.log_format,
    service_name=_settings.service_name,
)

__all__ = [
    # Configuration
    "Settings",
    "configure_logging",
    "get_logger",
    "get_settings",
    # Core algebra
    "INFINITY",
    "AnnotatedMatrix",
    "Bar",
    "Barcode",
    "Interval",
    "PrimeField",
    "RawComplex",
    "RawModule",
    "RawModuleMorphism",
    "SimplicialComplex",
    "complexify_pair",
    "compose",
    "pres_complex",
    "pres_hom",
    "pres_pers_mod",
    "present_module",
    "reconstruct_pointwise",
    # Pipelines
    "ConstantCosheaf",
    "CosheafData",
    "FinitePoset",
    "PosetSheafInstance",
    "SheafInstance",
    "TowerScript",
    "alternating_subposet",
    "cosheaf_tower_homology",
    "cosheaf_tower_presentations",
    "interval_sheaf",
    "order_complex",
    "persistent_sheaf_cohomology",
    "poset_cohomology",
    "tower_homology",
    "tower_presentations",
    # Oracle
    "pointwise_barcode",
    "pointwise_homology_barcode",
    # Formats
    "format_barcode",
    "parse_annmat",
    "parse_cosheaf",
    "parse_poset",
    "parse_rawcplx",
    "parse_rawmod",
    "parse_sheaf",
    "parse_tower",
    "read_document",
    "write_annmat",
    # Errors
    "AnnotationMismatch",
    "InvariantViolation",
    "NotAComplexError",
    "ParseError",
    "PresentationError",
    "SizeLimitExceeded",
    "TowerScriptError",
    # Version
    "__version__",
]
