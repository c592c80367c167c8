"""Applications of the presentation algorithms: towers, sheaves and posets."""

from prescomplex.pipelines.poset import FinitePoset, PosetSheafInstance, poset_cohomology
from prescomplex.pipelines.sheaf import SheafInstance, persistent_sheaf_cohomology
from prescomplex.pipelines.tower import (
    CosheafData,
    TowerScript,
    cosheaf_tower_homology,
    tower_homology,
)

__all__ = [
    "CosheafData",
    "FinitePoset",
    "PosetSheafInstance",
    "SheafInstance",
    "TowerScript",
    "cosheaf_tower_homology",
    "persistent_sheaf_cohomology",
    "poset_cohomology",
    "tower_homology",
]
