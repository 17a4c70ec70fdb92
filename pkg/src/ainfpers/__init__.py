"""A-infinity persistence of simplicial filtrations."""

from .coalgebra import AInftyCoalgebra, cobar_square_check, stasheff_check
from .linalg import Field, Matrix, Subspace
from .persistence import (AInftyFiltration, AwakeEvent, PersistentGroupDim, awake_events, build_vw_zigzag,
                          delta_persistent_dim, from_filtered_complex, is_awake, load_abstract_filtration)
from .simplicial import FilteredComplex, FiltrationError, parse_filtration, read_filtration
from .transfer import InvariantError, build_transfer_diagram, check_transfer_diagram, transferred_structure
from .zigzag import Barcode, Decomposition, Interval, ZigzagModule, bar_count, barcode, decompose, validate_decomposition

__version__ = "0.1.0"

__all__ = [
    "AInftyCoalgebra", "AInftyFiltration", "AwakeEvent", "Barcode", "Decomposition", "Field",
    "FilteredComplex", "FiltrationError", "Interval", "InvariantError", "Matrix", "PersistentGroupDim",
    "Subspace", "ZigzagModule", "awake_events", "bar_count", "barcode", "build_transfer_diagram",
    "build_vw_zigzag", "check_transfer_diagram", "cobar_square_check", "decompose", "delta_persistent_dim",
    "from_filtered_complex", "is_awake", "load_abstract_filtration", "parse_filtration", "read_filtration",
    "stasheff_check", "transferred_structure", "validate_decomposition",
]
