"""Single-query learning from Hamming-distance oracles in the permutation model."""

__version__ = "0.1.0"

from .domain import (  # noqa: E402
    BitString,
    HFunction,
    Permutation,
    SigmaAssignment,
    additive_assignment,
    assignment_from_index,
    b1,
    b1_assignment,
    format_cycles,
    hamming_distance,
    hat,
    index_from_assignment,
    parse_cycles,
)

__all__ = [
    "BitString",
    "HFunction",
    "Permutation",
    "SigmaAssignment",
    "additive_assignment",
    "assignment_from_index",
    "b1",
    "b1_assignment",
    "format_cycles",
    "hamming_distance",
    "hat",
    "index_from_assignment",
    "parse_cycles",
]
