"""Cohomology of zero-dimensional schemes in products of projective spaces, over F_p."""
from .cohomo import CohomologyTable, h0_h1, regions
from .degrees import Box
from .exactla import DEFAULT_PRIME
from .mingen import generator_table, mult_map
from .report import VerifyReport
from .ring import Space
from .scheme import Kind, ZeroScheme, make_component, random_general

__all__ = [
    "Box", "CohomologyTable", "DEFAULT_PRIME", "Kind", "Space", "VerifyReport", "ZeroScheme",
    "generator_table", "h0_h1", "make_component", "mult_map", "random_general", "regions",
]
