"""Executable toolkit for the grid Ramsey problem.

Submodules: :mod:`~gridramsey.grid` (colourings, rectangles, row graphs),
:mod:`~gridramsey.quasirand` (C4 counts and the k-partite bound),
:mod:`~gridramsey.engine` (pigeonhole, dichotomy, refinement, bounds) and
:mod:`~gridramsey.search` (rectangle-free witness search).
"""

from .grid import (
    GridColouring,
    GridFormatError,
    Rectangle,
    count_alternating_rectangles,
    find_alternating_rectangle,
    intersection_graph,
    parse_colouring,
    random_colouring,
    row_graph,
    serialize_colouring,
    vertical_partition,
)
from .quasirand import (
    Graph,
    PartitionedGraph,
    codegree,
    density,
    hom_c4,
    is_kpartite,
    lemma_diagnostics,
    lemma_lower_bound,
    partition_imbalance,
    random_kpartite,
)
from .engine import (
    bounds_table,
    dichotomy_search,
    final_pigeonhole,
    refine,
    shelah_extract,
)
from .search import exhaustive_search, verify_witness

__version__ = "0.1.0"
