"""r-edge-colourings of the grid K_M x K_N.

Columns are labelled 1..M and rows 1..N; colours are 0..r-1. A horizontal edge
joins ``(i, j)`` and ``(i', j)`` (same row ``j``) and a vertical edge joins
``(i, j)`` and ``(i, j')`` (same column ``i``).

GRIDCOL text format::

    GRIDCOL 1
    <r> <M> <N>
    <row 1: M(M-1)/2 colours, pairs {i,i'} in lexicographic order>
    ...
    <row N>
    <column 1: N(N-1)/2 colours, pairs {j,j'} in lexicographic order>
    ...
    <column M>

``#`` starts a comment. Tokens are whitespace separated, so record boundaries
only matter in the canonical output (one record per line).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional

import numpy as np

from .prng import SplitMix64
from .quasirand import Graph, PartitionedGraph


class GridFormatError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _pairs(n: int) -> list[tuple[int, int]]:
    """0-based pairs ``(a, b)``, ``a < b``, in lexicographic order."""
    return list(combinations(range(n), 2))


def _symmetric_from_records(records: np.ndarray, n: int) -> np.ndarray:
    """Expand ``(count, n(n-1)/2)`` pair records into ``(count, n, n)`` matrices, diagonal -1."""
    out = np.full((records.shape[0], n, n), -1, dtype=np.int64)
    if n >= 2:
        iu, ju = np.triu_indices(n, 1)
        out[:, iu, ju] = records
        out[:, ju, iu] = records
    return out


def _records_from_symmetric(mats: np.ndarray) -> np.ndarray:
    n = mats.shape[1]
    iu, ju = np.triu_indices(n, 1)
    return mats[:, iu, ju]


@dataclass(eq=False)
class GridColouring:
    """An r-colouring of all edges of K_M x K_N.

    ``hor[j-1, i-1, i'-1]`` is the colour of the horizontal edge joining
    columns ``i`` and ``i'`` in row ``j``; ``ver[i-1, j-1, j'-1]`` that of the
    vertical edge joining rows ``j`` and ``j'`` in column ``i``. Both arrays
    are symmetric in their last two axes with ``-1`` on the diagonal.
    """

    r: int
    M: int
    N: int
    hor: np.ndarray
    ver: np.ndarray

    def __post_init__(self) -> None:
        if self.r < 1 or self.M < 1 or self.N < 1:
            raise ValueError("r, M, N must all be positive")
        hor = np.asarray(self.hor, dtype=np.int64)
        ver = np.asarray(self.ver, dtype=np.int64)
        if hor.shape != (self.N, self.M, self.M) or ver.shape != (self.M, self.N, self.N):
            raise ValueError("colour arrays have the wrong shape")
        for name, arr in (("hor", hor), ("ver", ver)):
            n = arr.shape[1]
            if not np.array_equal(arr, arr.transpose(0, 2, 1)):
                raise ValueError(f"{name} colours are not symmetric")
            if (arr[:, np.arange(n), np.arange(n)] != -1).any():
                raise ValueError(f"{name} diagonal must be -1")
            off = arr[:, ~np.eye(n, dtype=bool)]
            if off.size and (off.min() < 0 or off.max() >= self.r):
                raise ValueError(f"{name} colour out of range 0..{self.r - 1}")
        hor.flags.writeable = False
        ver.flags.writeable = False
        self.hor, self.ver = hor, ver

    @classmethod
    def from_records(cls, r: int, M: int, N: int, hor_records, ver_records) -> "GridColouring":
        """Build from per-row and per-column colour lists in GRIDCOL order."""
        hr = np.asarray(hor_records, dtype=np.int64).reshape(N, M * (M - 1) // 2)
        vr = np.asarray(ver_records, dtype=np.int64).reshape(M, N * (N - 1) // 2)
        return cls(r, M, N, _symmetric_from_records(hr, M), _symmetric_from_records(vr, N))

    @classmethod
    def constant(cls, r: int, M: int, N: int, hcolour: int = 0, vcolour: int = 0) -> "GridColouring":
        hr = np.full((N, M * (M - 1) // 2), hcolour)
        vr = np.full((M, N * (N - 1) // 2), vcolour)
        return cls.from_records(r, M, N, hr, vr)

    def hor_records(self) -> np.ndarray:
        return _records_from_symmetric(self.hor)

    def ver_records(self) -> np.ndarray:
        return _records_from_symmetric(self.ver)

    def hor_colour(self, j: int, i: int, i2: int) -> int:
        """Colour of the horizontal edge ``(i, j)(i2, j)``."""
        self._check(i, self.M, "column")
        self._check(i2, self.M, "column")
        self._check(j, self.N, "row")
        if i == i2:
            raise ValueError("a horizontal edge needs two distinct columns")
        return int(self.hor[j - 1, i - 1, i2 - 1])

    def ver_colour(self, i: int, j: int, j2: int) -> int:
        """Colour of the vertical edge ``(i, j)(i, j2)``."""
        self._check(i, self.M, "column")
        self._check(j, self.N, "row")
        self._check(j2, self.N, "row")
        if j == j2:
            raise ValueError("a vertical edge needs two distinct rows")
        return int(self.ver[i - 1, j - 1, j2 - 1])

    @staticmethod
    def _check(x: int, hi: int, what: str) -> None:
        if not 1 <= x <= hi:
            raise ValueError(f"{what} {x} out of range 1..{hi}")

    def restrict(self, columns: Iterable[int], rows: Iterable[int]) -> "GridColouring":
        """Sub-grid on the given columns and rows, relabelled 1.. in the given order."""
        cols = np.asarray(list(columns), dtype=np.int64) - 1
        rws = np.asarray(list(rows), dtype=np.int64) - 1
        hor = self.hor[rws][:, cols][:, :, cols]
        ver = self.ver[cols][:, rws][:, :, rws]
        return GridColouring(self.r, len(cols), len(rws), hor, ver)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GridColouring):
            return NotImplemented
        return (
            (self.r, self.M, self.N) == (other.r, other.M, other.N)
            and np.array_equal(self.hor, other.hor)
            and np.array_equal(self.ver, other.ver)
        )

    def __hash__(self) -> int:
        return hash((self.r, self.M, self.N, self.hor.tobytes(), self.ver.tobytes()))

    def __repr__(self) -> str:
        return f"GridColouring(r={self.r}, M={self.M}, N={self.N})"


@dataclass(frozen=True, order=True)
class Rectangle:
    """Alternating rectangle on columns ``i < i2`` and rows ``j < j2``."""

    i: int
    i2: int
    j: int
    j2: int
    h_colour: int = -1
    v_colour: int = -1

    def is_valid_for(self, c: GridColouring) -> bool:
        if not (self.i != self.i2 and self.j != self.j2):
            return False
        h = {c.hor_colour(self.j, self.i, self.i2), c.hor_colour(self.j2, self.i, self.i2)}
        v = {c.ver_colour(self.i, self.j, self.j2), c.ver_colour(self.i2, self.j, self.j2)}
        return h == {self.h_colour} and v == {self.v_colour}


def make_rectangle(c: GridColouring, i: int, i2: int, j: int, j2: int) -> Rectangle:
    i, i2 = sorted((i, i2))
    j, j2 = sorted((j, j2))
    return Rectangle(i, i2, j, j2, c.hor_colour(j, i, i2), c.ver_colour(i, j, j2))


@dataclass(frozen=True)
class RowGraph:
    """Complete graph on the columns with row ``j``'s horizontal colours."""

    row: int
    vertices: tuple[int, ...]
    colours: np.ndarray

    def colour(self, x: int, y: int) -> int:
        if x == y:
            raise ValueError("no loop colours")
        return int(self.colours[x - 1, y - 1])

    def edges(self) -> list[tuple[int, int, int]]:
        return [(x, y, self.colour(x, y)) for x, y in combinations(self.vertices, 2)]


# GRIDCOL I/O ---------------------------------------------------------------

def _tokens(text: str) -> list[tuple[int, str]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        for tok in raw.split("#", 1)[0].split():
            out.append((lineno, tok))
    return out


def parse_colouring(data: str | bytes) -> GridColouring:
    """Parse GRIDCOL text. Errors carry the offending line number."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    toks = _tokens(text)
    last_line = max(1, len(text.splitlines()))
    if len(toks) < 2 or toks[0][1] != "GRIDCOL" or toks[1][1] != "1":
        raise GridFormatError("malformed header, expected 'GRIDCOL 1'", toks[0][0] if toks else 1)
    if len(toks) < 5:
        raise GridFormatError("malformed header, expected '<r> <M> <N>'", toks[-1][0])
    dims = []
    for lineno, tok in toks[2:5]:
        try:
            dims.append(int(tok))
        except ValueError:
            raise GridFormatError(f"non-integer token {tok!r}", lineno) from None
        if dims[-1] < 1:
            raise GridFormatError("malformed header, r, M, N must be positive", lineno)
    r, M, N = dims
    body = toks[5:]
    need = N * M * (M - 1) // 2 + M * N * (N - 1) // 2
    if len(body) != need:
        where = body[need][0] if len(body) > need else last_line
        raise GridFormatError(f"wrong token count: expected {need} colours, found {len(body)}", where)
    values = np.empty(need, dtype=np.int64)
    for idx, (lineno, tok) in enumerate(body):
        try:
            v = int(tok)
        except ValueError:
            raise GridFormatError(f"non-integer token {tok!r}", lineno) from None
        if not 0 <= v < r:
            raise GridFormatError(f"colour out of range: {v} not in 0..{r - 1}", lineno)
        values[idx] = v
    nh = N * M * (M - 1) // 2
    return GridColouring.from_records(r, M, N, values[:nh], values[nh:])


def serialize_colouring(c: GridColouring) -> bytes:
    """Canonical GRIDCOL bytes: one record per line, single spaces, trailing newline."""
    lines = ["GRIDCOL 1", f"{c.r} {c.M} {c.N}"]
    for rec in c.hor_records():
        lines.append(" ".join(map(str, rec.tolist())))
    for rec in c.ver_records():
        lines.append(" ".join(map(str, rec.tolist())))
    return ("\n".join(lines) + "\n").encode("utf-8")


def random_colouring(r: int, M: int, N: int, seed: int) -> GridColouring:
    """Seeded colouring: all horizontal entries by (j, i, i'), then vertical by (i, j, j')."""
    if min(r, M, N) < 1:
        raise ValueError("r, M, N must all be positive")
    rng = SplitMix64(seed)
    nh = N * M * (M - 1) // 2
    nv = M * N * (N - 1) // 2
    values = [rng.below(r) for _ in range(nh + nv)]
    return GridColouring.from_records(r, M, N, values[:nh], values[nh:])


# rectangles ----------------------------------------------------------------

def _rectangle_masks(c: GridColouring, i: int) -> np.ndarray:
    """Boolean ``(M-1-i, N, N)`` mask of alternating rectangles on columns ``(i, i2)``, ``i2 > i``.

    0-based ``i``; only ``j < j2`` entries are set.
    """
    h = c.hor[:, i, i + 1:]                      # (N, K)
    hagree = h[None, :, :] == h[:, None, :]      # (N, N, K)
    vagree = c.ver[i][None, :, :] == c.ver[i + 1:]  # (K, N, N)
    upper = np.triu(np.ones((c.N, c.N), dtype=bool), 1)
    return hagree.transpose(2, 0, 1) & vagree & upper


def find_alternating_rectangle(c: GridColouring) -> Optional[Rectangle]:
    """Lexicographically least alternating rectangle ``(i, i2, j, j2)``, or ``None``."""
    for i in range(c.M - 1):
        hits = np.argwhere(_rectangle_masks(c, i))
        if len(hits):
            k, j, j2 = (int(x) for x in hits[0])
            return make_rectangle(c, i + 1, i + 2 + k, j + 1, j2 + 1)
    return None


def count_alternating_rectangles(c: GridColouring) -> int:
    return sum(int(_rectangle_masks(c, i).sum()) for i in range(c.M - 1))


def has_alternating_rectangle(c: GridColouring) -> bool:
    return find_alternating_rectangle(c) is not None


# row and intersection graphs ------------------------------------------------

def _check_row(c: GridColouring, j: int) -> None:
    if not 1 <= j <= c.N:
        raise ValueError(f"row {j} out of range 1..{c.N}")


def row_graph(c: GridColouring, j: int) -> RowGraph:
    _check_row(c, j)
    colours = c.hor[j - 1].copy()
    colours.flags.writeable = False
    return RowGraph(j, tuple(range(1, c.M + 1)), colours)


def _check_row_pair(c: GridColouring, j1: int, j2: int) -> None:
    _check_row(c, j1)
    _check_row(c, j2)
    if j1 == j2:
        raise ValueError("rows must be distinct")


def intersection_graph(c: GridColouring, j1: int, j2: int) -> Graph:
    """Graph on the columns joining ``x, y`` when rows ``j1`` and ``j2`` colour ``xy`` alike."""
    _check_row_pair(c, j1, j2)
    agree = c.hor[j1 - 1] == c.hor[j2 - 1]
    np.fill_diagonal(agree, False)
    return Graph(c.M, agree)


def vertical_partition(c: GridColouring, j1: int, j2: int) -> PartitionedGraph:
    """Intersection graph with columns split into ``r`` classes by ``ver(i, {j1, j2})``.

    Empty classes are kept. ``result.violation`` is the first intra-class
    edge, which exists exactly when an alternating rectangle uses rows
    ``j1`` and ``j2``.
    """
    g = intersection_graph(c, j1, j2)
    label = c.ver[:, j1 - 1, j2 - 1]
    classes = tuple(tuple(int(i) + 1 for i in np.nonzero(label == kappa)[0]) for kappa in range(c.r))
    return PartitionedGraph(g, classes)
