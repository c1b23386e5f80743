"""Backtracking search for colourings of K_M x K_N without alternating rectangles.

Variables are assigned in a fixed order: every vertical edge column-major
``(i, j, j')``, then every horizontal edge row-major ``(j, i, i')``.

Once the vertical colours are fixed, the horizontal problem splits by column
pair: for columns ``i, i'`` the rows on which their vertical colours agree
form a graph, and the horizontal colours of pair ``{i, i'}`` must properly
colour it. The vertical phase therefore prunes as soon as such an agreement
graph stops being r-colourable; the horizontal phase checks, on each
assignment, the rectangles it is the last edge of.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Callable, Literal, Optional, TextIO

import numpy as np

from .grid import GridColouring, find_alternating_rectangle
from .prng import SplitMix64

PROGRESS_EVERY = 1 << 16


@dataclass(frozen=True)
class SearchOutcome:
    kind: Literal["witness", "exhausted", "timeout"]
    nodes: int
    elapsed: float
    witness: Optional[GridColouring] = None
    depth: int = 0


def verify_witness(c: GridColouring) -> bool:
    return find_alternating_rectangle(c) is None


@lru_cache(maxsize=None)
def _colourable(n: int, edges: frozenset, r: int) -> bool:
    """Whether the graph on ``0..n-1`` with ``edges`` has a proper ``r``-colouring."""
    if not edges:
        return True
    adj = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    order = sorted(range(n), key=lambda v: -len(adj[v]))
    colour = [-1] * n

    def place(pos: int, used: int) -> bool:
        if pos == n:
            return True
        v = order[pos]
        taken = {colour[u] for u in adj[v]}
        # colours beyond the first unused one are symmetric
        for col in range(min(r, used + 1)):
            if col not in taken:
                colour[v] = col
                if place(pos + 1, max(used, col + 1)):
                    return True
        colour[v] = -1
        return False

    return place(0, 0)


class _Search:
    def __init__(self, r, M, N, deadline, symmetry, value_order, progress):
        self.r, self.M, self.N = r, M, N
        self.deadline = deadline
        self.symmetry = symmetry
        self.value_order = value_order
        self.progress = progress
        self.nodes = 0
        self.max_depth = 0
        self.vpairs = list(combinations(range(N), 2))
        self.hpairs = list(combinations(range(M), 2))
        self.vars = [("v", i, p) for i in range(M) for p in self.vpairs] + \
                    [("h", j, p) for j in range(N) for p in self.hpairs]
        self.ver = np.full((M, N, N), -1, dtype=np.int64)
        self.hor = np.full((N, M, M), -1, dtype=np.int64)
        # agreement[(i', i)] = set of row pairs where columns i' < i agree vertically
        self.agree = {pair: set() for pair in self.hpairs}

    def _allowed(self, kind, idx, pair) -> list[int]:
        """Candidate colours, honouring first-occurrence canonical order on the first line."""
        if self.symmetry and idx == 0:
            arr = self.ver[0] if kind == "v" else self.hor[0]
            pairs = self.vpairs if kind == "v" else self.hpairs
            pos = pairs.index(pair)
            used = {int(arr[a, b]) for a, b in pairs[:pos]}
            cap = (max(used) + 2) if used else 1
            return [v for v in self.value_order if v < min(cap, self.r)]
        return self.value_order

    def _ver_ok(self, i: int, pair: tuple[int, int], colour: int) -> bool:
        a, b = pair
        for i0 in range(i):
            if self.ver[i0, a, b] == colour:
                edges = self.agree[(i0, i)] | {pair}
                if not _colourable(self.N, frozenset(edges), self.r):
                    return False
        return True

    def _hor_ok(self, j: int, pair: tuple[int, int], colour: int) -> bool:
        x, y = pair
        for j0 in range(j):
            if self.hor[j0, x, y] == colour and self.ver[x, j0, j] == self.ver[y, j0, j]:
                return False
        return True

    def run(self, depth: int = 0) -> Optional[bool]:
        """True on witness, False when refuted, None on timeout."""
        if depth == len(self.vars):
            return True
        self.max_depth = max(self.max_depth, depth)
        kind, idx, pair = self.vars[depth]
        a, b = pair
        for colour in self._allowed(kind, idx, pair):
            self.nodes += 1
            if self.progress is not None and self.nodes % PROGRESS_EVERY == 0:
                self.progress(self.nodes, depth)
            if self.deadline is not None and self.nodes % 256 == 0 and time.monotonic() > self.deadline:
                return None
            if kind == "v":
                if not self._ver_ok(idx, pair, colour):
                    continue
                self.ver[idx, a, b] = self.ver[idx, b, a] = colour
                added = [(i0, idx) for i0 in range(idx) if self.ver[i0, a, b] == colour]
                for key in added:
                    self.agree[key].add(pair)
                res = self.run(depth + 1)
                if res is not False:
                    return res
                for key in added:
                    self.agree[key].discard(pair)
                self.ver[idx, a, b] = self.ver[idx, b, a] = -1
            else:
                if not self._hor_ok(idx, pair, colour):
                    continue
                self.hor[idx, a, b] = self.hor[idx, b, a] = colour
                res = self.run(depth + 1)
                if res is not False:
                    return res
                self.hor[idx, a, b] = self.hor[idx, b, a] = -1
        return False


def exhaustive_search(
    r: int,
    M: int,
    N: int,
    timeout: Optional[float] = None,
    symmetry_breaking: bool = True,
    seed: Optional[int] = None,
    progress: Optional[Callable[[int, int], None]] = None,
) -> SearchOutcome:
    """Depth-first search for a rectangle-free r-colouring of K_M x K_N.

    ``timeout`` is in seconds. A ``seed`` permutes the order in which colours
    are tried (the same permutation at every node); without one they are
    tried in increasing order. With ``symmetry_breaking`` the first column's
    vertical colours and the first row's horizontal colours must introduce
    new colours in increasing order, which is sound because horizontal and
    vertical colours can be relabelled independently.
    """
    if min(r, M, N) < 1:
        raise ValueError("r, M, N must all be positive")
    value_order = SplitMix64(seed).permutation(r) if seed is not None else list(range(r))
    start = time.monotonic()
    deadline = start + timeout if timeout is not None else None
    s = _Search(r, M, N, deadline, symmetry_breaking, value_order, progress)
    sys.setrecursionlimit(max(sys.getrecursionlimit(), len(s.vars) + 1000))
    res = s.run()
    elapsed = time.monotonic() - start
    if res is None:
        return SearchOutcome("timeout", s.nodes, elapsed, depth=s.max_depth)
    if res is False:
        return SearchOutcome("exhausted", s.nodes, elapsed, depth=s.max_depth)
    witness = GridColouring(r, M, N, s.hor.copy(), s.ver.copy())
    return SearchOutcome("witness", s.nodes, elapsed, witness, depth=len(s.vars))


def progress_printer(stream: TextIO) -> Callable[[int, int], None]:
    def report(nodes: int, depth: int) -> None:
        print(f"NODES {nodes} DEPTH {depth}", file=stream, flush=True)
    return report

