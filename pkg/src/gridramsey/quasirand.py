"""Simple graphs, C4 homomorphism counts and the k-partite lower bound.

Vertices are labelled 1..n in every public function. The lower bound for
k-partite graphs is

    hom(C4, G) >= (1 - 4*eps) * (1 + 1/(k-1)**3) * delta**4 * n**4

with ``delta = 2e/n**2`` and ``eps`` the class-size imbalance.
:func:`lemma_diagnostics` also exposes the intermediate sums ``S`` and ``T``
of the Cauchy-Schwarz chain behind it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import mpmath
import numpy as np

from .prng import SplitMix64

# working precision (bits) for the square-root terms of T
DIAGNOSTIC_PREC = 192
CHAIN_RTOL = Fraction(1, 2**64)


class GraphFormatError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(eq=False)
class Graph:
    """Undirected simple graph on vertices 1..n backed by a boolean matrix."""

    n: int
    adjacency: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.adjacency, dtype=bool)
        if a.shape != (self.n, self.n):
            raise ValueError(f"adjacency must be {self.n}x{self.n}, got {a.shape}")
        if a.diagonal().any():
            raise ValueError("graph has a loop")
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency is not symmetric")
        a.flags.writeable = False
        self.adjacency = a

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        a = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            if not (1 <= u <= n and 1 <= v <= n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            a[u - 1, v - 1] = a[v - 1, u - 1] = True
        return cls(n, a)

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, np.zeros((n, n), dtype=bool))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, ~np.eye(n, dtype=bool))

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, i % n + 1) for i in range(1, n + 1)])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.adjacency, other.adjacency)

    def __hash__(self) -> int:
        return hash((self.n, self.adjacency.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, e={self.num_edges})"

    @property
    def num_edges(self) -> int:
        return int(self.adjacency.sum()) // 2

    def edges(self) -> list[tuple[int, int]]:
        """Edges as 1-based pairs ``(u, v)`` with ``u < v`` in lexicographic order."""
        us, vs = np.nonzero(np.triu(self.adjacency, 1))
        return [(int(u) + 1, int(v) + 1) for u, v in zip(us, vs)]

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adjacency[u - 1, v - 1])

    def degree(self, x: int) -> int:
        return int(self.adjacency[x - 1].sum())

    def neighbour_masks(self) -> list[int]:
        """Neighbourhoods as Python-int bitsets; bit ``v-1`` stands for vertex ``v``."""
        masks = []
        for row in self.adjacency:
            bits = np.packbits(row[::-1]).tobytes()
            masks.append(int.from_bytes(bits, "big") >> ((-self.n) % 8))
        return masks


@dataclass(eq=False)
class PartitionedGraph:
    """A graph together with an ordered list of vertex classes.

    Classes must be disjoint and cover 1..n; empty classes are allowed.
    Being k-partite is *not* assumed, see :func:`is_kpartite`.
    """

    graph: Graph
    classes: tuple[tuple[int, ...], ...]
    _violation: object = field(default=None, init=False, repr=False)

    def __post_init__(self) -> None:
        self.classes = tuple(tuple(sorted(c)) for c in self.classes)
        if not self.classes:
            raise ValueError("need at least one class")
        seen: set[int] = set()
        for cls_ in self.classes:
            for v in cls_:
                if not 1 <= v <= self.graph.n:
                    raise ValueError(f"class vertex {v} out of range")
                if v in seen:
                    raise ValueError(f"vertex {v} lies in two classes")
                seen.add(v)
        if len(seen) != self.graph.n:
            raise ValueError("classes do not cover the vertex set")

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def k(self) -> int:
        return len(self.classes)

    @property
    def sizes(self) -> list[int]:
        return [len(c) for c in self.classes]

    def class_of(self) -> np.ndarray:
        """0-based class index of every vertex (array indexed by vertex - 1)."""
        out = np.empty(self.n, dtype=np.int64)
        for idx, cls_ in enumerate(self.classes):
            for v in cls_:
                out[v - 1] = idx
        return out

    @property
    def violation(self) -> Optional[tuple[int, int]]:
        """First intra-class edge, or ``None`` for a legal k-partite graph."""
        if self._violation is None:
            self._violation = is_kpartite(self)[1] or ()
        return self._violation or None

    def drop_empty(self) -> "PartitionedGraph":
        return PartitionedGraph(self.graph, tuple(c for c in self.classes if c))


def complete_multipartite(sizes: Sequence[int]) -> PartitionedGraph:
    """Complete multipartite graph with consecutive classes of the given sizes."""
    classes = []
    start = 1
    for s in sizes:
        classes.append(tuple(range(start, start + s)))
        start += s
    n = start - 1
    label = np.repeat(np.arange(len(sizes)), sizes)
    adj = label[:, None] != label[None, :]
    return PartitionedGraph(Graph(n, adj), tuple(classes))


def _check_vertex(g: Graph, x: int) -> None:
    if not 1 <= x <= g.n:
        raise ValueError(f"vertex {x} out of range 1..{g.n}")


def codegree(g: Graph, x: int, y: int) -> int:
    """Number of common neighbours of ``x`` and ``y``; the degree when ``x == y``."""
    _check_vertex(g, x)
    _check_vertex(g, y)
    return int(np.count_nonzero(g.adjacency[x - 1] & g.adjacency[y - 1]))


def codegree_matrix(g: Graph) -> np.ndarray:
    a = g.adjacency.astype(np.int64)
    return a @ a


def hom_c4(g: Graph) -> int:
    """Number of closed 4-walks, computed as the sum of squared codegrees.

    Codegrees come from popcounts of neighbour bitsets; each unordered pair is
    visited once.
    """
    masks = g.neighbour_masks()
    total = 0
    for x, mx in enumerate(masks):
        d = mx.bit_count()
        total += d * d
        for my in masks[x + 1:]:
            c = (mx & my).bit_count()
            total += 2 * c * c
    return total


def hom_c4_trace(g: Graph) -> int:
    """trace(A^4), an independent route to :func:`hom_c4`."""
    a = g.adjacency.astype(np.int64)
    a2 = a @ a
    # trace(A^2 A^2) without forming A^4
    return int((a2 * a2.T).sum())


def density(g: Graph) -> Fraction:
    if g.n == 0:
        raise ValueError("density of the empty vertex set is undefined")
    return Fraction(2 * g.num_edges, g.n * g.n)


def is_kpartite(pg: PartitionedGraph) -> tuple[bool, Optional[tuple[int, int]]]:
    """Return ``(True, None)`` or ``(False, first_intra_class_edge)``."""
    label = pg.class_of()
    same = (label[:, None] == label[None, :]) & pg.graph.adjacency
    us, vs = np.nonzero(np.triu(same, 1))
    if len(us) == 0:
        return True, None
    return False, (int(us[0]) + 1, int(vs[0]) + 1)


def partition_imbalance(pg: PartitionedGraph) -> Fraction:
    """Least ``eps >= 0`` with every class of size at most ``(1 + eps) n / k``."""
    if pg.n == 0:
        raise ValueError("imbalance needs n >= 1")
    eps = Fraction(pg.k * max(pg.sizes), pg.n) - 1
    return max(eps, Fraction(0))


def _lemma_inputs(pg: PartitionedGraph) -> tuple[PartitionedGraph, Fraction, Fraction]:
    ok, edge = is_kpartite(pg)
    if not ok:
        raise ValueError(f"graph is not k-partite: edge {edge} inside a class")
    core = pg.drop_empty()
    if core.k < 2:
        raise ValueError("k = 1 makes the bound degenerate")
    eps = partition_imbalance(core)
    if eps > 1:
        raise ValueError(f"imbalance {eps} exceeds 1")
    return core, eps, density(core.graph)


def _bound_value(n: int, k: int, eps: Fraction, delta: Fraction) -> Fraction:
    return (1 - 4 * eps) * (1 + Fraction(1, (k - 1) ** 3)) * delta**4 * n**4


def lemma_lower_bound(pg: PartitionedGraph) -> Fraction:
    """Exact value of the k-partite C4 lower bound.

    Empty classes are discarded first, so ``k`` and the imbalance are taken
    over the non-empty classes.
    """
    core, eps, delta = _lemma_inputs(pg)
    return _bound_value(core.n, core.k, eps, delta)


def class_degrees(pg: PartitionedGraph) -> np.ndarray:
    """``n x k`` matrix whose entry ``[z-1, i]`` counts neighbours of ``z`` in class ``i``."""
    onehot = np.zeros((pg.n, pg.k), dtype=np.int64)
    onehot[np.arange(pg.n), pg.class_of()] = 1
    return pg.graph.adjacency.astype(np.int64) @ onehot


@dataclass(frozen=True)
class Surd:
    """Exact value ``rational + sum(coeff * sqrt(radicand))`` with square-free radicands."""

    rational: Fraction
    radicals: tuple[tuple[Fraction, int], ...] = ()

    @property
    def is_rational(self) -> bool:
        return not self.radicals

    def to_mpf(self) -> mpmath.mpf:
        with mpmath.workprec(DIAGNOSTIC_PREC):
            total = mpmath.mpf(self.rational.numerator) / self.rational.denominator
            for coeff, rad in self.radicals:
                total += mpmath.mpf(coeff.numerator) / coeff.denominator * mpmath.sqrt(rad)
            return total


def _squarefree_split(m: int) -> tuple[int, int]:
    """Write ``m = outer**2 * inner`` with ``inner`` square-free."""
    outer, inner = 1, 1
    p = 2
    while p * p <= m:
        while m % (p * p) == 0:
            m //= p * p
            outer *= p
        if m % p == 0:
            m //= p
            inner *= p
        p += 1
    return outer, inner * m


@dataclass(frozen=True)
class LemmaDiagnostics:
    n: int
    k: int
    epsilon: Fraction
    delta: Fraction
    hom: int
    S: Fraction
    T: Surd
    bound: Fraction

    def chain(self) -> dict[str, bool]:
        """Evaluate each step of the inequality chain.

        Keys: ``S>=T/(k-1)``, ``first``, ``quadratic``, ``T>=lower``, ``bound``.
        Exact where ``T`` is rational; otherwise relative tolerance 2**-64.
        """
        k = self.k
        n = self.n
        checks = {
            "S>=T/(k-1)": lambda t: (self.S, t / (k - 1)),
            "first": lambda t: (self.hom, self.S**2 / k + (t - self.S) ** 2 / (k * (k - 1))),
            "quadratic": lambda t: (self.hom, (1 + Fraction(1, (k - 1) ** 3)) * t**2 / k**2),
            "T>=lower": lambda t: (t, k * self.delta**2 * n**2 / (1 + self.epsilon) ** 2),
        }
        out = {}
        if self.T.is_rational:
            t = self.T.rational
            for name, pair in checks.items():
                lhs, rhs = pair(t)
                out[name] = lhs >= rhs
        else:
            with mpmath.workprec(DIAGNOSTIC_PREC):
                t = self.T.to_mpf()
                tol = mpmath.mpf(CHAIN_RTOL.numerator) / CHAIN_RTOL.denominator
                for name, pair in checks.items():
                    lhs, rhs = (_as_mpf(v) for v in pair(t))
                    out[name] = lhs >= rhs - tol * max(abs(lhs), abs(rhs))
        out["bound"] = self.hom >= self.bound
        return out

    def chain_equalities(self) -> dict[str, bool]:
        """Which chain steps hold with exact equality (only meaningful for rational T)."""
        if not self.T.is_rational:
            return {}
        k, n, t = self.k, self.n, self.T.rational
        return {
            "S>=T/(k-1)": self.S == t / (k - 1),
            "first": self.hom == self.S**2 / k + (t - self.S) ** 2 / (k * (k - 1)),
            "T>=lower": t == k * self.delta**2 * n**2 / (1 + self.epsilon) ** 2,
            "bound": self.hom == self.bound,
        }


def _as_mpf(v) -> mpmath.mpf:
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def lemma_diagnostics(pg: PartitionedGraph) -> LemmaDiagnostics:
    """Compute hom, S, T, density, imbalance and the bound for a k-partite graph.

    ``S`` sums codegrees over same-class pairs scaled by ``1/|V_i|``; ``T``
    sums over all class pairs scaled by ``1/sqrt(|V_i||V_j|)``. Terms whose
    scale is irrational are kept symbolically in :class:`Surd`.
    """
    if any(s == 0 for s in pg.sizes):
        raise ValueError("lemma diagnostics need every class non-empty")
    core, eps, delta = _lemma_inputs(pg)
    k = core.k
    sizes = core.sizes
    label = core.class_of()
    cod = codegree_matrix(core.graph)

    onehot = np.zeros((core.n, k), dtype=np.int64)
    onehot[np.arange(core.n), label] = 1
    # block[i, j] = sum of codegrees over x in V_i, y in V_j
    block = onehot.T @ cod @ onehot

    S = sum((Fraction(int(block[i, i]), sizes[i]) for i in range(k)), Fraction(0))
    rational = S
    radicals: dict[int, Fraction] = {}
    for i in range(k):
        for j in range(i + 1, k):
            total = 2 * int(block[i, j])
            if total == 0:
                continue
            outer, inner = _squarefree_split(sizes[i] * sizes[j])
            coeff = Fraction(total, outer)
            if inner == 1:
                rational += coeff
            else:
                # total / (outer*sqrt(inner)) = total*sqrt(inner) / (outer*inner)
                radicals[inner] = radicals.get(inner, Fraction(0)) + coeff / inner
    T = Surd(rational, tuple(sorted((c, m) for m, c in radicals.items())))

    hom = int((cod * cod).sum())
    return LemmaDiagnostics(
        n=core.n, k=k, epsilon=eps, delta=delta, hom=hom, S=S, T=T,
        bound=_bound_value(core.n, k, eps, delta),
    )


def random_kpartite(
    k: int,
    class_size: int | Sequence[int],
    p: Fraction,
    seed: int,
) -> PartitionedGraph:
    """Seeded random k-partite graph.

    ``class_size`` is either a common size or one size per class. Vertex pairs
    are visited in lexicographic order; a cross-class pair is kept when
    ``next() mod den < num`` for ``p = num/den``. Same-class pairs consume no
    draws.
    """
    sizes = [class_size] * k if isinstance(class_size, int) else list(class_size)
    if len(sizes) != k or k < 1 or min(sizes) < 0:
        raise ValueError("need k >= 1 classes with non-negative sizes")
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError(f"probability {p} outside [0, 1]")
    label = np.repeat(np.arange(k), sizes)
    n = len(label)
    rng = SplitMix64(seed)
    num, den = p.numerator, p.denominator
    adj = np.zeros((n, n), dtype=bool)
    for u in range(n):
        for v in range(u + 1, n):
            if label[u] != label[v] and rng.below(den) < num:
                adj[u, v] = adj[v, u] = True
    classes = []
    start = 1
    for s in sizes:
        classes.append(tuple(range(start, start + s)))
        start += s
    return PartitionedGraph(Graph(n, adj), tuple(classes))


# GRAPH text format ---------------------------------------------------------

def parse_graph(text: str) -> Graph | PartitionedGraph:
    """Parse the GRAPH format; returns a PartitionedGraph when ``k >= 1``."""
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].split()
        if body:
            lines.append((lineno, body))
    if not lines or lines[0][1] != ["GRAPH", "1"]:
        raise GraphFormatError("expected header 'GRAPH 1'", lines[0][0] if lines else 1)
    if len(lines) < 2 or len(lines[1][1]) != 2:
        raise GraphFormatError("expected '<n> <k>'", lines[1][0] if len(lines) > 1 else None)
    lineno, (n_tok, k_tok) = lines[1]
    try:
        n, k = int(n_tok), int(k_tok)
    except ValueError:
        raise GraphFormatError("non-integer header token", lineno) from None
    if n < 0 or k < 0:
        raise GraphFormatError("negative size", lineno)
    rest = lines[2:]
    labels = None
    if k >= 1:
        if not rest:
            raise GraphFormatError("missing class line")
        lineno, toks = rest[0]
        try:
            labels = [int(t) for t in toks]
        except ValueError:
            raise GraphFormatError("non-integer class index", lineno) from None
        if len(labels) != n or any(not 1 <= c <= k for c in labels):
            raise GraphFormatError(f"expected {n} class indices in 1..{k}", lineno)
        rest = rest[1:]
    edges = []
    for lineno, toks in rest:
        if len(toks) != 2:
            raise GraphFormatError("edge line needs two vertices", lineno)
        try:
            u, v = int(toks[0]), int(toks[1])
        except ValueError:
            raise GraphFormatError("non-integer vertex", lineno) from None
        if not (1 <= u <= n and 1 <= v <= n) or u == v:
            raise GraphFormatError(f"bad edge {u} {v}", lineno)
        edges.append((u, v))
    g = Graph.from_edges(n, edges)
    if labels is None:
        return g
    classes = [[] for _ in range(k)]
    for v, c in enumerate(labels, 1):
        classes[c - 1].append(v)
    return PartitionedGraph(g, tuple(tuple(c) for c in classes))


def serialize_graph(g: Graph | PartitionedGraph) -> str:
    if isinstance(g, PartitionedGraph):
        graph, k = g.graph, g.k
        label = g.class_of() + 1
    else:
        graph, k, label = g, 0, None
    out = ["GRAPH 1", f"{graph.n} {k}"]
    if label is not None:
        out.append(" ".join(str(int(c)) for c in label))
    out.extend(f"{u} {v}" for u, v in graph.edges())
    return "\n".join(out) + "\n"
