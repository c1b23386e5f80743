"""Executable form of the upper-bound argument for the grid Ramsey number.

* :func:`shelah_extract` - pigeonhole on column signatures over ``r+1`` rows.
* :func:`dichotomy_search` - find an over-represented coloured C4 among the
  rows or an over-represented coloured vertical edge among the columns.
* :func:`refine` - iterate the dichotomy, shrinking columns/rows and pinning
  coloured edges, and record the trajectory.
* :func:`final_pigeonhole` - the closing signature pigeonhole on a set ``V``
  that contains all pinned edges.
* :func:`bounds_table` - exact values of the classical and new upper bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Literal, Optional, Sequence

import numpy as np

from .grid import GridColouring, Rectangle, make_rectangle
from .prng import SplitMix64

DEFAULT_CONSTANT_C = Fraction(20)
EXACT_CAP = 40


class CapExceeded(RuntimeError):
    """Exact C4 enumeration refused because the column set is too large."""


class InfeasibleV(ValueError):
    """The pinned edges touch more than ``r+1`` vertices, or the grid is too small."""


# result types ----------------------------------------------------------------

@dataclass(frozen=True, order=True)
class ColouredC4Pattern:
    """Cycle ``a1 a2 a3 a4`` where edge ``(a_t, a_{t+1})`` has colour ``kappas[t]`` (``a5 = a1``)."""

    vertices: tuple[int, int, int, int]
    kappas: tuple[int, int, int, int]

    def edges(self) -> list[tuple[tuple[int, int], int]]:
        a = self.vertices
        return [(tuple(sorted((a[t], a[(t + 1) % 4]))), self.kappas[t]) for t in range(4)]


@dataclass(frozen=True, order=True)
class ColouredEdgePattern:
    b1: int
    b2: int
    kappa: int


@dataclass(frozen=True)
class RowPattern:
    pattern: ColouredC4Pattern
    rows: tuple[int, ...]


@dataclass(frozen=True)
class ColumnPattern:
    pattern: ColouredEdgePattern
    columns: tuple[int, ...]


@dataclass(frozen=True)
class NoneFound:
    pass


@dataclass(frozen=True)
class NoCollision:
    """Every signature was distinct; ``count`` signatures were compared."""

    count: int
    V: tuple[int, ...] = ()


@dataclass(frozen=True)
class SignatureCollision:
    first: int
    second: int
    V: tuple[int, ...]
    rectangle: Rectangle


# pigeonhole helpers -----------------------------------------------------------

def _first_collision(signatures: dict[int, tuple]) -> Optional[tuple[int, int]]:
    """Lexicographically least pair of keys with equal signatures."""
    groups: dict[tuple, list[int]] = {}
    for key in sorted(signatures):
        groups.setdefault(signatures[key], []).append(key)
    pairs = [(g[0], g[1]) for g in groups.values() if len(g) > 1]
    return min(pairs) if pairs else None


def _equal_pair(values: Sequence[tuple[int, int]]) -> Optional[tuple[int, int]]:
    """First pair of labels (by label order) sharing a colour, from ``(label, colour)``."""
    seen: dict[int, int] = {}
    best = None
    for label, colour in sorted(values):
        if colour in seen:
            cand = (seen[colour], label)
            if best is None or cand < best:
                best = cand
        else:
            seen[colour] = label
    return best


def _column_pigeonhole(
    c: GridColouring,
    columns: Iterable[int],
    V: Sequence[int],
    free_edges: Sequence[tuple[int, int]],
    fixed_edges: Sequence[tuple[tuple[int, int], int]] = (),
) -> SignatureCollision | NoCollision:
    V = tuple(sorted(V))
    sigs = {a: tuple(c.ver_colour(a, b1, b2) for b1, b2 in free_edges) for a in columns}
    pair = _first_collision(sigs)
    if pair is None:
        return NoCollision(len(sigs), V)
    a1, a2 = pair
    for (b1, b2), kappa in fixed_edges:
        if c.ver_colour(a1, b1, b2) != kappa or c.ver_colour(a2, b1, b2) != kappa:
            raise ValueError(f"columns {a1}, {a2} do not carry pinned edge ({b1}{b2}, {kappa})")
    rows = _equal_pair([(v, c.hor_colour(v, a1, a2)) for v in V])
    if rows is None:
        raise ValueError(f"{len(V)} rows cannot force a repeated colour among {c.r}")
    return SignatureCollision(a1, a2, V, make_rectangle(c, a1, a2, *rows))


def _row_pigeonhole(
    c: GridColouring,
    rows: Iterable[int],
    V: Sequence[int],
    free_edges: Sequence[tuple[int, int]],
    fixed_edges: Sequence[tuple[tuple[int, int], int]] = (),
) -> SignatureCollision | NoCollision:
    V = tuple(sorted(V))
    sigs = {b: tuple(c.hor_colour(b, a1, a2) for a1, a2 in free_edges) for b in rows}
    pair = _first_collision(sigs)
    if pair is None:
        return NoCollision(len(sigs), V)
    b1, b2 = pair
    for (a1, a2), kappa in fixed_edges:
        if c.hor_colour(b1, a1, a2) != kappa or c.hor_colour(b2, a1, a2) != kappa:
            raise ValueError(f"rows {b1}, {b2} do not carry pinned edge ({a1}{a2}, {kappa})")
    cols = _equal_pair([(v, c.ver_colour(v, b1, b2)) for v in V])
    if cols is None:
        raise ValueError(f"{len(V)} columns cannot force a repeated colour among {c.r}")
    return SignatureCollision(b1, b2, V, make_rectangle(c, *cols, b1, b2))


def shelah_extract(c: GridColouring, rows: Optional[Sequence[int]] = None) -> Rectangle | NoCollision:
    """Find two columns inducing the same colouring on ``K_{r+1}`` over ``rows``.

    Succeeds whenever ``M > r**C(r+1, 2)``; otherwise may return
    :class:`NoCollision`.
    """
    if rows is None:
        if c.N < c.r + 1:
            raise ValueError(f"need at least r+1 = {c.r + 1} rows, grid has {c.N}")
        rows = range(1, c.r + 2)
    rows = sorted(set(rows))
    if len(rows) != c.r + 1:
        raise ValueError(f"need exactly r+1 = {c.r + 1} distinct rows")
    for j in rows:
        if not 1 <= j <= c.N:
            raise ValueError(f"row {j} out of range 1..{c.N}")
    out = _column_pigeonhole(c, range(1, c.M + 1), rows, list(combinations(rows, 2)))
    return out.rectangle if isinstance(out, SignatureCollision) else out


# dichotomy ---------------------------------------------------------------------

def row_threshold(r: int, size_b: int) -> Fraction:
    """Row count a coloured C4 must reach: ``(1 + 1/(4r^3)) |B| / r^4``."""
    return (1 + Fraction(1, 4 * r**3)) * size_b / r**4


def column_threshold(r: int, size_a: int, constant_c: Fraction = DEFAULT_CONSTANT_C) -> Fraction:
    """Column count a coloured edge must reach: ``(1 + 1/(8r^3) + C/r^4) |A| / r``."""
    return (1 + Fraction(1, 8 * r**3) + Fraction(constant_c) / r**4) * size_a / r


def _c4_tuples(m: int, first: int) -> np.ndarray:
    """Ordered triples ``(q, s, t)`` of positions completing distinct 4-tuples after ``first``."""
    q, s, t = np.meshgrid(np.arange(m), np.arange(m), np.arange(m), indexing="ij")
    q, s, t = q.ravel(), s.ravel(), t.ravel()
    keep = (q != first) & (s != first) & (t != first) & (q != s) & (q != t) & (s != t)
    return np.stack([q[keep], s[keep], t[keep]])


def _c4_codes(H: np.ndarray, r: int, p, q, s, t) -> np.ndarray:
    """Colour-tuple code ``k1 r^3 + k2 r^2 + k3 r + k4`` for each row (axis 0) and tuple."""
    return ((H[:, p, q] * r + H[:, q, s]) * r + H[:, s, t]) * r + H[:, t, p]


def _decode(code: int, r: int) -> tuple[int, int, int, int]:
    k4 = code % r
    code //= r
    k3 = code % r
    code //= r
    return (code // r, code % r, k3, k4)


def _sub_hor(c: GridColouring, cols: Sequence[int], rows: Sequence[int]) -> np.ndarray:
    ci = np.asarray(cols, dtype=np.int64) - 1
    ri = np.asarray(rows, dtype=np.int64) - 1
    return c.hor[ri][:, ci][:, :, ci]


def c4_frequencies(c: GridColouring, A: Iterable[int], B: Iterable[int]) -> dict[ColouredC4Pattern, int]:
    """Number of rows of ``B`` containing each coloured C4 on distinct columns of ``A``.

    Only patterns present in at least one row appear.
    """
    cols, rows = sorted(A), sorted(B)
    m, r = len(cols), c.r
    out: dict[ColouredC4Pattern, int] = {}
    if m < 4 or not rows:
        return out
    H = _sub_hor(c, cols, rows)
    for p in range(m):
        q, s, t = _c4_tuples(m, p)
        codes = _c4_codes(H, r, p, q, s, t)
        keys = np.arange(q.size, dtype=np.int64)[None, :] * r**4 + codes
        uniq, counts = np.unique(keys, return_counts=True)
        for key, cnt in zip(uniq.tolist(), counts.tolist()):
            idx, code = divmod(key, r**4)
            verts = (cols[p], cols[q[idx]], cols[s[idx]], cols[t[idx]])
            out[ColouredC4Pattern(verts, _decode(code, r))] = cnt
    return out


def edge_frequencies(c: GridColouring, A: Iterable[int], B: Iterable[int]) -> dict[ColouredEdgePattern, int]:
    """Number of columns of ``A`` colouring each vertical pair of ``B`` with each colour."""
    cols, rows = sorted(A), sorted(B)
    out: dict[ColouredEdgePattern, int] = {}
    if not cols or len(rows) < 2:
        return out
    ci = np.asarray(cols) - 1
    ri = np.asarray(rows) - 1
    V = c.ver[ci][:, ri][:, :, ri]
    for x, y in combinations(range(len(rows)), 2):
        counts = np.bincount(V[:, x, y], minlength=c.r)
        for kappa in np.nonzero(counts)[0]:
            out[ColouredEdgePattern(rows[x], rows[y], int(kappa))] = int(counts[kappa])
    return out


def _rows_with_pattern(c: GridColouring, pattern: ColouredC4Pattern, B: Iterable[int]) -> tuple[int, ...]:
    return tuple(
        b for b in sorted(B)
        if all(c.hor_colour(b, e[0], e[1]) == kappa for e, kappa in pattern.edges())
    )


def _columns_with_edge(c: GridColouring, pattern: ColouredEdgePattern, A: Iterable[int]) -> tuple[int, ...]:
    return tuple(a for a in sorted(A) if c.ver_colour(a, pattern.b1, pattern.b2) == pattern.kappa)


def _exact_row_side(c: GridColouring, cols: list[int], rows: list[int], need: int) -> Optional[ColouredC4Pattern]:
    m, r = len(cols), c.r
    if r**4 * m**3 >= 2**62:
        raise CapExceeded("pattern key space exceeds 64-bit range")
    H = _sub_hor(c, cols, rows)
    for p in range(m):
        q, s, t = _c4_tuples(m, p)
        codes = _c4_codes(H, r, p, q, s, t)
        keys = np.arange(q.size, dtype=np.int64)[None, :] * r**4 + codes
        uniq, counts = np.unique(keys, return_counts=True)
        hit = np.nonzero(counts >= need)[0]
        if len(hit):
            idx, code = divmod(int(uniq[hit[0]]), r**4)
            verts = (cols[p], cols[q[idx]], cols[s[idx]], cols[t[idx]])
            return ColouredC4Pattern(verts, _decode(code, r))
    return None


def _sampled_row_side(
    c: GridColouring, cols: list[int], rows: list[int], need: int, samples: int, seed: int
) -> Optional[ColouredC4Pattern]:
    m, r = len(cols), c.r
    H = _sub_hor(c, cols, rows)
    rng = SplitMix64(seed)
    best = None
    for _ in range(samples):
        p, q, s, t = (rng.below(m) for _ in range(4))
        if len({p, q, s, t}) < 4:
            continue
        codes = _c4_codes(H, r, p, q, s, t)
        uniq, counts = np.unique(codes, return_counts=True)
        hit = np.nonzero(counts >= need)[0]
        if len(hit):
            cand = ColouredC4Pattern(
                (cols[p], cols[q], cols[s], cols[t]), _decode(int(uniq[hit[0]]), r)
            )
            if best is None or cand < best:
                best = cand
    return best


def dichotomy_search(
    c: GridColouring,
    A: Iterable[int],
    B: Iterable[int],
    constant_c: Fraction = DEFAULT_CONSTANT_C,
    mode: Literal["exact", "sampled"] = "exact",
    samples: int = 0,
    seed: Optional[int] = None,
    cap: int = EXACT_CAP,
) -> RowPattern | ColumnPattern | NoneFound:
    """Look for an over-represented coloured C4 (rows) or coloured edge (columns).

    A C4 pattern on columns of ``A`` qualifies when at least
    :func:`row_threshold` rows of ``B`` contain it; an edge pattern on rows of
    ``B`` when at least :func:`column_threshold` columns of ``A`` contain it.
    The row side takes priority, and ties go to the lexicographically least
    pattern. Sampled mode only inspects ``samples`` seeded 4-tuples.
    """
    cols, rows = sorted(set(A)), sorted(set(B))
    if not cols or not rows:
        raise ValueError("A and B must be non-empty")
    r = c.r
    need_b = math.ceil(row_threshold(r, len(rows)))
    need_a = math.ceil(column_threshold(r, len(cols), constant_c))

    c4 = None
    if len(cols) >= 4:
        if mode == "exact":
            if len(cols) > cap:
                raise CapExceeded(f"|A| = {len(cols)} exceeds exact cap {cap}")
            c4 = _exact_row_side(c, cols, rows, need_b)
        elif mode == "sampled":
            if seed is None:
                raise ValueError("sampled mode needs a seed")
            c4 = _sampled_row_side(c, cols, rows, need_b, samples, seed)
        else:
            raise ValueError(f"unknown mode {mode!r}")
    if c4 is not None:
        return RowPattern(c4, _rows_with_pattern(c, c4, rows))

    if len(rows) >= 2:
        ci = np.asarray(cols) - 1
        ri = np.asarray(rows) - 1
        V = c.ver[ci][:, ri][:, :, ri]
        for x, y in combinations(range(len(rows)), 2):
            counts = np.bincount(V[:, x, y], minlength=r)
            hit = np.nonzero(counts >= need_a)[0]
            if len(hit):
                edge = ColouredEdgePattern(rows[x], rows[y], int(hit[0]))
                return ColumnPattern(edge, _columns_with_edge(c, edge, cols))
    return NoneFound()


# refinement ---------------------------------------------------------------------

Edge = tuple[tuple[int, int], int]


@dataclass(frozen=True)
class RefinementState:
    step: int
    A: tuple[int, ...]
    B: tuple[int, ...]
    ehor: tuple[Edge, ...]
    ever: tuple[Edge, ...]
    J: int
    stop_reason: Optional[str] = None

    def with_stop(self, reason: str) -> "RefinementState":
        return RefinementState(self.step, self.A, self.B, self.ehor, self.ever, self.J, reason)


def state_violations(
    c: GridColouring, state: RefinementState, constant_c: Fraction = DEFAULT_CONSTANT_C
) -> list[str]:
    """All broken invariants of ``state`` (empty list when it is sound).

    The size bounds use ``M`` for the columns and ``N`` for the rows.
    """
    r, i, J = c.r, state.step, state.J
    bad = []
    if not 0 <= J <= i:
        bad.append(f"J={J} outside [0, {i}]")
    hv = {v for (e, _) in state.ehor for v in e}
    vv = {v for (e, _) in state.ever for v in e}
    if hv & set(state.A):
        bad.append("horizontal pinned vertices meet A")
    if vv & set(state.B):
        bad.append("vertical pinned vertices meet B")
    for (a1, a2), kappa in state.ehor:
        for b in state.B:
            if c.hor_colour(b, a1, a2) != kappa:
                bad.append(f"row {b} breaks pinned edge ({a1}{a2}, {kappa})")
    for (b1, b2), kappa in state.ever:
        for a in state.A:
            if c.ver_colour(a, b1, b2) != kappa:
                bad.append(f"column {a} breaks pinned edge ({b1}{b2}, {kappa})")
    if len(state.ehor) != 4 * (i - J):
        bad.append(f"|Ehor|={len(state.ehor)} != 4(i-J)={4 * (i - J)}")
    if len(state.ever) != J:
        bad.append(f"|Ever|={len(state.ever)} != J={J}")
    grow_a = (1 + Fraction(1, 8 * r**3) + Fraction(constant_c) / r**4) / r
    grow_b = (1 + Fraction(1, 4 * r**3)) / r**4
    if len(state.A) < grow_a**J * c.M - 4 * (i - J):
        bad.append(f"|A|={len(state.A)} below its lower bound")
    if len(state.B) < grow_b ** (i - J) * c.N - 2 * J:
        bad.append(f"|B|={len(state.B)} below its lower bound")
    return bad


def refine(
    c: GridColouring,
    max_steps: Optional[int] = None,
    constant_c: Fraction = DEFAULT_CONSTANT_C,
    mode: Literal["exact", "sampled"] = "exact",
    samples: int = 0,
    seed: Optional[int] = None,
    enforce_precondition: bool = True,
    cap: int = EXACT_CAP,
) -> list[RefinementState]:
    """Iterate :func:`dichotomy_search` and return the whole trajectory.

    ``max_steps`` defaults to ``floor(r/8)``. The run stops at the step
    budget, when no pattern reaches its threshold, or (unless
    ``enforce_precondition`` is false) when ``|B| < r**5``. The last state
    carries the stop reason.
    """
    r = c.r
    if max_steps is None:
        max_steps = r // 8
    state = RefinementState(0, tuple(range(1, c.M + 1)), tuple(range(1, c.N + 1)), (), (), 0)
    trajectory = []
    sample_rng = SplitMix64(seed) if seed is not None else None
    while True:
        if state.step >= max_steps:
            trajectory.append(state.with_stop("max_steps"))
            return trajectory
        if enforce_precondition and len(state.B) < r**5:
            trajectory.append(state.with_stop("b_below_r5"))
            return trajectory
        step_seed = sample_rng.next() if sample_rng is not None else None
        if not state.A or not state.B:  # only reachable in relaxed runs
            trajectory.append(state.with_stop("none_found"))
            return trajectory
        found = dichotomy_search(c, state.A, state.B, constant_c, mode, samples, step_seed, cap)
        if isinstance(found, NoneFound):
            trajectory.append(state.with_stop("none_found"))
            return trajectory
        trajectory.append(state)
        if isinstance(found, RowPattern):
            pat = found.pattern
            state = RefinementState(
                state.step + 1,
                tuple(a for a in state.A if a not in pat.vertices),
                found.rows,
                state.ehor + tuple(pat.edges()),
                state.ever,
                state.J,
            )
        else:
            pat = found.pattern
            state = RefinementState(
                state.step + 1,
                found.columns,
                tuple(b for b in state.B if b not in (pat.b1, pat.b2)),
                state.ehor,
                state.ever + (((pat.b1, pat.b2), pat.kappa),),
                state.J + 1,
            )


def _assemble_v(pinned: Iterable[int], pool_size: int, size: int) -> tuple[int, ...]:
    fixed = sorted(set(pinned))
    if len(fixed) > size:
        raise InfeasibleV(f"infeasible V: {len(fixed)} pinned vertices exceed |V| = {size}")
    if pool_size < size:
        raise InfeasibleV(f"infeasible V: only {pool_size} vertices available, need {size}")
    fresh = [v for v in range(1, pool_size + 1) if v not in fixed]
    return tuple(sorted(fixed + fresh[: size - len(fixed)]))


def final_pigeonhole(
    c: GridColouring, state: RefinementState, case: Literal[1, 2]
) -> SignatureCollision | NoCollision:
    """Signature pigeonhole over ``A`` (case 1) or ``B`` (case 2).

    ``V`` has ``r+1`` vertices: the pinned-edge vertices first, then the
    smallest unused labels. Signatures cover the ``C(r+1, 2)`` pairs of ``V``
    minus the pinned edges.
    """
    size = c.r + 1
    if case == 1:
        V = _assemble_v((v for e, _ in state.ever for v in e), c.N, size)
        fixed = {e for e, _ in state.ever}
        free = [e for e in combinations(V, 2) if e not in fixed]
        return _column_pigeonhole(c, state.A, V, free, state.ever)
    if case == 2:
        V = _assemble_v((v for e, _ in state.ehor for v in e), c.M, size)
        fixed = {e for e, _ in state.ehor}
        free = [e for e in combinations(V, 2) if e not in fixed]
        return _row_pigeonhole(c, state.B, V, free, state.ehor)
    raise ValueError(f"case must be 1 or 2, got {case!r}")


# trajectory dump --------------------------------------------------------------

def format_trajectory(trajectory: Sequence[RefinementState], verbose: bool = False) -> str:
    """``STEP i J |A| |B| |Ehor| |Ever| [stop]`` per state, members indented when verbose."""
    lines = []
    for st in trajectory:
        head = f"STEP {st.step} {st.J} {len(st.A)} {len(st.B)} {len(st.ehor)} {len(st.ever)}"
        lines.append(head + (f" {st.stop_reason}" if st.stop_reason else ""))
        if verbose:
            lines.append("  A " + " ".join(map(str, st.A)))
            lines.append("  B " + " ".join(map(str, st.B)))
            lines.append("  EHOR " + " ".join(f"{a}-{b}:{k}" for (a, b), k in st.ehor))
            lines.append("  EVER " + " ".join(f"{a}-{b}:{k}" for (a, b), k in st.ever))
    return "\n".join(lines) + "\n"


def _parse_edges(tokens: list[str]) -> tuple[Edge, ...]:
    out = []
    for tok in tokens:
        pair, kappa = tok.split(":")
        a, b = pair.split("-")
        out.append(((int(a), int(b)), int(kappa)))
    return tuple(out)


def parse_trajectory(text: str) -> list[RefinementState]:
    """Inverse of :func:`format_trajectory` with ``verbose=True``."""
    states = []
    cur: Optional[dict] = None

    def flush() -> None:
        if cur is not None:
            if not {"A", "B", "EHOR", "EVER"} <= cur.keys():
                raise ValueError(f"STEP {cur['step']} lacks member lines (dump with --verbose)")
            states.append(RefinementState(
                cur["step"], cur["A"], cur["B"], cur["EHOR"], cur["EVER"], cur["J"], cur["stop"],
            ))

    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        try:
            if toks[0] == "STEP":
                flush()
                cur = {"step": int(toks[1]), "J": int(toks[2]),
                       "stop": toks[7] if len(toks) > 7 else None}
            elif cur is not None and toks[0] in ("A", "B"):
                cur[toks[0]] = tuple(int(t) for t in toks[1:])
            elif cur is not None and toks[0] in ("EHOR", "EVER"):
                cur[toks[0]] = _parse_edges(toks[1:])
            else:
                raise ValueError(f"unexpected line {raw!r}")
        except (IndexError, ValueError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    flush()
    if not states:
        raise ValueError("no STEP records")
    return states


# bounds -------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundsReport:
    r: int
    shelah: int
    gyarfas: int
    theorem_threshold: Fraction
    constant_c: Fraction
    valid: bool
    message: str
    worst_J: int
    worst_case: int
    corsten: str = "r^C(r+1,2) - (1/4 - o(1)) r^C(r,2)"

    @property
    def power(self) -> int:
        """``r ** C(r+1, 2)``."""
        return self.r ** math.comb(self.r + 1, 2)

    @property
    def ratio(self) -> Fraction:
        return self.theorem_threshold / self.power


def case_threshold(r: int, J: int, constant_c: Fraction = DEFAULT_CONSTANT_C) -> tuple[int, Fraction]:
    """Largest ``N`` not ruled out when the refinement ends with ``J`` column steps.

    Returns ``(case, N_max)``. Case 1 (``J >= s/2``) rearranges
    ``(1+beta)^J r^-R N - 4 r^(ceil(r/8)+2-R) <= 1``; case 2 rearranges
    ``(1 + 1/(4r^3))^(s-J) r^-R N - 2 r^(4r+1-R) <= 1``, with
    ``R = C(r+1, 2)``, ``s = floor(r/8)``, ``beta = 1/(8r^3) + C/r^4``.
    """
    R = math.comb(r + 1, 2)
    s = r // 8
    if 2 * J >= s:
        beta = Fraction(1, 8 * r**3) + Fraction(constant_c) / r**4
        slack = 4 * r ** (-(-r // 8) + 2)
        return 1, (r**R + slack) / (1 + beta) ** J
    slack = 2 * r ** (4 * r + 1)
    return 2, (r**R + slack) / (1 + Fraction(1, 4 * r**3)) ** (s - J)


def bounds_table(r: int, constant_c: Fraction = DEFAULT_CONSTANT_C) -> BoundsReport:
    """Shelah, Gyarfas and the refinement-based threshold, all exact."""
    if r < 2:
        raise ValueError("bounds need r >= 2")
    constant_c = Fraction(constant_c)
    R = math.comb(r + 1, 2)
    shelah = r**R + 1
    gyarfas = r**R - r ** math.comb(r - 1, 2) + 1
    s = r // 8
    best = None
    for J in range(s + 1):
        case, value = case_threshold(r, J, constant_c)
        if best is None or value > best[2]:
            best = (J, case, value)
    J, case, value = best
    notes = []
    if r < 16:
        notes.append("r < 16: floor(r/8)/2 < 1, the case split degenerates")
    if 1 + Fraction(1, 8 * r**3) + constant_c / r**4 <= 1:
        notes.append("constant C makes the column growth factor <= 1")
    if r < 100:
        notes.append("explicit constant C only asserted for r >= 100")
    valid = r >= 16 and 1 + Fraction(1, 8 * r**3) + constant_c / r**4 > 1
    return BoundsReport(
        r=r, shelah=shelah, gyarfas=gyarfas, theorem_threshold=value, constant_c=constant_c,
        valid=valid, message="; ".join(notes) if notes else "ok", worst_J=J, worst_case=case,
    )


def decimal_string(x: Fraction | int, digits: int = 12) -> str:
    """``x`` rounded to ``digits`` significant digits in scientific notation."""
    x = Fraction(x)
    with localcontext() as ctx:
        ctx.prec = digits
        value = Decimal(x.numerator) / Decimal(x.denominator)
        return f"{value:.{digits - 1}E}"
