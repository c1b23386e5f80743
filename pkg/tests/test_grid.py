from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import DATA
from gridramsey.grid import (
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
from gridramsey.quasirand import is_kpartite
from oracles import all_colourings, rectangles_column_major, rectangles_row_major

MINIMAL = "GRIDCOL 1\n1 2 2\n0\n0\n0\n0\n"

grids = st.builds(
    random_colouring,
    r=st.integers(1, 3), M=st.integers(1, 6), N=st.integers(1, 6),
    seed=st.integers(0, 2**64 - 1),
)


# parsing and serialization

def test_parse_minimal():
    c = parse_colouring(MINIMAL)
    assert (c.r, c.M, c.N) == (1, 2, 2)
    assert c.hor_records().size == 2 and c.ver_records().size == 2
    assert c.hor_colour(1, 2, 1) == 0


def test_serialize_minimal_is_canonical():
    assert serialize_colouring(GridColouring.constant(1, 2, 2)) == MINIMAL.encode()


def test_parse_accepts_comments_and_free_layout():
    text = "# header\nGRIDCOL 1 # v1\n1 2 2\n0 0\n# cols\n0\n0\n"
    assert serialize_colouring(parse_colouring(text)) == MINIMAL.encode()


@pytest.mark.parametrize(
    "text, fragment, line",
    [
        ("GRIDCOL 1\n1 2 2\n0\n1\n0\n0\n", "colour out of range", 4),
        ("GRIDCOL 2\n1 2 2\n0\n0\n0\n0\n", "malformed header", 1),
        ("GRID 1\n1 2 2\n0\n0\n0\n0\n", "malformed header", 1),
        ("GRIDCOL 1\n1 2\n", "malformed header", 2),
        ("GRIDCOL 1\n0 2 2\n", "malformed header", 2),
        ("GRIDCOL 1\n1 2 2\n0\n0\n0\n", "wrong token count", 5),
        ("GRIDCOL 1\n1 2 2\n0\n0\n0\n0\n0\n", "wrong token count", 7),
        ("GRIDCOL 1\n1 2 2\n0\nx\n0\n0\n", "non-integer token", 4),
        ("GRIDCOL 1\n1 b 2\n", "non-integer token", 2),
        ("GRIDCOL 1\n2 2 2\n0\n-1\n0\n0\n", "colour out of range", 4),
    ],
)
def test_parse_errors_report_line(text, fragment, line):
    with pytest.raises(GridFormatError) as err:
        parse_colouring(text)
    assert fragment in str(err.value)
    assert err.value.line == line


def test_round_trip_seeded_3x4():
    c = random_colouring(3, 3, 4, seed=11)
    text = serialize_colouring(c)
    # the same content with comments and reflowed whitespace
    noisy = b"# noisy copy\n" + text.replace(b"\n", b"  # eol\n").replace(b" ", b"   ")
    assert serialize_colouring(parse_colouring(noisy)) == text
    assert parse_colouring(text) == c


@given(grids)
@settings(max_examples=60, deadline=None)
def test_round_trip_law(c):
    assert parse_colouring(serialize_colouring(c)) == c


def test_canonical_bytes_from_permuted_construction():
    c = random_colouring(3, 4, 3, seed=5)
    # rebuild the same map by filling entries in a scrambled order, both orientations
    hor = np.full_like(c.hor, -1)
    ver = np.full_like(c.ver, -1)
    for j in reversed(range(c.N)):
        for i2, i in combinations(reversed(range(c.M)), 2):
            hor[j, i, i2] = hor[j, i2, i] = c.hor[j, i2, i]
    for i in reversed(range(c.M)):
        for j2, j in combinations(reversed(range(c.N)), 2):
            ver[i, j2, j] = ver[i, j, j2] = c.ver[i, j, j2]
    assert serialize_colouring(GridColouring(3, 4, 3, hor, ver)) == serialize_colouring(c)


def test_invalid_arrays_rejected():
    c = random_colouring(2, 3, 3, seed=1)
    bad = c.hor.copy()
    bad[0, 0, 1] = 2
    bad[0, 1, 0] = 2
    with pytest.raises(ValueError):
        GridColouring(2, 3, 3, bad, c.ver)
    asym = c.hor.copy()
    asym[0, 0, 1] = 1 - asym[0, 1, 0]
    with pytest.raises(ValueError):
        GridColouring(2, 3, 3, asym, c.ver)


def test_symmetric_queries():
    c = random_colouring(3, 4, 4, seed=3)
    for j in range(1, 5):
        for i, i2 in combinations(range(1, 5), 2):
            assert c.hor_colour(j, i, i2) == c.hor_colour(j, i2, i)
            assert c.ver_colour(j, i, i2) == c.ver_colour(j, i2, i)


# random generation

def test_single_colour_is_all_zero():
    for seed in (0, 1, 2**63):
        c = random_colouring(1, 3, 4, seed)
        assert c == GridColouring.constant(1, 3, 4)


def test_random_is_deterministic():
    assert random_colouring(3, 5, 4, 99) == random_colouring(3, 5, 4, 99)
    assert random_colouring(3, 5, 4, 99) != random_colouring(3, 5, 4, 100)


def test_golden_r2_m3_n3_seed42():
    golden = (DATA / "r2_m3_n3_seed42.gridcol").read_bytes()
    assert serialize_colouring(random_colouring(2, 3, 3, 42)) == golden


def test_stream_order_hor_then_ver():
    from gridramsey.prng import SplitMix64

    g = SplitMix64(8)
    draws = [g.next() % 5 for _ in range(3 * 3 + 3 * 3)]
    c = random_colouring(5, 3, 3, 8)
    assert c.hor_records().ravel().tolist() == draws[:9]
    assert c.ver_records().ravel().tolist() == draws[9:]


# rectangles

def test_monochromatic_2x2():
    rect = find_alternating_rectangle(GridColouring.constant(1, 2, 2))
    assert rect == Rectangle(1, 2, 1, 2, 0, 0)


def test_forced_mismatch_has_no_rectangle():
    for v in range(2):
        for w in range(2):
            c = GridColouring.from_records(2, 2, 2, [[0], [1]], [[v], [w]])
            assert find_alternating_rectangle(c) is None
            assert count_alternating_rectangles(c) == 0


def test_counts_on_constant_grids():
    assert count_alternating_rectangles(GridColouring.constant(1, 2, 2)) == 1
    assert count_alternating_rectangles(GridColouring.constant(1, 3, 3)) == 9


def test_count_seeded_5x5_double_enumeration():
    c = random_colouring(2, 5, 5, seed=2024)
    a = rectangles_row_major(c)
    b = rectangles_column_major(c)
    assert sorted(a) == sorted(b)
    assert count_alternating_rectangles(c) == len(a)


def test_nine_columns_two_colours_always_contain_rectangle():
    for seed in range(500):
        assert find_alternating_rectangle(random_colouring(2, 9, 3, seed)) is not None


@given(grids)
@settings(max_examples=200, deadline=None)
def test_find_matches_lexicographic_oracle(c):
    expected = sorted(rectangles_column_major(c))
    rect = find_alternating_rectangle(c)
    if not expected:
        assert rect is None
        assert count_alternating_rectangles(c) == 0
    else:
        assert (rect.i, rect.i2, rect.j, rect.j2) == expected[0]
        assert rect.is_valid_for(c)
        assert count_alternating_rectangles(c) == len(expected)


# row and intersection graphs

def test_row_graph_m2_single_edge():
    c = random_colouring(3, 2, 3, seed=1)
    h = row_graph(c, 2)
    assert h.edges() == [(1, 2, c.hor_colour(2, 1, 2))]


def test_row_graph_constant():
    h = row_graph(GridColouring.constant(2, 4, 3), 3)
    assert {col for _, _, col in h.edges()} == {0}
    assert len(h.edges()) == 6


def test_row_graph_matches_file_offsets():
    c = random_colouring(4, 5, 4, seed=77)
    tokens = serialize_colouring(c).split()[5:]
    pairs = list(combinations(range(1, 6), 2))
    for j in range(1, 5):
        h = row_graph(c, j)
        for x, y in combinations(range(1, 6), 2):
            offset = (j - 1) * len(pairs) + pairs.index((x, y))
            assert h.colour(x, y) == int(tokens[offset])
    with pytest.raises(ValueError):
        row_graph(c, 5)


def test_intersection_graph_extremes():
    c = GridColouring.from_records(2, 4, 2, [[0] * 6, [0] * 6], [[0]] * 4)
    assert intersection_graph(c, 1, 2).num_edges == 6
    c = GridColouring.from_records(2, 4, 2, [[0] * 6, [1] * 6], [[0]] * 4)
    assert intersection_graph(c, 1, 2).num_edges == 0
    c = random_colouring(1, 5, 3, seed=4)
    assert intersection_graph(c, 1, 3).num_edges == 10
    with pytest.raises(ValueError):
        intersection_graph(c, 2, 2)
    with pytest.raises(ValueError):
        intersection_graph(c, 1, 4)


@given(grids.filter(lambda c: c.N >= 2))
@settings(max_examples=60, deadline=None)
def test_intersection_graph_symmetric(c):
    for j1, j2 in combinations(range(1, c.N + 1), 2):
        assert intersection_graph(c, j1, j2) == intersection_graph(c, j2, j1)


def test_vertical_partition_keeps_empty_classes():
    c = GridColouring.constant(3, 4, 2)
    pg = vertical_partition(c, 1, 2)
    assert pg.k == 3
    assert pg.classes == ((1, 2, 3, 4), (), ())
    assert pg.violation == (1, 2)
    assert find_alternating_rectangle(c) is not None


def _equivalence_holds(c):
    free = find_alternating_rectangle(c) is None
    legal = all(
        is_kpartite(vertical_partition(c, j1, j2))[0]
        for j1, j2 in combinations(range(1, c.N + 1), 2)
    )
    return free == legal


@pytest.mark.parametrize("r, M, N", [(2, 2, 2), (2, 2, 3), (2, 3, 2), (3, 2, 2)])
def test_equivalence_exhaustive_small(r, M, N):
    assert all(_equivalence_holds(c) for c in all_colourings(r, M, N))


@given(grids)
@settings(max_examples=200, deadline=None)
def test_equivalence_random(c):
    assert _equivalence_holds(c)


def test_violation_pinpoints_a_rectangle():
    c = random_colouring(2, 5, 5, seed=9)
    for j1, j2 in combinations(range(1, 6), 2):
        edge = vertical_partition(c, j1, j2).violation
        if edge is not None:
            i, i2 = edge
            assert c.hor_colour(j1, i, i2) == c.hor_colour(j2, i, i2)
            assert c.ver_colour(i, j1, j2) == c.ver_colour(i2, j1, j2)


def test_restrict_relabels():
    c = random_colouring(3, 5, 5, seed=12)
    sub = c.restrict([2, 4, 5], [1, 3])
    assert sub.hor_colour(2, 1, 3) == c.hor_colour(3, 2, 5)
    assert sub.ver_colour(2, 1, 2) == c.ver_colour(4, 1, 3)
