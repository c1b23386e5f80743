"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import io
import subprocess
import sys
import time
from contextlib import contextmanager
from fractions import Fraction
from itertools import combinations, product

import numpy as np

from gridramsey.cli import main
from gridramsey.engine import (
    NoCollision,
    bounds_table,
    dichotomy_search,
    refine,
    shelah_extract,
    state_violations,
)
from gridramsey.grid import (
    GridColouring,
    Rectangle,
    find_alternating_rectangle,
    random_colouring,
    vertical_partition,
)
from gridramsey.prng import SplitMix64
from gridramsey.quasirand import (
    Graph,
    codegree_matrix,
    complete_multipartite,
    hom_c4,
    hom_c4_trace,
    is_kpartite,
    lemma_diagnostics,
    lemma_lower_bound,
    partition_imbalance,
    random_kpartite,
)
from oracles import all_colourings, hom_c4_enumerate
from test_engine import expected_dichotomy


@contextmanager
def criterion(number, title, capsys, budget):
    start = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - start
        assert elapsed < budget, f"took {elapsed:.2f}s, budget {budget}s"
    except AssertionError as exc:
        with capsys.disabled():
            print(f"\nCRITERION {number} FAIL {title}: {str(exc).splitlines()[0] if str(exc) else 'assertion'}")
        raise
    with capsys.disabled():
        print(f"\nCRITERION {number} PASS {title} ({time.perf_counter() - start:.2f}s)")


def cli(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out)
    return code, dict(line.split(" ", 1) for line in out.getvalue().splitlines())


def kpartite_corpus(count=1000, seed=2024):
    """Seeded random k-partite graphs with k in 2..6, n <= 24 and imbalance <= 1."""
    rng = SplitMix64(seed)
    corpus = []
    while len(corpus) < count:
        k = 2 + rng.below(5)
        sizes = [1 + rng.below(24 // k) for _ in range(k)]
        p = Fraction(rng.below(9), 8)
        pg = random_kpartite(k, sizes, p, rng.next())
        if partition_imbalance(pg) <= 1:
            corpus.append(pg)
    return corpus


CORPUS = None


def corpus():
    global CORPUS
    if CORPUS is None:
        CORPUS = kpartite_corpus()
    return CORPUS


def test_criterion_01_bound_formulas(capsys):
    with criterion(1, "bounds --r 2 / --r 3 exact", capsys, 1.0):
        code2, r2 = cli("bounds", "--r", 2)
        code3, r3 = cli("bounds", "--r", 3)
        assert code2 == code3 == 0
        assert r2["shelah"] == "9" and r2["gyarfas"] == "8", r2
        assert r3["gyarfas"] == "727", r3


def test_criterion_02_headline_shape(capsys):
    r = 200
    with criterion(2, "r=200 threshold ratio within (1-1/(127r^2), 1-1/(129r^2))", capsys, 10.0):
        rep = bounds_table(r, Fraction(20))
        ratio = rep.ratio
        deficit = float(1 / ((1 - ratio) * r * r))
        upper_ok = ratio < 1 - Fraction(1, 129 * r * r)
        lower_ok = ratio > 1 - Fraction(1, 127 * r * r)
        assert upper_ok, f"upper side fails, 1-ratio = 1/({deficit:.4f} r^2)"
        assert lower_ok, (
            f"lower side fails, 1-ratio = 1/({deficit:.4f} r^2) "
            f"(worst J = {rep.worst_J}, case {rep.worst_case})"
        )


def test_criterion_03_lemma_property_suite(capsys):
    with criterion(3, "hom >= lemma bound on 1000 random + balanced complete multipartite", capsys, 30.0):
        violations = [i for i, pg in enumerate(corpus()) if hom_c4(pg.graph) < lemma_lower_bound(pg)]
        assert not violations, f"violations at {violations[:5]}"
        for k in range(2, 5):
            for size in range(1, 4):
                pg = complete_multipartite([size] * k)
                assert hom_c4(pg.graph) == lemma_lower_bound(pg), (k, size)
        assert hom_c4(complete_multipartite([3, 3]).graph) == 162
        assert hom_c4(complete_multipartite([2, 2, 2]).graph) == 288


def test_criterion_04_proof_chain(capsys):
    with criterion(4, "proof-chain inequalities on the corpus, equality on K_{n,n}", capsys, 60.0):
        for i, pg in enumerate(corpus()):
            chain = lemma_diagnostics(pg).chain()
            assert all(chain.values()), (i, chain)
        for n in range(1, 9):
            d = lemma_diagnostics(complete_multipartite([n, n]))
            assert all(d.chain_equalities().values()), n


def test_criterion_05_hom_oracles(capsys):
    with criterion(5, "codegree = trace = enumeration on 200 graphs, K_n closed form", capsys, 10.0):
        rng = SplitMix64(5)
        for _ in range(200):
            n = 1 + rng.below(8)
            adj = np.zeros((n, n), dtype=bool)
            for x, y in combinations(range(n), 2):
                adj[x, y] = adj[y, x] = rng.below(2) == 1
            g = Graph(n, adj)
            sq = int((codegree_matrix(g) ** 2).sum())
            assert hom_c4(g) == sq == hom_c4_trace(g) == hom_c4_enumerate(adj.tolist())
        for n in range(1, 21):
            g = Graph.complete(n)
            assert hom_c4(g) == hom_c4_trace(g) == (n - 1) ** 4 + (n - 1), n


def test_criterion_06_shelah(capsys):
    with criterion(6, "500 seeded r=2 9x3 colourings collide, 8-column construction does not", capsys, 5.0):
        for seed in range(500):
            c = random_colouring(2, 9, 3, seed)
            rect = shelah_extract(c)
            assert isinstance(rect, Rectangle) and rect.is_valid_for(c), seed
        ver = [list(bits) for bits in product(range(2), repeat=3)]
        c = GridColouring.from_records(2, 8, 3, [[0] * 28] * 3, ver)
        assert isinstance(shelah_extract(c), NoCollision)


def _law(c):
    free = find_alternating_rectangle(c) is None
    legal = all(
        is_kpartite(vertical_partition(c, j1, j2))[0]
        for j1, j2 in combinations(range(1, c.N + 1), 2)
    )
    return free == legal


def test_criterion_07_equivalence_law(capsys):
    with criterion(7, "rectangle-free iff every vertical partition is proper", capsys, 20.0):
        # r=2, M=N=2 has only 2^4 = 16 colourings; r=4 gives the full 256
        small = list(all_colourings(2, 2, 2))
        assert len(small) == 16
        assert all(_law(c) for c in small)
        wide = list(all_colourings(4, 2, 2))
        assert len(wide) == 256
        assert all(_law(c) for c in wide)
        rng = SplitMix64(7)
        for _ in range(1000):
            r, M, N = 1 + rng.below(3), 1 + rng.below(6), 1 + rng.below(6)
            c = random_colouring(r, M, N, rng.next())
            assert _law(c), (r, M, N)


def test_criterion_08_refinement_invariants(capsys):
    with criterion(8, "invariants on 50 r=2 20x20 trajectories, dichotomy vs oracle", capsys, 60.0):
        rng = SplitMix64(8)
        states = 0
        for seed in range(50):
            c = random_colouring(2, 20, 20, seed)
            for traj in (refine(c), refine(c, max_steps=6, enforce_precondition=False)):
                for st in traj:
                    states += 1
                    assert state_violations(c, st) == [], (seed, st)
            for _ in range(2):
                A = sorted(rng.permutation(20)[: 4 + rng.below(5)])
                B = sorted(rng.permutation(20)[: 2 + rng.below(7)])
                A = [a + 1 for a in A]
                B = [b + 1 for b in B]
                got = dichotomy_search(c, A, B)
                kind, key = expected_dichotomy(c, A, B, Fraction(20))
                if kind == "row":
                    assert (got.pattern.vertices, got.pattern.kappas) == key
                elif kind == "column":
                    assert (got.pattern.b1, got.pattern.b2, got.pattern.kappa) == key
                else:
                    assert type(got).__name__ == "NoneFound"
        assert states > 100


def test_criterion_09_search_g1(capsys):
    from gridramsey.search import exhaustive_search, verify_witness

    with criterion(9, "search: r=1 2x2 exhausted, r=2 2x2 witness", capsys, 1.0):
        assert exhaustive_search(1, 2, 2).kind == "exhausted"
        res = exhaustive_search(2, 2, 2)
        assert res.kind == "witness" and verify_witness(res.witness)


SEEDED = [
    ["gen", "--r", "3", "--m", "6", "--n", "5", "--seed", "11"],
    ["lemma-check", "--k", "3", "--class-size", "4", "--p", "1/2", "--trials", "200", "--seed", "7"],
    ["search", "--r", "2", "--m", "5", "--n", "5", "--timeout-ms", "5000", "--seed", "4"],
]


def test_criterion_10_determinism(capsys, tmp_path):
    with criterion(10, "seeded subcommands are byte-identical across runs", capsys, 60.0):
        grid_file = tmp_path / "g.gridcol"
        subprocess.run(
            [sys.executable, "-m", "gridramsey", "gen", "--r", "2", "--m", "12", "--n", "16",
             "--seed", "3", "-o", str(grid_file)],
            check=True,
        )
        cmds = SEEDED + [
            ["dichotomy", str(grid_file), "--cols", "all", "--rows", "all", "--samples", "300", "--seed", "5"],
            ["refine", str(grid_file), "--max-steps", "3", "--relaxed", "--samples", "300",
             "--seed", "5", "--verbose"],
        ]
        for cmd in cmds:
            runs = [
                subprocess.run([sys.executable, "-m", "gridramsey", *cmd], capture_output=True)
                for _ in range(2)
            ]
            assert runs[0].stdout and runs[0].returncode in (0, 1), cmd
            assert runs[0].stdout == runs[1].stdout, cmd
            assert runs[0].returncode == runs[1].returncode, cmd
