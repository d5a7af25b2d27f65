import math
import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.cluster.hierarchy import linkage
from scipy.spatial.distance import squareform

from tversky_metrics.cluster import (
    DistanceMatrix,
    Dendrogram,
    Node,
    alpha_grid,
    alpha_sweep,
    canonical_form,
    distance_matrix,
    newick_serialize,
    parse_newick,
    quote_label,
    ward_linkage,
)
from tversky_metrics.errors import DomainError, DuplicateLabel, MalformedNewick, MatrixInvalid
from tversky_metrics.measures import Family, MeasureSpec


def matrix(labels, rows):
    return DistanceMatrix(tuple(labels), tuple(tuple(r) for r in rows))


def random_matrix(rng, n):
    """Distances between random points in the plane (generic: no ties)."""
    pts = [(rng.random(), rng.random()) for _ in range(n)]
    rows = [[math.dist(p, q) for q in pts] for p in pts]
    return matrix([f"s{i}" for i in range(n)], rows)


def test_distance_matrix_examples():
    m = distance_matrix([("x", "MKV"), ("y", "MKV")], MeasureSpec(Family.EDIT))
    assert m[0, 1] == m[1, 0] == 0
    m = distance_matrix({"a": "abcd", "b": "abc"}, MeasureSpec(Family.ZKGRAM, alpha=F(3, 10)))
    assert m[0, 1] == F(7, 10)
    m = distance_matrix([("a", "abab"), ("b", "aaaa")], MeasureSpec(Family.LZJD))
    assert m[0, 1] == F(3, 4)
    with pytest.raises(DuplicateLabel):
        distance_matrix([("a", "x"), ("a", "y")], MeasureSpec(Family.EDIT))
    with pytest.raises(DomainError):
        distance_matrix([("a", "x")], MeasureSpec(Family.EDIT))


def test_distance_matrix_set_family_on_profiles():
    m = distance_matrix([("a", "abc"), ("b", "bcd")], MeasureSpec(Family.J1, k=2))
    # profiles {ab, bc} and {bc, cd}
    assert m[0, 1] == F(2, 3)


def test_distance_matrix_parallel_matches_serial():
    seqs = [(f"s{i}", "".join(random.Random(i).choice("AC") for _ in range(12))) for i in range(6)]
    spec = MeasureSpec(Family.ZKGRAM, alpha=F(1, 3))
    assert distance_matrix(seqs, spec) == distance_matrix(seqs, spec, workers=2)


def test_matrix_validation():
    with pytest.raises(MatrixInvalid):
        matrix("AB", [[0, -1], [-1, 0]])
    with pytest.raises(MatrixInvalid):
        matrix("AB", [[0, 1], [2, 0]])
    with pytest.raises(MatrixInvalid):
        matrix("AB", [[1, 1], [1, 0]])
    with pytest.raises(MatrixInvalid):
        matrix("AB", [[0, 1]])


def test_ward_two_points():
    tree = ward_linkage(matrix("AB", [[0, F(7, 10)], [F(7, 10), 0]]))
    assert tree.heights == [0.7]
    assert newick_serialize(tree) == "(A:0.350000,B:0.350000);"


def test_ward_two_points_unit_and_order_independence():
    t1 = ward_linkage(matrix("AB", [[0, 1], [1, 0]]))
    t2 = ward_linkage(matrix("BA", [[0, 1], [1, 0]]))
    assert newick_serialize(t1) == newick_serialize(t2) == "(A:0.500000,B:0.500000);"


def test_ward_three_points_hand_trace():
    tree = ward_linkage(matrix("ABC", [[0, 1, 10], [1, 0, 10], [10, 10, 0]]))
    # merge {A,B} at 1; then ((1+1)*100 + (1+1)*100 - 1*1) / 3 = 133
    assert tree.merges[0][:2] == (("A",), ("B",))
    assert tree.heights == [1, pytest.approx(math.sqrt(133))]
    h = math.sqrt(133)
    assert newick_serialize(tree) == f"((A:0.500000,B:0.500000):{(h - 1) / 2:.6f},C:{h / 2:.6f});"


def test_ward_tie_break_smallest_pair():
    tree = ward_linkage(matrix("ABC", [[0, 1, 1], [1, 0, 1], [1, 1, 0]]))
    assert tree.merges[0][:2] == (("A",), ("B",))


@pytest.mark.parametrize("seed", range(8))
def test_ward_heights_match_scipy(seed):
    rng = random.Random(seed)
    m = random_matrix(rng, rng.randint(3, 12))
    ours = sorted(ward_linkage(m).heights)
    ref = linkage(squareform(np.array(m.values, dtype=float)), method="ward")[:, 2]
    assert ours == pytest.approx(sorted(ref), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_ward_permutation_equivariant(seed):
    rng = random.Random(100 + seed)
    m = random_matrix(rng, 8)
    order = list(range(8))
    rng.shuffle(order)
    permuted = matrix([m.labels[i] for i in order], [[m.values[i][j] for j in order] for i in order])
    assert canonical_form(ward_linkage(m)) == canonical_form(ward_linkage(permuted))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 9))
def test_newick_round_trip(seed, n):
    m = random_matrix(random.Random(seed), n)
    tree = ward_linkage(m)
    assert not tree.inversions
    back = parse_newick(newick_serialize(tree, precision=None))
    assert canonical_form(back) == canonical_form(tree)
    assert sorted(_heights(back.root)) == pytest.approx(sorted(tree.heights), abs=1e-12)
    # default 6-decimal output still preserves topology
    assert canonical_form(parse_newick(newick_serialize(tree))) == canonical_form(tree)


def _heights(node):
    if node.is_leaf:
        return []
    return [node.height] + [h for c in node.children for h in _heights(c)]


def test_branch_lengths_non_negative():
    m = random_matrix(random.Random(3), 10)
    text = newick_serialize(ward_linkage(m), precision=None)
    lengths = [float(tok.split(")")[0].split(",")[0]) for tok in text.split(":")[1:]]
    assert all(x >= 0 for x in lengths)


def _leaf(label):
    return Node(label=label)


def test_canonical_form_examples():
    ab_c = Dendrogram(Node(children=(Node(children=(_leaf("A"), _leaf("B")), height=1), _leaf("C")), height=2))
    c_ba = Dendrogram(Node(children=(_leaf("C"), Node(children=(_leaf("B"), _leaf("A")), height=1)), height=2))
    ac_b = Dendrogram(Node(children=(Node(children=(_leaf("A"), _leaf("C")), height=1), _leaf("B")), height=2))
    assert canonical_form(ab_c) == canonical_form(c_ba) == "((A,B),C)"
    assert canonical_form(ab_c) != canonical_form(ac_b)


@settings(max_examples=30)
@given(st.randoms(use_true_random=False))
def test_canonical_form_invariant_under_child_permutation(rnd):
    m = random_matrix(random.Random(rnd.randint(0, 999)), 7)
    tree = ward_linkage(m)

    def shuffle(node):
        if node.is_leaf:
            return Node(label=node.label)
        kids = [shuffle(c) for c in node.children]
        rnd.shuffle(kids)
        return Node(children=tuple(kids), height=node.height)

    assert canonical_form(shuffle(tree.root)) == canonical_form(tree)


def test_quoted_labels_round_trip():
    assert quote_label("plain_1") == "plain_1"
    assert quote_label("has space") == "'has space'"
    assert quote_label("it's") == "'it''s'"
    m = matrix(["a b", "it's", "c:d"], [[0, 1, 3], [1, 0, 3], [3, 3, 0]])
    tree = ward_linkage(m)
    back = parse_newick(newick_serialize(tree))
    assert sorted(back.labels) == sorted(["a b", "it's", "c:d"])
    assert canonical_form(back) == canonical_form(tree)


@pytest.mark.parametrize("text", ["(A,B)", "(A,B;", "(A:x,B);", "(A,A);", "(A,B);junk", "('A,B);"])
def test_newick_reader_rejects_malformed(text):
    with pytest.raises(MalformedNewick):
        parse_newick(text)


def test_alpha_grid():
    assert alpha_grid("0.25") == [0, F(1, 4), F(1, 2)]
    grid = alpha_grid("0.01")
    assert len(grid) == 51 and grid[0] == 0 and grid[-1] == F(1, 2)
    with pytest.raises(DomainError):
        alpha_grid(0)


def test_alpha_sweep_constant_matrix_single_interval():
    # every pair: A sets of equal size, so Z does not depend on alpha
    seqs = [("a", "abc"), ("b", "bcd"), ("c", "xyz")]
    intervals = alpha_sweep(seqs, 2, alpha_grid("0.1"))
    assert len(intervals) == 1
    assert (intervals[0].alpha_lo, intervals[0].alpha_hi) == (0, F(1, 2))


def test_alpha_sweep_single_point():
    intervals = alpha_sweep([("a", "abcd"), ("b", "abc")], 2, [F(1, 5)])
    assert len(intervals) == 1 and intervals[0].alpha_lo == intervals[0].alpha_hi == F(1, 5)


def test_alpha_sweep_parallel_matches_serial():
    rng = random.Random(11)
    seqs = [(f"s{i}", "".join(rng.choice("ACDE") for _ in range(rng.randint(8, 30)))) for i in range(7)]
    grid = alpha_grid("0.05")
    assert alpha_sweep(seqs, 2, grid) == alpha_sweep(seqs, 2, grid, workers=2)


def test_alpha_sweep_matches_direct_pipeline():
    rng = random.Random(5)
    seqs = [(f"s{i}", "".join(rng.choice("ACDE") for _ in range(rng.randint(8, 30)))) for i in range(6)]
    grid = alpha_grid("0.1")
    intervals = alpha_sweep(seqs, 2, grid)
    for iv in intervals:
        for a in (iv.alpha_lo, iv.alpha_hi):
            tree = ward_linkage(distance_matrix(seqs, MeasureSpec(Family.ZKGRAM, alpha=a)))
            assert canonical_form(tree) == iv.topology
