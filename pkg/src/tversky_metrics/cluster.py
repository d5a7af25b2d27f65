"""Distance matrices, Ward agglomerative clustering, Newick trees and the
alpha sweep over Z_{k,alpha} tree topologies."""
from __future__ import annotations

import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .errors import DomainError, DuplicateLabel, MalformedNewick, MatrixInvalid
from .lz78 import lzjd
from .measures import Family, MeasureSpec, RationalLike, as_rational, pair_stats
from .seqdist import kgram_profile, levenshtein, z_distance

Labeled = Union[Dict[str, str], Sequence[Tuple[str, str]]]


@dataclass(frozen=True)
class SequenceMeasure:
    """Adapts a MeasureSpec to pairs of sequences.

    Set families are applied to the k-gram profiles of the two sequences.
    """

    spec: MeasureSpec

    def __call__(self, a, b):
        f = self.spec.family
        if f is Family.LZJD:
            return lzjd(a, b)
        if f is Family.ZKGRAM:
            return z_distance(self.spec.alpha, self.spec.k, a, b, normalize=self.spec.normalize)
        if f is Family.EDIT:
            return levenshtein(a, b)
        return self.spec(kgram_profile(a, self.spec.k), kgram_profile(b, self.spec.k))


@dataclass(frozen=True)
class DistanceMatrix:
    labels: Tuple[str, ...]
    values: Tuple[Tuple, ...]

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise DuplicateLabel("distance matrix labels must be distinct")
        if len(self.values) != n or any(len(row) != n for row in self.values):
            raise MatrixInvalid(f"matrix shape does not match {n} labels")
        for i in range(n):
            if self.values[i][i] != 0:
                raise MatrixInvalid(f"nonzero diagonal at {self.labels[i]!r}")
            for j in range(n):
                v = self.values[i][j]
                if v < 0:
                    raise MatrixInvalid(f"negative entry at ({self.labels[i]}, {self.labels[j]})")
                if v != self.values[j][i]:
                    raise MatrixInvalid(f"asymmetric entry at ({self.labels[i]}, {self.labels[j]})")

    def __len__(self) -> int:
        return len(self.labels)

    def __getitem__(self, key):
        i, j = key
        return self.values[i][j]

    def to_csv(self, precision: int = 6) -> str:
        """Header row ``label,<labels…>`` then one row per label."""
        lines = [",".join(["label", *map(_csv_field, self.labels)])]
        for label, row in zip(self.labels, self.values):
            cells = [f"{float(v):.{precision}f}" for v in row]
            lines.append(",".join([_csv_field(label), *cells]))
        return "\n".join(lines) + "\n"


def _csv_field(text: str) -> str:
    if any(c in text for c in ',"\n'):
        return '"' + text.replace('"', '""') + '"'
    return text


def _as_pairs(sequences: Labeled) -> List[Tuple[str, str]]:
    pairs = list(sequences.items()) if isinstance(sequences, dict) else list(sequences)
    labels = [label for label, _ in pairs]
    if len(set(labels)) != len(labels):
        dupes = sorted({l for l in labels if labels.count(l) > 1})
        raise DuplicateLabel(f"duplicate sequence label(s): {', '.join(dupes)}")
    return pairs


def _pair_row(args):
    measure, seqs, i = args
    return [measure(seqs[i], seqs[j]) for j in range(i + 1, len(seqs))]


def distance_matrix(
    sequences: Labeled, measure: Union[MeasureSpec, Callable], workers: int = 1
) -> DistanceMatrix:
    """Pairwise distances of labeled sequences; only the upper triangle is evaluated."""
    pairs = _as_pairs(sequences)
    if len(pairs) < 2:
        raise DomainError("a distance matrix needs at least 2 sequences")
    if isinstance(measure, MeasureSpec):
        measure = SequenceMeasure(measure)
    labels = tuple(label for label, _ in pairs)
    seqs = [seq for _, seq in pairs]
    n = len(seqs)
    jobs = [(measure, seqs, i) for i in range(n)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            upper = list(pool.map(_pair_row, jobs))
    else:
        upper = [_pair_row(job) for job in jobs]
    grid = [[0] * n for _ in range(n)]
    for i, row in enumerate(upper):
        for offset, v in enumerate(row):
            j = i + 1 + offset
            grid[i][j] = grid[j][i] = v
    return DistanceMatrix(labels, tuple(tuple(row) for row in grid))


@dataclass
class Node:
    label: Optional[str] = None
    children: Tuple["Node", ...] = ()
    height: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def leaves(self) -> List[str]:
        if self.is_leaf:
            return [self.label]
        return [leaf for child in self.children for leaf in child.leaves()]


@dataclass
class Dendrogram:
    root: Node
    # (first-cluster leaves, second-cluster leaves, height) in merge order
    merges: List[Tuple[Tuple[str, ...], Tuple[str, ...], float]] = field(default_factory=list)

    @property
    def labels(self) -> List[str]:
        return self.root.leaves()

    @property
    def heights(self) -> List[float]:
        return [h for _, _, h in self.merges]

    @property
    def inversions(self) -> List[int]:
        """Indices of merges lower than the merge before them."""
        hs = self.heights
        return [i for i in range(1, len(hs)) if hs[i] < hs[i - 1]]

    def canonical_form(self) -> str:
        return canonical_form(self)

    def to_newick(self, precision: Optional[int] = 6) -> str:
        return newick_serialize(self, precision)


def _ward_update(n_i, n_j, n_k, d_ki, d_kj, d_ij):
    return ((n_i + n_k) * d_ki + (n_j + n_k) * d_kj - n_k * d_ij) / (n_i + n_j + n_k)


_LANCE_WILLIAMS = {"ward": _ward_update}


def _sqrt(value) -> float:
    if isinstance(value, Fraction):
        rn, rd = math.isqrt(value.numerator), math.isqrt(value.denominator)
        if rn * rn == value.numerator and rd * rd == value.denominator:
            return rn / rd
    return math.sqrt(value)


def ward_linkage(matrix: DistanceMatrix, linkage: str = "ward") -> Dendrogram:
    """Agglomerative clustering with the Lance-Williams Ward recurrence on
    squared dissimilarities; merge heights are square roots of merge values
    (the "ward.D2" convention).

    Active clusters keep their row order; a merge of rows i < j stores the new
    cluster in row i and drops row j.  Ties go to the smallest (i, j).
    Rational inputs stay rational until the final square root.
    """
    matrix.validate()
    n = len(matrix)
    if n < 2:
        raise MatrixInvalid("clustering needs at least 2 points")
    update = _LANCE_WILLIAMS[linkage]
    nodes = [Node(label=label) for label in matrix.labels]
    sizes = [1] * n
    D = [[v * v for v in row] for row in matrix.values]
    merges = []
    while len(nodes) > 1:
        best = None
        for i in range(len(nodes)):
            row = D[i]
            for j in range(i + 1, len(nodes)):
                if best is None or row[j] < best[0]:
                    best = (row[j], i, j)
        value, i, j = best
        height = _sqrt(value)
        merged = Node(children=(nodes[i], nodes[j]), height=height)
        merges.append((tuple(nodes[i].leaves()), tuple(nodes[j].leaves()), height))
        n_i, n_j = sizes[i], sizes[j]
        for k in range(len(nodes)):
            if k in (i, j):
                continue
            v = update(n_i, n_j, sizes[k], D[k][i], D[k][j], D[i][j])
            D[i][k] = D[k][i] = v
        nodes[i], sizes[i] = merged, n_i + n_j
        del nodes[j], sizes[j], D[j]
        for row in D:
            del row[j]
    return Dendrogram(nodes[0], merges)


_PLAIN_LABEL = re.compile(r"^[A-Za-z0-9_.\-|/+*#@!%&=?~]+$")


def quote_label(label: str) -> str:
    if _PLAIN_LABEL.match(label):
        return label
    return "'" + label.replace("'", "''") + "'"


def _canonical(node: Node) -> str:
    if node.is_leaf:
        return quote_label(node.label)
    return "(" + ",".join(sorted(_canonical(c) for c in node.children)) + ")"


def canonical_form(tree: Union[Dendrogram, Node]) -> str:
    """Leaf-labelled topology with children sorted; heights are ignored."""
    root = tree.root if isinstance(tree, Dendrogram) else tree
    return _canonical(root)


def _format_length(x: float, precision: Optional[int]) -> str:
    if precision is None:
        return repr(float(x))
    return f"{x:.{precision}f}"


def newick_serialize(tree: Dendrogram, precision: Optional[int] = 6) -> str:
    """Ultrametric Newick: each node sits at depth height/2 above its leaves.

    ``precision=None`` writes branch lengths with full float precision.
    """

    def render(node: Node, parent_height: Optional[float]) -> str:
        if node.is_leaf:
            text = quote_label(node.label)
        else:
            ordered = sorted(node.children, key=_canonical)
            text = "(" + ",".join(render(c, node.height) for c in ordered) + ")"
        if parent_height is not None:
            text += ":" + _format_length((parent_height - node.height) / 2, precision)
        return text

    return render(tree.root, None) + ";"


class _NewickReader:
    def __init__(self, text: str):
        self.text = text.strip()
        self.pos = 0

    def error(self, message: str) -> MalformedNewick:
        return MalformedNewick(f"{message} at offset {self.pos}")

    def peek(self) -> str:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def label(self) -> Optional[str]:
        if self.peek() == "'":
            out = []
            self.pos += 1
            while True:
                if self.pos >= len(self.text):
                    raise self.error("unterminated quoted label")
                c = self.text[self.pos]
                if c == "'":
                    if self.text[self.pos + 1 : self.pos + 2] == "'":
                        out.append("'")
                        self.pos += 2
                        continue
                    self.pos += 1
                    return "".join(out)
                out.append(c)
                self.pos += 1
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in "(),:;[] \t\n'":
            self.pos += 1
        return self.text[start : self.pos] or None

    def length(self) -> Optional[float]:
        if self.peek() != ":":
            return None
        self.pos += 1
        self.peek()
        match = re.compile(r"[-+]?[0-9.]+(?:[eE][-+]?[0-9]+)?").match(self.text, self.pos)
        if not match:
            raise self.error("expected a branch length")
        self.pos = match.end()
        return float(match.group())

    def subtree(self):
        """Returns (node, depth above leaves, branch length to parent)."""
        if self.peek() == "(":
            self.pos += 1
            parts = [self.subtree()]
            while self.peek() == ",":
                self.pos += 1
                parts.append(self.subtree())
            if self.peek() != ")":
                raise self.error("expected ')'")
            self.pos += 1
            self.label()  # internal labels are ignored
            node_depth = parts[0][1] + (parts[0][2] or 0.0)
            node = Node(children=tuple(p[0] for p in parts), height=2 * node_depth)
            return node, node_depth, self.length()
        name = self.label()
        if name is None:
            raise self.error("expected a leaf label")
        return Node(label=name), 0.0, self.length()

    def parse(self) -> Node:
        node, _, _ = self.subtree()
        if self.peek() != ";":
            raise self.error("expected ';'")
        self.pos += 1
        if self.peek():
            raise self.error("trailing text")
        return node


def parse_newick(text: str) -> Dendrogram:
    """Read a tree written by :func:`newick_serialize`; heights are twice the
    depth of each node above its leftmost leaf."""
    root = _NewickReader(text).parse()
    labels = root.leaves()
    if len(set(labels)) != len(labels):
        raise MalformedNewick("duplicate leaf labels")
    return Dendrogram(root)


@dataclass(frozen=True)
class SweepInterval:
    alpha_lo: Fraction
    alpha_hi: Fraction
    topology: str
    newick: str


def alpha_grid(step: RationalLike, lo: RationalLike = 0, hi: RationalLike = Fraction(1, 2)) -> List[Fraction]:
    """Exact points lo, lo+step, … up to and including hi when it lands on the grid."""
    step, lo, hi = as_rational(step), as_rational(lo), as_rational(hi)
    if step <= 0 or hi < lo:
        raise DomainError("alpha grid needs step > 0 and lo <= hi")
    count = math.floor((hi - lo) / step)
    return [lo + i * step for i in range(count + 1)]


def _tree_at_alpha(args) -> Tuple[str, str]:
    alpha, labels, stats, normalize, precision = args
    n = len(labels)
    grid = [[Fraction(0)] * n for _ in range(n)]
    for (i, j), (m, M, union) in stats.items():
        v = alpha * m + (1 - alpha) * M
        if normalize:
            v = v / union if union else Fraction(0)
        grid[i][j] = grid[j][i] = v
    tree = ward_linkage(DistanceMatrix(labels, tuple(map(tuple, grid))))
    return canonical_form(tree), newick_serialize(tree, precision)


def alpha_sweep(
    sequences: Labeled,
    k: int,
    alphas: Iterable[RationalLike],
    normalize: bool = False,
    workers: int = 1,
    precision: Optional[int] = 6,
) -> List[SweepInterval]:
    """Cluster under Z_{k,alpha} for each alpha and coalesce runs of equal topology.

    The intervals partition the alpha grid: consecutive intervals meet at
    neighbouring grid points, and the first and last grid points are covered.
    """
    pairs = _as_pairs(sequences)
    if len(pairs) < 2:
        raise DomainError("an alpha sweep needs at least 2 sequences")
    alphas = [as_rational(a) for a in alphas]
    if not alphas:
        raise DomainError("empty alpha grid")
    labels = tuple(label for label, _ in pairs)
    profiles = [kgram_profile(seq, k) for _, seq in pairs]
    stats = {}
    for i in range(len(profiles)):
        for j in range(i + 1, len(profiles)):
            s = pair_stats(profiles[i], profiles[j])
            stats[i, j] = (s.m, s.M, s.union)
    jobs = [(a, labels, stats, normalize, precision) for a in alphas]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            trees = list(pool.map(_tree_at_alpha, jobs))
    else:
        trees = [_tree_at_alpha(job) for job in jobs]
    intervals: List[SweepInterval] = []
    for alpha, (topology, newick) in zip(alphas, trees):
        if intervals and intervals[-1].topology == topology:
            last = intervals[-1]
            intervals[-1] = SweepInterval(last.alpha_lo, alpha, topology, last.newick)
        else:
            intervals.append(SweepInterval(alpha, alpha, topology, newick))
    return intervals
