"""Independent reference implementations used only by the tests.

None of these import the package; they recompute from definitions by plain
enumeration so they can check the optimized code paths.
"""
from fractions import Fraction
from itertools import product


def enum_counts(X, Y):
    """(|X∩Y|, |X\\Y|, |Y\\X|) by walking every element of X ∪ Y."""
    cap = xy = yx = 0
    for e in list(X) + [e for e in Y if e not in X]:
        in_x, in_y = e in X, e in Y
        if in_x and in_y:
            cap += 1
        elif in_x:
            xy += 1
        else:
            yx += 1
    return cap, xy, yx


def enum_regions(X, Y, Z):
    regions = {}
    for e in set(X) | set(Y) | set(Z):
        key = "".join("1" if e in S else "0" for S in (X, Y, Z))
        regions[key] = regions.get(key, 0) + 1
    return regions


def jaccard_by_definition(X, Y):
    union = set(X) | set(Y)
    if not union:
        return Fraction(0)
    return 1 - Fraction(len(set(X) & set(Y)), len(union))


def nid_by_definition(X, Y):
    if not X and not Y:
        return Fraction(0)
    return Fraction(max(len(set(X) - set(Y)), len(set(Y) - set(X))), max(len(X), len(Y)))


def dice_by_definition(X, Y):
    return Fraction(2 * len(set(X) & set(Y)), len(X) + len(Y))


def lz78_trie(data: bytes):
    """LZ78 phrases via an explicit trie walk (node = dict of children)."""
    root = {}
    phrases = []
    node, current = root, b""
    for byte in data:
        if byte in node:
            node, current = node[byte], current + bytes([byte])
        else:
            node[byte] = {}
            phrases.append(current + bytes([byte]))
            node, current = root, b""
    if current:
        phrases.append(current)
    return set(phrases)


def levenshtein_full(a, b):
    """Textbook (len(a)+1) x (len(b)+1) table."""
    rows, cols = len(a) + 1, len(b) + 1
    table = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        table[i][0] = i
    for j in range(cols):
        table[0][j] = j
    for i in range(1, rows):
        for j in range(1, cols):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            table[i][j] = min(table[i - 1][j] + 1, table[i][j - 1] + 1, table[i - 1][j - 1] + cost)
    return table[-1][-1]


def all_subsets(n):
    return [frozenset(i for i in range(n) if mask >> i & 1) for mask in range(1 << n)]


def first_violation_loops(points, d):
    """Plain triple loop in index order; exact comparisons on whatever d returns."""
    table = {(i, j): d(a, b) for i, a in enumerate(points) for j, b in enumerate(points)}
    r = range(len(points))
    for x, y, z in product(r, r, r):
        if table[x, y] > table[x, z] + table[z, y]:
            return points[x], points[y], points[z]
    return None


def binary_strings(max_len, alphabet="ab"):
    out = [""]
    for length in range(1, max_len + 1):
        out += ["".join(t) for t in product(alphabet, repeat=length)]
    return out
