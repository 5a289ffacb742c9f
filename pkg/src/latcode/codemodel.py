"""Linear codes as point multisets in PG(k-1, q).

A k-dimensional code of length n corresponds to the multiset of points
spanned by the columns of a generator matrix; the weight of the codeword
class attached to a hyperplane H is n minus the multiset's multiplicity
on H.  All statistics below (weight distribution, divisibility,
projectivity, residual codes) are computed from that correspondence.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, NotSpanning, RankDeficient, ZeroColumn
from .geometry import Geometry, geometry_make
from .gf import field_make, mat_inv, mat_rank, mat_vec


@dataclass(frozen=True)
class PointMultiset:
    """Multiplicity vector over the points of PG(k-1, q)."""

    k: int
    q: int
    mult: tuple

    def __post_init__(self):
        geom = geometry_make(self.k, self.q)
        if len(self.mult) != geom.n_points:
            raise ValueError("multiplicity vector has wrong length")
        if any(m < 0 for m in self.mult):
            raise ValueError("negative multiplicity")

    @property
    def n(self) -> int:
        return sum(self.mult)

    @property
    def geometry(self) -> Geometry:
        return geometry_make(self.k, self.q)

    def spans(self) -> bool:
        if self.k == 1:
            return self.mult[0] > 0
        f = field_make(self.q)
        rows = [self.geometry.points[i]
                for i, m in enumerate(self.mult) if m > 0]
        return bool(rows) and mat_rank(f, rows) == self.k

    def hyperplane_sums(self):
        """Vector of multiset multiplicities M(H) per hyperplane."""
        geom = self.geometry
        m = np.asarray(self.mult, dtype=np.int64)
        return geom.incidence @ m

    def min_positive(self) -> int:
        vals = [m for m in self.mult if m > 0]
        return min(vals) if vals else 0


@dataclass(frozen=True)
class WeightDistribution:
    """Codeword counts A_w per nonzero weight w."""

    counts: tuple  # sorted tuple of (weight, count)

    @property
    def weights(self):
        return tuple(w for w, _ in self.counts)

    def as_dict(self):
        return dict(self.counts)

    def tokens(self) -> str:
        return ",".join(f"{w}^{a}" for w, a in self.counts)

    def __str__(self):
        return " ".join(f"{w}^{a}" for w, a in self.counts)


def multiset_from_generator(matrix, q: int) -> PointMultiset:
    """Columns of a full-rank k x n matrix, read as projective points."""
    f = field_make(q)
    k = len(matrix)
    n = len(matrix[0])
    if any(len(row) != n for row in matrix):
        raise ValueError("ragged generator matrix")
    if mat_rank(f, matrix) != k:
        raise RankDeficient(f"matrix rank is below {k}")
    geom = geometry_make(k, q)
    mult = [0] * geom.n_points
    for j in range(n):
        col = tuple(matrix[i][j] for i in range(k))
        if not any(col):
            raise ZeroColumn(f"column {j} is zero")
        mult[geom.point_index[geom.normalize(col)]] += 1
    return PointMultiset(k=k, q=q, mult=tuple(mult))


def generator_from_multiset(M: PointMultiset):
    """Systematic generator matrix (I_k | R) of a code isomorphic to M's.

    A basis of support points is chosen greedily by ascending point index
    and moved onto the unit vectors; remaining columns follow in ascending
    (transformed) point order, so the result is deterministic.
    """
    if not M.spans():
        raise NotSpanning("multiset support lies in a hyperplane")
    f = field_make(M.q)
    geom = M.geometry
    k = M.k
    basis = []
    basis_idx = []
    for i, m in enumerate(M.mult):
        if m == 0:
            continue
        cand = basis + [geom.points[i]]
        if mat_rank(f, cand) == len(cand):
            basis = cand
            basis_idx.append(i)
            if len(basis) == k:
                break
    # change of basis sending chosen points to unit vectors
    transform = mat_inv(f, [list(row) for row in zip(*basis)])
    remaining = list(M.mult)
    for i in basis_idx:
        remaining[i] -= 1
    cols = [tuple(1 if r == j else 0 for r in range(k)) for j in range(k)]
    tail = []
    for i, m in enumerate(remaining):
        if m == 0:
            continue
        vec = geom.normalize(mat_vec(f, transform, geom.points[i]))
        tail.extend([vec] * m)
    tail.sort()
    cols.extend(tail)
    return [[col[r] for col in cols] for r in range(k)]


def weight_distribution(M: PointMultiset) -> WeightDistribution:
    """Weights of all nonzero codewords via the hyperplane sweep."""
    if not M.spans():
        raise NotSpanning("weight distribution needs a spanning multiset")
    n = M.n
    q = M.q
    if M.k == 1:
        return WeightDistribution(counts=((n, q - 1),))
    counter = Counter()
    for s in M.hyperplane_sums():
        counter[n - int(s)] += q - 1
    return WeightDistribution(counts=tuple(sorted(counter.items())))


@dataclass(frozen=True)
class CodeStats:
    length: int
    dimension: int
    max_multiplicity: int
    projective: bool
    divisibility: int
    min_weight: int
    max_weight: int


def code_stats(M: PointMultiset) -> CodeStats:
    wd = weight_distribution(M)
    weights = wd.weights
    return CodeStats(
        length=M.n,
        dimension=M.k,
        max_multiplicity=max(M.mult),
        projective=max(M.mult) <= 1,
        divisibility=math.gcd(*weights) if weights else 0,
        min_weight=min(weights),
        max_weight=max(weights),
    )


def residual(M: PointMultiset, hyperplane: int) -> PointMultiset:
    """Restriction of M to a hyperplane, re-indexed into PG(k-2, q).

    The residual length equals M(H) = n - w for the weight w of the
    hyperplane's codeword class.
    """
    geom = M.geometry
    f = field_make(M.q)
    k = M.k
    if k < 2:
        raise ValueError("residual needs k >= 2")
    h_vec = geom.hyperplanes[hyperplane]
    # deterministic basis of H = { x : h.x = 0 }, echelon order
    basis = []
    for pt in geom.points:
        if f.dot(pt, h_vec) != 0:
            continue
        cand = basis + [pt]
        if mat_rank(f, cand) == len(cand):
            basis.append(pt)
            if len(basis) == k - 1:
                break
    off = next(p for p in geom.points if f.dot(p, h_vec) != 0)
    cols = basis + [off]
    transform = mat_inv(f, [list(row) for row in zip(*cols)])
    sub = geometry_make(k - 1, M.q)
    out = [0] * sub.n_points
    for i, m in enumerate(M.mult):
        if m == 0 or not geom.incident(i, hyperplane):
            continue
        vec = mat_vec(f, transform, geom.points[i])
        out[sub.point_index[sub.normalize(vec[:-1])]] += m
    return PointMultiset(k=k - 1, q=M.q, mult=tuple(out))


def griesmer_bound(q: int, k: int, d: int) -> int:
    """Minimum length of a k-dimensional code with minimum distance d."""
    return sum(-(-d // q ** i) for i in range(k))


# -- generator matrix text format -------------------------------------------
#
# First line: "q k n".  Then k lines of n digits in 0..q-1 (spaces allowed
# between digits and are ignored).

def write_generator(matrix, q: int) -> str:
    k = len(matrix)
    n = len(matrix[0])
    lines = [f"{q} {k} {n}"]
    for row in matrix:
        lines.append("".join(str(x) for x in row))
    return "\n".join(lines) + "\n"


def read_generator(text: str):
    """Parse the generator matrix format; returns (matrix, q)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty generator matrix file", line=1)
    head = lines[0].split()
    if len(head) != 3:
        raise FormatError("expected header 'q k n'", line=1)
    try:
        q, k, n = (int(x) for x in head)
    except ValueError:
        raise FormatError("non-integer header field", line=1) from None
    if len(lines) != k + 1:
        raise FormatError(f"expected {k} matrix rows", line=len(lines))
    matrix = []
    for r, ln in enumerate(lines[1:], start=2):
        digits = ln.replace(" ", "")
        if len(digits) != n:
            raise FormatError(f"expected {n} digits", line=r)
        try:
            row = [int(c) for c in digits]
        except ValueError:
            raise FormatError("non-digit matrix entry", line=r) from None
        if any(x >= q for x in row):
            raise FormatError(f"entry out of range for GF({q})", line=r)
        matrix.append(row)
    return matrix, q
