"""Points, hyperplanes and incidence of the projective space PG(k-1, q).

Points are one-dimensional subspaces of GF(q)^k, represented by the unique
generator whose first nonzero coordinate is 1, and ordered lexicographically
by coordinate tuple.  Hyperplanes are represented by dual points under the
standard bilinear form sum(x_i * y_i); with this convention the incidence
matrix is symmetric and the unit vectors are literal members of the point
list.

The projection chart PG(k,q)/P -> PG(k-1,q): for P = <e_k> (the last unit
vector, i.e. coordinate tuple (0,...,0,1)) a point <(u | lam)> maps to <u>
by dropping the last coordinate.  For a general point P the multiset is
first moved by the change of basis that sends <e_k> to P (identity columns
except that the last column is P's generator).
"""

from __future__ import annotations

import functools
import itertools

import numpy as np

from .errors import TooLarge
from .gf import field_make, mat_inv, mat_vec

MAX_POINTS = 10 ** 6


def num_points(k: int, q: int) -> int:
    """Number of points of PG(k-1, q)."""
    return (q ** k - 1) // (q - 1)


class Geometry:
    """Indexed points/hyperplanes of PG(k-1, q) with incidence structure."""

    def __init__(self, k, q):
        if k < 1:
            raise ValueError("dimension k must be >= 1")
        n_pts = num_points(k, q)
        if n_pts > MAX_POINTS:
            raise TooLarge(f"PG({k - 1},{q}) has {n_pts} points")
        self.k = k
        self.q = q
        self.field = field_make(q)
        self.points = self._enumerate_points()
        assert len(self.points) == n_pts
        self.point_index = {pt: i for i, pt in enumerate(self.points)}
        self.n_points = n_pts
        # hyperplane i is the dual of point i
        self.hyperplanes = self.points
        self._build_incidence()

    def _enumerate_points(self):
        f = self.field
        pts = []
        for vec in itertools.product(range(self.q), repeat=self.k):
            nz = next((i for i, c in enumerate(vec) if c), None)
            if nz is None or vec[nz] != 1:
                continue
            pts.append(vec)
        pts.sort()
        return pts

    def _build_incidence(self):
        f = self.field
        n = self.n_points
        inc = np.zeros((n, n), dtype=bool)
        for hi, h in enumerate(self.hyperplanes):
            row = [f.dot(p, h) == 0 for p in self.points]
            inc[hi] = row
        # incidence[h][p] == incidence[p][h] by symmetry of the form
        self.incidence = inc
        self.hyperplane_points = [tuple(np.nonzero(inc[hi])[0])
                                  for hi in range(n)]
        self.point_hyperplanes = [tuple(np.nonzero(inc[:, pi])[0])
                                  for pi in range(n)]

    def incident(self, point: int, hyperplane: int) -> bool:
        return bool(self.incidence[hyperplane, point])

    def normalize(self, vec):
        """Projective representative with first nonzero coordinate 1."""
        f = self.field
        nz = next((i for i, c in enumerate(vec) if c), None)
        if nz is None:
            raise ValueError("zero vector has no projective class")
        if vec[nz] == 1:
            return tuple(vec)
        inv = f.inv(vec[nz])
        return tuple(f.mul(inv, c) for c in vec)

    @functools.cached_property
    def lines_by_point(self):
        """For each point P, the partition of points - {P} into lines."""
        f = self.field
        out = []
        for pi, p in enumerate(self.points):
            seen = set()
            cells = []
            for qi, pt in enumerate(self.points):
                if qi == pi or qi in seen:
                    continue
                cell = []
                for a, b in itertools.product(range(self.q), repeat=2):
                    if b == 0 and a == 0:
                        continue
                    vec = tuple(f.add(f.mul(a, x), f.mul(b, y))
                                for x, y in zip(p, pt))
                    if any(vec):
                        idx = self.point_index[self.normalize(vec)]
                        if idx != pi:
                            cell.append(idx)
                cell = tuple(sorted(set(cell)))
                cells.append(cell)
                seen.update(cell)
            out.append(tuple(cells))
        return tuple(out)

    @functools.cached_property
    def all_lines(self):
        """All lines as sorted point-index tuples (k >= 3)."""
        f = self.field
        seen = set()
        out = []
        for pi in range(self.n_points):
            p = self.points[pi]
            for qi in range(pi + 1, self.n_points):
                pt = self.points[qi]
                cell = {pi, qi}
                for a in range(1, self.q):
                    vec = tuple(f.add(x, f.mul(a, y))
                                for x, y in zip(p, pt))
                    cell.add(self.point_index[self.normalize(vec)])
                key = tuple(sorted(cell))
                if key not in seen:
                    seen.add(key)
                    out.append(key)
        return tuple(out)

    def unit_point_indices(self):
        """Indices of <e_1>, ..., <e_k>."""
        out = []
        for i in range(self.k):
            vec = tuple(1 if j == i else 0 for j in range(self.k))
            out.append(self.point_index[vec])
        return tuple(out)

    def last_unit_index(self):
        """Index of <e_k>, the canonical projection point."""
        return self.point_index[tuple([0] * (self.k - 1) + [1])]


@functools.lru_cache(maxsize=None)
def geometry_make(k: int, q: int) -> Geometry:
    """Shared, immutable geometry of PG(k-1, q); results are cached."""
    field_make(q)  # raises NotPrimePower early
    return Geometry(k, q)


def incident(g: Geometry, point: int, hyperplane: int) -> bool:
    return g.incident(point, hyperplane)


def project_multiset(g: Geometry, mult, point: int):
    """Project a multiplicity vector on PG(k-1,q) through one of its points.

    Returns the multiplicity vector of the image multiset on PG(k-2,q).
    The image cardinality is sum(mult) - mult[point].
    """
    k, q = g.k, g.q
    if k < 2:
        raise ValueError("cannot project PG(0, q)")
    sub = geometry_make(k - 1, q)
    f = g.field
    last = g.last_unit_index()
    if point == last:
        transform = None
    else:
        # basis sending <e_k> to the chosen point: identity columns with the
        # last column replaced by the point's generator, pivot column dropped
        p_vec = g.points[point]
        pivot = next(i for i, c in enumerate(p_vec) if c)
        cols = [tuple(1 if r == j else 0 for r in range(k))
                for j in range(k) if j != pivot]
        cols.append(p_vec)
        basis = [tuple(col[r] for col in cols) for r in range(k)]
        transform = mat_inv(f, basis)
    out = [0] * sub.n_points
    for qi, m in enumerate(mult):
        if m == 0 or qi == point:
            continue
        vec = g.points[qi]
        if transform is not None:
            vec = mat_vec(f, transform, vec)
        head = vec[:-1]
        if not any(head):
            raise ValueError("point maps to the projection centre")
        out[sub.point_index[sub.normalize(head)]] += m
    return tuple(out)
