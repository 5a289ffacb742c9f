"""Isomorph rejection for point multisets in PG(k-1, q).

Two multisets are equivalent when a collineation maps one onto the other.
For k >= 3 the collineation group of PG(k-1,q) is exactly the semilinear
projective group, so stabilizers and canonical forms are computed on the
point/hyperplane incidence structure, colored by point multiplicities and
hyperplane multiplicities, with an individualization-refinement search in
the style of nauty: iterated invariant refinement, a first search path
kept as the automorphism anchor, a best path kept as the canonical
candidate, discovered automorphisms pruning sibling branches, and the
stabilizer order recovered from the collected generators by Schreier-Sims.
For k <= 2 the induced permutation group is enumerated explicitly.

Linear (projective-linear only) equivalence is derived from the
semilinear result: each generator's field-automorphism component is
identified by testing whether it agrees with a projectivity on a frame,
which yields the index of the linear stabilizer; linear canonical
certificates for non-prime fields fall back to explicit orbits.
"""

from __future__ import annotations

import functools
import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .codemodel import PointMultiset
from .errors import GroupTooLarge, NotSpanning
from .geometry import geometry_make
from .gf import field_make, mat_inv, mat_vec

LINEAR = "linear"
SEMILINEAR = "semilinear"
ORACLE_GROUP_CAP = 10 ** 7

_M1 = np.uint64(0x9E3779B97F4A7C15)
_M2 = np.uint64(0xBF58476D1CE4E5B9)
_M3 = np.uint64(0x94D049BB133111EB)


def _mix(x):
    """splitmix64 finalizer; invariant hash of integer color values."""
    with np.errstate(over="ignore"):
        x = x + _M1
        x ^= x >> np.uint64(30)
        x *= _M2
        x ^= x >> np.uint64(27)
        x *= _M3
        return x ^ (x >> np.uint64(31))


def _fold(values):
    acc = np.uint64(0x12345678DEADBEEF)
    for v in values:
        acc = _mix(acc ^ np.uint64(v & 0xFFFFFFFFFFFFFFFF))
    return int(acc)


def _rank_keys(primary, secondary):
    """Color ids 0..c-1 in lexicographic key order; order is invariant."""
    order = np.lexsort((secondary, primary))
    sp = primary[order]
    ss = secondary[order]
    boundary = np.empty(len(order), dtype=bool)
    boundary[0] = True
    boundary[1:] = (sp[1:] != sp[:-1]) | (ss[1:] != ss[:-1])
    ranks_sorted = np.cumsum(boundary) - 1
    ranks = np.empty(len(order), dtype=np.int64)
    ranks[order] = ranks_sorted
    return ranks


# -- permutation group order (Schreier-Sims) ---------------------------------

def _perm_mul(a, b):
    """(a * b)[i] = a[b[i]]: apply b first, then a."""
    return tuple(a[x] for x in b)


def _perm_inv(a):
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


class PermGroupOrder:
    """Deterministic Schreier-Sims; processes levels bottom-up."""

    def __init__(self, n, gens):
        self.n = n
        self.identity = tuple(range(n))
        self.base = []
        self.strong = []
        for g in gens:
            g = tuple(g)
            if g != self.identity and g not in self.strong:
                self.strong.append(g)
                self._ensure_base(g)
        self._run()

    def _ensure_base(self, g):
        if all(g[b] == b for b in self.base):
            self.base.append(next(i for i in range(self.n) if g[i] != i))

    def _level_gens(self, i):
        pre = self.base[:i]
        return [g for g in self.strong if all(g[b] == b for b in pre)]

    def _transversal(self, i, gens):
        b = self.base[i]
        trans = {b: self.identity}
        frontier = [b]
        while frontier:
            pt = frontier.pop()
            rep = trans[pt]
            for g in gens:
                img = g[pt]
                if img not in trans:
                    trans[img] = _perm_mul(g, rep)
                    frontier.append(img)
        return trans

    def _sift(self, g, transversals, start):
        for i in range(start, len(self.base)):
            if i >= len(transversals) or transversals[i] is None:
                return g, i
            rep = transversals[i].get(g[self.base[i]])
            if rep is None:
                return g, i
            g = _perm_mul(_perm_inv(rep), g)
        return g, len(self.base)

    def _run(self):
        transversals = [None] * len(self.base)
        i = len(self.base) - 1
        while i >= 0:
            gens_i = self._level_gens(i)
            trans = self._transversal(i, gens_i)
            transversals[i] = trans
            new_gen = None
            for pt in sorted(trans):
                u = trans[pt]
                for s in gens_i:
                    rep = trans[s[pt]]
                    sg = _perm_mul(_perm_inv(rep), _perm_mul(s, u))
                    if sg == self.identity:
                        continue
                    h, lev = self._sift(sg, transversals, i + 1)
                    if h != self.identity:
                        new_gen = (h, lev)
                        break
                if new_gen:
                    break
            if new_gen is None:
                i -= 1
                continue
            h, lev = new_gen
            self.strong.append(h)
            self._ensure_base(h)
            while len(transversals) < len(self.base):
                transversals.append(None)
            for j in range(min(lev, len(self.base) - 1), i, -1):
                transversals[j] = None
            i = min(lev, len(self.base) - 1)
        self.transversals = transversals

    def order(self):
        out = 1
        for t in self.transversals:
            out *= len(t)
        return out


def group_order_from_generators(gens, n):
    gens = [tuple(g) for g in gens]
    gens = [g for g in gens if any(g[i] != i for i in range(n))]
    if not gens:
        return 1
    return PermGroupOrder(n, gens).order()


# -- explicit projective groups ----------------------------------------------

def pgl_order(k, q):
    out = 1
    for i in range(k):
        out *= q ** k - q ** i
    return out // (q - 1)


def _primitive_element(f):
    for a in range(2, f.q):
        x, order = a, 1
        while x != 1:
            x = f.mul(x, a)
            order += 1
        if order == f.q - 1:
            return a
    return 1


def _gl_generator_matrices(k, q):
    f = field_make(q)
    gens = []
    if q > 2:
        m = [[1 if i == j else 0 for j in range(k)] for i in range(k)]
        m[0][0] = _primitive_element(f)
        gens.append(m)
    if k >= 2:
        m = [[1 if i == j else 0 for j in range(k)] for i in range(k)]
        m[0][1] = 1
        gens.append(m)
        m = [[0] * k for _ in range(k)]
        for i in range(k - 1):
            m[i][i + 1] = 1
        m[k - 1][0] = 1
        gens.append(m)
    return gens


def _matrix_point_perm(geom, matrix):
    f = geom.field
    perm = np.empty(geom.n_points, dtype=np.int32)
    for i, p in enumerate(geom.points):
        perm[i] = geom.point_index[geom.normalize(mat_vec(f, matrix, p))]
    return perm


def frobenius_point_perm(geom):
    f = geom.field
    perm = np.empty(geom.n_points, dtype=np.int32)
    for i, p in enumerate(geom.points):
        vec = tuple(f.frobenius(c) for c in p)
        perm[i] = geom.point_index[geom.normalize(vec)]
    return perm


@functools.lru_cache(maxsize=None)
def explicit_point_group(k, q, kind=SEMILINEAR, cap=ORACLE_GROUP_CAP):
    """All point permutations of PGL(k,q) (or PGammaL) as an array."""
    f = field_make(q)
    expected = pgl_order(k, q)
    if kind == SEMILINEAR:
        expected *= f.e
    if expected > cap:
        raise GroupTooLarge(f"group order {expected} exceeds cap {cap}")
    geom = geometry_make(k, q)
    gens = [_matrix_point_perm(geom, m) for m in
            _gl_generator_matrices(k, q)]
    if kind == SEMILINEAR and f.e > 1:
        gens.append(frobenius_point_perm(geom))
    if not gens:
        gens = [np.arange(geom.n_points, dtype=np.int32)]
    seen = {tuple(np.arange(geom.n_points))}
    frontier = [np.arange(geom.n_points, dtype=np.int32)]
    out = [frontier[0]]
    while frontier:
        cur = frontier.pop()
        for g in gens:
            nxt = g[cur]
            key = tuple(nxt.tolist())
            if key not in seen:
                seen.add(key)
                frontier.append(nxt)
                out.append(nxt)
    perms = np.array(out, dtype=np.int32)
    assert len(perms) == expected, (len(perms), expected)
    return perms


# -- canonical forms ----------------------------------------------------------

@dataclass(frozen=True)
class CanonicalForm:
    vector: tuple        # multiplicities in canonical label order
    aut_order: int       # stabilizer order in the chosen acting group
    certificate: str     # stable digest; equal iff multisets equivalent
    pgl_aut_order: int
    pgammal_aut_order: int


class _IRCanonizer:
    """Individualization-refinement search on the incidence structure."""

    def __init__(self, geom, mult):
        self.geom = geom
        self.n = geom.n_points
        self.inc = geom.incidence.astype(np.uint64)
        self.mult = np.asarray(mult, dtype=np.int64)
        hsums = geom.incidence @ self.mult
        self.init_p = self.mult.copy()
        self.init_h = hsums.astype(np.int64)
        self.gens = []
        self.first_trace = None
        self.first_leaf = None
        self.best_trace = None
        self.best_leaf = None
        self.best_cert = None
        self.nodes = 0

    def _refine(self, pcol, hcol):
        with np.errstate(over="ignore"):
            while True:
                n_p = int(pcol.max()) + 1
                n_h = int(hcol.max()) + 1
                hsig = self.inc @ _mix(pcol.astype(np.uint64))
                hcol2 = _rank_keys(hcol, hsig)
                psig = self.inc.T @ _mix(hcol2.astype(np.uint64))
                pcol2 = _rank_keys(pcol, psig)
                if int(pcol2.max()) + 1 == n_p and \
                        int(hcol2.max()) + 1 == n_h:
                    return pcol2, hcol2
                pcol, hcol = pcol2, hcol2

    def _trace_hash(self, pcol, hcol, extra):
        pvals, pcounts = np.unique(pcol, return_counts=True)
        hvals, hcounts = np.unique(hcol, return_counts=True)
        data = [extra, len(pvals), len(hvals)]
        data.extend(int(x) for x in pcounts)
        data.extend(int(x) for x in hcounts)
        return _fold(data)

    def _target_cell(self, pcol):
        vals, counts = np.unique(pcol, return_counts=True)
        best = None
        for v, c in zip(vals, counts):
            if c > 1 and (best is None or c < best[0]):
                best = (int(c), int(v))
        if best is None:
            return None
        return np.nonzero(pcol == best[1])[0]

    def _leaf_cert(self, pcol, hcol, trace):
        order = np.argsort(pcol, kind="stable")
        m_canon = tuple(int(x) for x in self.mult[order])
        rows = self.geom.incidence[:, order]
        keys = []
        for h in range(self.n):
            keys.append((int(hcol[h]), rows[h].tobytes()))
        horder = sorted(range(self.n), key=lambda h: keys[h])
        digest = hashlib.sha256()
        for h in horder:
            digest.update(rows[h].tobytes())
        cert = (tuple(trace), m_canon, digest.digest())
        return cert, order

    def _orbit_reps(self, cell, prefix):
        """Partition the cell by orbits of prefix-fixing known generators."""
        gens = [g for g in self.gens
                if all(g[v] == v for v in prefix)]
        if not gens:
            return {v: v for v in cell}
        parent = {v: v for v in cell}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        changed = True
        members = set(cell.tolist())
        while changed:
            changed = False
            for g in gens:
                for v in list(members):
                    w = g[v]
                    if w in members:
                        rv, rw = find(v), find(w)
                        if rv != rw:
                            parent[max(rv, rw)] = min(rv, rw)
                            changed = True
        return {v: find(v) for v in members}

    def run(self):
        pcol = _rank_keys(self.init_p, np.zeros(self.n, dtype=np.int64))
        hcol = _rank_keys(self.init_h, np.zeros(self.n, dtype=np.int64))
        pcol, hcol = self._refine(pcol, hcol)
        root_trace = [self._trace_hash(pcol, hcol, 0)]
        self._node(pcol, hcol, root_trace, ())
        cert, order = self.best_leaf
        return cert, order, self.gens

    def _node(self, pcol, hcol, trace, prefix):
        self.nodes += 1
        cell = self._target_cell(pcol)
        if cell is None:
            cert, order = self._leaf_cert(pcol, hcol, trace)
            self._handle_leaf(cert, order, trace)
            return
        depth = len(trace)
        tried = []
        for v in cell.tolist():
            reps = self._orbit_reps(cell, prefix)
            if any(reps[v] == reps[u] for u in tried):
                continue
            tried.append(v)
            p2 = pcol * 2
            p2[v] -= 1
            p2 = _rank_keys(p2, np.zeros(self.n, dtype=np.int64))
            p2, h2 = self._refine(p2, hcol)
            t = self._trace_hash(p2, h2, depth)
            child_trace = trace + [t]
            if not self._should_descend(child_trace):
                continue
            self._node(p2, h2, child_trace, prefix + (v,))

    def _should_descend(self, child_trace):
        d = len(child_trace)
        on_first = (self.first_trace is None
                    or child_trace == self.first_trace[:d])
        if on_first:
            return True
        if self.best_trace is None:
            return True
        best = self.best_trace[:d]
        return child_trace <= best

    def _handle_leaf(self, cert, order, trace):
        if self.first_trace is None:
            self.first_trace = list(trace)
            self.first_leaf = (cert, order)
            self.best_trace = list(trace)
            self.best_leaf = (cert, order)
            self.best_cert = cert
            return
        for anchor_cert, anchor_order in (self.first_leaf, self.best_leaf):
            if cert == anchor_cert:
                g = self._perm_between(order, anchor_order)
                if any(g[i] != i for i in range(self.n)) \
                        and self._verify_auto(g):
                    self.gens.append(tuple(g))
                break
        if cert < self.best_cert:
            self.best_trace = list(trace)
            self.best_leaf = (cert, order)
            self.best_cert = cert

    def _perm_between(self, order_a, order_b):
        """Collineation mapping leaf a onto leaf b (canonical positions)."""
        g = np.empty(self.n, dtype=np.int64)
        g[order_a] = order_b
        return g.tolist()

    def _verify_auto(self, g):
        garr = np.asarray(g)
        if not np.array_equal(self.mult[garr], self.mult):
            return False
        # point map must extend to an incidence-preserving hyperplane map
        inc = self.geom.incidence
        mapped = inc[:, garr]
        rows = {row.tobytes() for row in inc}
        return all(row.tobytes() in rows for row in mapped)


def _sigma_component(geom, perm):
    """Field-automorphism exponent of a collineation given as point perm."""
    f = geom.field
    e = f.e
    if e == 1:
        return 0
    frob = frobenius_point_perm(geom)
    frob_pows = [np.arange(geom.n_points, dtype=np.int32)]
    for _ in range(e - 1):
        frob_pows.append(frob[frob_pows[-1]])
    perm = np.asarray(perm, dtype=np.int32)
    for j in range(e):
        inv_fp = np.empty(geom.n_points, dtype=np.int32)
        inv_fp[frob_pows[j]] = np.arange(geom.n_points, dtype=np.int32)
        h = perm[inv_fp]
        if _is_projectivity(geom, h):
            return j
    raise AssertionError("permutation is not a collineation")


def _is_projectivity(geom, perm):
    f = geom.field
    k = geom.k
    frame = [tuple(1 if j == i else 0 for j in range(k)) for i in range(k)]
    frame.append(tuple([1] * k))
    imgs = [geom.points[perm[geom.point_index[p]]] for p in frame]
    basis = [list(imgs[i]) for i in range(k)]
    try:
        inv = mat_inv(f, [list(row) for row in zip(*basis)])
    except ValueError:
        return False
    lam = mat_vec(f, inv, imgs[k])
    if any(x == 0 for x in lam):
        return False
    cols = [tuple(f.mul(lam[i], c) for c in imgs[i]) for i in range(k)]
    matrix = [tuple(cols[j][i] for j in range(k)) for i in range(k)]
    for pi, p in enumerate(geom.points):
        if geom.point_index[geom.normalize(mat_vec(f, matrix, p))] \
                != perm[pi]:
            return False
    return True


def _require_spanning(M):
    if not M.spans():
        raise NotSpanning("canonical forms need a spanning multiset")


def _certificate(q, k, kind, payload):
    digest = hashlib.sha256()
    digest.update(f"latcode canon v1 {q} {k} {kind} ".encode())
    digest.update(repr(payload).encode())
    return digest.hexdigest()


@functools.lru_cache(maxsize=4096)
def _analyze_cached(k, q, mult):
    return _analyze(PointMultiset(k=k, q=q, mult=mult))


def _analyze(M):
    """Core computation shared by canonical_form and the aut orders.

    Returns (cert payload, canonical vector, |Stab_PGL|, |Stab_PGammaL|),
    all under the semilinear action.
    """
    geom = M.geometry
    f = field_make(M.q)
    if M.k == 1:
        return (M.mult, M.mult, 1, 1)
    if M.k == 2:
        perms = explicit_point_group(2, M.q, SEMILINEAR)
        m = np.asarray(M.mult, dtype=np.int64)
        images = m[perms]
        best = min(map(tuple, images.tolist()))
        stab_semi = int((images == m[None, :]).all(axis=1).sum())
        if f.e > 1:
            perms_lin = explicit_point_group(2, M.q, LINEAR)
            images_lin = m[perms_lin]
            stab_lin = int((images_lin == m[None, :]).all(axis=1).sum())
        else:
            stab_lin = stab_semi
        return (tuple(best), tuple(best), stab_lin, stab_semi)
    ir = _IRCanonizer(geom, M.mult)
    cert, order, gens = ir.run()
    stab_semi = group_order_from_generators(gens, geom.n_points)
    if f.e == 1:
        stab_lin = stab_semi
    else:
        g = f.e
        for x in {_sigma_component(geom, gen) for gen in gens}:
            if x:
                g = math.gcd(g, x)
        stab_lin = stab_semi // (f.e // g)
    payload = (cert[0], cert[1], cert[2].hex())
    return (payload, cert[1], stab_lin, stab_semi)


def canonical_form(M: PointMultiset, kind: str = SEMILINEAR) -> CanonicalForm:
    """Deterministic orbit invariant; equal certificates iff equivalent."""
    _require_spanning(M)
    if kind not in (LINEAR, SEMILINEAR):
        raise ValueError(f"unknown equivalence kind {kind!r}")
    payload, vector, stab_lin, stab_semi = _analyze_cached(M.k, M.q, M.mult)
    f = field_make(M.q)
    if kind == SEMILINEAR or f.e == 1:
        cert = _certificate(M.q, M.k, SEMILINEAR, payload)
        aut = stab_semi if kind == SEMILINEAR else stab_lin
        return CanonicalForm(vector=tuple(vector), aut_order=aut,
                             certificate=cert, pgl_aut_order=stab_lin,
                             pgammal_aut_order=stab_semi)
    # linear certificates over non-prime fields: explicit orbit
    perms = explicit_point_group(M.k, M.q, LINEAR)
    m = np.asarray(M.mult, dtype=np.int64)
    images = m[perms]
    best = min(map(tuple, images.tolist()))
    cert = _certificate(M.q, M.k, LINEAR, tuple(best))
    return CanonicalForm(vector=tuple(best), aut_order=stab_lin,
                         certificate=cert, pgl_aut_order=stab_lin,
                         pgammal_aut_order=stab_semi)


def automorphism_group_order(M: PointMultiset, kind: str = SEMILINEAR) -> int:
    """Order of the multiset stabilizer in PGL(k,q) or PGammaL(k,q)."""
    _require_spanning(M)
    _, _, stab_lin, stab_semi = _analyze_cached(M.k, M.q, M.mult)
    return stab_semi if kind == SEMILINEAR else stab_lin


def matrix_stabilizer_order(M: PointMultiset, kind: str = SEMILINEAR) -> int:
    """Stabilizer order lifted to GL/GammaL, i.e. (q-1) times the above."""
    return (M.q - 1) * automorphism_group_order(M, kind)


def monomial_aut_order(M: PointMultiset, kind: str = SEMILINEAR) -> int:
    """Order of the full (semi)monomial automorphism group of the code.

    Column permutations within repeated points contribute the product of
    factorials of the multiplicities; global scalings contribute q-1.
    """
    out = matrix_stabilizer_order(M, kind)
    for m in M.mult:
        for i in range(2, m + 1):
            out *= i
    return out


def orbit_canonical_oracle(M: PointMultiset, kind: str = SEMILINEAR):
    """Lexicographically minimal orbit member by explicit group sweep."""
    _require_spanning(M)
    if M.k == 1:
        return tuple(M.mult)
    perms = explicit_point_group(M.k, M.q, kind)
    m = np.asarray(M.mult, dtype=np.int64)
    images = m[perms]
    return tuple(min(map(tuple, images.tolist())))


def orbit_size_oracle(M: PointMultiset, kind: str = SEMILINEAR) -> int:
    if M.k == 1:
        return 1
    perms = explicit_point_group(M.k, M.q, kind)
    m = np.asarray(M.mult, dtype=np.int64)
    images = np.unique(m[perms], axis=0)
    return int(images.shape[0])
