"""Exhaustive lattice point enumeration and feasibility search.

An ExtensionSystem is compiled into a LatticeProblem: one bounded integer
variable per projective point (the fixed point gets a singleton domain)
and one row per linear condition, each row being a subset of variables
together with the set of sums it is allowed to reach.  Fibre equations
are rows with a one-element allowed set; hyperplane conditions allow one
value per admissible codeword weight, so gapped weight spectra are exact
and need no post-filtering.

The search assigns one variable per node in a fixed order chosen so that
rows complete as early as possible (most-constrained row first).  Before
a value is accepted, every row through the variable is probed against a
static table feas[d][row][p]: is some completion of the row's variables
that are still unassigned at depth d able to carry the partial sum p into
the allowed set?  A row's last assignment is thereby checked against the
allowed set exactly, so reaching full depth certifies a solution and an
exhausted search certifies completeness.

The inner loop lives in the compiled extension module ``_speedups`` when
it was built, with a pure-Python twin selected at import time
(``LATCODE_PURE=1`` forces the fallback).
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field

import numpy as np

from .extsys import ExtensionSystem

try:  # compiled kernel is optional
    if os.environ.get("LATCODE_PURE"):
        raise ImportError("pure-python kernel forced")
    from . import _speedups
    HAVE_SPEEDUPS = True
except ImportError:
    _speedups = None
    HAVE_SPEEDUPS = False

COMPLETED = "completed"
NODE_LIMIT = "node_limit"
TIME_LIMIT = "time_limit"
SOLUTION_LIMIT = "solution_limit"

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class Solution:
    """One integer solution; x has one entry per point of PG(k,q)."""

    x: tuple

    def multiplicities(self):
        return self.x

    def slacks(self, system: ExtensionSystem):
        """Derived y_H values (single-block spectra) per hyperplane index."""
        blocks = system.spectrum.blocks
        if len(blocks) != 1:
            raise ValueError("slacks are per-block for gapped spectra")
        delta, a, b = blocks[0]
        geom = system.geometry
        m = np.asarray(self.x, dtype=np.int64)
        sums = geom.incidence @ m
        rhs = system.n_ext - a * delta
        ys = (rhs - sums) // delta
        return tuple(int(y) for y in ys)


@dataclass
class SearchStats:
    nodes: int = 0
    solutions: int = 0
    status: str = COMPLETED
    elapsed: float = 0.0


@dataclass
class Limits:
    max_nodes: int | None = None
    max_seconds: float | None = None
    max_solutions: int | None = None


@dataclass(frozen=True)
class LatticeProblem:
    """Bounded integer variables plus set-valued linear rows.

    Each row is (((var, coeff), ...), allowed sums); coefficients are
    positive integers.  n_public marks how many leading variables carry
    the answer (auxiliary slack variables follow them and are dropped
    from emitted solutions).  order, when given, fixes the assignment
    order of all variables.
    """

    domains: tuple   # per variable: sorted tuple of admissible values
    rows: tuple      # per row: (((var, coeff), ...), frozenset of sums)
    n_public: int | None = None
    order: tuple | None = None

    @property
    def nvars(self) -> int:
        return len(self.domains)


def _sumset(values, count, width):
    """Bitmask of sums of `count` elements drawn from `values`."""
    acc = 1
    base = 0
    for v in values:
        base |= 1 << v
    for _ in range(count):
        nxt = 0
        for v in values:
            nxt |= acc << v
        acc = nxt & ((1 << width) - 1)
    return acc


def compile_system(system: ExtensionSystem) -> LatticeProblem:
    """Lower an ExtensionSystem to the kernel representation.

    The admissible hyperplane sums A are enforced through one auxiliary
    slack variable per hyperplane H: with y_H := max(A) - M'(H) taking
    values in {max(A) - a : a in A}, the row sum(x_P : P in H) + y_H is
    pinned to the constant max(A).

    Counting the hyperplanes through a fixed subspace then yields exact
    linear identities that couple the slacks: summing M'(H) over the s1
    hyperplanes through a point P counts P itself s1 times and every
    other point s2 = (hyperplanes through two points) times, so

        sum(y_H : H through P) + (s1 - s2) x_P = s1 max(A) - s2 n'.

    The same count over the hyperplanes through a line (when hyperplanes
    are not lines) gives a second family.  These rows are tautologies in
    the x variables alone but cut hard once the slacks are explicit.
    The analogous per-point count also restricts each x_P domain to
    values reachable by s1 terms from A, which is applied up front.
    """
    geom = system.geometry
    q = system.q
    hole = system.r if (system.min_ext and system.r > 1) else None
    allowed = frozenset(system.allowed_hyperplane_sums())
    n_ext = system.n_ext
    n_pts = geom.n_points
    domains = []
    for p in range(n_pts):
        lo, hi = system.lo[p], system.hi[p]
        if hole is None or lo > 0:
            dom = tuple(range(lo, hi + 1))
        else:
            dom = tuple(v for v in range(lo, hi + 1)
                        if v == 0 or v >= hole)
        domains.append(dom)
    rows = []
    for ui, target, members in system.fibres:
        for p in members:
            domains[p] = tuple(v for v in domains[p] if v <= target)
        rows.append((tuple((p, 1) for p in members),
                     frozenset((target,))))

    exact = system.hyperplane_fraction >= 1.0
    if not exact or not allowed:
        fixed = system.fixed_index
        keep_static = [h for h in range(n_pts)
                       if fixed in geom.hyperplane_points[h]]
        dynamic = [h for h in range(n_pts)
                   if fixed not in geom.hyperplane_points[h]]
        stride = max(1, round(1.0 / system.hyperplane_fraction))
        for h in keep_static + dynamic[::stride]:
            rows.append((tuple((p, 1) for p in geom.hyperplane_points[h]),
                         allowed))
        return LatticeProblem(domains=tuple(domains), rows=tuple(rows),
                              n_public=n_pts)

    kk = geom.k  # vector dimension of the extension space
    a_max = max(allowed)
    width = a_max * max(n_pts, 1) + n_ext + 1
    s1 = (q ** (kk - 1) - 1) // (q - 1)
    s2 = (q ** (kk - 2) - 1) // (q - 1)
    sums1 = _sumset(sorted(allowed), s1, width)
    for p in range(n_pts):
        domains[p] = tuple(
            v for v in domains[p]
            if (sums1 >> (v * (s1 - s2) + n_ext * s2)) & 1)
    # slack variables y_H, ids n_pts .. 2 n_pts - 1
    y_dom = tuple(sorted(a_max - a for a in allowed))
    domains.extend([y_dom] * n_pts)
    for h in range(n_pts):
        members = tuple((p, 1) for p in geom.hyperplane_points[h])
        rows.append((members + ((n_pts + h, 1),),
                     frozenset((a_max,))))
    for p in range(n_pts):
        c_p = s1 * a_max - s2 * n_ext
        if c_p < 0:
            rows.append(((), frozenset()))
            continue
        members = tuple((n_pts + h, 1) for h in geom.point_hyperplanes[p])
        if s1 > s2:
            members += ((p, s1 - s2),)
        rows.append((members, frozenset((c_p,))))
    if kk >= 4:
        c_l = (q ** (kk - 2) - 1) // (q - 1)
        c_3 = (q ** (kk - 3) - 1) // (q - 1)
        hyp_sets = [frozenset(geom.hyperplane_points[h])
                    for h in range(n_pts)]
        for line in geom.all_lines:
            c_line = c_l * a_max - c_3 * n_ext
            if c_line < 0:
                rows.append(((), frozenset()))
                continue
            line_set = set(line)
            through = [h for h in range(n_pts)
                       if line_set <= hyp_sets[h]]
            members = tuple((n_pts + h, 1) for h in through)
            if c_l > c_3:
                members += tuple((p, c_l - c_3) for p in line)
            rows.append((members, frozenset((c_line,))))
    order = _extension_order(geom, system, n_pts)
    return LatticeProblem(domains=tuple(domains), rows=tuple(rows),
                          n_public=n_pts, order=order)


def _extension_order(geom, system, n_pts):
    """Branching order: hyperplane slacks first, grouped by pencils.

    Completing the pencil of a point fixes the point's counting row, so
    unit propagation then forces the point multiplicity itself; forced
    points feed the fibre and hyperplane rows in turn.  Points follow as
    a fallback for whatever propagation leaves open, fibre by fibre.
    """
    order = []
    remaining = {p: set(geom.point_hyperplanes[p]) for p in range(n_pts)}
    done = set()
    placed = set()
    while len(done) < n_pts:
        p = min((pp for pp in range(n_pts) if pp not in done),
                key=lambda pp: (len(remaining[pp]), pp))
        for h in sorted(remaining[p]):
            order.append(n_pts + h)
            placed.add(n_pts + h)
            for q2 in geom.hyperplane_points[h]:
                remaining[q2].discard(h)
        done.add(p)
    order.append(system.fixed_index)
    for ui, target, members in sorted(system.fibres,
                                      key=lambda f: (f[1], f[0])):
        order.extend(members)
    return tuple(order)


def _variable_order(problem: LatticeProblem):
    """Branching order: most constrained rows first (deterministic)."""
    nvars = problem.nvars
    row_vars = [set(v for v, _ in vars_) for vars_, _ in problem.rows]
    placed = [False] * nvars
    order = []
    live = set(range(len(problem.rows)))
    while len(order) < nvars:
        best = None
        for ri in live:
            if row_vars[ri]:
                cand = (len(row_vars[ri]), len(problem.rows[ri][1]), ri)
                if best is None or cand < best[0]:
                    best = (cand, ri)
        if best is None:
            order.extend(sorted(v for v in range(nvars) if not placed[v]))
            break
        ri = best[1]
        for v in sorted(row_vars[ri]):
            order.append(v)
            placed[v] = True
            for rj in live:
                row_vars[rj].discard(v)
        live.discard(ri)
    return order


def _limits_args(limits):
    return (-1 if limits.max_nodes is None else int(limits.max_nodes),
            -1.0 if limits.max_seconds is None else float(limits.max_seconds),
            -1 if limits.max_solutions is None else int(limits.max_solutions))


def _run_kernel(problem, limits, visitor, first_only):
    stats = SearchStats()
    start = time.monotonic()
    nvars = problem.nvars
    n_pub = problem.n_public if problem.n_public is not None else nvars
    if nvars == 0:
        ok = all(0 in allowed for vars_, allowed in problem.rows)
        if ok:
            stats.solutions = 1
            visitor(Solution(x=()))
        stats.elapsed = time.monotonic() - start
        return stats
    if any(not d for d in problem.domains):
        stats.elapsed = time.monotonic() - start
        return stats
    order = list(problem.order) if problem.order is not None \
        else _variable_order(problem)
    max_nodes, max_seconds, max_solutions = _limits_args(limits)
    if first_only:
        max_solutions = 1
    sols = []
    if HAVE_SPEEDUPS:
        nodes, status = _speedups.search_cp(
            *_flat_arrays(problem, order),
            max_nodes, max_seconds, max_solutions, sols)
    else:
        from ._kernel_py import Kernel
        import sys
        old_limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old_limit, 4 * nvars + 100))
        try:
            kern = Kernel(problem.domains, problem.rows, order)
            nodes, status = kern.search(max_nodes, max_seconds,
                                        max_solutions, sols.append)
        finally:
            sys.setrecursionlimit(old_limit)
    del order
    stats = SearchStats(nodes=nodes, solutions=len(sols))
    if status == 0:
        stats.status = COMPLETED
    elif status == 1:
        stats.status = NODE_LIMIT
    elif status == 2:
        stats.status = TIME_LIMIT
    else:
        stats.status = COMPLETED if first_only else SOLUTION_LIMIT
    for vals in sols:
        visitor(Solution(x=tuple(vals[:n_pub])))
    stats.elapsed = time.monotonic() - start
    return stats


def _flat_arrays(problem, order):
    """Flatten domains/rows for the compiled kernel (mask domains)."""
    nvars = problem.nvars
    rows = problem.rows
    n_rows = len(rows)
    if any(v > 127 for dom in problem.domains for v in dom):
        raise ValueError("domain values above 127 are unsupported")
    mask0 = np.zeros(max(nvars, 1), dtype=np.uint64)
    mask1 = np.zeros(max(nvars, 1), dtype=np.uint64)
    for v, dom in enumerate(problem.domains):
        m = 0
        for val in dom:
            m |= 1 << val
        mask0[v] = m & 0xFFFFFFFFFFFFFFFF
        mask1[v] = m >> 64
    vmin = np.array([min(d) for d in problem.domains] or [0],
                    dtype=np.int64)
    vmax = np.array([max(d) for d in problem.domains] or [0],
                    dtype=np.int64)
    var_rows = [[] for _ in range(nvars)]
    for ri, (vars_, _) in enumerate(rows):
        for v, c in vars_:
            var_rows[v].append((ri, c))
    vr_counts = np.array([len(v) for v in var_rows] or [0], dtype=np.int64)
    vr_offsets = np.zeros(max(nvars, 1) + 1, dtype=np.int64)
    np.cumsum(vr_counts, out=vr_offsets[1:])
    vr_rows = np.array([ri for vr in var_rows for ri, _ in vr] or [0],
                       dtype=np.int64)
    vr_coeffs = np.array([c for vr in var_rows for _, c in vr] or [0],
                         dtype=np.int64)
    rv_counts = np.array([len(vars_) for vars_, _ in rows] or [0],
                         dtype=np.int64)
    rv_offsets = np.zeros(max(n_rows, 1) + 1, dtype=np.int64)
    np.cumsum(rv_counts, out=rv_offsets[1:])
    rv_vars = np.array([v for vars_, _ in rows for v, _ in vars_] or [0],
                       dtype=np.int64)
    rv_coeffs = np.array([c for vars_, _ in rows for _, c in vars_] or [0],
                         dtype=np.int64)
    width = 1
    for vars_, allowed in rows:
        top = sum(c * max(problem.domains[v]) for v, c in vars_) \
            if vars_ else 0
        width = max(width, top + 1, (max(allowed) + 2) if allowed else 1)
    ceil_allowed = np.full((max(n_rows, 1), width + 1), width + 1,
                           dtype=np.int64)
    allowed_bits = np.zeros((max(n_rows, 1), width), dtype=np.uint8)
    for ri, (_, allowed) in enumerate(rows):
        for s in allowed:
            if 0 <= s < width:
                allowed_bits[ri, s] = 1
        nxt = width + 1
        for s in range(width, -1, -1):
            if s < width and allowed_bits[ri, s]:
                nxt = s
            ceil_allowed[ri, s] = nxt
    minrem = np.array(
        [sum(c * min(problem.domains[v]) for v, c in vars_) if vars_ else 0
         for vars_, _ in rows] or [0], dtype=np.int64)
    maxrem = np.array(
        [sum(c * max(problem.domains[v]) for v, c in vars_) if vars_ else 0
         for vars_, _ in rows] or [0], dtype=np.int64)
    open_count = np.array(
        [sum(1 for v, _ in vars_ if len(problem.domains[v]) > 1)
         for vars_, _ in rows] or [0], dtype=np.int64)
    orderpos = np.zeros(max(nvars, 1), dtype=np.int64)
    for pos, v in enumerate(order):
        orderpos[v] = pos
    return (mask0, mask1, vmin, vmax, vr_counts, vr_offsets, vr_rows,
            vr_coeffs, rv_counts, rv_offsets, rv_vars, rv_coeffs,
            ceil_allowed, minrem, maxrem, open_count, orderpos)


def _use_compiled(problem: LatticeProblem) -> bool:
    return HAVE_SPEEDUPS


def enumerate_solutions(system, visitor=None, limits: Limits | None = None,
                        collect: list | None = None) -> SearchStats:
    """Invoke visitor once per integer solution; exhaustive when Completed."""
    problem = system if isinstance(system, LatticeProblem) \
        else compile_system(system)
    limits = limits or Limits()
    if collect is not None:
        visitor = collect.append if visitor is None else visitor
    if visitor is None:
        def visitor(sol):
            return None
    return _run_kernel(problem, limits, visitor, first_only=False)


@dataclass
class FeasibilityResult:
    status: str
    witness: Solution | None = None
    stats: SearchStats = field(default_factory=SearchStats)


def check_feasible(system, limits: Limits | None = None) -> FeasibilityResult:
    """Feasible with a witness, Infeasible by exhausted search, or Unknown."""
    problem = system if isinstance(system, LatticeProblem) \
        else compile_system(system)
    limits = limits or Limits()
    found = []
    stats = _run_kernel(problem, limits, found.append, first_only=True)
    if found:
        return FeasibilityResult(status=FEASIBLE, witness=found[0],
                                 stats=stats)
    if stats.status == COMPLETED:
        return FeasibilityResult(status=INFEASIBLE, stats=stats)
    return FeasibilityResult(status=UNKNOWN, stats=stats)


def parse_verdict(text: str):
    """Parse an external solver's one-line verdict file."""
    line = text.strip().split("\n")[0].strip()
    if not line:
        raise ValueError("empty verdict file")
    parts = line.split()
    word = parts[0].upper()
    if word == "INFEASIBLE":
        return INFEASIBLE, None
    if word == "FEASIBLE":
        vals = tuple(int(x) for x in parts[1:])
        return FEASIBLE, vals
    raise ValueError(f"unrecognised verdict {parts[0]!r}")


# -- LP text export ----------------------------------------------------------

def export_lp(system: ExtensionSystem) -> str:
    """Emit the system in LP text format for an external ILP solver.

    Point variables are x<i>; single-block slack variables y<h>, or per
    block yb<h>_<i> with selector binaries z<h>_<i> in gapped mode; the
    min-extension linearization adds binaries u<i> with the two linking
    rows.  A solver's FEASIBLE/INFEASIBLE verdict for this file applies
    verbatim to the system (the objective is the constant zero).
    """
    geom = system.geometry
    lines = ["\\ latcode extension system", "Minimize", " obj: 0 x0",
             "Subject To"]
    blocks = system.spectrum.blocks
    gapped = system.gap_mode and len(blocks) >= 2
    n_ext = system.n_ext
    for ui, target, members in system.fibres:
        terms = " + ".join(f"x{p}" for p in members)
        lines.append(f" fibre{ui}: {terms} = {target}")
    for h in range(geom.n_points):
        pts = geom.hyperplane_points[h]
        terms = " + ".join(f"x{p}" for p in pts)
        if gapped:
            yterms = " + ".join(
                f"{delta} yb{h}_{i}" for i, (delta, a, b) in enumerate(blocks))
            zterms = " + ".join(
                f"{a * delta} z{h}_{i}"
                for i, (delta, a, b) in enumerate(blocks))
            lines.append(f" hyp{h}: {terms} + {yterms} + {zterms} = {n_ext}")
            for i, (delta, a, b) in enumerate(blocks):
                lines.append(
                    f" blk{h}_{i}: yb{h}_{i} - {b - a} z{h}_{i} <= 0")
            lines.append(
                " one%d: %s = 1"
                % (h, " + ".join(f"z{h}_{i}" for i in range(len(blocks)))))
        else:
            delta, a, b = (blocks[0] if len(blocks) == 1
                           else system.spectrum.hull().blocks[0])
            lines.append(
                f" hyp{h}: {terms} + {delta} y{h} = {n_ext - a * delta}")
    if system.min_ext and system.r > 1:
        for p in range(geom.n_points):
            if p == system.fixed_index:
                continue
            lines.append(f" mina{p}: x{p} - {system.hi[p]} u{p} <= 0")
            lines.append(f" minb{p}: x{p} - {system.r} u{p} >= 0")
    lines.append("Bounds")
    for p in range(geom.n_points):
        lines.append(f" {system.lo[p]} <= x{p} <= {system.hi[p]}")
    if gapped:
        for h in range(geom.n_points):
            for i, (delta, a, b) in enumerate(blocks):
                lines.append(f" 0 <= yb{h}_{i} <= {b - a}")
    else:
        delta, a, b = (blocks[0] if len(blocks) == 1
                       else system.spectrum.hull().blocks[0])
        for h in range(geom.n_points):
            lines.append(f" 0 <= y{h} <= {b - a}")
    lines.append("Generals")
    for p in range(geom.n_points):
        lines.append(f" x{p}")
    if gapped:
        for h in range(geom.n_points):
            for i in range(len(blocks)):
                lines.append(f" yb{h}_{i}")
    else:
        for h in range(geom.n_points):
            lines.append(f" y{h}")
    binaries = []
    if gapped:
        for h in range(geom.n_points):
            for i in range(len(blocks)):
                binaries.append(f" z{h}_{i}")
    if system.min_ext and system.r > 1:
        for p in range(geom.n_points):
            if p != system.fixed_index:
                binaries.append(f" u{p}")
    if binaries:
        lines.append("Binaries")
        lines.extend(binaries)
    lines.append("End")
    return "\n".join(lines) + "\n"
