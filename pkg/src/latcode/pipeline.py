"""Layered classification: extend, filter, canonicalize, deduplicate.

A task classifies all codes of a target dimension with weights inside a
spectrum, length bounded (or fixed), and point multiplicities capped.
Layers are built dimension by dimension starting from one-dimensional
codes: every admissible code of dimension j+1 projects through a point of
minimal positive multiplicity onto an admissible code of dimension j with
the same weight restriction, so extending every layer member by every
admissible r and keeping the candidates whose minimal positive
multiplicity equals r is exhaustive.

Multiplicity caps for intermediate layers are derived from the target
cap: one projection multiplies the maximum multiplicity by at most q.

Subproblems (one extension system per layer member and r) are
independent; workers process them in parallel and the driver merges
per-class results, keeping the lexicographically smallest representative
seen, so databases are identical for any worker count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .canon import SEMILINEAR, canonical_form, matrix_stabilizer_order
from .codemodel import (PointMultiset, generator_from_multiset,
                        multiset_from_generator, weight_distribution)
from .errors import FormatError, InconsistentBounds, VersionMismatch
from .extsys import (WeightSpectrum, build_extension_system,
                     linearize_min_extension, with_hyperplane_fraction)
from .solver import (COMPLETED, INFEASIBLE, UNKNOWN, Limits, check_feasible,
                     enumerate_solutions)

DB_MAGIC = "latcode-db"
DB_VERSION = 1
TOOL_VERSION = "0.1.0"


@dataclass(frozen=True)
class ClassificationTask:
    q: int
    target_dim: int
    n_max: int
    spectrum: WeightSpectrum
    max_mult: int | None = None
    kind: str = SEMILINEAR
    start_dim: int = 1
    seeds: tuple = ()                # PointMultisets at start_dim, optional
    exact_length: int | None = None  # final layer restricted to this length
    enforce_min_extension: bool = True
    use_phase0: bool = False
    use_gap_reformulation: bool = False
    hyperplane_fraction: float = 1.0
    layer_spectra: tuple = ()        # ((dim, WeightSpectrum), ...) overrides
    workers: int = 1
    limits: Limits = field(default_factory=Limits)

    def layer_spectrum(self, dim: int) -> WeightSpectrum:
        for d, sp in self.layer_spectra:
            if d == dim:
                return sp
        return self.spectrum

    def layer_cap(self, dim: int):
        """Point multiplicity cap for codes of the given dimension."""
        if self.max_mult is None:
            return None
        return self.max_mult * self.q ** (self.target_dim - dim)

    def layer_nmax(self, dim: int) -> int:
        top = self.exact_length if self.exact_length is not None \
            else self.n_max
        return top - (self.target_dim - dim)

    def admissible_r(self, n: int, dim: int):
        """Extension sizes for a length-n code of dimension dim-1."""
        cap = self.layer_cap(dim)
        hi = self.layer_nmax(dim) - n
        if cap is not None:
            hi = min(hi, cap)
        if self.exact_length is not None and dim == self.target_dim:
            r = self.exact_length - n
            return [r] if 1 <= r <= hi else []
        return list(range(1, hi + 1))


@dataclass(frozen=True)
class CodeRecord:
    length: int
    r: int
    aut_order: int
    wdist: tuple        # ((weight, count), ...)
    mult: tuple         # representative multiplicity vector
    certificate: str
    parent: str         # parent certificate or "-"


@dataclass
class CodeDatabase:
    q: int
    k: int
    n_max: int
    spectrum: WeightSpectrum
    max_mult: int | None
    kind: str
    complete: bool
    records: list

    def certificates(self):
        return [rec.certificate for rec in self.records]

    def multisets(self):
        return [PointMultiset(k=self.k, q=self.q, mult=rec.mult)
                for rec in self.records]


@dataclass
class SubproblemStats:
    parent: str
    r: int
    phase0: str          # "skipped" | feasibility status
    nodes: int
    solutions: int
    survivors: int
    status: str


def _systematic_representative(M: PointMultiset) -> PointMultiset:
    """Equivalent multiset whose support contains all unit points."""
    geom = M.geometry
    units = geom.unit_point_indices()
    if all(M.mult[u] >= 1 for u in units):
        return M
    return multiset_from_generator(generator_from_multiset(M), M.q)


def extend_step(M: PointMultiset, r: int, task: ClassificationTask,
                collector: dict | None = None):
    """Run one (code, r) extension subproblem; returns (classes, stats).

    classes maps certificate -> CodeRecord with the smallest representative
    encountered; pass a shared collector dict to merge across calls.
    """
    into_dim = M.k + 1
    spectrum = task.layer_spectrum(into_dim)
    cap = task.layer_cap(into_dim)
    base = _systematic_representative(M)
    parent_cert = canonical_form(M, task.kind).certificate
    try:
        system = build_extension_system(base, r, spectrum, max_mult=cap,
                                        systematic=True)
    except InconsistentBounds:
        return collector if collector is not None else {}, SubproblemStats(
            parent=parent_cert, r=r, phase0="skipped", nodes=0,
            solutions=0, survivors=0, status=COMPLETED)
    if task.enforce_min_extension and r > 1:
        system = linearize_min_extension(system, r)
    if task.hyperplane_fraction < 1.0:
        system = with_hyperplane_fraction(system, task.hyperplane_fraction)
    phase0 = "skipped"
    if task.use_phase0:
        verdict = check_feasible(system, task.limits)
        phase0 = verdict.status
        if verdict.status == INFEASIBLE:
            return collector if collector is not None else {}, \
                SubproblemStats(parent=parent_cert, r=r, phase0=phase0,
                                nodes=verdict.stats.nodes, solutions=0,
                                survivors=0, status=COMPLETED)
    classes = collector if collector is not None else {}
    spectrum_weights = set(spectrum.weights())
    recheck_weights = task.hyperplane_fraction < 1.0
    counters = {"survivors": 0}

    def visit(sol):
        cand = PointMultiset(k=into_dim, q=task.q, mult=sol.x)
        if task.enforce_min_extension and cand.min_positive() != r:
            return
        if recheck_weights:
            wd = weight_distribution(cand)
            if not set(wd.weights) <= spectrum_weights:
                return
        counters["survivors"] += 1
        cf = canonical_form(cand, task.kind)
        rec = classes.get(cf.certificate)
        if rec is None or cand.mult < rec.mult:
            wd = weight_distribution(cand)
            classes[cf.certificate] = CodeRecord(
                length=cand.n, r=r, aut_order=cf.aut_order,
                wdist=wd.counts, mult=cand.mult,
                certificate=cf.certificate, parent=parent_cert)

    stats = enumerate_solutions(system, visitor=visit, limits=task.limits)
    sub = SubproblemStats(parent=parent_cert, r=r, phase0=phase0,
                          nodes=stats.nodes, solutions=stats.solutions,
                          survivors=counters["survivors"],
                          status=stats.status)
    return classes, sub


def _seed_layer(task: ClassificationTask):
    if task.seeds:
        return list(task.seeds)
    if task.start_dim != 1:
        raise ValueError("seeds are required when start_dim > 1")
    spectrum = task.layer_spectrum(1)
    lengths = [w for w in spectrum.weights()
               if w <= task.layer_nmax(1)]
    if task.exact_length is not None:
        lo = task.exact_length
        for dim in range(2, task.target_dim + 1):
            cap = task.layer_cap(dim)
            lo -= task.layer_nmax(dim) if cap is None else cap
        lengths = [w for w in lengths if w >= lo]
    return [PointMultiset(k=1, q=task.q, mult=(n,)) for n in lengths]


def _subproblem_worker(args):
    M_key, task = args
    k, q, mult, r = M_key
    M = PointMultiset(k=k, q=q, mult=mult)
    classes, sub = extend_step(M, r, task)
    return classes, sub


def classify(task: ClassificationTask, layer_hook=None):
    """Breadth-first layered classification up to the target dimension.

    Returns (CodeDatabase for the final layer, list of SubproblemStats).
    layer_hook(dim, records) is called with every finished layer.
    """
    layer = _seed_layer(task)
    all_stats = []
    complete = True
    records = None
    for dim in range(task.start_dim, task.target_dim):
        jobs = []
        for M in layer:
            for r in task.admissible_r(M.n, dim + 1):
                jobs.append(((M.k, M.q, M.mult, r), task))
        classes = {}
        if task.workers > 1 and len(jobs) > 1:
            import multiprocessing as mp
            with mp.get_context("fork").Pool(task.workers) as pool:
                results = pool.map(_subproblem_worker, jobs)
        else:
            results = [_subproblem_worker(j) for j in jobs]
        for job_classes, sub in results:
            all_stats.append(sub)
            if sub.status != COMPLETED:
                complete = False
            for cert, rec in job_classes.items():
                old = classes.get(cert)
                if old is None or rec.mult < old.mult:
                    classes[cert] = rec
        records = sorted(classes.values(), key=lambda rec: rec.certificate)
        if layer_hook is not None:
            layer_hook(dim + 1, records)
        layer = [PointMultiset(k=dim + 1, q=task.q, mult=rec.mult)
                 for rec in records]
    if records is None:
        records = []
        for M in layer:
            cf = canonical_form(M, task.kind)
            wd = weight_distribution(M)
            records.append(CodeRecord(
                length=M.n, r=0, aut_order=cf.aut_order, wdist=wd.counts,
                mult=M.mult, certificate=cf.certificate, parent="-"))
        records.sort(key=lambda rec: rec.certificate)
    db = CodeDatabase(q=task.q, k=task.target_dim, n_max=task.n_max,
                      spectrum=task.spectrum, max_mult=task.max_mult,
                      kind=task.kind, complete=complete, records=records)
    if task.exact_length is not None:
        db.records = [rec for rec in db.records
                      if rec.length == task.exact_length]
    return db, all_stats


# -- database text format -----------------------------------------------------
#
# Header lines:   latcode-db 1
#                 q <q> / k <k> / nmax <n> / spectrum d:a:b[,d:a:b...]
#                 maxmult <int or *> / kind <kind> / complete <0|1>
#                 records <count>
# Record lines:   <n> <r> <aut> <w^a[,w^a...]> <m,m,...> <cert> <parent>

def _spectrum_token(spectrum: WeightSpectrum) -> str:
    return ",".join(f"{d}:{a}:{b}" for d, a, b in spectrum.blocks)


def _parse_spectrum(token: str) -> WeightSpectrum:
    blocks = []
    for part in token.split(","):
        d, a, b = (int(x) for x in part.split(":"))
        blocks.append((d, a, b))
    return WeightSpectrum(blocks=tuple(blocks))


def db_write(db: CodeDatabase, destination) -> None:
    lines = [f"{DB_MAGIC} {DB_VERSION}",
             f"q {db.q}",
             f"k {db.k}",
             f"nmax {db.n_max}",
             f"spectrum {_spectrum_token(db.spectrum)}",
             f"maxmult {'*' if db.max_mult is None else db.max_mult}",
             f"kind {db.kind}",
             f"complete {1 if db.complete else 0}",
             f"records {len(db.records)}"]
    for rec in db.records:
        wd = ",".join(f"{w}^{a}" for w, a in rec.wdist)
        mult = ",".join(str(m) for m in rec.mult)
        lines.append(f"{rec.length} {rec.r} {rec.aut_order} {wd} {mult} "
                     f"{rec.certificate} {rec.parent}")
    text = "\n".join(lines) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w") as fh:
            fh.write(text)


def db_read(source) -> CodeDatabase:
    """Parse a database from a path or file-like object."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source) as fh:
            text = fh.read()
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty database", line=1)
    head = lines[0].split()
    if len(head) != 2 or head[0] != DB_MAGIC:
        raise FormatError("missing database magic", line=1)
    if int(head[1]) != DB_VERSION:
        raise VersionMismatch(f"database version {head[1]} unsupported")
    fields = {}
    idx = 1
    for key in ("q", "k", "nmax", "spectrum", "maxmult", "kind",
                "complete", "records"):
        if idx >= len(lines):
            raise FormatError(f"missing header field {key}", line=idx + 1)
        parts = lines[idx].split(None, 1)
        if len(parts) != 2 or parts[0] != key:
            raise FormatError(f"expected header field {key}", line=idx + 1)
        fields[key] = parts[1].strip()
        idx += 1
    n_records = int(fields["records"])
    records = []
    for i in range(n_records):
        line_no = idx + i + 1
        if idx + i >= len(lines):
            raise FormatError("truncated record section", line=line_no)
        parts = lines[idx + i].split()
        if len(parts) != 7:
            raise FormatError("record needs 7 fields", line=line_no)
        try:
            length, r, aut = int(parts[0]), int(parts[1]), int(parts[2])
            wdist = tuple(
                (int(tok.split("^")[0]), int(tok.split("^")[1]))
                for tok in parts[3].split(","))
            mult = tuple(int(x) for x in parts[4].split(","))
        except (ValueError, IndexError):
            raise FormatError("malformed record field", line=line_no) \
                from None
        records.append(CodeRecord(length=length, r=r, aut_order=aut,
                                  wdist=wdist, mult=mult,
                                  certificate=parts[5], parent=parts[6]))
    return CodeDatabase(
        q=int(fields["q"]), k=int(fields["k"]), n_max=int(fields["nmax"]),
        spectrum=_parse_spectrum(fields["spectrum"]),
        max_mult=None if fields["maxmult"] == "*" else int(fields["maxmult"]),
        kind=fields["kind"], complete=fields["complete"] == "1",
        records=records)
