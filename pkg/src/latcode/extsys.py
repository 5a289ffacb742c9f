"""Bounded integer equality system for extending an [n,k]_q code.

Extending a code with multiset M over PG(k-1,q) by r new columns on the
added coordinate produces a multiset M' over PG(k,q) subject to:

  * fibre equations: for every base point <u>, the q points <(u|lam)>
    carry total multiplicity M(<u>);
  * the fixed assignment M'(<e_{k+1}>) = r;
  * hyperplane equations: for every hyperplane H of PG(k,q), the extended
    codeword weight (n+r) - M'(H) lies in the admissible weight set;
  * bounds 0 <= x_P <= Lambda_P, and x_P >= 1 on unit points when a
    systematic shape is required.

Hyperplane conditions are stored as the set of admissible values for
sum(x_P : P in H); for a single spectrum block this is the arithmetic
progression generated by the slack variable y_H in {0,...,b-a}, and for
gapped spectra it is exactly the union over blocks, which is what the
block/indicator reformulation expresses with extra y/z variables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .codemodel import PointMultiset
from .errors import (BlocksOverlap, BlocksRequired, InconsistentBounds,
                     NotSpanning, SpectrumEmpty, UnboundedVariable)
from .geometry import geometry_make


@dataclass(frozen=True)
class WeightSpectrum:
    """Admissible nonzero weights, as ordered blocks (delta, a, b)."""

    blocks: tuple  # ((delta, a, b), ...) meaning {a*delta, ..., b*delta}

    def __post_init__(self):
        if not self.blocks:
            raise SpectrumEmpty("spectrum has no blocks")
        prev_hi = 0
        for delta, a, b in self.blocks:
            if delta < 1 or a < 1 or b < a:
                raise BlocksOverlap(f"bad block ({delta},{a},{b})")
            if a * delta <= prev_hi:
                raise BlocksOverlap("blocks overlap or are unordered")
            prev_hi = b * delta
        if not self.weights():
            raise SpectrumEmpty("spectrum is empty")

    @classmethod
    def from_weights(cls, weights) -> "WeightSpectrum":
        """Convert an explicit weight list into maximal blocks."""
        ws = sorted(set(int(w) for w in weights))
        if not ws or ws[0] < 1:
            raise SpectrumEmpty("weights must be positive")
        delta = math.gcd(*ws)
        idx = [w // delta for w in ws]
        blocks = []
        start = prev = idx[0]
        for i in idx[1:]:
            if i == prev + 1:
                prev = i
            else:
                blocks.append((delta, start, prev))
                start = prev = i
        blocks.append((delta, start, prev))
        return cls(blocks=tuple(blocks))

    @classmethod
    def single(cls, delta: int, a: int, b: int) -> "WeightSpectrum":
        return cls(blocks=((delta, a, b),))

    def weights(self):
        out = []
        for delta, a, b in self.blocks:
            out.extend(range(a * delta, b * delta + 1, delta))
        return tuple(out)

    @property
    def delta(self) -> int:
        return math.gcd(*(blk[0] for blk in self.blocks))

    @property
    def min_weight(self) -> int:
        d, a, _ = self.blocks[0]
        return a * d

    @property
    def max_weight(self) -> int:
        d, _, b = self.blocks[-1]
        return b * d

    def hull(self) -> "WeightSpectrum":
        """Single-block superset spanning the full weight range."""
        d = self.delta
        return WeightSpectrum.single(d, self.min_weight // d,
                                     self.max_weight // d)


@dataclass(frozen=True)
class ExtensionSystem:
    """Immutable description of one extension step's lattice point system."""

    q: int
    base_k: int           # dimension of the code being extended
    n: int                # base length
    r: int                # columns added on the new coordinate
    spectrum: WeightSpectrum
    fixed_index: int      # point index of <e_{k+1}> in PG(k,q)
    lo: tuple             # per-point lower bounds
    hi: tuple             # per-point upper bounds (fixed point: r)
    fibres: tuple         # ((base_point, target, (point indices)), ...)
    min_ext: bool = False     # domains restricted to {0} u [r, hi]
    gap_mode: bool = False    # formal block/indicator view requested
    hyperplane_fraction: float = 1.0

    @property
    def ext_k(self) -> int:
        return self.base_k + 1

    @property
    def geometry(self):
        return geometry_make(self.ext_k, self.q)

    @property
    def n_ext(self) -> int:
        return self.n + self.r

    def allowed_hyperplane_sums(self):
        """Sorted tuple of admissible values of M'(H)."""
        total = self.n_ext
        vals = sorted({total - w for w in self.spectrum.weights()
                       if 0 <= total - w})
        return tuple(vals)

    def domain(self, p: int):
        """Sorted tuple of admissible values for x_p."""
        if p == self.fixed_index:
            return (self.r,)
        lo, hi = self.lo[p], self.hi[p]
        if self.min_ext and self.r > 1:
            vals = [v for v in range(lo, hi + 1) if v == 0 or v >= self.r]
        else:
            vals = list(range(lo, hi + 1))
        return tuple(vals)


def build_extension_system(M: PointMultiset, r: int,
                           spectrum: WeightSpectrum,
                           max_mult=None, systematic: bool = True,
                           ) -> ExtensionSystem:
    """Set up the extension system for M -> dimension k+1, r new columns."""
    if r < 1:
        raise InconsistentBounds("r must be >= 1")
    if not M.spans():
        raise NotSpanning("base multiset must span")
    q = M.q
    k = M.k
    ext = geometry_make(k + 1, q)
    base = geometry_make(k, q)
    n = M.n
    cap = n + r if max_mult is None else int(max_mult)
    if cap < 1:
        raise InconsistentBounds("max multiplicity must be >= 1")
    if r > cap:
        raise InconsistentBounds(f"r={r} exceeds max multiplicity {cap}")
    fixed = ext.last_unit_index()
    lo = [0] * ext.n_points
    hi = [cap] * ext.n_points
    hi[fixed] = r
    lo[fixed] = r
    fibres = []
    for ui, u in enumerate(base.points):
        members = tuple(ext.point_index[u + (lam,)] for lam in range(q))
        target = M.mult[ui]
        for p in members:
            hi[p] = min(hi[p], target)
        fibres.append((ui, target, members))
    if systematic:
        for ui in base.unit_point_indices():
            if M.mult[ui] < 1:
                raise InconsistentBounds(
                    "systematic shape needs unit points in the base support")
        for p in ext.unit_point_indices():
            if p != fixed:
                lo[p] = 1
    return ExtensionSystem(q=q, base_k=k, n=n, r=r, spectrum=spectrum,
                           fixed_index=fixed, lo=tuple(lo), hi=tuple(hi),
                           fibres=tuple(fibres))


def linearize_min_extension(sys: ExtensionSystem, r: int) -> ExtensionSystem:
    """Restrict free variables to x = 0 or x >= r (binary-indicator form).

    For r = 1 the condition is vacuous and the system is returned as is.
    """
    if r != sys.r:
        raise InconsistentBounds("r must match the system's extension size")
    if any(h >= sys.n_ext + 1 for h in sys.hi):
        raise UnboundedVariable("all variables need finite upper bounds")
    if r <= 1:
        return sys
    return replace(sys, min_ext=True)


def apply_gap_reformulation(sys: ExtensionSystem) -> ExtensionSystem:
    """Mark the system as using the per-block slack/indicator formulation.

    Requires a spectrum with at least two blocks.  Admissible hyperplane
    sums are already stored exactly, so this only switches the formal view
    used by the LP export and records that solutions need no post-filter.
    """
    if len(sys.spectrum.blocks) < 2:
        raise BlocksRequired("gap reformulation needs >= 2 blocks")
    return replace(sys, gap_mode=True)


def with_hyperplane_fraction(sys: ExtensionSystem,
                             fraction: float) -> ExtensionSystem:
    """Restrict enumeration to a deterministic subset of hyperplane rows.

    Solutions may then violate dropped rows; callers must re-check weights.
    """
    if not 0 < fraction <= 1:
        raise InconsistentBounds("fraction must be in (0, 1]")
    return replace(sys, hyperplane_fraction=float(fraction))


def preprocess_line_feasibility(q: int, r: int, cap: int, c: int) -> bool:
    """True when no q-tuple with entries in {0} u [r, cap] sums to c.

    t nonzero entries reach exactly the sums [t*r, t*cap], so c is
    reachable iff some t <= q satisfies ceil(c/cap) <= t <= floor(c/r).
    """
    if c == 0:
        return False
    if c < 0:
        return True
    t_min = -(-c // cap)
    t_max = min(q, c // r)
    return t_min > t_max
