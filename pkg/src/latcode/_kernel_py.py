"""Pure-Python search kernel: branching plus domain-filtering propagation.

Every variable carries a bitmask domain (two 64-bit words, values up to
127).  A row knows the interval [minrem, maxrem] of its sum over the
current domains; a value v of a member variable survives iff some
allowed row sum lies between the row's minimum and maximum with that
variable pinned to v.  Filtering deltas are pushed through a work queue
to a fixpoint; emptied domains fail the branch, domains narrowed to a
single value count as assignments.  The branch variable is the one with
the smallest open domain (ties by a fixed order), values are tried in
ascending order, and the compiled twin in _speedups.pyx implements the
same semantics, so both enumerate identical solution sequences.

Nodes count branching attempts only; propagation is free.
"""

from __future__ import annotations

import time

STATUS_DONE = 0
STATUS_NODES = 1
STATUS_TIME = 2
STATUS_SOLUTIONS = 3


def _mask_of(values):
    m = 0
    for v in values:
        m |= 1 << v
    return m


def _min_bit(m):
    return (m & -m).bit_length() - 1


def _max_bit(m):
    return m.bit_length() - 1


class Kernel:
    def __init__(self, domains, rows, order):
        self.nvars = len(domains)
        if any(v > 127 for dom in domains for v in dom):
            raise ValueError("domain values above 127 are unsupported")
        self.mask = [_mask_of(d) for d in domains]
        self.vmin = [min(d) for d in domains]
        self.vmax = [max(d) for d in domains]
        self.order_pos = {v: i for i, v in enumerate(order)}
        self.rows = rows
        self.var_rows = [[] for _ in range(self.nvars)]
        for ri, (vars_, _) in enumerate(rows):
            for v, c in vars_:
                self.var_rows[v].append((ri, c))
        self.row_vars = [tuple(vars_) for vars_, _ in rows]
        self.allowed = [frozenset(a) for _, a in rows]
        self.sorted_allowed = [sorted(a) for _, a in rows]
        self.minrem = [sum(c * self.vmin[v] for v, c in vars_)
                       for vars_, _ in rows]
        self.maxrem = [sum(c * self.vmax[v] for v, c in vars_)
                       for vars_, _ in rows]
        self.open_count = [sum(1 for v, _ in vars_
                               if self.mask[v] & (self.mask[v] - 1))
                           for vars_, _ in rows]

    def _ceil_allowed(self, ri, lo):
        for s in self.sorted_allowed[ri]:
            if s >= lo:
                return s
        return None

    def _set_mask(self, v, new_mask, trail, queue):
        old = self.mask[v]
        if new_mask == old:
            return True
        if new_mask == 0:
            return False
        trail.append((v, old, self.vmin[v], self.vmax[v]))
        was_open = bool(old & (old - 1))
        self.mask[v] = new_mask
        nmin = _min_bit(new_mask)
        nmax = _max_bit(new_mask)
        dmin = nmin - self.vmin[v]
        dmax = nmax - self.vmax[v]
        self.vmin[v] = nmin
        self.vmax[v] = nmax
        now_open = bool(new_mask & (new_mask - 1))
        for ri, c in self.var_rows[v]:
            self.minrem[ri] += c * dmin
            self.maxrem[ri] += c * dmax
            if was_open and not now_open:
                self.open_count[ri] -= 1
            queue.add(ri)
        return True

    def _filter_row(self, ri, trail, queue):
        lo_all = self.minrem[ri]
        hi_all = self.maxrem[ri]
        if self._ceil_allowed(ri, lo_all) is None or \
                self._ceil_allowed(ri, lo_all) > hi_all:
            ceil = self._ceil_allowed(ri, lo_all)
            if ceil is None or ceil > hi_all:
                return False
        if self.open_count[ri] == 0:
            return lo_all in self.allowed[ri]
        for v, c in self.row_vars[ri]:
            m = self.mask[v]
            if not (m & (m - 1)):
                continue
            base_lo = lo_all - c * self.vmin[v]
            base_hi = hi_all - c * self.vmax[v]
            new_mask = 0
            mm = m
            while mm:
                val = _min_bit(mm)
                mm &= mm - 1
                lo_v = base_lo + c * val
                hi_v = base_hi + c * val
                ceil = self._ceil_allowed(ri, lo_v)
                if ceil is not None and ceil <= hi_v:
                    new_mask |= 1 << val
            if not self._set_mask(v, new_mask, trail, queue):
                return False
        return True

    def _propagate(self, queue, trail):
        while queue:
            ri = queue.pop()
            if not self._filter_row(ri, trail, queue):
                return False
        return True

    def _undo(self, trail, mark):
        while len(trail) > mark:
            v, old_mask, old_min, old_max = trail.pop()
            was_open = bool(self.mask[v] & (self.mask[v] - 1))
            dmin = old_min - self.vmin[v]
            dmax = old_max - self.vmax[v]
            self.mask[v] = old_mask
            self.vmin[v] = old_min
            self.vmax[v] = old_max
            now_open = bool(old_mask & (old_mask - 1))
            for ri, c in self.var_rows[v]:
                self.minrem[ri] += c * dmin
                self.maxrem[ri] += c * dmax
                if now_open and not was_open:
                    self.open_count[ri] += 1

    def _pick_var(self):
        best = None
        for v in range(self.nvars):
            m = self.mask[v]
            if m & (m - 1):
                key = (bin(m).count("1"), self.order_pos.get(v, v), v)
                if best is None or key < best[0]:
                    best = (key, v)
        return None if best is None else best[1]

    def search(self, max_nodes, max_seconds, max_solutions, emit):
        """Returns (nodes, status)."""
        nodes = 0
        found = 0
        start = time.monotonic()
        trail = []
        queue = set(range(len(self.rows)))
        if not self._propagate(queue, trail):
            return 0, STATUS_DONE
        status = [STATUS_DONE]

        def rec():
            nonlocal nodes, found
            v = self._pick_var()
            if v is None:
                # every row is at a fixpoint with singleton domains
                found += 1
                emit([self.vmin[w] for w in range(self.nvars)])
                if max_solutions >= 0 and found >= max_solutions:
                    status[0] = STATUS_SOLUTIONS
                    return False
                return True
            mm = self.mask[v]
            while mm:
                val = _min_bit(mm)
                mm &= mm - 1
                nodes += 1
                if max_nodes >= 0 and nodes > max_nodes:
                    status[0] = STATUS_NODES
                    return False
                if max_seconds >= 0 and nodes % 512 == 0 and \
                        time.monotonic() - start > max_seconds:
                    status[0] = STATUS_TIME
                    return False
                mark = len(trail)
                queue = set()
                ok = self._set_mask(v, 1 << val, trail, queue)
                if ok:
                    ok = self._propagate(queue, trail)
                if ok:
                    if not rec():
                        self._undo(trail, mark)
                        return False
                self._undo(trail, mark)
            return True

        rec()
        return nodes, status[0]
