# cython: language_level=3, boundscheck=False, wraparound=False
# cython: initializedcheck=False, cdivision=True
"""Compiled search kernel: branching plus domain-filtering propagation.

Mirrors _kernel_py.Kernel: bitmask domains (two 64-bit words), rows with
[minrem, maxrem] bounds over current domains, set-aware value filtering
against the allowed sums, a work queue to the filtering fixpoint, trail
based undo, min-domain branching with ascending values.  One node per
branching attempt; propagation is free.
"""

import time

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef inline int _min_bit(unsigned long long m0,
                         unsigned long long m1) nogil:
    cdef int i
    if m0:
        for i in range(64):
            if m0 & (<unsigned long long> 1 << i):
                return i
    for i in range(64):
        if m1 & (<unsigned long long> 1 << i):
            return 64 + i
    return -1


cdef inline int _max_bit(unsigned long long m0,
                         unsigned long long m1) nogil:
    cdef int i
    if m1:
        for i in range(63, -1, -1):
            if m1 & (<unsigned long long> 1 << i):
                return 64 + i
    for i in range(63, -1, -1):
        if m0 & (<unsigned long long> 1 << i):
            return i
    return -1


cdef inline int _popcount(unsigned long long x) nogil:
    cdef int n = 0
    while x:
        x &= x - 1
        n += 1
    return n


def search_cp(cnp.uint64_t[::1] mask0, cnp.uint64_t[::1] mask1,
              cnp.int64_t[::1] vmin, cnp.int64_t[::1] vmax,
              cnp.int64_t[::1] vr_counts, cnp.int64_t[::1] vr_offsets,
              cnp.int64_t[::1] vr_rows, cnp.int64_t[::1] vr_coeffs,
              cnp.int64_t[::1] rv_counts, cnp.int64_t[::1] rv_offsets,
              cnp.int64_t[::1] rv_vars, cnp.int64_t[::1] rv_coeffs,
              cnp.int64_t[:, ::1] ceil_allowed,
              cnp.int64_t[::1] minrem, cnp.int64_t[::1] maxrem,
              cnp.int64_t[::1] open_count, cnp.int64_t[::1] orderpos,
              long long max_nodes, double max_seconds,
              long long max_solutions, list out):
    """Returns (nodes, status); status 0=done 1=nodes 2=time 3=solutions."""
    cdef Py_ssize_t nvars = vmin.shape[0]
    cdef Py_ssize_t n_rows = minrem.shape[0]
    cdef Py_ssize_t width = ceil_allowed.shape[1] - 1
    cdef long long nodes = 0
    cdef long long found = 0
    cdef int status = 0
    cdef double t0 = time.monotonic()

    # trail of (var, old mask words, old min, old max)
    cdef Py_ssize_t tcap = 140 * nvars + 1024
    t_var_arr = np.zeros(tcap, dtype=np.int64)
    t_m0_arr = np.zeros(tcap, dtype=np.uint64)
    t_m1_arr = np.zeros(tcap, dtype=np.uint64)
    t_min_arr = np.zeros(tcap, dtype=np.int64)
    t_max_arr = np.zeros(tcap, dtype=np.int64)
    cdef cnp.int64_t[::1] t_var = t_var_arr
    cdef cnp.uint64_t[::1] t_m0 = t_m0_arr
    cdef cnp.uint64_t[::1] t_m1 = t_m1_arr
    cdef cnp.int64_t[::1] t_min = t_min_arr
    cdef cnp.int64_t[::1] t_max = t_max_arr
    cdef Py_ssize_t trail_len = 0

    in_queue_arr = np.zeros(max(n_rows, 1), dtype=np.uint8)
    queue_arr = np.zeros(max(n_rows, 1) + 4, dtype=np.int64)
    cdef cnp.uint8_t[::1] in_queue = in_queue_arr
    cdef cnp.int64_t[::1] queue = queue_arr
    cdef Py_ssize_t qlen = 0

    frame_arr = np.zeros(nvars + 2, dtype=np.int64)
    bvar_arr = np.full(nvars + 2, -1, dtype=np.int64)
    bmask0_arr = np.zeros(nvars + 2, dtype=np.uint64)
    bmask1_arr = np.zeros(nvars + 2, dtype=np.uint64)
    cdef cnp.int64_t[::1] frame = frame_arr
    cdef cnp.int64_t[::1] bvar = bvar_arr
    cdef cnp.uint64_t[::1] bmask0 = bmask0_arr
    cdef cnp.uint64_t[::1] bmask1 = bmask1_arr
    cdef Py_ssize_t depth = 0

    cdef Py_ssize_t i, j, ri, v, w
    cdef long long c, lo_all, hi_all, base_lo, base_hi, lo_v, hi_v
    cdef long long val, dmin, dmax, ceilv
    cdef unsigned long long m0, m1, nm0, nm1, bit
    cdef int ok, was_open, now_open, nbit, xbit
    cdef Py_ssize_t best_v
    cdef long long best_key0, best_key1

    # push every row once for the initial propagation
    for ri in range(n_rows):
        if not in_queue[ri]:
            in_queue[ri] = 1
            queue[qlen] = ri
            qlen += 1

    ok = 1
    while qlen > 0 and ok:
        qlen -= 1
        ri = queue[qlen]
        in_queue[ri] = 0
        # filter row ri
        lo_all = minrem[ri]
        hi_all = maxrem[ri]
        if lo_all < 0:
            lo_all = 0
        if lo_all > width or ceil_allowed[ri, lo_all] > hi_all:
            ok = 0
            break
        if open_count[ri] == 0:
            continue
        for j in range(rv_counts[ri]):
            v = rv_vars[rv_offsets[ri] + j]
            m0 = mask0[v]
            m1 = mask1[v]
            if _popcount(m0) + _popcount(m1) <= 1:
                continue
            c = rv_coeffs[rv_offsets[ri] + j]
            base_lo = minrem[ri] - c * vmin[v]
            base_hi = maxrem[ri] - c * vmax[v]
            nm0 = 0
            nm1 = 0
            for xbit in range(128):
                if xbit < 64:
                    bit = m0 & (<unsigned long long> 1 << xbit)
                else:
                    bit = m1 & (<unsigned long long> 1 << (xbit - 64))
                if not bit:
                    continue
                lo_v = base_lo + c * xbit
                hi_v = base_hi + c * xbit
                if lo_v < 0:
                    lo_v = 0
                if lo_v <= width and ceil_allowed[ri, lo_v] <= hi_v:
                    if xbit < 64:
                        nm0 |= <unsigned long long> 1 << xbit
                    else:
                        nm1 |= <unsigned long long> 1 << (xbit - 64)
            if nm0 == m0 and nm1 == m1:
                continue
            if nm0 == 0 and nm1 == 0:
                ok = 0
                break
            # record and apply the narrowed mask
            t_var[trail_len] = v
            t_m0[trail_len] = m0
            t_m1[trail_len] = m1
            t_min[trail_len] = vmin[v]
            t_max[trail_len] = vmax[v]
            trail_len += 1
            was_open = 1
            mask0[v] = nm0
            mask1[v] = nm1
            nbit = _min_bit(nm0, nm1)
            dmin = nbit - vmin[v]
            vmin[v] = nbit
            nbit = _max_bit(nm0, nm1)
            dmax = nbit - vmax[v]
            vmax[v] = nbit
            now_open = 1 if (_popcount(nm0) + _popcount(nm1)) > 1 else 0
            for i in range(vr_counts[v]):
                w = vr_rows[vr_offsets[v] + i]
                c = vr_coeffs[vr_offsets[v] + i]
                minrem[w] += c * dmin
                maxrem[w] += c * dmax
                if not now_open:
                    open_count[w] -= 1
                if not in_queue[w]:
                    in_queue[w] = 1
                    queue[qlen] = w
                    qlen += 1
            c = rv_coeffs[rv_offsets[ri] + j]
    if not ok:
        return 0, 0

    frame[0] = trail_len
    bvar[0] = -1

    while depth >= 0:
        if bvar[depth] < 0:
            # pick the open variable with the smallest domain
            best_v = -1
            best_key0 = 0
            best_key1 = 0
            for v in range(nvars):
                nbit = _popcount(mask0[v]) + _popcount(mask1[v])
                if nbit > 1:
                    if best_v < 0 or nbit < best_key0 or \
                            (nbit == best_key0 and
                             orderpos[v] < best_key1):
                        best_v = v
                        best_key0 = nbit
                        best_key1 = orderpos[v]
            if best_v < 0:
                found += 1
                sol = [0] * nvars
                for i in range(nvars):
                    sol[i] = vmin[i]
                out.append(sol)
                if max_solutions >= 0 and found >= max_solutions:
                    status = 3
                    break
                depth -= 1
                if depth >= 0:
                    while trail_len > frame[depth + 1]:
                        trail_len -= 1
                        v = t_var[trail_len]
                        was_open = 1 if (_popcount(mask0[v])
                                         + _popcount(mask1[v])) > 1 else 0
                        dmin = t_min[trail_len] - vmin[v]
                        dmax = t_max[trail_len] - vmax[v]
                        mask0[v] = t_m0[trail_len]
                        mask1[v] = t_m1[trail_len]
                        vmin[v] = t_min[trail_len]
                        vmax[v] = t_max[trail_len]
                        for i in range(vr_counts[v]):
                            w = vr_rows[vr_offsets[v] + i]
                            c = vr_coeffs[vr_offsets[v] + i]
                            minrem[w] += c * dmin
                            maxrem[w] += c * dmax
                            if not was_open:
                                open_count[w] += 1
                continue
            bvar[depth] = best_v
            bmask0[depth] = mask0[best_v]
            bmask1[depth] = mask1[best_v]
            frame[depth + 1] = trail_len
        v = bvar[depth]
        # next untried value from the frame's saved mask
        nbit = _min_bit(bmask0[depth], bmask1[depth])
        if nbit < 0:
            bvar[depth] = -1
            depth -= 1
            if depth >= 0:
                while trail_len > frame[depth + 1]:
                    trail_len -= 1
                    w = t_var[trail_len]
                    was_open = 1 if (_popcount(mask0[w])
                                     + _popcount(mask1[w])) > 1 else 0
                    dmin = t_min[trail_len] - vmin[w]
                    dmax = t_max[trail_len] - vmax[w]
                    mask0[w] = t_m0[trail_len]
                    mask1[w] = t_m1[trail_len]
                    vmin[w] = t_min[trail_len]
                    vmax[w] = t_max[trail_len]
                    for i in range(vr_counts[w]):
                        ri = vr_rows[vr_offsets[w] + i]
                        c = vr_coeffs[vr_offsets[w] + i]
                        minrem[ri] += c * dmin
                        maxrem[ri] += c * dmax
                        if not was_open:
                            open_count[ri] += 1
            continue
        if nbit < 64:
            bmask0[depth] &= bmask0[depth] - 1
        else:
            bmask1[depth] &= bmask1[depth] - 1
        val = nbit
        nodes += 1
        if max_nodes >= 0 and nodes > max_nodes:
            status = 1
            break
        if max_seconds >= 0 and (nodes & 511) == 0:
            if time.monotonic() - t0 > max_seconds:
                status = 2
                break
        # assign v = val (narrow mask), then propagate to fixpoint
        t_var[trail_len] = v
        t_m0[trail_len] = mask0[v]
        t_m1[trail_len] = mask1[v]
        t_min[trail_len] = vmin[v]
        t_max[trail_len] = vmax[v]
        trail_len += 1
        if val < 64:
            mask0[v] = <unsigned long long> 1 << val
            mask1[v] = 0
        else:
            mask0[v] = 0
            mask1[v] = <unsigned long long> 1 << (val - 64)
        dmin = val - vmin[v]
        dmax = val - vmax[v]
        vmin[v] = val
        vmax[v] = val
        qlen = 0
        for i in range(vr_counts[v]):
            w = vr_rows[vr_offsets[v] + i]
            c = vr_coeffs[vr_offsets[v] + i]
            minrem[w] += c * dmin
            maxrem[w] += c * dmax
            open_count[w] -= 1
            if not in_queue[w]:
                in_queue[w] = 1
                queue[qlen] = w
                qlen += 1
        ok = 1
        while qlen > 0:
            qlen -= 1
            ri = queue[qlen]
            in_queue[ri] = 0
            lo_all = minrem[ri]
            hi_all = maxrem[ri]
            if lo_all < 0:
                lo_all = 0
            if lo_all > width or ceil_allowed[ri, lo_all] > hi_all:
                ok = 0
                break
            if open_count[ri] == 0:
                continue
            for j in range(rv_counts[ri]):
                v = rv_vars[rv_offsets[ri] + j]
                m0 = mask0[v]
                m1 = mask1[v]
                if _popcount(m0) + _popcount(m1) <= 1:
                    continue
                c = rv_coeffs[rv_offsets[ri] + j]
                base_lo = minrem[ri] - c * vmin[v]
                base_hi = maxrem[ri] - c * vmax[v]
                nm0 = 0
                nm1 = 0
                for xbit in range(vmin[v], vmax[v] + 1):
                    if xbit < 64:
                        bit = m0 & (<unsigned long long> 1 << xbit)
                    else:
                        bit = m1 & (<unsigned long long> 1 << (xbit - 64))
                    if not bit:
                        continue
                    lo_v = base_lo + c * xbit
                    hi_v = base_hi + c * xbit
                    if lo_v < 0:
                        lo_v = 0
                    if lo_v <= width and ceil_allowed[ri, lo_v] <= hi_v:
                        if xbit < 64:
                            nm0 |= <unsigned long long> 1 << xbit
                        else:
                            nm1 |= <unsigned long long> 1 << (xbit - 64)
                if nm0 == m0 and nm1 == m1:
                    continue
                if nm0 == 0 and nm1 == 0:
                    ok = 0
                    break
                t_var[trail_len] = v
                t_m0[trail_len] = m0
                t_m1[trail_len] = m1
                t_min[trail_len] = vmin[v]
                t_max[trail_len] = vmax[v]
                trail_len += 1
                mask0[v] = nm0
                mask1[v] = nm1
                nbit = _min_bit(nm0, nm1)
                dmin = nbit - vmin[v]
                vmin[v] = nbit
                nbit = _max_bit(nm0, nm1)
                dmax = nbit - vmax[v]
                vmax[v] = nbit
                now_open = 1 if (_popcount(nm0) + _popcount(nm1)) > 1 else 0
                for i in range(vr_counts[v]):
                    w = vr_rows[vr_offsets[v] + i]
                    c = vr_coeffs[vr_offsets[v] + i]
                    minrem[w] += c * dmin
                    maxrem[w] += c * dmax
                    if not now_open:
                        open_count[w] -= 1
                    if not in_queue[w]:
                        in_queue[w] = 1
                        queue[qlen] = w
                        qlen += 1
            if not ok:
                break
        if ok:
            depth += 1
            frame[depth + 1] = trail_len
            bvar[depth] = -1
        else:
            # clear queue flags left by the failed propagation
            while qlen > 0:
                qlen -= 1
                in_queue[queue[qlen]] = 0
            while trail_len > frame[depth + 1]:
                trail_len -= 1
                w = t_var[trail_len]
                was_open = 1 if (_popcount(mask0[w])
                                 + _popcount(mask1[w])) > 1 else 0
                dmin = t_min[trail_len] - vmin[w]
                dmax = t_max[trail_len] - vmax[w]
                mask0[w] = t_m0[trail_len]
                mask1[w] = t_m1[trail_len]
                vmin[w] = t_min[trail_len]
                vmax[w] = t_max[trail_len]
                for i in range(vr_counts[w]):
                    ri = vr_rows[vr_offsets[w] + i]
                    c = vr_coeffs[vr_offsets[w] + i]
                    minrem[ri] += c * dmin
                    maxrem[ri] += c * dmax
                    if not was_open:
                        open_count[ri] += 1
    return nodes, status
