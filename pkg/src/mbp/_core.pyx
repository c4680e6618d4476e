# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the mechanism and condition hot paths.

Function-for-function mirror of ``mbp._pycore``; the two backends must stay
behaviourally identical (same tie-breaking, same scan orders). All kernels
take the flat int32 arrays produced by ``mbp.market.pack_market``.
OUTSIDE is -1.
"""
import numpy as np

cimport numpy as cnp
from libc.stdlib cimport free, malloc

cnp.import_array()

BACKEND_NAME = "compiled"


cdef inline int* _imalloc(Py_ssize_t count) except NULL:
    cdef int* buf = <int*> malloc(count * sizeof(int) if count > 0 else sizeof(int))
    if buf == NULL:
        raise MemoryError()
    return buf


def student_da(int[::1] pref_data, int[::1] pref_ptr,
               int[::1] prio_data, int[::1] prio_ptr, int[::1] cap):
    cdef Py_ssize_t n = pref_ptr.shape[0] - 1
    cdef Py_ssize_t m = prio_ptr.shape[0] - 1
    out = np.full(n, -1, dtype=np.int32)
    cdef int[::1] assignment = out
    if n == 0:
        return out
    cdef int* prio_pos = _imalloc(n * m)
    cdef int* nxt = _imalloc(n)
    cdef int* held_off = _imalloc(m + 1)
    cdef int* stack = _imalloc(n)
    cdef Py_ssize_t i, s, k, total
    cdef int j, r, top, worst, wk, hcount
    try:
        for k in range(n * m):
            prio_pos[k] = -1
        for s in range(m):
            for k in range(prio_ptr[s], prio_ptr[s + 1]):
                prio_pos[s * n + prio_data[k]] = <int>(k - prio_ptr[s])
        held_off[0] = 0
        for s in range(m):
            held_off[s + 1] = held_off[s] + cap[s]
        total = held_off[m]
        held_students = _imalloc(total)
        held_ranks = _imalloc(total)
        nheld = _imalloc(m)
        try:
            for s in range(m):
                nheld[s] = 0
            for i in range(n):
                nxt[i] = pref_ptr[i]
                stack[i] = <int>(n - 1 - i)
            top = <int>n
            while top > 0:
                top -= 1
                i = stack[top]
                while nxt[i] < pref_ptr[i + 1]:
                    s = pref_data[nxt[i]]
                    nxt[i] += 1
                    r = prio_pos[s * n + i]
                    if r < 0:
                        continue
                    hcount = nheld[s]
                    if hcount < cap[s]:
                        held_students[held_off[s] + hcount] = <int>i
                        held_ranks[held_off[s] + hcount] = r
                        nheld[s] = hcount + 1
                        break
                    worst = 0
                    for wk in range(1, hcount):
                        if held_ranks[held_off[s] + wk] > held_ranks[held_off[s] + worst]:
                            worst = wk
                    if r < held_ranks[held_off[s] + worst]:
                        stack[top] = held_students[held_off[s] + worst]
                        top += 1
                        held_students[held_off[s] + worst] = <int>i
                        held_ranks[held_off[s] + worst] = r
                        break
            for s in range(m):
                for wk in range(nheld[s]):
                    assignment[held_students[held_off[s] + wk]] = <int>s
        finally:
            free(held_students)
            free(held_ranks)
            free(nheld)
    finally:
        free(prio_pos)
        free(nxt)
        free(held_off)
        free(stack)
    return out


def school_da(int[::1] pref_data, int[::1] pref_ptr,
              int[::1] prio_data, int[::1] prio_ptr, int[::1] cap):
    cdef Py_ssize_t n = pref_ptr.shape[0] - 1
    cdef Py_ssize_t m = prio_ptr.shape[0] - 1
    out = np.full(n, -1, dtype=np.int32)
    cdef int[::1] best = out
    if m == 0 or n == 0:
        return out
    cdef int* pref_pos = _imalloc(n * m)
    cdef int* ptr = _imalloc(m)
    cdef int* nheld = _imalloc(m)
    cdef int* best_rank = _imalloc(n)
    cdef Py_ssize_t stack_cap = pref_data.shape[0] + m + 1
    cdef int* stack = _imalloc(stack_cap)
    cdef Py_ssize_t i, s, k
    cdef int r, top, old
    try:
        for k in range(n * m):
            pref_pos[k] = -1
        for i in range(n):
            for k in range(pref_ptr[i], pref_ptr[i + 1]):
                pref_pos[i * m + pref_data[k]] = <int>(k - pref_ptr[i])
            best_rank[i] = 2147483647
        for s in range(m):
            ptr[s] = prio_ptr[s]
            nheld[s] = 0
            stack[s] = <int>(m - 1 - s)
        top = <int>m
        while top > 0:
            top -= 1
            s = stack[top]
            while nheld[s] < cap[s] and ptr[s] < prio_ptr[s + 1]:
                i = prio_data[ptr[s]]
                ptr[s] += 1
                r = pref_pos[i * m + s]
                if r < 0:
                    continue
                if r < best_rank[i]:
                    old = best[i]
                    if old >= 0:
                        nheld[old] -= 1
                        stack[top] = old
                        top += 1
                    best[i] = <int>s
                    best_rank[i] = r
                    nheld[s] += 1
    finally:
        free(pref_pos)
        free(ptr)
        free(nheld)
        free(best_rank)
        free(stack)
    return out


def ttc(int[::1] pref_data, int[::1] pref_ptr,
        int[::1] prio_data, int[::1] prio_ptr, int[::1] cap):
    cdef Py_ssize_t n = pref_ptr.shape[0] - 1
    cdef Py_ssize_t m = prio_ptr.shape[0] - 1
    out = np.full(n, -1, dtype=np.int32)
    cdef int[::1] assignment = out
    if n == 0:
        return out
    cdef int* alive = _imalloc(n)
    cdef int* rem = _imalloc(m)
    cdef int* sp = _imalloc(n)
    cdef int* pp = _imalloc(m)
    cdef int* target = _imalloc(n + m)
    cdef int* color = _imalloc(n + m)
    cdef int* path = _imalloc(n + m)
    cdef int* outside = _imalloc(n)
    cdef int* on_path = _imalloc(n + m)
    cdef Py_ssize_t i, s, k
    cdef int stamp = 0, nalive, nout, plen, v, node, start, cyc
    try:
        for i in range(n):
            alive[i] = 1
            sp[i] = pref_ptr[i]
        for s in range(m):
            rem[s] = cap[s]
            pp[s] = prio_ptr[s]
        for k in range(n + m):
            color[k] = 0
            on_path[k] = 0
        nalive = <int>n
        while nalive > 0:
            stamp += 1
            nout = 0
            for i in range(n):
                if not alive[i]:
                    continue
                while sp[i] < pref_ptr[i + 1] and rem[pref_data[sp[i]]] == 0:
                    sp[i] += 1
                if sp[i] == pref_ptr[i + 1]:
                    outside[nout] = <int>i
                    nout += 1
                    target[i] = -1
                else:
                    target[i] = <int>n + pref_data[sp[i]]
            for s in range(m):
                if rem[s] == 0:
                    continue
                while pp[s] < prio_ptr[s + 1] and not alive[prio_data[pp[s]]]:
                    pp[s] += 1
                if pp[s] < prio_ptr[s + 1]:
                    target[n + s] = prio_data[pp[s]]
                else:
                    target[n + s] = -1
            # find every cycle of the pointer graph in this round
            for start in range(n):
                if not alive[start] or color[start] == stamp:
                    continue
                plen = 0
                v = start
                while v != -1 and color[v] != stamp:
                    color[v] = stamp
                    on_path[v] = 1
                    path[plen] = v
                    plen += 1
                    v = target[v]
                if v != -1 and on_path[v]:
                    cyc = 0
                    while path[cyc] != v:
                        cyc += 1
                    for k in range(cyc, plen):
                        node = path[k]
                        if node < n:
                            s = target[node] - n
                            assignment[node] = <int>s
                            rem[s] -= 1
                            alive[node] = 0
                            nalive -= 1
                for k in range(plen):
                    on_path[path[k]] = 0
            for k in range(nout):
                i = outside[k]
                if alive[i]:
                    alive[i] = 0
                    nalive -= 1
    finally:
        free(alive)
        free(rem)
        free(sp)
        free(pp)
        free(target)
        free(color)
        free(path)
        free(outside)
        free(on_path)
    return out


def simplify_market(int[::1] pref_data, int[::1] pref_ptr,
                    int[::1] prio_data, int[::1] prio_ptr, int[::1] cap):
    """Iterated truncation at the first safe school, to a fixed point.

    Returns (plen, safe, rounds); see the reference backend for details.
    """
    cdef Py_ssize_t n = pref_ptr.shape[0] - 1
    cdef Py_ssize_t m = prio_ptr.shape[0] - 1
    plen_arr = np.empty(n, dtype=np.int32)
    safe_arr = np.full(n, -1, dtype=np.int32)
    cdef int[::1] plen = plen_arr
    cdef int[::1] safe = safe_arr
    cdef Py_ssize_t i, s, k
    cdef int c, p, pos, found, changed, rounds = 0, lo
    if n == 0:
        return plen_arr, safe_arr, 0
    cdef int* pref_pos = _imalloc(n * m)
    cdef int* frank = _imalloc(m * n)
    try:
        for k in range(n * m):
            pref_pos[k] = -1
        for i in range(n):
            for k in range(pref_ptr[i], pref_ptr[i + 1]):
                pref_pos[i * m + pref_data[k]] = <int>(k - pref_ptr[i])
            plen[i] = pref_ptr[i + 1] - pref_ptr[i]
        for k in range(m * n):
            frank[k] = 2147483647
        while True:
            for s in range(m):
                c = 0
                for k in range(prio_ptr[s], prio_ptr[s + 1]):
                    p = pref_pos[prio_data[k] * m + s]
                    if 0 <= p < plen[prio_data[k]]:
                        frank[s * n + prio_data[k]] = c
                        c += 1
            changed = 0
            for i in range(n):
                lo = pref_ptr[i]
                found = -1
                for pos in range(plen[i]):
                    s = pref_data[lo + pos]
                    if frank[s * n + i] < cap[s]:
                        found = <int>s
                        if pos + 1 < plen[i]:
                            plen[i] = pos + 1
                            changed = 1
                        break
                safe[i] = found
            if not changed:
                break
            rounds += 1
    finally:
        free(pref_pos)
        free(frank)
    return plen_arr, safe_arr, rounds


def seq_mbp(int[::1] pref_data, int[::1] pref_ptr,
            int[::1] prio_data, int[::1] prio_ptr, int[::1] cap):
    """Greedy sequential mutually-best-pairs search (ascending student scan).

    Returns an (n, 2) int32 array of (student, school-or--1) steps when the
    condition holds, else None.
    """
    cdef Py_ssize_t n = pref_ptr.shape[0] - 1
    cdef Py_ssize_t m = prio_ptr.shape[0] - 1
    steps_arr = np.empty((n, 2), dtype=np.int32)
    cdef int[:, ::1] steps = steps_arr
    if n == 0:
        return steps_arr
    cdef Py_ssize_t plsize = prio_data.shape[0]
    cdef int* alive = _imalloc(n)
    cdef int* rem = _imalloc(m)
    cdef int* bp = _imalloc(n)
    cdef int* pbuf = _imalloc(plsize if plsize > 0 else 1)
    cdef int* poff = _imalloc(m + 1)
    cdef int* pcnt = _imalloc(m)
    cdef Py_ssize_t i, s, k, w
    cdef int nsteps = 0, remaining, removed, matched, c, ok, j
    try:
        for i in range(n):
            alive[i] = 1
            bp[i] = pref_ptr[i]
        poff[0] = 0
        for s in range(m):
            rem[s] = cap[s]
            poff[s + 1] = prio_ptr[s + 1]
            pcnt[s] = prio_ptr[s + 1] - prio_ptr[s]
            for k in range(prio_ptr[s], prio_ptr[s + 1]):
                pbuf[k] = prio_data[k]
        remaining = <int>n
        removed = 0
        while remaining > 0:
            for i in range(n):
                if not alive[i]:
                    continue
                while bp[i] < pref_ptr[i + 1] and rem[pref_data[bp[i]]] == 0:
                    bp[i] += 1
                if bp[i] == pref_ptr[i + 1]:
                    steps[nsteps, 0] = <int>i
                    steps[nsteps, 1] = -1
                    nsteps += 1
                    alive[i] = 0
                    remaining -= 1
                    removed += 1
            if remaining == 0:
                break
            if removed * 8 >= n:
                for s in range(m):
                    w = poff[s]
                    for k in range(poff[s], poff[s] + pcnt[s]):
                        if alive[pbuf[k]]:
                            pbuf[w] = pbuf[k]
                            w += 1
                    pcnt[s] = <int>(w - poff[s])
                removed = 0
            matched = 0
            for i in range(n):
                if not alive[i]:
                    continue
                s = pref_data[bp[i]]
                c = 0
                ok = 0
                for k in range(poff[s], poff[s] + pcnt[s]):
                    j = pbuf[k]
                    if j == i:
                        ok = c < rem[s]
                        break
                    if alive[j]:
                        c += 1
                        if c >= rem[s]:
                            break
                if ok:
                    steps[nsteps, 0] = <int>i
                    steps[nsteps, 1] = <int>s
                    nsteps += 1
                    rem[s] -= 1
                    alive[i] = 0
                    remaining -= 1
                    removed += 1
                    matched = 1
                    break
            if not matched:
                return None
    finally:
        free(alive)
        free(rem)
        free(bp)
        free(pbuf)
        free(poff)
        free(pcnt)
    return steps_arr


def pareto_improvable(int[::1] pref_data, int[::1] pref_ptr,
                      int[::1] cap, assignment):
    """Boolean mask of students with a Pareto-improving cycle or vacancy chain.

    The allocation is efficient iff no entry is True.
    """
    cdef Py_ssize_t n = pref_ptr.shape[0] - 1
    cdef Py_ssize_t m = cap.shape[0]
    assign_arr = np.ascontiguousarray(assignment, dtype=np.int32)
    cdef int[::1] assign = assign_arr
    out = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] improvable = out
    if n == 0 or m == 0:
        return out.astype(bool)
    cdef int* filled = _imalloc(m)
    cdef int* vacant = _imalloc(m)
    cdef int* direct_vac = _imalloc(m)
    cdef int* reaches_vac = _imalloc(m)
    cdef unsigned char* reach = <unsigned char*> malloc(m * m)
    cdef Py_ssize_t i, s, k, t, a
    cdef int hit
    if reach == NULL:
        free(filled); free(vacant); free(direct_vac); free(reaches_vac)
        raise MemoryError()
    try:
        for s in range(m):
            filled[s] = 0
            direct_vac[s] = 0
            for t in range(m):
                reach[s * m + t] = 0
        for i in range(n):
            if assign[i] >= 0:
                filled[assign[i]] += 1
        for s in range(m):
            vacant[s] = filled[s] < cap[s]
        # school-level improvement edges: a -> t iff a student at a prefers t
        for i in range(n):
            a = assign[i]
            if a < 0:
                continue
            hit = 0
            for k in range(pref_ptr[i], pref_ptr[i + 1]):
                t = pref_data[k]
                if t == a:
                    hit = 1
                    break
                reach[a * m + t] = 1
                if vacant[t]:
                    direct_vac[a] = 1
            if not hit:
                # assigned an unacceptable school: moving outside strictly
                # improves i and frees a seat at a for everyone else
                improvable[i] = 1
                direct_vac[a] = 1
        # transitive closure over >=1-edge paths (Floyd-Warshall)
        for k in range(m):
            for s in range(m):
                if reach[s * m + k]:
                    for t in range(m):
                        if reach[k * m + t]:
                            reach[s * m + t] = 1
        for s in range(m):
            reaches_vac[s] = direct_vac[s]
            if not reaches_vac[s]:
                for t in range(m):
                    if reach[s * m + t] and direct_vac[t]:
                        reaches_vac[s] = 1
                        break
        for i in range(n):
            if improvable[i]:
                continue
            a = assign[i]
            for k in range(pref_ptr[i], pref_ptr[i + 1]):
                t = pref_data[k]
                if t == a:
                    break
                if vacant[t] or reaches_vac[t] or (a >= 0 and reach[t * m + a]):
                    improvable[i] = 1
                    break
    finally:
        free(filled)
        free(vacant)
        free(direct_vac)
        free(reaches_vac)
        free(reach)
    return out.astype(bool)
