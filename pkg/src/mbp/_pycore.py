"""Pure-Python kernels for the mechanism and condition hot paths.

This module mirrors the compiled extension ``mbp._core`` function for
function; the two must stay behaviourally identical (same tie-breaking,
same scan orders). All kernels take the flat int32 arrays produced by
``mbp.market.pack_market`` and return numpy arrays. OUTSIDE is -1.
"""
from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def _pref_pos(pref_data, pref_ptr, n, m):
    """pos[i, s] = index of s in i's preference list, -1 if absent."""
    pos = np.full((n, m), -1, dtype=np.int32)
    for i in range(n):
        lo, hi = pref_ptr[i], pref_ptr[i + 1]
        pos[i, pref_data[lo:hi]] = np.arange(hi - lo, dtype=np.int32)
    return pos


def _prio_pos(prio_data, prio_ptr, n, m):
    """pos[s, i] = index of i in s's priority list, -1 if absent."""
    pos = np.full((m, n), -1, dtype=np.int32)
    for s in range(m):
        lo, hi = prio_ptr[s], prio_ptr[s + 1]
        pos[s, prio_data[lo:hi]] = np.arange(hi - lo, dtype=np.int32)
    return pos


def student_da(pref_data, pref_ptr, prio_data, prio_ptr, cap):
    n = len(pref_ptr) - 1
    m = len(prio_ptr) - 1
    prio_pos = _prio_pos(prio_data, prio_ptr, n, m)
    nxt = pref_ptr[:-1].astype(np.int64).tolist()
    held_students = [[] for _ in range(m)]
    held_ranks = [[] for _ in range(m)]
    assignment = np.full(n, -1, dtype=np.int32)
    stack = list(range(n - 1, -1, -1))
    while stack:
        i = stack.pop()
        while nxt[i] < pref_ptr[i + 1]:
            s = int(pref_data[nxt[i]])
            nxt[i] += 1
            r = int(prio_pos[s, i])
            if r < 0:
                continue
            if len(held_students[s]) < cap[s]:
                held_students[s].append(i)
                held_ranks[s].append(r)
                break
            ranks = held_ranks[s]
            worst = max(range(len(ranks)), key=ranks.__getitem__)
            if r < ranks[worst]:
                stack.append(held_students[s][worst])
                held_students[s][worst] = i
                ranks[worst] = r
                break
    for s in range(m):
        for i in held_students[s]:
            assignment[i] = s
    return assignment


def school_da(pref_data, pref_ptr, prio_data, prio_ptr, cap):
    n = len(pref_ptr) - 1
    m = len(prio_ptr) - 1
    pref_pos = _pref_pos(pref_data, pref_ptr, n, m)
    ptr = prio_ptr[:-1].astype(np.int64).tolist()
    nheld = [0] * m
    best = np.full(n, -1, dtype=np.int32)
    best_rank = np.full(n, 2**31 - 1, dtype=np.int32)
    stack = list(range(m - 1, -1, -1))
    while stack:
        s = stack.pop()
        while nheld[s] < cap[s] and ptr[s] < prio_ptr[s + 1]:
            i = int(prio_data[ptr[s]])
            ptr[s] += 1
            r = int(pref_pos[i, s])
            if r < 0:
                continue
            if r < best_rank[i]:
                old = int(best[i])
                if old >= 0:
                    nheld[old] -= 1
                    stack.append(old)
                best[i] = s
                best_rank[i] = r
                nheld[s] += 1
    return best


def ttc(pref_data, pref_ptr, prio_data, prio_ptr, cap):
    n = len(pref_ptr) - 1
    m = len(prio_ptr) - 1
    assignment = np.full(n, -1, dtype=np.int32)
    alive = [True] * n
    rem = cap.astype(np.int64).tolist()
    sp = pref_ptr[:-1].astype(np.int64).tolist()
    pp = prio_ptr[:-1].astype(np.int64).tolist()
    nalive = n
    # node ids: students 0..n-1, schools n..n+m-1
    target = [0] * (n + m)
    color = [0] * (n + m)
    stamp = 0
    while nalive:
        stamp += 1
        outside = []
        for i in range(n):
            if not alive[i]:
                continue
            while sp[i] < pref_ptr[i + 1] and rem[pref_data[sp[i]]] == 0:
                sp[i] += 1
            if sp[i] == pref_ptr[i + 1]:
                outside.append(i)
                target[i] = -1
            else:
                target[i] = n + int(pref_data[sp[i]])
        for s in range(m):
            if rem[s] == 0:
                continue
            while pp[s] < prio_ptr[s + 1] and not alive[prio_data[pp[s]]]:
                pp[s] += 1
            target[n + s] = (
                int(prio_data[pp[s]]) if pp[s] < prio_ptr[s + 1] else -1
            )
        # find every cycle of the pointer graph in this round
        for start in range(n):
            if not alive[start] or color[start] == stamp:
                continue
            path = []
            v = start
            while v != -1 and color[v] != stamp:
                color[v] = stamp
                path.append(v)
                v = target[v]
            if v != -1 and v in path:
                k = path.index(v)
                for node in path[k:]:
                    if node < n:
                        s = target[node] - n
                        assignment[node] = s
                        rem[s] -= 1
                        alive[node] = False
                        nalive -= 1
        for i in outside:
            if alive[i]:
                alive[i] = False
                nalive -= 1
    return assignment


def simplify_market(pref_data, pref_ptr, prio_data, prio_ptr, cap):
    """Iterated truncation at the first safe school, to a fixed point.

    Returns (plen, safe, rounds): the truncated preference-list lengths,
    the per-student safe school (-1 if none), and the number of passes
    that changed a list. The filtered priority lists are implied: student
    j stays on school s's list iff s is within j's truncated prefix.
    """
    n = len(pref_ptr) - 1
    m = len(prio_ptr) - 1
    pref_pos = _pref_pos(pref_data, pref_ptr, n, m)
    plen = (pref_ptr[1:] - pref_ptr[:-1]).astype(np.int32)
    safe = np.full(n, -1, dtype=np.int32)
    frank = np.full((m, n), 2**31 - 1, dtype=np.int32)
    rounds = 0
    while True:
        for s in range(m):
            c = 0
            for k in range(prio_ptr[s], prio_ptr[s + 1]):
                j = int(prio_data[k])
                p = pref_pos[j, s]
                if 0 <= p < plen[j]:
                    frank[s, j] = c
                    c += 1
        changed = False
        for i in range(n):
            lo = int(pref_ptr[i])
            found = -1
            for pos in range(int(plen[i])):
                s = int(pref_data[lo + pos])
                if frank[s, i] < cap[s]:
                    found = s
                    if pos + 1 < plen[i]:
                        plen[i] = pos + 1
                        changed = True
                    break
            safe[i] = found
        if not changed:
            break
        rounds += 1
    return plen, safe, rounds


def seq_mbp(pref_data, pref_ptr, prio_data, prio_ptr, cap):
    """Greedy sequential mutually-best-pairs search (ascending student scan).

    Returns an (n, 2) int32 array of (student, school-or--1) steps when the
    condition holds, else None.
    """
    n = len(pref_ptr) - 1
    m = len(prio_ptr) - 1
    alive = np.ones(n, dtype=bool)
    rem = cap.astype(np.int64).tolist()
    bp = pref_ptr[:-1].astype(np.int64).tolist()
    plists = [
        [int(j) for j in prio_data[prio_ptr[s] : prio_ptr[s + 1]]]
        for s in range(m)
    ]
    steps = np.empty((n, 2), dtype=np.int32)
    nsteps = 0
    remaining = n
    removed_since_compact = 0
    while remaining:
        for i in range(n):
            if not alive[i]:
                continue
            while bp[i] < pref_ptr[i + 1] and rem[pref_data[bp[i]]] == 0:
                bp[i] += 1
            if bp[i] == pref_ptr[i + 1]:
                steps[nsteps] = (i, -1)
                nsteps += 1
                alive[i] = False
                remaining -= 1
                removed_since_compact += 1
        if not remaining:
            break
        if removed_since_compact * 8 >= n:
            plists = [[j for j in lst if alive[j]] for lst in plists]
            removed_since_compact = 0
        matched = False
        for i in range(n):
            if not alive[i]:
                continue
            s = int(pref_data[bp[i]])
            c = 0
            ok = False
            for j in plists[s]:
                if j == i:
                    ok = c < rem[s]
                    break
                if alive[j]:
                    c += 1
                    if c >= rem[s]:
                        break
            if ok:
                steps[nsteps] = (i, s)
                nsteps += 1
                rem[s] -= 1
                alive[i] = False
                remaining -= 1
                removed_since_compact += 1
                matched = True
                break
        if not matched:
            return None
    return steps


def pareto_improvable(pref_data, pref_ptr, cap, assignment):
    """Boolean mask of students with a Pareto-improving cycle or vacancy chain.

    The allocation is efficient iff no entry is True.
    """
    n = len(pref_ptr) - 1
    m = len(cap)
    assignment = np.asarray(assignment, dtype=np.int32)
    filled = np.zeros(m, dtype=np.int64)
    for a in assignment:
        if a >= 0:
            filled[a] += 1
    vacant = filled < cap
    # school-level improvement edges: a -> t iff a student at a prefers t
    adj = [0] * m
    direct_vac = [False] * m
    non_ir = np.zeros(n, dtype=bool)
    for i in range(n):
        a = int(assignment[i])
        if a < 0:
            continue
        hit = False
        for k in range(pref_ptr[i], pref_ptr[i + 1]):
            t = int(pref_data[k])
            if t == a:
                hit = True
                break
            adj[a] |= 1 << t
            if vacant[t]:
                direct_vac[a] = True
        if not hit:
            # assigned an unacceptable school: moving outside strictly
            # improves i and frees a seat at a for everyone else
            non_ir[i] = True
            direct_vac[a] = True
    # transitive closure over >=1-edge paths (bitset Floyd-Warshall)
    reach = list(adj)
    for k in range(m):
        bit = 1 << k
        rk = reach[k]
        for s in range(m):
            if reach[s] & bit:
                reach[s] |= rk
    dv_mask = 0
    for s in range(m):
        if direct_vac[s]:
            dv_mask |= 1 << s
    reaches_vac = [direct_vac[s] or bool(reach[s] & dv_mask) for s in range(m)]
    improvable = non_ir.copy()
    for i in range(n):
        if improvable[i]:
            continue
        a = int(assignment[i])
        abit = (1 << a) if a >= 0 else 0
        for k in range(pref_ptr[i], pref_ptr[i + 1]):
            t = int(pref_data[k])
            if t == a:
                break
            if vacant[t] or reaches_vac[t] or (a >= 0 and reach[t] & abit):
                improvable[i] = True
                break
    return improvable
