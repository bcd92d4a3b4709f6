"""Compiled inner loops for spiral wind-up, unwinding and enumeration.

All routines work on the dual triangulation: dual vertices are faces, dual
triangles are graph vertices.  The open boundary of a partial spiral patch is
kept as a deque ``bnd[head:tail]`` whose front is the oldest open face and
whose back is the most recently added one.  ``rem[f]`` is the number of dual
edges face ``f`` still needs (face size minus neighbours placed so far).
"""

from __future__ import annotations

import numpy as np
from numba import njit

FAIL = -1


@njit(cache=True, inline="always")
def _connect_ok(ipr, sz, a, b):
    return not (ipr and sz[a] == 5 and sz[b] == 5)


@njit(cache=True)
def _step(x, size, last, bnd, head, tail, rem, sz, ipr, tris, ntri):
    """Attach face ``x`` to the open boundary.

    Returns ``(head, tail, ntri)`` or ``head == FAIL``.  Triangles are written
    to ``tris`` only when ``ntri >= 0``.
    """
    record = ntri >= 0
    if last:
        length = tail - head
        if length != size:
            return FAIL, tail, ntri
        for i in range(head, tail):
            f = bnd[i]
            if rem[f] != 1 or not _connect_ok(ipr, sz, f, x):
                return FAIL, tail, ntri
        for i in range(head, tail):
            rem[bnd[i]] = 0
            if record:
                u = bnd[i]
                v = bnd[i + 1] if i + 1 < tail else bnd[head]
                tris[ntri, 0] = v
                tris[ntri, 1] = u
                tris[ntri, 2] = x
                ntri += 1
        return head, head, ntri

    if tail - head < 2:
        return FAIL, tail, ntri
    front = bnd[head]
    back = bnd[tail - 1]
    if not _connect_ok(ipr, sz, x, front) or not _connect_ok(ipr, sz, x, back):
        return FAIL, tail, ntri
    rem[front] -= 1
    rem[back] -= 1
    if rem[front] < 0 or rem[back] < 0:
        return FAIL, tail, ntri
    xrem = size - 2
    if record:
        tris[ntri, 0] = front
        tris[ntri, 1] = back
        tris[ntri, 2] = x
        ntri += 1
    while rem[bnd[head]] == 0:
        old = bnd[head]
        head += 1
        if tail - head < 2:
            return FAIL, tail, ntri
        nf = bnd[head]
        if not _connect_ok(ipr, sz, x, nf):
            return FAIL, tail, ntri
        rem[nf] -= 1
        xrem -= 1
        if rem[nf] < 0:
            return FAIL, tail, ntri
        if record:
            tris[ntri, 0] = nf
            tris[ntri, 1] = old
            tris[ntri, 2] = x
            ntri += 1
    while rem[bnd[tail - 1]] == 0:
        old = bnd[tail - 1]
        tail -= 1
        if tail - head < 2:
            return FAIL, tail, ntri
        nb = bnd[tail - 1]
        if not _connect_ok(ipr, sz, x, nb):
            return FAIL, tail, ntri
        rem[nb] -= 1
        xrem -= 1
        if rem[nb] < 0:
            return FAIL, tail, ntri
        if record:
            tris[ntri, 0] = old
            tris[ntri, 1] = nb
            tris[ntri, 2] = x
            ntri += 1
    if xrem <= 0:
        return FAIL, tail, ntri
    rem[x] = xrem
    bnd[tail] = x
    tail += 1
    return head, tail, ntri


@njit(cache=True)
def _start(sz, ipr, bnd, rem):
    """Place faces 0 and 1; returns False if they cannot be adjacent."""
    if not _connect_ok(ipr, sz, 0, 1):
        return False
    rem[0] = sz[0] - 1
    rem[1] = sz[1] - 1
    bnd[0] = 0
    bnd[1] = 1
    return True


@njit(cache=True)
def windup(sizes):
    """Wind a face-size sequence into oriented dual triangles.

    Returns an ``(n, 3)`` array of face-index triangles, or an empty array if
    the sequence does not close into a sphere.
    """
    m = sizes.shape[0]
    n = 2 * m - 4
    tris = np.zeros((n, 3), dtype=np.int32)
    empty = np.zeros((0, 3), dtype=np.int32)
    if m < 3:
        return empty
    sz = sizes.astype(np.int32)
    bnd = np.zeros(m + 2, dtype=np.int32)
    rem = np.zeros(m, dtype=np.int32)
    if not _start(sz, False, bnd, rem):
        return empty
    head, tail, ntri = 0, 2, 0
    for x in range(2, m):
        head, tail, ntri = _step(
            x, sz[x], x == m - 1, bnd, head, tail, rem, sz, False, tris, ntri
        )
        if head == FAIL:
            return empty
    if ntri != n:
        return empty
    return tris


@njit(cache=True)
def _unwind_compare(nxt, fsize, m, f0, f1, mirror, best, out, stamp, mark, bnd, rem, sz):
    """Read the spiral starting at faces ``f0, f1`` and compare it with ``best``.

    Returns -2 if the spiral is lexicographically larger (aborted early),
    -1 if no spiral exists from this start, 0 if equal, 1 if smaller.  The
    sequence read is left in ``out`` when the result is 0 or 1.
    """
    cmp = 0
    s0 = fsize[f0]
    if s0 > best[0]:
        return -2
    if s0 < best[0]:
        cmp = 1
    s1 = fsize[f1]
    if cmp == 0:
        if s1 > best[1]:
            return -2
        if s1 < best[1]:
            cmp = 1
    out[0] = s0
    out[1] = s1
    # map graph faces to spiral positions
    mark[f0] = stamp
    mark[f1] = stamp
    sz[0] = s0
    sz[1] = s1
    rem[0] = s0 - 1
    rem[1] = s1 - 1
    bnd[0] = 0
    bnd[1] = 1
    head, tail = 0, 2
    # spiral position -> face id, kept in the upper half of bnd storage
    order = bnd[m + 2:]
    order[0] = f0
    order[1] = f1
    dummy = np.zeros((1, 3), dtype=np.int32)
    for k in range(2, m):
        front = order[bnd[head]]
        back = order[bnd[tail - 1]]
        if mirror:
            x = nxt[back, front]
        else:
            x = nxt[front, back]
        if x < 0 or mark[x] == stamp:
            return -1
        mark[x] = stamp
        order[k] = x
        s = fsize[x]
        if cmp == 0:
            if s > best[k]:
                return -2
            if s < best[k]:
                cmp = 1
        out[k] = s
        sz[k] = s
        head, tail, _ = _step(
            k, s, k == m - 1, bnd, head, tail, rem, sz, False, dummy, -1
        )
        if head == FAIL:
            return -1
    return cmp


@njit(cache=True)
def canonical(nxt, fsize, adj, deg, best, reject_if_smaller):
    """Lexicographically least spiral over all starts and both orientations.

    ``best`` holds the incumbent; it is overwritten with the minimum found.
    With ``reject_if_smaller`` the search stops as soon as a strictly smaller
    spiral is confirmed and returns False.  Otherwise returns whether any
    spiral no larger than the incumbent exists.
    """
    m = fsize.shape[0]
    out = np.empty(m, dtype=np.int32)
    mark = np.zeros(m, dtype=np.int32)
    bnd = np.zeros(2 * m + 4, dtype=np.int32)
    rem = np.zeros(m, dtype=np.int32)
    sz = np.zeros(m, dtype=np.int32)
    stamp = 0
    found = False
    for f0 in range(m):
        if fsize[f0] > best[0]:
            continue
        for j in range(deg[f0]):
            f1 = adj[f0, j]
            for mirror in range(2):
                stamp += 1
                r = _unwind_compare(
                    nxt, fsize, m, f0, f1, mirror == 1, best, out, stamp, mark, bnd, rem, sz
                )
                if r == 0:
                    found = True
                elif r == 1:
                    if reject_if_smaller:
                        return False
                    found = True
                    for i in range(m):
                        best[i] = out[i]
    return found


@njit(cache=True)
def spiral_exists(nxt, fsize, adj, deg, target):
    """Whether the face sequence ``target`` is read from some start."""
    m = fsize.shape[0]
    out = np.empty(m, dtype=np.int32)
    mark = np.zeros(m, dtype=np.int32)
    bnd = np.zeros(2 * m + 4, dtype=np.int32)
    rem = np.zeros(m, dtype=np.int32)
    sz = np.zeros(m, dtype=np.int32)
    stamp = 0
    for f0 in range(m):
        for j in range(deg[f0]):
            for mirror in range(2):
                stamp += 1
                r = _unwind_compare(
                    nxt, fsize, m, f0, adj[f0, j], mirror == 1, target, out, stamp, mark, bnd, rem, sz
                )
                if r == 0:
                    return True
    return False


@njit(cache=True)
def dual_from_triangles(tris, m):
    """Successor table ``nxt[u, v]`` = third corner of the triangle on u->v."""
    nxt = np.full((m, m), -1, dtype=np.int32)
    for t in range(tris.shape[0]):
        a, b, c = tris[t, 0], tris[t, 1], tris[t, 2]
        nxt[a, b] = c
        nxt[b, c] = a
        nxt[c, a] = b
    adj = np.full((m, 6), -1, dtype=np.int32)
    deg = np.zeros(m, dtype=np.int32)
    for u in range(m):
        for v in range(m):
            if nxt[u, v] >= 0:
                if deg[u] >= 6:
                    return nxt, adj, deg, False
                adj[u, deg[u]] = v
                deg[u] += 1
    return nxt, adj, deg, True


@njit(cache=True)
def _is_canonical_candidate(sizes, tris):
    m = sizes.shape[0]
    nxt, adj, deg, ok = dual_from_triangles(tris, m)
    if not ok:
        return False
    fsize = sizes.astype(np.int32)
    best = fsize.copy()
    return canonical(nxt, fsize, adj, deg, best, True)


@njit(cache=True)
def enumerate_spirals(m, ipr, prefix, max_depth, max_out):
    """Depth-first search over face-size sequences in lexicographic order.

    Only sequences beginning with ``prefix`` are explored.  With
    ``max_depth < m`` the surviving partial sequences of that length are
    returned instead of complete spirals (used to cut the search into
    partitions).  Complete sequences are returned only when they wind up and
    are their own canonical spiral.  Returns ``(rows, count, visited)``.

    The boundary state is updated in place; ``log[k]`` records the faces
    whose open valency face ``k`` consumed, so backtracking is O(1).
    """
    depth_limit = m if max_depth >= m else max_depth
    out = np.zeros((max(max_out, 1), depth_limit), dtype=np.int8)
    nout = 0
    visited = 0
    bnd = np.zeros(m + 2, dtype=np.int64)
    rem = np.zeros(m, dtype=np.int64)
    log = np.zeros((m + 1, 8), dtype=np.int64)
    nlog = np.zeros(m + 1, dtype=np.int64)
    saved = np.zeros(m + 1, dtype=np.int64)
    head_s = np.zeros(m + 1, dtype=np.int64)
    tail_s = np.zeros(m + 1, dtype=np.int64)
    pent_s = np.zeros(m + 1, dtype=np.int64)
    choice = np.zeros(m + 1, dtype=np.int64)
    applied = np.zeros(m + 1, dtype=np.bool_)
    sz = np.zeros(m, dtype=np.int64)
    npre = prefix.shape[0]
    last_k = m - 1

    # level k decides face k; head_s/tail_s[k] is the boundary before it.
    k = 0
    choice[0] = 4
    while k >= 0:
        if applied[k]:
            bnd[tail_s[k + 1] - 1] = saved[k]
            for i in range(nlog[k]):
                rem[log[k, i]] += 1
            applied[k] = False
        choice[k] += 1
        c = choice[k]
        if c > 6 or (k < npre and c > prefix[k]):
            k -= 1
            continue
        if k < npre and c < prefix[k]:
            continue
        pents = pent_s[k] + (1 if c == 5 else 0)
        if pents > 12 or 12 - pents > last_k - k:
            continue
        sz[k] = c
        visited += 1
        if k == 0:
            pass
        elif k == 1:
            if ipr and sz[0] == 5 and c == 5:
                continue
            rem[0] = sz[0] - 1
            rem[1] = c - 1
            bnd[0] = 0
            bnd[1] = 1
            head_s[2] = 0
            tail_s[2] = 2
        elif k == last_k:
            head = head_s[k]
            tail = tail_s[k]
            if tail - head != c:
                continue
            ok = True
            for i in range(head, tail):
                f = bnd[i]
                if rem[f] != 1 or (ipr and c == 5 and sz[f] == 5):
                    ok = False
                    break
            if not ok:
                continue
        else:
            head = head_s[k]
            tail = tail_s[k]
            if tail - head < 2:
                continue
            pent = ipr and c == 5
            front = bnd[head]
            back = bnd[tail - 1]
            if pent and (sz[front] == 5 or sz[back] == 5):
                continue
            nl = 2
            log[k, 0] = front
            log[k, 1] = back
            rem[front] -= 1
            rem[back] -= 1
            ok = rem[front] >= 0 and rem[back] >= 0
            xrem = c - 2
            while ok and rem[bnd[head]] == 0:
                head += 1
                if tail - head < 2:
                    ok = False
                    break
                nf = bnd[head]
                if pent and sz[nf] == 5:
                    ok = False
                    break
                rem[nf] -= 1
                log[k, nl] = nf
                nl += 1
                xrem -= 1
                if rem[nf] < 0 or xrem <= 0:
                    ok = False
            while ok and rem[bnd[tail - 1]] == 0:
                tail -= 1
                if tail - head < 2:
                    ok = False
                    break
                nb = bnd[tail - 1]
                if pent and sz[nb] == 5:
                    ok = False
                    break
                rem[nb] -= 1
                log[k, nl] = nb
                nl += 1
                xrem -= 1
                if rem[nb] < 0 or xrem <= 0:
                    ok = False
            if not ok:
                for i in range(nl):
                    rem[log[k, i]] += 1
                continue
            nlog[k] = nl
            rem[k] = xrem
            saved[k] = bnd[tail]
            bnd[tail] = k
            tail += 1
            applied[k] = True
            head_s[k + 1] = head
            tail_s[k + 1] = tail
            # a later hexagon shrinks the boundary by <= 2, a pentagon by <= 1,
            # and the last face needs exactly its own size
            pl = 12 - pents
            hl = last_k - k - pl
            if tail - head > 2 * hl + pl + 4:
                continue
        pent_s[k + 1] = pents
        if k + 1 == depth_limit:
            emit = True
            if depth_limit == m:
                tr = windup(sz)
                if tr.shape[0] == 0:
                    emit = False
                else:
                    emit = _is_canonical_candidate(sz, tr)
            if emit:
                if nout == out.shape[0]:
                    grown = np.zeros((2 * out.shape[0], depth_limit), dtype=np.int8)
                    grown[:nout] = out[:nout]
                    out = grown
                for i in range(depth_limit):
                    out[nout, i] = sz[i]
                nout += 1
            continue
        k += 1
        choice[k] = 4
    return out[:nout], nout, visited
