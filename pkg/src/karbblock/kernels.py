"""Integer kernels: rooted k-arborescence intersection, f-tables, connectivity.

Every kernel is written in the numba-compatible subset and jitted unless
``KARBBLOCK_DISABLE_NUMBA`` is set. The f-table and pair search additionally
carry a vectorised numpy variant used on the fallback path.
"""

import numpy as np

from ._accel import USE_NUMBA, njit

INF = np.int64(2**62)


# -- unit-capacity connectivity --------------------------------------------------


@njit
def rooted_k_connected(n, root, k, tails, heads):
    """True iff every node is reachable from ``root`` by ``k`` arc-disjoint paths."""
    m = tails.shape[0]
    if k == 0 or n == 1:
        return True
    out_start = np.zeros(n + 1, np.int64)
    for e in range(m):
        out_start[tails[e] + 1] += 1
    for v in range(n):
        out_start[v + 1] += out_start[v]
    out_arcs = np.empty(m, np.int64)
    fill = out_start[:n].copy()
    for e in range(m):
        out_arcs[fill[tails[e]]] = e
        fill[tails[e]] += 1
    in_start = np.zeros(n + 1, np.int64)
    for e in range(m):
        in_start[heads[e] + 1] += 1
    for v in range(n):
        in_start[v + 1] += in_start[v]
    in_arcs = np.empty(m, np.int64)
    fill = in_start[:n].copy()
    for e in range(m):
        in_arcs[fill[heads[e]]] = e
        fill[heads[e]] += 1
    used = np.zeros(m, np.bool_)
    pred = np.empty(n, np.int64)
    queue = np.empty(n, np.int64)
    for t in range(n):
        if t == root:
            continue
        used[:] = False
        for _ in range(k):
            pred[:] = -2
            pred[root] = -1
            qh = 0
            qt = 1
            queue[0] = root
            while qh < qt and pred[t] == -2:
                u = queue[qh]
                qh += 1
                for i in range(out_start[u], out_start[u + 1]):
                    e = out_arcs[i]
                    if not used[e] and pred[heads[e]] == -2:
                        pred[heads[e]] = e
                        queue[qt] = heads[e]
                        qt += 1
                for i in range(in_start[u], in_start[u + 1]):
                    e = in_arcs[i]
                    if used[e] and pred[tails[e]] == -2:
                        pred[tails[e]] = -3 - e
                        queue[qt] = tails[e]
                        qt += 1
            if pred[t] == -2:
                return False
            v = t
            while v != root:
                p = pred[v]
                if p >= 0:
                    used[p] = True
                    v = tails[p]
                else:
                    e = -3 - p
                    used[e] = False
                    v = heads[e]
    return True


# -- k-fold graphic matroid (matroid partition into k forests) ----------------------


@njit
def _root_forests(n, k, tails, heads, forest, comp, par_arc, depth):
    m = tails.shape[0]
    adj_start = np.zeros(n + 1, np.int64)
    adj = np.empty(2 * m, np.int64)
    stack = np.empty(n, np.int64)
    for i in range(k):
        adj_start[:] = 0
        for e in range(m):
            if forest[e] == i:
                adj_start[tails[e] + 1] += 1
                adj_start[heads[e] + 1] += 1
        for v in range(n):
            adj_start[v + 1] += adj_start[v]
        fill = adj_start[:n].copy()
        for e in range(m):
            if forest[e] == i:
                adj[fill[tails[e]]] = e
                fill[tails[e]] += 1
                adj[fill[heads[e]]] = e
                fill[heads[e]] += 1
        for v in range(n):
            comp[i, v] = -1
        for r in range(n):
            if comp[i, r] != -1:
                continue
            comp[i, r] = r
            par_arc[i, r] = -1
            depth[i, r] = 0
            top = 1
            stack[0] = r
            while top > 0:
                top -= 1
                u = stack[top]
                for j in range(adj_start[u], adj_start[u + 1]):
                    e = adj[j]
                    w = tails[e] + heads[e] - u
                    if comp[i, w] == -1:
                        comp[i, w] = r
                        par_arc[i, w] = e
                        depth[i, w] = depth[i, u] + 1
                        stack[top] = w
                        top += 1


@njit
def _partition_search(y, k, tails, heads, forest, comp, par_arc, depth, visited, pred, queue):
    """BFS of the matroid-partition exchange graph from element ``y``.

    Returns ``(e, i)`` when ``e`` can be placed into forest ``i`` with a free slot,
    otherwise ``(-1, -1)``; ``visited`` then marks the elements reachable from ``y``.
    """
    m = tails.shape[0]
    for e in range(m):
        visited[e] = False
        pred[e] = -1
    visited[y] = True
    qh = 0
    qt = 1
    queue[0] = y
    while qh < qt:
        e = queue[qh]
        qh += 1
        a = tails[e]
        b = heads[e]
        for i in range(k):
            if forest[e] == i:
                continue
            if comp[i, a] != comp[i, b]:
                return e, i
            x = a
            z = b
            while x != z:
                if depth[i, x] >= depth[i, z]:
                    f = par_arc[i, x]
                    x = tails[f] + heads[f] - x
                else:
                    f = par_arc[i, z]
                    z = tails[f] + heads[f] - z
                if not visited[f]:
                    visited[f] = True
                    pred[f] = e
                    queue[qt] = f
                    qt += 1
    return -1, -1


@njit
def _augment_partition(y, e, i, forest, pred):
    cur = e
    newf = i
    while True:
        old = forest[cur]
        forest[cur] = newf
        if cur == y:
            break
        newf = old
        cur = pred[cur]


@njit
def partition_into_forests(n, k, tails, heads, members):
    """Assign ``members`` to ``k`` forests; returns (forest labels, number placed)."""
    m = tails.shape[0]
    forest = np.full(m, -1, np.int64)
    comp = np.empty((k, n), np.int64)
    par_arc = np.empty((k, n), np.int64)
    depth = np.empty((k, n), np.int64)
    visited = np.empty(m, np.bool_)
    pred = np.empty(m, np.int64)
    queue = np.empty(m, np.int64)
    placed = 0
    for y in range(m):
        if not members[y]:
            continue
        _root_forests(n, k, tails, heads, forest, comp, par_arc, depth)
        e, i = _partition_search(y, k, tails, heads, forest, comp, par_arc, depth, visited, pred, queue)
        if e >= 0:
            _augment_partition(y, e, i, forest, pred)
            placed += 1
    return forest, placed


# -- weighted intersection: k-fold graphic x in-degree partition --------------------


@njit
def karb_min_cost(n, root, k, tails, heads, costs, target):
    """Minimum-cost common independent set of the k-fold graphic matroid and the
    partition matroid capping in-degrees at ``k`` (``0`` at ``root``).

    Successive shortest augmenting paths (node lengths +c outside, -c inside,
    ties broken by hop count, then by smallest element index). Returns
    ``(size, chosen mask, cost)``; ``size < target`` means the target is infeasible.
    """
    m = tails.shape[0]
    inI = np.zeros(m, np.bool_)
    indeg = np.zeros(n, np.int64)
    cap = np.full(n, k, np.int64)
    cap[root] = 0
    comp = np.empty((k, n), np.int64)
    par_arc = np.empty((k, n), np.int64)
    depth = np.empty((k, n), np.int64)
    visited = np.empty(m, np.bool_)
    pred = np.empty(m, np.int64)
    queue = np.empty(m, np.int64)
    weight = np.empty(m, np.int64)
    dist = np.empty(m, np.int64)
    prev = np.empty(m, np.int64)
    src = np.empty(m, np.bool_)
    snk = np.empty(m, np.bool_)
    eu = np.empty(2 * m * m + 1, np.int64)
    ev = np.empty(2 * m * m + 1, np.int64)
    size = 0
    total = np.int64(0)
    scale = np.int64(m + 1)
    while size < target:
        forest, placed = partition_into_forests(n, k, tails, heads, inI)
        _root_forests(n, k, tails, heads, forest, comp, par_arc, depth)
        ne = 0
        for y in range(m):
            src[y] = False
            snk[y] = False
            if inI[y]:
                weight[y] = -costs[y] * scale + 1
                continue
            weight[y] = costs[y] * scale + 1
            if heads[y] == root:
                continue
            e, i = _partition_search(y, k, tails, heads, forest, comp, par_arc, depth, visited, pred, queue)
            if e >= 0:
                src[y] = True
            free2 = indeg[heads[y]] < cap[heads[y]]
            snk[y] = free2
            for x in range(m):
                if not inI[x]:
                    continue
                if src[y] or visited[x]:
                    eu[ne] = x
                    ev[ne] = y
                    ne += 1
                if free2 or heads[x] == heads[y]:
                    eu[ne] = y
                    ev[ne] = x
                    ne += 1
        for v in range(m):
            dist[v] = INF
            prev[v] = -1
            if src[v]:
                dist[v] = weight[v]
        for _ in range(m + 1):
            changed = False
            for j in range(ne):
                u = eu[j]
                v = ev[j]
                if dist[u] < INF and dist[u] + weight[v] < dist[v]:
                    dist[v] = dist[u] + weight[v]
                    prev[v] = u
                    changed = True
            if not changed:
                break
        best = -1
        for v in range(m):
            if snk[v] and dist[v] < INF and (best == -1 or dist[v] < dist[best]):
                best = v
        if best == -1:
            break
        v = best
        while v != -1:
            if inI[v]:
                inI[v] = False
                indeg[heads[v]] -= 1
                total -= costs[v]
            else:
                inI[v] = True
                indeg[heads[v]] += 1
                total += costs[v]
            v = prev[v]
        size += 1
    return size, inI, total


# -- f-tables and the disjoint pair minimum ----------------------------------------


@njit
def _f_table_loop(nw, heads, tmasks, mult):
    full = 1 << nw
    out = np.zeros(full, np.int64)
    for z in range(full):
        s = 0
        for j in range(heads.shape[0]):
            if (z >> heads[j]) & 1 and (z & tmasks[j]) == 0:
                s += mult[j]
        out[z] = s
    return out


def _f_table_numpy(nw, heads, tmasks, mult):
    z = np.arange(1 << nw, dtype=np.int64)
    out = np.zeros(1 << nw, np.int64)
    for h, t, c in zip(heads.tolist(), tmasks.tolist(), mult.tolist()):
        out += c * (((z >> h) & 1).astype(bool) & ((z & t) == 0))
    return out


@njit
def _min_pair_loop(ftab, nw):
    full = 1 << nw
    shift = np.int64(nw)
    key = np.empty(full, np.int64)
    key[0] = INF
    for z in range(1, full):
        key[z] = (ftab[z] << shift) | z
    for b in range(nw):
        bit = 1 << b
        for z in range(full):
            if z & bit and key[z ^ bit] < key[z]:
                key[z] = key[z ^ bit]
    best = INF
    z1 = -1
    z2 = -1
    mask = full - 1
    for z in range(1, full):
        rest = mask ^ z
        if rest == 0 or key[rest] >= INF:
            continue
        val = ftab[z] + (key[rest] >> shift)
        if val < best:
            best = val
            z1 = z
            z2 = key[rest] & mask
    return best, z1, z2


def _min_pair_numpy(ftab, nw):
    full = 1 << nw
    mask = full - 1
    z = np.arange(full, dtype=np.int64)
    key = (ftab.astype(np.int64) << nw) | z
    key[0] = INF
    for b in range(nw):
        bit = 1 << b
        has = (z & bit) != 0
        key[has] = np.minimum(key[has], key[z[has] ^ bit])
    rest = mask ^ z
    ok = (z > 0) & (rest > 0)
    vals = np.where(ok, ftab + (np.where(ok, key[rest], 0) >> nw), INF)
    z1 = int(np.argmin(vals))
    if vals[z1] >= INF:
        return INF, -1, -1
    return int(vals[z1]), z1, int(key[mask ^ z1] & mask)


if USE_NUMBA:
    f_table = _f_table_loop
    min_disjoint_pair = _min_pair_loop
else:
    f_table = _f_table_numpy
    min_disjoint_pair = _min_pair_numpy

f_table_numpy = _f_table_numpy
min_disjoint_pair_numpy = _min_pair_numpy
f_table_loop = _f_table_loop
min_disjoint_pair_loop = _min_pair_loop
