"""Hot inner loops.

Every kernel takes and returns plain numpy arrays so it can be compiled by
numba or run uncompiled. Kernels with a natural vectorized form also have a
``*_numpy`` twin which the public wrappers select when numba is off.
"""
import numpy as np

from ._accel import USE_NUMBA, jit

KIND_NONE = 0
KIND_SCC = 1
KIND_CAC = 2


# -- merge-find -------------------------------------------------------------

@jit
def uf_find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@jit
def uf_union(parent, depth, a, b):
    """Union by depth. Returns the surviving root."""
    ra = uf_find(parent, a)
    rb = uf_find(parent, b)
    if ra == rb:
        return ra
    if depth[ra] < depth[rb]:
        ra, rb = rb, ra
    parent[rb] = ra
    if depth[ra] == depth[rb]:
        depth[ra] += 1
    return ra


# -- component finding ------------------------------------------------------

@jit
def dfs_partition(n, offsets, targets, merge):
    """Modified Tarjan DFS producing the SCC/CAC partition.

    With ``merge`` false no CAC merging takes place and the result is the
    plain SCC partition (size-1 SCCs still reported as CAC kind).

    Returns ``comp_of, comp_kind, comp_level, comp_size, counters`` where
    levels are already shifted to start at 0 and ``counters`` holds
    (explore edge visits, merge-check edge visits, finish calls).
    """
    index = np.zeros(n, np.int64)
    lowlink = np.zeros(n, np.int64)
    level = np.zeros(n, np.int64)
    kind = np.zeros(n, np.int8)
    parent = np.arange(n)
    depth = np.ones(n, np.int64)
    next_edge = offsets[:n].copy()
    tstack = np.empty(n, np.int64)
    cstack = np.empty(n, np.int64)
    tsp = 0
    csp = 0
    counter = 1
    explore_visits = 0
    merge_visits = 0
    finishes = 0

    for root in range(n):
        if index[root] != 0:
            continue
        # Discover(root)
        index[root] = counter
        lowlink[root] = counter
        level[root] = 1
        counter += 1
        tstack[tsp] = root
        tsp += 1
        cstack[csp] = root
        csp += 1

        while csp > 0:
            v = cstack[csp - 1]
            e = next_edge[v]
            if e < offsets[v + 1]:
                w = targets[e]
                if w == v:
                    next_edge[v] = e + 1
                    continue
                if index[w] == 0:
                    # Discover(w); the edge is revisited once w finishes
                    index[w] = counter
                    lowlink[w] = counter
                    level[w] = 1
                    counter += 1
                    tstack[tsp] = w
                    tsp += 1
                    cstack[csp] = w
                    csp += 1
                    continue
                next_edge[v] = e + 1
                explore_visits += 1
                if kind[w] != KIND_NONE:
                    if level[w] + 1 > level[v]:
                        level[v] = level[w] + 1
                else:
                    if level[w] > level[v]:
                        level[v] = level[w]
                    if lowlink[w] < lowlink[v]:
                        lowlink[v] = lowlink[w]
                continue

            # Finish(v)
            csp -= 1
            finishes += 1
            if lowlink[v] != index[v]:
                continue
            size = 0
            while True:
                tsp -= 1
                w = tstack[tsp]
                level[w] = level[v]
                kind[w] = KIND_SCC
                uf_union(parent, depth, w, v)
                size += 1
                if w == v:
                    break
            if size != 1:
                continue
            kind[v] = KIND_CAC
            if not merge:
                continue
            target_level = level[v] - 1
            mergeable = False
            for f in range(offsets[v], offsets[v + 1]):
                w = targets[f]
                if w == v:
                    continue
                merge_visits += 1
                if level[w] == target_level:
                    if kind[w] == KIND_SCC:
                        mergeable = False
                        break
                    mergeable = True
            if mergeable:
                level[v] = target_level
                for f in range(offsets[v], offsets[v + 1]):
                    w = targets[f]
                    if w != v and level[w] == target_level:
                        uf_union(parent, depth, w, v)

    comp_of = np.full(n, -1, np.int64)
    head_comp = np.full(n, -1, np.int64)
    ncomp = 0
    for v in range(n):
        h = uf_find(parent, v)
        if head_comp[h] < 0:
            head_comp[h] = ncomp
            ncomp += 1
        comp_of[v] = head_comp[h]

    comp_kind = np.zeros(ncomp, np.int8)
    comp_level = np.zeros(ncomp, np.int64)
    comp_size = np.zeros(ncomp, np.int64)
    for v in range(n):
        c = comp_of[v]
        comp_kind[c] = kind[v]
        comp_level[c] = level[v] - 1
        comp_size[c] += 1

    counters = np.empty(3, np.int64)
    counters[0] = explore_visits
    counters[1] = merge_visits
    counters[2] = finishes
    return comp_of, comp_kind, comp_level, comp_size, counters


# -- ordering ---------------------------------------------------------------

@jit
def _counting_order_loop(keys, nkeys):
    counts = np.zeros(nkeys + 1, np.int64)
    for k in keys:
        counts[k + 1] += 1
    for i in range(nkeys):
        counts[i + 1] += counts[i]
    order = np.empty(keys.shape[0], np.int64)
    for i in range(keys.shape[0]):
        k = keys[i]
        order[counts[k]] = i
        counts[k] += 1
    return order


def counting_order(keys, nkeys):
    """Stable permutation sorting non-negative integer ``keys`` < ``nkeys``."""
    keys = np.ascontiguousarray(keys, dtype=np.int64)
    if USE_NUMBA:
        return _counting_order_loop(keys, nkeys)
    return np.argsort(keys, kind="stable")


# -- rank kernels -----------------------------------------------------------

@jit
def cac_propagate(offsets, targets, outdeg, weights, c, keep_loops):
    """Kahn-order rank propagation through an acyclic component.

    ``outdeg`` is the global rank out-degree of each local vertex, so edges
    leaving the component still dilute the per-edge weight. Returns
    ``(ranks, edge_visits, processed)``; ``processed < n`` means a cycle.
    """
    n = offsets.shape[0] - 1
    indeg = np.zeros(n, np.int64)
    loop_w = np.zeros(n)
    for u in range(n):
        for e in range(offsets[u], offsets[u + 1]):
            v = targets[e]
            if v == u:
                if keep_loops:
                    loop_w[u] = c / outdeg[u]
            else:
                indeg[v] += 1
    rank = weights.copy()
    queue = np.empty(n, np.int64)
    head = 0
    tail = 0
    for u in range(n):
        if indeg[u] == 0:
            queue[tail] = u
            tail += 1
    visits = 0
    while head < tail:
        u = queue[head]
        head += 1
        rank[u] = rank[u] / (1.0 - loop_w[u])
        push = c * rank[u] / outdeg[u] if outdeg[u] > 0 else 0.0
        for e in range(offsets[u], offsets[u + 1]):
            v = targets[e]
            if v == u:
                continue
            visits += 1
            rank[v] += push
            indeg[v] -= 1
            if indeg[v] == 0:
                queue[tail] = v
                tail += 1
    return rank, visits, head


@jit
def _power_series_loop(offsets, targets, outdeg, weights, c, tol, max_iter):
    n = offsets.shape[0] - 1
    scale = np.zeros(n)
    for u in range(n):
        if outdeg[u] > 0:
            scale[u] = c / outdeg[u]
    rank = weights.copy()
    incr = weights.copy()
    nxt = np.zeros(n)
    l1 = np.zeros(max_iter + 1)
    min_incr = np.zeros(max_iter + 1)
    total = 0.0
    for u in range(n):
        total += incr[u]
    l1[0] = total
    it = 0
    converged = False
    non_monotone = 0
    while it < max_iter:
        nxt[:] = 0.0
        for u in range(n):
            val = incr[u] * scale[u]
            if val == 0.0:
                continue
            for e in range(offsets[u], offsets[u + 1]):
                nxt[targets[e]] += val
        it += 1
        biggest = 0.0
        smallest = np.inf
        total = 0.0
        for v in range(n):
            x = nxt[v]
            if x > biggest:
                biggest = x
            if x < smallest:
                smallest = x
            total += x
            before = rank[v]
            rank[v] = before + x
            if rank[v] < before:
                non_monotone += 1
        l1[it] = total
        min_incr[it] = smallest if n > 0 else 0.0
        incr, nxt = nxt, incr
        if biggest < tol:
            converged = True
            break
    return rank, it, converged, l1[: it + 1], min_incr[: it + 1], non_monotone


def _power_series_numpy(offsets, targets, outdeg, weights, c, tol, max_iter):
    n = offsets.shape[0] - 1
    src = np.repeat(np.arange(n), np.diff(offsets))
    scale = np.zeros(n)
    nz = outdeg > 0
    scale[nz] = c / outdeg[nz]
    rank = weights.copy()
    incr = weights.copy()
    l1 = [float(incr.sum())]
    min_incr = [0.0]
    it = 0
    converged = False
    non_monotone = 0
    while it < max_iter:
        incr = np.bincount(targets, weights=(incr * scale)[src], minlength=n)
        it += 1
        before = rank
        rank = rank + incr
        non_monotone += int(np.count_nonzero(rank < before))
        l1.append(float(incr.sum()))
        min_incr.append(float(incr.min()) if n else 0.0)
        if n == 0 or incr.max() < tol:
            converged = True
            break
    return rank, it, converged, np.array(l1), np.array(min_incr), non_monotone


def power_series(offsets, targets, outdeg, weights, c, tol, max_iter):
    """Accumulate ``sum_k (c A^T)^k W`` until the newest increment's max < tol.

    Returns ``(rank, iterations, converged, l1_trace, min_increment_trace,
    non_monotone_count)``; the traces are indexed by power (entry 0 is W).
    """
    fn = _power_series_loop if USE_NUMBA else _power_series_numpy
    return fn(offsets, targets, outdeg, weights, float(c), float(tol), int(max_iter))


@jit
def _propagate_loop(src, dst, outdeg, ranks, weights, c):
    for i in range(src.shape[0]):
        weights[dst[i]] += c * ranks[src[i]] / outdeg[i]
    return src.shape[0]


def propagate(src, dst, outdeg, ranks, weights, c):
    """In place: ``weights[dst[i]] += c * ranks[src[i]] / outdeg[i]``.

    ``outdeg`` is aligned with the edges, not indexed by vertex.
    """
    if USE_NUMBA:
        return _propagate_loop(src, dst, outdeg, ranks, weights, float(c))
    if src.shape[0]:
        np.add.at(weights, dst, c * ranks[src] / outdeg)
    return src.shape[0]


# -- graph generation -------------------------------------------------------

@jit
def ba_attach(pool, pool_len, start, stop, m, uniforms, out_src, out_dst, out_len):
    """Preferential attachment for vertices ``start..stop-1``.

    ``pool`` is the repeated-vertex list (one entry per edge endpoint).
    Consumes ``uniforms`` in order; stops early at a vertex boundary when they
    run out. Returns ``(next_vertex, pool_len, out_len, consumed)``.
    """
    picks = np.empty(m, np.int64)
    pos = 0
    v = start
    while v < stop:
        got = 0
        p = pos
        exhausted = False
        while got < m:
            if p >= uniforms.shape[0]:
                exhausted = True
                break
            t = pool[int(uniforms[p] * pool_len)]
            p += 1
            dup = False
            for j in range(got):
                if picks[j] == t:
                    dup = True
                    break
            if not dup:
                picks[got] = t
                got += 1
        if exhausted:
            break
        pos = p
        for j in range(m):
            out_src[out_len] = v
            out_dst[out_len] = picks[j]
            out_len += 1
            pool[pool_len] = v
            pool[pool_len + 1] = picks[j]
            pool_len += 2
        v += 1
    return v, pool_len, out_len, pos


@jit
def direct_edges(n, eu, ev, keep, uniforms):
    """Turn undirected edges into directed out-edges.

    Vertices are visited in id order; vertex ``i`` picks ``keep[i]`` of its
    incident edges uniformly at random, preferring edges no earlier vertex
    has claimed. Needs ``len(uniforms) >= keep.sum()``.
    """
    m = eu.shape[0]
    deg = np.zeros(n + 1, np.int64)
    for k in range(m):
        deg[eu[k] + 1] += 1
        deg[ev[k] + 1] += 1
    for i in range(n):
        deg[i + 1] += deg[i]
    inc = np.empty(2 * m, np.int64)
    fill = deg[:n].copy()
    for k in range(m):
        inc[fill[eu[k]]] = k
        fill[eu[k]] += 1
        inc[fill[ev[k]]] = k
        fill[ev[k]] += 1
    claimed = np.zeros(m, np.bool_)
    total = 0
    for i in range(n):
        total += keep[i]
    src = np.empty(total, np.int64)
    dst = np.empty(total, np.int64)
    out = 0
    u = 0
    free = np.empty(deg[n] - deg[0] if n > 0 else 0, np.int64)
    taken = np.empty_like(free)
    for i in range(n):
        k_i = keep[i]
        if k_i == 0:
            continue
        nf = 0
        nt = 0
        for s in range(deg[i], deg[i + 1]):
            k = inc[s]
            if claimed[k]:
                taken[nt] = k
                nt += 1
            else:
                free[nf] = k
                nf += 1
        # partial Fisher-Yates over free edges, then over claimed ones
        for j in range(k_i):
            if j < nf:
                r = j + int(uniforms[u] * (nf - j))
                free[j], free[r] = free[r], free[j]
                k = free[j]
            else:
                jj = j - nf
                r = jj + int(uniforms[u] * (nt - jj))
                taken[jj], taken[r] = taken[r], taken[jj]
                k = taken[jj]
            u += 1
            claimed[k] = True
            src[out] = i
            dst[out] = ev[k] if eu[k] == i else eu[k]
            out += 1
    return src, dst
