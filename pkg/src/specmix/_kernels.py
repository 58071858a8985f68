"""Hot numeric kernels.

Every kernel is written in nopython-compatible Python operating on plain
arrays.  Under the numba backend the same source is JIT-compiled; under the
numpy backend it runs as ordinary Python.  The chain simulator is the one
exception: its 64-bit wrapping arithmetic needs a masked-integer variant in
pure Python, kept in lockstep with the compiled one by tests.
"""

import math

import numpy as np

from . import _rng
from .backend import USING_NUMBA, compiled

# DFS modes for _dfs_colourings
MODE_COUNT = 0      # count completions and per-(vertex, colour) counts
MODE_FIRST = 1      # stop at the first completion, write it to out_states[0]
MODE_FILL = 2       # write every completion into out_states


def _dfs_colourings(adj_indptr, adj_indices, list_indptr, list_codes,
                    fixed, ncolours, node_cap, mode, out_states):
    """Backtracking enumeration of proper completions of a partial colouring.

    ``fixed[v]`` is a colour code or -1 for free vertices.  Free vertices are
    assigned in index order; each candidate colour is filtered against the
    colours already placed on neighbours.  ``node_cap`` bounds the number of
    visited partial nodes (successful placements).

    Returns ``(count, vc_counts, nodes, aborted)``.
    """
    n = fixed.shape[0]
    vc = np.zeros((n, ncolours), dtype=np.int64)
    # conflicts inside the pinned part make every completion improper
    for u in range(n):
        if fixed[u] >= 0:
            for k in range(adj_indptr[u], adj_indptr[u + 1]):
                w = adj_indices[k]
                if w > u and fixed[w] >= 0 and fixed[w] == fixed[u]:
                    return 0, vc, 0, 0
    free = np.empty(n, dtype=np.int64)
    nfree = 0
    for v in range(n):
        if fixed[v] < 0:
            free[nfree] = v
            nfree += 1
    assign = fixed.copy()
    count = 0
    nodes = 0
    if nfree == 0:
        if mode != MODE_COUNT and out_states.shape[0] > 0:
            for v in range(n):
                out_states[0, v] = assign[v]
        return 1, vc, nodes, 0
    cursor = np.empty(nfree, dtype=np.int64)
    pos = 0
    cursor[0] = list_indptr[free[0]]
    while pos >= 0:
        v = free[pos]
        placed = False
        li = cursor[pos]
        end = list_indptr[v + 1]
        while li < end:
            c = list_codes[li]
            ok = True
            for k in range(adj_indptr[v], adj_indptr[v + 1]):
                if assign[adj_indices[k]] == c:
                    ok = False
                    break
            if ok:
                nodes += 1
                if nodes > node_cap:
                    return count, vc, nodes, 1
                assign[v] = c
                cursor[pos] = li + 1
                placed = True
                break
            li += 1
        if not placed:
            assign[v] = -1
            pos -= 1
            continue
        if pos == nfree - 1:
            count += 1
            if mode == MODE_COUNT:
                for t in range(nfree):
                    w = free[t]
                    vc[w, assign[w]] += 1
            else:
                row = 0 if mode == MODE_FIRST else count - 1
                for w in range(n):
                    out_states[row, w] = assign[w]
                if mode == MODE_FIRST:
                    return count, vc, nodes, 0
            assign[v] = -1
        else:
            pos += 1
            cursor[pos] = list_indptr[free[pos]]
    return count, vc, nodes, 0


def _jacobi_eigenvalues(S, tol, max_sweeps):
    """Cyclic-by-row Jacobi on a symmetric matrix; returns values descending.

    Sweeps stop once the off-diagonal Frobenius norm drops below ``tol``.
    Returns ``(eigenvalues, achieved_off_norm, sweeps)``.
    """
    n = S.shape[0]
    A = S.copy()
    sweeps = 0
    while sweeps < max_sweeps:
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += A[i, j] * A[i, j]
        off = math.sqrt(2.0 * off)
        if off < tol:
            break
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                if abs(apq) < 1e-300:
                    A[p, q] = 0.0
                    A[q, p] = 0.0
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                A[p, p] = A[p, p] - t * apq
                A[q, q] = A[q, q] + t * apq
                A[p, q] = 0.0
                A[q, p] = 0.0
                for i in range(n):
                    if i != p and i != q:
                        aip = A[i, p]
                        aiq = A[i, q]
                        A[i, p] = c * aip - s * aiq
                        A[i, q] = s * aip + c * aiq
                        A[p, i] = A[i, p]
                        A[q, i] = A[i, q]
    off = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            off += A[i, j] * A[i, j]
    off = math.sqrt(2.0 * off)
    vals = np.empty(n, dtype=np.float64)
    for i in range(n):
        vals[i] = A[i, i]
    vals = np.sort(vals)[::-1].copy()
    return vals, off, sweeps


def _pairwise_tv_max(M):
    """max over ordered row pairs of the total variation distance."""
    m = M.shape[0]
    n = M.shape[1]
    best = 0.0
    for i in range(m):
        for j in range(i + 1, m):
            s = 0.0
            for k in range(n):
                s += abs(M[i, k] - M[j, k])
            if 0.5 * s > best:
                best = 0.5 * s
    return best


def _glauber_run_u64(adj_indptr, adj_indices, list_indptr, list_codes,
                     state, steps, seed, step0, thin, out_states):
    """Advance the single-site chain ``steps`` steps in place.

    Step ``t`` (global index) consumes stream draws ``2t`` (vertex) and
    ``2t + 1`` (colour).  When ``thin > 0`` every ``thin``-th state is
    written to ``out_states``.
    """
    n = state.shape[0]
    phi = np.uint64(0x9E3779B97F4A7C15)
    c1 = np.uint64(0xBF58476D1CE4E5B9)
    c2 = np.uint64(0x94D049BB133111EB)
    seed_u = np.uint64(seed)
    cand = np.empty(list_codes.shape[0] + 1, dtype=np.int64)
    row = 0
    for s in range(steps):
        t = np.uint64(step0 + s)
        # vertex draw: splitmix64(seed + (2t+1)*phi)
        x = seed_u + (np.uint64(2) * t + np.uint64(1)) * phi
        x = (x ^ (x >> np.uint64(30))) * c1
        x = (x ^ (x >> np.uint64(27))) * c2
        x = x ^ (x >> np.uint64(31))
        v = int(x % np.uint64(n))
        k = 0
        for li in range(list_indptr[v], list_indptr[v + 1]):
            c = list_codes[li]
            ok = True
            for e in range(adj_indptr[v], adj_indptr[v + 1]):
                if state[adj_indices[e]] == c:
                    ok = False
                    break
            if ok:
                cand[k] = c
                k += 1
        # from a proper state the current colour is always available
        x = seed_u + (np.uint64(2) * t + np.uint64(2)) * phi
        x = (x ^ (x >> np.uint64(30))) * c1
        x = (x ^ (x >> np.uint64(27))) * c2
        x = x ^ (x >> np.uint64(31))
        state[v] = cand[int(x % np.uint64(k))]
        if thin > 0 and (s + 1) % thin == 0:
            for w in range(n):
                out_states[row, w] = state[w]
            row += 1
    return row


dfs_colourings = compiled(_dfs_colourings)
jacobi_eigenvalues = compiled(_jacobi_eigenvalues)
pairwise_tv_max = compiled(_pairwise_tv_max)
_glauber_run_compiled = compiled(_glauber_run_u64) if USING_NUMBA else None


def _glauber_run_py(adj_indptr, adj_indices, list_indptr, list_codes,
                    state, steps, seed, step0, thin, out_states):
    """Masked-integer twin of :func:`_glauber_run_u64` for the numpy backend."""
    n = state.shape[0]
    row = 0
    for s in range(steps):
        t = step0 + s
        v = _rng.draw_below(seed, 2 * t, n)
        cand = []
        for li in range(list_indptr[v], list_indptr[v + 1]):
            c = list_codes[li]
            if all(state[adj_indices[e]] != c
                   for e in range(adj_indptr[v], adj_indptr[v + 1])):
                cand.append(c)
        state[v] = cand[_rng.draw_below(seed, 2 * t + 1, len(cand))]
        if thin > 0 and (s + 1) % thin == 0:
            out_states[row, :] = state
            row += 1
    return row


def glauber_run(adj_indptr, adj_indices, list_indptr, list_codes,
                state, steps, seed, step0=0, thin=0, out_states=None):
    """Backend-dispatching chain runner; mutates ``state``, returns rows written."""
    if out_states is None:
        out_states = np.empty((0, state.shape[0]), dtype=np.int64)
    if USING_NUMBA:
        return _glauber_run_compiled(adj_indptr, adj_indices, list_indptr,
                                     list_codes, state, steps, seed, step0,
                                     thin, out_states)
    return _glauber_run_py(adj_indptr, adj_indices, list_indptr, list_codes,
                           state, steps, seed, step0, thin, out_states)
