"""Independent brute-force oracles for the test suite.

These deliberately avoid the library's backtracking kernel: states come from
a full Cartesian product filtered for properness, so any agreement with the
library is a genuine cross-check.
"""

import itertools
from collections import Counter


def brute_states(instance, pinned=None):
    """All proper colourings extending ``pinned`` (a dict), as tuples."""
    pinned = pinned or {}
    for v, c in pinned.items():
        if c not in instance.lists[v]:
            return []
    choices = [
        (pinned[v],) if v in pinned else instance.lists[v] for v in range(instance.n)
    ]
    out = []
    for combo in itertools.product(*choices):
        if all(combo[u] != combo[v] for u, v in instance.graph.edges):
            out.append(combo)
    return out


def brute_marginal(instance, pinned, v):
    states = brute_states(instance, pinned)
    counts = Counter(s[v] for s in states)
    total = len(states)
    return {c: k / total for c, k in counts.items()}


def brute_tv(a, b):
    keys = set(a) | set(b)
    return 0.5 * sum(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in keys)


def brute_influence(instance, pinned=None, r_diagonal=False):
    """Influence matrix over free vertices by exhaustive conditioning."""
    pinned = pinned or {}
    free = [v for v in range(instance.n) if v not in pinned]
    states = brute_states(instance, pinned)
    mat = [[0.0] * len(free) for _ in free]
    for a, u in enumerate(free):
        feasible = sorted(set(s[u] for s in states))
        margs = {}
        for i in feasible:
            cond = dict(pinned)
            cond[u] = i
            margs[i] = {v: brute_marginal(instance, cond, v) for v in free if v != u}
        for b, v in enumerate(free):
            if u == v:
                continue
            best = 0.0
            for i, j in itertools.combinations(feasible, 2):
                best = max(best, brute_tv(margs[i][v], margs[j][v]))
            mat[a][b] = best
    if r_diagonal:
        removed = {
            v: {pinned[u] for u in instance.graph.neighbours(v) if u in pinned}
            for v in free
        }
        for a, v in enumerate(free):
            remaining = [c for c in instance.lists[v] if c not in removed[v]]
            mat[a][a] = 1.0 if len(remaining) > 1 else 0.0
    return free, mat
