"""Deterministic instance corpora and family-spec parsing for the CLI."""

from __future__ import annotations

import itertools
import random

from .errors import ParameterError
from .instance import (
    Graph,
    ListColouringInstance,
    cycle_instance,
    independent_instance,
    is_feasible,
    path_instance,
    random_triangle_free_instance,
    star_instance,
)


def curated_instances() -> dict[str, ListColouringInstance]:
    """Small named instances exercising every analysis path."""
    asym_edge = ListColouringInstance(Graph(2, ((0, 1),)), ((0, 1), (0, 1, 2)))
    return {
        "edge_q3": path_instance(2, 3),
        "asym_edge": asym_edge,
        "independent_pair": independent_instance(2, 2),
        "path3_q3": path_instance(3, 3),
        "path4_q3": path_instance(4, 3),
        "cycle4_q3": cycle_instance(4, 3),
        "cycle5_q3": cycle_instance(5, 3),
        "star4_q4": star_instance(4, 4, 3),
        "star4_q8": star_instance(4, 8, 8),
        "triangle_q3": cycle_instance(3, 3),
        "single_vertex": ListColouringInstance(Graph(1, ()), ((0, 1),)),
        "random_tf_n5": random_triangle_free_instance(5, seed=7, q=4),
    }


def glauber_corpus() -> dict[str, ListColouringInstance]:
    """Curated instances whose full state space stays well under the cap."""
    keep = (
        "edge_q3",
        "asym_edge",
        "independent_pair",
        "path3_q3",
        "path4_q3",
        "cycle4_q3",
        "cycle5_q3",
        "star4_q4",
        "triangle_q3",
        "single_vertex",
        "random_tf_n5",
    )
    all_inst = curated_instances()
    return {k: all_inst[k] for k in keep}


def _random_connected_graph(rng: random.Random, n: int) -> Graph:
    while True:
        edges = tuple(
            (u, v)
            for u in range(n)
            for v in range(u + 1, n)
            if rng.random() < 0.5
        )
        g = Graph(n, edges)
        if n == 1:
            return g
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for w in g.neighbours(x):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) == n:
            return g


def random_small_corpus(count: int = 200, seed: int = 20240) -> list[tuple[str, ListColouringInstance]]:
    """Connected instances on 2..5 vertices with lists inside {0,1,2,3},
    each admitting a proper colouring.  Deterministic in the seed."""
    rng = random.Random(seed)
    out = []
    k = 0
    while len(out) < count:
        n = rng.randint(2, 5)
        g = _random_connected_graph(rng, n)
        lists = tuple(
            tuple(sorted(rng.sample(range(4), rng.randint(1, 4)))) for _ in range(n)
        )
        inst = ListColouringInstance(g, lists)
        k += 1
        if is_feasible(inst):
            out.append((f"rand{len(out):03d}", inst))
    return out


def disagreement_cases(count: int = 50, seed: int = 4097):
    """Random (instance, vertex, c1, c2) shapes for the single-disagreement
    identity, with both one-sided instances feasible."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(1, 5)
        g = _random_connected_graph(rng, n)
        lists = tuple(
            tuple(sorted(rng.sample(range(5), rng.randint(2, 5)))) for _ in range(n)
        )
        inst = ListColouringInstance(g, lists)
        w = rng.randrange(n)
        if len(inst.lists[w]) < 2:
            continue
        c1, c2 = rng.sample(inst.lists[w], 2)
        ok = True
        for drop in (c1, c2):
            ls = list(inst.lists)
            ls[w] = tuple(c for c in ls[w] if c != drop)
            if not ls[w] or not is_feasible(inst.with_lists(ls)):
                ok = False
                break
        if ok:
            out.append((inst, w, c1, c2))
    return out


def parse_family_spec(spec: str) -> tuple[str, ListColouringInstance]:
    """Parse family strings like ``path:3:q=3``, ``star:4:center=8:leaf=8``,
    ``cycle:5:q=3`` or ``random-triangle-free:n=6:seed=7:q=4``."""
    parts = spec.split(":")
    family = parts[0]
    kv = {}
    pos = []
    for token in parts[1:]:
        if "=" in token:
            key, val = token.split("=", 1)
            kv[key] = val
        else:
            pos.append(token)

    def geti(key, default=None):
        if key in kv:
            return int(kv[key])
        if default is None:
            raise ParameterError(f"family {family!r} needs {key}=")
        return default

    if family == "path":
        k = int(pos[0])
        return spec, path_instance(k, geti("q", 3))
    if family == "cycle":
        k = int(pos[0])
        return spec, cycle_instance(k, geti("q", 3))
    if family == "star":
        d = int(pos[0])
        return spec, star_instance(d, geti("center"), geti("leaf"))
    if family == "random-triangle-free":
        return spec, random_triangle_free_instance(
            geti("n"), seed=geti("seed"), q=geti("q", 4)
        )
    if family == "independent":
        k = int(pos[0])
        return spec, independent_instance(k, geti("q", 2))
    raise ParameterError(f"unknown family {family!r}")


def all_feasible_pinnings(instance: ListColouringInstance, max_size: int):
    """Every feasible pinning of size 0..max_size, in deterministic order."""
    from .instance import Pinning

    for size in range(max_size + 1):
        for lam in itertools.combinations(range(instance.n), size):
            for colours in itertools.product(*(instance.lists[v] for v in lam)):
                p = Pinning(tuple(zip(lam, colours)))
                if is_feasible(instance, p):
                    yield p
