"""Graphs, list-colouring instances, pinnings, and instance families.

Instances are immutable and hashable; every operation returns new objects.
Colour identifiers are arbitrary nonnegative integers and are preserved
through pinning, so total-variation comparisons across derived instances
stay well defined.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Mapping

import numpy as np

from ._kernels import MODE_FIRST, dfs_colourings
from .errors import CapacityError, ContractError, InvalidPinningError

DEFAULT_NODE_CAP = 10_000_000


def node_cap() -> int:
    """Enumeration cap on visited partial nodes; SPECMIX_CAP overrides."""
    import os

    raw = os.environ.get("SPECMIX_CAP", "")
    if raw:
        cap = int(raw)
        if cap <= 0:
            raise ContractError("SPECMIX_CAP must be positive")
        return cap
    return DEFAULT_NODE_CAP


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..n-1."""

    vertex_count: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        n = self.vertex_count
        if n < 0:
            raise ContractError("vertex_count must be nonnegative")
        seen = set()
        norm = []
        for e in self.edges:
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise ContractError(f"edge {e} out of range for n={n}")
            if u == v:
                raise ContractError(f"self-loop at vertex {u}")
            if u > v:
                u, v = v, u
            if (u, v) in seen:
                raise ContractError(f"duplicate edge {(u, v)}")
            seen.add((u, v))
            norm.append((u, v))
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        nbrs = [[] for _ in range(self.vertex_count)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return tuple(tuple(sorted(a)) for a in nbrs)

    def neighbours(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def max_degree(self) -> int:
        if self.vertex_count == 0:
            return 0
        return max(len(a) for a in self.adjacency)

    def is_triangle_free(self) -> bool:
        for u, v in self.edges:
            if set(self.adjacency[u]) & set(self.adjacency[v]):
                return False
        return True


@dataclass(frozen=True)
class ListColouringInstance:
    """A graph together with one finite colour list per vertex."""

    graph: Graph
    lists: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = self.graph.vertex_count
        if len(self.lists) != n:
            raise ContractError(f"expected {n} colour lists, got {len(self.lists)}")
        norm = []
        for v, lst in enumerate(self.lists):
            cols = sorted(set(int(c) for c in lst))
            if any(c < 0 for c in cols):
                raise ContractError(f"negative colour in list of vertex {v}")
            norm.append(tuple(cols))
        object.__setattr__(self, "lists", tuple(norm))

    @property
    def n(self) -> int:
        return self.graph.vertex_count

    def list_of(self, v: int) -> tuple[int, ...]:
        return self.lists[v]

    def colour_universe(self) -> tuple[int, ...]:
        return tuple(sorted(set(c for lst in self.lists for c in lst)))

    def with_lists(self, lists) -> ListColouringInstance:
        return ListColouringInstance(self.graph, tuple(tuple(l) for l in lists))

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "edges": [list(e) for e in self.graph.edges],
            "lists": [list(l) for l in self.lists],
        }

    @staticmethod
    def from_json_dict(obj: dict) -> ListColouringInstance:
        g = Graph(int(obj["n"]), tuple((int(a), int(b)) for a, b in obj["edges"]))
        return ListColouringInstance(g, tuple(tuple(l) for l in obj["lists"]))


@dataclass(frozen=True)
class Pinning:
    """A partial colouring on a vertex subset, kept sorted by vertex."""

    assignments: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        seen = set()
        for v, c in self.assignments:
            if v in seen:
                raise InvalidPinningError(f"vertex {v} pinned twice")
            seen.add(v)
        object.__setattr__(
            self, "assignments", tuple(sorted((int(v), int(c)) for v, c in self.assignments))
        )

    @staticmethod
    def from_dict(d: Mapping[int, int]) -> Pinning:
        return Pinning(tuple(d.items()))

    def as_dict(self) -> dict[int, int]:
        return dict(self.assignments)

    def domain(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.assignments)

    def union(self, other: Pinning) -> Pinning:
        return Pinning(self.assignments + other.assignments)

    def __len__(self) -> int:
        return len(self.assignments)


EMPTY_PINNING = Pinning()


@dataclass(frozen=True)
class ColouringState:
    """A full proper list colouring; properness is checked on construction."""

    instance: ListColouringInstance
    assignment: tuple[int, ...]

    def __post_init__(self):
        inst = self.instance
        a = tuple(int(c) for c in self.assignment)
        if len(a) != inst.n:
            raise ContractError("assignment length mismatch")
        for v, c in enumerate(a):
            if c not in inst.lists[v]:
                raise ContractError(f"colour {c} not in list of vertex {v}")
        for u, v in inst.graph.edges:
            if a[u] == a[v]:
                raise ContractError(f"edge ({u},{v}) is monochromatic")
        object.__setattr__(self, "assignment", a)

    def colour(self, v: int) -> int:
        return self.assignment[v]


@dataclass(frozen=True)
class PinResult:
    """Induced instance after pinning plus the dense vertex remap."""

    instance: ListColouringInstance
    old_to_new: dict = field(compare=False)
    new_to_old: tuple[int, ...] = ()


def validate_pinning(instance: ListColouringInstance, p: Pinning) -> None:
    for v, c in p.assignments:
        if not (0 <= v < instance.n):
            raise InvalidPinningError(f"pinned vertex {v} does not exist")
        if c not in instance.lists[v]:
            raise InvalidPinningError(f"colour {c} not in list of vertex {v}")


def pin(instance: ListColouringInstance, p: Pinning) -> PinResult:
    """Instance induced by a pinning: drop pinned vertices, shrink neighbour lists."""
    validate_pinning(instance, p)
    pinned = p.as_dict()
    keep = [v for v in range(instance.n) if v not in pinned]
    old_to_new = {v: i for i, v in enumerate(keep)}
    edges = tuple(
        (old_to_new[u], old_to_new[v])
        for u, v in instance.graph.edges
        if u not in pinned and v not in pinned
    )
    lists = []
    for v in keep:
        removed = {pinned[u] for u in instance.graph.neighbours(v) if u in pinned}
        lists.append(tuple(c for c in instance.lists[v] if c not in removed))
    sub = ListColouringInstance(Graph(len(keep), edges), tuple(lists))
    return PinResult(sub, old_to_new, tuple(keep))


def remove_vertex(instance: ListColouringInstance, v: int) -> PinResult:
    """Drop a vertex without touching any colour list."""
    if not (0 <= v < instance.n):
        raise ContractError(f"vertex {v} does not exist")
    keep = [u for u in range(instance.n) if u != v]
    old_to_new = {u: i for i, u in enumerate(keep)}
    edges = tuple(
        (old_to_new[a], old_to_new[b])
        for a, b in instance.graph.edges
        if a != v and b != v
    )
    lists = tuple(instance.lists[u] for u in keep)
    sub = ListColouringInstance(Graph(len(keep), edges), lists)
    return PinResult(sub, old_to_new, tuple(keep))


def preceq(child: ListColouringInstance, parent: ListColouringInstance) -> bool:
    """One-step downward-closure relation: child is parent minus one vertex,
    with each neighbour list shrunk by at most one colour and all other lists
    equal, under the order-preserving dense remap."""
    if child.n != parent.n - 1:
        return False
    for v in range(parent.n):
        remap = lambda w: w - 1 if w > v else w
        expected_edges = tuple(
            sorted(
                tuple(sorted((remap(a), remap(b))))
                for a, b in parent.graph.edges
                if a != v and b != v
            )
        )
        if expected_edges != child.graph.edges:
            continue
        nbrs = set(parent.graph.neighbours(v))
        ok = True
        for u in range(parent.n):
            if u == v:
                continue
            cl = set(child.lists[remap(u)])
            pl = set(parent.lists[u])
            if u in nbrs:
                if not (cl <= pl and len(pl - cl) <= 1):
                    ok = False
                    break
            elif cl != pl:
                ok = False
                break
        if ok:
            return True
    return False


@lru_cache(maxsize=65536)
def compiled_arrays(instance: ListColouringInstance):
    """CSR adjacency plus dense colour codes, ready for the kernels."""
    n = instance.n
    indptr = np.zeros(n + 1, dtype=np.int64)
    adj = instance.graph.adjacency if n else ()
    for v in range(n):
        indptr[v + 1] = indptr[v] + len(adj[v])
    indices = np.empty(indptr[-1], dtype=np.int64)
    k = 0
    for v in range(n):
        for w in adj[v]:
            indices[k] = w
            k += 1
    universe = instance.colour_universe()
    code_of = {c: i for i, c in enumerate(universe)}
    list_indptr = np.zeros(n + 1, dtype=np.int64)
    for v in range(n):
        list_indptr[v + 1] = list_indptr[v] + len(instance.lists[v])
    list_codes = np.empty(list_indptr[-1], dtype=np.int64)
    k = 0
    for v in range(n):
        for c in instance.lists[v]:
            list_codes[k] = code_of[c]
            k += 1
    return indptr, indices, list_indptr, list_codes, len(universe), code_of, universe


def fixed_array(instance: ListColouringInstance, p: Pinning) -> np.ndarray:
    validate_pinning(instance, p)
    arrays = compiled_arrays(instance)
    code_of = arrays[5]
    fixed = np.full(instance.n, -1, dtype=np.int64)
    for v, c in p.assignments:
        fixed[v] = code_of[c]
    return fixed


def is_feasible(instance: ListColouringInstance, p: Pinning = EMPTY_PINNING) -> bool:
    """True iff at least one proper list colouring extends the pinning."""
    indptr, indices, lptr, lcodes, ncol, _, _ = compiled_arrays(instance)
    fixed = fixed_array(instance, p)
    out = np.empty((1, instance.n), dtype=np.int64)
    count, _, nodes, aborted = dfs_colourings(
        indptr, indices, lptr, lcodes, fixed, ncol, node_cap(), MODE_FIRST, out
    )
    if aborted:
        raise CapacityError(f"enumeration cap exceeded after {nodes} nodes")
    return count > 0


# ---------------------------------------------------------------------------
# instance families

def path_instance(k: int, q: int = 3) -> ListColouringInstance:
    g = Graph(k, tuple((i, i + 1) for i in range(k - 1)))
    return ListColouringInstance(g, tuple(tuple(range(q)) for _ in range(k)))


def cycle_instance(k: int, q: int = 3) -> ListColouringInstance:
    if k < 3:
        raise ContractError("cycle needs at least 3 vertices")
    edges = tuple((i, (i + 1) % k) for i in range(k))
    g = Graph(k, edges)
    return ListColouringInstance(g, tuple(tuple(range(q)) for _ in range(k)))


def star_instance(delta: int, centre_colours: int, leaf_colours: int) -> ListColouringInstance:
    """Star with centre 0 and ``delta`` leaves; lists are colour prefixes."""
    g = Graph(delta + 1, tuple((0, i) for i in range(1, delta + 1)))
    lists = (tuple(range(centre_colours)),) + tuple(
        tuple(range(leaf_colours)) for _ in range(delta)
    )
    return ListColouringInstance(g, lists)


def independent_instance(k: int, q: int = 2) -> ListColouringInstance:
    g = Graph(k, ())
    return ListColouringInstance(g, tuple(tuple(range(q)) for _ in range(k)))


def random_triangle_free_instance(
    n: int, seed: int, q: int = 4, edge_prob: float = 0.4, max_tries: int = 10000
) -> ListColouringInstance:
    """Rejection-sample an Erdos-Renyi graph until triangle-free (seeded)."""
    rng = random.Random(seed)
    for _ in range(max_tries):
        edges = tuple(
            (u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < edge_prob
        )
        g = Graph(n, edges)
        if g.is_triangle_free():
            return ListColouringInstance(g, tuple(tuple(range(q)) for _ in range(n)))
    raise CapacityError("rejection sampling failed to find a triangle-free graph")


def load_instance(path: str) -> ListColouringInstance:
    with open(path) as fh:
        return ListColouringInstance.from_json_dict(json.load(fh))


def dump_instance(instance: ListColouringInstance, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(instance.to_json_dict(), fh, sort_keys=True)
        fh.write("\n")
