"""Brute-force oracles: exact distributions, marginals, influence matrices,
and the dense spectral utilities used to check them.

Everything here is exact up to floating-point division of integer counts,
so downstream comparisons use absolute tolerances of 1e-12 (enumeration)
and 1e-9 (eigenvalue pipelines).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import MODE_COUNT, MODE_FILL, dfs_colourings, jacobi_eigenvalues
from .errors import CapacityError, ContractError, InfeasibleError, NotReversibleError, ParameterError
from .instance import (
    EMPTY_PINNING,
    ColouringState,
    ListColouringInstance,
    Pinning,
    compiled_arrays,
    fixed_array,
    node_cap,
    pin,
    remove_vertex,
)

PSI_ZERO = "psi_zero"
R_INDICATOR = "r_indicator"


@dataclass(frozen=True, eq=False)
class DistributionTable:
    """Uniform distribution over the proper completions of a pinning."""

    support: tuple[ColouringState, ...]
    mass: np.ndarray

    def __post_init__(self):
        if len(self.support) != len(self.mass):
            raise ContractError("support/mass length mismatch")
        if len(self.mass) and abs(float(self.mass.sum()) - 1.0) > 1e-12:
            raise ContractError("masses do not sum to 1")

    @property
    def is_empty(self) -> bool:
        return len(self.support) == 0

    def __len__(self) -> int:
        return len(self.support)


@dataclass(frozen=True, eq=False)
class MarginalVector:
    """Exact conditional marginal of one vertex; only positive entries kept."""

    vertex: int
    probs: dict

    def __post_init__(self):
        if self.probs and abs(sum(self.probs.values()) - 1.0) > 1e-12:
            raise ContractError("marginal does not sum to 1")

    def tv(self, other: "MarginalVector") -> float:
        return tv_distance(self, other)


@dataclass(frozen=True, eq=False)
class InfluenceMatrix:
    """Pairwise worst-case TV influences over the free vertices."""

    order: tuple[int, ...]
    entries: np.ndarray
    diagonal_convention: str

    def off_diagonal_row_sums(self) -> np.ndarray:
        e = self.entries.copy()
        np.fill_diagonal(e, 0.0)
        return e.sum(axis=1)


def _count_pass(instance: ListColouringInstance, p: Pinning, mode=MODE_COUNT, out=None):
    indptr, indices, lptr, lcodes, ncol, _, _ = compiled_arrays(instance)
    fixed = fixed_array(instance, p)
    if out is None:
        out = np.empty((0, instance.n), dtype=np.int64)
    count, vc, nodes, aborted = dfs_colourings(
        indptr, indices, lptr, lcodes, fixed, ncol, node_cap(), mode, out
    )
    if aborted:
        raise CapacityError(f"enumeration cap exceeded after {nodes} nodes")
    return count, vc


def count_completions(instance: ListColouringInstance, p: Pinning = EMPTY_PINNING) -> int:
    return _count_pass(instance, p)[0]


def enumerate_distribution(
    instance: ListColouringInstance, p: Pinning = EMPTY_PINNING
) -> DistributionTable:
    """Exhaustive uniform distribution over proper completions of ``p``.

    An empty support signals infeasibility; it is not an error here.
    """
    count, _ = _count_pass(instance, p)
    if count == 0:
        return DistributionTable((), np.zeros(0))
    out = np.empty((count, instance.n), dtype=np.int64)
    _count_pass(instance, p, MODE_FILL, out)
    universe = compiled_arrays(instance)[6]
    support = tuple(
        ColouringState(instance, tuple(universe[c] for c in row)) for row in out
    )
    return DistributionTable(support, np.full(count, 1.0 / count))


def all_marginals(instance: ListColouringInstance, p: Pinning = EMPTY_PINNING):
    """One enumeration pass: total count plus the marginal of every free vertex."""
    count, vc = _count_pass(instance, p)
    if count == 0:
        return 0, {}
    universe = compiled_arrays(instance)[6]
    pinned = set(p.domain())
    margs = {}
    for v in range(instance.n):
        if v in pinned:
            continue
        probs = {
            universe[c]: float(vc[v, c]) / count
            for c in range(vc.shape[1])
            if vc[v, c] > 0
        }
        margs[v] = MarginalVector(v, probs)
    return count, margs


def vertex_colour_counts(instance: ListColouringInstance, v: int) -> tuple[dict, int]:
    """Number of proper colourings per colour of ``v`` (zeros kept), plus total."""
    if not (0 <= v < instance.n):
        raise ContractError(f"vertex {v} does not exist")
    count, vc = _count_pass(instance, EMPTY_PINNING)
    code_of = compiled_arrays(instance)[5]
    counts = {c: int(vc[v, code_of[c]]) for c in instance.lists[v]}
    return counts, count


def marginal(instance: ListColouringInstance, p: Pinning, v: int) -> MarginalVector:
    """Exact conditional marginal of free vertex ``v`` given the pinning."""
    if v in set(p.domain()):
        raise ContractError(f"vertex {v} is pinned")
    if not (0 <= v < instance.n):
        raise ContractError(f"vertex {v} does not exist")
    count, margs = all_marginals(instance, p)
    if count == 0:
        raise InfeasibleError("pinning admits no proper completion")
    return margs[v]


def marginal_recursion(instance: ListColouringInstance, v: int, c: int) -> float:
    """Evaluate the one-vertex marginal recursion literally.

    Each inner marginal is computed by exhaustive enumeration on the instance
    with ``v`` removed and the colour under consideration struck from the
    lists of the earlier neighbours.  Serves as an independent oracle for
    :func:`marginal`.
    """
    if not (0 <= v < instance.n):
        raise ContractError(f"vertex {v} does not exist")
    if c not in instance.lists[v]:
        raise ContractError(f"colour {c} not in list of vertex {v}")
    removed = remove_vertex(instance, v)
    nbrs = instance.graph.neighbours(v)

    def product_term(colour: int) -> float:
        lists = list(removed.instance.lists)
        value = 1.0
        for i, w in enumerate(nbrs):
            # lists with `colour` struck from neighbours earlier in the order
            mod_lists = list(lists)
            for j in range(i):
                wj = removed.old_to_new[nbrs[j]]
                mod_lists[wj] = tuple(x for x in mod_lists[wj] if x != colour)
            sub = removed.instance.with_lists(mod_lists)
            wi = removed.old_to_new[w]
            if colour not in sub.lists[wi]:
                inner = 0.0
            else:
                count, margs = all_marginals(sub, EMPTY_PINNING)
                if count == 0:
                    # each factor is a count ratio Z_(i+1)/Z_i and the Z_i
                    # are non-increasing, so a dead sub-instance forces the
                    # whole product to zero
                    return 0.0
                inner = margs[wi].probs.get(colour, 0.0)
            value *= 1.0 - inner
        return value

    terms = {cp: product_term(cp) for cp in instance.lists[v]}
    denom = sum(terms.values())
    if denom <= 0.0:
        raise InfeasibleError("marginal recursion denominator vanished")
    return terms[c] / denom


def tv_distance(a, b) -> float:
    """Total variation distance over the union of supports."""
    pa = a.probs if isinstance(a, MarginalVector) else dict(a)
    pb = b.probs if isinstance(b, MarginalVector) else dict(b)
    keys = set(pa) | set(pb)
    return 0.5 * sum(abs(pa.get(k, 0.0) - pb.get(k, 0.0)) for k in keys)


def influence_matrix(
    instance: ListColouringInstance,
    p: Pinning = EMPTY_PINNING,
    convention: str = PSI_ZERO,
) -> InfluenceMatrix:
    """Worst-case pairwise TV influence matrix under a feasible pinning.

    Entry (u, v) is the maximum over feasible colour pairs at u of the TV
    shift induced on v's conditional marginal.  Colours that cannot be
    extended to a proper completion carry no mass and are excluded.  The
    diagonal is 0 for the ``psi_zero`` convention and the indicator of a
    non-singleton pinned list for ``r_indicator``.
    """
    if convention not in (PSI_ZERO, R_INDICATOR):
        raise ParameterError(f"unknown convention {convention!r}")
    free = [v for v in range(instance.n) if v not in set(p.domain())]
    if len(free) < 2:
        raise ContractError("influence matrix needs at least two free vertices")
    base_count, base_margs = all_marginals(instance, p)
    if base_count == 0:
        raise InfeasibleError("pinning admits no proper completion")
    idx = {v: i for i, v in enumerate(free)}
    m = len(free)
    entries = np.zeros((m, m))
    for u in free:
        omega_u = sorted(base_margs[u].probs)
        cond = {}
        for i in omega_u:
            _, margs = all_marginals(instance, p.union(Pinning(((u, i),))))
            cond[i] = margs
        for a_pos in range(len(omega_u)):
            for b_pos in range(a_pos + 1, len(omega_u)):
                i, j = omega_u[a_pos], omega_u[b_pos]
                for v in free:
                    if v == u:
                        continue
                    t = tv_distance(cond[i][v], cond[j][v])
                    if t > entries[idx[u], idx[v]]:
                        entries[idx[u], idx[v]] = t
    if convention == R_INDICATOR:
        # pin() preserves the relative order of kept vertices, so the pinned
        # instance index of v equals idx[v]
        pinned_lists = pin(instance, p).instance.lists
        for v in free:
            entries[idx[v], idx[v]] = 1.0 if len(pinned_lists[idx[v]]) > 1 else 0.0
    return InfluenceMatrix(tuple(free), entries, convention)


def max_influence_pair(
    instance: ListColouringInstance, u: int, v: int
) -> tuple[int, int, float]:
    """Colour pair of L(u) achieving the worst TV shift on v.

    Works on the unpinned instance with u != v; colours of zero marginal are
    skipped.  Among maximising pairs the lexicographically smallest (c1, c2)
    is returned.
    """
    if u == v:
        raise ContractError("max_influence_pair expects distinct vertices")
    base_count, base_margs = all_marginals(instance, EMPTY_PINNING)
    if base_count == 0:
        raise InfeasibleError("instance admits no proper colouring")
    omega_u = sorted(base_margs[u].probs)
    if len(omega_u) < 2:
        c = omega_u[0] if omega_u else min(instance.lists[u])
        return c, c, 0.0
    cond = {}
    for i in omega_u:
        _, margs = all_marginals(instance, Pinning(((u, i),)))
        cond[i] = margs
    best = None
    for a_pos in range(len(omega_u)):
        for b_pos in range(a_pos + 1, len(omega_u)):
            i, j = omega_u[a_pos], omega_u[b_pos]
            t = tv_distance(cond[i][v], cond[j][v])
            if best is None or t > best[2]:
                best = (i, j, t)
    return best


# ---------------------------------------------------------------------------
# dense spectral utilities


@dataclass(frozen=True)
class PowerIterationResult:
    value: float
    residual: float
    iterations: int
    converged: bool


def power_iteration(M, tol: float = 1e-10, max_iter: int = 100_000) -> PowerIterationResult:
    """Perron root of a nonnegative matrix.

    Iterates on the diagonally shifted matrix M + I from the all-ones
    vector: the shift leaves the Perron root (minus one) and its eigenvector
    unchanged while making every other eigenvalue strictly smaller in
    modulus, so the Rayleigh quotient converges even for matrices with
    bipartite support, where iterating on M itself oscillates.  The reported
    residual is measured on M.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if n == 0:
        return PowerIterationResult(0.0, 0.0, 0, True)
    if (M < -1e-12).any():
        raise ContractError("power iteration expects a nonnegative matrix")
    if not M.any():
        return PowerIterationResult(0.0, 0.0, 0, True)
    x = np.ones(n) / math.sqrt(n)
    prev = math.inf
    value = 0.0
    iters = 0
    converged = False
    for iters in range(1, max_iter + 1):
        y = M @ x + x
        norm = np.linalg.norm(y)
        if norm == 0.0:
            value = 0.0
            converged = True
            break
        x_new = y / norm
        value = float(x_new @ (M @ x_new + x_new)) - 1.0
        x = x_new
        if abs(value - prev) < tol:
            converged = True
            break
        prev = value
    value = max(value, 0.0)
    residual = float(np.max(np.abs(M @ x - value * x)))
    return PowerIterationResult(value, residual, iters, converged)


def spectral_radius(M) -> float:
    return power_iteration(M).value


def induced_norm(M, p) -> float:
    """Induced matrix norm for p in {1, inf}: max column / row absolute sum."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0.0
    if p == 1:
        return float(np.abs(M).sum(axis=0).max())
    if p == math.inf:
        return float(np.abs(M).sum(axis=1).max())
    raise ParameterError("induced_norm supports p in {1, inf}")


def _log_norm1_power(M, k: int) -> float:
    """log ||M^k||_1 for k a power of two, with rescaling against overflow."""
    M = np.asarray(M, dtype=float)
    s = induced_norm(M, 1)
    if s == 0.0:
        return -math.inf
    P = M / s
    log_acc = math.log(s)  # P * exp(log_acc) == M as scaled so far, per power
    power = 1
    while power < k:
        P = P @ P
        power *= 2
        log_acc *= 2
        m = float(np.abs(P).sum(axis=0).max())
        if m == 0.0:
            return -math.inf
        P = P / m
        log_acc += math.log(m)
    norm = float(np.abs(P).sum(axis=0).max())
    if norm == 0.0:
        return -math.inf
    return log_acc + math.log(norm)


def gelfand_norm_root(M, k: int = 64) -> float:
    """Raw Gelfand value ||M^k||_1^(1/k)."""
    if k < 1 or k & (k - 1):
        raise ParameterError("k must be a positive power of two")
    lg = _log_norm1_power(M, k)
    return 0.0 if lg == -math.inf else math.exp(lg / k)


def gelfand_estimate(M, k: int = 64) -> float:
    """Gelfand extrapolation of the spectral radius from powers k/2 and k.

    ||M^k||^(1/k) = rho * exp(c/k + o(1/k)), so the log-linear Richardson
    step a_k^2 / a_(k/2) cancels the leading 1/k bias.  The raw k=64 root
    alone overshoots rho by ~rho*ln(c)/64, which is far above 1e-3 for
    typical influence matrices.
    """
    if k < 2 or k & (k - 1):
        raise ParameterError("k must be a power of two, at least 2")
    lg_full = _log_norm1_power(M, k)
    lg_half = _log_norm1_power(M, k // 2)
    if lg_full == -math.inf or lg_half == -math.inf:
        return 0.0
    return math.exp(2.0 * (lg_full / k) - lg_half / (k // 2))


def symmetric_eigenvalues(M, pi, balance_tol: float = 1e-10) -> np.ndarray:
    """All eigenvalues (descending) of a matrix reversible w.r.t. ``pi``.

    Conjugates by diag(sqrt(pi)) into a symmetric matrix and runs cyclic
    Jacobi rotations down to off-diagonal Frobenius norm 1e-12.
    """
    M = np.asarray(M, dtype=float)
    pi = np.asarray(pi, dtype=float)
    n = M.shape[0]
    if pi.shape != (n,):
        raise ParameterError("weight vector shape mismatch")
    if (pi <= 0).any():
        raise ParameterError("weights must be strictly positive")
    residual = float(np.max(np.abs(pi[:, None] * M - (pi[:, None] * M).T))) if n else 0.0
    if residual > balance_tol:
        raise NotReversibleError(f"detailed balance residual {residual:.3e}")
    root = np.sqrt(pi)
    S = (root[:, None] / root[None, :]) * M
    S = np.ascontiguousarray(0.5 * (S + S.T))
    vals, _, _ = jacobi_eigenvalues(S, 1e-12, 100)
    return vals


def detailed_balance_residual(M, pi) -> float:
    M = np.asarray(M, dtype=float)
    pi = np.asarray(pi, dtype=float)
    F = pi[:, None] * M
    return float(np.max(np.abs(F - F.T))) if M.size else 0.0
