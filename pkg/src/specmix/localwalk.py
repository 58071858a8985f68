"""Local random walks on (vertex, colour) states and the chain of spectral
inequalities linking them to the influence matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import pairwise_tv_max
from .errors import CapacityError, ContractError, InfeasibleError
from .exact import (
    PSI_ZERO,
    InfluenceMatrix,
    all_marginals,
    detailed_balance_residual,
    induced_norm,
    influence_matrix,
    power_iteration,
    symmetric_eigenvalues,
)
from .instance import EMPTY_PINNING, ListColouringInstance, Pinning


@dataclass(frozen=True, eq=False)
class LocalWalk:
    """Non-lazy local walk: from (u, i), pick another free vertex v uniformly
    and move to (v, j) with the conditional marginal probability of j."""

    states: tuple[tuple[int, int], ...]
    transition: np.ndarray
    stationary: np.ndarray
    free_count: int


@dataclass(frozen=True, eq=False)
class LazyWalk:
    base: LocalWalk
    transition: np.ndarray

    @property
    def states(self):
        return self.base.states

    @property
    def stationary(self):
        return self.base.stationary


@dataclass(frozen=True, eq=False)
class CouplingMatrix:
    """(Psi^T + I) / (n - |Lambda|) over the free vertices."""

    order: tuple[int, ...]
    matrix: np.ndarray


def build_local_walk(instance: ListColouringInstance, p: Pinning = EMPTY_PINNING) -> LocalWalk:
    free = [v for v in range(instance.n) if v not in set(p.domain())]
    m = len(free)
    if m < 2:
        raise ContractError("local walk needs at least two free vertices")
    count, base_margs = all_marginals(instance, p)
    if count == 0:
        raise InfeasibleError("pinning admits no proper completion")
    states = []
    for u in free:
        for c in sorted(base_margs[u].probs):
            states.append((u, c))
    index = {s: k for k, s in enumerate(states)}
    size = len(states)
    P = np.zeros((size, size))
    pi = np.zeros(size)
    for (u, i), row in index.items():
        pi[row] = base_margs[u].probs[i] / m
        _, cond = all_marginals(instance, p.union(Pinning(((u, i),))))
        for v in free:
            if v == u:
                continue
            for j, prob in cond[v].probs.items():
                P[row, index[(v, j)]] = prob / (m - 1)
    return LocalWalk(tuple(states), P, pi, m)


def lazy(walk: LocalWalk) -> LazyWalk:
    m = walk.free_count
    Q = ((m - 1) * walk.transition + np.eye(len(walk.states))) / m
    return LazyWalk(walk, Q)


def lambda2(walk) -> float:
    """Second largest eigenvalue of a (lazy or non-lazy) local walk."""
    vals = symmetric_eigenvalues(walk.transition, walk.stationary)
    return float(vals[1])


def coupling_matrix(instance: ListColouringInstance, p: Pinning = EMPTY_PINNING) -> CouplingMatrix:
    psi = influence_matrix(instance, p, PSI_ZERO)
    m = len(psi.order)
    A = (psi.entries.T + np.eye(m)) / m
    return CouplingMatrix(psi.order, A)


@dataclass(frozen=True, eq=False)
class LocalChainReport:
    free_count: int
    state_count: int
    detailed_balance_residual: float
    lambda2_p: float
    lambda2_q: float
    rho_psi: float
    lazy_identity_gap: float          # |lambda2(Q) - ((m-1)lambda2(P)+1)/m|
    lambda2_q_le_rho_bound: bool      # lambda2(Q) <= (rho+1)/m
    lambda2_p_le_rho_bound: bool      # lambda2(P) <= rho/(m-1)
    t_values: tuple[int, ...]
    d_values: tuple[float, ...]
    lower_values: tuple[float, ...]   # |lambda2(Q)|^t
    upper_values: tuple[float, ...]   # ||A^(t-1)||_1
    sandwich_ok: tuple[bool, ...]
    all_ok: bool = False

    def to_json_dict(self) -> dict:
        return {
            "free_count": self.free_count,
            "state_count": self.state_count,
            "detailed_balance_residual": self.detailed_balance_residual,
            "lambda2_p": self.lambda2_p,
            "lambda2_q": self.lambda2_q,
            "rho_psi": self.rho_psi,
            "lazy_identity_gap": self.lazy_identity_gap,
            "lambda2_q_le_rho_bound": self.lambda2_q_le_rho_bound,
            "lambda2_p_le_rho_bound": self.lambda2_p_le_rho_bound,
            "coupling": [
                {"t": t, "lower": lo, "d": d, "upper": up, "ok": ok}
                for t, lo, d, up, ok in zip(
                    self.t_values, self.lower_values, self.d_values,
                    self.upper_values, self.sandwich_ok,
                )
            ],
            "all_ok": self.all_ok,
        }


def verify_local_chain(
    instance: ListColouringInstance,
    p: Pinning = EMPTY_PINNING,
    t_max: int = 10,
    tol: float = 1e-9,
    state_cap: int = 2000,
) -> LocalChainReport:
    """Exact verification of the local-walk inequalities for one pinning.

    Checks detailed balance, the lazy eigenvalue identity, both eigenvalue
    bounds against the influence spectral radius, and for t = 1..t_max the
    sandwich |lambda2(Q)|^t <= d(t) <= ||A^(t-1)||_1 with d(t) computed by
    dense powering of Q.
    """
    walk = build_local_walk(instance, p)
    if len(walk.states) > state_cap:
        raise CapacityError(f"{len(walk.states)} walk states exceed cap {state_cap}")
    m = walk.free_count
    res = detailed_balance_residual(walk.transition, walk.stationary)
    lazy_walk = lazy(walk)
    l2p = lambda2(walk)
    l2q = lambda2(lazy_walk)
    psi = influence_matrix(instance, p, PSI_ZERO)
    rho = power_iteration(psi.entries).value
    A = coupling_matrix(instance, p).matrix
    lazy_gap = abs(l2q - ((m - 1) * l2p + 1.0) / m)
    q_bound_ok = l2q <= (rho + 1.0) / m + tol
    p_bound_ok = l2p <= rho / (m - 1) + tol
    t_values, d_values, lowers, uppers, oks = [], [], [], [], []
    Qpow = lazy_walk.transition.copy()
    Apow = np.eye(A.shape[0])
    for t in range(1, t_max + 1):
        d_t = float(pairwise_tv_max(np.ascontiguousarray(Qpow)))
        lower = abs(l2q) ** t
        upper = induced_norm(Apow, 1)
        ok = lower <= d_t + tol and d_t <= upper + tol
        t_values.append(t)
        d_values.append(d_t)
        lowers.append(lower)
        uppers.append(upper)
        oks.append(ok)
        Qpow = Qpow @ lazy_walk.transition
        Apow = Apow @ A
    all_ok = (
        res <= 1e-10
        and lazy_gap <= tol
        and q_bound_ok
        and p_bound_ok
        and all(oks)
    )
    return LocalChainReport(
        free_count=m,
        state_count=len(walk.states),
        detailed_balance_residual=res,
        lambda2_p=l2p,
        lambda2_q=l2q,
        rho_psi=rho,
        lazy_identity_gap=lazy_gap,
        lambda2_q_le_rho_bound=q_bound_ok,
        lambda2_p_le_rho_bound=p_bound_ok,
        t_values=tuple(t_values),
        d_values=tuple(d_values),
        lower_values=tuple(lowers),
        upper_values=tuple(uppers),
        sandwich_ok=tuple(oks),
        all_ok=all_ok,
    )
