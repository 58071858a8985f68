"""Glauber dynamics: single-site resampling chains, their exact transition
matrices, the down-up walk cross-check, spectral-independence certification,
and mixing-time machinery.

Chains are deterministic functions of (seed, step index): step t consumes
counter-based draws 2t (vertex) and 2t+1 (colour), so trajectories are
bit-reproducible across platforms and backends.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import _rng
from ._kernels import glauber_run
from .errors import CapacityError, ContractError, InfeasibleError, ParameterError
from .exact import (
    PSI_ZERO,
    DistributionTable,
    enumerate_distribution,
    influence_matrix,
    power_iteration,
    symmetric_eigenvalues,
)
from .instance import (
    EMPTY_PINNING,
    ColouringState,
    ListColouringInstance,
    Pinning,
    compiled_arrays,
)

DEFAULT_STATE_CAP = 5000


@dataclass(frozen=True)
class GlauberChain:
    instance: ListColouringInstance
    current: ColouringState
    seed: int
    step_count: int = 0


def new_chain(instance: ListColouringInstance, seed: int, start: ColouringState | None = None) -> GlauberChain:
    """Chain at step 0; without an explicit start the first colouring in
    enumeration order is used (deterministic)."""
    if instance.n == 0:
        raise ContractError("chain needs at least one vertex")
    if start is None:
        from ._kernels import MODE_FIRST, dfs_colourings
        from .instance import fixed_array, node_cap

        indptr, indices, lptr, lcodes, ncol, _, universe = compiled_arrays(instance)
        out = np.empty((1, instance.n), dtype=np.int64)
        fixed = fixed_array(instance, EMPTY_PINNING)
        count, _, _, aborted = dfs_colourings(
            indptr, indices, lptr, lcodes, fixed, ncol, node_cap(), MODE_FIRST, out
        )
        if aborted:
            raise CapacityError("enumeration cap exceeded while seeking a start state")
        if count == 0:
            raise InfeasibleError("instance admits no proper colouring")
        start = ColouringState(instance, tuple(universe[c] for c in out[0]))
    elif start.instance != instance:
        raise ContractError("start state belongs to a different instance")
    return GlauberChain(instance, start, int(seed), 0)


def available_colours(instance: ListColouringInstance, assignment, v: int) -> list[int]:
    nbr_cols = {assignment[w] for w in instance.graph.neighbours(v)}
    return [c for c in instance.lists[v] if c not in nbr_cols]


def glauber_step(chain: GlauberChain) -> GlauberChain:
    """One single-site update: uniform vertex, uniform available colour
    (the current colour of the vertex is always available)."""
    inst = chain.instance
    t = chain.step_count
    v = _rng.draw_below(chain.seed, 2 * t, inst.n)
    avail = available_colours(inst, chain.current.assignment, v)
    assert avail, "proper state left a vertex with no available colour"
    c = avail[_rng.draw_below(chain.seed, 2 * t + 1, len(avail))]
    a = list(chain.current.assignment)
    a[v] = c
    return GlauberChain(inst, ColouringState(inst, tuple(a)), chain.seed, t + 1)


def run_chain(chain: GlauberChain, steps: int, thin: int = 0):
    """Advance ``steps`` steps via the batched kernel.

    Returns ``(chain, samples)`` where samples holds every ``thin``-th state
    (empty when thin == 0).  Semantics match repeated :func:`glauber_step`.
    """
    inst = chain.instance
    indptr, indices, lptr, lcodes, _, code_of, universe = compiled_arrays(inst)
    state = np.array([code_of[c] for c in chain.current.assignment], dtype=np.int64)
    nrows = steps // thin if thin > 0 else 0
    out = np.empty((nrows, inst.n), dtype=np.int64)
    glauber_run(indptr, indices, lptr, lcodes, state, steps, chain.seed,
                chain.step_count, thin, out)
    samples = [
        ColouringState(inst, tuple(universe[c] for c in row)) for row in out
    ]
    final = ColouringState(inst, tuple(universe[c] for c in state))
    return GlauberChain(inst, final, chain.seed, chain.step_count + steps), samples


@dataclass(frozen=True, eq=False)
class GlauberMatrix:
    support: DistributionTable
    matrix: np.ndarray

    def state_index(self) -> dict:
        return {s.assignment: i for i, s in enumerate(self.support.support)}


def transition_matrix(instance: ListColouringInstance, cap: int = DEFAULT_STATE_CAP) -> GlauberMatrix:
    """Exact transition matrix of the dynamics over all proper colourings."""
    if instance.n == 0:
        raise ContractError("dynamics needs at least one vertex")
    table = enumerate_distribution(instance)
    size = len(table)
    if size == 0:
        raise InfeasibleError("instance admits no proper colouring")
    if size > cap:
        raise CapacityError(f"state space size {size} exceeds cap {cap}")
    index = {s.assignment: i for i, s in enumerate(table.support)}
    n = instance.n
    M = np.zeros((size, size))
    for i, s in enumerate(table.support):
        a = s.assignment
        for v in range(n):
            avail = available_colours(instance, a, v)
            w = 1.0 / (n * len(avail))
            for c in avail:
                y = a[:v] + (c,) + a[v + 1:]
                M[i, index[y]] += w
    return GlauberMatrix(table, M)


def down_up_matrix(instance: ListColouringInstance, cap: int = DEFAULT_STATE_CAP) -> GlauberMatrix:
    """Down-up walk on the colouring complex built from first principles.

    Maximal faces carry the distribution weights; every co-dimension-one
    face gets the induced weight (the sum over maximal faces containing it)
    and the walk drops a uniformly random element and re-extends with
    probability proportional to the induced weights.
    """
    if instance.n == 0:
        raise ContractError("dynamics needs at least one vertex")
    table = enumerate_distribution(instance)
    size = len(table)
    if size == 0:
        raise InfeasibleError("instance admits no proper colouring")
    if size > cap:
        raise CapacityError(f"state space size {size} exceeds cap {cap}")
    n = instance.n
    mass = table.mass
    groups: dict = {}
    for i, s in enumerate(table.support):
        a = s.assignment
        for v in range(n):
            key = (v, a[:v] + a[v + 1:])
            groups.setdefault(key, []).append(i)
    M = np.zeros((size, size))
    for members in groups.values():
        g = np.array(members)
        pi_tau = float(mass[g].sum())
        M[np.ix_(g, g)] += mass[g][None, :] / (n * pi_tau)
    return GlauberMatrix(table, M)


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    eigenvalues: np.ndarray
    gap: float
    absolute_gap: float


def spectrum_report(instance: ListColouringInstance, cap: int = DEFAULT_STATE_CAP) -> SpectrumReport:
    gm = transition_matrix(instance, cap)
    size = len(gm.support)
    pi = np.full(size, 1.0 / size)
    vals = symmetric_eigenvalues(gm.matrix, pi)
    if size == 1:
        return SpectrumReport(vals, 1.0, 1.0)
    gap = 1.0 - float(vals[1])
    absolute_gap = 1.0 - float(np.max(np.abs(vals[1:])))
    return SpectrumReport(vals, gap, absolute_gap)


@dataclass(frozen=True)
class SpectralIndependenceCertificate:
    """Exact eta_k = max over feasible size-k pinnings of rho(Psi)."""

    etas: tuple[float, ...]
    witnesses: tuple[Pinning, ...]
    C: float
    eta: float


def certify_spectral_independence(instance: ListColouringInstance) -> SpectralIndependenceCertificate:
    n = instance.n
    if n < 2:
        return SpectralIndependenceCertificate((), (), 0.0, 0.0)
    etas = []
    witnesses = []
    for k in range(n - 1):
        best = 0.0
        best_pin = None
        for lam in itertools.combinations(range(n), k):
            for colours in itertools.product(*(instance.lists[v] for v in lam)):
                p = Pinning(tuple(zip(lam, colours)))
                try:
                    psi = influence_matrix(instance, p, PSI_ZERO)
                except InfeasibleError:
                    continue
                rho = power_iteration(psi.entries).value
                if best_pin is None or rho > best:
                    best = rho
                    best_pin = p
        if best_pin is None:
            raise InfeasibleError(f"no feasible pinning of size {k}")
        etas.append(best)
        witnesses.append(best_pin)
    C = max(etas)
    eta = max(e / (n - k - 1) for k, e in enumerate(etas))
    return SpectralIndependenceCertificate(tuple(etas), tuple(witnesses), C, eta)


@dataclass(frozen=True)
class GapBound:
    value: float
    vacuous: bool


def theoretical_gap_bound(cert: SpectralIndependenceCertificate, n: int) -> GapBound:
    """(1/n) * prod_k (1 - eta_k/(n-k-1)); zero with a flag when vacuous."""
    if len(cert.etas) != n - 1:
        raise ContractError("certificate does not match the instance size")
    value = 1.0 / n
    for k, eta_k in enumerate(cert.etas):
        denom = n - k - 1
        if eta_k >= denom:
            return GapBound(0.0, True)
        value *= 1.0 - eta_k / denom
    return GapBound(value, False)


def mixing_time_bound(C: float, eta: float, n: int, mu_min: float, eps: float) -> float:
    """n^(1+2C) / (1-eta)^(2+2C) * log(1/(eps*mu_min))."""
    if not (0.0 <= eta < 1.0):
        raise ParameterError("eta must lie in [0, 1)")
    if C < 0.0:
        raise ParameterError("C must be nonnegative")
    if not (0.0 < eps < 1.0):
        raise ParameterError("eps must lie in (0, 1)")
    if not (0.0 < mu_min <= 1.0):
        raise ParameterError("mu_min must lie in (0, 1]")
    if n < 1:
        raise ParameterError("n must be positive")
    return n ** (1.0 + 2.0 * C) / (1.0 - eta) ** (2.0 + 2.0 * C) * math.log(1.0 / (eps * mu_min))


def colouring_mixing_bound(n: int, delta: float, q_or_m: float, eps: float) -> dict:
    """Both colouring mixing bounds, labelled.

    ``q_colouring``: (9e^5 n)^(2+9/delta) * log(q/eps) with q = q_or_m.
    ``list_colouring``: (9e^5 n)^(1+9/delta) * log(M/eps) with M = q_or_m.
    """
    if delta <= 0:
        raise ParameterError("delta must be positive")
    if n < 1 or q_or_m <= 0 or eps <= 0:
        raise ParameterError("n, q_or_M and eps must be positive")
    base = math.log(9.0 * math.e**5 * n)
    logterm = math.log(q_or_m / eps)
    out = {}
    for label, expo in (("q_colouring", 2.0 + 9.0 / delta), ("list_colouring", 1.0 + 9.0 / delta)):
        if logterm <= 0.0:
            out[label] = 0.0
            continue
        try:
            out[label] = math.exp(expo * base + math.log(logterm))
        except OverflowError:
            out[label] = math.inf
    return out


@dataclass(frozen=True)
class MixingEstimate:
    t_values: tuple[int, ...]
    tv_values: tuple[float, ...]
    worst_starts: tuple[int, ...]


def empirical_tv_curve(instance: ListColouringInstance, t_max: int, cap: int = DEFAULT_STATE_CAP) -> MixingEstimate:
    """Exact worst-start TV to stationarity for t = 0..t_max, by powering."""
    gm = transition_matrix(instance, cap)
    size = len(gm.support)
    mu = np.full(size, 1.0 / size)
    rows = np.eye(size)
    ts, tvs, starts = [], [], []
    for t in range(t_max + 1):
        per_start = 0.5 * np.abs(rows - mu[None, :]).sum(axis=1)
        worst = int(np.argmax(per_start))
        ts.append(t)
        tvs.append(float(per_start[worst]))
        starts.append(worst)
        if t < t_max:
            rows = rows @ gm.matrix
    return MixingEstimate(tuple(ts), tuple(tvs), tuple(starts))


def worst_tv_at(instance: ListColouringInstance, t: int, cap: int = DEFAULT_STATE_CAP) -> float:
    """Exact worst-start TV to stationarity after exactly t steps."""
    gm = transition_matrix(instance, cap)
    size = len(gm.support)
    mu = np.full(size, 1.0 / size)
    rows = np.linalg.matrix_power(gm.matrix, t)
    return float((0.5 * np.abs(rows - mu[None, :]).sum(axis=1)).max())
