import math

import numpy as np
import pytest

import oracles
from specmix import (
    CapacityError,
    ContractError,
    InfeasibleError,
    ListColouringInstance,
    Graph,
    NotReversibleError,
    ParameterError,
    Pinning,
    enumerate_distribution,
    gelfand_estimate,
    independent_instance,
    induced_norm,
    influence_matrix,
    marginal,
    marginal_recursion,
    path_instance,
    power_iteration,
    spectral_radius,
    symmetric_eigenvalues,
    tv_distance,
)
from specmix.exact import PSI_ZERO, R_INDICATOR, gelfand_norm_root, vertex_colour_counts
from specmix.instance import EMPTY_PINNING
from specmix.localwalk import build_local_walk


def test_enumerate_edge_q3():
    table = enumerate_distribution(path_instance(2, 3))
    assert len(table) == 6
    assert np.allclose(table.mass, 1 / 6)


def test_enumerate_single_vertex():
    inst = ListColouringInstance(Graph(1, ()), ((0,),))
    table = enumerate_distribution(inst)
    assert len(table) == 1
    assert table.mass[0] == 1.0


def test_enumerate_frozen_triangle_two_colours_empty():
    inst = ListColouringInstance(Graph(3, ((0, 1), (1, 2), (0, 2))), ((0, 1),) * 3)
    assert enumerate_distribution(inst).is_empty


def test_enumerate_matches_brute_oracle(random_corpus_small):
    for _, inst in random_corpus_small[:20]:
        got = {s.assignment for s in enumerate_distribution(inst).support}
        assert got == set(oracles.brute_states(inst))


def test_enumeration_cap(monkeypatch):
    monkeypatch.setenv("SPECMIX_CAP", "3")
    with pytest.raises(CapacityError):
        enumerate_distribution(path_instance(4, 3))


def test_marginal_examples():
    edge = path_instance(2, 3)
    assert marginal(edge, EMPTY_PINNING, 0).probs == pytest.approx(
        {0: 1 / 3, 1: 1 / 3, 2: 1 / 3}
    )
    pinned = marginal(edge, Pinning(((0, 0),)), 1)
    assert pinned.probs == pytest.approx({1: 0.5, 2: 0.5})
    iso = independent_instance(1, 2)
    assert marginal(iso, EMPTY_PINNING, 0).probs == pytest.approx({0: 0.5, 1: 0.5})


def test_marginal_errors():
    edge = path_instance(2, 3)
    with pytest.raises(ContractError):
        marginal(edge, Pinning(((0, 0),)), 0)
    forced = ListColouringInstance(Graph(2, ((0, 1),)), ((0,), (0,)))
    with pytest.raises(InfeasibleError):
        marginal(forced, EMPTY_PINNING, 0)


def test_marginal_recursion_edge():
    # numerator (1 - 1/3) = 2/3, denominator 3 * (2/3) = 2
    assert marginal_recursion(path_instance(2, 3), 0, 0) == pytest.approx(1 / 3, abs=1e-12)


def test_marginal_recursion_isolated_empty_product():
    assert marginal_recursion(independent_instance(1, 2), 0, 0) == pytest.approx(0.5)


def test_marginal_recursion_path_matches_enumeration():
    inst = path_instance(3, 3)
    direct = marginal(inst, EMPTY_PINNING, 1).probs[0]
    assert direct == pytest.approx(1 / 3, abs=1e-12)
    assert marginal_recursion(inst, 1, 0) == pytest.approx(direct, abs=1e-12)


def test_marginal_recursion_matches_enumeration_corpus(random_corpus_small):
    for _, inst in random_corpus_small[:12]:
        probs = {
            v: marginal(inst, EMPTY_PINNING, v).probs for v in range(inst.n)
        }
        for v in range(inst.n):
            for c in inst.lists[v]:
                rec = marginal_recursion(inst, v, c)
                assert rec == pytest.approx(probs[v].get(c, 0.0), abs=1e-12)


def test_tv_examples():
    assert tv_distance({0: 0.5, 1: 0.5}, {0: 0.5, 1: 0.5}) == 0.0
    assert tv_distance({1: 0.5, 2: 0.5}, {0: 0.5, 2: 0.5}) == pytest.approx(0.5)
    assert tv_distance({0: 1.0}, {1: 1.0}) == pytest.approx(1.0)


def test_influence_edge_q3():
    psi = influence_matrix(path_instance(2, 3))
    assert psi.entries == pytest.approx(np.array([[0.0, 0.5], [0.5, 0.0]]))


def test_influence_independent_zero():
    psi = influence_matrix(independent_instance(2, 2))
    assert np.all(psi.entries == 0.0)


def test_influence_path_q3():
    # conditional marginals of v are (1/2,1/4,1/4) vs (1/4,1/2,1/4)
    psi = influence_matrix(path_instance(3, 3))
    assert psi.entries[0, 2] == pytest.approx(0.25, abs=1e-12)
    assert psi.entries[0, 1] == pytest.approx(0.5, abs=1e-12)


def test_influence_conventions():
    inst = path_instance(3, 3)
    psi = influence_matrix(inst, convention=PSI_ZERO)
    assert np.all(np.diag(psi.entries) == 0.0)
    r = influence_matrix(inst, convention=R_INDICATOR)
    assert np.all(np.diag(r.entries) == 1.0)
    off = ~np.eye(3, dtype=bool)
    assert psi.entries[off] == pytest.approx(r.entries[off])
    single = ListColouringInstance(Graph(2, ()), ((0,), (0, 1)))
    r2 = influence_matrix(single, convention=R_INDICATOR)
    assert r2.entries[0, 0] == 0.0 and r2.entries[1, 1] == 1.0


def test_influence_requires_two_free_vertices():
    edge = path_instance(2, 3)
    with pytest.raises(ContractError):
        influence_matrix(edge, Pinning(((0, 0),)))


def test_influence_infeasible_pinning():
    inst = ListColouringInstance(
        Graph(3, ((0, 1), (0, 2))), ((0, 1), (0,), (0, 1))
    )
    # pinning vertex 2 to 0 forces vertex 0 to 1... fine; make it infeasible
    bad = ListColouringInstance(Graph(3, ((0, 1), (1, 2))), ((0,), (0, 1), (1,)))
    with pytest.raises(InfeasibleError):
        influence_matrix(bad, Pinning(((1, 1),)))
    influence_matrix(inst)  # sanity: feasible one works


def test_influence_matches_brute_oracle(random_corpus_small):
    import random

    rng = random.Random(5)
    checked = 0
    for _, inst in random_corpus_small:
        if inst.n < 3:
            continue
        psi = influence_matrix(inst)
        free, mat = oracles.brute_influence(inst)
        assert psi.order == tuple(free)
        assert psi.entries == pytest.approx(np.array(mat), abs=1e-12)
        # one random feasible single-vertex pinning per instance
        v = rng.randrange(inst.n)
        for c in inst.lists[v]:
            pinned = {v: c}
            if oracles.brute_states(inst, pinned) and inst.n - 1 >= 2:
                p = Pinning(((v, c),))
                got = influence_matrix(inst, p)
                free_p, mat_p = oracles.brute_influence(inst, pinned)
                assert got.order == tuple(free_p)
                assert got.entries == pytest.approx(np.array(mat_p), abs=1e-12)
                break
        checked += 1
        if checked >= 8:
            break
    assert checked >= 5


def test_influence_colour_relabel_invariance():
    inst = path_instance(3, 3)
    relabel = {0: 7, 1: 3, 2: 11}
    mapped = inst.with_lists(
        tuple(tuple(sorted(relabel[c] for c in lst)) for lst in inst.lists)
    )
    a = influence_matrix(inst).entries
    b = influence_matrix(mapped).entries
    assert a == pytest.approx(b, abs=1e-12)


def test_vertex_colour_counts():
    counts, total = vertex_colour_counts(path_instance(2, 3), 0)
    assert total == 6
    assert counts == {0: 2, 1: 2, 2: 2}


def test_spectral_radius_examples():
    assert spectral_radius(np.zeros((3, 3))) == 0.0
    assert spectral_radius(np.array([[0.0, 0.5], [0.5, 0.0]])) == pytest.approx(0.5, abs=1e-9)
    rng = np.random.default_rng(0)
    M = rng.random((6, 6))
    M = M / M.sum(axis=1, keepdims=True)  # row-stochastic
    assert spectral_radius(M) == pytest.approx(1.0, abs=1e-9)


def test_spectral_radius_bipartite_support():
    # eigenvalues are +-sqrt(1/2); naive unshifted iteration oscillates here
    M = np.array([[0.0, 0.5], [1.0, 0.0]])
    assert spectral_radius(M) == pytest.approx(math.sqrt(0.5), abs=1e-9)


def test_spectral_radius_matches_numpy():
    rng = np.random.default_rng(42)
    for _ in range(20):
        n = rng.integers(2, 7)
        M = rng.random((n, n)) * (rng.random((n, n)) < 0.7)
        want = max(abs(np.linalg.eigvals(M)))
        got = power_iteration(M)
        assert got.value == pytest.approx(want, abs=1e-7)


def test_spectral_radius_rejects_negative():
    with pytest.raises(ContractError):
        spectral_radius(np.array([[0.0, -1.0], [0.0, 0.0]]))


def test_induced_norms():
    psi = influence_matrix(path_instance(2, 3)).entries
    assert induced_norm(psi, math.inf) == pytest.approx(0.5)
    assert induced_norm(np.zeros((2, 2)), 1) == 0.0
    assert induced_norm(np.eye(3), 1) == 1.0
    assert induced_norm(np.eye(3), math.inf) == 1.0
    with pytest.raises(ParameterError):
        induced_norm(np.eye(2), 2)


def test_gelfand_estimate_close_to_rho(random_corpus_small):
    mats = [influence_matrix(inst).entries for _, inst in random_corpus_small[:10] if inst.n >= 2]
    mats.append(influence_matrix(path_instance(3, 3)).entries)
    for M in mats:
        rho = max(abs(np.linalg.eigvals(M)))
        assert gelfand_estimate(M) == pytest.approx(rho, abs=1e-3)
        # the raw norm root is an upper bound on rho
        assert gelfand_norm_root(M, 64) >= rho - 1e-12


def test_gelfand_zero_matrix():
    assert gelfand_estimate(np.zeros((3, 3))) == 0.0


def test_symmetric_eigenvalues_identity():
    vals = symmetric_eigenvalues(np.eye(4), np.full(4, 0.25))
    assert vals == pytest.approx(np.ones(4))


def test_symmetric_eigenvalues_two_state_chain():
    a = b = 0.5
    P = np.array([[1 - a, a], [b, 1 - b]])
    pi = np.array([b / (a + b), a / (a + b)])
    vals = symmetric_eigenvalues(P, pi)
    assert vals == pytest.approx(np.array([1.0, 1 - a - b]), abs=1e-12)
    a, b = 0.3, 0.2
    P = np.array([[1 - a, a], [b, 1 - b]])
    pi = np.array([b / (a + b), a / (a + b)])
    vals = symmetric_eigenvalues(P, pi)
    assert vals == pytest.approx(np.array([1.0, 1 - a - b]), abs=1e-12)


def test_symmetric_eigenvalues_edge_local_walk():
    walk = build_local_walk(path_instance(2, 3))
    vals = symmetric_eigenvalues(walk.transition, walk.stationary)
    assert vals == pytest.approx(np.array([1, 0.5, 0.5, -0.5, -0.5, -1]), abs=1e-9)


def test_symmetric_eigenvalues_matches_numpy():
    rng = np.random.default_rng(3)
    for _ in range(10):
        n = int(rng.integers(2, 8))
        pi = rng.random(n) + 0.1
        pi /= pi.sum()
        S = rng.random((n, n))
        S = S + S.T
        # build a pi-reversible matrix from a symmetric one
        M = S / np.sqrt(pi)[:, None] * np.sqrt(pi)[None, :]
        want = np.sort(np.linalg.eigvals(np.diag(np.sqrt(pi)) @ M @ np.diag(1 / np.sqrt(pi))).real)[::-1]
        got = symmetric_eigenvalues(M, pi)
        assert got == pytest.approx(want, abs=1e-9)


def test_symmetric_eigenvalues_not_reversible():
    M = np.array([[0.2, 0.8], [0.1, 0.9]])
    with pytest.raises(NotReversibleError):
        symmetric_eigenvalues(M, np.array([0.5, 0.5]))
