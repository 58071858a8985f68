import numpy as np
import pytest

from specmix import (
    ContractError,
    Pinning,
    build_local_walk,
    coupling_matrix,
    independent_instance,
    lambda2,
    lazy,
    path_instance,
    verify_local_chain,
)
from specmix.corpus import all_feasible_pinnings
from specmix.exact import detailed_balance_residual
from specmix.instance import EMPTY_PINNING


def test_edge_q3_walk_structure():
    walk = build_local_walk(path_instance(2, 3))
    assert len(walk.states) == 6
    idx = {s: i for i, s in enumerate(walk.states)}
    # moves go to the other vertex with the conditional marginal 1/2 off the
    # current colour
    assert walk.transition[idx[(0, 0)], idx[(1, 0)]] == 0.0
    assert walk.transition[idx[(0, 0)], idx[(1, 1)]] == pytest.approx(0.5)
    assert walk.transition[idx[(0, 0)], idx[(0, 1)]] == 0.0
    assert np.allclose(walk.transition.sum(axis=1), 1.0)
    assert walk.stationary.sum() == pytest.approx(1.0)
    assert detailed_balance_residual(walk.transition, walk.stationary) <= 1e-14


def test_edge_q3_eigenvalues():
    walk = build_local_walk(path_instance(2, 3))
    assert lambda2(walk) == pytest.approx(0.5, abs=1e-12)
    assert lambda2(lazy(walk)) == pytest.approx(0.75, abs=1e-12)


def test_independent_pair_walk():
    walk = build_local_walk(independent_instance(2, 2))
    assert len(walk.states) == 4
    assert np.all(walk.transition[walk.transition > 0] == 0.5)
    assert lambda2(walk) == pytest.approx(0.0, abs=1e-12)
    assert lambda2(lazy(walk)) == pytest.approx(0.5, abs=1e-12)


def test_walk_needs_two_free_vertices():
    edge = path_instance(2, 3)
    with pytest.raises(ContractError):
        build_local_walk(edge, Pinning(((0, 0),)))


def test_lazy_diagonal():
    walk = build_local_walk(path_instance(2, 3))
    q = lazy(walk)
    assert np.allclose(np.diag(q.transition), 0.5)
    assert np.allclose(
        q.transition, 0.5 * walk.transition + 0.5 * np.eye(len(walk.states))
    )


def test_coupling_matrix_examples():
    cm = coupling_matrix(path_instance(2, 3))
    assert cm.matrix == pytest.approx(np.array([[0.5, 0.25], [0.25, 0.5]]))
    cm2 = coupling_matrix(independent_instance(2, 2))
    assert cm2.matrix == pytest.approx(0.5 * np.eye(2))
    cm3 = coupling_matrix(path_instance(3, 3))
    assert np.diag(cm3.matrix) == pytest.approx(np.full(3, 1 / 3))


def test_verify_chain_edge_tight():
    rep = verify_local_chain(path_instance(2, 3))
    assert rep.all_ok
    assert rep.lambda2_p == pytest.approx(0.5, abs=1e-12)
    assert rep.lambda2_q == pytest.approx(0.75, abs=1e-12)
    assert rep.rho_psi == pytest.approx(0.5, abs=1e-9)
    # both eigenvalue bounds are tight here
    assert rep.lambda2_p == pytest.approx(rep.rho_psi / 1, abs=1e-9)
    assert rep.lambda2_q == pytest.approx((rep.rho_psi + 1) / 2, abs=1e-9)


def test_verify_chain_independent_pair():
    rep = verify_local_chain(independent_instance(2, 2))
    assert rep.all_ok
    assert rep.lambda2_p == pytest.approx(0.0, abs=1e-9)


def test_verify_chain_path_all_single_pinnings():
    inst = path_instance(3, 3)
    rep = verify_local_chain(inst)
    assert rep.all_ok
    for p in all_feasible_pinnings(inst, 1):
        if len(p) == 1:
            assert verify_local_chain(inst, p).all_ok


def test_report_json_shape():
    rep = verify_local_chain(path_instance(2, 3), t_max=3)
    obj = rep.to_json_dict()
    assert len(obj["coupling"]) == 3
    assert obj["coupling"][0]["t"] == 1
    assert obj["all_ok"] is True
