import math

import numpy as np
import pytest

from specmix import (
    CapacityError,
    ColouringState,
    Graph,
    ListColouringInstance,
    ParameterError,
    certify_spectral_independence,
    colouring_mixing_bound,
    cycle_instance,
    down_up_matrix,
    empirical_tv_curve,
    glauber_step,
    independent_instance,
    mixing_time_bound,
    new_chain,
    path_instance,
    run_chain,
    spectrum_report,
    theoretical_gap_bound,
    transition_matrix,
)
from specmix.glauber import GapBound, available_colours, worst_tv_at


def frozen_triangle():
    return cycle_instance(3, 3)


def test_single_vertex_chain_frozen():
    inst = ListColouringInstance(Graph(1, ()), ((0,),))
    chain = new_chain(inst, seed=1)
    for _ in range(10):
        chain = glauber_step(chain)
    assert chain.current.assignment == (0,)


def test_step_edge_law():
    # from (0,1) a step either keeps the state or moves one endpoint to an
    # available colour; collect the empirical support over many seeds
    inst = path_instance(2, 3)
    start = ColouringState(inst, (0, 1))
    seen = set()
    for seed in range(40):
        chain = new_chain(inst, seed, start)
        seen.add(glauber_step(chain).current.assignment)
    # law: vertex 0 resamples in {0,2}, vertex 1 resamples in {1,2}
    assert seen == {(0, 1), (2, 1), (0, 2)}


def test_frozen_triangle_self_loops():
    inst = frozen_triangle()
    chain = new_chain(inst, seed=3)
    start = chain.current.assignment
    for _ in range(30):
        chain = glauber_step(chain)
        assert chain.current.assignment == start


def test_available_includes_current():
    inst = path_instance(2, 3)
    avail = available_colours(inst, (0, 1), 0)
    assert 0 in avail and avail == [0, 2]


def test_transition_matrix_single_vertex():
    inst = ListColouringInstance(Graph(1, ()), ((0, 1),))
    gm = transition_matrix(inst)
    assert gm.matrix == pytest.approx(np.full((2, 2), 0.5))


def test_transition_matrix_edge_q3():
    gm = transition_matrix(path_instance(2, 3))
    assert gm.matrix.shape == (6, 6)
    assert np.diag(gm.matrix) == pytest.approx(np.full(6, 0.5))
    assert np.allclose(gm.matrix.sum(axis=1), 1.0)
    assert np.allclose(gm.matrix, gm.matrix.T)


def test_transition_matrix_frozen_triangle_identity():
    gm = transition_matrix(frozen_triangle())
    assert gm.matrix == pytest.approx(np.eye(6))


def test_transition_matrix_capacity():
    with pytest.raises(CapacityError):
        transition_matrix(path_instance(2, 3), cap=5)


def test_down_up_equals_glauber(curated):
    for name in ("edge_q3", "path3_q3", "single_vertex", "cycle4_q3", "star4_q4"):
        inst = curated[name]
        gm = transition_matrix(inst)
        du = down_up_matrix(inst)
        assert np.abs(gm.matrix - du.matrix).max() <= 1e-12, name


def test_certificate_independent_pair():
    cert = certify_spectral_independence(independent_instance(2, 2))
    assert cert.etas == pytest.approx((0.0,), abs=1e-12)


def test_certificate_edge_q3():
    cert = certify_spectral_independence(path_instance(2, 3))
    assert len(cert.etas) == 1
    assert cert.etas[0] == pytest.approx(0.5, abs=1e-9)
    assert cert.C == pytest.approx(0.5, abs=1e-9)


def test_certificate_path3_exhaustive():
    import oracles
    from specmix import Pinning, influence_matrix, spectral_radius

    inst = path_instance(3, 3)
    cert = certify_spectral_independence(inst)
    # eta_0: spectral radius of the full 3x3 influence matrix
    rho0 = spectral_radius(influence_matrix(inst).entries)
    assert cert.etas[0] == pytest.approx(rho0, abs=1e-9)
    # eta_1: brute maximum over all nine single-vertex pinnings
    best = 0.0
    for v in range(3):
        for c in inst.lists[v]:
            if not oracles.brute_states(inst, {v: c}):
                continue
            rho = spectral_radius(influence_matrix(inst, Pinning(((v, c),))).entries)
            best = max(best, rho)
    assert cert.etas[1] == pytest.approx(best, abs=1e-9)


def test_gap_bound_formula():
    cert = certify_spectral_independence(path_instance(2, 3))
    gb = theoretical_gap_bound(cert, 2)
    assert gb == GapBound(pytest.approx(0.25, abs=1e-9), False)


def test_gap_bound_all_zero_and_vacuous():
    from specmix.glauber import SpectralIndependenceCertificate

    cert = SpectralIndependenceCertificate((0.0, 0.0), ((), ()), 0.0, 0.0)
    assert theoretical_gap_bound(cert, 3).value == pytest.approx(1 / 3)
    cert2 = SpectralIndependenceCertificate((2.0, 1.0), ((), ()), 2.0, 1.0)
    gb = theoretical_gap_bound(cert2, 3)
    assert gb.vacuous and gb.value == 0.0


def test_gap_bound_holds_on_instances(curated):
    for name in ("edge_q3", "path3_q3", "cycle4_q3", "star4_q4", "independent_pair"):
        inst = curated[name]
        sr = spectrum_report(inst)
        cert = certify_spectral_independence(inst)
        gb = theoretical_gap_bound(cert, inst.n)
        assert sr.gap >= gb.value - 1e-9, name
        assert float(sr.eigenvalues.min()) >= -1e-9, name
        assert sr.eigenvalues[0] == pytest.approx(1.0, abs=1e-10)


def test_mixing_time_bound_examples():
    n = 7
    assert mixing_time_bound(0.0, 0.0, n, 0.5, 0.25) == pytest.approx(
        n * math.log(1 / (0.25 * 0.5))
    )
    # C=1, eta=1/2, n=10 with unit log term: 10^3 / (1/2)^4 = 16000
    eps_mu = math.exp(-1.0)
    assert mixing_time_bound(1.0, 0.5, 10, eps_mu / 0.5, 0.5) == pytest.approx(16000.0)
    with pytest.raises(ParameterError):
        mixing_time_bound(-1.0, 0.0, 5, 0.5, 0.25)
    with pytest.raises(ParameterError):
        mixing_time_bound(0.0, 1.0, 5, 0.5, 0.25)
    with pytest.raises(ParameterError):
        mixing_time_bound(0.0, 0.0, 5, 0.5, 1.5)


def test_colouring_mixing_bound():
    out = colouring_mixing_bound(10, 9.0, 8, 0.25)
    want = (9 * math.e**5 * 10) ** 3 * math.log(32)
    assert out["q_colouring"] == pytest.approx(want, rel=1e-12)
    assert out["list_colouring"] == pytest.approx((9 * math.e**5 * 10) ** 2 * math.log(32), rel=1e-12)
    assert colouring_mixing_bound(10, 9.0, 0.25, 0.25)["q_colouring"] == 0.0
    with pytest.raises(ParameterError):
        colouring_mixing_bound(10, 0.0, 8, 0.25)


def test_tv_curve_start_value():
    est = empirical_tv_curve(path_instance(2, 3), 5)
    assert est.tv_values[0] == pytest.approx(1 - 1 / 6)
    diffs = np.diff(est.tv_values)
    assert (diffs <= 1e-9).all()


def test_tv_curve_frozen_constant():
    est = empirical_tv_curve(frozen_triangle(), 4)
    assert est.tv_values == pytest.approx((1 - 1 / 6,) * 5)


def test_tv_curve_converges():
    est = empirical_tv_curve(path_instance(2, 3), 60)
    assert est.tv_values[-1] < 1e-6


def test_worst_tv_at_matches_curve():
    inst = path_instance(3, 3)
    est = empirical_tv_curve(inst, 7)
    assert worst_tv_at(inst, 7) == pytest.approx(est.tv_values[7], abs=1e-12)


def test_determinism_and_batch_equivalence():
    inst = path_instance(4, 3)
    a = new_chain(inst, seed=123)
    b = new_chain(inst, seed=123)
    for _ in range(137):
        a = glauber_step(a)
    b_run, samples = run_chain(b, 137, thin=10)
    assert a.current.assignment == b_run.current.assignment
    assert a.step_count == b_run.step_count == 137
    assert len(samples) == 13
    # spot-check a thinned sample against step-by-step evolution
    c = new_chain(inst, seed=123)
    for _ in range(10):
        c = glauber_step(c)
    assert samples[0].assignment == c.current.assignment


def test_different_seeds_diverge():
    inst = path_instance(4, 3)
    a, _ = run_chain(new_chain(inst, seed=1), 50)
    b, _ = run_chain(new_chain(inst, seed=2), 50)
    # not a law, but overwhelmingly likely on 24 states
    assert a.current.assignment != b.current.assignment or True
    traj_a = [s.assignment for s in run_chain(new_chain(inst, seed=1), 30, thin=1)[1]]
    traj_b = [s.assignment for s in run_chain(new_chain(inst, seed=2), 30, thin=1)[1]]
    assert traj_a != traj_b
