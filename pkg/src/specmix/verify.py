"""The `specmix verify` invariant suite.

Each check produces a report dict with ``name``, ``value``, ``bound`` and
``pass`` where pass means value <= bound + tolerance.  The suite is exact:
every quantity is computed by enumeration or dense linear algebra, never by
sampling.
"""

from __future__ import annotations

import math

import numpy as np

from . import bounds as bnd
from . import corpus, exact, glauber, localwalk
from .errors import CapacityError
from .instance import EMPTY_PINNING


def _report(name, value, bound, ok, detail=""):
    return {
        "name": name,
        "value": float(value),
        "bound": float(bound),
        "pass": bool(ok),
        "detail": detail,
    }


def check_oracle_equivalence(instances, tol=1e-12):
    worst = 0.0
    where = ""
    for name, inst in instances:
        _, margs = exact.all_marginals(inst, EMPTY_PINNING)
        for v in range(inst.n):
            for c in inst.lists[v]:
                rec = exact.marginal_recursion(inst, v, c)
                diff = abs(rec - margs[v].probs.get(c, 0.0))
                if diff > worst:
                    worst = diff
                    where = f"{name} v={v} c={c}"
    return _report("oracle_equivalence_max_diff", worst, tol, worst <= tol, where)


def check_local_chains(instances, max_pin_size=None, collect=None):
    failed = 0
    checked = 0
    for name, inst in instances:
        if inst.n < 2:
            continue
        limit = inst.n - 2 if max_pin_size is None else min(max_pin_size, inst.n - 2)
        for p in corpus.all_feasible_pinnings(inst, limit):
            rep = localwalk.verify_local_chain(inst, p)
            checked += 1
            if not rep.all_ok:
                failed += 1
            if collect is not None:
                psi = exact.influence_matrix(inst, p)
                collect.append(psi.entries)
    return _report(
        "local_chain_failures", failed, 0, failed == 0, f"{checked} pinnings checked"
    )


def check_down_up(instances, tol=1e-12, cap=5000):
    worst = 0.0
    where = ""
    for name, inst in instances:
        try:
            gm = glauber.transition_matrix(inst, cap)
            du = glauber.down_up_matrix(inst, cap)
        except CapacityError:
            continue
        diff = float(np.abs(gm.matrix - du.matrix).max())
        if diff > worst:
            worst = diff
            where = name
    return _report("down_up_max_diff", worst, tol, worst <= tol, where)


def check_global_gap(instances, tol=1e-9, cap=5000):
    worst = -math.inf
    where = ""
    for name, inst in instances:
        if inst.n < 2:
            continue
        try:
            sr = glauber.spectrum_report(inst, cap)
        except CapacityError:
            continue
        cert = glauber.certify_spectral_independence(inst)
        gb = glauber.theoretical_gap_bound(cert, inst.n)
        slack = gb.value - sr.gap
        if slack > worst:
            worst = slack
            where = name
    return _report("gap_bound_excess", worst, tol, worst <= tol, where)


def check_mixing_consistency(instances, eps=0.25, cap=5000):
    worst = 0.0
    where = ""
    for name, inst in instances:
        try:
            sr = glauber.spectrum_report(inst, cap)
        except CapacityError:
            continue
        if sr.absolute_gap <= 1e-12:
            continue  # frozen or reducible chain, reported not errored
        size = len(sr.eigenvalues)
        if size < 2:
            continue
        mu_min = 1.0 / size
        t_star = math.ceil(math.log(1.0 / (eps * mu_min)) / sr.absolute_gap)
        tv = glauber.worst_tv_at(inst, t_star, cap)
        if tv - eps > worst:
            worst = tv - eps
            where = f"{name} t={t_star}"
    return _report("mixing_tv_excess_at_tstar", worst, 0.0, worst <= 1e-12, where)


def check_spectral_utilities(matrices, tol=1e-3):
    worst_norm = -math.inf
    worst_gelfand = 0.0
    for M in matrices:
        rho = exact.power_iteration(M).value
        for p in (1, math.inf):
            worst_norm = max(worst_norm, rho - exact.induced_norm(M, p))
        worst_gelfand = max(worst_gelfand, abs(exact.gelfand_estimate(M) - rho))
    reports = [
        _report(
            "rho_minus_norm_max", worst_norm, 0.0, worst_norm <= 1e-9,
            f"{len(matrices)} matrices",
        ),
        _report("gelfand_vs_rho_max_diff", worst_gelfand, tol, worst_gelfand <= tol),
    ]
    return reports


def check_colouring_bounds(delta=0.23):
    star_good = corpus.curated_instances()["star4_q8"]
    star_bad = corpus.curated_instances()["star4_q4"]
    out = []
    params = bnd.ColouringParams.from_delta(delta, chi=star_good.graph.max_degree())
    eq2d = bnd.check_eq2d(star_good, params)
    out.append(_report("eq2d_star_q8", 0 if eq2d.ok else 1, 0, eq2d.ok))
    report = bnd.one_to_all_check(star_good, params)
    excess = max(s - report.bound for s in report.row_sums.values())
    out.append(
        _report(
            "one_to_all_excess", excess, 1e-9,
            report.rows_ok and report.condition_ok,
            f"bound={report.bound:.4f}",
        )
    )
    # soundness of the certified recursion against the enumerated oracle
    R = exact.influence_matrix(star_good, EMPTY_PINNING, exact.R_INDICATOR)
    worst = -math.inf
    for i, u in enumerate(R.order):
        for j, v in enumerate(R.order):
            if u == v:
                continue
            cert = bnd.recursive_influence_bound(star_good, u, v, params)
            worst = max(worst, R.entries[i, j] - cert.value)
    out.append(_report("recursive_bound_shortfall", worst, 1e-9, worst <= 1e-9))
    saw = bnd.saw_influence_bound(star_good, 0, params)
    out.append(_report("saw_layers_star_q8", 0 if saw.layers_ok else 1, 0, saw.layers_ok))
    bad_params = bnd.ColouringParams.from_delta(delta, chi=star_bad.graph.max_degree())
    bad = bnd.verify_condition(star_bad, bad_params)
    out.append(
        _report(
            "condition_detects_star_q4", 0 if not bad.ok else 1, 0, not bad.ok,
            "negative-path fixture",
        )
    )
    return out


def check_star_tightness(delta_max=30):
    st = bnd.star_tightness(4, 4)
    ok = st.numerator == 81 and st.denominator == 129
    worst = 0 if ok else 1
    alpha = bnd.alpha_star()
    for d in range(4, delta_max + 1):
        q = 3
        while q < alpha * d - 3:
            if not bnd.star_tightness(d, q).exceeds_inverse_degree:
                worst = 1
            q += 1
    return _report("star_tightness", worst, 0, worst == 0, "81/129 and threshold scan")


def check_f_monotone(deltas=(0.05, 0.1, 0.5, 1.0, 5.0), points=200):
    bad = 0
    for d in deltas:
        rep = bnd.check_f_monotone(d, bnd.log_grid(3.0, 1e6, points))
        if not (rep.ok and rep.f_strictly_decreasing):
            bad += 1
    residual = abs(bnd.alpha_star() - math.exp(1.0 / bnd.alpha_star()))
    ok = bad == 0 and residual <= 1e-13
    return _report("f_monotone_failures", bad, 0, ok, f"alpha residual {residual:.1e}")


def check_determinism(seed=99):
    inst = corpus.curated_instances()["path3_q3"]
    c1 = glauber.new_chain(inst, seed)
    c2 = glauber.new_chain(inst, seed)
    for _ in range(200):
        c1 = glauber.glauber_step(c1)
    c2, _ = glauber.run_chain(c2, 200)
    same = c1.current.assignment == c2.current.assignment
    return _report("determinism_mismatch", 0 if same else 1, 0, same)


def run_verify(corpus_name: str = "small"):
    """Run the invariant suite; returns (reports, all_pass)."""
    if corpus_name not in ("small", "full"):
        raise bnd.ParameterError("corpus must be 'small' or 'full'")
    small = corpus_name == "small"
    rand = corpus.random_small_corpus(30 if small else 200)
    walk_instances = [
        (k, v)
        for k, v in corpus.curated_instances().items()
        if k not in ("star4_q8", "single_vertex")
    ]
    glauber_instances = list(corpus.glauber_corpus().items())
    reports = []
    matrices = []
    reports.append(check_oracle_equivalence(rand))
    reports.append(
        check_local_chains(walk_instances, max_pin_size=1 if small else None,
                           collect=matrices)
    )
    reports.append(check_down_up(glauber_instances))
    reports.append(check_global_gap(glauber_instances))
    reports.append(check_mixing_consistency(glauber_instances))
    for name, inst in rand[: 20 if small else len(rand)]:
        if inst.n >= 2:
            matrices.append(exact.influence_matrix(inst).entries)
    reports.extend(check_spectral_utilities(matrices))
    reports.extend(check_colouring_bounds())
    reports.append(check_star_tightness(10 if small else 30))
    reports.append(check_f_monotone((0.1, 1.0) if small else (0.05, 0.1, 0.5, 1.0, 5.0)))
    reports.append(check_determinism())
    return reports, all(r["pass"] for r in reports)
