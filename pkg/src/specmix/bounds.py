"""List-colouring influence analysis: marginal-bound condition checking,
coupling bounds, self-avoiding-walk expansions, the recursive certified
influence bound, the star tightness construction, and the monotonicity
check used to instantiate the condition on triangle-free instances."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapacityError, ContractError, InfeasibleError, ParameterError
from .exact import (
    R_INDICATOR,
    all_marginals,
    influence_matrix,
    max_influence_pair,
    tv_distance,
    vertex_colour_counts,
)
from .instance import (
    EMPTY_PINNING,
    ListColouringInstance,
    Pinning,
    pin,
    remove_vertex,
)

_ALPHA_STAR = None


def alpha_star() -> float:
    """The root of x = exp(1/x), by fixed-point iteration to 1e-14."""
    global _ALPHA_STAR
    if _ALPHA_STAR is None:
        x = 1.8
        for _ in range(200):
            nxt = math.exp(1.0 / x)
            if abs(nxt - x) < 1e-14:
                x = nxt
                break
            x = nxt
        _ALPHA_STAR = x
    return _ALPHA_STAR


@dataclass(frozen=True)
class ColouringParams:
    """Parameters of the marginal-bound condition."""

    chi: float
    eps1: float
    eps2: float
    delta: float
    alpha: float

    def __post_init__(self):
        if self.chi <= 0:
            raise ParameterError("chi must be positive")
        if not (0.0 < self.eps1 < 1.0):
            raise ParameterError("eps1 must lie in (0, 1)")
        if self.eps2 <= 0:
            raise ParameterError("eps2 must be positive")
        if self.delta <= 0:
            raise ParameterError("delta must be positive")

    @staticmethod
    def from_delta(delta: float, chi: float) -> "ColouringParams":
        """The instantiation used for triangle-free instances:
        eps1 = 1 - delta/(alpha*+delta), eps2 = 0.4 + delta."""
        a = alpha_star()
        return ColouringParams(
            chi=chi,
            eps1=1.0 - delta / (a + delta),
            eps2=0.4 + delta,
            delta=delta,
            alpha=a,
        )


@dataclass(frozen=True)
class ConditionReport:
    ok: bool
    images_checked: int
    worst_margin: float
    witness: dict | None
    failures: tuple

    def to_json_dict(self) -> dict:
        margin = None if math.isinf(self.worst_margin) else self.worst_margin
        return {
            "ok": self.ok,
            "images_checked": self.images_checked,
            "worst_margin": margin,
            "witness": self.witness,
            "failures": list(self.failures),
        }


def _pin_images(instance: ListColouringInstance, pin_cap: int):
    """Deduplicated pin-images over all vertex subsets and list colourings.

    Yields (pinning, image instance, new_to_old map).  Improper partial
    colourings are legal pins: the image is still well defined.
    """
    seen = set()
    visited = 0
    n = instance.n
    for size in range(n + 1):
        for lam in itertools.combinations(range(n), size):
            for colours in itertools.product(*(instance.lists[v] for v in lam)):
                visited += 1
                if visited > pin_cap:
                    raise CapacityError(f"pinning cap {pin_cap} exceeded")
                p = Pinning(tuple(zip(lam, colours)))
                image = pin(instance, p)
                if image.instance in seen:
                    continue
                seen.add(image.instance)
                yield p, image.instance, image.new_to_old


def verify_condition(
    instance: ListColouringInstance,
    params: ColouringParams,
    pin_cap: int = 1_000_000,
    max_failures: int = 20,
) -> ConditionReport:
    """Check the marginal upper bounds on every pin-image of the instance.

    For each reachable image: a proper colouring must exist, the maximum
    degree must stay at most chi, every vertex of degree <= chi-1 must have
    all marginals <= eps1/deg, and every vertex must have all marginals
    <= 1/(eps2*chi + 1).  Reports the worst margin (bound minus value) and
    its witness.
    """
    worst = math.inf
    witness = None
    failures = []
    images = 0
    cap2 = 1.0 / (params.eps2 * params.chi + 1.0)
    for p, image, new_to_old in _pin_images(instance, pin_cap):
        images += 1
        if image.graph.max_degree() > params.chi:
            failures.append({"pinning": p.as_dict(), "reason": "degree exceeds chi"})
            continue
        count, margs = all_marginals(image, EMPTY_PINNING)
        if count == 0:
            failures.append({"pinning": p.as_dict(), "reason": "no proper colouring"})
            continue
        for v in range(image.n):
            deg = image.graph.degree(v)
            checks = [("uniform_bound", cap2)]
            if 1 <= deg <= params.chi - 1:
                checks.append(("degree_bound", params.eps1 / deg))
            probs = margs[v].probs if v in margs else {}
            for c, value in probs.items():
                for kind, bound in checks:
                    margin = bound - value
                    if margin < worst:
                        worst = margin
                        witness = {
                            "pinning": p.as_dict(),
                            "vertex": int(new_to_old[v]),
                            "colour": int(c),
                            "value": value,
                            "bound": bound,
                            "kind": kind,
                        }
                    if margin < 0 and len(failures) < max_failures:
                        failures.append(
                            {
                                "pinning": p.as_dict(),
                                "vertex": int(new_to_old[v]),
                                "colour": int(c),
                                "value": value,
                                "bound": bound,
                                "kind": kind,
                            }
                        )
    ok = not failures and worst >= 0
    return ConditionReport(ok, images, worst, witness, tuple(failures))


@dataclass(frozen=True)
class Eq2DReport:
    ok: bool
    triangle_free: bool
    violating_vertices: tuple[int, ...]
    slack: float


def check_eq2d(instance: ListColouringInstance, params: ColouringParams) -> Eq2DReport:
    """|L(v)| - deg(v) >= (alpha*+delta-1)*chi for all v, plus triangle-freeness."""
    slack = (params.alpha + params.delta - 1.0) * params.chi
    bad = tuple(
        v
        for v in range(instance.n)
        if len(instance.lists[v]) - instance.graph.degree(v) < slack
    )
    tri = instance.graph.is_triangle_free()
    return Eq2DReport(tri and not bad, tri, bad, slack)


def easy_coupling_bound(params: ColouringParams, n: int) -> float:
    """(1 - 1/(3 e^(1/eps2))) * (n - 1)."""
    if n < 1:
        raise ParameterError("n must be positive")
    return (1.0 - 1.0 / (3.0 * math.exp(1.0 / params.eps2))) * (n - 1)


def one_to_all_bound(params: ColouringParams) -> float:
    """1 / ((1 - eps1) * eps2)."""
    return 1.0 / ((1.0 - params.eps1) * params.eps2)


@dataclass(frozen=True, eq=False)
class SAWBound:
    source: int
    per_target: dict
    total: float
    layer_sums: dict
    layers_ok: bool


def saw_influence_bound(
    instance: ListColouringInstance,
    u: int,
    params: ColouringParams,
    prune: float = 1e-18,
) -> SAWBound:
    """Exhaustive self-avoiding-walk expansion of the influence of ``u``.

    A walk (v_1 .. v_l) from u carries weight prod_k eps1/|G(v_k) \\ earlier|;
    the per-target bound is the weight sum over walks ending there divided
    by eps1*eps2, and each layer sum is checked against eps1^(l-1).
    """
    if not (0 <= u < instance.n):
        raise ContractError(f"vertex {u} does not exist")
    raw_target: dict = {}
    layer_sums: dict = {}
    in_path = [False] * instance.n
    path = [u]
    in_path[u] = True

    def visit(weight: float):
        length = len(path)
        layer_sums[length] = layer_sums.get(length, 0.0) + weight
        last = path[-1]
        if length >= 2:
            raw_target[last] = raw_target.get(last, 0.0) + weight
        fan = [w for w in instance.graph.neighbours(last) if not in_path[w]]
        # the denominator excludes strictly earlier path vertices; since the
        # last vertex is not its own neighbour this is exactly the fan set
        if not fan:
            return
        child_weight = weight * params.eps1 / len(fan)
        if child_weight < prune:
            return
        for w in fan:
            path.append(w)
            in_path[w] = True
            visit(child_weight)
            in_path[w] = False
            path.pop()

    visit(1.0)
    scale = 1.0 / (params.eps1 * params.eps2)
    per_target = {v: w * scale for v, w in raw_target.items()}
    total = sum(per_target.values())
    layers_ok = all(
        s <= params.eps1 ** (length - 1) + 1e-12 for length, s in layer_sums.items()
    )
    return SAWBound(u, per_target, total, layer_sums, layers_ok)


@dataclass(frozen=True)
class CertifiedInfluenceBound:
    pair: tuple[int, int]
    value: float
    conservative_branches: int
    nodes: int


def recursive_influence_bound(
    instance: ListColouringInstance,
    u: int,
    v: int,
    params: ColouringParams,
) -> CertifiedInfluenceBound:
    """Certified upper bound on the worst-case influence of u on v.

    Evaluates the split-vertex recursion exactly: the colour pair is chosen
    by oracle marginals (lexicographic ties), each neighbour branch carries
    alpha_k = min(eps1/deg(w_k), 1/(eps2*chi+1)), and the walk continues on
    the instance with u removed and the chosen colours struck from earlier
    and later neighbour lists.  Infeasible intermediates fall back to the
    conservative value 1 and are counted.
    """
    for x in (u, v):
        if not (0 <= x < instance.n):
            raise ContractError(f"vertex {x} does not exist")
    memo: dict = {}
    stats = {"conservative": 0, "nodes": 0}
    depth_cap = instance.n

    def connected(inst, a, b):
        seen = {a}
        stack = [a]
        while stack:
            x = stack.pop()
            if x == b:
                return True
            for w in inst.graph.neighbours(x):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return False

    def rec(inst, a, b, depth):
        if a == b:
            return 1.0 if len(inst.lists[a]) > 1 else 0.0
        if not connected(inst, a, b):
            return 0.0
        key = (inst, a, b)
        if key in memo:
            return memo[key]
        stats["nodes"] += 1
        if depth > depth_cap:
            stats["conservative"] += 1
            memo[key] = 1.0
            return 1.0
        try:
            c1, c2, best_tv = max_influence_pair(inst, a, b)
        except InfeasibleError:
            stats["conservative"] += 1
            memo[key] = 1.0
            return 1.0
        if c1 == c2:
            memo[key] = 0.0
            return 0.0
        nbrs = inst.graph.neighbours(a)
        removed = remove_vertex(inst, a)
        total = 0.0
        for k, wk in enumerate(nbrs, start=1):
            lists = list(removed.instance.lists)
            for j, wj in enumerate(nbrs, start=1):
                if wj == wk:
                    continue
                idx = removed.old_to_new[wj]
                drop = c1 if j < k else c2
                lists[idx] = tuple(c for c in lists[idx] if c != drop)
            sub = removed.instance.with_lists(lists)
            deg_wk = sub.graph.degree(removed.old_to_new[wk])
            if deg_wk > 0:
                alpha_k = min(params.eps1 / deg_wk, 1.0 / (params.eps2 * params.chi + 1.0))
            else:
                alpha_k = 1.0 / (params.eps2 * params.chi + 1.0)
            total += alpha_k * rec(sub, removed.old_to_new[wk], removed.old_to_new[b], depth + 1)
        memo[key] = total
        return total

    value = rec(instance, u, v, 0)
    return CertifiedInfluenceBound((u, v), value, stats["conservative"], stats["nodes"])


@dataclass(frozen=True)
class SingleDisagreementReport:
    formula_value: float
    direct_value: float
    n_c1: int
    n_c2: int
    rest: int


def single_disagreement_tv(
    instance: ListColouringInstance, w: int, c1: int, c2: int
) -> SingleDisagreementReport:
    """TV between the marginals of ``w`` under the two one-colour-off lists.

    ``instance`` carries the common list; the two compared instances strike
    c2 (resp. c1) from the list of ``w``.  The closed form
    max(n(c1), n(c2)) / (N + max(...)) is evaluated from colouring counts and
    returned together with the directly enumerated TV.
    """
    if not (0 <= w < instance.n):
        raise ContractError(f"vertex {w} does not exist")
    if c1 == c2:
        raise ContractError("the disagreement colours must differ")
    counts, _total = vertex_colour_counts(instance, w)
    n1 = counts.get(c1, 0)
    n2 = counts.get(c2, 0)
    rest = sum(cnt for c, cnt in counts.items() if c not in (c1, c2))
    m = max(n1, n2)
    formula = m / (rest + m) if rest + m > 0 else 0.0

    def marg_without(drop):
        lists = list(instance.lists)
        lists[w] = tuple(c for c in lists[w] if c != drop)
        sub = instance.with_lists(lists)
        count, margs = all_marginals(sub, EMPTY_PINNING)
        if count == 0:
            raise InfeasibleError("one-sided instance admits no proper colouring")
        return margs[w]

    direct = tv_distance(marg_without(c2), marg_without(c1))
    return SingleDisagreementReport(formula, direct, n1, n2, rest)


@dataclass(frozen=True)
class StarTightness:
    value: float
    numerator: int
    denominator: int
    exceeds_inverse_degree: bool
    below_alpha_threshold: bool


def star_tightness(delta_deg: int, q: int) -> StarTightness:
    """Marginal of the star centre on its private colour, exact in integers.

    The star has centre list {0..q-1} and leaf lists {0..q-2}; the centre
    marginal of colour q-1 is (q-1)^D / ((q-1)(q-2)^D + (q-1)^D).
    """
    if q < 3 or delta_deg < 1:
        raise ParameterError("needs q >= 3 and at least one leaf")
    num = (q - 1) ** delta_deg
    den = (q - 1) * (q - 2) ** delta_deg + num
    frac = Fraction(num, den)
    return StarTightness(
        value=float(frac),
        numerator=num,
        denominator=den,
        exceeds_inverse_degree=frac > Fraction(1, delta_deg),
        below_alpha_threshold=q < alpha_star() * delta_deg - 3,
    )


@dataclass(frozen=True, eq=False)
class FMonotoneReport:
    xs: np.ndarray
    f_values: np.ndarray
    limit: float
    f_weakly_decreasing: bool
    f_strictly_decreasing: bool
    f_above_limit: bool
    b_values: np.ndarray
    b_trunc_values: np.ndarray
    b_all_negative: bool
    ok: bool


def _f_value(a: float, x: float) -> float:
    # a = alpha* + delta - 1; p = a*x + 0.5
    p = a * x + 0.5
    expo = x * p / ((a + 1.0) * x + 0.5)
    return ((a + 1.0) * x + 0.5) / x * math.exp(expo * math.log1p(-1.0 / p))


def _b_values(a: float, x: float) -> tuple[float, float]:
    z = 2.0 / (1.0 + 2.0 * a * x)
    poly1 = 1.0 + 2.0 * x - 4.0 * a * a * x * x + 8.0 * a * (1.0 + a) * x**3
    poly2 = x * (
        -1.0 + 8.0 * a**3 * x**3 - 2.0 * a * x * (1.0 + 2.0 * x)
        + 4.0 * a * a * x * x * (1.0 + 2.0 * x)
    )
    exact = poly1 + poly2 * math.log1p(-z)
    trunc = poly1 + poly2 * (-z - z * z / 2.0 - z**3 / 3.0 - z**4 / 4.0)
    return exact, trunc


def log_grid(lo: float, hi: float, count: int) -> np.ndarray:
    return np.geomspace(lo, hi, count)


def check_f_monotone(delta: float, x_grid) -> FMonotoneReport:
    """Evaluate the marginal-bound envelope f on a grid in [3, inf).

    Asserts weak decrease between consecutive points (1e-12 slack), that f
    stays above its limit (alpha*+delta)exp(-1/(alpha*+delta)), and that the
    appendix sign factor B, both exactly and through its truncated-log upper
    bound, is strictly negative.
    """
    if delta <= 0:
        raise ParameterError("delta must be positive")
    xs = np.asarray(sorted(float(x) for x in x_grid))
    if xs.size == 0 or xs[0] < 3.0:
        raise ParameterError("grid must lie in [3, inf)")
    a = alpha_star() + delta - 1.0
    f_vals = np.array([_f_value(a, x) for x in xs])
    limit = (a + 1.0) * math.exp(-1.0 / (a + 1.0))
    diffs = np.diff(f_vals)
    weakly = bool((diffs <= 1e-12).all())
    strictly = bool((diffs < 0).all())
    above = bool((f_vals >= limit - 1e-12).all())
    pairs = [_b_values(a, x) for x in xs]
    b_vals = np.array([p[0] for p in pairs])
    b_trunc = np.array([p[1] for p in pairs])
    b_neg = bool((b_vals < -1e-9).all() and (b_trunc < -1e-9).all())
    return FMonotoneReport(
        xs=xs,
        f_values=f_vals,
        limit=limit,
        f_weakly_decreasing=weakly,
        f_strictly_decreasing=strictly,
        f_above_limit=above,
        b_values=b_vals,
        b_trunc_values=b_trunc,
        b_all_negative=b_neg,
        ok=weakly and above and b_neg,
    )


@dataclass(frozen=True, eq=False)
class OneToAllReport:
    row_sums: dict
    easy_bound: float
    saw_bound: float
    bound: float
    rows_ok: bool
    condition_ok: bool

    def to_json_dict(self) -> dict:
        return {
            "row_sums": {str(k): v for k, v in self.row_sums.items()},
            "easy_bound": self.easy_bound,
            "saw_bound": self.saw_bound,
            "bound": self.bound,
            "rows_ok": self.rows_ok,
            "condition_ok": self.condition_ok,
        }


def one_to_all_check(
    instance: ListColouringInstance,
    params: ColouringParams,
    tol: float = 1e-9,
    pin_cap: int = 1_000_000,
) -> OneToAllReport:
    """Exact one-to-all influence row sums against both theoretical bounds."""
    condition_ok = verify_condition(instance, params, pin_cap).ok
    R = influence_matrix(instance, EMPTY_PINNING, R_INDICATOR)
    sums = R.off_diagonal_row_sums()
    row_sums = {u: float(s) for u, s in zip(R.order, sums)}
    easy = easy_coupling_bound(params, instance.n)
    saw = one_to_all_bound(params)
    bound = min(easy, saw)
    rows_ok = all(s <= bound + tol for s in row_sums.values())
    return OneToAllReport(row_sums, easy, saw, bound, rows_ok, condition_ok)
