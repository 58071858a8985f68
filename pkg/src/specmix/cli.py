"""Command-line front end.

Reports are emitted as JSON lines (or CSV where noted); ``--golden`` strips
timing so outputs are byte-reproducible.  Exit codes: 0 all checks passed,
1 usage or capacity errors, 2 a mathematical check failed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

from . import __version__, bounds as bnd, corpus, exact, glauber, localwalk, verify
from .errors import InvalidPinningError, SpecmixError
from .instance import (
    EMPTY_PINNING,
    ListColouringInstance,
    Pinning,
    dump_instance,
    load_instance,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK_FAILED = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(EXIT_USAGE)


def parse_pinning(spec: str, instance: ListColouringInstance) -> Pinning:
    """Parse "v=c,v=c,..." against an instance; errors carry the token position."""
    spec = spec.strip()
    if not spec:
        return EMPTY_PINNING
    items = []
    seen = set()
    for pos, token in enumerate(spec.split(",")):
        parts = token.split("=")
        if len(parts) != 2:
            raise InvalidPinningError(f"token {pos}: expected v=c, got {token!r}")
        try:
            v, c = int(parts[0]), int(parts[1])
        except ValueError:
            raise InvalidPinningError(f"token {pos}: non-integer in {token!r}")
        if not (0 <= v < instance.n):
            raise InvalidPinningError(f"token {pos}: unknown vertex {v}")
        if c not in instance.lists[v]:
            raise InvalidPinningError(f"token {pos}: colour {c} not in list of {v}")
        if v in seen:
            raise InvalidPinningError(f"token {pos}: vertex {v} pinned twice")
        seen.add(v)
        items.append((v, c))
    return Pinning(tuple(items))


def _emit(obj: dict, args, stream=None) -> None:
    stream = stream or sys.stdout
    if not args.golden:
        obj = dict(obj)
        obj["elapsed_s"] = round(time.time() - args._t0, 3)
    stream.write(json.dumps(obj, sort_keys=True) + "\n")


def _base(obj: dict, args) -> dict:
    obj["version"] = __version__
    obj["command"] = args.command
    return obj


def cmd_verify(args) -> int:
    reports, ok = verify.run_verify(args.corpus)
    if args.format == "csv":
        sys.stdout.write("name,value,bound,pass\n")
        for r in reports:
            sys.stdout.write(f"{r['name']},{r['value']:.12g},{r['bound']:.12g},{int(r['pass'])}\n")
    else:
        for r in reports:
            _emit(_base(dict(r), args), args)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_influence(args) -> int:
    inst = load_instance(args.instance)
    p = parse_pinning(args.pin, inst)
    convention = exact.R_INDICATOR if args.convention == "r" else exact.PSI_ZERO
    psi = exact.influence_matrix(inst, p, convention)
    pit = exact.power_iteration(psi.entries)
    _emit(
        _base(
            {
                "instance": args.instance,
                "pin": p.as_dict(),
                "convention": psi.diagonal_convention,
                "order": list(psi.order),
                "matrix": [list(map(float, row)) for row in psi.entries],
                "norm1": exact.induced_norm(psi.entries, 1),
                "norminf": exact.induced_norm(psi.entries, math.inf),
                "rho": pit.value,
                "rho_residual": pit.residual,
            },
            args,
        ),
        args,
    )
    return EXIT_OK


def cmd_localwalk(args) -> int:
    inst = load_instance(args.instance)
    p = parse_pinning(args.pin, inst)
    rep = localwalk.verify_local_chain(inst, p, t_max=args.t_max)
    obj = _base(rep.to_json_dict(), args)
    obj["instance"] = args.instance
    obj["pin"] = p.as_dict()
    _emit(obj, args)
    return EXIT_OK if rep.all_ok else EXIT_CHECK_FAILED


def cmd_glauber(args) -> int:
    inst = load_instance(args.instance)
    if args.steps > 0:
        chain = glauber.new_chain(inst, args.seed)
        chain, samples = glauber.run_chain(chain, args.steps, thin=args.thin)
        for i, s in enumerate(samples):
            _emit(
                {"t": (i + 1) * args.thin, "state": list(s.assignment), "seed": args.seed},
                args,
            )
        _emit(
            _base(
                {"final": list(chain.current.assignment), "steps": args.steps,
                 "seed": args.seed},
                args,
            ),
            args,
        )
    if args.exact_curve > 0:
        est = glauber.empirical_tv_curve(inst, args.exact_curve)
        sys.stdout.write("t,tv_worst\n")
        for t, tv in zip(est.t_values, est.tv_values):
            sys.stdout.write(f"{t},{tv:.12g}\n")
    return EXIT_OK


def cmd_bounds(args) -> int:
    inst = load_instance(args.instance)
    chi = args.chi if args.chi is not None else max(inst.graph.max_degree(), 1)
    params = bnd.ColouringParams.from_delta(args.delta, chi=chi)
    eq2d = bnd.check_eq2d(inst, params)
    report = bnd.one_to_all_check(inst, params)
    obj = _base(
        {
            "instance": args.instance,
            "delta": args.delta,
            "chi": chi,
            "eps1": params.eps1,
            "eps2": params.eps2,
            "eq2d_ok": eq2d.ok,
            "eq2d_violations": list(eq2d.violating_vertices),
            "one_to_all": report.to_json_dict(),
        },
        args,
    )
    ok = report.rows_ok and report.condition_ok
    if args.saw is not None:
        saw = bnd.saw_influence_bound(inst, args.saw, params)
        obj["saw"] = {
            "source": saw.source,
            "per_target": {str(k): v for k, v in sorted(saw.per_target.items())},
            "total": saw.total,
            "layers_ok": saw.layers_ok,
        }
        ok = ok and saw.layers_ok
    if args.pair is not None:
        u, v = args.pair
        cert = bnd.recursive_influence_bound(inst, u, v, params)
        R = exact.influence_matrix(inst, EMPTY_PINNING, exact.R_INDICATOR)
        idx = {x: i for i, x in enumerate(R.order)}
        oracle = float(R.entries[idx[u], idx[v]])
        obj["pair"] = {
            "u": u,
            "v": v,
            "certified": cert.value,
            "oracle": oracle,
            "conservative_branches": cert.conservative_branches,
            "sound": cert.value >= oracle - 1e-9,
        }
        ok = ok and obj["pair"]["sound"]
    _emit(obj, args)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_star(args) -> int:
    alpha = bnd.alpha_star()
    for d in range(4, args.delta_max + 1):
        for q in range(3, int(math.ceil(alpha * d)) + 1):
            st = bnd.star_tightness(d, q)
            _emit(
                {
                    "Delta": d,
                    "q": q,
                    "marginal": st.value,
                    "exceeds_inverse_degree": st.exceeds_inverse_degree,
                    "below_alpha_threshold": st.below_alpha_threshold,
                },
                args,
            )
    return EXIT_OK


def cmd_fcheck(args) -> int:
    lo, hi, count = _parse_grid(args.grid)
    rep = bnd.check_f_monotone(args.delta, bnd.log_grid(lo, hi, count))
    _emit(
        _base(
            {
                "delta": args.delta,
                "points": count,
                "limit": rep.limit,
                "weakly_decreasing": rep.f_weakly_decreasing,
                "strictly_decreasing": rep.f_strictly_decreasing,
                "above_limit": rep.f_above_limit,
                "b_all_negative": rep.b_all_negative,
                "worst_b": float(rep.b_values.max()),
                "ok": rep.ok,
            },
            args,
        ),
        args,
    )
    return EXIT_OK if rep.ok else EXIT_CHECK_FAILED


def _parse_grid(spec: str):
    from .errors import ParameterError

    parts = spec.split(":")
    if len(parts) < 3 or parts[2] != "log":
        raise ParameterError(f"grid spec must be lo:hi:log[:count], got {spec!r}")
    lo, hi = float(parts[0]), float(parts[1])
    count = int(parts[3]) if len(parts) > 3 else 200
    return lo, hi, count


def cmd_gen(args) -> int:
    import os

    if args.family:
        name, inst = corpus.parse_family_spec(args.family)
        out = args.out or (name.replace(":", "_").replace("=", "") + ".json")
        dump_instance(inst, out)
        _emit({"written": out, "n": inst.n, "edges": len(inst.graph.edges)}, args)
        return EXIT_OK
    outdir = args.out or "corpus"
    os.makedirs(outdir, exist_ok=True)
    written = []
    for name, inst in corpus.curated_instances().items():
        path = os.path.join(outdir, f"{name}.json")
        dump_instance(inst, path)
        written.append(path)
    if args.corpus == "full":
        for name, inst in corpus.random_small_corpus(200):
            path = os.path.join(outdir, f"{name}.json")
            dump_instance(inst, path)
            written.append(path)
    _emit({"written": len(written), "dir": outdir}, args)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="specmix", description=__doc__)
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--golden", action="store_true",
                        help="strip timing fields for snapshot comparison")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--corpus", choices=("small", "full"), default="small")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("influence", help="influence matrix, norms, spectral radius")
    p.add_argument("--instance", required=True)
    p.add_argument("--pin", default="")
    p.add_argument("--convention", choices=("psi", "r"), default="psi")
    p.set_defaults(func=cmd_influence)

    p = sub.add_parser("localwalk", help="local walk spectral report")
    p.add_argument("--instance", required=True)
    p.add_argument("--pin", default="")
    p.add_argument("--t-max", type=int, default=10)
    p.set_defaults(func=cmd_localwalk)

    p = sub.add_parser("glauber", help="run the dynamics / exact TV curve")
    p.add_argument("--instance", required=True)
    p.add_argument("--steps", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--thin", type=int, default=1)
    p.add_argument("--exact-curve", type=int, default=0, metavar="T_MAX")
    p.set_defaults(func=cmd_glauber)

    p = sub.add_parser("bounds", help="condition check and influence bounds")
    p.add_argument("--instance", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--chi", type=float, default=None)
    p.add_argument("--saw", type=int, default=None, metavar="U")
    p.add_argument("--pair", type=int, nargs=2, default=None, metavar=("U", "V"))
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("star", help="star marginal tightness scan")
    p.add_argument("--delta-max", type=int, default=30)
    p.set_defaults(func=cmd_star)

    p = sub.add_parser("fcheck", help="monotonicity of the marginal envelope f")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--grid", default="3:1000000:log:200")
    p.set_defaults(func=cmd_fcheck)

    p = sub.add_parser("gen", help="write instance files")
    p.add_argument("--family", default=None)
    p.add_argument("--corpus", choices=("small", "full"), default="small")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args._t0 = time.time()
    try:
        return args.func(args)
    except SpecmixError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except FileNotFoundError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        sys.stderr.write(f"error: malformed input ({exc})\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
