"""Command-line entry point wiring the walk, count, oracle, sim and verify
engines.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 guardrail
refusal (with an estimate of the requested work), 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction


def _set_thread_env(threads: int) -> None:
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
        os.environ[var] = str(threads)


def _resolve_threads(value) -> int:
    if value is not None:
        return int(value)
    env = os.environ.get("LAB_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise SystemExit2("LAB_THREADS must be an integer, got %r" % env)
    return 0  # leave BLAS defaults alone


class SystemExit2(Exception):
    """Usage error carrying a message; mapped to exit code 2."""


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise SystemExit2("bad rational %r: %s" % (text, exc))


def _load_config_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise IOError("cannot read config %r: %s" % (path, exc))
    except json.JSONDecodeError as exc:
        raise SystemExit2("config %r is not valid JSON: %s" % (path, exc))
    if not isinstance(data, dict):
        raise SystemExit2("config %r must be a flat JSON object" % path)
    return data


def _global_flags(parser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--out", default=d,
                        help="output file (default stdout)")
    parser.add_argument("--format", choices=("csv", "json"),
                        default=d if suppress else "csv",
                        help="report format (default csv)")
    parser.add_argument("--seed", type=int, default=d if suppress else 0)
    parser.add_argument("--threads", type=int, default=d,
                        help="BLAS thread count (fallback: LAB_THREADS)")
    parser.add_argument("--config", default=d,
                        help="JSON config file with flat ensemble/moment "
                             "fields; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wignerlab",
        description="Walk combinatorics, exact moments and edge-scale "
                    "experiments for dilute Wigner matrices.")
    _global_flags(parser, suppress=False)
    shared = argparse.ArgumentParser(add_help=False)
    _global_flags(shared, suppress=True)
    sub = parser.add_subparsers(dest="subcommand")

    p_walk = sub.add_parser("walk", parents=[shared], help="canonicalize and analyze walks")
    walk_sub = p_walk.add_subparsers(dest="action")
    p_ft = walk_sub.add_parser("from-trajectory", parents=[shared],
                               help="canonical walk and its full analysis")
    p_ft.add_argument("trajectory", help="comma-separated vertex labels")
    p_ft.add_argument("--k0", type=int, default=4)
    p_cen = walk_sub.add_parser("census", parents=[shared], help="classification census only")
    p_cen.add_argument("trajectory")
    p_cen.add_argument("--k0", type=int, default=4)
    p_en = walk_sub.add_parser("enumerate", parents=[shared],
                               help="all canonical even walks of 2s steps")
    p_en.add_argument("--s", type=int, required=True)
    p_en.add_argument("--k0", type=int, default=4)
    p_en.add_argument("--force", action="store_true",
                      help="override the enumeration size guardrail")

    p_count = sub.add_parser("count", parents=[shared], help="exact counting tables")
    count_sub = p_count.add_subparsers(dest="action")
    p_cat = count_sub.add_parser("catalan", parents=[shared])
    p_cat.add_argument("--s-max", type=int, default=30)
    p_me = count_sub.add_parser("multi-edge", parents=[shared])
    p_me.add_argument("--l", type=int, required=True)
    p_me.add_argument("--s-max", type=int, required=True)
    p_me.add_argument("--check-closed-form", action="store_true")
    p_sc = count_sub.add_parser("subcluster", parents=[shared])
    p_sc.add_argument("--s-max", type=int, default=30)
    p_l61 = count_sub.add_parser("lemma61", parents=[shared])
    p_l61.add_argument("--s-max", type=int, default=300)
    p_cj = count_sub.add_parser("conjecture", parents=[shared])
    p_cj.add_argument("--l-max", type=int, default=5)
    p_cj.add_argument("--s-max", type=int, default=60)
    p_ht = count_sub.add_parser("heights", parents=[shared])
    p_ht.add_argument("--s-max", type=int, default=30)

    p_oracle = sub.add_parser("oracle", parents=[shared], help="exact rational trace moments")
    p_oracle.add_argument("--n", type=int, required=True)
    p_oracle.add_argument("--rho", required=True,
                          help="rational, e.g. 3/2")
    p_oracle.add_argument("--s", type=int, required=True)
    p_oracle.add_argument("--dist", choices=("rademacher", "gaussian"),
                          default="rademacher")
    p_oracle.add_argument("--method",
                          choices=("trajectory", "walk", "both"),
                          default="both")

    p_sim = sub.add_parser("sim", parents=[shared], help="Monte Carlo spectral experiments")
    sim_sub = p_sim.add_subparsers(dest="action")

    def add_ensemble_flags(sp, need_n=True):
        sp.add_argument("--n", type=int, required=need_n)
        sp.add_argument("--rho", type=float)
        sp.add_argument("--dist",
                        choices=("rademacher", "gaussian", "student"),
                        default="rademacher")
        sp.add_argument("--samples", type=int, default=100)

    p_mom = sim_sub.add_parser("moments", parents=[shared])
    add_ensemble_flags(p_mom)
    p_mom.add_argument("--s", type=int, action="append", required=True,
                       help="repeatable; Tr H^{2s} per value")
    p_mom.add_argument("--fast", action="store_true",
                       help="matrix-power route (s <= 5) instead of "
                            "eigendecompositions")
    p_edge = sim_sub.add_parser("edge", parents=[shared])
    add_ensemble_flags(p_edge)
    p_edge.add_argument("--eps", type=float,
                        help="sparsity exponent: rho = n^{2/3 (1+eps)}")
    p_edge.add_argument("--x-grid", default="-4,-2,-1,0,1,2,4",
                        help="comma-separated edge offsets")
    p_cr = sim_sub.add_parser("crossover", parents=[shared])
    p_cr.add_argument("--n", type=int, action="append", required=True,
                      help="repeatable matrix sizes")
    p_cr.add_argument("--eps", type=float, action="append", required=True,
                      help="repeatable sparsity exponents")
    p_cr.add_argument("--chi", type=float, default=1.0)
    p_cr.add_argument("--zeta", type=float, default=1.0)
    p_cr.add_argument("--samples", type=int, default=100)

    p_ver = sub.add_parser("verify", parents=[shared], help="run invariant suites")
    p_ver.add_argument("suite", nargs="?", default="all",
                       choices=("all", "walks", "catalan", "oracle", "sim",
                                "cli"))
    p_ver.add_argument("--fast", action="store_true",
                       help="shrunk sweep ranges")
    return parser


# ---------------------------------------------------------------------------
# subcommand bodies
# ---------------------------------------------------------------------------

def _emit(args, records, manifest):
    from . import reports
    manifest.finish()
    reports.emit_report(records, args.format, args.out, manifest)


def _manifest(args, config: dict):
    from . import reports
    return reports.RunManifest(subcommand=args.subcommand, config=config,
                               seed=getattr(args, "seed", None)).start()


def cmd_walk(args) -> int:
    from . import walks as wk
    if args.action is None:
        raise SystemExit2("walk needs an action: "
                          "from-trajectory | census | enumerate")
    if args.action in ("from-trajectory", "census"):
        traj = wk.Trajectory.from_string(args.trajectory)
        walk = wk.walk_from_trajectory(traj)
        lab = wk.label_steps(walk)
        rec = {"walk": walk.to_string(), "s": walk.s,
               "n_letters": walk.n_letters, "even": lab.is_even}
        if lab.is_even and not walk.has_loops:
            dp = wk.diagram_params(walk, args.k0)
            letter, degree = wk.max_exit_degree(walk)
            rec.update(json.loads(dp.to_json()))
            rec.update({"theta_star": lab.theta_star,
                        "max_exit_letter": letter, "max_exit_degree": degree})
            if args.action == "from-trajectory":
                strong = wk.strong_reduce(walk)
                weak = wk.weak_reduce(walk)
                cells = wk.bts_and_cells(walk)
                rec.update({"strong_reduced": strong.to_string(),
                            "strong_removed": len(strong.removed_pairs),
                            "weak_reduced": weak.to_string(),
                            "weak_removed": len(weak.removed_pairs)})
                rec.update(json.loads(cells.to_json()))
        manifest = _manifest(args, {"trajectory": args.trajectory,
                                    "k0": args.k0})
        _emit(args, [rec], manifest)
        return 0
    if args.action == "enumerate":
        walks_iter = wk.enumerate_even_walks(args.s, force=args.force)
        def records():
            for walk in walks_iter:
                lab = wk.label_steps(walk)
                dp = wk.diagram_params(walk, args.k0)
                yield {"walk": walk.to_string(), "s": walk.s,
                       "n_letters": walk.n_letters,
                       "theta_star": lab.theta_star,
                       "sigma": dp.sigma,
                       "census": dp.census_key()}
        manifest = _manifest(args, {"s": args.s, "k0": args.k0})
        _emit(args, records(), manifest)
        return 0
    raise SystemExit2("unknown walk action %r" % args.action)


def cmd_count(args) -> int:
    from . import catalan as ct
    if args.action is None:
        raise SystemExit2("count needs an action: catalan | multi-edge | "
                          "subcluster | lemma61 | conjecture | heights")
    records = []
    config = {}
    if args.action == "catalan":
        config = {"s_max": args.s_max}
        table = ct.catalan_table_recurrence(args.s_max)
        for s in range(args.s_max + 1):
            closed = ct.catalan(s)
            records.append({"s": s, "value": table[s],
                            "closed_form": closed,
                            "match": table[s] == closed})
    elif args.action == "multi-edge":
        config = {"l": args.l, "s_max": args.s_max,
                  "check_closed_form": args.check_closed_form}
        row = ct.multi_edge_gf_row(args.l, args.s_max)
        for s in range(args.l, args.s_max + 1):
            rec = {"s": s, "l": args.l, "value": row[s]}
            if args.check_closed_form:
                closed = ct.multi_edge_closed_form(args.l, s)
                rec["closed_form"] = closed
                rec["match"] = row[s] == closed
            records.append(rec)
    elif args.action == "subcluster":
        config = {"s_max": args.s_max}
        rec_tab = ct.root_subcluster_table(args.s_max)
        conv_tab = ct.root_subcluster_conv_table(args.s_max)
        for s in range(1, args.s_max + 1):
            for d in range(1, s + 1):
                records.append({"s": s, "d": d, "value": rec_tab[s][d],
                                "closed_form": conv_tab[s][d],
                                "match": rec_tab[s][d] == conv_tab[s][d]})
    elif args.action == "lemma61":
        config = {"s_max": args.s_max}
        rep = ct.check_lemma_6_1(args.s_max)
        records.append({"s_max": args.s_max,
                        "holds_for_d_ge_3": rep["holds_for_d_ge_3"],
                        "violations": len(rep["violations"]),
                        "boundary_failures": str(rep["boundary_failures"])})
    elif args.action == "conjecture":
        config = {"l_max": args.l_max, "s_max": args.s_max}
        records = ct.conjecture_6_25_report(args.l_max, args.s_max)
    elif args.action == "heights":
        config = {"s_max": args.s_max}
        table = ct.height_table(args.s_max)
        for s in range(1, args.s_max + 1):
            for u in range(1, s + 1):
                cnt = table.t_dot(u, s)
                if cnt:
                    records.append({"s": s, "u": u, "value": cnt,
                                    "closed_form": "",
                                    "match": ""})
    else:
        raise SystemExit2("unknown count action %r" % args.action)
    _emit(args, records, _manifest(args, config))
    return 0


def cmd_oracle(args) -> int:
    from . import oracle as orc
    rho = _parse_fraction(args.rho)
    try:
        spec = orc.make_spec(args.n, rho, args.s, args.dist)
    except ValueError as exc:
        raise SystemExit2(str(exc))
    agreement = None
    if args.method == "both":
        value = orc.exact_moment(spec, "both")
        agreement = True
    else:
        value = orc.exact_moment(spec, args.method)
    payload = {"value_num": str(value.numerator),
               "value_den": str(value.denominator),
               "method_agreement": agreement}
    text = json.dumps(payload, sort_keys=True)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            raise IOError("cannot write %r: %s" % (args.out, exc))
    else:
        print(text)
    return 0


def cmd_sim(args) -> int:
    from . import sim
    if args.action is None:
        raise SystemExit2("sim needs an action: moments | edge | crossover")
    base = {}
    if args.config:
        base = _load_config_file(args.config)

    def make_config(n, rho, dist):
        fields = dict(base)
        fields.update({"n": n, "rho": rho, "dist": dist,
                       "seed": args.seed})
        try:
            return sim.EnsembleConfig(**fields)
        except (TypeError, sim.SimConfigError) as exc:
            raise SystemExit2(str(exc))

    if args.action == "moments":
        if args.rho is None:
            raise SystemExit2("sim moments needs --rho")
        config = make_config(args.n, args.rho, args.dist)
        est = (sim.estimate_trace_moments_fast if args.fast
               else sim.estimate_moments)(config, args.s, args.samples)
        records = [{"s": s, "mean": est[s].mean, "stderr": est[s].stderr,
                    "n_samples": est[s].n_samples,
                    "min": est[s].min, "max": est[s].max}
                   for s in args.s]
        manifest = _manifest(args, {"n": args.n, "rho": args.rho,
                                    "dist": args.dist, "s": args.s,
                                    "samples": args.samples,
                                    "fast": args.fast})
        _emit(args, records, manifest)
        return 0
    if args.action == "edge":
        if (args.rho is None) == (args.eps is None):
            raise SystemExit2("sim edge needs exactly one of --rho / --eps")
        rho = args.rho if args.rho is not None \
            else min(float(args.n),
                     args.n ** (2.0 / 3.0 * (1.0 + args.eps)))
        config = make_config(args.n, rho, args.dist)
        try:
            xs = [float(p) for p in args.x_grid.split(",") if p]
        except ValueError as exc:
            raise SystemExit2("bad --x-grid: %s" % exc)
        curve = sim.edge_tail(config, xs, args.samples)
        records = [{"x": x, "threshold": thr, "tail_prob": p,
                    "stderr": e, "count": c, "n_samples": curve.n_samples}
                   for x, thr, p, e, c in
                   zip(curve.x_grid, curve.thresholds, curve.tail_prob,
                       curve.stderr, curve.counts)]
        manifest = _manifest(args, {"n": args.n, "rho": rho,
                                    "dist": args.dist, "x_grid": xs,
                                    "samples": args.samples})
        _emit(args, records, manifest)
        return 0
    if args.action == "crossover":
        try:
            rows = sim.crossover_scan(args.n, args.eps, args.chi,
                                      args.samples, seed=args.seed,
                                      zeta=args.zeta)
        except sim.SimConfigError as exc:
            raise SystemExit2(str(exc))
        manifest = _manifest(args, {"n": args.n, "eps": args.eps,
                                    "chi": args.chi, "zeta": args.zeta,
                                    "samples": args.samples})
        _emit(args, rows, manifest)
        return 0
    raise SystemExit2("unknown sim action %r" % args.action)


def cmd_verify(args) -> int:
    from . import verify
    if args.suite == "all":
        reports_ = verify.run_all(args.fast)
    else:
        reports_ = [verify.SUITES[args.suite](args.fast)]
    records = []
    for rep in reports_:
        for rec in rep.records():
            records.append(dict(rec, suite=rep.suite))
    manifest = _manifest(args, {"suite": args.suite, "fast": args.fast})
    _emit(args, records, manifest)
    n_fail = sum(rep.n_fail for rep in reports_)
    n_pass = sum(1 for r in records if r["status"] == "pass")
    n_report = sum(1 for r in records if r["status"] == "report")
    print("verify %s: %d pass, %d fail, %d report"
          % (args.suite, n_pass, n_fail, n_report), file=sys.stderr)
    return 0 if n_fail == 0 else 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    if args.subcommand is None:
        parser.print_usage(sys.stderr)
        return 2
    threads = _resolve_threads(args.threads) if args.subcommand == "sim" \
        else None
    if threads:
        _set_thread_env(threads)
    if getattr(args, "config", None) and args.subcommand != "sim":
        # config files carry ensemble fields; other subcommands ignore them
        pass
    handlers = {"walk": cmd_walk, "count": cmd_count, "oracle": cmd_oracle,
                "sim": cmd_sim, "verify": cmd_verify}
    from .walks import ClassificationError, MalformedInputError
    try:
        return handlers[args.subcommand](args)
    except (SystemExit2, MalformedInputError, ClassificationError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except IOError as exc:
        print("i/o error: %s" % exc, file=sys.stderr)
        return 4
    except Exception as exc:  # guardrails carry an estimate attribute
        estimate = getattr(exc, "estimate", None)
        if estimate is not None:
            print("refused: %s (estimated work: %s)" % (exc, estimate),
                  file=sys.stderr)
            return 3
        raise


if __name__ == "__main__":
    sys.exit(main())
