"""Verification suites: every module invariant as an addressable check.

Each check returns (id, status, detail) with status pass/fail/report;
report-grade checks describe finite-size trends and never fail a run.
The fast flag shrinks sweep ranges for quick smoke runs; the full ranges
match the module contracts.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import walks as wk
from . import catalan as ct
from . import oracle as orc
from . import sim
from . import reports


@dataclass
class Check:
    id: str
    status: str  # pass | fail | report
    detail: str


@dataclass
class VerifyReport:
    suite: str
    checks: list = field(default_factory=list)

    def add(self, check_id: str, ok: bool, detail: str = "",
            report_grade: bool = False):
        if report_grade:
            status = "report"
        else:
            status = "pass" if ok else "fail"
        self.checks.append(Check(check_id, status, detail))

    @property
    def n_fail(self) -> int:
        return sum(1 for c in self.checks if c.status == "fail")

    @property
    def exit_code(self) -> int:
        return 0 if self.n_fail == 0 else 1

    def records(self):
        for c in self.checks:
            yield {"check": c.id, "status": c.status, "detail": c.detail}


# ---------------------------------------------------------------------------
# walks
# ---------------------------------------------------------------------------

def walks_suite(fast: bool = False) -> VerifyReport:
    rep = VerifyReport("walks")
    s_enum = 4 if fast else 5

    rng = random.Random(20240824)
    ok = True
    for _ in range(50 if fast else 300):
        n = rng.randint(2, 6)
        s = rng.randint(1, 4)
        steps = [rng.randint(1, n) for _ in range(2 * s)]
        traj = wk.Trajectory(tuple(steps), n)
        w1 = wk.walk_from_trajectory(traj)
        w2 = wk.walk_from_trajectory(
            wk.Trajectory(w1.letters[:-1], max(w1.letters)))
        ok = ok and w1 == w2
    rep.add("walks.canonical_idempotence", ok)

    pairs = [(1, 7), (2, 5)] if fast else [(1, 7), (2, 5), (3, 5)]
    ok = True
    detail = []
    for s, n in pairs:
        by_walk: Counter = Counter()
        non_even = 0
        for steps in itertools.product(range(1, n + 1), repeat=2 * s):
            w = wk.walk_from_trajectory(wk.Trajectory(steps, n))
            if w.has_loops or not wk.label_steps(w).is_even:
                non_even += 1
            else:
                by_walk[w] += 1
        ok = ok and all(wk.class_size(w, n) == c for w, c in by_walk.items())
        even_walks = {w for w in wk.enumerate_even_walks(s) if wk.class_size(w, n)}
        ok = ok and set(by_walk) == even_walks
        ok = ok and sum(by_walk.values()) + non_even == n ** (2 * s)
        detail.append("s=%d n=%d classes=%d" % (s, n, len(by_walk)))
    rep.add("walks.partition_property", ok, "; ".join(detail))

    ok_marked = ok_vertex = ok_census = ok_reduce = ok_balance = ok_cells = True
    for s in range(1, s_enum + 1):
        for w in wk.enumerate_even_walks(s):
            lab = wk.label_steps(w)
            ok_marked = ok_marked and lab.is_even and lab.marked_count == s \
                and lab.dyck is not None
            g = wk.walk_graph(w)
            ok_vertex = ok_vertex and g.sigma == s - w.n_letters + 1 \
                and sum(g.pair_multiplicity.values()) == 2 * s
            for k0 in (2, 4, 12):
                dp = wk.diagram_params(w, k0)
                ok_census = ok_census and dp.census_sum == s \
                    and dp.sigma == s - w.n_letters + 1
            red = wk.strong_reduce(w)
            ok_reduce = ok_reduce and \
                len(red.kept_steps) == 2 * s - 2 * len(red.removed_pairs)
            if red.kept_steps:
                kept_mult = Counter(
                    frozenset((w.letters[t - 1], w.letters[t]))
                    for t in red.kept_steps)
                ok_reduce = ok_reduce and red.letters[0] == red.letters[-1] \
                    and all(m % 2 == 0 for m in kept_mult.values())
            exits, arrivals = wk.exit_arrival_balance(w)
            ok_balance = ok_balance and exits == arrivals
            ok_cells = ok_cells and wk.bts_and_cells(w).verified
    rep.add("walks.marked_count_dyck", ok_marked, "s <= %d" % s_enum)
    rep.add("walks.vertex_count_identity", ok_vertex, "s <= %d" % s_enum)
    rep.add("walks.census_identity", ok_census,
            "k0 in {2,4,12}, s <= %d" % s_enum)
    rep.add("walks.reduction_soundness", ok_reduce, "s <= %d" % s_enum)
    rep.add("walks.exit_arrival_balance", ok_balance, "s <= %d" % s_enum)
    rep.add("walks.cell_report_consistency", ok_cells, "s <= %d" % s_enum)

    s_bij = 6 if fast else 8
    ok = True
    count = 0
    for d in wk.all_dyck_paths(s_bij):
        tree = wk.tree_from_dyck(d)
        ok = ok and wk.dyck_from_tree(tree) == d \
            and tree.height == d.height and tree.edge_count == s_bij
        count += 1
    ok = ok and count == ct.catalan(s_bij)
    rep.add("walks.dyck_tree_bijection", ok,
            "s=%d, %d paths" % (s_bij, count))

    ok = wk.strong_reduce(wk.Walk((1, 2, 3, 4, 3, 2, 1))).is_empty \
        and wk.strong_reduce(wk.Walk((1, 2, 1, 3, 1))).is_empty
    rep.add("walks.tree_type_reduces_empty", ok)
    return rep


# ---------------------------------------------------------------------------
# catalan
# ---------------------------------------------------------------------------

def catalan_suite(fast: bool = False) -> VerifyReport:
    rep = VerifyReport("catalan")
    s_cat = 300 if fast else 2000
    rep.add("catalan.formula_vs_recurrence", ct.catalan_check(s_cat),
            "s <= %d" % s_cat)

    s_sub = 120 if fast else 500
    rec = ct.root_subcluster_table(s_sub)
    conv = ct.root_subcluster_conv_table(s_sub)
    rep.add("catalan.subcluster_dual", rec == conv, "s <= %d" % s_sub)
    rep.add("catalan.subcluster_bound_6_6", ct.check_6_6(s_sub),
            "s <= %d" % s_sub)

    rep61 = ct.check_lemma_6_1(300)
    rep.add("catalan.lemma_6_1", rep61["holds_for_d_ge_3"],
            "boundary failures at %s" % (rep61["boundary_failures"],))

    s_enum = 9 if fast else 12
    ok = True
    for s in range(1, s_enum + 1):
        enum_counts = ct.multi_edge_counts_enum(min(5, s), s)
        for l in range(1, min(5, s) + 1):
            ok = ok and enum_counts[l - 1] == ct.multi_edge_count_gf(l, s)
    rep.add("catalan.multi_edge_enum_vs_gf", ok, "l <= 5, s <= %d" % s_enum)

    ok = all(ct.multi_edge_count_gf(2, s) == ct.multi_edge_closed_form(2, s)
             for s in range(2, 201))
    ok = ok and all(
        ct.multi_edge_count_gf(3, s) == ct.multi_edge_closed_form(3, s)
        for s in range(3, 201))
    rep.add("catalan.closed_forms_l2_l3", ok, "s <= 200")

    n2 = ct.check_n2_lower(300)
    rep.add("catalan.n2_lower_bound", n2["holds"] and n2["equality_at"] == [4],
            "equality at %s" % n2["equality_at"])

    s_ht = 150 if fast else 500
    table = ct.height_table(s_ht)
    ok = all(table.marginal(s) == ct.catalan(s) for s in range(1, s_ht + 1))
    rep.add("catalan.height_marginals", ok, "s <= %d" % s_ht)

    ok = True
    for s in range(1, 11):
        brute: Counter = Counter()
        for tree in wk.all_trees(s):
            brute[tree.height] += 1
        ok = ok and all(table.t_dot(u, s) == brute.get(u, 0)
                        for u in range(1, s + 1))
    rep.add("catalan.height_vs_brute", ok, "s <= 10")

    xs = [0.0, 0.5, 1.0, 2.0, 4.0]
    vals = [ct.b_s(x, 30) for x in xs]
    rep.add("catalan.b_s_monotone",
            all(a <= b for a, b in zip(vals, vals[1:])),
            "s=30 grid %s" % xs)
    return rep


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------

def oracle_suite(fast: bool = False) -> VerifyReport:
    rep = VerifyReport("oracle")
    ok = all(orc.exact_moment_walk(orc.make_spec(n, 1, 1)) ==
             Fraction(n - 1, 4) for n in range(2, 7))
    rep.add("oracle.m2_closed_form", ok, "n in 2..6")

    ok = True
    for s in range(1, 5):
        for rho in (Fraction(1, 2), Fraction(1), Fraction(2)):
            got = orc.exact_moment_walk(
                orc.MomentSpec(2, rho, s, orc.rademacher_moments(s)))
            ok = ok and got == Fraction(1, 4) ** s * rho ** (1 - s)
    rep.add("oracle.n2_closed_form", ok, "s <= 4, rho in {1/2,1,2}")

    ok = True
    grid = [(n, s) for n in range(2, 5 if fast else 7) for s in range(1, 4)]
    if not fast:
        grid.append((4, 4))
    for n, s in grid:
        spec = orc.make_spec(n, Fraction(3, 2), s)
        ok = ok and orc.exact_moment_trajectory(spec) == \
            orc.exact_moment_walk(spec)
    rep.add("oracle.dual_method", ok, "grid %s" % (grid,))

    c = Fraction(3)
    spec = orc.make_spec(4, 2, 3)
    scaled = orc.MomentSpec(4, Fraction(2), 3, tuple(
        c ** (2 * l) * m for l, m in enumerate(spec.moments, start=1)))
    ok = orc.exact_moment_walk(scaled) == \
        c ** 6 * orc.exact_moment_walk(spec)
    rep.add("oracle.scaling_law", ok, "H -> 3H at n=4, s=3")

    ok = True
    for s in range(1, 4):
        n = 6
        spec = orc.make_spec(n, n, s)
        tree_total = Fraction(0)
        for w in wk.enumerate_even_walks(s):
            if w.n_letters == s + 1:
                tree_total += wk.class_size(w, n) * orc.walk_weight(w, spec)
        expect = Fraction(ct.catalan(s)) * Fraction(1, 4) ** s
        fall = Fraction(1)
        for i in range(s + 1):
            fall *= n - i
        ok = ok and tree_total == fall * expect / n ** s
    rep.add("oracle.wigner_tree_classes", ok, "n=6, s <= 3")

    base = orc.MomentSpec(4, Fraction(2), 2,
                          (Fraction(1, 4), Fraction(1, 16)))
    bigger = orc.MomentSpec(4, Fraction(2), 2,
                            (Fraction(1, 4), Fraction(3, 16)))
    rep.add("oracle.v4_monotonicity",
            orc.exact_moment_walk(bigger) > orc.exact_moment_walk(base),
            "M_4 at n=4")

    ok = all(orc.insertion_lower_bound_ok(s, mu2, M)
             for s in range(2, 13) for mu2 in range(0, s // 2 + 1)
             for M in range(mu2, s // 2 + 1))
    rep.add("oracle.insertion_bound", ok, "s <= 12")

    s_aud = 3 if fast else 4
    ok = True
    for s in range(1, s_aud + 1):
        for n in range(2, 7):
            recs = orc.class_weight_audit(s, n, 1, 4)
            ok = ok and all(r.bound_ok and r.eq_5_15_ok for r in recs)
    rep.add("oracle.class_weight_audit", ok, "s <= %d, n <= 6, k0=4" % s_aud)
    return rep


# ---------------------------------------------------------------------------
# sim
# ---------------------------------------------------------------------------

def sim_suite(fast: bool = False) -> VerifyReport:
    rep = VerifyReport("sim")
    cfg = sim.EnsembleConfig(n=16, rho=4.0, seed=99)
    h1 = sim.sample_matrix(cfg, 3)
    h2 = sim.sample_matrix(cfg, 3)
    rep.add("sim.determinism", np.array_equal(h1, h2))
    rep.add("sim.symmetry_diag",
            np.array_equal(h1, h1.T) and not np.any(np.diag(h1)))

    n = 200
    cfg = sim.EnsembleConfig(n=n, rho=10.0, seed=1)
    chunks = []
    for k in range(10 if fast else 50):
        h = sim.sample_matrix(cfg, k)
        iu = np.triu_indices(n, 1)
        chunks.append(h[iu] ** 2)
    vals = np.concatenate(chunks)
    target = cfg.v ** 2 / n
    z = (vals.mean() - target) / (vals.std(ddof=1) / math.sqrt(vals.size))
    rep.add("sim.entry_second_moment", abs(z) <= 4.0,
            "%d draws, z=%.2f" % (vals.size, z))

    cfg = sim.EnsembleConfig(n=4, rho=2.0, seed=3)
    samples = 20000 if fast else 100000
    stats = sim.estimate_moments(cfg, [1, 2, 3], samples)
    ok = True
    details = []
    for s in (1, 2, 3):
        exact = float(orc.exact_moment_walk(orc.make_spec(4, 2, s)))
        z = (stats[s].mean - exact) / stats[s].stderr
        ok = ok and abs(z) <= 4.0
        details.append("s=%d z=%.2f" % (s, z))
    rep.add("sim.oracle_consistency", ok, ", ".join(details))

    ok = True
    for k in range(20):
        h = sim.sample_matrix(sim.EnsembleConfig(n=32, rho=8.0, seed=7), k)
        tr, _ = sim.trace_power_and_lambda_max(h, 1)
        frob = float(np.sum(h * h))
        ok = ok and (frob == 0 or abs(tr - frob) <= 1e-10 * frob)
    rep.add("sim.trace_identity", ok, "20 samples, n=32")

    cfg = sim.EnsembleConfig(n=64, rho=16.0, seed=21)
    a = sim.estimate_moments(cfg, [1, 2, 3, 4, 5], 10)
    b = sim.estimate_trace_moments_fast(cfg, [1, 2, 3, 4, 5], 10)
    ok = all(abs(a[s].mean - b[s].mean) <= 1e-8 * max(1.0, abs(a[s].mean))
             for s in (1, 2, 3, 4, 5))
    rep.add("sim.trace_fast_vs_eig", ok, "n=64, s <= 5")

    cfg = sim.EnsembleConfig(n=100, rho=20.0, seed=5)
    curve = sim.edge_tail(cfg, [-5.0, -1.0, 0.0, 2.0, 10.0, 50.0],
                          200 if fast else 1000)
    ok = all(b <= a for a, b in zip(curve.tail_prob, curve.tail_prob[1:]))
    ok = ok and all(0.0 <= p <= 1.0 for p in curve.tail_prob)
    ok = ok and curve.tail_prob[0] >= 0.99
    rep.add("sim.edge_tail_monotone", ok,
            "tail=%s" % (curve.tail_prob,))

    cfg = sim.EnsembleConfig(n=50, rho=10.0, dist="student", df=14.0,
                             truncate=True,
                             delta=sim.default_delta(0.5, 1.0), seed=9)
    h = sim.sample_matrix(cfg, 0)
    rep.add("sim.student_truncation_path",
            np.array_equal(h, h.T) and np.isfinite(h).all())

    if not fast:
        n = 1000
        curves = []
        for eps in (0.3, 0.5):
            rho = n ** (2.0 / 3.0 * (1.0 + eps))
            cfg = sim.EnsembleConfig(n=n, rho=min(rho, float(n)), seed=13)
            curves.append(sim.edge_tail(cfg, [-2.0, 0.0, 2.0], 60))
        agree = all(
            abs(p1 - p2) <= 3.0 * math.hypot(e1, e2) + 1e-9
            for p1, e1, p2, e2 in zip(curves[0].tail_prob, curves[0].stderr,
                                      curves[1].tail_prob, curves[1].stderr))
        rep.add("sim.edge_universality_eps", agree,
                "eps 0.3 vs 0.5 at n=%d: %s vs %s"
                % (n, curves[0].tail_prob, curves[1].tail_prob),
                report_grade=True)
    return rep


# ---------------------------------------------------------------------------
# cli-level determinism
# ---------------------------------------------------------------------------

def cli_suite(fast: bool = False) -> VerifyReport:
    rep = VerifyReport("cli")
    recs = [{"s": s, "value": Fraction(1, 4) ** s} for s in range(1, 6)]
    body1 = reports.render_csv_body(list(recs))
    body2 = reports.render_csv_body(list(recs))
    rep.add("cli.csv_determinism", body1 == body2 and "1/4" in body1)
    return rep


SUITES = {
    "walks": walks_suite,
    "catalan": catalan_suite,
    "oracle": oracle_suite,
    "sim": sim_suite,
    "cli": cli_suite,
}


def run_all(fast: bool = False) -> list[VerifyReport]:
    return [fn(fast) for fn in SUITES.values()]
