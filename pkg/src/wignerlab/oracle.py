"""Exact rational moments of dilute Wigner matrices for small (n, s).

M_2s = E Tr H^{2s} is a weighted sum over closed trajectories of 2s steps.
The weight of a trajectory factorizes over its distinct vertex pairs: a pair
traversed m times contributes V_m rho^{-m/2} (rho/n) for even m and zero for
odd m; diagonal steps contribute zero.  The oracle evaluates the sum two
independent ways, by raw trajectory enumeration and by enumerating canonical
even walks weighted by their equivalence class sizes, and the two must agree
exactly.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Optional

from . import walks as wk
from . import catalan as ct


class MomentBudgetError(RuntimeError):
    """Raised when a trajectory enumeration would exceed the budget."""

    def __init__(self, message: str, estimate: int):
        super().__init__(message)
        self.estimate = estimate


DEFAULT_TRAJECTORY_BUDGET = 5_000_000


@dataclass(frozen=True)
class MomentSpec:
    """Inputs of an exact moment computation.

    moments[l-1] holds V_2l, the 2l-th moment of the entry law a_ij; the
    list must reach order 2s.  rho may be any positive rational <= n.
    """

    n: int
    rho: Fraction
    s: int
    moments: tuple[Fraction, ...]
    truncated: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0 < self.rho <= self.n:
            raise ValueError("need 0 < rho <= n")
        if len(self.moments) < self.s:
            raise ValueError("moment list must reach order 2s")
        if self.moments[0] <= 0:
            raise ValueError("V_2 must be positive")

    def v_moment(self, m: int) -> Fraction:
        """V_m for even m."""
        if m % 2 != 0:
            return Fraction(0)
        l = m // 2
        if l > len(self.moments):
            raise ValueError("moment V_%d not configured" % m)
        return self.moments[l - 1]


def rademacher_moments(s: int, v: Fraction = Fraction(1, 2)) -> tuple[Fraction, ...]:
    """V_2l = v^{2l} for entries +-v."""
    return tuple(v ** (2 * l) for l in range(1, s + 1))


def gaussian_moments(s: int, v: Fraction = Fraction(1, 2)) -> tuple[Fraction, ...]:
    """V_2l = (2l-1)!! v^{2l} for centered Gaussian entries of variance v^2."""
    out = []
    double_fact = 1
    for l in range(1, s + 1):
        double_fact *= 2 * l - 1
        out.append(double_fact * v ** (2 * l))
    return tuple(out)


def make_spec(n: int, rho, s: int, dist: str = "rademacher") -> MomentSpec:
    rho = Fraction(rho)
    if dist == "rademacher":
        moments = rademacher_moments(s)
    elif dist == "gaussian":
        moments = gaussian_moments(s)
    else:
        raise ValueError("unknown distribution %r" % dist)
    return MomentSpec(n=n, rho=rho, s=s, moments=moments)


def pair_weight(m: int, spec: MomentSpec) -> Fraction:
    """Expected weight of an off-diagonal pair traversed m times."""
    if m < 1:
        raise ValueError("multiplicity must be >= 1")
    if m % 2 != 0:
        return Fraction(0)
    # E a^m * E b^m with b = rho^{-1/2} Bernoulli(rho/n)
    return spec.v_moment(m) * spec.rho ** (1 - m // 2) / spec.n


def walk_weight(walk: wk.Walk, spec: MomentSpec) -> Fraction:
    """Product of pair weights over the distinct pairs of the walk."""
    if walk.has_loops:
        return Fraction(0)
    g = wk.walk_graph(walk)
    out = Fraction(1)
    for mult in g.pair_multiplicity.values():
        out *= pair_weight(mult, spec)
        if out == 0:
            return out
    return out


def exact_moment_trajectory(spec: MomentSpec,
                            budget: int = DEFAULT_TRAJECTORY_BUDGET) -> Fraction:
    """M_2s by enumeration of all n^{2s} closed trajectories."""
    n, s = spec.n, spec.s
    count = n ** (2 * s)
    if count > budget:
        raise MomentBudgetError(
            "trajectory enumeration needs %d sequences (budget %d)"
            % (count, budget), count)
    total = Fraction(0)
    for steps in itertools.product(range(1, n + 1), repeat=2 * s):
        closed = steps + (steps[0],)
        if any(closed[i] == closed[i + 1] for i in range(2 * s)):
            continue  # diagonal entries vanish
        mult = Counter(frozenset((closed[i], closed[i + 1]))
                       for i in range(2 * s))
        if any(m % 2 for m in mult.values()):
            continue
        w = Fraction(1)
        for m in mult.values():
            w *= pair_weight(m, spec)
        total += w
    return total


def exact_moment_walk(spec: MomentSpec) -> Fraction:
    """M_2s as a sum over canonical even walks weighted by class sizes."""
    total = Fraction(0)
    for walk in wk.enumerate_even_walks(spec.s, cap=max(spec.s, wk.DEFAULT_ENUM_CAP)):
        size = wk.class_size(walk, spec.n)
        if size:
            total += size * walk_weight(walk, spec)
    return total


def exact_moment(spec: MomentSpec, method: str = "both",
                 budget: int = DEFAULT_TRAJECTORY_BUDGET) -> Fraction:
    """M_2s; with method="both" the two enumerations must agree exactly."""
    if method == "trajectory":
        return exact_moment_trajectory(spec, budget)
    if method == "walk":
        return exact_moment_walk(spec)
    if method == "both":
        a = exact_moment_trajectory(spec, budget)
        b = exact_moment_walk(spec)
        if a != b:
            raise AssertionError(
                "method disagreement: trajectory %s vs walk %s" % (a, b))
        return a
    raise ValueError("unknown method %r" % method)


# ---------------------------------------------------------------------------
# Closed-form evaluators
# ---------------------------------------------------------------------------

def theorem_7_1_rhs(chi: float, zeta: float, V4: float) -> float:
    """16 V4 / (zeta sqrt(pi chi)) e^{-e chi^3}."""
    import math
    if chi <= 0 or zeta <= 0:
        raise ValueError("chi and zeta must be > 0")
    return 16.0 * V4 / (zeta * math.sqrt(math.pi * chi)) \
        * math.exp(-math.e * chi ** 3)


def insertion_count(s: int, mu2: int) -> int:
    """s! / (2^mu2 mu2! (s-2*mu2)!): ways to insert mu2 disjoint pairs."""
    if mu2 < 0:
        raise ValueError("mu2 must be >= 0")
    if 2 * mu2 > s:
        return 0
    return factorial(s) // ((2 ** mu2) * factorial(mu2) * factorial(s - 2 * mu2))


def insertion_lower_bound_ok(s: int, mu2: int, M: int) -> bool:
    """Exact check of insertion_count >= ((s-2M)^2/2)^mu2 / mu2! for M >= mu2."""
    if M < mu2 or 2 * M > s:
        raise ValueError("need mu2 <= M and 2M <= s")
    lhs = Fraction(insertion_count(s, mu2))
    rhs = Fraction((s - 2 * M) ** 2, 2) ** mu2 / factorial(mu2)
    return lhs >= rhs


# ---------------------------------------------------------------------------
# Per-class audit against the closed-form weight bound
# ---------------------------------------------------------------------------

@dataclass
class ClassRecord:
    """One (Dyck height, census) class in the audit."""

    u: int
    census: wk.DiagramParams
    n_walks: int
    max_D: int
    weight: Fraction              # exact sum of class_size * walk weight
    weight_normalized: Fraction   # weight / n (per start vertex)
    bound: float
    bound_ok: bool
    eq_5_15_ok: bool


def class_weight_audit(s: int, n: int, rho, k0: int,
                       spec: Optional[MomentSpec] = None) -> list[ClassRecord]:
    """Group even walks of 2s steps by (height, census); check that each
    class's exact start-vertex-normalized weight stays below the closed-form
    bound, and that the class-size factor obeys the exponential bound
    prod(1 - k/n) <= exp(-(s - sigma)^2 / 2n)."""
    import math
    if spec is None:
        spec = make_spec(n, rho, s)
    v2_hat = float(spec.moments[0])
    # entries +-1/2 are bounded by 1/2, so U^2 / V2 = 1
    u_hat_sq = 1.0
    table = ct.height_table(s)
    groups: dict[tuple, list[wk.Walk]] = {}
    census_of: dict[tuple, wk.DiagramParams] = {}
    for walk in wk.enumerate_even_walks(s, cap=max(s, wk.DEFAULT_ENUM_CAP)):
        lab = wk.label_steps(walk)
        dp = wk.diagram_params(walk, k0)
        # the full census including mu1 and sigma: walks that lose a vertex
        # to a marked return at the root must not share a class with
        # tree-type walks
        key = (lab.theta_star, dp.mu1, dp.sigma) + dp.census_key()
        groups.setdefault(key, []).append(walk)
        census_of[key] = dp
    records = []
    rho_f = float(Fraction(rho))
    for key in sorted(groups):
        walks_in = groups[key]
        u = key[0]
        dp = census_of[key]
        weight = Fraction(0)
        max_d = 0
        eq_5_15 = True
        for walk in walks_in:
            size = wk.class_size(walk, n)
            weight += size * walk_weight(walk, spec)
            _, d = wk.max_exit_degree(walk)
            max_d = max(max_d, d)
            g = wk.walk_graph(walk)
            sigma = g.sigma
            prod = Fraction(1)
            for k in range(1, s - sigma + 1):
                prod *= Fraction(n - k, n)
            if float(prod) > math.exp(-((s - sigma) ** 2) / (2.0 * n)) * (1 + 1e-12):
                eq_5_15 = False
        normalized = weight / n
        bound = ct.bound_3_7(dp, u, max_d, s, n, rho_f, u_hat_sq, v2_hat, k0,
                             table)
        ok = float(normalized) <= bound * (1 + 1e-9)
        records.append(ClassRecord(
            u=u, census=dp, n_walks=len(walks_in), max_D=max_d,
            weight=weight, weight_normalized=normalized,
            bound=bound, bound_ok=ok, eq_5_15_ok=eq_5_15))
    return records
