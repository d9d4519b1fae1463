"""Exact Catalan-family counting and evaluation of the moment bound constants.

All counts are arbitrary-precision integers; inequality checks are done by
cross multiplication, never in floating point.  Floating point only enters
the final bound evaluators, which are plain closed-form expressions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .walks import DiagramParams, all_trees

DEFAULT_SERIES_ORDER = 256


# ---------------------------------------------------------------------------
# Catalan numbers
# ---------------------------------------------------------------------------

def catalan(s: int) -> int:
    """(2s)! / (s! (s+1)!)."""
    if s < 0:
        raise ValueError("s must be >= 0")
    return math.comb(2 * s, s) // (s + 1)


def catalan_table_recurrence(s_max: int) -> list[int]:
    """t_0..t_{s_max} from t_{s+1} = sum_j t_j t_{s-j}."""
    t = [1]
    for s in range(s_max):
        t.append(sum(t[j] * t[s - j] for j in range(s + 1)))
    return t


def catalan_check(s_max: int) -> bool:
    """Formula and recurrence agree on 0..s_max."""
    table = catalan_table_recurrence(s_max)
    return all(table[s] == catalan(s) for s in range(s_max + 1))


# ---------------------------------------------------------------------------
# Exact power series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeriesExact:
    """Truncated power series with exact coefficients."""

    coeffs: tuple
    order: int  # coefficients are exact for exponents 0..order

    @classmethod
    def from_list(cls, coeffs: Sequence, order: Optional[int] = None) -> "SeriesExact":
        if order is None:
            order = len(coeffs) - 1
        c = list(coeffs[:order + 1])
        c += [0] * (order + 1 - len(c))
        return cls(tuple(c), order)

    def __getitem__(self, k: int):
        if k > self.order:
            raise IndexError("coefficient %d beyond truncation order %d"
                             % (k, self.order))
        return self.coeffs[k]

    def __add__(self, other: "SeriesExact") -> "SeriesExact":
        order = min(self.order, other.order)
        return SeriesExact(tuple(a + b for a, b in
                                 zip(self.coeffs, other.coeffs))[:order + 1],
                           order)

    def __sub__(self, other: "SeriesExact") -> "SeriesExact":
        order = min(self.order, other.order)
        return SeriesExact(tuple(a - b for a, b in
                                 zip(self.coeffs, other.coeffs))[:order + 1],
                           order)

    def __mul__(self, other: "SeriesExact") -> "SeriesExact":
        order = min(self.order, other.order)
        out = [0] * (order + 1)
        for i, a in enumerate(self.coeffs[:order + 1]):
            if a == 0:
                continue
            for j in range(order + 1 - i):
                b = other.coeffs[j]
                if b != 0:
                    out[i + j] += a * b
        return SeriesExact(tuple(out), order)

    def shift(self, k: int) -> "SeriesExact":
        """Multiply by the k-th power of the variable."""
        out = (0,) * k + self.coeffs[:self.order + 1 - k]
        return SeriesExact(out, self.order)

    def differentiate(self) -> "SeriesExact":
        out = tuple(k * self.coeffs[k] for k in range(1, self.order + 1))
        return SeriesExact(out, self.order - 1)

    def pow(self, e: int) -> "SeriesExact":
        out = SeriesExact.from_list([1], self.order)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base if e > 1 else base
            e >>= 1
        return out


def catalan_series(order: int = DEFAULT_SERIES_ORDER) -> SeriesExact:
    """f with coefficients t_0, t_1, ...; satisfies f = 1 + x f^2."""
    return SeriesExact.from_list(catalan_table_recurrence(order), order)


def catalan_series_derivative(order: int = DEFAULT_SERIES_ORDER) -> SeriesExact:
    """f' with coefficients (k+1) t_{k+1}."""
    t = catalan_table_recurrence(order + 1)
    return SeriesExact.from_list([(k + 1) * t[k + 1] for k in range(order + 1)],
                                 order)


# ---------------------------------------------------------------------------
# Root sub-cluster counts t~_s(d)
# ---------------------------------------------------------------------------

def root_subcluster_table(s_max: int) -> list[list[int]]:
    """table[s][d] = plane trees of s edges whose root has exactly d children,
    via the recurrence row: t~_s(1) = t~_s(2) = t_{s-1} and
    t~_s(d) = t~_s(d-1) - t~_{s-1}(d-2) for 3 <= d <= s."""
    t = catalan_table_recurrence(max(s_max, 1))
    table: list[list[int]] = [[0] * (s_max + 1) for _ in range(s_max + 1)]
    for s in range(1, s_max + 1):
        table[s][1] = t[s - 1]
        if s >= 2:
            table[s][2] = t[s - 1]
        for d in range(3, s + 1):
            table[s][d] = table[s][d - 1] - table[s - 1][d - 2]
    return table


def root_subcluster_conv_table(s_max: int) -> list[list[int]]:
    """Same quantity by convolution: t~_s(d) = [x^{s-d}] f(x)^d."""
    f = catalan_series(s_max)
    table: list[list[int]] = [[0] * (s_max + 1) for _ in range(s_max + 1)]
    power = SeriesExact.from_list([1], s_max)
    for d in range(1, s_max + 1):
        power = power * f
        for s in range(d, s_max + 1):
            table[s][d] = power[s - d]
    return table


def root_subcluster_count(s: int, d: int, method: str = "recurrence") -> int:
    """t~_s(d): plane trees of s edges whose root has exactly d children."""
    if d > s:
        return 0
    if d < 1:
        raise ValueError("d must be >= 1")
    if method == "recurrence":
        return root_subcluster_table(s)[s][d]
    if method == "convolution":
        f = catalan_series(max(s - d, 0))
        return f.pow(d)[s - d]
    raise ValueError("unknown method %r" % method)


def check_lemma_6_1(s_max: int) -> dict:
    """Exact sweep of t~_s(d) <= (3/4)^d t_s via 4^d t~ <= 3^d t_s.

    The inequality chain behind it is derived for d >= 3 and extended by the
    d = 1, 2 identities, so small (s, d) boundary failures are reported
    separately instead of counting as violations.
    """
    table = root_subcluster_table(s_max)
    t = catalan_table_recurrence(s_max)
    violations = []
    boundary = []
    pow3 = [3 ** d for d in range(s_max + 1)]
    pow4 = [4 ** d for d in range(s_max + 1)]
    for s in range(1, s_max + 1):
        for d in range(1, s + 1):
            holds = pow4[d] * table[s][d] <= pow3[d] * t[s]
            if not holds:
                (boundary if d < 3 else violations).append((s, d))
    return {
        "s_max": s_max,
        "holds_for_d_ge_3": not violations,
        "violations": violations,
        "boundary_failures": boundary,
    }


def check_6_6(s_max: int) -> bool:
    """t~_s(d) <= t_{s-1} for 1 <= d <= s <= s_max."""
    table = root_subcluster_table(s_max)
    t = catalan_table_recurrence(s_max)
    return all(table[s][d] <= t[s - 1]
               for s in range(1, s_max + 1) for d in range(1, s + 1))


# ---------------------------------------------------------------------------
# Multi-edge counts N^(l)_s
# ---------------------------------------------------------------------------

DEFAULT_ENUM_CAP = 12


def multi_edge_counts_enum(l_max: int, s: int,
                           cap: int = DEFAULT_ENUM_CAP) -> list[int]:
    """[N^(1)_s .. N^(l_max)_s] by brute force over all plane trees:
    ways to pick l edges sharing a parent vertex."""
    if s > cap:
        raise ValueError("enumeration at s=%d exceeds cap %d" % (s, cap))
    totals = [0] * l_max

    def child_degrees(tree) -> list[int]:
        out = [len(tree.children)]
        for c in tree.children:
            out.extend(child_degrees(c))
        return out

    for tree in all_trees(s):
        for deg in child_degrees(tree):
            for l in range(1, min(l_max, deg) + 1):
                totals[l - 1] += math.comb(deg, l)
    return totals


def multi_edge_count_enum(l: int, s: int, cap: int = DEFAULT_ENUM_CAP) -> int:
    if not 1 <= l <= s:
        raise ValueError("need 1 <= l <= s")
    return multi_edge_counts_enum(l, s, cap)[l - 1]


def multi_edge_count_gf(l: int, s: int,
                        order: Optional[int] = None) -> int:
    """N^(l)_s as the s-th coefficient of 2 x^{l+1} f' f^{2l-1} + x^l f^{2l}."""
    if order is None:
        order = s
    f = catalan_series(order)
    fp = catalan_series_derivative(order)
    phi = (fp * f.pow(2 * l - 1)).shift(l + 1) * SeriesExact.from_list([2], order) \
        + f.pow(2 * l).shift(l)
    return phi[s]


def multi_edge_gf_row(l: int, s_max: int) -> list[int]:
    """[N^(l)_0 .. N^(l)_{s_max}] from the generating function."""
    f = catalan_series(s_max)
    fp = catalan_series_derivative(s_max)
    two = SeriesExact.from_list([2], s_max)
    phi = (fp * f.pow(2 * l - 1)).shift(l + 1) * two + f.pow(2 * l).shift(l)
    return list(phi.coeffs)


def multi_edge_closed_form(l: int, s: int) -> int:
    """(2s)! / ((s-l)! (s+l)!); exact for l <= 3, conjectured in general."""
    if l > s:
        return 0
    return math.factorial(2 * s) // (math.factorial(s - l) * math.factorial(s + l))


def conjecture_6_25_report(l_max: int, s_max: int) -> list[dict]:
    """Compare gf counts with the closed form and with the 2^l s t_s bound."""
    rows = []
    t = catalan_table_recurrence(s_max)
    for l in range(1, l_max + 1):
        gf_row = multi_edge_gf_row(l, s_max)
        for s in range(l, s_max + 1):
            value = gf_row[s]
            closed = multi_edge_closed_form(l, s)
            rows.append({
                "l": l, "s": s, "value": value, "closed_form": closed,
                "match": value == closed,
                "bound_2l_s_ts_holds": value <= (2 ** l) * s * t[s],
                "bound_s_ts_holds": value <= s * t[s],
            })
    return rows


def check_n2_lower(s_max: int) -> dict:
    """N^(2)_s >= s t_s / 2 for 4 <= s <= s_max, with equality exactly at s=4."""
    t = catalan_table_recurrence(s_max)
    row = multi_edge_gf_row(2, s_max)
    holds = all(2 * row[s] >= s * t[s] for s in range(4, s_max + 1))
    equality = [s for s in range(4, s_max + 1) if 2 * row[s] == s * t[s]]
    return {"holds": holds, "equality_at": equality}


# ---------------------------------------------------------------------------
# Height-restricted tree counts
# ---------------------------------------------------------------------------

@dataclass
class HeightTable:
    """cum[u][s] = number of plane trees of s edges with height <= u."""

    cum: list[list[int]]
    s_max: int

    def t_ddot(self, u: int, s: int) -> int:
        if u > self.s_max:
            u = self.s_max  # heights never exceed s <= s_max
        return self.cum[u][s]

    def t_dot(self, u: int, s: int) -> int:
        """Trees of s edges with height exactly u."""
        if u < 1 or u > s:
            return 0
        return self.cum[u][s] - self.cum[u - 1][s]

    def marginal(self, s: int) -> int:
        return sum(self.t_dot(u, s) for u in range(1, s + 1))


def height_table(s_max: int) -> HeightTable:
    """First-subtree decomposition: a tree of height <= u is a first subtree
    of height <= u-1 plus a remainder of height <= u."""
    cum = [[0] * (s_max + 1) for _ in range(s_max + 1)]
    cum[0][0] = 1
    for u in range(1, s_max + 1):
        cum[u][0] = 1
        for s in range(1, s_max + 1):
            cum[u][s] = sum(cum[u - 1][j] * cum[u][s - 1 - j]
                            for j in range(s))
    return HeightTable(cum, s_max)


def b_s(x: float, s: int, table: Optional[HeightTable] = None) -> float:
    """(1/t_s) sum_u (trees of height exactly u) e^{x u / sqrt(s)}."""
    if s < 1:
        raise ValueError("s must be >= 1")
    if table is None or table.s_max < s:
        table = height_table(s)
    ts = catalan(s)
    scale = x / math.sqrt(s)
    total = 0.0
    for u in range(1, s + 1):
        cnt = table.t_dot(u, s)
        if cnt:
            total += cnt / ts * math.exp(scale * u)
    return total


def frakM_upper(chi: float, s: int, c: float = 6.0,
                table: Optional[HeightTable] = None) -> float:
    """(pi chi^3)^{-1/2} e^{4 chi^3} B_s(c chi^{3/2}), the finite-s stand-in
    for the edge-constant upper envelope; c is exposed because the source
    uses several values for the argument coefficient."""
    if chi <= 0:
        raise ValueError("chi must be > 0")
    return (math.exp(4.0 * chi ** 3) / math.sqrt(math.pi * chi ** 3)
            * b_s(c * chi ** 1.5, s, table))


# ---------------------------------------------------------------------------
# Class count / class weight bound evaluators
# ---------------------------------------------------------------------------

def bound_3_6(S: DiagramParams, theta_star: float, D: float, s: int,
              k0: int) -> float:
    """Closed-form upper bound on the number of walks in the census class."""
    mu2p = S.mu2_p
    mu3 = S.mu3
    out = (_pow_fact(6.0 * s * theta_star, S.r)
           * _pow_fact(3.0 * s * D, S.p)
           * _pow_fact(3.0 * s * k0, S.q)
           * _pow_fact(s * s / 2.0, S.mu2_pp)
           * _pow_fact(8.0 * (k0 ** 4) * s * mu2p, S.u2)
           * _pow_fact(float(s * s) * (D + k0), S.mu3_p)
           * _pow_fact(s ** 3 / 6.0, S.mu3_pp)
           * _pow_fact(16.0 * (k0 ** 5) * s * mu3, S.u3))
    for k, nu_k in S.nu_bar:
        out *= _pow_fact((2.0 * k * s) ** k / math.factorial(k), nu_k)
    return out


def bound_3_7(S: DiagramParams, u: int, D: float, s: int, n: int,
              rho: float, U_hat_sq: float, V2_hat: float, k0: int,
              table: Optional[HeightTable] = None) -> float:
    """Closed-form upper bound on the start-vertex-normalized weight of the
    trajectories whose walks fall in the census class with Dyck height u.

    Uses sigma = mu2 + 2*mu3 + u2 + u3 + |nu|_1, the form consistent with the
    vertex count |V_g| = s - sigma + 1.
    """
    if table is None or table.s_max < s:
        table = height_table(s)
    theta_u = table.t_dot(u, s)
    sigma = S.sigma_census_b
    mu2p = S.mu2_p
    mu3 = S.mu3
    out = (V2_hat ** s) * theta_u * math.exp(-((s - sigma) ** 2) / (2.0 * n))
    out *= _pow_fact(s * s / (2.0 * n), S.mu2_pp)
    # H-factors at h = 1
    out *= (_pow_fact(6.0 * s * u / n, S.r)
            * _pow_fact(3.0 * s * D * U_hat_sq / rho, S.p)
            * _pow_fact(3.0 * s * k0 * U_hat_sq / rho, S.q)
            * _pow_fact(8.0 * (k0 ** 4) * s * mu2p * U_hat_sq / rho, S.u2))
    out *= (_pow_fact(9.0 * (D + k0) * s * s * U_hat_sq / (n * rho), S.mu3_p)
            * _pow_fact(3.0 * (s ** 3) / (2.0 * n * n), S.mu3_pp)
            * _pow_fact(16.0 * (k0 ** 5) * s * mu3 * U_hat_sq / rho, S.u3))
    for k, nu_k in S.nu_bar:
        term = n * ((2.0 * k * s) ** k) * (U_hat_sq ** k) \
            / (math.factorial(k) * (rho ** k))
        out *= _pow_fact(term, nu_k)
    return out


def _pow_fact(base: float, count: int) -> float:
    """base^count / count!."""
    return (base ** count) / math.factorial(count)
