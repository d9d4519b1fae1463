"""Closed even walks: canonical forms, marked steps, self-intersections, cells.

A trajectory is a closed integer path of 2s steps.  Relabeling its vertices in
first-appearance order produces a canonical walk; the walks with every vertex
pair traversed an even number of times are the only ones with nonzero weight
in the trace expansion of a symmetric random matrix.  This module provides the
canonicalizer, the marked-step labeling (Dyck path / plane tree structure),
the walk multigraph with self-intersection degrees, the arrival census, the
strong and weak reductions, the maximal exit degree, and the cell report
around the vertex of maximal exit degree.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Optional


class MalformedInputError(ValueError):
    """Raised for inputs that cannot be parsed into a trajectory or walk."""


class ClassificationError(ValueError):
    """Raised when a census is requested for a non-even walk."""


class EnumerationCapError(RuntimeError):
    """Raised when an enumeration would exceed the configured guardrail."""

    def __init__(self, message: str, estimate: int):
        super().__init__(message)
        self.estimate = estimate


DEFAULT_ENUM_CAP = 6


# ---------------------------------------------------------------------------
# Trajectories and canonical walks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Trajectory:
    """A closed path i_0 .. i_{2s-1} on vertices [1..n]; closure is implicit."""

    steps: tuple[int, ...]
    n: int

    def __post_init__(self):
        if len(self.steps) == 0 or len(self.steps) % 2 != 0:
            raise MalformedInputError(
                "trajectory needs an even number of labels >= 2, got %d"
                % len(self.steps))
        for v in self.steps:
            if not 1 <= v <= self.n:
                raise MalformedInputError(
                    "label %r outside [1..%d]" % (v, self.n))

    @classmethod
    def from_sequence(cls, labels, n: Optional[int] = None) -> "Trajectory":
        """Build from 2s labels, or from 2s+1 labels with explicit closure."""
        labels = tuple(int(v) for v in labels)
        if len(labels) >= 3 and len(labels) % 2 == 1:
            if labels[-1] != labels[0]:
                raise MalformedInputError(
                    "odd-length sequence must close on its first label")
            labels = labels[:-1]
        if n is None:
            n = max(labels) if labels else 0
        return cls(labels, n)

    @classmethod
    def from_string(cls, text: str, n: Optional[int] = None) -> "Trajectory":
        parts = [p for p in text.replace(" ", "").split(",") if p]
        if not parts:
            raise MalformedInputError("empty trajectory string")
        try:
            labels = [int(p) for p in parts]
        except ValueError as exc:
            raise MalformedInputError("non-integer label in %r" % text) from exc
        return cls.from_sequence(labels, n)

    @property
    def s(self) -> int:
        return len(self.steps) // 2

    def closed(self) -> tuple[int, ...]:
        """The full vertex sequence of length 2s+1 including the closure."""
        return self.steps + (self.steps[0],)

    def to_string(self) -> str:
        return ",".join(str(v) for v in self.steps)


@dataclass(frozen=True)
class Walk:
    """Canonical closed walk: letters w(0..2s) in first-appearance order."""

    letters: tuple[int, ...]

    def __post_init__(self):
        w = self.letters
        if len(w) < 3 or len(w) % 2 == 0:
            raise MalformedInputError(
                "walk needs 2s+1 letters with s >= 1, got %d" % len(w))
        if w[0] != 1 or w[-1] != 1:
            raise MalformedInputError("walk must start and end at letter 1")
        seen = 0
        for v in w:
            if v == seen + 1:
                seen += 1
            elif not 1 <= v <= seen:
                raise MalformedInputError(
                    "letters must appear in first-occurrence order; got %r"
                    % (w,))

    @classmethod
    def from_string(cls, text: str) -> "Walk":
        parts = [p for p in text.replace(" ", "").split(",") if p]
        try:
            return cls(tuple(int(p) for p in parts))
        except ValueError as exc:
            raise MalformedInputError("non-integer letter in %r" % text) from exc

    @property
    def s(self) -> int:
        return len(self.letters) // 2

    @property
    def n_letters(self) -> int:
        return max(self.letters)

    @property
    def has_loops(self) -> bool:
        w = self.letters
        return any(w[t] == w[t + 1] for t in range(len(w) - 1))

    def steps(self) -> Iterator[tuple[int, int, int]]:
        """Yield (t, tail, head) for steps t = 1 .. 2s."""
        w = self.letters
        for t in range(1, len(w)):
            yield t, w[t - 1], w[t]

    def to_string(self) -> str:
        return ",".join(str(v) for v in self.letters)


def walk_from_trajectory(traj: Trajectory) -> Walk:
    """Relabel a closed trajectory by first appearance; root becomes letter 1."""
    relabel: dict[int, int] = {}
    letters = []
    for v in traj.closed():
        if v not in relabel:
            relabel[v] = len(relabel) + 1
        letters.append(relabel[v])
    return Walk(tuple(letters))


# ---------------------------------------------------------------------------
# Marked steps, Dyck paths, plane trees
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DyckPath:
    """A lattice path of +1/-1 steps staying nonnegative and ending at 0."""

    ups_downs: tuple[int, ...]

    def __post_init__(self):
        h = 0
        for step in self.ups_downs:
            if step not in (1, -1):
                raise MalformedInputError("Dyck steps must be +1/-1")
            h += step
            if h < 0:
                raise MalformedInputError("Dyck prefix sum went negative")
        if h != 0:
            raise MalformedInputError("Dyck path must end at height 0")

    @property
    def s(self) -> int:
        return len(self.ups_downs) // 2

    def heights(self) -> tuple[int, ...]:
        out = [0]
        for step in self.ups_downs:
            out.append(out[-1] + step)
        return tuple(out)

    @property
    def height(self) -> int:
        """The maximum height theta* of the path."""
        return max(self.heights())


@dataclass(frozen=True)
class StepLabeling:
    """Marked/non-marked flags for the 2s steps of a walk."""

    marked: tuple[bool, ...]        # index t-1 holds the flag of step t
    is_even: bool
    marked_count: int
    heights: tuple[int, ...]        # prefix sums of +1/-1, length 2s+1
    dyck: Optional[DyckPath]        # None when the +1/-1 word is not a Dyck path

    @property
    def theta_star(self) -> int:
        return max(self.heights)

    def marked_steps(self) -> tuple[int, ...]:
        """1-based step numbers of the marked steps."""
        return tuple(t + 1 for t, m in enumerate(self.marked) if m)


def label_steps(walk: Walk) -> StepLabeling:
    """Mark each step whose vertex pair has odd multiplicity after the step."""
    parity: Counter = Counter()
    marked = []
    heights = [0]
    for _, tail, head in walk.steps():
        pair = frozenset((tail, head))
        parity[pair] ^= 1
        m = parity[pair] == 1
        marked.append(m)
        heights.append(heights[-1] + (1 if m else -1))
    is_even = all(v == 0 for v in parity.values())
    count = sum(marked)
    dyck = None
    if count * 2 == len(marked) and min(heights) >= 0 and heights[-1] == 0:
        dyck = DyckPath(tuple(1 if m else -1 for m in marked))
    return StepLabeling(tuple(marked), is_even, count, tuple(heights), dyck)


@dataclass(frozen=True)
class PlaneTree:
    """Rooted ordered tree; a leaf has an empty child tuple."""

    children: tuple["PlaneTree", ...] = ()

    @property
    def edge_count(self) -> int:
        return sum(1 + c.edge_count for c in self.children)

    @property
    def height(self) -> int:
        if not self.children:
            return 0
        return 1 + max(c.height for c in self.children)

    def root_degree(self) -> int:
        return len(self.children)


def tree_from_dyck(dyck: DyckPath) -> PlaneTree:
    """Decode a Dyck path into a plane tree via its chronological run."""
    pos = 0
    steps = dyck.ups_downs

    def parse_children() -> tuple[PlaneTree, ...]:
        nonlocal pos
        kids = []
        while pos < len(steps) and steps[pos] == 1:
            pos += 1
            kids.append(PlaneTree(parse_children()))
            pos += 1  # the matching -1
        return tuple(kids)

    tree = PlaneTree(parse_children())
    return tree


def dyck_from_tree(tree: PlaneTree) -> DyckPath:
    """Encode a plane tree as a Dyck path (descend +1, ascend -1)."""
    out: list[int] = []

    def visit(node: PlaneTree):
        for child in node.children:
            out.append(1)
            visit(child)
            out.append(-1)

    visit(tree)
    return DyckPath(tuple(out))


def all_dyck_paths(s: int) -> Iterator[DyckPath]:
    """All Dyck paths of 2s steps in lexicographic order (+1 before -1)."""

    def rec(prefix: list[int], h: int, remaining: int):
        if remaining == 0:
            yield DyckPath(tuple(prefix))
            return
        if remaining > h:  # room to go up and still return to 0
            prefix.append(1)
            yield from rec(prefix, h + 1, remaining - 1)
            prefix.pop()
        if h > 0:
            prefix.append(-1)
            yield from rec(prefix, h - 1, remaining - 1)
            prefix.pop()

    yield from rec([], 0, 2 * s)


def all_trees(s: int) -> Iterator[PlaneTree]:
    for dyck in all_dyck_paths(s):
        yield tree_from_dyck(dyck)


# ---------------------------------------------------------------------------
# Walk multigraph and self-intersection census
# ---------------------------------------------------------------------------

@dataclass
class WalkGraph:
    """Multigraph of a walk with pair multiplicities and marked-edge data.

    kappa[beta] counts the marked arrival instants at beta.  The root letter
    carries an artificial zero instant for its creation, so kappa(root) is
    1 plus the number of marked steps arriving there; every other letter is
    created by a marked arrival and has kappa >= 1.  With that convention
    sum(kappa) - 1 = s and |V_g| = s - sigma + 1 with
    sigma = sum(kappa - 1).
    """

    vertices: tuple[int, ...]
    pair_multiplicity: dict[frozenset, int]
    marked_edges: tuple[tuple[int, int, int], ...]  # (tail, head, time)
    kappa: dict[int, int]
    is_even: bool

    @property
    def sigma(self) -> int:
        return sum(k - 1 for k in self.kappa.values())


def walk_graph(walk: Walk) -> WalkGraph:
    labeling = label_steps(walk)
    mult: dict[frozenset, int] = {}
    marked_edges = []
    kappa: dict[int, int] = {1: 1}  # zero instant at the root
    for (t, tail, head), m in zip(walk.steps(), labeling.marked):
        pair = frozenset((tail, head))
        mult[pair] = mult.get(pair, 0) + 1
        if m:
            marked_edges.append((tail, head, t))
            kappa[head] = kappa.get(head, 0) + 1
    vertices = tuple(range(1, walk.n_letters + 1))
    for v in vertices:
        kappa.setdefault(v, 0)
    return WalkGraph(vertices, mult, tuple(marked_edges), kappa,
                     labeling.is_even)


def _marked_arrival_times(walk: Walk, labeling: StepLabeling,
                          vertex: int) -> list[int]:
    """Times of marked steps arriving at vertex, excluding the zero instant."""
    w = walk.letters
    return [t for t, m in zip(range(1, len(w)), labeling.marked)
            if m and w[t] == vertex]


def arrival_conditions(walk: Walk, vertex: int,
                       arrival_index: int) -> set[str]:
    """Which of the open/duplicate/reversed conditions hold at an arrival.

    Arrivals are the marked steps reaching `vertex`, numbered from 1 in time
    order (the creation of the vertex being arrival 1 for non-root letters).
    Returns a subset of {"o", "Delta", "Lambda"}:
      o      -- some pair at the vertex has odd multiplicity just before the
                arrival (the vertex is open),
      Delta  -- the arriving marked edge duplicates an existing marked edge
                with the same tail and head,
      Lambda -- the reversed marked edge already exists.
    """
    labeling = label_steps(walk)
    arrivals = _marked_arrival_times(walk, labeling, vertex)
    if arrival_index < 2 or arrival_index > len(arrivals):
        raise IndexError(
            "arrival_index %d out of range 2..%d for vertex %d"
            % (arrival_index, len(arrivals), vertex))
    t = arrivals[arrival_index - 1]
    w = walk.letters
    parity: Counter = Counter()
    marked_directed: set[tuple[int, int]] = set()
    for (tt, tail, head), m in zip(walk.steps(), labeling.marked):
        if tt >= t:
            break
        parity[frozenset((tail, head))] ^= 1
        if m:
            marked_directed.add((tail, head))
    conds: set[str] = set()
    if any(v == 1 for pair, v in parity.items() if vertex in pair):
        conds.add("o")
    gamma = w[t - 1]
    if (gamma, vertex) in marked_directed:
        conds.add("Delta")
    if (vertex, gamma) in marked_directed:
        conds.add("Lambda")
    return conds


def classify_arrival(walk: Walk, vertex: int, arrival_index: int) -> str:
    """Label an arrival by the maximal condition, precedence Lambda > Delta > o."""
    conds = arrival_conditions(walk, vertex, arrival_index)
    for label in ("Lambda", "Delta", "o"):
        if label in conds:
            return label
    return "plain"


@dataclass(frozen=True)
class DiagramParams:
    """Self-intersection census of an even walk at threshold k0.

    Letters with kappa <= k0 are ordinary; the second (and for the primed
    degree-3 class, third) arrival decides the sub-class.  Letters with
    kappa >= k0 + 1 are counted in nu_bar.  The census counts every marked
    arrival edge exactly once, so
        mu1 + 2*mu2 + 3*mu3 + u2 + u3 + sum(k*nu_k) = s.
    """

    s: int
    k0: int
    mu1: int
    r: int
    p: int
    q: int
    mu2_pp: int
    u2: int
    mu3_p: int
    mu3_pp: int
    u3: int
    nu_bar: tuple[tuple[int, int], ...]  # sorted (k, nu_k), k >= k0+1
    sigma: int                           # structural: s - |V_g| + 1
    n_vertices: int

    @property
    def mu2_p(self) -> int:
        return self.r + self.p + self.q

    @property
    def mu2(self) -> int:
        return self.mu2_p + self.mu2_pp

    @property
    def mu3(self) -> int:
        return self.mu3_p + self.mu3_pp

    @property
    def nu_norm(self) -> int:
        """sum of k * nu_k."""
        return sum(k * c for k, c in self.nu_bar)

    @property
    def nu_l1(self) -> int:
        """sum of (k - 1) * nu_k."""
        return sum((k - 1) * c for k, c in self.nu_bar)

    @property
    def census_sum(self) -> int:
        return (self.mu1 + 2 * self.mu2 + 3 * self.mu3 + self.u2 + self.u3
                + self.nu_norm)

    @property
    def sigma_census_a(self) -> int:
        """mu2 + mu3 + u2 + u3 + |nu|_1 (one of the two stated forms)."""
        return self.mu2 + self.mu3 + self.u2 + self.u3 + self.nu_l1

    @property
    def sigma_census_b(self) -> int:
        """mu2 + 2*mu3 + u2 + u3 + |nu|_1 (the vertex-count form)."""
        return self.mu2 + 2 * self.mu3 + self.u2 + self.u3 + self.nu_l1

    def census_key(self) -> tuple:
        """Hashable key identifying the census class."""
        return (self.r, self.p, self.q, self.mu2_pp, self.u2,
                self.mu3_p, self.mu3_pp, self.u3, self.nu_bar)

    def to_json(self) -> str:
        return json.dumps({
            "s": self.s, "k0": self.k0, "mu1": self.mu1,
            "r": self.r, "p": self.p, "q": self.q,
            "mu2_pp": self.mu2_pp, "u2": self.u2,
            "mu3_p": self.mu3_p, "mu3_pp": self.mu3_pp, "u3": self.u3,
            "nu_bar": {str(k): c for k, c in self.nu_bar},
            "sigma": self.sigma, "n_vertices": self.n_vertices,
        })


def diagram_params(walk: Walk, k0: int) -> DiagramParams:
    """Full self-intersection census of an even walk.

    Every letter, the root included, is classified by its marked arrival
    edges, so the census edge count is exactly s.  The structural sigma is
    reported from the vertex count; see DiagramParams for the census-based
    variants.
    """
    if k0 < 2:
        raise ValueError("k0 must be >= 2")
    labeling = label_steps(walk)
    if not labeling.is_even:
        raise ClassificationError("census requires an even walk")
    s = walk.s
    mu1 = r = p = q = mu2_pp = u2 = mu3_p = mu3_pp = u3 = 0
    nu: Counter = Counter()
    for vertex in range(1, walk.n_letters + 1):
        arrivals = _marked_arrival_times(walk, labeling, vertex)
        k = len(arrivals)
        if k == 0:
            continue  # the root when no marked step returns to it
        if k == 1:
            mu1 += 1
        elif k > k0:
            nu[k] += 1
        else:
            label2 = classify_arrival(walk, vertex, 2)
            if label2 != "plain":
                if label2 == "o":
                    r += 1
                elif label2 == "Delta":
                    p += 1
                else:
                    q += 1
                u2 += k - 2
            elif k == 2:
                mu2_pp += 1
            else:
                label3 = classify_arrival(walk, vertex, 3)
                if label3 in ("Delta", "Lambda"):
                    mu3_p += 1
                else:
                    mu3_pp += 1
                u3 += k - 3
    n_vertices = walk.n_letters
    sigma = s - n_vertices + 1
    return DiagramParams(
        s=s, k0=k0, mu1=mu1, r=r, p=p, q=q, mu2_pp=mu2_pp, u2=u2,
        mu3_p=mu3_p, mu3_pp=mu3_pp, u3=u3,
        nu_bar=tuple(sorted(nu.items())), sigma=sigma, n_vertices=n_vertices)


# ---------------------------------------------------------------------------
# Reductions, exit degrees, cells
# ---------------------------------------------------------------------------

def max_exit_degree(walk: Walk) -> tuple[int, int]:
    """(vertex, D): D marked edges leave the vertex; ties go to the first letter."""
    labeling = label_steps(walk)
    exits: Counter = Counter()
    for (t, tail, _head), m in zip(walk.steps(), labeling.marked):
        if m:
            exits[tail] += 1
    if not exits:
        return 1, 0
    d_max = max(exits.values())
    vertex = min(v for v, d in exits.items() if d == d_max)
    return vertex, d_max


@dataclass(frozen=True)
class ReducedWalk:
    """Result of a strong or weak reduction with original labels retained."""

    letters: tuple[int, ...]            # empty tuple when fully reduced
    kept_steps: tuple[int, ...]         # original 1-based step numbers
    removed_pairs: tuple[tuple[int, int], ...]

    @property
    def is_empty(self) -> bool:
        return not self.kept_steps

    def to_string(self) -> str:
        return ",".join(str(v) for v in self.letters)


def _reduce(walk: Walk, spare_vertex: Optional[int]) -> ReducedWalk:
    labeling = label_steps(walk)
    w = walk.letters
    # (orig index, tail, head, marked); adjacency is positional in `steps`
    steps = [(t, w[t - 1], w[t], m)
             for t, m in zip(range(1, len(w)), labeling.marked)]
    removed = []
    while True:
        hit = None
        for i in range(len(steps) - 1):
            t1, tail1, head1, m1 = steps[i]
            t2, _tail2, head2, m2 = steps[i + 1]
            if m1 and not m2 and tail1 == head2:
                if spare_vertex is not None and head1 == spare_vertex:
                    continue
                hit = i
                break
        if hit is None:
            break
        removed.append((steps[hit][0], steps[hit + 1][0]))
        del steps[hit:hit + 2]
    kept = tuple(t for t, _, _, _ in steps)
    if steps:
        letters = tuple([steps[0][1]] + [head for _, _, head, _ in steps])
    else:
        letters = ()
    return ReducedWalk(letters, kept, tuple(removed))


def strong_reduce(walk: Walk) -> ReducedWalk:
    """Repeatedly drop a marked step followed by its own non-marked reversal."""
    return _reduce(walk, spare_vertex=None)


def weak_reduce(walk: Walk) -> ReducedWalk:
    """Strong reduction, but removals arriving at the max-exit vertex are kept."""
    breve, _ = max_exit_degree(walk)
    return _reduce(walk, spare_vertex=breve)


def is_tree_type(walk: Walk) -> bool:
    return strong_reduce(walk).is_empty


@dataclass(frozen=True)
class CellReport:
    """Arrival structure at the max-exit vertex after the two reductions.

    Arrival steps at breve_beta surviving the weak reduction are cells:
    marked ones are proper (split into I cells inside the weak-only part and
    K cells inside the strongly reduced walk), non-marked ones are mirror
    cells (weak-only part) or imported cells (strongly reduced walk).  Each
    imported cell is generated by the nearest preceding marked step of the
    strongly reduced walk; that instant is local (z, head at breve_beta) or
    remote (y, head elsewhere).  Offsets are measured in original walk time
    and replay to breve_beta.
    """

    breve_beta: int
    D: int
    proper: tuple[tuple[int, int], ...]        # (x_i marked instant, m_i)
    local_bts: tuple[tuple[int, tuple[int, ...], int], ...]   # (z_k, phis, f'_k)
    remote_bts: tuple[tuple[int, int, tuple[int, ...], int], ...]
    # (y_j, ell_j, psis, f''_j)
    I: int
    M: int
    K: int
    J: int
    F_p: int
    F_pp: int
    verified: bool

    @property
    def R(self) -> int:
        return self.I + self.M + self.K + 2 * self.J + self.F_p + self.F_pp

    def to_json(self) -> str:
        return json.dumps({
            "breve_beta": self.breve_beta, "D": self.D,
            "proper": [list(x) for x in self.proper],
            "local_bts": [[z, list(phis), fp] for z, phis, fp in self.local_bts],
            "remote_bts": [[y, ell, list(psis), fpp]
                           for y, ell, psis, fpp in self.remote_bts],
            "I": self.I, "M": self.M, "K": self.K, "J": self.J,
            "F_p": self.F_p, "F_pp": self.F_pp, "R": self.R,
            "verified": self.verified,
        })


def bts_and_cells(walk: Walk) -> CellReport:
    """Classify the arrival cells at the vertex of maximal exit degree."""
    labeling = label_steps(walk)
    w = walk.letters
    breve, d_max = max_exit_degree(walk)
    hat = strong_reduce(walk)
    brv = _reduce(walk, spare_vertex=breve)
    hat_set = set(hat.kept_steps)
    brv_set = set(brv.kept_steps)
    marked = labeling.marked
    # marked instant = rank of a marked step among marked steps, 1-based
    instant_of: dict[int, int] = {}
    rank = 0
    for t, m in zip(range(1, len(w)), marked):
        if m:
            rank += 1
            instant_of[t] = rank

    proper_I: list[int] = []           # times of I proper cells
    mirrors_of: dict[int, int] = {}    # I-cell time -> mirror count
    local: dict[int, list[int]] = {}   # z marked step time -> imported times
    remote: dict[int, list[int]] = {}  # y marked step time -> imported times
    k_cells: list[int] = []            # times of K proper cells
    unassigned_mirrors = 0

    hat_order = list(hat.kept_steps)
    hat_pos = {t: i for i, t in enumerate(hat_order)}

    for t in range(1, len(w)):
        if w[t] != breve or t not in brv_set:
            continue
        if marked[t - 1]:
            if t in hat_set:
                k_cells.append(t)
            else:
                proper_I.append(t)
                mirrors_of[t] = 0
        else:
            if t in hat_set:
                # walk back through the strongly reduced walk to the
                # nearest marked step: the generating instant
                i = hat_pos[t] - 1
                while i >= 0 and not marked[hat_order[i] - 1]:
                    i -= 1
                if i < 0:
                    unassigned_mirrors += 1  # cannot happen for valid walks
                    continue
                gen = hat_order[i]
                if w[gen] == breve:
                    local.setdefault(gen, []).append(t)
                else:
                    remote.setdefault(gen, []).append(t)
            else:
                # mirror cell: attach to the latest preceding I proper cell
                prior = [x for x in proper_I if x < t]
                if prior:
                    mirrors_of[prior[-1]] += 1
                else:
                    unassigned_mirrors += 1

    proper = tuple((instant_of[t], mirrors_of[t]) for t in sorted(proper_I))
    local_bts = []
    for gen in sorted(set(k_cells)):
        times = sorted(local.get(gen, []))
        phis = []
        prev = gen
        for t in times:
            phis.append(t - prev)
            prev = t
        local_bts.append((instant_of[gen], tuple(phis), len(times)))
    remote_bts = []
    for gen in sorted(remote):
        times = sorted(remote[gen])
        ell = times[0] - gen
        psis = []
        prev = times[0]
        for t in times[1:]:
            psis.append(t - prev)
            prev = t
        remote_bts.append((instant_of[gen], ell, tuple(psis), len(times) - 1))

    I = len(proper_I)
    M = sum(mirrors_of.values()) + unassigned_mirrors
    K = len(k_cells)
    J = len(remote_bts)
    F_p = sum(fp for _, _, fp in local_bts)
    F_pp = sum(fpp for _, _, _, fpp in remote_bts)

    # replay verification of offsets and the proper-cell count
    ok = unassigned_mirrors == 0
    time_of_instant = {inst: t for t, inst in instant_of.items()}
    for z, phis, _ in local_bts:
        pos = time_of_instant[z]
        for phi in phis:
            pos += phi
            ok = ok and w[pos] == breve
    for y, ell, psis, _ in remote_bts:
        pos = time_of_instant[y] + ell
        ok = ok and w[pos] == breve
        for psi in psis:
            pos += psi
            ok = ok and w[pos] == breve
    g = walk_graph(walk)
    kappa_breve = g.kappa[breve] - (1 if breve == 1 else 0)
    ok = ok and kappa_breve == I + K

    return CellReport(breve, d_max, proper, tuple(local_bts),
                      tuple(remote_bts), I, M, K, J, F_p, F_pp, ok)


def exit_arrival_balance(walk: Walk) -> tuple[int, int]:
    """(marked exits, non-marked arrivals) at the max-exit vertex within the
    weak-reduced walk; the two numbers coincide for even walks."""
    labeling = label_steps(walk)
    w = walk.letters
    breve, _ = max_exit_degree(walk)
    brv = _reduce(walk, spare_vertex=breve)
    kept = set(brv.kept_steps)
    exits = arrivals = 0
    for t in range(1, len(w)):
        if t not in kept:
            continue
        if labeling.marked[t - 1] and w[t - 1] == breve:
            exits += 1
        if not labeling.marked[t - 1] and w[t] == breve:
            arrivals += 1
    return exits, arrivals


# ---------------------------------------------------------------------------
# Enumeration and class sizes
# ---------------------------------------------------------------------------

def estimate_even_walk_count(s: int) -> int:
    """Rough upper estimate used in guardrail messages."""
    est = 1
    for _ in range(2 * s):
        est *= s + 1
    return est


def enumerate_even_walks(s: int, cap: int = DEFAULT_ENUM_CAP,
                         force: bool = False) -> Iterator[Walk]:
    """All canonical even closed walks of 2s steps, lexicographic order.

    DFS over next letters (existing ones or the next fresh letter, never the
    current one) with parity pruning: the number of odd pairs can drop by at
    most one per remaining step and must match its parity.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    if s > cap and not force:
        raise EnumerationCapError(
            "enumeration at s=%d exceeds cap %d (roughly %d sequences); "
            "pass force=True to override" % (s, cap, estimate_even_walk_count(s)),
            estimate_even_walk_count(s))

    total = 2 * s
    seq = [1]
    parity: dict[frozenset, int] = {}
    odd_pairs = 0

    def rec(t: int, max_letter: int) -> Iterator[Walk]:
        nonlocal odd_pairs
        remaining = total - t
        if remaining == 0:
            if odd_pairs == 0 and seq[-1] == 1:
                yield Walk(tuple(seq))
            return
        if odd_pairs > remaining or (odd_pairs - remaining) % 2 != 0:
            return
        cur = seq[-1]
        hi = min(max_letter + 1, 1 + total)  # fresh letters cannot exceed s+1
        for nxt in range(1, hi + 1):
            if nxt == cur or nxt > max_letter + 1:
                continue
            if remaining == 1 and nxt != 1:
                continue
            pair = frozenset((cur, nxt))
            was_odd = parity.get(pair, 0)
            parity[pair] = was_odd ^ 1
            odd_pairs += 1 if was_odd == 0 else -1
            seq.append(nxt)
            yield from rec(t + 1, max(max_letter, nxt))
            seq.pop()
            parity[pair] = was_odd
            odd_pairs += -1 if was_odd == 0 else 1

    yield from rec(0, 1)


def class_size(walk: Walk, n: int) -> int:
    """n(n-1)...(n-|V_g|+1): trajectories over [1..n] mapping to this walk."""
    k = walk.n_letters
    if n < k:
        return 0
    out = 1
    for i in range(k):
        out *= n - i
    return out
