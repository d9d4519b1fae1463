"""Unit tests for walk canonicalization, labeling, census and reduction."""

import itertools
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from wignerlab import walks as wk


def W16():
    traj = wk.Trajectory.from_string("5,2,7,9,7,1,2,7,9,7,2,7,2,1,7,2,5")
    return wk.walk_from_trajectory(traj)


class TestCanonicalization:
    def test_w16_letters(self):
        assert W16().letters == (1, 2, 3, 4, 3, 5, 2, 3, 4, 3, 2, 3, 2, 5,
                                 3, 2, 1)

    def test_closure_forms_agree(self):
        a = wk.Trajectory.from_sequence([3, 1, 3, 1])
        b = wk.Trajectory.from_sequence([3, 1, 3, 1, 3])
        assert wk.walk_from_trajectory(a) == wk.walk_from_trajectory(b)

    def test_bad_closure_rejected(self):
        with pytest.raises(wk.MalformedInputError):
            wk.Trajectory.from_sequence([1, 2, 3])

    def test_odd_length_rejected(self):
        with pytest.raises(wk.MalformedInputError):
            wk.Trajectory((1, 2, 3), 3)

    def test_walk_letter_order_enforced(self):
        with pytest.raises(wk.MalformedInputError):
            wk.Walk((1, 3, 2, 3, 1))

    @given(st.integers(1, 4), st.data())
    @settings(max_examples=60, deadline=None)
    def test_relabeling_invariance(self, s, data):
        # the canonical walk is constant on the trajectory's orbit under
        # vertex permutations
        steps = data.draw(st.lists(st.integers(1, 6), min_size=2 * s,
                                   max_size=2 * s))
        perm = data.draw(st.permutations(list(range(1, 7))))
        w1 = wk.walk_from_trajectory(wk.Trajectory(tuple(steps), 6))
        relabeled = tuple(perm[v - 1] for v in steps)
        w2 = wk.walk_from_trajectory(wk.Trajectory(relabeled, 6))
        assert w1 == w2

    @given(st.integers(1, 4), st.data())
    @settings(max_examples=60, deadline=None)
    def test_canonical_idempotence(self, s, data):
        steps = data.draw(st.lists(st.integers(1, 5), min_size=2 * s,
                                   max_size=2 * s))
        w = wk.walk_from_trajectory(wk.Trajectory(tuple(steps), 5))
        again = wk.walk_from_trajectory(
            wk.Trajectory(w.letters[:-1], max(w.letters)))
        assert w == again


class TestLabeling:
    def test_w16_marked_steps(self):
        lab = wk.label_steps(W16())
        assert lab.marked_steps() == (1, 2, 3, 5, 6, 8, 10, 12)
        assert lab.theta_star == 4
        assert lab.marked_count == 8

    def test_even_walk_has_s_marked(self):
        for s in range(1, 5):
            for w in wk.enumerate_even_walks(s):
                lab = wk.label_steps(w)
                assert lab.is_even
                assert lab.marked_count == s
                assert lab.dyck.height == lab.theta_star

    def test_odd_walk_flagged(self):
        w = wk.walk_from_trajectory(wk.Trajectory((1, 2, 2, 1), 2))
        assert not wk.label_steps(w).is_even


class TestDyckTree:
    def test_counts_match_catalan(self):
        from wignerlab.catalan import catalan
        for s in range(1, 9):
            assert sum(1 for _ in wk.all_dyck_paths(s)) == catalan(s)

    def test_round_trip_s8(self):
        for d in wk.all_dyck_paths(8):
            tree = wk.tree_from_dyck(d)
            assert wk.dyck_from_tree(tree) == d
            assert tree.edge_count == 8
            assert tree.height == d.height


class TestCensus:
    def test_w16_graph(self):
        g = wk.walk_graph(W16())
        # marked arrivals per letter, root counting its artificial start
        assert g.kappa == {1: 1, 2: 4, 3: 1, 4: 2, 5: 1}
        assert sum(g.kappa.values()) - 1 == W16().s
        assert g.sigma == 4

    def test_w16_census(self):
        dp = wk.diagram_params(W16(), 4)
        assert (dp.mu1, dp.mu2_pp, dp.u2) == (2, 0, 2)
        assert dp.mu3 == 0 and dp.nu_l1 == 0
        assert dp.census_sum == 8
        assert dp.sigma == 4

    def test_census_sum_is_s(self):
        for s in range(1, 5):
            for w in wk.enumerate_even_walks(s):
                for k0 in (2, 4, 12):
                    dp = wk.diagram_params(w, k0)
                    assert dp.census_sum == s
                    assert dp.n_vertices == s - dp.sigma + 1

    def test_k0_too_small(self):
        with pytest.raises(ValueError):
            wk.diagram_params(W16(), 1)

    def test_non_even_walk_rejected(self):
        w = wk.walk_from_trajectory(wk.Trajectory((1, 2, 2, 1), 2))
        with pytest.raises(wk.ClassificationError):
            wk.diagram_params(w, 4)


class TestReduction:
    def test_w16_strong(self):
        red = wk.strong_reduce(W16())
        assert red.letters == (1, 2, 3, 5, 2, 3, 2, 5, 3, 2, 1)
        assert red.kept_steps == (1, 2, 5, 6, 7, 12, 13, 14, 15, 16)
        assert len(red.removed_pairs) == 3

    def test_w16_weak_equals_strong(self):
        assert wk.weak_reduce(W16()).letters == \
            wk.strong_reduce(W16()).letters

    def test_tree_type(self):
        assert wk.is_tree_type(wk.Walk((1, 2, 3, 2, 1)))
        assert wk.is_tree_type(wk.Walk((1, 2, 1, 2, 1)))
        assert not wk.is_tree_type(W16())

    def test_reduced_walk_is_even(self):
        for s in range(2, 5):
            for w in wk.enumerate_even_walks(s):
                red = wk.strong_reduce(w)
                if red.is_empty:
                    continue
                mult = Counter(frozenset(p)
                               for p in zip(red.letters, red.letters[1:]))
                assert all(m % 2 == 0 for m in mult.values())


class TestCells:
    def test_w16_cells(self):
        rep = wk.bts_and_cells(W16())
        assert rep.breve_beta == 3
        assert (rep.I, rep.M, rep.K, rep.J, rep.F_p, rep.F_pp) == \
            (0, 0, 1, 2, 0, 0)
        assert rep.R == 5
        assert rep.verified
        assert sorted(ell for _, ell, _, _ in rep.remote_bts) == [1, 2]

    def test_balance_small(self):
        for s in range(1, 5):
            for w in wk.enumerate_even_walks(s):
                exits, arrivals = wk.exit_arrival_balance(w)
                assert exits == arrivals


class TestEnumeration:
    def test_counts(self):
        expected = {1: 1, 2: 3, 3: 16, 4: 122}
        for s, count in expected.items():
            assert sum(1 for _ in wk.enumerate_even_walks(s)) == count

    def test_cap(self):
        with pytest.raises(wk.EnumerationCapError) as exc:
            list(wk.enumerate_even_walks(9))
        assert exc.value.estimate > 0

    def test_partition_small(self):
        # every trajectory maps to exactly one canonical walk; class sizes
        # add back to the trajectory count
        n, s = 4, 2
        by_walk = Counter()
        skipped = 0
        for steps in itertools.product(range(1, n + 1), repeat=2 * s):
            w = wk.walk_from_trajectory(wk.Trajectory(steps, n))
            if w.has_loops or not wk.label_steps(w).is_even:
                skipped += 1
            else:
                by_walk[w] += 1
        assert all(wk.class_size(w, n) == c for w, c in by_walk.items())
        assert sum(by_walk.values()) + skipped == n ** (2 * s)

    def test_class_size(self):
        w = wk.Walk((1, 2, 3, 2, 1))
        assert wk.class_size(w, 5) == 5 * 4 * 3
        assert wk.class_size(w, 2) == 0
