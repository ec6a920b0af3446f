import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial import ConvexHull

from credalme import fixtures
from credalme.generators import random_distribution, random_kb, random_tree
from credalme.geometry import (
    InfeasibleError,
    box_halfspaces,
    hrep_to_vrep,
    hull_distance,
    in_convex,
    vertices_box_simplex,
    vrep_to_hrep,
)
from credalme.inference import joint_of_bn
from credalme.model import (
    Conditional,
    ConjunctiveEvent,
    ConvexSpec,
    Halfspace,
    Variable,
    event_mask,
    ordered_variables,
)
from credalme.solvers import (
    LinearizedConstraint,
    SolverConfig,
    SolverError,
    entropy,
    linearize,
    maxent_box,
    maxent_hrep,
    maxent_joint,
    maxent_joint_result,
    maxent_vrep,
    satisfies,
)


def sorted_rows(vs):
    return sorted(tuple(np.round(v, 9)) for v in vs)


def random_box(rng, d):
    q = random_distribution(rng, d)
    l = np.clip(q - rng.uniform(0, 0.4, d), 0, 1)
    u = np.clip(q + rng.uniform(0, 0.4, d), 0, 1)
    return l, u


def feasible_samples(rng, l, u, k):
    """Rejection-sampled points of the box intersected with the simplex."""
    out = []
    while len(out) < k:
        r = rng.dirichlet(np.ones(len(l)), size=4096)
        ok = np.all((r >= l) & (r <= u), axis=1)
        out.extend(r[ok])
    return np.array(out[:k])


class TestEntropy:
    def test_values(self):
        assert entropy([0.5, 0.5]) == pytest.approx(math.log(2))
        assert entropy([1.0, 0.0]) == 0.0
        assert entropy([0.25] * 4) == pytest.approx(math.log(4))

    def test_continuity_at_boundary(self):
        assert entropy([1 - 1e-15, 1e-15]) == pytest.approx(0.0, abs=1e-13)


class TestMaxentBox:
    @pytest.mark.parametrize(
        "l, u, expected",
        [
            ((0.2, 0.3), (0.7, 0.8), (0.5, 0.5)),
            ((0.3, 0.6), (0.4, 0.7), (0.4, 0.6)),
            ((0.7, 0, 0), (0.9, 0.3, 0.3), (0.7, 0.15, 0.15)),
            ((0, 0, 0, 0), (1, 1, 1, 1), (0.25, 0.25, 0.25, 0.25)),
        ],
    )
    def test_examples(self, l, u, expected):
        np.testing.assert_allclose(maxent_box(l, u), expected, atol=1e-12)

    def test_infeasible(self):
        with pytest.raises(InfeasibleError):
            maxent_box((0.6, 0.6), (0.7, 0.7))
        with pytest.raises(InfeasibleError):
            maxent_box((0.0, 0.0), (0.3, 0.3))

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(2, 6))
    def test_water_filling_structure(self, seed, d):
        l, u = random_box(np.random.default_rng(seed), d)
        r = maxent_box(l, u)
        assert r.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(r >= l - 1e-12) and np.all(r <= u + 1e-12)
        free = (r > l + 1e-9) & (r < u - 1e-9)
        if free.any():
            t = r[free][0]
            assert np.allclose(r[free], t, atol=1e-9)
            # clamped-low coordinates sit above the level, clamped-high below
            assert np.all(l[r <= l + 1e-9] >= t - 1e-9)
            assert np.all(u[r >= u - 1e-9] <= t + 1e-9)

    def test_beats_random_points(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            l, u = random_box(rng, 4)
            h = entropy(maxent_box(l, u))
            pts = feasible_samples(rng, l, u, 1000)
            assert all(entropy(p) <= h + 1e-12 for p in pts)


class TestMaxentVrep:
    def test_examples(self):
        np.testing.assert_allclose(maxent_vrep([(1, 0), (0, 1)]), (0.5, 0.5), atol=1e-9)
        np.testing.assert_allclose(maxent_vrep([(0.7, 0.3)]), (0.7, 0.3), atol=1e-12)
        np.testing.assert_allclose(maxent_vrep([(0.3, 0.7), (0.4, 0.6)]), (0.4, 0.6), atol=1e-9)

    def test_interior_optimum(self):
        verts = np.eye(3) * 0.6 + 0.4 / 3
        np.testing.assert_allclose(maxent_vrep(verts), np.full(3, 1 / 3), atol=1e-9)

    def test_face_optimum(self):
        verts = [(0.8, 0.2, 0.0), (0.6, 0.1, 0.3), (0.9, 0.05, 0.05)]
        r = maxent_vrep(verts)
        assert hull_distance(np.array(verts), r) < 1e-9
        rng = np.random.default_rng(1)
        for w in rng.dirichlet(np.ones(3), size=1000):
            assert entropy(w @ np.array(verts)) <= entropy(r) + 1e-10


class TestMaxentHrep:
    def test_unconstrained(self):
        np.testing.assert_allclose(maxent_hrep([], 3), np.full(3, 1 / 3), atol=1e-12)

    def test_box_as_halfspaces(self):
        hs = box_halfspaces((0.7, 0, 0), (0.9, 0.3, 0.3))
        np.testing.assert_allclose(maxent_hrep(hs, 3), (0.7, 0.15, 0.15), atol=1e-9)

    def test_lower_bound_against_grid(self):
        r = maxent_hrep([Halfspace((-1, 0), -0.6)], 2)
        grid = np.linspace(0.6, 1.0, 40001)
        best = grid[np.argmax([entropy((x, 1 - x)) for x in grid])]
        assert r[0] == pytest.approx(best, abs=1e-4)
        np.testing.assert_allclose(r, (0.6, 0.4), atol=1e-9)

    def test_redundant_rows(self):
        hs = box_halfspaces((0.3, 0.6), (0.4, 0.7)) + [Halfspace((1, 0), 0.95)]
        np.testing.assert_allclose(maxent_hrep(hs, 2), (0.4, 0.6), atol=1e-9)

    def test_empty_set(self):
        with pytest.raises(InfeasibleError):
            maxent_hrep([Halfspace((-1, 0), -0.8), Halfspace((1, 0), 0.1)], 2)


class TestGeometry:
    def test_two_dim_box(self):
        vs = vertices_box_simplex((0.3, 0.6), (0.4, 0.7))
        assert sorted_rows(vs) == sorted_rows([(0.3, 0.7), (0.4, 0.6)])

    def test_full_simplex(self):
        assert sorted_rows(vertices_box_simplex((0, 0, 0), (1, 1, 1))) == sorted_rows(np.eye(3))

    def test_against_grid_scan(self):
        l, u = np.array([0.7, 0, 0]), np.array([0.9, 0.3, 0.3])
        steps = np.arange(0, 101) / 100
        grid = np.array([(a, b, 1 - a - b) for a in steps for b in steps])
        keep = np.all((grid >= l - 1e-12) & (grid <= u + 1e-12), axis=1)
        pts = grid[keep]
        hull = ConvexHull(pts[:, :2])
        expected = pts[hull.vertices]
        got = vertices_box_simplex(l, u)
        assert sorted_rows(got) == sorted_rows(expected)
        assert len(got) == 4

    def test_vrep_to_hrep_box(self):
        l, u = (0.7, 0.0, 0.0), (0.9, 0.3, 0.3)
        spec = ConvexSpec(vertices=vertices_box_simplex(l, u))
        hs = vrep_to_hrep(spec)
        back = hrep_to_vrep(ConvexSpec(halfspaces=hs, dim=3))
        assert sorted_rows(back) == sorted_rows(spec.vertices)
        hspec = ConvexSpec(halfspaces=hs, dim=3)
        assert in_convex(hspec, (0.8, 0.1, 0.1))
        assert not in_convex(hspec, (0.6, 0.2, 0.2))

    def test_segment_hrep(self):
        spec = ConvexSpec(vertices=[(0.3, 0.7), (0.4, 0.6)])
        hs = vrep_to_hrep(spec)
        np.testing.assert_allclose(maxent_hrep(hs, 2), (0.4, 0.6), atol=1e-9)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(2, 6))
    def test_three_way_agreement(self, seed, d):
        l, u = random_box(np.random.default_rng(seed), d)
        a = maxent_box(l, u)
        b = maxent_vrep(vertices_box_simplex(l, u))
        c = maxent_hrep(box_halfspaces(l, u), d)
        assert np.max(np.abs(a - b)) <= 1e-8
        assert np.max(np.abs(a - c)) <= 1e-8


class TestLinearize:
    def setup_method(self):
        self.vs = list(fixtures.BURGLARY_VARIABLES)

    def test_point_conditional(self):
        (row,) = linearize(fixtures.burglary_kb(0.3), self.vs)
        dense = row.dense(8)
        for omega_idx, (a, b, c) in enumerate((x, y, z) for x in "AN" for y in "BN" for z in "CN"):
            if b == "B" and c == "C":
                assert dense[omega_idx] == pytest.approx(0.7)
            elif b == "B":
                assert dense[omega_idx] == pytest.approx(-0.3)
            else:
                assert dense[omega_idx] == 0.0
        assert row.relation == "="

    def test_interval_pair(self):
        X = Variable("X", ("x", "nx"))
        rows = linearize([Conditional.interval({"X": "x"}, {}, 0.3, 0.6)], [X])
        assert [r.relation for r in rows] == ["<=", "<="]
        np.testing.assert_allclose(rows[0].dense(2), (0.3 - 1, 0.3))
        np.testing.assert_allclose(rows[1].dense(2), (1 - 0.6, -0.6))

    def test_network_row(self):
        net = fixtures.example52()
        rows = [r for r in linearize(net) if r.label.startswith("(C=c1|A=a1)")]
        assert len(rows) == 2  # interval [0.3, 0.4]
        vs = ordered_variables(net)
        hit = event_mask(vs, ConjunctiveEvent.of(A="a1", C="c1"))
        miss = event_mask(vs, ConjunctiveEvent.of(A="a1", C="c2"))
        upper = rows[1].dense(48)
        assert np.allclose(upper[hit], 0.6) and np.allclose(upper[miss], -0.4)


class TestMaxentJoint:
    def test_uniform(self):
        j = maxent_joint(fixtures.BURGLARY_VARIABLES, [])
        np.testing.assert_allclose(j.probs, np.full(8, 1 / 8), atol=1e-15)

    def test_fall_off_midpoint(self):
        vs = fixtures.BURGLARY_VARIABLES
        j = maxent_joint(vs, linearize(fixtures.burglary_kb(0.5), vs))
        pa = j.prob(ConjunctiveEvent.of(A="a"))
        assert j.prob(ConjunctiveEvent.of(A="a", B="b")) / pa == pytest.approx(0.5, abs=1e-9)

    @pytest.mark.parametrize("u", [0.1, 0.3, 0.9])
    def test_fall_off_curve(self, u):
        vs = fixtures.BURGLARY_VARIABLES
        j = maxent_joint(vs, linearize(fixtures.burglary_kb(u), vs))
        pa = j.prob(ConjunctiveEvent.of(A="a"))
        got = j.prob(ConjunctiveEvent.of(A="a", B="b")) / pa
        assert got == pytest.approx(fixtures.fall_off_curve(u), abs=1e-9)

    def test_point_tree_is_product(self):
        rng = np.random.default_rng(11)
        net = random_tree(rng)
        j = maxent_joint(ordered_variables(net), linearize(net))
        assert np.max(np.abs(j.probs - joint_of_bn(net).probs)) <= 1e-9

    def test_certificate(self):
        vs = fixtures.BURGLARY_VARIABLES
        _, res = maxent_joint_result(vs, linearize(fixtures.burglary_kb(0.2), vs))
        assert res.max_residual <= 1e-8
        assert res.duality_gap <= 1e-9

    def test_zero_atoms(self):
        X = Variable("X", ("x1", "x2", "x3"))
        j = maxent_joint([X], linearize([Conditional.point({"X": "x1"}, {}, 0.0)], [X]))
        np.testing.assert_allclose(j.probs, (0.0, 0.5, 0.5), atol=1e-12)

    def test_infeasible(self):
        X = Variable("X", ("x1", "x2"))
        kb = [Conditional.point({"X": "x1"}, {}, 0.2), Conditional.point({"X": "x1"}, {}, 0.7)]
        with pytest.raises((InfeasibleError, SolverError)):
            maxent_joint([X], linearize(kb, [X]))

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_models_satisfiable_kb(self, seed):
        variables, kb = random_kb(np.random.default_rng(seed))
        j = maxent_joint(variables, linearize(kb, variables))
        assert satisfies(j, kb, 1e-8) == []

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_reordering_invariance(self, seed):
        rng = np.random.default_rng(seed)
        variables, kb = random_kb(rng)
        base = maxent_joint(variables, linearize(kb, variables))
        rows = linearize(kb, variables)
        shuffled = [rows[i] for i in rng.permutation(len(rows))]
        again = maxent_joint(variables, shuffled)
        assert np.max(np.abs(again.probs - base.probs)) <= 1e-8
        perm = list(rng.permutation(len(variables)))
        vs2 = [variables[i] for i in perm]
        other = maxent_joint(vs2, linearize(kb, vs2)).reorder([v.name for v in variables])
        assert np.max(np.abs(other.probs - base.probs)) <= 1e-8

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SolverConfig(convex_tol=0)

    def test_constraint_label(self):
        c = LinearizedConstraint.from_dense(np.array([0.0, 1.0, -2.0]), "<=", "x")
        assert c.coefficients == {1: 1.0, 2: -2.0}
