import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from credalme import fixtures
from credalme.generators import random_dag, random_event
from credalme.inference import (
    Query,
    UndefinedConditionalError,
    cond_prob,
    credal_bounds,
    joint_of_bn,
    local_conditionals,
)
from credalme.model import (
    CapExceededError,
    ConditionalSet,
    ConjunctiveEvent,
    CredalNetwork,
    Interval,
    Point,
    Variable,
    parent_instantiations,
)
from credalme.sequential import select_sequential


def one_var(body, d=2):
    X = Variable("X", tuple(f"x{i + 1}" for i in range(d)))
    return CredalNetwork((X,), (), (ConditionalSet("X", ConjunctiveEvent(), body),))


def uniform_chain():
    vs = fixtures.BURGLARY_VARIABLES
    skeleton = CredalNetwork(vs, (("A", "B"), ("B", "C")), ())
    tables = [
        ConditionalSet(v.name, pa, Point((0.5, 0.5)))
        for v in vs
        for pa in parent_instantiations(skeleton, v.name)
    ]
    return skeleton.replace_tables(tables)


class TestJointOfBn:
    def test_uniform_chain(self):
        np.testing.assert_allclose(joint_of_bn(uniform_chain()).probs, np.full(8, 1 / 8), atol=1e-15)

    def test_single_variable(self):
        np.testing.assert_allclose(joint_of_bn(one_var(Point((0.3, 0.7)))).probs, (0.3, 0.7))

    def test_example_query(self):
        bn = select_sequential(fixtures.example52()).bayes_net
        j = joint_of_bn(bn)
        pa1 = j.prob(ConjunctiveEvent.of(A="a1"))
        assert j.prob(ConjunctiveEvent.of(A="a1", F="f1")) / pa1 == pytest.approx(0.64, abs=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_cpt_rows_recovered(self, seed):
        net = random_dag(np.random.default_rng(seed), kinds=("point",))
        j = joint_of_bn(net)
        for (child, pa), r in local_conditionals(j, net).items():
            assert r is not None
            np.testing.assert_allclose(r, net.table(child, pa).body.p, atol=1e-12)

    def test_cap(self):
        vs = tuple(Variable(f"X{i}", ("0", "1")) for i in range(21))
        tables = tuple(ConditionalSet(v.name, ConjunctiveEvent(), Point((0.5, 0.5))) for v in vs)
        with pytest.raises(CapExceededError):
            joint_of_bn(CredalNetwork(vs, (), tables))


class TestCondProb:
    def test_marginal(self):
        j = joint_of_bn(one_var(Point((0.3, 0.7))))
        assert cond_prob(j, Query.parse("X=x2")) == pytest.approx(0.7)

    def test_zero_evidence(self):
        j = joint_of_bn(one_var(Point((0.0, 1.0))))
        with pytest.raises(UndefinedConditionalError):
            cond_prob(j, Query.parse("X=x2", "X=x1"))

    def test_contradiction(self):
        j = joint_of_bn(one_var(Point((0.4, 0.6))))
        assert cond_prob(j, Query.parse("X=x2", "X=x1")) == 0.0

    def test_true_target_rejected(self):
        with pytest.raises(ValueError):
            Query.parse("true")


class TestCredalBounds:
    def test_example52(self):
        lo, hi = credal_bounds(fixtures.example52(), Query.parse("F=f1", "A=a1"))
        assert lo == pytest.approx(0.63, abs=1e-9)
        assert hi == pytest.approx(0.84, abs=1e-9)

    def test_single_table(self):
        net = one_var(Interval((0.2, 0.3), (0.7, 0.8)))
        lo, hi = credal_bounds(net, Query.parse("X=x1"))
        assert (lo, hi) == pytest.approx((0.2, 0.7), abs=1e-12)

    def test_witness(self):
        b = credal_bounds(fixtures.example52(), Query.parse("F=f1", "A=a1"), witness=True)
        # 0.63 = 0.3 * 0.7 + 0.7 * 0.6 and 0.84 = 0.4 * 0.9 + 0.6 * 0.8
        assert b.lo_witness["C|A=a1"] == pytest.approx([0.3, 0.7])
        assert b.lo_witness["F|C=c1"][0] == pytest.approx(0.7)
        assert b.lo_witness["F|C=c2"][0] == pytest.approx(0.6)
        assert b.hi_witness["C|A=a1"] == pytest.approx([0.4, 0.6])
        assert b.hi_witness["F|C=c1"][0] == pytest.approx(0.9)
        assert b.hi_witness["F|C=c2"][0] == pytest.approx(0.8)

    def test_cap(self):
        with pytest.raises(CapExceededError):
            credal_bounds(fixtures.example52(), Query.parse("F=f1", "A=a1"), cap=10)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_point_network_exact(self, seed):
        rng = np.random.default_rng(seed)
        net = random_dag(rng, kinds=("point",))
        by_name = {v.name: v for v in net.variables}
        target = random_event(rng, by_name, [net.names[-1]])
        evidence = random_event(rng, by_name, [net.names[0]])
        q = Query(target, evidence)
        lo, hi = credal_bounds(net, q)
        p = cond_prob(joint_of_bn(net), q)
        assert lo == hi == pytest.approx(p, abs=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_sequential_inside_bounds(self, seed):
        rng = np.random.default_rng(seed)
        net = random_dag(rng, n_max=3, d_max=2)
        by_name = {v.name: v for v in net.variables}
        q = Query(random_event(rng, by_name, [net.names[-1]]), random_event(rng, by_name, [net.names[0]]))
        lo, hi = credal_bounds(net, q)
        p = cond_prob(joint_of_bn(select_sequential(net).bayes_net), q)
        assert lo - 1e-12 <= p <= hi + 1e-12

    def test_widening_is_monotone(self):
        net = fixtures.example52()
        q = Query.parse("F=f1", "A=a1")
        lo, hi = credal_bounds(net, q)
        t = net.table("F", ConjunctiveEvent.of(C="c2"))
        wider = Interval((0.5, 0.0, 0.0), (0.9, 0.4, 0.4))
        tables = [ConditionalSet(t.child, t.given, wider) if s is t else s for s in net.tables]
        lo2, hi2 = credal_bounds(net.replace_tables(tables), q)
        assert lo2 <= lo + 1e-15 and hi2 >= hi - 1e-15
        assert lo2 < lo
