"""Topology inference, classification, and the reset-discipline validator."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treelts import (
    Component,
    GenConfig,
    NotATree,
    UnknownRoot,
    Violation,
    acts_of,
    gen_random_tree,
    infer_topology,
    subnetwork,
    validate_live_reset,
)
from treelts.errors import LiveResetWarning


class TestInferTopology:
    def test_gx_classification(self, gx):
        r = gx.index_of("R")
        s1 = gx.index_of("S1")
        s2 = gx.index_of("S2")
        assert gx.root_index == r
        assert gx.parent[s1] == r and gx.parent[s2] == r
        assert gx.children[r] == (s1, s2)
        assert gx.upacts[r] == frozenset()
        assert gx.downacts[r] == {"open", "chooseL", "chooseR"}
        assert gx.locacts[r] == {"beep"}
        assert gx.upacts[s1] == {"open"}
        assert gx.downacts[s1] == frozenset() and gx.locacts[s1] == frozenset()
        assert gx.upacts[s2] == {"chooseL", "chooseR"}
        assert gx.locacts[s2] == {"tau"}
        assert gx.snd[r] == {"open": s1, "chooseL": s2, "chooseR": s2}

    def test_single_component_is_trivial_tree(self):
        c = Component("only", ("u0", "u1"), "u0", (("u0", "go", "u1"),))
        net = infer_topology([c], "only")
        assert net.children[0] == ()
        assert net.locacts[0] == {"go"}
        assert net.upacts[0] == frozenset() == net.downacts[0]

    def test_sibling_sharing_is_rejected(self):
        # both children carry action x: the induced graph has a sibling edge
        # and hence a cycle over three nodes
        root = Component("r", ("r0",), "r0",
                         (("r0", "a", "r0"), ("r0", "b", "r0")))
        c1 = Component("c1", ("u0",), "u0", (("u0", "a", "u0"), ("u0", "x", "u0")))
        c2 = Component("c2", ("v0",), "v0", (("v0", "b", "v0"), ("v0", "x", "v0")))
        with pytest.raises(NotATree):
            infer_topology([root, c1, c2], "r")

    def test_three_way_sharing_is_rejected(self):
        comps = [
            Component(f"c{i}", ("s0",), "s0", (("s0", "x", "s0"),)) for i in range(3)
        ]
        with pytest.raises(NotATree, match="shared by 3"):
            infer_topology(comps, "c0")

    def test_disconnected_is_rejected(self):
        a = Component("a", ("s0",), "s0", (("s0", "x", "s0"),))
        b = Component("b", ("s0",), "s0", (("s0", "y", "s0"),))
        with pytest.raises(NotATree, match="not connected"):
            infer_topology([a, b], "a")

    def test_unknown_root(self, gx):
        with pytest.raises(UnknownRoot):
            infer_topology(gx.components, "nope")

    def test_silent_names_do_not_create_edges(self):
        # both components use tau; without silence this would be an edge
        a = Component("a", ("s0",), "s0", (("s0", "tau", "s0"), ("s0", "x", "s0")))
        b = Component("b", ("s0",), "s0", (("s0", "tau", "s0"), ("s0", "x", "s0")))
        net = infer_topology([a, b], "a")
        assert net.parent[1] == 0
        assert "tau" in net.locacts[0] and "tau" in net.locacts[1]

    def test_declared_root_upacts(self, gx):
        net = infer_topology(gx.components, "R", root_upacts=frozenset({"beep"}))
        assert net.upacts[net.root_index] == {"beep"}
        assert "beep" not in net.locacts[net.root_index]

    def test_root_upacts_must_exist(self, gx):
        with pytest.raises(ValueError):
            infer_topology(gx.components, "R", root_upacts=frozenset({"zzz"}))

    def test_root_upacts_cannot_shadow_downacts(self, gx):
        with pytest.raises(ValueError):
            infer_topology(gx.components, "R", root_upacts=frozenset({"open"}))


class TestComponent:
    def test_acts_of_s1(self, gx):
        assert acts_of(gx.components[gx.index_of("S1")]) == {"open"}

    def test_acts_of_r(self, gx):
        assert acts_of(gx.root) == {"open", "chooseL", "chooseR", "beep"}

    def test_acts_of_empty(self):
        assert acts_of(Component("e", ("s0",), "s0")) == frozenset()

    def test_duplicate_states_rejected(self):
        with pytest.raises(ValueError, match="duplicate state"):
            Component("c", ("s0", "s0"), "s0")

    def test_initial_must_be_a_state(self):
        with pytest.raises(ValueError, match="initial state"):
            Component("c", ("s0",), "s1")

    def test_transition_endpoints_checked(self):
        with pytest.raises(ValueError, match="unknown states"):
            Component("c", ("s0",), "s0", (("s0", "a", "s9"),))

    def test_labels_checked(self):
        with pytest.raises(ValueError, match="unknown state"):
            Component("c", ("s0",), "s0", labels={"s9": {"p"}})

    def test_duplicate_transitions_collapse(self):
        c = Component("c", ("s0",), "s0", (("s0", "a", "s0"), ("s0", "a", "s0")))
        assert len(c.transitions) == 1


class TestLiveReset:
    def test_gx_is_live_reset(self, gx):
        assert validate_live_reset(gx) == []

    def test_no_upacts_is_vacuous(self):
        c = Component("c", ("s0", "s1"), "s0", (("s0", "a", "s1"),))
        net = infer_topology([c], "c")
        assert validate_live_reset(net) == []

    def test_single_broken_reset_is_reported(self, gx):
        r, s1, s2 = gx.components
        bad = Component(
            name="S2", states=s2.states, initial=s2.initial,
            transitions=tuple(
                ("t2", "chooseR", "t1") if tr == ("t2", "chooseR", "t0") else tr
                for tr in s2.transitions),
            labels=s2.labels)
        net = infer_topology([r, s1, bad], "R")
        # reference scan straight from the definition
        expected = [
            Violation(c.name, tr)
            for i, c in enumerate(net.components)
            for tr in c.transitions
            if tr[1] in net.upacts[i] and tr[2] != c.initial
        ]
        assert expected == [Violation("S2", ("t2", "chooseR", "t1"))]
        assert validate_live_reset(net) == expected

    def test_unreachable_breakage_only_warns(self):
        root = Component("r", ("r0",), "r0", (("r0", "up", "r0"),))
        child = Component(
            "c", ("c0", "c1", "c2"), "c0",
            # c1 is unreachable; its non-resetting up transition is a warning
            (("c0", "up", "c0"), ("c1", "up", "c2")))
        net = infer_topology([root, child], "r")
        with pytest.warns(LiveResetWarning):
            assert validate_live_reset(net) == []


class TestSubnetwork:
    def test_subtree_keeps_upacts(self, chain_net):
        b = chain_net.index_of("B")
        sub = subnetwork(chain_net, b)
        assert [c.name for c in sub.components] == ["B", "C"]
        bi = sub.index_of("B")
        assert sub.root_index == bi
        assert sub.upacts[bi] == {"x"}
        assert sub.downacts[bi] == {"y"}

    def test_leaf_subtree(self, chain_net):
        sub = subnetwork(chain_net, chain_net.index_of("C"))
        assert len(sub.components) == 1
        assert sub.upacts[0] == {"y"}


class TestGeneratedInvariants:
    @settings(max_examples=40, deadline=None)
    @given(st.integers(min_value=0, max_value=10**9))
    def test_partition_and_snd_totality(self, seed):
        net = gen_random_tree(GenConfig(seed=seed, max_depth=3, max_children=3, max_states=4))
        for i, c in enumerate(net.components):
            nonsilent = c.acts - net.silent
            up, down, loc = net.upacts[i], net.downacts[i], net.locacts[i]
            assert up & down == up & (loc - net.silent) == down & (loc - net.silent) == set()
            assert up | down | (loc - net.silent) == nonsilent
            for act in down:
                child = net.snd[i][act]
                assert net.parent[child] == i
                assert act in net.upacts[child]

    @settings(max_examples=40, deadline=None)
    @given(st.integers(min_value=0, max_value=10**9))
    def test_every_nonsilent_action_on_one_edge(self, seed):
        net = gen_random_tree(GenConfig(seed=seed, max_depth=3, max_children=3, max_states=4))
        owners = {}
        for i, c in enumerate(net.components):
            for act in c.acts - net.silent:
                owners.setdefault(act, []).append(i)
        for act, group in owners.items():
            assert len(group) <= 2
            if len(group) == 2:
                i, j = group
                assert net.parent[i] == j or net.parent[j] == i
