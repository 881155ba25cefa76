"""Sum-of-squares reduction of live-reset tree networks.

A two-level tree is collapsed into the disjoint union of the child-root
pairwise products, glued at a fresh silent initial state.  Upstream child
synchronisations become handoffs that may pass control to any square.
States from which the root can never act again are pruned, and the result
can be completed into a live-reset component so the construction nests
bottom-up over trees of any height.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import EmptyReduction, NotTwoLevel
from .model import Component, Network, subnetwork, two_level_network
from .product import ExplicitLts, FreshInit, Payload, SquareOrigin, Transition


@dataclass(frozen=True)
class SumOfSquares:
    """The glued union of child-root squares of a two-level network."""

    lts: ExplicitLts
    epsilon: str
    root_index: int
    root_name: str
    root_acts: frozenset[str]
    root_upacts: frozenset[str]
    child_indices: tuple[int, ...]
    unreduced: bool


def fresh_action(taken: frozenset[str] | set[str], base: str) -> str:
    """A name not in ``taken``, derived from ``base``."""
    if base not in taken:
        return base
    k = 1
    while f"{base}_{k}" in taken:
        k += 1
    return f"{base}_{k}"


def build_sq_unreduced(net: Network, epsilon: str | None = None) -> SumOfSquares:
    """Build the glued union of child-root squares, reachable part only.

    The network must be a two-level tree (a root whose children are all
    leaves).  Transitions follow four rules: the fresh initial state reaches
    every square's initial pair via ``epsilon``; local child and root
    actions move their own coordinate inside a square; a child synchronising
    upward resets and hands control to any square; and upstream actions of
    the root itself move the root coordinate in place.

    State ids are assigned square by square in network order, child states
    varying slower than root states, so results are reproducible.
    """
    r = net.root_index
    kids = net.children[r]
    if not kids:
        raise NotTwoLevel("the network must have at least one child under the root")
    for k in kids:
        if net.children[k]:
            raise NotTwoLevel(f"component {net.components[k].name!r} is not a leaf")
    root = net.components[r]
    all_acts = {a for c in net.components for a in c.acts}
    if epsilon is None:
        epsilon = fresh_action(all_acts | set(net.silent), "eps")
    elif epsilon in all_acts:
        raise ValueError(f"epsilon name {epsilon!r} collides with an existing action")
    loc_root = net.locacts[r]
    up_root = net.upacts[r]

    def successors(p: Payload) -> list[tuple[str, Payload, frozenset[int]]]:
        if isinstance(p, FreshInit):
            return [
                (epsilon, SquareOrigin(k, net.components[k].initial, root.initial), frozenset())
                for k in kids
            ]
        assert isinstance(p, SquareOrigin)
        i, cs, rs = p.child_index, p.child_state, p.root_state
        child = net.components[i]
        out: list[tuple[str, Payload, frozenset[int]]] = []
        for act, dst in child.moves[cs]:
            if act in net.locacts[i]:
                out.append((act, SquareOrigin(i, dst, rs), frozenset((i,))))
        for act, dst in root.moves[rs]:
            if act in loc_root:
                out.append((act, SquareOrigin(i, cs, dst), frozenset((r,))))
        for act, dst in child.moves[cs]:
            if act in net.upacts[i] and dst == child.initial:
                for root_act, root_dst in root.moves[rs]:
                    if root_act == act:
                        for j in kids:
                            out.append((
                                act,
                                SquareOrigin(j, net.components[j].initial, root_dst),
                                frozenset((i, r)),
                            ))
        for act, dst in root.moves[rs]:
            if act in up_root:
                out.append((act, SquareOrigin(i, cs, dst), frozenset((r,))))
        return out

    start: Payload = FreshInit()
    reachable: set[Payload] = {start}
    frontier: list[Payload] = [start]
    while frontier:
        nxt: list[Payload] = []
        for p in frontier:
            for _, q, _ in successors(p):
                if q not in reachable:
                    reachable.add(q)
                    nxt.append(q)
        frontier = nxt

    ordered: list[Payload] = [start]
    for k in kids:
        child = net.components[k]
        for cs in child.states:
            for rs in root.states:
                p = SquareOrigin(k, cs, rs)
                if p in reachable:
                    ordered.append(p)
    ids = {p: i for i, p in enumerate(ordered)}

    transitions = [
        Transition(ids[p], act, ids[q], movers)
        for p in ordered
        for act, q, movers in successors(p)
    ]
    labels = [
        frozenset() if isinstance(p, FreshInit)
        else net.components[p.child_index].label_of(p.child_state) | root.label_of(p.root_state)
        for p in ordered
    ]
    return SumOfSquares(
        lts=ExplicitLts(0, transitions, labels, ordered),
        epsilon=epsilon,
        root_index=r,
        root_name=root.name,
        root_acts=root.acts,
        root_upacts=up_root,
        child_indices=tuple(kids),
        unreduced=True,
    )


def compute_locked(sq: SumOfSquares, root_acts: frozenset[str] | None = None) -> frozenset[int]:
    """States from which no finite path reaches a root-labelled transition.

    ``root_acts`` defaults to the full action set of the root component.
    Computed by reverse reachability from the sources of root-labelled
    transitions; everything else is locked.
    """
    acts = sq.root_acts if root_acts is None else frozenset(root_acts)
    lts = sq.lts
    rev: list[list[int]] = [[] for _ in range(lts.n_states)]
    for t in lts.transitions:
        rev[t.dst].append(t.src)
    alive = {t.src for t in lts.transitions if t.action in acts}
    stack = list(alive)
    while stack:
        u = stack.pop()
        for v in rev[u]:
            if v not in alive:
                alive.add(v)
                stack.append(v)
    return frozenset(i for i in range(lts.n_states) if i not in alive)


def build_sq(net: Network, epsilon: str | None = None) -> SumOfSquares:
    """The pruned sum-of-squares: locked states removed, ids renumbered.

    Raises EmptyReduction when pruning would leave the initial state with no
    surviving square to enter.
    """
    return prune_locked(build_sq_unreduced(net, epsilon))


def prune_locked(sq: SumOfSquares) -> SumOfSquares:
    """Remove the locked states of an unreduced sum-of-squares.

    A locked state is kept when a labelled state is reachable from it:
    locked regions are forward-closed, so deleting such a state could make
    a reachable labelling unreachable and flip a verdict.  On systems whose
    locked states carry no reachable labelling (all the bundled fixtures)
    this deletes exactly the locked set.  The glue initial state is never
    deleted; if every square it enters is deleted, EmptyReduction is raised
    instead of emitting a system with a dangling initial state.
    """
    locked = compute_locked(sq)
    lts = sq.lts
    if not locked:
        return replace(sq, unreduced=False)

    # backward closure of the labelled states
    rev: list[list[int]] = [[] for _ in range(lts.n_states)]
    for t in lts.transitions:
        rev[t.dst].append(t.src)
    label_reaching = {i for i in range(lts.n_states) if lts.labels[i]}
    stack = list(label_reaching)
    while stack:
        u = stack.pop()
        for v in rev[u]:
            if v not in label_reaching:
                label_reaching.add(v)
                stack.append(v)

    deleted = locked - frozenset(label_reaching) - {lts.initial}
    if all(t.dst in deleted for t in lts.out(lts.initial)):
        raise EmptyReduction("all squares are locked; the initial state would be isolated")
    if not deleted:
        return replace(sq, unreduced=False)
    remap = {old: new for new, old in
             enumerate(i for i in range(lts.n_states) if i not in deleted)}
    pruned = ExplicitLts(
        initial=remap[lts.initial],
        transitions=[
            Transition(remap[t.src], t.action, remap[t.dst], t.movers)
            for t in lts.transitions
            if t.src in remap and t.dst in remap
        ],
        labels=[lts.labels[i] for i in range(lts.n_states) if i not in deleted],
        payloads=[lts.payloads[i] for i in range(lts.n_states) if i not in deleted],
    )
    return replace(sq, lts=pruned, unreduced=False)


def cmpl(sq: SumOfSquares) -> Component:
    """Close a sum-of-squares under upstream synchronisation of its root.

    Every transition labelled with an upstream action of the root is
    retargeted to the fresh initial state, making the result a live-reset
    component (named after the root) that can stand in for the whole
    subtree inside an enclosing network.
    """
    lts = sq.lts
    names = tuple(f"q{i}" for i in range(lts.n_states))
    init = names[lts.initial]
    transitions = tuple(
        (names[t.src], t.action, init if t.action in sq.root_upacts else names[t.dst])
        for t in lts.transitions
    )
    return Component(
        name=sq.root_name,
        states=names,
        initial=init,
        transitions=transitions,
        labels={names[i]: lts.labels[i] for i in range(lts.n_states) if lts.labels[i]},
    )


@dataclass(frozen=True)
class ReductionStage:
    """One two-level collapse performed during a bottom-up reduction."""

    net: Network
    sq: SumOfSquares
    result: Component


def reduce_net(net: Network, prune: bool = True) -> Component:
    """Collapse a live-reset tree network into a single component.

    Leaves are returned unchanged; every internal node is replaced by the
    completed (and, unless ``prune`` is false, pruned) sum-of-squares of
    itself and its already-reduced children.  The result satisfies the same
    reachability verdicts as the full product for every single proposition.
    """
    component, _ = reduce_net_traced(net, prune=prune)
    return component


def reduce_net_traced(
    net: Network, prune: bool = True,
) -> tuple[Component, tuple[ReductionStage, ...]]:
    """Like reduce_net but also returns the per-node stages, bottom-up.

    The last stage is the top-level one; its network consists of the
    original root and the reduced children, which is what any witness found
    on the final component is expressed over.
    """
    stages: list[ReductionStage] = []
    reserved = frozenset(
        {a for c in net.components for a in c.acts} | net.silent
    )
    component = _reduce(net, 0, reserved, stages, prune)
    return component, tuple(stages)


def _reduce(
    net: Network,
    level: int,
    reserved: frozenset[str],
    stages: list[ReductionStage],
    prune: bool,
) -> Component:
    if len(net.components) == 1:
        return net.components[net.root_index]
    r = net.root_index
    root = net.components[r]
    reduced = [
        _reduce(subnetwork(net, child), level + 1, reserved, stages, prune)
        for child in net.children[r]
    ]
    epsilon = fresh_action(reserved, f"eps{level}")
    # silent glue names introduced by deeper levels travel inside the
    # reduced children and must stay silent here
    introduced = {a for c in reduced for a in c.acts if a not in reserved}
    two_level = two_level_network(
        root,
        reduced,
        child_upacts=[net.upacts[child] for child in net.children[r]],
        root_upacts=net.upacts[r],
        silent=net.silent | introduced,
    )
    if prune:
        try:
            sq = build_sq(two_level, epsilon)
        except EmptyReduction:
            # every square is locked and label-free: nothing labelled is
            # reachable in this subtree, so the bare glue state is enough
            sq = _glue_only(build_sq_unreduced(two_level, epsilon))
    else:
        sq = build_sq_unreduced(two_level, epsilon)
    result = cmpl(sq)
    stages.append(ReductionStage(net=two_level, sq=sq, result=result))
    return result


def _glue_only(sq: SumOfSquares) -> SumOfSquares:
    lts = sq.lts
    return replace(
        sq,
        lts=ExplicitLts(0, (), [frozenset()], [lts.payloads[lts.initial]]),
        unreduced=False,
    )
