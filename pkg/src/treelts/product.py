"""Explicit-state asynchronous products and run-prefix projection.

The product construction explores only the fragment reachable from the
initial tuple and is the brute-force oracle against which reductions are
checked.  Every transition records which components moved, so silent steps
can be attributed to their component when projecting prefixes.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, Union

from .errors import EmptyProjection, InvalidWitness, StateLimitExceeded
from .model import DEFAULT_SILENT, Component, Network

DEFAULT_STATE_CAP = 10**6


# ---------------------------------------------------------------------------
# State payloads
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GlobalTuple:
    """A product state: one local state per component, in network order."""

    states: tuple[str, ...]

    def __str__(self) -> str:
        return "(" + ",".join(self.states) + ")"


@dataclass(frozen=True)
class SquareOrigin:
    """A sum-of-squares state: a child state paired with a root state."""

    child_index: int
    child_state: str
    root_state: str

    def __str__(self) -> str:
        return f"({self.child_state},{self.root_state})#{self.child_index}"


@dataclass(frozen=True)
class FreshInit:
    """The fresh initial state gluing the squares together."""

    def __str__(self) -> str:
        return "init"


Payload = Union[GlobalTuple, SquareOrigin, FreshInit]


@dataclass(frozen=True)
class Transition:
    src: int
    action: str
    dst: int
    #: Indices of the components that moved; empty for glue transitions.
    movers: frozenset[int]


class ExplicitLts:
    """A flat transition graph with structured state payloads.

    States are consecutive integers; ``payloads[i]`` records where flat
    state ``i`` came from and is unique per state.  Instances are immutable
    after construction and safe to share.
    """

    def __init__(
        self,
        initial: int,
        transitions: Iterable[Transition],
        labels: Iterable[frozenset[str]],
        payloads: Iterable[Payload],
    ) -> None:
        self.payloads: tuple[Payload, ...] = tuple(payloads)
        self.n_states = len(self.payloads)
        self.labels: tuple[frozenset[str], ...] = tuple(frozenset(l) for l in labels)
        if len(self.labels) != self.n_states:
            raise ValueError("labels and payloads must have the same length")
        if not 0 <= initial < self.n_states:
            raise ValueError(f"initial state {initial} out of range")
        self.initial = initial
        self.transitions: tuple[Transition, ...] = tuple(transitions)
        ids: dict[Payload, int] = {}
        for i, p in enumerate(self.payloads):
            if p in ids:
                raise ValueError(f"duplicate payload {p}")
            ids[p] = i
        self._ids = ids
        out: list[list[Transition]] = [[] for _ in range(self.n_states)]
        for t in self.transitions:
            if not (0 <= t.src < self.n_states and 0 <= t.dst < self.n_states):
                raise ValueError(f"transition endpoint out of range: {t}")
            out[t.src].append(t)
        self._out = tuple(tuple(ts) for ts in out)

    def out(self, state: int) -> tuple[Transition, ...]:
        return self._out[state]

    def id_of(self, payload: Payload) -> int:
        return self._ids[payload]

    def has_payload(self, payload: Payload) -> bool:
        return payload in self._ids

    @cached_property
    def transition_triples(self) -> frozenset[tuple[int, str, int]]:
        return frozenset((t.src, t.action, t.dst) for t in self.transitions)

    def __repr__(self) -> str:
        return (f"ExplicitLts(states={self.n_states}, "
                f"transitions={len(self.transitions)}, initial={self.initial})")


# ---------------------------------------------------------------------------
# Paths and prefixes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Path:
    """An alternating sequence of flat state ids and actions."""

    states: tuple[int, ...]
    actions: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.states) != len(self.actions) + 1:
            raise ValueError("a path needs exactly one more state than actions")

    def __len__(self) -> int:
        return len(self.actions)


@dataclass(frozen=True)
class PathPrefix:
    """An alternating sequence of state payloads and actions.

    ``movers[k]`` records which components performed step ``k``; it is what
    makes silent steps attributable during projection.
    """

    states: tuple[Payload, ...]
    actions: tuple[str, ...]
    movers: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        if len(self.states) != len(self.actions) + 1 or len(self.actions) != len(self.movers):
            raise ValueError("prefix lengths are inconsistent")

    def __len__(self) -> int:
        return len(self.actions)

    def __str__(self) -> str:
        parts = [str(self.states[0])]
        for act, state in zip(self.actions, self.states[1:]):
            parts.append(act)
            parts.append(str(state))
        return " ".join(parts)


def replay(lts: ExplicitLts, path: Path) -> bool:
    """Whether every step of ``path`` is a transition of ``lts``."""
    if not all(0 <= s < lts.n_states for s in path.states):
        return False
    return all(
        (src, act, dst) in lts.transition_triples
        for src, act, dst in zip(path.states, path.actions, path.states[1:])
    )


def prefix_of(lts: ExplicitLts, path: Path) -> PathPrefix:
    """Resolve a flat path into a payload-level prefix with mover data."""
    movers: list[frozenset[int]] = []
    for src, act, dst in zip(path.states, path.actions, path.states[1:]):
        for t in lts.out(src):
            if t.action == act and t.dst == dst:
                movers.append(t.movers)
                break
        else:
            raise InvalidWitness(f"step ({src}, {act!r}, {dst}) is not a transition")
    return PathPrefix(
        states=tuple(lts.payloads[s] for s in path.states),
        actions=path.actions,
        movers=tuple(movers),
    )


def resolve_prefix(lts: ExplicitLts, prefix: PathPrefix) -> Path:
    """Map a payload-level prefix onto flat ids, checking every step.

    Raises InvalidWitness if a payload is not a state of ``lts`` or a step
    is not one of its transitions.
    """
    ids = []
    for p in prefix.states:
        if not lts.has_payload(p):
            raise InvalidWitness(f"state {p} does not exist in the target system")
        ids.append(lts.id_of(p))
    path = Path(tuple(ids), prefix.actions)
    if not replay(lts, path):
        raise InvalidWitness("prefix does not replay on the target system")
    return path


# ---------------------------------------------------------------------------
# Product construction
# ---------------------------------------------------------------------------


def product_of(
    components: Sequence[Component],
    silent: frozenset[str] = DEFAULT_SILENT,
    cap: int = DEFAULT_STATE_CAP,
) -> ExplicitLts:
    """Asynchronous product of the given components, reachable part only.

    Non-silent shared actions synchronise every component that uses them;
    silent and unshared actions interleave.  States are numbered in BFS
    discovery order, which is deterministic in the component and transition
    declaration order.  Raises StateLimitExceeded when more than ``cap``
    states are discovered.
    """
    comps = tuple(components)
    n = len(comps)
    moves = [c.moves for c in comps]
    sharers: dict[str, tuple[int, ...]] = {}
    for i, c in enumerate(comps):
        for act in c.acts:
            if act in silent:
                continue
            sharers[act] = sharers.get(act, ()) + (i,)

    init = tuple(c.initial for c in comps)
    ids: dict[tuple[str, ...], int] = {init: 0}
    payloads: list[tuple[str, ...]] = [init]
    queue: deque[tuple[str, ...]] = deque([init])
    transitions: list[Transition] = []

    def state_id(tup: tuple[str, ...]) -> int:
        sid = ids.get(tup)
        if sid is None:
            if len(ids) >= cap:
                raise StateLimitExceeded(cap, len(ids))
            sid = len(payloads)
            ids[tup] = sid
            payloads.append(tup)
            queue.append(tup)
        return sid

    while queue:
        src = queue.popleft()
        src_id = ids[src]
        for i in range(n):
            seen_shared: set[str] = set()
            for act, dst in moves[i][src[i]]:
                if act in silent or len(sharers[act]) == 1:
                    succ = src[:i] + (dst,) + src[i + 1:]
                    transitions.append(
                        Transition(src_id, act, state_id(succ), frozenset((i,))))
                    continue
                group = sharers[act]
                if group[0] != i or act in seen_shared:
                    continue
                seen_shared.add(act)
                options = []
                for j in group:
                    targets = [d for a, d in moves[j][src[j]] if a == act]
                    if not targets:
                        options = None
                        break
                    options.append(targets)
                if options is None:
                    continue
                for combo in itertools.product(*options):
                    succ_list = list(src)
                    for j, d in zip(group, combo):
                        succ_list[j] = d
                    transitions.append(
                        Transition(src_id, act, state_id(tuple(succ_list)), frozenset(group)))

    labels = [
        frozenset().union(*(comps[i].label_of(tup[i]) for i in range(n)))
        for tup in payloads
    ]
    return ExplicitLts(
        initial=0,
        transitions=transitions,
        labels=labels,
        payloads=[GlobalTuple(tup) for tup in payloads],
    )


def full_product(net: Network, cap: int = DEFAULT_STATE_CAP) -> ExplicitLts:
    """Reachable product of all network components, in network order."""
    return product_of(net.components, net.silent, cap)


def pair_product(
    a: Component,
    b: Component,
    silent: frozenset[str] = DEFAULT_SILENT,
    cap: int = DEFAULT_STATE_CAP,
) -> ExplicitLts:
    """Reachable product of two components; payloads are pairs (a, b)."""
    return product_of((a, b), silent, cap)


def component_lts(component: Component) -> ExplicitLts:
    """A component viewed as an explicit graph over its declared states."""
    ids = {s: i for i, s in enumerate(component.states)}
    transitions = [
        Transition(ids[src], act, ids[dst], frozenset((0,)))
        for src, act, dst in component.transitions
    ]
    return ExplicitLts(
        initial=ids[component.initial],
        transitions=transitions,
        labels=[component.label_of(s) for s in component.states],
        payloads=[GlobalTuple((s,)) for s in component.states],
    )


def lts_to_component(lts: ExplicitLts, name: str) -> Component:
    """Flatten an explicit graph into a single component named ``name``."""
    state_names = tuple(f"q{i}" for i in range(lts.n_states))
    return Component(
        name=name,
        states=state_names,
        initial=state_names[lts.initial],
        transitions=tuple(
            (state_names[t.src], t.action, state_names[t.dst]) for t in lts.transitions
        ),
        labels={state_names[i]: lts.labels[i] for i in range(lts.n_states) if lts.labels[i]},
    )


# ---------------------------------------------------------------------------
# Prefix construction and projection
# ---------------------------------------------------------------------------


def prefix_from_states(
    net: Network,
    states: Sequence[GlobalTuple | tuple[str, ...]],
    actions: Sequence[str],
) -> PathPrefix:
    """Build a product prefix from raw tuples, inferring who moved.

    Each step is checked against the component transition relations.  For a
    silent step the mover is the component whose coordinate changed; a
    silent self-loop is attributed to the unique component that can perform
    it, and an ambiguous silent self-loop is rejected.
    """
    tuples = [s.states if isinstance(s, GlobalTuple) else tuple(s) for s in states]
    if len(tuples) != len(actions) + 1:
        raise ValueError("a prefix needs exactly one more state than actions")
    n = len(net.components)
    for tup in tuples:
        if len(tup) != n:
            raise ValueError(f"state tuple {tup} does not match the network arity")
    sharers: dict[str, tuple[int, ...]] = {}
    for i, c in enumerate(net.components):
        for act in c.acts:
            if act in net.silent:
                continue
            sharers[act] = sharers.get(act, ()) + (i,)

    movers: list[frozenset[int]] = []
    for k, act in enumerate(actions):
        src, dst = tuples[k], tuples[k + 1]
        if act in net.silent:
            changed = [i for i in range(n) if src[i] != dst[i]]
            if len(changed) > 1:
                raise ValueError(f"silent step {k} moves several components")
            if changed:
                group: tuple[int, ...] = (changed[0],)
            else:
                loopers = tuple(
                    i for i in range(n)
                    if (src[i], act, src[i]) in net.components[i].transition_set
                )
                if len(loopers) != 1:
                    raise ValueError(
                        f"silent self-loop at step {k} cannot be attributed to one component")
                group = loopers
        else:
            group = sharers.get(act, ())
            if not group:
                raise ValueError(f"action {act!r} does not belong to the network")
        for i in range(n):
            if i in group:
                if (src[i], act, dst[i]) not in net.components[i].transition_set:
                    raise ValueError(
                        f"step {k}: ({src[i]!r}, {act!r}, {dst[i]!r}) is not a transition "
                        f"of component {net.components[i].name!r}")
            elif src[i] != dst[i]:
                raise ValueError(f"step {k}: component {net.components[i].name!r} moved "
                                 f"without participating in {act!r}")
        movers.append(frozenset(group))
    return PathPrefix(
        states=tuple(GlobalTuple(t) for t in tuples),
        actions=tuple(actions),
        movers=tuple(movers),
    )


def project_prefix(prefix: PathPrefix, selected: Iterable[int]) -> PathPrefix:
    """Project a product prefix onto a subset of components.

    Every state tuple is restricted to the selected coordinates.  A step is
    deleted together with its source state when none of the selected
    components took part in it; the final state is always kept.
    """
    sel = tuple(sorted(set(selected)))
    if not sel:
        raise EmptyProjection("cannot project onto an empty set of components")

    def shrink(payload: Payload) -> GlobalTuple:
        if not isinstance(payload, GlobalTuple):
            raise ValueError("projection is defined on product states only")
        return GlobalTuple(tuple(payload.states[i] for i in sel))

    sel_set = set(sel)
    states: list[GlobalTuple] = []
    actions: list[str] = []
    movers: list[frozenset[int]] = []
    for k, act in enumerate(prefix.actions):
        if prefix.movers[k] & sel_set:
            states.append(shrink(prefix.states[k]))
            actions.append(act)
            movers.append(prefix.movers[k] & sel_set)
    states.append(shrink(prefix.states[-1]))
    return PathPrefix(tuple(states), tuple(actions), tuple(movers))
