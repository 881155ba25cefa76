"""EF/EG checking over explicit graphs, with witness extraction and lifting.

Formulas are a single modality applied to a single atomic proposition:
reachability of labellings is what the reduction preserves, conjunctions
and nesting are not.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum

from .errors import InvalidWitness
from .model import Network
from .product import (
    ExplicitLts,
    FreshInit,
    GlobalTuple,
    Path,
    PathPrefix,
    SquareOrigin,
)
from .reduction import SumOfSquares


class Entry(Enum):
    """Where evaluation starts.

    INITIAL evaluates at the initial state.  EPSILON_TRANSPARENT is meant
    for sum-of-squares systems whose initial state is unlabelled glue: EF is
    unaffected (the glue step is an ordinary step), while EG is evaluated at
    the successors of the initial state instead of the initial state itself.
    """

    INITIAL = "initial"
    EPSILON_TRANSPARENT = "epsilon-transparent"


@dataclass(frozen=True)
class Formula:
    modality: str  # "EF" or "EG"
    proposition: str

    def __post_init__(self) -> None:
        if self.modality not in ("EF", "EG"):
            raise ValueError(f"unsupported modality {self.modality!r}")

    def __str__(self) -> str:
        return f"{self.modality} {self.proposition}"


@dataclass(frozen=True)
class Verdict:
    """Outcome of a check; the witness replays on the checked system.

    For EF the witness is a shortest path ending in a state carrying the
    proposition.  For EG it is a lasso: the final state closes a cycle with
    an earlier one and every state on the path carries the proposition.
    """

    holds: bool
    witness: Path | None = None


def check(lts: ExplicitLts, formula: Formula, entry: Entry = Entry.INITIAL) -> Verdict:
    if formula.modality == "EF":
        return check_ef(lts, formula.proposition, entry)
    return check_eg(lts, formula.proposition, entry)


def check_ef(lts: ExplicitLts, proposition: str, entry: Entry = Entry.INITIAL) -> Verdict:
    """Can a state carrying ``proposition`` be reached?

    BFS from the initial state; the witness is a shortest path.  A
    proposition that occurs nowhere simply yields a negative verdict.  Both
    entry modes coincide for EF.
    """
    del entry  # the glue step is an ordinary step for reachability
    if proposition in lts.labels[lts.initial]:
        return Verdict(True, Path((lts.initial,), ()))
    back: dict[int, tuple[int, str]] = {}
    seen = {lts.initial}
    queue = deque([lts.initial])
    while queue:
        u = queue.popleft()
        for t in lts.out(u):
            if t.dst in seen:
                continue
            seen.add(t.dst)
            back[t.dst] = (u, t.action)
            if proposition in lts.labels[t.dst]:
                return Verdict(True, _backtrack(back, lts.initial, t.dst))
            queue.append(t.dst)
    return Verdict(False)


def _backtrack(back: dict[int, tuple[int, str]], start: int, goal: int) -> Path:
    states = [goal]
    actions: list[str] = []
    while states[-1] != start:
        prev, act = back[states[-1]]
        actions.append(act)
        states.append(prev)
    return Path(tuple(reversed(states)), tuple(reversed(actions)))


def check_eg(lts: ExplicitLts, proposition: str, entry: Entry = Entry.INITIAL) -> Verdict:
    """Is there an infinite path along which ``proposition`` always holds?

    Equivalent to reaching a cycle inside the subgraph of labelled states.
    Deadlocked labelled states do not satisfy EG (runs are infinite, no
    stuttering is added).  With EPSILON_TRANSPARENT entry the check is run
    from each successor of the initial state, skipping the unlabelled glue
    state itself.
    """
    in_p = [proposition in lab for lab in lts.labels]
    if entry is Entry.INITIAL:
        entries = [lts.initial]
    else:
        entries = list(dict.fromkeys(t.dst for t in lts.out(lts.initial)))
    for e in entries:
        if not in_p[e]:
            continue
        lasso = _find_lasso(lts, e, in_p)
        if lasso is not None:
            return Verdict(True, lasso)
    return Verdict(False)


def _find_lasso(lts: ExplicitLts, start: int, in_p: list[bool]) -> Path | None:
    """DFS inside the labelled subgraph; returns stem plus closed cycle."""
    path_nodes = [start]
    path_acts: list[str] = []
    on_path = {start}
    next_branch = [0]
    finished: set[int] = set()
    while path_nodes:
        node = path_nodes[-1]
        outs = lts.out(node)
        advanced = False
        while next_branch[-1] < len(outs):
            t = outs[next_branch[-1]]
            next_branch[-1] += 1
            if not in_p[t.dst]:
                continue
            if t.dst in on_path:
                return Path(tuple(path_nodes) + (t.dst,), tuple(path_acts) + (t.action,))
            if t.dst in finished:
                continue
            path_nodes.append(t.dst)
            path_acts.append(t.action)
            on_path.add(t.dst)
            next_branch.append(0)
            advanced = True
            break
        if not advanced:
            finished.add(node)
            on_path.discard(node)
            path_nodes.pop()
            if path_acts:
                path_acts.pop()
            next_branch.pop()
    return None


def lift_witness(sq: SumOfSquares, net: Network, path: Path) -> PathPrefix:
    """Map a reachability witness of a sum-of-squares onto global states.

    ``net`` must be the two-level network ``sq`` was built from.  The glue
    step is dropped; every square state becomes the global tuple placing the
    root and the active child at their square coordinates and every other
    component at its initial state.  A handoff step is valid globally
    because the active child resets when synchronising upward.

    Raises InvalidWitness when a step has no corresponding global move.
    """
    lts = sq.lts
    r = net.root_index
    payloads = [lts.payloads[s] for s in path.states]
    actions = list(path.actions)
    if payloads and isinstance(payloads[0], FreshInit):
        if len(payloads) > 1:
            if actions[0] != sq.epsilon:
                raise InvalidWitness("the glue state must be left via its own silent action")
            payloads = payloads[1:]
            actions = actions[1:]
        else:
            # a zero-length path at the glue state lifts to the global start
            return PathPrefix(
                (GlobalTuple(tuple(c.initial for c in net.components)),), (), ())

    def globalise(p: SquareOrigin) -> GlobalTuple:
        coords = [c.initial for c in net.components]
        coords[r] = p.root_state
        coords[p.child_index] = p.child_state
        return GlobalTuple(tuple(coords))

    for p in payloads:
        if not isinstance(p, SquareOrigin):
            raise InvalidWitness(f"state {p} is not a square state")

    states = [globalise(p) for p in payloads]
    movers: list[frozenset[int]] = []
    for k, act in enumerate(actions):
        src, dst = payloads[k], payloads[k + 1]
        i, cs, rs = src.child_index, src.child_state, src.root_state
        j, cs2, rs2 = dst.child_index, dst.child_state, dst.root_state
        child = net.components[i]
        root = net.components[r]
        if (i == j and rs == rs2 and act in net.locacts[i]
                and (cs, act, cs2) in child.transition_set):
            movers.append(frozenset((i,)))
        elif (i == j and cs == cs2 and act in (net.locacts[r] | net.upacts[r])
                and (rs, act, rs2) in root.transition_set):
            movers.append(frozenset((r,)))
        elif (act in net.upacts[i]
                and cs2 == net.components[j].initial
                and (cs, act, child.initial) in child.transition_set
                and (rs, act, rs2) in root.transition_set):
            movers.append(frozenset((i, r)))
        else:
            raise InvalidWitness(
                f"step {k} ({src} -{act}-> {dst}) has no corresponding global move")
    return PathPrefix(tuple(states), tuple(actions), tuple(movers))
