"""Distributed tree construction as message-passing state machines.

Each sensor only knows its one-hop neighborhood (residual energies and
edge weights).  Tree construction accretes one node per iteration: tree
nodes convergecast their best frontier candidate to the BS, the BS picks
the global maximum and broadcasts the attachment.  The broadcast also
carries the updated minimum expected lifetime so every node scores
candidates with the same total order as the centralized builder; the
resulting tree is bit-identical to build_greedy_maxmin.

A synchronous harness delivers all messages in lockstep ticks; one tick
is one "step" for the step-count bound.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .energy import RadioParams, edge_weight, rx_cost, tx_cost
from .errors import Disconnected, InsufficientEnergy, ProtocolViolation
from .schedule import RoutingTree
from .topology import TopologyGraph

OUT_OF_TREE = "OutOfTree"
IN_TREE = "InTree"

CANDIDATE_TUPLE = "CandidateTuple"
ATTACH_ANNOUNCE = "AttachAnnounce"

# (parent_cand, L_parent_after, child_cand, L_child_new) with no candidate
NONE_TUPLE = (-1, -math.inf, -1, -math.inf)


@dataclass(frozen=True)
class ProtocolMessage:
    kind: str
    sender: int
    payload: tuple


@dataclass
class BuildTrace:
    steps: int = 0
    messages: int = 0
    attach_sequence: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {
                "steps": self.steps,
                "messages": self.messages,
                "attach_sequence": [[c, p] for c, p in self.attach_sequence],
            }
        )


def _score(tup, l_min_known):
    """Centralized attachment score of a candidate tuple."""
    _, l_parent_after, _, l_child_new = tup
    return min(l_parent_after, l_child_new, l_min_known)


def _better(a, b, l_min_known):
    """Total order over candidate tuples: score desc, child asc, parent asc."""
    sa, sb = _score(a, l_min_known), _score(b, l_min_known)
    if sa != sb:
        return sa > sb
    if a[2] != b[2]:
        return a[2] < b[2]
    return a[0] < b[0]


class NodeActor:
    """Per-node protocol state; the harness owns and steps actors."""

    def __init__(self, node_id, is_bs, neighbor_view, residual, rx):
        self.id = node_id
        self.is_bs = is_bs
        self.status = IN_TREE if is_bs else OUT_OF_TREE
        self.parent = None
        self.in_neighbors = set()  # children in the tree
        self.cached_candidate = None
        self.neighbor_view = neighbor_view  # j -> (weight, neighbor residual)
        self._neighbor_order = sorted(neighbor_view)
        self.residual = residual
        self.rx = rx
        self.parent_weight = None
        self.in_tree_neighbors = set()  # neighbors known to be in the tree
        self.l_min_known = math.inf
        # per-iteration convergecast state
        self.child_tuples = {}
        self.sent = False

    def _own_candidate(self):
        """Best OutOfTree neighbor to hang below this node, or NONE_TUPLE."""
        if self.is_bs:
            li_after = math.inf
        else:
            li_after = self.residual / (
                (len(self.in_neighbors) + 1) * self.rx + self.parent_weight
            )
        best = NONE_TUPLE
        for j in self._neighbor_order:
            if j in self.in_tree_neighbors:
                continue
            w, res_j = self.neighbor_view[j]
            cand = (self.id, li_after, j, res_j / w)
            if best is NONE_TUPLE or _better(cand, best, self.l_min_known):
                best = cand
        return best

    def _fold(self):
        best = self._own_candidate()
        for tup in self.child_tuples.values():
            if _better(tup, best, self.l_min_known):
                best = tup
        self.cached_candidate = best
        return best

    def _ready(self):
        return (
            self.status == IN_TREE
            and not self.sent
            and len(self.child_tuples) == len(self.in_neighbors)
        )

    def _absorb(self, msg):
        if msg.kind == ATTACH_ANNOUNCE:
            child, parent, l_min = msg.payload
            if child in self.neighbor_view:
                self.in_tree_neighbors.add(child)
            self.l_min_known = l_min
            if parent == self.id:
                self.in_neighbors.add(child)
            if child == self.id:
                self.parent = parent
                self.parent_weight = self.neighbor_view[parent][0]
                self.status = IN_TREE
            self.child_tuples = {}
            self.sent = False
            self.cached_candidate = None
        elif msg.kind == CANDIDATE_TUPLE:
            if msg.sender not in self.in_neighbors:
                raise ProtocolViolation(
                    f"node {self.id} got a tuple from non-child {msg.sender}"
                )
            self.child_tuples[msg.sender] = msg.payload
        else:
            raise ProtocolViolation(f"unknown message kind {msg.kind!r}")


def node_step(actor: NodeActor, inbox):
    """Advance one sensor by one synchronous tick.

    Returns (actor, outbox) where outbox holds (destination, message)
    pairs.  OutOfTree sensors never emit anything.
    """
    for msg in inbox:
        actor._absorb(msg)
    outbox = []
    if not actor.is_bs and actor._ready():
        tup = actor._fold()
        outbox.append(
            (actor.parent, ProtocolMessage(CANDIDATE_TUPLE, actor.id, tup))
        )
        actor.sent = True
    return actor, outbox


def bs_step(bs: NodeActor, inbox):
    """Advance the BS; returns (bs, announce-or-None).

    Once every child reported, the BS folds the reports with its own
    local candidates and broadcasts the winning attachment together with
    the updated minimum expected lifetime.
    """
    for msg in inbox:
        bs._absorb(msg)
    if not bs._ready():
        return bs, None
    best = bs._fold()
    if best[2] < 0:
        raise Disconnected("no attachable sensor remains")
    parent_cand, l_parent_after, child_cand, l_child_new = best
    l_min_new = min(bs.l_min_known, l_parent_after, l_child_new)
    bs.sent = True
    return bs, ProtocolMessage(
        ATTACH_ANNOUNCE, bs.id, (child_cand, parent_cand, l_min_new)
    )


def make_actors(g: TopologyGraph, ledger, p: RadioParams):
    rx = rx_cost(p)
    actors = []
    for i in range(g.node_count):
        view = {}
        for j, d in g.neighbors(i):
            res_j = ledger[j] if j != g.bs else math.inf
            view[j] = (edge_weight(p, d), res_j)
        res_i = ledger[i] if i != g.bs else math.inf
        actor = NodeActor(i, i == g.bs, view, res_i, rx)
        if g.bs in view:
            # the root is in the tree from the outset, never a candidate child
            actor.in_tree_neighbors.add(g.bs)
        actors.append(actor)
    return actors


def run_distributed_build(
    g: TopologyGraph, ledger, p: RadioParams, charge_messages=False
):
    """Drive the synchronous protocol to a full tree.

    Returns (RoutingTree, BuildTrace).  With charge_messages=True, every
    candidate tuple is billed as a full k-bit packet (transmit cost for
    the sender over that edge, receive cost for the parent) and drained
    from the ledger after the build; BS broadcasts stay free.
    """
    actors = make_actors(g, ledger, p)
    bs = g.bs
    trace = BuildTrace()
    pending = {}  # destination -> list of messages this tick
    attach_count = 0
    msg_energy = [0.0] * g.n
    step_limit = 10 * g.n * g.n + 100

    # Bootstrap tick: only the BS can act (it has no children yet).
    first_tick = True
    while attach_count < g.n:
        if trace.steps > step_limit:
            raise ProtocolViolation("step limit exceeded; protocol is stuck")
        trace.steps += 1
        inboxes, pending = pending, {}
        announce = None
        targets = range(g.node_count) if first_tick else sorted(inboxes)
        first_tick = False
        for i in targets:
            inbox = inboxes.get(i, [])
            if i == bs:
                _, announce = bs_step(actors[i], inbox)
            else:
                _, outbox = node_step(actors[i], inbox)
                for dest, msg in outbox:
                    pending.setdefault(dest, []).append(msg)
                    trace.messages += 1
                    if charge_messages:
                        d = g.distance(msg.sender, dest)
                        msg_energy[msg.sender] += tx_cost(p, d)
                        if dest != bs:
                            msg_energy[dest] += rx_cost(p)
        if announce is not None:
            child, parent, _ = announce.payload
            trace.attach_sequence.append((child, parent))
            attach_count += 1
            trace.messages += 1
            # BS control broadcasts reach every node directly (including a
            # self-delivery so the BS resets its own iteration state).
            for i in range(g.node_count):
                pending.setdefault(i, []).append(announce)

    parent_map = {child: parent for child, parent in trace.attach_sequence}
    tree = RoutingTree.from_parent_map(bs, parent_map)

    if charge_messages:
        for i in range(g.n):
            if msg_energy[i] > 0:
                ledger.drain(i, msg_energy[i])
    return tree, trace
