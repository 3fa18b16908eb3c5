"""Round-driven data-gathering engine with dynamic rescheduling.

A trial runs rounds on the active tree until the first sensor cannot
afford its round cost.  Under the LDS scheduler the BS additionally
triggers a rebuild at round max(1, floor(L_min/2) - kappa): the next
kappa rounds carry the piggyback overhead, then the tree is rebuilt on
the now-current residual energies and the round counter restarts.

The hot drain loop runs in the kernel backend; the per-round
``run_round`` path is arithmetic-identical and is used when tracing.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import drain_rounds
from .energy import EnergyLedger, RadioParams, rx_cost
from .errors import InsufficientEnergy, NodeDeath
from .protocol import run_distributed_build
from .schedule import (
    RoutingTree,
    build_greedy_maxmin,
    build_mst,
    build_spt,
    min_expected_lifetime,
    round_cost,
    tree_depth,
)
from .topology import TopologyGraph

LDS = "lds"
WRT_STATIC = "wrt"
MST = "mst"
SPT = "spt"
SCHEDULERS = (LDS, WRT_STATIC, MST, SPT)

DEFAULT_PIGGYBACK_OVERHEAD = 0.10


@dataclass(frozen=True)
class SimConfig:
    scheduler: str = LDS
    piggyback_overhead: float = DEFAULT_PIGGYBACK_OVERHEAD
    radio: RadioParams = field(default_factory=RadioParams.default)
    initial_energy: float = 0.25
    charge_build_messages: bool = False

    def __post_init__(self):
        if self.scheduler not in SCHEDULERS:
            raise ValueError(f"unknown scheduler {self.scheduler!r}")
        if self.piggyback_overhead < 0:
            raise ValueError("piggyback overhead must be non-negative")


@dataclass
class RoundReport:
    costs: np.ndarray
    inflated: bool


@dataclass
class SimState:
    tree: RoutingTree
    ledger: EnergyLedger
    r: int  # rounds completed under the current schedule
    total_rounds: int
    l_min_current: float
    kappa: int
    countdown: int | None = None  # piggyback rounds left before the switch
    pending_tree: RoutingTree | None = None
    base_cost: np.ndarray | None = None
    inflated_cost: np.ndarray | None = None


def _cost_vectors(tree, p, g, overhead):
    base = np.array([round_cost(i, tree, p, g) for i in range(g.n)])
    return base, base * (1.0 + overhead)


def _install_tree(state, tree, cfg, g):
    est = min_expected_lifetime(tree, state.ledger, cfg.radio, g)
    state.tree = tree
    state.r = 0
    state.l_min_current = est.l_min
    state.kappa = tree_depth(tree)
    state.countdown = None
    state.pending_tree = None
    state.base_cost, state.inflated_cost = _cost_vectors(
        tree, cfg.radio, g, cfg.piggyback_overhead
    )
    return est


def build_initial_tree(g: TopologyGraph, cfg: SimConfig, ledger: EnergyLedger):
    if cfg.scheduler in (LDS, WRT_STATIC):
        if cfg.charge_build_messages:
            tree, _ = run_distributed_build(g, ledger, cfg.radio, charge_messages=True)
            return tree
        return build_greedy_maxmin(g, ledger, cfg.radio)
    if cfg.scheduler == MST:
        return build_mst(g, cfg.radio)
    return build_spt(g, cfg.radio)


def run_round(state: SimState, cfg: SimConfig):
    """Charge every sensor one round on the active tree.

    Raises NodeDeath (round not executed) if any sensor cannot afford
    its cost; the dead node is the smallest unaffordable id.
    """
    inflated = bool(state.countdown)
    cost = state.inflated_cost if inflated else state.base_cost
    short = np.flatnonzero(state.ledger.residual < cost)
    if len(short):
        raise NodeDeath(int(short[0]))
    state.ledger.residual -= cost
    state.ledger.drained += cost
    state.r += 1
    state.total_rounds += 1
    if inflated:
        state.countdown -= 1
    return state, RoundReport(costs=cost, inflated=inflated)


def check_reschedule_trigger(state: SimState, cfg: SimConfig) -> bool:
    """LDS trigger: at round max(1, floor(L_min/2) - kappa), guarded by
    L_min > kappa (no rebuild when the network is about to expire)."""
    if cfg.scheduler != LDS or state.countdown is not None:
        return False
    if state.l_min_current <= state.kappa:
        return False
    target = max(1, math.floor(state.l_min_current / 2) - state.kappa)
    return state.r == target


def execute_reschedule(state: SimState, cfg: SimConfig, g: TopologyGraph):
    """Run the kappa piggyback rounds on the old tree, then switch.

    The rebuild runs on post-kappa residuals, so the new tree reflects
    the energy actually left when it takes over.  Propagates NodeDeath
    if a sensor dies during the piggyback phase.
    """
    state.countdown = state.kappa
    while state.countdown:
        run_round(state, cfg)
    state.pending_tree = build_greedy_maxmin(g, state.ledger, cfg.radio)
    est = _install_tree(state, state.pending_tree, cfg, g)
    return state, est


@dataclass
class TrialResult:
    lifetime_rounds: int
    reschedule_count: int
    history: list  # (switch round, new l_min, new kappa)
    first_dead_node: int
    energy_audit: tuple  # (drained_total, residual snapshot)
    l_min_initial: float
    kappa_initial: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "lifetime_rounds": self.lifetime_rounds,
                "reschedule_count": self.reschedule_count,
                "history": [[r, l, k] for r, l, k in self.history],
                "first_dead_node": self.first_dead_node,
                "drained_total": self.energy_audit[0],
                "residual": self.energy_audit[1],
                "l_min_initial": self.l_min_initial,
                "kappa_initial": self.kappa_initial,
            }
        )


def run_trial(g: TopologyGraph, cfg: SimConfig, seed=0, trace_hook=None) -> TrialResult:
    """Run one full trial to first node death.

    ``trace_hook(round_index, costs, residual)`` switches to the
    per-round path and is called after every completed round; without it
    the kernel drain loop fast-forwards between schedule events.  Both
    paths perform identical arithmetic.
    """
    ledger = EnergyLedger(g.n, cfg.initial_energy)
    history = []
    reschedules = 0
    try:
        tree = build_initial_tree(g, cfg, ledger)
    except InsufficientEnergy as e:
        return TrialResult(0, 0, [], e.node, (ledger.drained_total, ledger.snapshot()), 0.0, 0)

    state = SimState(
        tree=tree, ledger=ledger, r=0, total_rounds=0,
        l_min_current=0.0, kappa=0,
    )
    est = _install_tree(state, tree, cfg, g)
    l_min_initial, kappa_initial = est.l_min, state.kappa

    def finish(dead):
        return TrialResult(
            lifetime_rounds=state.total_rounds,
            reschedule_count=reschedules,
            history=history,
            first_dead_node=dead,
            energy_audit=(ledger.drained_total, ledger.snapshot()),
            l_min_initial=l_min_initial,
            kappa_initial=kappa_initial,
        )

    if trace_hook is not None:
        while True:
            try:
                if check_reschedule_trigger(state, cfg):
                    state.countdown = state.kappa
                    while state.countdown:
                        _, report = run_round(state, cfg)
                        trace_hook(state.total_rounds, report.costs, ledger.residual)
                    new_tree = build_greedy_maxmin(g, ledger, cfg.radio)
                    new_est = _install_tree(state, new_tree, cfg, g)
                    reschedules += 1
                    history.append((state.total_rounds, new_est.l_min, state.kappa))
                else:
                    _, report = run_round(state, cfg)
                    trace_hook(state.total_rounds, report.costs, ledger.residual)
            except NodeDeath as e:
                return finish(e.node)

    while True:
        can_reschedule = cfg.scheduler == LDS and state.l_min_current > state.kappa
        if can_reschedule:
            target = max(1, math.floor(state.l_min_current / 2) - state.kappa)
            done, dead = drain_rounds(
                ledger.residual, ledger.drained, state.base_cost, target - state.r
            )
            state.r += done
            state.total_rounds += done
            if dead >= 0:
                return finish(dead)
            done, dead = drain_rounds(
                ledger.residual, ledger.drained, state.inflated_cost, state.kappa
            )
            state.total_rounds += done
            if dead >= 0:
                return finish(dead)
            new_tree = build_greedy_maxmin(g, ledger, cfg.radio)
            new_est = _install_tree(state, new_tree, cfg, g)
            reschedules += 1
            history.append((state.total_rounds, new_est.l_min, state.kappa))
        else:
            done, dead = drain_rounds(
                ledger.residual, ledger.drained, state.base_cost, -1
            )
            state.r += done
            state.total_rounds += done
            return finish(dead)


def reschedule_count_model(l_min_initial: float) -> int:
    """Reference reschedule count: round(log2 of the initial L_min).

    Reporting aid only; the simulator never consults it."""
    if l_min_initial <= 1:
        return 0
    return round(math.log2(l_min_initial))
