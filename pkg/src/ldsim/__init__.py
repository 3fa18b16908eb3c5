"""Lifetime-maximizing data-gathering schedules for multihop WSNs.

Subpackages:
  topology  -- random deployments and the range-limited topology graph
  energy    -- radio cost model and residual-energy ledger
  schedule  -- routing trees, lifetime formulas, tree builders, oracles
  protocol  -- distributed tree construction (message-passing actors)
  sim       -- round-driven engine with half-life dynamic rescheduling
  bench     -- CLI, sweeps, CSV persistence, statistics
"""

from ._backend import BACKEND
from .errors import (
    ConnectivityFailure,
    Disconnected,
    InsufficientEnergy,
    LdsimError,
    NodeDeath,
    ProtocolViolation,
    TooLarge,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ConnectivityFailure",
    "Disconnected",
    "InsufficientEnergy",
    "LdsimError",
    "NodeDeath",
    "ProtocolViolation",
    "TooLarge",
    "__version__",
]
