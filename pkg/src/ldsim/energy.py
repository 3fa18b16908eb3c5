"""First-order radio energy model and per-node residual-energy bookkeeping.

All quantities are SI: joules and meters.  Receiving a k-bit packet costs
``eps_elec * k``; transmitting it over distance d additionally costs
``eps_amp * k * d**2`` for the amplifier.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientEnergy

# Simulation constants used throughout the experiments (converted to SI):
# 50 nJ/bit electronics, 100 pJ/bit/m^2 amplifier, 2000-bit packets,
# 0.25 J initial battery.
DEFAULT_EPS_ELEC_NJ = 50.0
DEFAULT_EPS_AMP_PJ = 100.0
DEFAULT_PACKET_BITS = 2000
DEFAULT_INITIAL_ENERGY_J = 0.25


@dataclass(frozen=True)
class RadioParams:
    eps_elec: float  # J/bit
    eps_amp: float  # J/bit/m^2
    k: int  # packet size, bits

    def __post_init__(self):
        if self.eps_elec < 0 or self.eps_amp < 0 or self.k < 0:
            raise ValueError("radio parameters must be non-negative")

    @classmethod
    def default(cls) -> "RadioParams":
        # divide by the exact power of ten so 50 nJ/bit is exactly 50e-9
        return cls(
            eps_elec=DEFAULT_EPS_ELEC_NJ / 1e9,
            eps_amp=DEFAULT_EPS_AMP_PJ / 1e12,
            k=DEFAULT_PACKET_BITS,
        )

    @classmethod
    def from_config(cls, cfg: dict) -> "RadioParams":
        """Build from flat key=value config; unit suffixes are normalized."""
        return cls(
            eps_elec=float(cfg.get("eps_elec_nj_per_bit", DEFAULT_EPS_ELEC_NJ)) / 1e9,
            eps_amp=float(cfg.get("eps_amp_pj_per_bit_m2", DEFAULT_EPS_AMP_PJ)) / 1e12,
            k=int(cfg.get("packet_bits", DEFAULT_PACKET_BITS)),
        )


def rx_cost(p: RadioParams) -> float:
    """Energy to receive one k-bit packet."""
    return p.eps_elec * p.k


def tx_cost(p: RadioParams, d: float) -> float:
    """Energy to transmit one k-bit packet over distance d."""
    if d < 0:
        raise ValueError("distance must be non-negative")
    return rx_cost(p) + p.eps_amp * p.k * d * d


def edge_weight(p: RadioParams, d: float) -> float:
    """Weight w_ij of a topology edge: the transmit cost across it."""
    return tx_cost(p, d)


def edge_weights_array(p: RadioParams, dists: np.ndarray) -> np.ndarray:
    """Vectorized ``edge_weight`` with the same operation order."""
    return rx_cost(p) + p.eps_amp * p.k * dists * dists


class EnergyLedger:
    """Residual energy per sensor; the BS has no entry.

    Drains are all-or-nothing: an unaffordable drain raises
    InsufficientEnergy and leaves the ledger untouched.
    """

    def __init__(self, n: int, initial: float):
        if n < 1:
            raise ValueError("need at least one sensor")
        if initial < 0:
            raise ValueError("initial energy must be non-negative")
        self.initial = float(initial)
        self.residual = np.full(n, float(initial))
        self.drained = np.zeros(n)

    @property
    def n(self) -> int:
        return len(self.residual)

    @property
    def drained_total(self) -> float:
        return float(self.drained.sum())

    def __getitem__(self, node: int) -> float:
        return float(self.residual[node])

    def drain(self, node: int, amount: float) -> None:
        if amount < 0:
            raise ValueError("drain amount must be non-negative")
        if self.residual[node] < amount:
            raise InsufficientEnergy(node, amount, float(self.residual[node]))
        self.residual[node] -= amount
        self.drained[node] += amount

    def snapshot(self) -> list:
        return self.residual.tolist()


def parse_config_file(path) -> dict:
    """Read a flat key=value config file; '#' starts a comment."""
    cfg = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"malformed config line: {raw.strip()!r}")
            key, val = line.split("=", 1)
            cfg[key.strip()] = val.strip()
    return cfg
