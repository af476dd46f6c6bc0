"""Greedy per-cell transmit-power reduction under a fixed sub-band mask.

Starting from the full budget, the cell whose worst user has the most rate
headroom is trimmed one step at a time; a step that pushes any user in any
cell below r_min is rolled back and that cell is parked.  Trimming one cell
lowers the interference seen everywhere else, so parked cells are released
whenever another cell's power changes and may be trimmed again later.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .radio import NetworkConfig, Topology, evaluate_links, full_power

POWER_FLOOR_DBM = 0.0  # hard lower bound per cell, termination guarantee


class InfeasibleAtFullPower(ValueError):
    """The mask cannot satisfy every user even at the full power budget."""


@dataclass(frozen=True)
class PowerTraceRecord:
    """One accepted operating point; iteration 0 is the full-power start."""

    iteration: int
    cell: int                  # trimmed cell, -1 for the initial record
    powers: np.ndarray         # (K,) dBm
    rate_per_user: np.ndarray  # (K*U,) bits/s


def _per_cell_min_rate(rates: np.ndarray, association: np.ndarray, num_cells: int):
    """Worst served-user rate per cell; +inf for cells serving nobody."""
    mins = np.full(num_cells, np.inf)
    for k in range(num_cells):
        served = rates[association == k]
        if served.size:
            mins[k] = served.min()
    return mins


def reduce_power(topology: Topology, beta: np.ndarray, config: NetworkConfig,
                 p_step: float = 0.5):
    """Greedy power trimming; returns (final power vector, accepted trace).

    Raises InfeasibleAtFullPower when the mask cannot meet r_min at the full
    budget.  The result is feasible and locally minimal: one further step on
    any single cell would push some user below r_min (or through the power
    floor).
    """
    if p_step <= 0:
        raise ValueError("p_step must be positive")
    powers = full_power(config)
    links = evaluate_links(topology, beta, powers, config)
    if np.any(links.rate_per_user < config.r_min):
        worst = int(np.argmin(links.rate_per_user))
        raise InfeasibleAtFullPower(
            f"user {worst} reaches only {links.rate_per_user[worst] / 1e6:.3f} Mbps "
            f"at full power (r_min {config.r_min / 1e6:.3f} Mbps)")

    trace = [PowerTraceRecord(0, -1, powers.copy(), links.rate_per_user.copy())]
    parked: set[int] = set()
    iteration = 0
    while len(parked) < config.num_cells:
        rates = links.rate_per_user
        mins = _per_cell_min_rate(rates, topology.association, config.num_cells)
        candidates = [k for k in range(config.num_cells) if k not in parked]
        target = max(candidates, key=lambda k: (mins[k], -k))
        if powers[target] - p_step < POWER_FLOOR_DBM:
            parked.add(target)
            continue
        trial = powers.copy()
        trial[target] -= p_step
        trial_links = evaluate_links(topology, beta, trial, config)
        if np.any(trial_links.rate_per_user < config.r_min):
            parked.add(target)
            continue
        powers, links = trial, trial_links
        parked.clear()
        iteration += 1
        trace.append(PowerTraceRecord(iteration, target, powers.copy(),
                                      links.rate_per_user.copy()))
    return powers, trace
