"""Brute-force baselines for small instances.

Exhaustive enumeration of every mask matrix and of the full per-cell power
lattice, deliberately without pruning: these exist to validate the learned
policy and the greedy power stage, so their only virtue is being obviously
correct.  Enumeration is chunk-vectorized but ordered, so results equal the
naive sequential scan.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .power import InfeasibleAtFullPower, POWER_FLOOR_DBM
from .radio import (CQI_EFFICIENCY, CQI_SNR_THRESHOLDS_DB, NetworkConfig,
                    Topology, channel_gains_db, dbm_to_mw, evaluate_links,
                    full_power)

MAX_MASK_BITS = 20   # enumeration cap: 2^20 masks
MAX_GRID_CELLS = 3   # power lattice cap: levels^K combinations
_CHUNK = 8192


class InstanceTooLarge(ValueError):
    """Instance exceeds the brute-force caps."""


def mask_from_id(mask_id: int, num_cells: int, num_subbands: int) -> np.ndarray:
    """Mask id -> (K, N) matrix; ascending id is ascending lexicographic
    order of the row-major flattened bits."""
    bits = num_cells * num_subbands
    flat = (mask_id >> np.arange(bits - 1, -1, -1)) & 1
    return flat.reshape(num_cells, num_subbands).astype(np.int8)


def mask_to_id(beta: np.ndarray) -> int:
    flat = np.asarray(beta).ravel()
    return int(sum(int(v) << (flat.size - 1 - j) for j, v in enumerate(flat)))


@dataclass
class OracleResult:
    """Full enumeration outcome at the full power budget."""

    num_cells: int
    num_subbands: int
    feasible_ids: np.ndarray     # mask ids with every user at >= r_min
    best_mask: np.ndarray | None  # feasible mask with the largest total rate
    best_total_rate: float       # bits/s, 0 when nothing is feasible
    min_user_rate: np.ndarray    # (2^(K*N),) worst-user rate per mask, bits/s
    total_rate: np.ndarray       # (2^(K*N),) network rate per mask, bits/s

    @property
    def feasible_masks(self) -> list[np.ndarray]:
        return [mask_from_id(int(i), self.num_cells, self.num_subbands)
                for i in self.feasible_ids]

    def is_feasible(self, beta: np.ndarray) -> bool:
        return mask_to_id(beta) in set(int(i) for i in self.feasible_ids)

    @property
    def max_min_user_rate(self) -> float:
        """Best achievable worst-user rate over every mask, bits/s."""
        return float(self.min_user_rate.max())


def _link_terms(topology: Topology, config: NetworkConfig):
    """Per-UE linear signal and per-cell interference terms at full power."""
    gains = channel_gains_db(topology.ap_positions, topology.ue_positions, config)
    per_band = config.p_max - 10.0 * np.log10(config.num_subbands) + gains
    contrib = dbm_to_mw(per_band).T                  # (K*U, K) mW
    serving = topology.association
    signal = contrib[np.arange(config.num_users), serving]
    noise = dbm_to_mw(config.noise_power_dbm())
    return contrib, signal, serving, noise


def _rates_for_masks(bits, contrib, signal, serving, noise, config):
    """Per-user rates (M, K*U) for a block of masks bits (M, K, N)."""
    interference = np.einsum("uk,mkn->mun", contrib, bits)
    own = bits[:, serving, :] * signal[None, :, None]
    sinr_db = 10.0 * np.log10(signal[None, :, None] / (interference - own + noise))
    cqi = np.searchsorted(CQI_SNR_THRESHOLDS_DB, sinr_db, side="right")
    rate = CQI_EFFICIENCY[cqi] * config.subband_bandwidth
    return np.sum(bits[:, serving, :] * rate, axis=2)


def exhaustive_mask_search(topology: Topology, config: NetworkConfig) -> OracleResult:
    """Classify all 2^(K*N) masks by feasibility at the full power budget.

    Best mask maximizes total network rate among feasible masks; ties go to
    the lexicographically smallest flattened mask.
    """
    bits_total = config.num_cells * config.num_subbands
    if bits_total > MAX_MASK_BITS:
        raise InstanceTooLarge(
            f"{bits_total} mask bits exceed the 2^{MAX_MASK_BITS} enumeration cap")
    contrib, signal, serving, noise = _link_terms(topology, config)
    shifts = np.arange(bits_total - 1, -1, -1)

    n_masks = 1 << bits_total
    min_user_rate = np.empty(n_masks)
    total_rate = np.empty(n_masks)
    feasible_ids = []
    best_id, best_total = None, 0.0
    for start in range(0, n_masks, _CHUNK):
        ids = np.arange(start, min(start + _CHUNK, n_masks))
        bits = ((ids[:, None] >> shifts) & 1).astype(float)
        bits = bits.reshape(-1, config.num_cells, config.num_subbands)
        user_rates = _rates_for_masks(bits, contrib, signal, serving, noise, config)
        min_user_rate[ids] = user_rates.min(axis=1)
        total_rate[ids] = user_rates.sum(axis=1)
        ok = min_user_rate[ids] >= config.r_min
        feasible_ids.append(ids[ok])
        if np.any(ok):
            chunk_best = ids[ok][np.argmax(total_rate[ids][ok])]
            if best_id is None or total_rate[chunk_best] > best_total:
                best_id, best_total = int(chunk_best), float(total_rate[chunk_best])

    feasible_ids = np.concatenate(feasible_ids)
    best_mask = None
    if best_id is not None:
        best_mask = mask_from_id(best_id, config.num_cells, config.num_subbands)
    return OracleResult(num_cells=config.num_cells,
                        num_subbands=config.num_subbands,
                        feasible_ids=feasible_ids, best_mask=best_mask,
                        best_total_rate=best_total,
                        min_user_rate=min_user_rate, total_rate=total_rate)


def power_grid_search(topology: Topology, beta: np.ndarray, config: NetworkConfig,
                      p_step: float = 0.5) -> np.ndarray:
    """Minimal feasible power vector on the per-cell lattice, by full scan.

    Minimizes the dBm sum; ties go to the lexicographically smallest vector.
    The lattice runs from p_max down to the power floor in p_step decrements.
    """
    if config.num_cells > MAX_GRID_CELLS:
        raise InstanceTooLarge(
            f"{config.num_cells} cells exceed the K<={MAX_GRID_CELLS} grid cap")
    if p_step <= 0:
        raise ValueError("p_step must be positive")
    full = evaluate_links(topology, beta, full_power(config), config)
    if np.any(full.rate_per_user < config.r_min):
        raise InfeasibleAtFullPower("mask infeasible even at the full power budget")

    k_cells = config.num_cells
    levels = int(np.floor((config.p_max - POWER_FLOOR_DBM) / p_step + 1e-9)) + 1
    contrib, signal_full, serving, noise = _link_terms(topology, config)
    beta_f = np.asarray(beta, dtype=float)
    own_gate = beta_f[serving]                      # (K*U, N)

    # Reduction index vector j (one per cell) -> p = p_max - j * p_step.
    # Maximizing sum(j) minimizes the dBm sum exactly (integer arithmetic),
    # and among ties the largest combo id is the lexicographically smallest
    # power vector.
    best_sum_j, best_id = -1, -1
    n_combos = levels ** k_cells
    place = levels ** np.arange(k_cells - 1, -1, -1)
    for start in range(0, n_combos, _CHUNK):
        ids = np.arange(start, min(start + _CHUNK, n_combos))
        j = (ids[:, None] // place) % levels        # (M, K)
        scale = 10.0 ** (-j * p_step / 10.0)
        signal = scale[:, serving] * signal_full[None, :]
        interference = np.einsum("mk,uk,kn->mun", scale, contrib, beta_f)
        own = signal[:, :, None] * own_gate[None, :, :]
        sinr_db = 10.0 * np.log10(signal[:, :, None] / (interference - own + noise))
        cqi = np.searchsorted(CQI_SNR_THRESHOLDS_DB, sinr_db, side="right")
        rate = CQI_EFFICIENCY[cqi] * config.subband_bandwidth
        user_rates = np.sum(own_gate[None, :, :] * rate, axis=2)
        ok = np.all(user_rates >= config.r_min, axis=1)
        if not np.any(ok):
            continue
        sums = j.sum(axis=1)
        sums[~ok] = -1
        chunk_best = int(np.max(sums))
        if chunk_best > best_sum_j or (chunk_best == best_sum_j and chunk_best >= 0):
            best_sum_j = chunk_best
            # last index with the max sum = largest id = lex-smallest powers
            best_id = int(ids[np.nonzero(sums == chunk_best)[0][-1]])

    j_best = (best_id // place) % levels
    return config.p_max - j_best * p_step
