"""Deterministic physical layer: topology, path loss, SINR, CQI and rates.

Distance-driven log-distance channel (no fading, no shadowing).  All powers
are carried in dBm, gains in dB, bandwidths in Hz and rates in bits/s.
Transmit power is a per-cell budget split evenly over all N sub-bands,
whether or not a sub-band is active.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 3.0e8  # m/s

# 4-bit CQI table: SNR decision thresholds (dB, inclusive lower bounds) and
# the matching modulation order (bits/symbol) and code rate (x1024).
# Index 0 is "out of range" (no transmission possible).
CQI_SNR_THRESHOLDS_DB = np.array([
    -6.9360, -5.1470, -3.1800, -1.2530, 0.7610, 2.6990, 4.6940, 6.5250,
    8.5730, 10.3660, 12.2890, 14.1730, 15.8880, 17.8140, 19.8290,
])
CQI_BITS_PER_SYMBOL = np.array([0, 2, 2, 2, 2, 2, 2, 4, 4, 4, 6, 6, 6, 6, 6, 6])
CQI_CODE_RATE_X1024 = np.array([0, 78, 120, 193, 308, 449, 602, 378, 490, 616,
                                466, 567, 666, 772, 873, 948])
# Spectral efficiency in bit/s/Hz per CQI level (one symbol per Hz per second).
CQI_EFFICIENCY = CQI_BITS_PER_SYMBOL * CQI_CODE_RATE_X1024 / 1024.0


class Scenario(enum.Enum):
    """User placement modes for topology generation."""

    ALL_EDGE = "all-edge"
    ONE_EDGE = "one-edge"
    ALL_CENTER = "all-center"
    UNIFORM_RANDOM = "random"


def dbm_to_mw(dbm):
    return 10.0 ** (np.asarray(dbm, dtype=float) / 10.0)


def mw_to_dbm(mw):
    return 10.0 * np.log10(mw)


@dataclass(frozen=True)
class NetworkConfig:
    """Static topology and radio parameters."""

    num_cells: int = 2              # K
    num_subbands: int = 8           # N
    users_per_cell: int = 1         # U
    p_max: float = 40.0             # dBm, per-cell transmit power ceiling
    total_bandwidth: float = 20e6   # Hz
    carrier_freq: float = 2.8e9     # Hz
    cell_radius: float = 400.0      # m
    edge_fraction: float = 0.20     # edge annulus = [(1-f)*r, r]
    path_loss_exponent: float = 3.0
    antenna_gain_ap: float = 0.0    # dBi
    antenna_gain_ue: float = 0.0    # dBi
    noise_psd: float = -150.0       # dBm/Hz
    r_min: float = 17.82e6          # bits/s, per-user rate requirement
    inter_site_distance: float | None = None  # m, default 1.6 * cell_radius

    def __post_init__(self):
        if self.num_cells < 1 or self.num_subbands < 1 or self.users_per_cell < 1:
            raise ValueError("num_cells, num_subbands and users_per_cell must be >= 1")
        if not np.isfinite(self.p_max):
            raise ValueError("p_max must be finite")
        if self.total_bandwidth <= 0:
            raise ValueError("total_bandwidth must be positive")
        if not 0.0 < self.edge_fraction < 1.0:
            raise ValueError("edge_fraction must lie in (0, 1)")
        if self.inter_site_distance is None:
            object.__setattr__(self, "inter_site_distance", 1.6 * self.cell_radius)

    @property
    def subband_bandwidth(self) -> float:
        """Per-sub-band bandwidth in Hz."""
        return self.total_bandwidth / self.num_subbands

    @property
    def num_users(self) -> int:
        """Total user count K*U."""
        return self.num_cells * self.users_per_cell

    def noise_power_dbm(self) -> float:
        """Thermal noise over one sub-band, dBm."""
        return self.noise_psd + 10.0 * np.log10(self.subband_bandwidth)


@dataclass(frozen=True)
class Topology:
    """AP/UE positions plus the max-RSRP user association.

    ``ue_positions[i]`` is the i-th user globally; user i was placed in cell
    ``i // users_per_cell`` but is *served* by cell ``association[i]``.
    """

    ap_positions: np.ndarray   # (K, 2) m
    ue_positions: np.ndarray   # (K*U, 2) m
    association: np.ndarray    # (K*U,) serving cell index


@dataclass(frozen=True)
class LinkState:
    """Per-link SINR/CQI/rate snapshot for one (mask, power) operating point."""

    gain_db: np.ndarray           # (K, K*U) AP->UE channel gains, dB
    sinr_db: np.ndarray           # (K*U, N) serving-link SINR per sub-band
    cqi: np.ndarray               # (K*U, N) int, 0..15
    rate_per_subband: np.ndarray  # (K*U, N) bits/s
    rate_per_user: np.ndarray     # (K*U,) bits/s, mask-gated sum over sub-bands
    total_rate: float             # bits/s, network sum


def path_gain_db(distance: float, config: NetworkConfig):
    """Log-distance channel gain (dB) with a 1 m free-space intercept.

    Distances below 1 m are clamped to 1 m, making this a total function.
    """
    d = np.maximum(np.asarray(distance, dtype=float), 1.0)
    pl0 = 20.0 * np.log10(4.0 * np.pi * config.carrier_freq / SPEED_OF_LIGHT)
    pl = pl0 + 10.0 * config.path_loss_exponent * np.log10(d)
    return -pl + config.antenna_gain_ap + config.antenna_gain_ue


def snr_to_cqi(sinr_db):
    """Quantize SINR (dB) to a 4-bit CQI, 0 meaning out of range.

    Returns the largest index whose threshold is <= sinr_db; thresholds are
    inclusive lower bounds.
    """
    return np.searchsorted(CQI_SNR_THRESHOLDS_DB, sinr_db, side="right")


def cqi_to_rate(cqi: int, subband_bandwidth: float) -> float:
    """Achievable rate (bits/s) of one sub-band at the given CQI level."""
    if not 0 <= cqi <= 15:
        raise ValueError(f"CQI must be in 0..15, got {cqi}")
    if subband_bandwidth <= 0:
        raise ValueError("subband_bandwidth must be positive")
    return CQI_EFFICIENCY[cqi] * subband_bandwidth


def channel_gains_db(ap_positions: np.ndarray, ue_positions: np.ndarray,
                     config: NetworkConfig) -> np.ndarray:
    """AP->UE gain matrix, shape (K, K*U)."""
    diff = ap_positions[:, None, :] - ue_positions[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    return path_gain_db(dist, config)


def associate_max_rsrp(ap_positions: np.ndarray, ue_positions: np.ndarray,
                       config: NetworkConfig) -> np.ndarray:
    """Serving cell per UE by strongest measured RSRP, ties to lowest index.

    Measurement power is the even per-sub-band split p_max/N at every AP, so
    with equal budgets the argmax reduces to the strongest channel gain.
    """
    gains = channel_gains_db(ap_positions, ue_positions, config)
    rsrp = config.p_max - 10.0 * np.log10(config.num_subbands) + gains
    return np.argmax(rsrp, axis=0)


def _draw_in_annulus(rng, center, r_lo, r_hi, angle_center=None, half_width=np.pi):
    """Uniform-by-area point in an annulus sector around ``angle_center``."""
    radius = np.sqrt(rng.uniform(r_lo ** 2, r_hi ** 2))
    if angle_center is None:
        angle = rng.uniform(0.0, 2.0 * np.pi)
    else:
        angle = rng.uniform(angle_center - half_width, angle_center + half_width)
    return center + radius * np.array([np.cos(angle), np.sin(angle)])


def build_topology(config: NetworkConfig, scenario: Scenario, rng_seed: int) -> Topology:
    """Place APs on a line, draw UE positions per scenario, associate by RSRP.

    ALL_EDGE draws every UE in its cell's edge annulus on the half facing the
    nearest neighbouring AP; ONE_EDGE does so for cell 0 only and keeps the
    rest in the centre disk; ALL_CENTER keeps everyone in the centre disk;
    UNIFORM_RANDOM draws uniformly over the full cell disk.
    """
    if config.num_cells < 1:
        raise ValueError("need at least one cell")
    rng = np.random.default_rng(rng_seed)
    k_cells = config.num_cells
    radius = config.cell_radius
    edge_lo = (1.0 - config.edge_fraction) * radius

    ap_positions = np.zeros((k_cells, 2))
    ap_positions[:, 0] = np.arange(k_cells) * config.inter_site_distance

    def neighbor_angle(k):
        # Direction towards the nearest neighbouring AP (ties to lower index).
        if k_cells == 1:
            return None
        nb = k - 1 if k > 0 else k + 1
        return 0.0 if nb > k else np.pi

    ue_positions = np.zeros((config.num_users, 2))
    for k in range(k_cells):
        for u in range(config.users_per_cell):
            if scenario is Scenario.ALL_EDGE:
                on_edge = True
            elif scenario is Scenario.ONE_EDGE:
                on_edge = k == 0
            elif scenario is Scenario.ALL_CENTER:
                on_edge = False
            elif scenario is Scenario.UNIFORM_RANDOM:
                on_edge = None
            else:
                raise ValueError(f"unknown scenario {scenario!r}")
            center = ap_positions[k]
            if on_edge is None:
                pos = _draw_in_annulus(rng, center, 0.0, radius)
            elif on_edge:
                pos = _draw_in_annulus(rng, center, edge_lo, radius,
                                       angle_center=neighbor_angle(k),
                                       half_width=np.pi / 2.0)
            else:
                pos = _draw_in_annulus(rng, center, 0.0, edge_lo)
            ue_positions[k * config.users_per_cell + u] = pos

    association = associate_max_rsrp(ap_positions, ue_positions, config)
    return Topology(ap_positions=ap_positions, ue_positions=ue_positions,
                    association=association)


def full_power(config: NetworkConfig) -> np.ndarray:
    """Per-cell power vector at the p_max ceiling, dBm."""
    return np.full(config.num_cells, config.p_max)


def evaluate_links(topology: Topology, beta: np.ndarray, power: np.ndarray,
                   config: NetworkConfig) -> LinkState:
    """Evaluate SINR, CQI and rates for a mask matrix and power vector.

    ``beta`` is the (K, N) binary activation matrix: an active sub-band both
    serves the cell's own users and interferes with every other cell's users
    on that sub-band.  The serving signal is always measured; the serving
    cell's own mask gates only the rate aggregation.
    """
    power = np.asarray(power, dtype=float)
    if np.any(power > config.p_max):
        raise ValueError("per-cell power exceeds p_max")
    gains = channel_gains_db(topology.ap_positions, topology.ue_positions, config)
    per_band_dbm = power[:, None] - 10.0 * np.log10(config.num_subbands) + gains
    rx_mw = dbm_to_mw(per_band_dbm)                       # (K, K*U)
    noise_mw = dbm_to_mw(config.noise_power_dbm())

    serving = topology.association
    ue_idx = np.arange(config.num_users)
    signal_mw = rx_mw[serving, ue_idx]                    # (K*U,)
    beta_f = np.asarray(beta, dtype=float)
    # Interference: active cells' contributions minus the serving cell's own.
    interference = rx_mw.T @ beta_f - signal_mw[:, None] * beta_f[serving]

    sinr_db = 10.0 * np.log10(signal_mw[:, None] / (interference + noise_mw))
    cqi = snr_to_cqi(sinr_db)
    rate_per_subband = CQI_EFFICIENCY[cqi] * config.subband_bandwidth
    rate_per_user = np.sum(beta_f[serving] * rate_per_subband, axis=1)
    return LinkState(gain_db=gains, sinr_db=sinr_db, cqi=cqi,
                     rate_per_subband=rate_per_subband,
                     rate_per_user=rate_per_user,
                     total_rate=float(np.sum(rate_per_user)))
