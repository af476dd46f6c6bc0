"""Joint sub-band masking and transmit power reduction for multi-cell OFDM.

A deterministic link-level simulator, a deep Q-learning trainer for binary
per-cell sub-band masks, a greedy per-cell power reduction stage and
brute-force oracles for small instances.
"""

from .backends import available_backends, default_backend, get_backend
from .dqn import (EpisodeLog, QNetwork, ReplayBuffer, TrainConfig, Transition,
                  bellman_target, epsilon_at, greedy_rollout, load_checkpoint,
                  save_checkpoint, select_action, sgd_step, train)
from .env import (STABILITY_BONUS, MaskingEnv, StepResult, apply_action,
                  compute_reward, decode_action, env_reset, env_step,
                  make_observation)
from .oracle import (InstanceTooLarge, OracleResult, exhaustive_mask_search,
                     mask_from_id, mask_to_id, power_grid_search)
from .power import (InfeasibleAtFullPower, POWER_FLOOR_DBM, PowerTraceRecord,
                    reduce_power)
from .radio import (CQI_EFFICIENCY, CQI_SNR_THRESHOLDS_DB, LinkState,
                    NetworkConfig, Scenario, Topology, associate_max_rsrp,
                    build_topology, channel_gains_db, cqi_to_rate, dbm_to_mw,
                    evaluate_links, full_power, mw_to_dbm, path_gain_db,
                    snr_to_cqi)

__version__ = "0.1.0"

__all__ = [
    "available_backends", "default_backend", "get_backend",
    "EpisodeLog", "QNetwork", "ReplayBuffer", "TrainConfig", "Transition",
    "bellman_target", "epsilon_at", "greedy_rollout", "load_checkpoint",
    "save_checkpoint", "select_action", "sgd_step", "train",
    "STABILITY_BONUS", "MaskingEnv", "StepResult", "apply_action",
    "compute_reward", "decode_action", "env_reset", "env_step",
    "make_observation",
    "InstanceTooLarge", "OracleResult", "exhaustive_mask_search",
    "mask_from_id", "mask_to_id", "power_grid_search",
    "InfeasibleAtFullPower", "POWER_FLOOR_DBM", "PowerTraceRecord",
    "reduce_power",
    "CQI_EFFICIENCY", "CQI_SNR_THRESHOLDS_DB", "LinkState", "NetworkConfig",
    "Scenario", "Topology", "associate_max_rsrp", "build_topology",
    "channel_gains_db", "cqi_to_rate", "dbm_to_mw", "evaluate_links",
    "full_power", "mw_to_dbm", "path_gain_db", "snr_to_cqi",
    "__version__",
]
