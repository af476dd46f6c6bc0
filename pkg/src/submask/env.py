"""Episodic control environment over the radio model.

State is the (K, N) sub-band activation matrix; one discrete action either
does nothing (action 0) or toggles a single (cell, sub-band) entry.  Links
are always evaluated at the full per-cell power budget; power trimming is a
separate post-training stage.

Observation layout: K*U per-user rates normalized by r_min, followed by the
K*N activation entries flattened row-major by cell.  Rewards are rate
deficits in Mbps (zero once every user meets r_min), plus a stability bonus
for doing nothing while all users are satisfied.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .radio import (LinkState, NetworkConfig, Scenario, Topology,
                    build_topology, evaluate_links, full_power)

STABILITY_BONUS = 2.0  # reward add-on for a no-op in a fully satisfied state


@dataclass(frozen=True)
class StepResult:
    next_observation: np.ndarray
    reward: float
    terminal: bool


def decode_action(action: int, config: NetworkConfig):
    """Map an action id in [0, K*N] to None (no-op) or a (cell, sub-band) pair."""
    n_toggle = config.num_cells * config.num_subbands
    if not 0 <= action <= n_toggle:
        raise ValueError(f"action {action} outside [0, {n_toggle}]")
    if action == 0:
        return None
    return (action - 1) // config.num_subbands, (action - 1) % config.num_subbands


def apply_action(beta: np.ndarray, decoded) -> np.ndarray:
    """Return a copy of the mask with the decoded toggle applied (if any)."""
    out = np.array(beta, copy=True)
    if decoded is not None:
        k, n = decoded
        out[k, n] = 1 - out[k, n]
    return out


def compute_reward(links: LinkState, action_was_noop: bool, r_min: float,
                   rho: float = STABILITY_BONUS) -> float:
    """Sum of per-user rate deficits in Mbps, plus rho for a stable no-op.

    Each user contributes min(0, rate - r_min) scaled to Mbps; the bonus
    applies only when the action was a no-op and no deficit remains.
    """
    deficits = np.minimum(0.0, (links.rate_per_user - r_min) / 1e6)
    base = float(np.sum(deficits))
    if action_was_noop and base == 0.0:
        return base + rho
    return base


def make_observation(links: LinkState, beta: np.ndarray, r_min: float) -> np.ndarray:
    """Flat observation vector of length K*(U+N)."""
    return np.concatenate([links.rate_per_user / r_min,
                           np.asarray(beta, dtype=float).ravel()])


def env_reset(config: NetworkConfig, scenario: Scenario, rng_seed: int):
    """Draw a fresh topology and start from the all-active mask.

    Starting with every sub-band on is the interference-worst initial point:
    edge users typically begin below r_min and the agent must carve out
    cleaner spectrum.
    """
    topology = build_topology(config, scenario, rng_seed)
    beta = np.ones((config.num_cells, config.num_subbands), dtype=np.int8)
    links = evaluate_links(topology, beta, full_power(config), config)
    return topology, beta, make_observation(links, beta, config.r_min)


def env_step(topology: Topology, beta: np.ndarray, action: int, t: int,
             horizon: int, config: NetworkConfig):
    """Apply one action and re-evaluate at full power.

    Returns the post-action mask, its LinkState and the StepResult; the
    episode terminates purely by the fixed horizon.
    """
    decoded = decode_action(action, config)
    new_beta = apply_action(beta, decoded)
    links = evaluate_links(topology, new_beta, full_power(config), config)
    reward = compute_reward(links, decoded is None, config.r_min)
    obs = make_observation(links, new_beta, config.r_min)
    return new_beta, links, StepResult(next_observation=obs, reward=reward,
                                       terminal=t + 1 >= horizon)


class MaskingEnv:
    """Mutable single-owner wrapper around env_reset/env_step.

    ``fixed_placement`` pins the topology drawn on the first reset for every
    later episode (deterministic test fixtures); otherwise each reset redraws
    UE positions from the seed passed in.
    """

    def __init__(self, config: NetworkConfig, scenario: Scenario,
                 horizon: int = 64, fixed_placement: bool = False):
        self.config = config
        self.scenario = scenario
        self.horizon = horizon
        self.fixed_placement = fixed_placement
        self.topology = None
        self.beta = None
        self.links = None
        self.t = 0

    @property
    def observation_size(self) -> int:
        c = self.config
        return c.num_cells * (c.users_per_cell + c.num_subbands)

    @property
    def num_actions(self) -> int:
        return self.config.num_cells * self.config.num_subbands + 1

    def reset(self, rng_seed: int) -> np.ndarray:
        if self.fixed_placement and self.topology is not None:
            self.beta = np.ones_like(self.beta)
            self.links = evaluate_links(self.topology, self.beta,
                                        full_power(self.config), self.config)
            obs = make_observation(self.links, self.beta, self.config.r_min)
        else:
            self.topology, self.beta, obs = env_reset(self.config, self.scenario,
                                                      rng_seed)
            self.links = evaluate_links(self.topology, self.beta,
                                        full_power(self.config), self.config)
        self.t = 0
        return obs

    def step(self, action: int) -> StepResult:
        if self.t >= self.horizon:
            raise RuntimeError("episode is over; call reset()")
        self.beta, self.links, result = env_step(self.topology, self.beta, action,
                                                 self.t, self.horizon, self.config)
        self.t += 1
        return result
