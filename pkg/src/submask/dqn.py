"""Deep Q-learning on the masking environment, built from scratch.

A two-hidden-layer fully connected value network (128/128 ReLU units, linear
head) is trained by plain stochastic gradient descent on the squared Bellman
error, with uniform experience replay and an epsilon-greedy behaviour
policy.  Targets are computed from the same online network; there is no
separate target network.  Everything is float64 and deterministic given the
seed, so training logs and checkpoints reproduce byte-for-byte.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backends import default_backend
from .env import MaskingEnv
from .radio import NetworkConfig, Scenario

HIDDEN_UNITS = 128


@dataclass(frozen=True)
class Transition:
    """One replay-buffer element."""

    s: np.ndarray
    a: int
    r: float
    s_next: np.ndarray
    terminal: bool


@dataclass(frozen=True)
class TrainConfig:
    """Training hyperparameters (defaults are the reference operating point)."""

    gamma: float = 0.995
    epsilon_init: float = 1.0
    epsilon_min: float = 0.01
    epsilon_decay: float = 8e-6     # per environment step
    learning_rate: float = 1e-4
    batch_size: int = 32
    horizon: int = 64               # steps per episode
    episodes: int = 5000
    rng_seed: int = 0
    replay_capacity: int = 100_000
    fixed_placement: bool = False   # pin UE positions across episodes
    placement_seed: int | None = None  # seed of the pinned placement

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie in (0, 1)")
        if not 0.0 <= self.epsilon_min <= self.epsilon_init <= 1.0:
            raise ValueError("need 0 <= epsilon_min <= epsilon_init <= 1")
        if self.placement_seed is None:
            object.__setattr__(self, "placement_seed", self.rng_seed)


@dataclass(frozen=True)
class EpisodeLog:
    episode: int
    cumulative_reward: float
    epsilon: float
    mean_loss: float


class QNetwork:
    """Fully connected value network with two ReLU hidden layers.

    Parameters live in plain float64 arrays; the forward/backward math runs
    on whichever kernel backend is active (compiled if built, NumPy
    otherwise).
    """

    def __init__(self, weights, biases, backend=None):
        self.weights = [np.ascontiguousarray(w, dtype=float) for w in weights]
        self.biases = [np.ascontiguousarray(b, dtype=float) for b in biases]
        if len(self.weights) != 3 or len(self.biases) != 3:
            raise ValueError("expected exactly three layers")
        self.backend = backend if backend is not None else default_backend()

    @classmethod
    def initialize(cls, layer_sizes, rng, backend=None):
        """Fan-in-scaled symmetric uniform weights, zero biases."""
        if len(layer_sizes) != 4:
            raise ValueError("layer_sizes must be [in, hidden1, hidden2, out]")
        weights, biases = [], []
        for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
            biases.append(np.zeros(fan_out))
        return cls(weights, biases, backend=backend)

    @property
    def layer_sizes(self):
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    @property
    def num_params(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def _args(self):
        w, b = self.weights, self.biases
        return w[0], b[0], w[1], b[1], w[2], b[2]

    def forward(self, obs: np.ndarray) -> np.ndarray:
        return self.backend.forward(*self._args(), np.ascontiguousarray(obs, dtype=float))

    def forward_batch(self, obs_batch: np.ndarray) -> np.ndarray:
        return self.backend.forward_batch(
            *self._args(), np.ascontiguousarray(obs_batch, dtype=float))

    def train_step(self, obs_batch, actions, targets, lr) -> float:
        return self.backend.train_step(
            *self._args(),
            np.ascontiguousarray(obs_batch, dtype=float),
            np.ascontiguousarray(actions, dtype=np.int64),
            np.ascontiguousarray(targets, dtype=float), lr)

    def copy(self, backend=None):
        return QNetwork([w.copy() for w in self.weights],
                        [b.copy() for b in self.biases],
                        backend=backend if backend is not None else self.backend)

    def check_finite(self):
        for arr in self.weights + self.biases:
            if not np.all(np.isfinite(arr)):
                raise FloatingPointError("network parameters diverged (NaN/Inf)")


class ReplayBuffer:
    """Bounded FIFO of transitions with uniform with-replacement sampling."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self._items: list[Transition] = []
        self._cursor = 0

    def __len__(self):
        return len(self._items)

    def push(self, transition: Transition):
        if len(self._items) < self.capacity:
            self._items.append(transition)
        else:
            self._items[self._cursor] = transition
            self._cursor = (self._cursor + 1) % self.capacity

    def sample(self, batch_size: int, rng) -> list[Transition]:
        if len(self._items) < batch_size:
            raise ValueError(f"buffer holds {len(self._items)} < {batch_size} transitions")
        idx = rng.integers(0, len(self._items), size=batch_size)
        return [self._items[i] for i in idx]


def epsilon_at(tconf: TrainConfig, step: int) -> float:
    """Exploration rate in effect at a given global step count."""
    return max(tconf.epsilon_min, tconf.epsilon_init - tconf.epsilon_decay * step)


def select_action(net: QNetwork, obs: np.ndarray, epsilon: float, rng) -> int:
    """Epsilon-greedy: uniform over all actions, else argmax (lowest index wins)."""
    num_actions = net.biases[-1].shape[0]
    if rng.random() < epsilon:
        return int(rng.integers(0, num_actions))
    return int(np.argmax(net.forward(obs)))


def bellman_target(r: float, s_next: np.ndarray, terminal: bool,
                   net: QNetwork, gamma: float) -> float:
    """r for terminal transitions, else r + gamma * max_a Q(s_next, a)."""
    if terminal:
        return r
    return r + gamma * float(np.max(net.forward(s_next)))


def sgd_step(net: QNetwork, batch: list[Transition], gamma: float, lr: float) -> float:
    """One gradient step on the batch; targets use the current (online) net.

    Targets are computed before the update and held constant, so no gradient
    flows through them.  Returns the pre-update loss.
    """
    obs = np.stack([t.s for t in batch])
    actions = np.array([t.a for t in batch], dtype=np.int64)
    rewards = np.array([t.r for t in batch])
    next_obs = np.stack([t.s_next for t in batch])
    nonterminal = np.array([0.0 if t.terminal else 1.0 for t in batch])
    targets = rewards + gamma * nonterminal * np.max(net.forward_batch(next_obs), axis=1)
    return net.train_step(obs, actions, targets, lr)


def train(config: NetworkConfig, tconf: TrainConfig, scenario: Scenario,
          backend=None):
    """Run the full training loop; returns (network, per-episode logs).

    Per episode: reset (fresh UE placement unless pinned), then per step
    select epsilon-greedily, act, store, sample a minibatch and descend.
    Updates start once the buffer holds a full batch; epsilon decays per
    global step down to its floor.
    """
    rng = np.random.default_rng(tconf.rng_seed)
    env = MaskingEnv(config, scenario, horizon=tconf.horizon,
                     fixed_placement=tconf.fixed_placement)
    net = QNetwork.initialize(
        [env.observation_size, HIDDEN_UNITS, HIDDEN_UNITS, env.num_actions],
        rng, backend=backend)
    buffer = ReplayBuffer(tconf.replay_capacity)
    logs: list[EpisodeLog] = []
    global_step = 0

    for episode in range(tconf.episodes):
        if tconf.fixed_placement:
            obs = env.reset(tconf.placement_seed)
        else:
            obs = env.reset(int(rng.integers(2 ** 63)))
        ep_reward = 0.0
        losses = []
        for _ in range(tconf.horizon):
            eps = epsilon_at(tconf, global_step)
            action = select_action(net, obs, eps, rng)
            result = env.step(action)
            buffer.push(Transition(obs, action, result.reward,
                                   result.next_observation, result.terminal))
            if len(buffer) >= tconf.batch_size:
                batch = buffer.sample(tconf.batch_size, rng)
                losses.append(sgd_step(net, batch, tconf.gamma, tconf.learning_rate))
            obs = result.next_observation
            ep_reward += result.reward
            global_step += 1
        net.check_finite()
        logs.append(EpisodeLog(episode=episode, cumulative_reward=ep_reward,
                               epsilon=epsilon_at(tconf, global_step),
                               mean_loss=float(np.mean(losses)) if losses else 0.0))
    return net, logs


@dataclass(frozen=True)
class RolloutStep:
    step: int
    action: int
    reward: float
    rate_per_user: np.ndarray  # bits/s, post-action
    beta: np.ndarray           # (K, N) post-action mask


def greedy_rollout(net: QNetwork, env: MaskingEnv, reset_seed: int) -> list[RolloutStep]:
    """Roll the greedy policy for one full episode, recording each step."""
    obs = env.reset(reset_seed)
    rows = []
    for t in range(env.horizon):
        action = int(np.argmax(net.forward(obs)))
        result = env.step(action)
        rows.append(RolloutStep(step=t, action=action, reward=result.reward,
                                rate_per_user=env.links.rate_per_user.copy(),
                                beta=env.beta.copy()))
        obs = result.next_observation
    return rows


CHECKPOINT_MAGIC = "submask-qnet 1"


def save_checkpoint(net: QNetwork, path):
    """Write the network as a flat, diffable decimal-text document."""
    lines = [CHECKPOINT_MAGIC,
             "layers " + " ".join(str(s) for s in net.layer_sizes)]
    for i, (w, b) in enumerate(zip(net.weights, net.biases), start=1):
        lines.append(f"W{i} {w.shape[0]} {w.shape[1]}")
        for row in w:
            lines.append(" ".join(repr(float(v)) for v in row))
        lines.append(f"b{i} {b.shape[0]}")
        lines.append(" ".join(repr(float(v)) for v in b))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_checkpoint(path, backend=None) -> QNetwork:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != CHECKPOINT_MAGIC:
        raise ValueError(f"{path}: not a checkpoint file")
    sizes = [int(tok) for tok in lines[1].split()[1:]]
    pos = 2
    weights, biases = [], []
    for i in range(1, 4):
        head = lines[pos].split()
        if head[0] != f"W{i}":
            raise ValueError(f"{path}: expected W{i} header, got {lines[pos]!r}")
        rows, cols = int(head[1]), int(head[2])
        w = np.array([[float(tok) for tok in lines[pos + 1 + r].split()]
                      for r in range(rows)])
        if w.shape != (rows, cols):
            raise ValueError(f"{path}: W{i} shape mismatch")
        pos += 1 + rows
        head = lines[pos].split()
        if head[0] != f"b{i}":
            raise ValueError(f"{path}: expected b{i} header, got {lines[pos]!r}")
        b = np.array([float(tok) for tok in lines[pos + 1].split()])
        if b.shape != (int(head[1]),):
            raise ValueError(f"{path}: b{i} length mismatch")
        pos += 2
        weights.append(w)
        biases.append(b)
    net = QNetwork(weights, biases, backend=backend)
    if net.layer_sizes != sizes:
        raise ValueError(f"{path}: layer header disagrees with matrix shapes")
    return net
