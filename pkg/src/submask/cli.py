"""Command line front end: train, eval, power and oracle runs.

Every run writes CSV artifacts plus a manifest.json recording the exact
configuration into --out, and prints a one line summary.  A flat JSON file
passed via --config overrides network and training defaults by field name;
command line flags override the file.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .backends import available_backends, default_backend, get_backend
from .dqn import (TrainConfig, greedy_rollout, load_checkpoint,
                  save_checkpoint, train)
from .env import MaskingEnv
from .oracle import (InstanceTooLarge, exhaustive_mask_search, mask_to_id,
                     power_grid_search)
from .power import InfeasibleAtFullPower, reduce_power
from .radio import NetworkConfig, Scenario, build_topology, evaluate_links

CASE_SCENARIOS = {"case1": "all-edge", "case2": "one-edge", "case3": "all-center"}


def _fmt(x) -> str:
    """CSV float format, 9 significant digits."""
    return f"{float(x):.9g}"


def load_config_file(path) -> dict:
    with open(path) as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    return raw


def split_config(raw: dict) -> tuple[dict, dict]:
    """Route flat JSON keys to NetworkConfig / TrainConfig by field name."""
    net_fields = {f.name for f in dataclasses.fields(NetworkConfig)}
    train_fields = {f.name for f in dataclasses.fields(TrainConfig)}
    net, tr = {}, {}
    for key, value in raw.items():
        if key in net_fields:
            net[key] = value
        elif key in train_fields:
            tr[key] = value
        else:
            raise ValueError(f"unknown config key {key!r}")
    return net, tr


def build_configs(args) -> tuple[NetworkConfig, TrainConfig]:
    raw = load_config_file(args.config) if args.config else {}
    net_kw, train_kw = split_config(raw)
    if getattr(args, "episodes", None) is not None:
        train_kw["episodes"] = args.episodes
    if args.seed is not None:
        train_kw["rng_seed"] = args.seed
    if getattr(args, "fixed_placement", False):
        train_kw["fixed_placement"] = True
    if getattr(args, "placement_seed", None) is not None:
        train_kw["placement_seed"] = args.placement_seed
    return NetworkConfig(**net_kw), TrainConfig(**train_kw)


def resolve_scenario(args) -> Scenario:
    name = getattr(args, "case", None)
    if name:
        return Scenario(CASE_SCENARIOS[name])
    return Scenario(args.scenario)


def parse_mask(text: str | None, config: NetworkConfig) -> np.ndarray:
    """Bit string (row-major K*N chars of 0/1) -> (K, N) mask matrix."""
    k, n = config.num_cells, config.num_subbands
    if text is None:
        return np.ones((k, n), dtype=np.int8)
    if len(text) != k * n or set(text) - {"0", "1"}:
        raise ValueError(f"mask must be {k * n} chars of 0/1, got {text!r}")
    return np.fromiter((int(c) for c in text), dtype=np.int8).reshape(k, n)


def mask_string(beta: np.ndarray) -> str:
    return "".join(str(int(b)) for b in np.asarray(beta).ravel())


def write_manifest(out_dir: Path, command: str, scenario: Scenario,
                   config: NetworkConfig, outputs: list[str],
                   tconf: TrainConfig | None = None, **extra) -> None:
    manifest = {
        "tool": "submask",
        "version": __version__,
        "command": command,
        "created_unix": time.time(),
        "scenario": scenario.value,
        "network": dataclasses.asdict(config),
        "outputs": outputs,
    }
    if tconf is not None:
        manifest["training"] = dataclasses.asdict(tconf)
    manifest.update(extra)
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_train(args) -> int:
    config, tconf = build_configs(args)
    scenario = resolve_scenario(args)
    backend = get_backend(args.backend) if args.backend else default_backend()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    net, logs = train(config, tconf, scenario, backend=backend)

    log_path = out_dir / "train_log.csv"
    with open(log_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["episode", "cumulative_reward", "reward_ma100",
                         "epsilon", "mean_loss"])
        rewards = []
        for log in logs:
            rewards.append(log.cumulative_reward)
            ma100 = float(np.mean(rewards[-100:]))
            writer.writerow([log.episode, _fmt(log.cumulative_reward),
                             _fmt(ma100), _fmt(log.epsilon), _fmt(log.mean_loss)])
    ckpt_path = out_dir / "qnet.txt"
    save_checkpoint(net, ckpt_path)
    write_manifest(out_dir, "train", scenario, config,
                   [log_path.name, ckpt_path.name], tconf=tconf,
                   backend=backend.NAME)
    tail = [log.cumulative_reward for log in logs[-100:]]
    tail_mean = float(np.mean(tail)) if tail else float("nan")
    print(f"trained {len(logs)} episodes on backend {backend.NAME}; "
          f"last-100 mean cumulative reward {tail_mean:.4f}; "
          f"checkpoint {ckpt_path}")
    return 0


def cmd_eval(args) -> int:
    config, tconf = build_configs(args)
    scenario = resolve_scenario(args)
    backend = get_backend(args.backend) if args.backend else default_backend()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    net = load_checkpoint(args.checkpoint, backend=backend)
    env = MaskingEnv(config, scenario, horizon=tconf.horizon)
    if net.layer_sizes[0] != env.observation_size:
        raise ValueError(
            f"checkpoint expects observation size {net.layer_sizes[0]}, "
            f"config yields {env.observation_size}")
    if net.layer_sizes[-1] != env.num_actions:
        raise ValueError(
            f"checkpoint expects {net.layer_sizes[-1]} actions, "
            f"config yields {env.num_actions}")
    seed = args.seed if args.seed is not None else 0
    steps = greedy_rollout(net, env, reset_seed=seed)

    rollout_path = out_dir / "eval_rollout.csv"
    n_users = config.num_users
    with open(rollout_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "action", "reward"]
                        + [f"rate_mbps_u{i}" for i in range(n_users)] + ["mask"])
        for s in steps:
            writer.writerow([s.step, s.action, _fmt(s.reward)]
                            + [_fmt(r / 1e6) for r in s.rate_per_user]
                            + [mask_string(s.beta)])
    write_manifest(out_dir, "eval", scenario, config, [rollout_path.name],
                   backend=backend.NAME, checkpoint=str(args.checkpoint),
                   seed=seed)
    final = steps[-1]
    satisfied = bool(np.all(final.rate_per_user >= config.r_min))
    worst = float(final.rate_per_user.min()) / 1e6
    print(f"rollout of {len(steps)} steps; final mask {mask_string(final.beta)}; "
          f"worst user {worst:.4f} Mbps; "
          f"requirement {'met' if satisfied else 'missed'}")
    return 0


def cmd_power(args) -> int:
    config, _ = build_configs(args)
    scenario = resolve_scenario(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    seed = args.seed if args.seed is not None else 0

    topology = build_topology(config, scenario, rng_seed=seed)
    beta = parse_mask(args.mask, config)
    powers, trace = reduce_power(topology, beta, config, p_step=args.p_step)

    trace_path = out_dir / "power_trace.csv"
    with open(trace_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "cell"]
                        + [f"p_dbm_{k}" for k in range(config.num_cells)]
                        + [f"rate_mbps_u{i}" for i in range(config.num_users)])
        for rec in trace:
            writer.writerow([rec.iteration, rec.cell]
                            + [_fmt(p) for p in rec.powers]
                            + [_fmt(r / 1e6) for r in rec.rate_per_user])
    write_manifest(out_dir, "power", scenario, config, [trace_path.name],
                   seed=seed, mask=mask_string(beta), p_step=args.p_step)
    total_drop = config.p_max * config.num_cells - float(np.sum(powers))
    print(f"converged after {len(trace) - 1} accepted reductions; "
          f"final powers [{', '.join(f'{p:.1f}' for p in powers)}] dBm; "
          f"{total_drop:.1f} dB trimmed in total")
    return 0


def cmd_oracle(args) -> int:
    config, _ = build_configs(args)
    scenario = resolve_scenario(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    seed = args.seed if args.seed is not None else 0
    topology = build_topology(config, scenario, rng_seed=seed)

    if args.mode == "masks":
        result = exhaustive_mask_search(topology, config)
        csv_path = out_dir / "oracle_masks.csv"
        bits = config.num_cells * config.num_subbands
        feasible = set(int(i) for i in result.feasible_ids)
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["mask", "feasible", "total_rate_mbps", "min_rate_mbps"])
            for mask_id in range(1 << bits):
                writer.writerow([format(mask_id, f"0{bits}b"),
                                 int(mask_id in feasible),
                                 _fmt(result.total_rate[mask_id] / 1e6),
                                 _fmt(result.min_user_rate[mask_id] / 1e6)])
        write_manifest(out_dir, "oracle", scenario, config, [csv_path.name],
                       seed=seed, mode="masks")
        if result.best_mask is None:
            print(f"0 of {1 << bits} masks feasible; "
                  f"best worst-user rate {result.max_min_user_rate / 1e6:.4f} Mbps")
        else:
            print(f"{len(result.feasible_ids)} of {1 << bits} masks feasible; "
                  f"best mask {mask_string(result.best_mask)} at "
                  f"{result.best_total_rate / 1e6:.4f} Mbps total")
        return 0

    beta = parse_mask(args.mask, config)
    powers = power_grid_search(topology, beta, config, p_step=args.p_step)
    csv_path = out_dir / "oracle_power.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"p_dbm_{k}" for k in range(config.num_cells)])
        writer.writerow([_fmt(p) for p in powers])
    write_manifest(out_dir, "oracle", scenario, config, [csv_path.name],
                   seed=seed, mode="power", mask=mask_string(beta),
                   p_step=args.p_step)
    print(f"lattice minimum [{', '.join(f'{p:.1f}' for p in powers)}] dBm "
          f"(mask {mask_string(beta)})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="submask",
        description="Sub-band masking and power reduction for multi-cell OFDM",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    scenarios = [s.value for s in Scenario]

    def common(p, scenario_default="all-edge"):
        p.add_argument("--config", help="flat JSON config file")
        p.add_argument("--scenario", choices=scenarios, default=scenario_default,
                       help="user placement mode")
        p.add_argument("--seed", type=int, default=None, help="master RNG seed")
        p.add_argument("--out", required=True, help="output directory")

    p_train = sub.add_parser("train", help="train the masking policy")
    common(p_train)
    p_train.add_argument("--episodes", type=int, default=None,
                         help="override episode count")
    p_train.add_argument("--backend", choices=available_backends(),
                         help="numerical kernel backend")
    p_train.add_argument("--fixed-placement", action="store_true",
                         help="pin UE positions across episodes")
    p_train.add_argument("--placement-seed", type=int, default=None,
                         help="seed of the pinned placement")
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("eval", help="greedy rollout of a trained policy")
    common(p_eval)
    p_eval.add_argument("--checkpoint", required=True, help="trained network file")
    p_eval.add_argument("--case", choices=sorted(CASE_SCENARIOS),
                        help="named placement case (overrides --scenario)")
    p_eval.add_argument("--backend", choices=available_backends(),
                        help="numerical kernel backend")
    p_eval.set_defaults(func=cmd_eval)

    p_power = sub.add_parser("power", help="greedy per-cell power reduction")
    common(p_power)
    p_power.add_argument("--p-step", type=float, default=0.5,
                         help="power decrement per move, dB")
    p_power.add_argument("--mask", help="row-major 0/1 mask string, default all ones")
    p_power.set_defaults(func=cmd_power)

    p_oracle = sub.add_parser("oracle", help="brute-force baselines")
    common(p_oracle)
    p_oracle.add_argument("--mode", choices=["masks", "power"], default="masks")
    p_oracle.add_argument("--p-step", type=float, default=0.5,
                          help="power lattice spacing, dB (power mode)")
    p_oracle.add_argument("--mask", help="mask string for power mode, default all ones")
    p_oracle.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, InstanceTooLarge, InfeasibleAtFullPower, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
