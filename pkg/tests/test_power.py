"""Greedy power trimming: invariants, oracle agreement, failure modes."""

import numpy as np
import pytest

from submask import (InfeasibleAtFullPower, NetworkConfig, POWER_FLOOR_DBM,
                     Scenario, Topology, build_topology, evaluate_links,
                     exhaustive_mask_search, power_grid_search, reduce_power)


def scaled_config(seed, scale=0.6, scenario=Scenario.ALL_CENTER):
    """Two-cell config whose r_min is a fixed fraction of the best
    achievable worst-user rate at seed, so full power is always feasible."""
    base = NetworkConfig(num_cells=2, num_subbands=4, users_per_cell=1)
    top = build_topology(base, scenario, rng_seed=seed)
    best = exhaustive_mask_search(top, base).max_min_user_rate
    cfg = NetworkConfig(num_cells=2, num_subbands=4, users_per_cell=1,
                        r_min=scale * best)
    return cfg, top


def test_single_cell_matches_grid_oracle():
    cfg = NetworkConfig(num_cells=1, num_subbands=4, users_per_cell=2)
    top = build_topology(cfg, Scenario.ALL_CENTER, rng_seed=1)
    beta = np.ones((1, 4))
    powers, _ = reduce_power(top, beta, cfg)
    grid = power_grid_search(top, beta, cfg)
    assert abs(powers[0] - grid[0]) <= 0.5


def test_trace_starts_at_full_power_and_stays_feasible():
    cfg, top = scaled_config(seed=0)
    beta = np.ones((2, 4))
    powers, trace = reduce_power(top, beta, cfg)
    assert trace[0].iteration == 0
    assert trace[0].cell == -1
    np.testing.assert_array_equal(trace[0].powers, [40.0, 40.0])
    assert [rec.iteration for rec in trace] == list(range(len(trace)))
    for rec in trace:
        assert np.all(rec.rate_per_user >= cfg.r_min)
        links = evaluate_links(top, beta, rec.powers, cfg)
        np.testing.assert_array_equal(links.rate_per_user, rec.rate_per_user)
    np.testing.assert_array_equal(trace[-1].powers, powers)


def test_each_accepted_step_trims_exactly_one_cell():
    cfg, top = scaled_config(seed=7)
    powers, trace = reduce_power(top, np.ones((2, 4)), cfg)
    for prev, cur in zip(trace, trace[1:]):
        delta = prev.powers - cur.powers
        assert np.count_nonzero(delta) == 1
        assert delta[cur.cell] == pytest.approx(0.5)
    per_cell = np.stack([rec.powers for rec in trace])
    assert np.all(np.diff(per_cell, axis=0) <= 0.0)


def test_result_is_locally_minimal():
    for seed in [0, 7]:
        cfg, top = scaled_config(seed=seed)
        beta = np.ones((2, 4))
        powers, _ = reduce_power(top, beta, cfg)
        assert np.all(powers < 40.0)
        for k in range(2):
            trial = powers.copy()
            trial[k] -= 0.5
            links = evaluate_links(top, beta, trial, cfg)
            assert np.any(links.rate_per_user < cfg.r_min)


def test_two_cell_results_match_grid_oracle():
    for seed in [0, 6, 7, 8]:
        cfg, top = scaled_config(seed=seed)
        beta = np.ones((2, 4))
        powers, _ = reduce_power(top, beta, cfg)
        grid = power_grid_search(top, beta, cfg)
        np.testing.assert_allclose(powers, grid)


def test_infeasible_at_full_power_raises():
    cfg = NetworkConfig(num_cells=1, num_subbands=4, users_per_cell=2)
    top = build_topology(cfg, Scenario.ALL_CENTER, rng_seed=2)
    links = evaluate_links(top, np.ones((1, 4)), np.array([40.0]), cfg)
    assert np.any(links.rate_per_user < cfg.r_min)  # fixture sanity
    with pytest.raises(InfeasibleAtFullPower):
        reduce_power(top, np.ones((1, 4)), cfg)


def test_power_floor_stops_reduction():
    # A user right at the mast keeps CQI 15 at the floor, so the trimming
    # must stop at exactly 0 dBm instead of descending forever.
    cfg = NetworkConfig(num_cells=1, num_subbands=4, users_per_cell=1, r_min=1e3)
    top = Topology(ap_positions=np.array([[0.0, 0.0]]),
                   ue_positions=np.array([[0.0, 0.0]]),
                   association=np.array([0]))
    powers, trace = reduce_power(top, np.ones((1, 4)), cfg)
    assert powers[0] == POWER_FLOOR_DBM
    assert all(rec.powers[0] >= POWER_FLOOR_DBM for rec in trace)
    assert len(trace) == 81  # 40 dBm / 0.5 dB accepted steps plus the start


def test_invalid_step_rejected():
    cfg, top = scaled_config(seed=0)
    with pytest.raises(ValueError):
        reduce_power(top, np.ones((2, 4)), cfg, p_step=0.0)
    with pytest.raises(ValueError):
        reduce_power(top, np.ones((2, 4)), cfg, p_step=-1.0)


def test_greedy_targets_cell_with_most_headroom_first():
    cfg, top = scaled_config(seed=0)
    links = evaluate_links(top, np.ones((2, 4)), np.array([40.0, 40.0]), cfg)
    per_cell_min = [links.rate_per_user[top.association == k].min()
                    for k in range(2)]
    _, trace = reduce_power(top, np.ones((2, 4)), cfg)
    assert trace[1].cell == int(np.argmax(per_cell_min))


def test_partial_mask_reduction_feasible():
    # Trim under a mask that switches two sub-bands off per cell.
    cfg, top = scaled_config(seed=8, scale=0.3)
    beta = np.array([[1, 1, 0, 0], [0, 0, 1, 1]])
    powers, trace = reduce_power(top, beta, cfg)
    links = evaluate_links(top, beta, powers, cfg)
    assert np.all(links.rate_per_user >= cfg.r_min)
    grid = power_grid_search(top, beta, cfg)
    np.testing.assert_allclose(powers, grid)
