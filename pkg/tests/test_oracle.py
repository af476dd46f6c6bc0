"""Brute-force baseline tests: the oracles must agree with the simulator."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from submask import (InfeasibleAtFullPower, InstanceTooLarge, NetworkConfig,
                     Scenario, build_topology, evaluate_links,
                     exhaustive_mask_search, full_power, mask_from_id,
                     mask_to_id, power_grid_search)

CFG = NetworkConfig(num_cells=2, num_subbands=4, users_per_cell=1)
TOP = build_topology(CFG, Scenario.ALL_EDGE, rng_seed=3)


@settings(max_examples=50, deadline=None)
@given(mask_id=st.integers(min_value=0, max_value=255))
def test_mask_id_roundtrip(mask_id):
    beta = mask_from_id(mask_id, 2, 4)
    assert beta.shape == (2, 4)
    assert mask_to_id(beta) == mask_id


def test_mask_id_order_is_lexicographic():
    flat_a = tuple(mask_from_id(37, 2, 4).ravel())
    flat_b = tuple(mask_from_id(38, 2, 4).ravel())
    assert flat_a < flat_b
    assert tuple(mask_from_id(0, 2, 4).ravel()) == (0,) * 8
    assert tuple(mask_from_id(255, 2, 4).ravel()) == (1,) * 8


def test_exhaustive_search_matches_direct_evaluation():
    result = exhaustive_mask_search(TOP, CFG)
    rng = np.random.default_rng(0)
    ids = np.concatenate([[0, 255], rng.integers(0, 256, size=40)])
    for mask_id in ids:
        beta = mask_from_id(int(mask_id), 2, 4)
        links = evaluate_links(TOP, beta, full_power(CFG), CFG)
        np.testing.assert_allclose(result.total_rate[mask_id],
                                   links.total_rate, rtol=1e-12)
        np.testing.assert_allclose(result.min_user_rate[mask_id],
                                   links.rate_per_user.min(), rtol=1e-12)
        want_feasible = bool(np.all(links.rate_per_user >= CFG.r_min))
        assert (int(mask_id) in set(map(int, result.feasible_ids))) == want_feasible
        assert result.is_feasible(beta) == want_feasible


def test_best_mask_maximizes_total_rate_with_low_id_tie_break():
    cfg = NetworkConfig(num_cells=2, num_subbands=4, users_per_cell=1,
                        r_min=7e6)
    result = exhaustive_mask_search(TOP, cfg)
    assert result.best_mask is not None
    feasible = set(map(int, result.feasible_ids))
    best_id = mask_to_id(result.best_mask)
    assert best_id in feasible
    totals = result.total_rate
    max_total = max(totals[i] for i in feasible)
    assert totals[best_id] == max_total
    assert best_id == min(i for i in feasible if totals[i] == max_total)


def test_no_feasible_mask_yields_none():
    cfg = NetworkConfig(num_cells=2, num_subbands=4, users_per_cell=1,
                        r_min=1e9)
    result = exhaustive_mask_search(TOP, cfg)
    assert result.best_mask is None
    assert result.best_total_rate == 0.0
    assert len(result.feasible_ids) == 0


def test_all_off_mask_never_feasible_with_positive_requirement():
    result = exhaustive_mask_search(TOP, CFG)
    assert 0 not in set(map(int, result.feasible_ids))
    assert result.min_user_rate[0] == 0.0


def test_max_min_user_rate_is_envelope():
    result = exhaustive_mask_search(TOP, CFG)
    assert result.max_min_user_rate == result.min_user_rate.max()
    assert result.max_min_user_rate >= result.min_user_rate[255]


def test_enumeration_cap():
    cfg = NetworkConfig(num_cells=3, num_subbands=8, users_per_cell=1)
    top = build_topology(cfg, Scenario.ALL_CENTER, rng_seed=0)
    with pytest.raises(InstanceTooLarge):
        exhaustive_mask_search(top, cfg)


def test_grid_cap_and_validation():
    cfg = NetworkConfig(num_cells=4, num_subbands=2, users_per_cell=1, r_min=1e5)
    top = build_topology(cfg, Scenario.ALL_CENTER, rng_seed=0)
    with pytest.raises(InstanceTooLarge):
        power_grid_search(top, np.ones((4, 2)), cfg)
    cfg2 = NetworkConfig(num_cells=2, num_subbands=4, users_per_cell=1, r_min=1e5)
    top2 = build_topology(cfg2, Scenario.ALL_CENTER, rng_seed=0)
    with pytest.raises(ValueError):
        power_grid_search(top2, np.ones((2, 4)), cfg2, p_step=0.0)


def test_grid_search_raises_when_full_power_infeasible():
    cfg = NetworkConfig(num_cells=2, num_subbands=4, users_per_cell=1, r_min=1e9)
    with pytest.raises(InfeasibleAtFullPower):
        power_grid_search(TOP, np.ones((2, 4)), cfg)


def grid_reference(topology, beta, cfg, p_step):
    """Sequential lattice scan: minimal dBm sum, ties to the
    lexicographically smallest power vector."""
    levels = int(np.floor((cfg.p_max - 0.0) / p_step + 1e-9)) + 1
    grid = [cfg.p_max - j * p_step for j in range(levels)]
    best = None
    for combo in itertools.product(grid, repeat=cfg.num_cells):
        powers = np.array(combo)
        links = evaluate_links(topology, beta, powers, cfg)
        if np.all(links.rate_per_user >= cfg.r_min):
            key = (powers.sum(), tuple(powers))
            if best is None or key < best[0]:
                best = (key, powers)
    if best is None:
        raise InfeasibleAtFullPower("no feasible lattice point")
    return best[1]


@pytest.mark.parametrize("seed,p_step", [(0, 8.0), (7, 5.0), (8, 10.0)])
def test_grid_search_matches_sequential_reference(seed, p_step):
    base = NetworkConfig(num_cells=2, num_subbands=4, users_per_cell=1)
    top = build_topology(base, Scenario.ALL_CENTER, rng_seed=seed)
    best = exhaustive_mask_search(top, base).max_min_user_rate
    cfg = NetworkConfig(num_cells=2, num_subbands=4, users_per_cell=1,
                        r_min=0.5 * best)
    beta = np.ones((2, 4))
    got = power_grid_search(top, beta, cfg, p_step=p_step)
    want = grid_reference(top, beta, cfg, p_step)
    np.testing.assert_allclose(got, want)


def test_grid_search_three_cells():
    cfg0 = NetworkConfig(num_cells=3, num_subbands=2, users_per_cell=1)
    top = build_topology(cfg0, Scenario.ALL_CENTER, rng_seed=1)
    best = exhaustive_mask_search(top, cfg0).max_min_user_rate
    cfg = NetworkConfig(num_cells=3, num_subbands=2, users_per_cell=1,
                        r_min=0.5 * best)
    beta = np.ones((3, 2))
    got = power_grid_search(top, beta, cfg, p_step=4.0)
    want = grid_reference(top, beta, cfg, 4.0)
    np.testing.assert_allclose(got, want)
    links = evaluate_links(top, beta, got, cfg)
    assert np.all(links.rate_per_user >= cfg.r_min)


def test_feasible_masks_property_shapes():
    result = exhaustive_mask_search(TOP, CFG)
    masks = result.feasible_masks
    assert len(masks) == len(result.feasible_ids)
    for beta, mask_id in zip(masks, result.feasible_ids):
        assert beta.shape == (2, 4)
        assert mask_to_id(beta) == int(mask_id)
