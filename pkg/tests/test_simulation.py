import numpy as np
import pytest

from src.errors import OutOfScopeError
from src.parking import compare_with_oracle, forest_convolution_table, gw_parking_mc
from src.parking.simulation import _tree_sizes
from src.weights import Polynomial


def test_tree_sizes_from_offspring_walk():
    offspring = np.array(
        [
            [0, 5, 5, 5],
            [1, 0, 5, 5],
            [2, 0, 1, 0],
            [1, 1, 1, 1],
        ]
    )
    assert _tree_sizes(offspring).tolist() == [1, 2, 4, 0]


def test_one_car_per_vertex_always_parks():
    ws = Polynomial.of(0, 1)
    result = gw_parking_mc(ws, 5000, seed=3, max_size=10, chunk_size=1000)
    parked = sum(result.parked.values())
    assert parked == sum(result.sizes.values())
    assert all(p == 0 for _, p in result.parked)
    assert parked + result.censored == 5000


def test_results_do_not_depend_on_workers(half_zero_half):
    serial = gw_parking_mc(half_zero_half, 4000, seed=9, max_size=8, workers=1, chunk_size=1000)
    parallel = gw_parking_mc(half_zero_half, 4000, seed=9, max_size=8, workers=2, chunk_size=1000)
    assert serial.parked == parallel.parked
    assert serial.sizes == parallel.sizes
    assert serial.censored == parallel.censored
    assert serial.cluster_sizes == parallel.cluster_sizes


def test_different_seeds_differ(half_zero_half):
    a = gw_parking_mc(half_zero_half, 2000, seed=1, max_size=8)
    b = gw_parking_mc(half_zero_half, 2000, seed=2, max_size=8)
    assert a.sizes != b.sizes


def test_frames(half_zero_half):
    result = gw_parking_mc(half_zero_half, 1000, seed=5, max_size=6)
    frame = result.to_frame(n_max=4, p_max=2)
    assert list(frame.columns) == ["n", "p", "count", "probability", "stderr"]
    assert len(frame) == 4 * 3
    clusters = result.cluster_frame()
    assert clusters["count"].sum() > 0
    # clusters live inside uncensored trees
    assert clusters["cluster_size"].max() <= result.max_size
    assert result.to_dict()["samples"] == 1000


def test_needs_a_probability_distribution(poly_101, geometric_half):
    with pytest.raises(OutOfScopeError):
        gw_parking_mc(poly_101, 10, seed=0)
    with pytest.raises(OutOfScopeError):
        gw_parking_mc(geometric_half, 10, seed=0)


@pytest.mark.slow
def test_frequencies_match_exact_probabilities(half_zero_half):
    n_max, p_max = 5, 4
    table = forest_convolution_table(half_zero_half, n_max)
    result = gw_parking_mc(half_zero_half, 400_000, seed=42, max_size=n_max)
    frame = compare_with_oracle(result, table, n_max, p_max)
    assert frame["z"].abs().max() < 3.0
