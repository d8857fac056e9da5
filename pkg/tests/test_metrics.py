"""Independent-block merging, summaries, binning, and ingestion."""

import numpy as np
import pytest

from congestsim.metrics import (
    IndependentBlock,
    MetricsError,
    RawBlock,
    duration_histogram,
    heatmap,
    heatmap_to_pgm,
    ingest_block_log,
    merge_blocks,
    start_time_histogram,
    summarize,
)
from congestsim.world import Rect


def rb(vid, s, e, x=0.0, y=0.0):
    return RawBlock(vid, s, e, x, y)


def test_merge_within_ten_seconds_sums_durations():
    blocks = merge_blocks([rb("v", 0, 4000), rb("v", 9000, 12_000)])
    assert len(blocks) == 1
    b = blocks[0]
    assert b.start_ms == 0
    assert b.duration_ms == 7000  # gap excluded
    assert b.end_ms == 12_000


def test_gap_over_ten_seconds_stays_separate():
    blocks = merge_blocks([rb("v", 0, 4000), rb("v", 15_000, 18_000)])
    assert len(blocks) == 2


def test_boundary_gap_exactly_ten_seconds_merges():
    blocks = merge_blocks([rb("v", 0, 1000), rb("v", 11_000, 12_000)])
    assert len(blocks) == 1


def test_vehicles_never_merge_together():
    blocks = merge_blocks([rb("a", 0, 1000), rb("b", 1500, 2500)])
    assert len(blocks) == 2


def test_merged_position_is_first_constituents():
    blocks = merge_blocks([rb("v", 0, 1000, 3.0, 4.0), rb("v", 2000, 3000, 9.0, 9.0)])
    assert (blocks[0].x, blocks[0].y) == (3.0, 4.0)


def test_unordered_input_rejected():
    with pytest.raises(MetricsError, match="order"):
        merge_blocks([rb("v", 5000, 6000), rb("v", 0, 1000)])


from _oracles import merge_oracle as _merge_oracle
from _oracles import random_raw_stream as _random_stream


def test_merge_matches_quadratic_oracle_on_random_streams():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        events = _random_stream(rng)
        got = merge_blocks(events)
        expected = _merge_oracle(events)
        assert got == expected


def test_merge_is_idempotent():
    rng = np.random.default_rng(55)
    for _ in range(200):
        events = _random_stream(rng)
        once = merge_blocks(events)
        twice = merge_blocks(once)
        assert once == twice


def test_duration_conservation():
    rng = np.random.default_rng(9)
    for _ in range(100):
        events = _random_stream(rng)
        merged = merge_blocks(events)
        assert sum(b.duration_ms for b in merged) == \
               sum(e.duration_ms for e in events)


def test_summarize():
    assert summarize([]).total_block_count == 0
    assert summarize([]).total_block_duration_min == 0.0
    one = merge_blocks([rb("v", 0, 90_000)])
    s = summarize(one)
    assert (s.total_block_count, s.total_block_duration_min) == (1, 1.5)
    three = merge_blocks([rb("a", 0, 30_000), rb("b", 0, 30_000),
                          rb("c", 0, 30_000)])
    s = summarize(three)
    assert (s.total_block_count, s.total_block_duration_min) == (3, 1.5)


def test_heatmap_single_block():
    bounds = Rect(0, 0, 50, 50)
    blocks = merge_blocks([rb("v", 0, 1000, 12.5, 37.5)])
    grid = heatmap(blocks, bounds, 5.0, "count")
    assert grid.shape == (10, 10)
    assert grid[7, 2] == 1.0
    assert grid.sum() == 1.0


def test_heatmap_duration_weight():
    bounds = Rect(0, 0, 10, 10)
    blocks = merge_blocks([rb("a", 0, 60_000, 2.5, 2.5),
                           rb("b", 0, 120_000, 2.5, 2.5)])
    grid = heatmap(blocks, bounds, 5.0, "duration")
    assert grid[0, 0] == pytest.approx(3.0)


def test_heatmap_out_of_bounds_clamps_and_conserves():
    bounds = Rect(0, 0, 20, 20)
    rng = np.random.default_rng(12)
    blocks = merge_blocks([
        rb(f"v{i}", i * 100_000, i * 100_000 + 1000,
           float(rng.uniform(-10, 30)), float(rng.uniform(-10, 30)))
        for i in range(200)
    ])
    grid = heatmap(blocks, bounds, 5.0, "count")
    assert grid.sum() == len(blocks)


def test_histogram_boundaries():
    blocks = merge_blocks([rb("a", 0, 1000), rb("b", 59_000, 60_500),
                           rb("c", 60_000, 61_000)])
    assert start_time_histogram(blocks, 60.0) == [2, 1]


def test_histogram_empty_with_horizon():
    assert start_time_histogram([], 60.0, horizon_s=300.0) == [0] * 5


def test_histogram_conservation_random():
    rng = np.random.default_rng(31)
    for _ in range(100):
        blocks = merge_blocks(_random_stream(rng))
        counts = start_time_histogram(blocks, 60.0)
        assert sum(counts) == len(blocks)
        durs = duration_histogram(blocks, 30.0)
        assert sum(durs) == len(blocks)


def test_ingest_csv(tmp_path):
    p = tmp_path / "blocks.csv"
    p.write_text("vehicle_id,start_ms,end_ms,x,y\nv1,0,5000,10,10\n")
    events = ingest_block_log(p)
    assert events == [RawBlock("v1", 0, 5000, 10.0, 10.0)]


def test_ingest_csv_end_before_start(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("vehicle_id,start_ms,end_ms,x,y\nv1,5000,0,10,10\n")
    with pytest.raises(MetricsError, match="end_ms"):
        ingest_block_log(p)


def test_ingest_csv_missing_header(tmp_path):
    p = tmp_path / "head.csv"
    p.write_text("vehicle,begin,finish\nv1,0,5\n")
    with pytest.raises(MetricsError, match="header"):
        ingest_block_log(p)


def test_pgm_render(tmp_path):
    grid = np.array([[0.0, 1.0], [2.0, 4.0]])
    p = tmp_path / "map.pgm"
    heatmap_to_pgm(grid, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "P2"
    assert lines[1] == "2 2"
    assert lines[2] == "255"
    # north-up: the last grid row renders first
    assert lines[3].split() == ["128", "255"]
    assert lines[4].split() == ["0", "64"]
