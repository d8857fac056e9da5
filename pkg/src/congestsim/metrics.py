"""Block metrics: independent-block merging, totals, heatmaps, histograms,
and block-log ingestion.

Raw blocks of one vehicle separated by gaps of at most ten seconds merge
into a single independent block whose duration is the sum of the raw
durations (gaps excluded). Totals are tracked in milliseconds and reported
in minutes.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from congestsim.world import Rect

MERGE_GAP_MS = 10_000


class MetricsError(ValueError):
    pass


@dataclass(frozen=True)
class RawBlock:
    vehicle_id: str
    start_ms: int
    end_ms: int
    x: float
    y: float

    @property
    def duration_ms(self) -> int:
        return self.end_ms - self.start_ms


@dataclass(frozen=True)
class IndependentBlock:
    vehicle_id: str
    start_ms: int
    end_ms: int
    duration_ms: int
    x: float
    y: float


@dataclass(frozen=True)
class CongestionSummary:
    total_block_count: int
    total_block_duration_ms: int

    @property
    def total_block_duration_min(self) -> float:
        return self.total_block_duration_ms / 60_000.0


def merge_blocks(raw) -> list[IndependentBlock]:
    """Merge per-vehicle raw blocks with inter-event gaps <= 10 s.

    The merged duration sums the constituent durations; the position is the
    first constituent's. Accepts its own output (idempotent). Events of one
    vehicle must be ordered and disjoint.
    """
    by_vehicle: dict[str, list] = {}
    for ev in raw:
        by_vehicle.setdefault(ev.vehicle_id, []).append(ev)
    out: list[IndependentBlock] = []
    for vid in sorted(by_vehicle):
        events = by_vehicle[vid]
        for prev, nxt in zip(events, events[1:]):
            if nxt.start_ms < prev.end_ms:
                raise MetricsError(
                    f"vehicle {vid}: raw events out of order or overlapping")
        cur = None
        for ev in events:
            dur = ev.duration_ms
            if cur is None:
                cur = [ev.start_ms, ev.end_ms, dur, ev.x, ev.y]
            elif ev.start_ms - cur[1] <= MERGE_GAP_MS:
                cur[1] = ev.end_ms
                cur[2] += dur
            else:
                out.append(IndependentBlock(vid, cur[0], cur[1], cur[2], cur[3], cur[4]))
                cur = [ev.start_ms, ev.end_ms, dur, ev.x, ev.y]
        if cur is not None:
            out.append(IndependentBlock(vid, cur[0], cur[1], cur[2], cur[3], cur[4]))
    return out


def summarize(blocks) -> CongestionSummary:
    blocks = list(blocks)
    return CongestionSummary(
        total_block_count=len(blocks),
        total_block_duration_ms=sum(b.duration_ms for b in blocks),
    )


def heatmap(blocks, bounds: Rect, cell_m: float = 5.0,
            weight: str = "count") -> np.ndarray:
    """Bin block positions on a grid over ``bounds``.

    weight "count" adds 1 per block; "duration" adds the block duration in
    minutes. Out-of-bounds positions clamp to the edge cells. Returns a
    (rows, cols) array indexed [iy, ix].
    """
    if cell_m <= 0:
        raise MetricsError("cell size must be positive")
    if weight not in ("count", "duration"):
        raise MetricsError(f"unknown weight {weight!r}")
    nx = max(1, int(math.ceil(bounds.width / cell_m)))
    ny = max(1, int(math.ceil(bounds.height / cell_m)))
    grid = np.zeros((ny, nx), dtype=np.float64)
    for b in blocks:
        ix = int(math.floor((b.x - bounds.min_x) / cell_m))
        iy = int(math.floor((b.y - bounds.min_y) / cell_m))
        ix = min(max(ix, 0), nx - 1)
        iy = min(max(iy, 0), ny - 1)
        grid[iy, ix] += 1.0 if weight == "count" else b.duration_ms / 60_000.0
    return grid


def start_time_histogram(blocks, bucket_s: float = 60.0,
                         horizon_s: float | None = None) -> list[int]:
    """Counts of block start times per half-open bucket [i*b, (i+1)*b).

    ``horizon_s`` extends (never truncates) the bucket range, so the bucket
    sum always equals the block count.
    """
    if bucket_s <= 0:
        raise MetricsError("bucket size must be positive")
    bucket_ms = int(round(bucket_s * 1000.0))
    idxs = [b.start_ms // bucket_ms for b in blocks]
    n = 0
    if horizon_s is not None:
        n = int(math.ceil(horizon_s / bucket_s))
    if idxs:
        n = max(n, max(idxs) + 1)
    counts = [0] * n
    for i in idxs:
        counts[i] += 1
    return counts


def duration_histogram(blocks, bucket_s: float = 30.0,
                       horizon_s: float | None = None) -> list[int]:
    """Counts of block durations per half-open bucket."""
    if bucket_s <= 0:
        raise MetricsError("bucket size must be positive")
    bucket_ms = int(round(bucket_s * 1000.0))
    idxs = [b.duration_ms // bucket_ms for b in blocks]
    n = 0
    if horizon_s is not None:
        n = int(math.ceil(horizon_s / bucket_s))
    if idxs:
        n = max(n, max(idxs) + 1)
    counts = [0] * n
    for i in idxs:
        counts[i] += 1
    return counts


def ingest_block_log(path) -> list[RawBlock]:
    """Read raw block events from a trial log (JSONL) or the external CSV
    schema (vehicle_id, start_ms, end_ms, x, y).

    Rows with end_ms < start_ms are errors; zero-length intervals carry no
    blockage and are dropped.
    """
    path = Path(path)
    text = path.read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return _ingest_jsonl(text, path)
    return _ingest_csv(text, path)


def _ingest_jsonl(text: str, path) -> list[RawBlock]:
    open_blocks: dict[str, tuple[int, float, float]] = {}
    out: list[RawBlock] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MetricsError(f"{path}:{lineno}: bad JSON: {exc}") from exc
        event = rec.get("event")
        if event == "block_start":
            vid = rec["vehicle_id"]
            if vid in open_blocks:
                raise MetricsError(f"{path}:{lineno}: nested block for {vid}")
            open_blocks[vid] = (int(rec["t_ms"]), float(rec["x"]), float(rec["y"]))
        elif event == "block_end":
            vid = rec["vehicle_id"]
            if vid not in open_blocks:
                raise MetricsError(f"{path}:{lineno}: unmatched block_end for {vid}")
            start, x, y = open_blocks.pop(vid)
            end = int(rec["t_ms"])
            if end < start:
                raise MetricsError(f"{path}:{lineno}: block ends before it starts")
            out.append(RawBlock(vid, start, end, x, y))
    if open_blocks:
        vids = ", ".join(sorted(open_blocks))
        raise MetricsError(f"{path}: unclosed blocks for {vids}")
    out.sort(key=lambda b: (b.vehicle_id, b.start_ms))
    return out


def _ingest_csv(text: str, path) -> list[RawBlock]:
    reader = csv.DictReader(text.splitlines())
    required = {"vehicle_id", "start_ms", "end_ms", "x", "y"}
    if reader.fieldnames is None or not required.issubset(reader.fieldnames):
        raise MetricsError(
            f"{path}: CSV header must contain {sorted(required)}")
    out: list[RawBlock] = []
    for lineno, row in enumerate(reader, 2):
        try:
            start = int(row["start_ms"])
            end = int(row["end_ms"])
            rb = RawBlock(row["vehicle_id"], start, end,
                          float(row["x"]), float(row["y"]))
        except (TypeError, ValueError) as exc:
            raise MetricsError(f"{path}:{lineno}: bad row: {exc}") from exc
        if end < start:
            raise MetricsError(f"{path}:{lineno}: end_ms < start_ms")
        if end > start:
            out.append(rb)
    out.sort(key=lambda b: (b.vehicle_id, b.start_ms))
    return out


def heatmap_to_csv(grid: np.ndarray, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in grid:
            writer.writerow([repr(v) for v in row])


def heatmap_to_pgm(grid: np.ndarray, path) -> None:
    """Render as an ASCII portable graymap, brightest cell = 255."""
    peak = float(grid.max()) if grid.size else 0.0
    ny, nx = grid.shape
    lines = ["P2", f"{nx} {ny}", "255"]
    for iy in range(ny - 1, -1, -1):  # north-up image
        if peak > 0:
            vals = [str(int(round(v / peak * 255.0))) for v in grid[iy]]
        else:
            vals = ["0"] * nx
        lines.append(" ".join(vals))
    Path(path).write_text("\n".join(lines) + "\n")


def histogram_to_csv(counts, bucket_s: float, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bucket_start_s", "count"])
        for i, c in enumerate(counts):
            writer.writerow([repr(i * bucket_s), c])
