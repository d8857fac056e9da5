"""Independent oracles shared by the unit and acceptance suites."""

from congestsim.metrics import IndependentBlock, RawBlock


def merge_oracle(events):
    """Quadratic clustering: union-find over pairs with gap <= 10 s."""
    out = []
    by_v = {}
    for e in events:
        by_v.setdefault(e.vehicle_id, []).append(e)
    for vid in sorted(by_v):
        evs = sorted(by_v[vid], key=lambda e: e.start_ms)
        cluster_id = list(range(len(evs)))
        for i in range(len(evs)):
            for j in range(len(evs)):
                if i == j:
                    continue
                gap = max(evs[j].start_ms - evs[i].end_ms,
                          evs[i].start_ms - evs[j].end_ms)
                if gap <= 10_000:
                    a, b = cluster_id[i], cluster_id[j]
                    for k in range(len(evs)):
                        if cluster_id[k] == max(a, b):
                            cluster_id[k] = min(a, b)
        for cid in sorted(set(cluster_id)):
            members = [e for e, c in zip(evs, cluster_id) if c == cid]
            out.append(IndependentBlock(
                vid, members[0].start_ms, members[-1].end_ms,
                sum(m.end_ms - m.start_ms for m in members),
                members[0].x, members[0].y))
    return out


def random_raw_stream(rng):
    """Random per-vehicle ordered, disjoint raw block events."""
    events = []
    for v in range(int(rng.integers(1, 4))):
        t = 0
        for _ in range(int(rng.integers(0, 8))):
            t += int(rng.integers(1, 20_000))
            d = int(rng.integers(1, 15_000))
            events.append(RawBlock(f"v{v}", t, t + d,
                                   float(rng.uniform(0, 50)),
                                   float(rng.uniform(0, 50))))
            t += d
    return events
