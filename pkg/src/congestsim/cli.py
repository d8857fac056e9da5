"""Command-line interface: capacity, layout, plan, run, sweep, compare,
and stats subcommands. All outputs land under a run directory with a
manifest recording config and seeds; CONGESTSIM_WORKERS caps sweep
parallelism."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from congestsim import experiments, metrics, stats
from congestsim.experiments import (
    SweepConfig,
    cassidy_paper_config,
    compare_real_vs_sim,
    desk_sweep_config,
    leschi_paper_config,
    resolve_world,
    run_sweep,
    uav_manifest,
)
from congestsim.launchzone import (
    MixRule,
    generate_layout,
    load_layout_config,
    max_capacity,
    save_layout_config,
    validate_layout,
)
from congestsim.maps import building_set, builtin_names
from congestsim.mission import build_mission_plan, load_mission_plan, save_mission_plan
from congestsim.sim import run_trial
from congestsim.world import Rect, save_world


def _cmd_worlds(args) -> int:
    for name in builtin_names():
        world = resolve_world(name)
        print(f"{name}: {len(world.buildings)} buildings, "
              f"bounds {world.bounds.width:g}x{world.bounds.height:g} m")
        if args.export:
            path = Path(args.export) / f"{name}.json"
            path.parent.mkdir(parents=True, exist_ok=True)
            save_world(world, path)
            print(f"  wrote {path}")
    return 0


def _cmd_capacity(args) -> int:
    zone = Rect(0.0, 0.0, args.length, args.width)
    mix = MixRule(policy=args.policy, ugv_target=args.ugvs,
                  uav_target=args.uavs, max_cols=args.max_cols)
    result = max_capacity(zone, mix, args.pattern)
    print(f"zone {args.length:g} x {args.width:g} m ({args.policy}): "
          f"{result.ugv_count} UGVs + {result.uav_count} UAVs "
          f"= {result.ugv_count + result.uav_count} vehicles")
    if args.out:
        save_layout_config(result.layout, 0, 0, args.out)
        print(f"wrote {args.out}")
    return 0


def _cmd_layout(args) -> int:
    world = resolve_world(args.world)
    if args.check:
        pattern, spacing, rows, cols, manifest = load_layout_config(args.check)
        layout = generate_layout(world, pattern, spacing, manifest, rows, cols,
                                 check=False)
        violations = validate_layout(layout, world)
        for v in violations:
            print(v)
        print(f"{len(violations)} violations")
        return 1 if violations else 0
    n = args.uavs
    manifest = uav_manifest((n + 4) // 5)[:n]
    layout = generate_layout(world, args.pattern, args.spacing, manifest,
                             args.rows, args.cols)
    print(f"{len(layout.slots)} slots on {args.world} "
          f"({args.pattern}, {args.spacing:g} m)")
    if args.out:
        save_layout_config(layout, args.rows, args.cols, args.out)
        print(f"wrote {args.out}")
    return 0


def _cmd_plan(args) -> int:
    world = resolve_world(args.world)
    ids = args.buildings.split(",") if args.buildings else building_set(args.building_set)
    plan = build_mission_plan(world, ids, args.waves, args.delay,
                              args.building_set or "custom")
    for k, wave in enumerate(plan.waves, 1):
        print(f"wave {k}: {','.join(t.target for t in wave)}")
    if args.out:
        save_mission_plan(plan, args.out)
        print(f"wrote {args.out}")
    return 0


def _cmd_run(args) -> int:
    world = resolve_world(args.world)
    if args.plan:
        plan = load_mission_plan(args.plan)
    else:
        ids = building_set(args.building_set)
        plan = build_mission_plan(world, ids, args.waves, building_set=args.building_set)
    if args.layout:
        pattern, spacing, rows, cols, manifest = load_layout_config(args.layout)
    else:
        pattern, spacing, rows, cols = args.pattern, args.spacing, args.rows, args.cols
        manifest = uav_manifest(len(plan.all_building_ids()))
    layout = generate_layout(world, pattern, spacing, manifest, rows, cols)
    injections = []
    for item in args.rtl_inject or []:
        t_s, vid = item.split(":", 1)
        injections.append((float(t_s), vid))
    log = run_trial(world, layout, plan, args.seed,
                    duration_after_last_wave_s=args.duration,
                    rtl_injections=injections or None, audit=True)
    blocks = metrics.merge_blocks(log.raw_block_records())
    summary = metrics.summarize(blocks)
    print(f"trial seed {args.seed}: {summary.total_block_count} blocks, "
          f"{summary.total_block_duration_min:.3f} min total duration, "
          f"min separation {log.min_separation:.3f} m")
    if args.out:
        log.write(args.out)
        print(f"wrote {args.out}")
    return 0


_PROFILES = {
    "desk": desk_sweep_config,
    "leschi-paper": leschi_paper_config,
    "cassidy-paper": cassidy_paper_config,
}


def _cmd_sweep(args) -> int:
    if args.config:
        cfg_data = json.loads(Path(args.config).read_text())
        if args.out_dir:
            cfg_data["out_dir"] = args.out_dir
        config = SweepConfig.from_dict(cfg_data)
    else:
        maker = _PROFILES[args.profile]
        overrides = {}
        if args.trials is not None:
            overrides["trials"] = args.trials
        if args.seed is not None:
            overrides["base_seed"] = args.seed
        config = maker(args.out_dir or f"sweep-{args.profile}", **overrides)
    out = run_sweep(config, workers=args.workers)
    print(f"sweep complete: {out}")
    summary = experiments.load_summary(out)
    print(f"{len(summary)} trials recorded in {out / 'summary.csv'}")
    return 0


def _cmd_compare(args) -> int:
    report = compare_real_vs_sim(args.real, args.sim, bucket_s=args.bucket,
                                 duration_bucket_s=args.duration_bucket,
                                 out_dir=args.out_dir)
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def _read_table(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _cmd_stats(args) -> int:
    rows = _read_table(args.data)
    if args.mode == "anova":
        factors = args.factors.split(",")
        obs = [(tuple(r[f] for f in factors), float(r[args.value])) for r in rows]
        result = stats.anova_between_groups(obs, factors)
        writer = csv.writer(sys.stdout)
        writer.writerow(["effect", "F", "df_effect", "df_error", "p"])
        for e in result.effects:
            writer.writerow([e.effect, f"{e.f:.6g}", e.df_effect, e.df_error,
                             f"{e.p:.6g}"])
    elif args.mode == "tukey":
        groups: dict[str, list[float]] = {}
        for r in rows:
            groups.setdefault(r[args.group], []).append(float(r[args.value]))
        result = stats.tukey_hsd(groups, alpha=args.alpha)
        writer = csv.writer(sys.stdout)
        writer.writerow(["group_a", "group_b", "mean_difference", "q",
                         "significant"])
        for p in result.pairs:
            writer.writerow([p.group_a, p.group_b, f"{p.mean_difference:.6g}",
                             f"{p.q:.6g}", p.significant])
    else:
        x = [float(r[args.x]) for r in rows]
        y = [float(r[args.y]) for r in rows]
        result = stats.pearson(x, y)
        print(f"r={result.r:.6f} n={result.n} p={result.p:.3g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="congestsim",
        description="Swarm launch-zone congestion simulator and experiment harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("worlds", help="list or export builtin maps")
    p.add_argument("--export", help="directory to write world JSON files")
    p.set_defaults(func=_cmd_worlds)

    p = sub.add_parser("capacity", help="launch-zone capacity analysis")
    p.add_argument("--length", type=float, required=True)
    p.add_argument("--width", type=float, required=True)
    p.add_argument("--policy", choices=["mixed", "block", "uav_only"],
                   default="uav_only")
    p.add_argument("--ugvs", type=int, default=0)
    p.add_argument("--uavs", type=int, default=None)
    p.add_argument("--max-cols", type=int, default=None)
    p.add_argument("--pattern", choices=["square", "hexagonal"], default="square")
    p.add_argument("--out", help="write the realizing layout config")
    p.set_defaults(func=_cmd_capacity)

    p = sub.add_parser("layout", help="generate or validate a launch-zone layout")
    p.add_argument("--world", default="cassidy-like")
    p.add_argument("--pattern", choices=["square", "hexagonal"], default="square")
    p.add_argument("--spacing", type=float, default=2.0)
    p.add_argument("--rows", type=int, default=6)
    p.add_argument("--cols", type=int, default=10)
    p.add_argument("--uavs", type=int, default=60)
    p.add_argument("--check", help="validate an existing layout config file")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_layout)

    p = sub.add_parser("plan", help="build a wave-structured mission plan")
    p.add_argument("--world", default="cassidy-like")
    p.add_argument("--building-set", default="cassidy")
    p.add_argument("--buildings", help="comma-separated ids (overrides the set)")
    p.add_argument("--waves", type=int, default=1)
    p.add_argument("--delay", type=float, default=90.0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("run", help="run a single trial")
    p.add_argument("--world", default="cassidy-like")
    p.add_argument("--building-set", default="cassidy-desk")
    p.add_argument("--plan", help="mission plan file")
    p.add_argument("--layout", help="launch-zone config file")
    p.add_argument("--pattern", choices=["square", "hexagonal"], default="square")
    p.add_argument("--spacing", type=float, default=2.0)
    p.add_argument("--rows", type=int, default=5)
    p.add_argument("--cols", type=int, default=8)
    p.add_argument("--waves", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--duration", type=float, default=300.0,
                   help="seconds after the last wave")
    p.add_argument("--rtl-inject", action="append", metavar="T:VEHICLE",
                   help="force an RTL at time T seconds (repeatable)")
    p.add_argument("--out", help="trial log path (JSONL)")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("sweep", help="run a parameter sweep")
    p.add_argument("--profile", choices=sorted(_PROFILES), default="desk")
    p.add_argument("--config", help="sweep config JSON (overrides profile)")
    p.add_argument("--out-dir")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("compare", help="compare a real block log with sim logs")
    p.add_argument("--real", required=True)
    p.add_argument("--sim", nargs="+", required=True)
    p.add_argument("--bucket", type=float, default=60.0)
    p.add_argument("--duration-bucket", type=float, default=30.0)
    p.add_argument("--out-dir")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("stats", help="ANOVA / Tukey / Pearson on a CSV table")
    p.add_argument("mode", choices=["anova", "tukey", "pearson"])
    p.add_argument("--data", required=True, help="CSV input")
    p.add_argument("--factors", help="anova: comma-separated factor columns")
    p.add_argument("--value", default="value")
    p.add_argument("--group", default="group")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--x", default="x")
    p.add_argument("--y", default="y")
    p.set_defaults(func=_cmd_stats)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
