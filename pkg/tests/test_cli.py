"""CLI subcommands end to end (in-process via main())."""

import json

import pytest

from congestsim.cli import main


def test_worlds_lists_builtins(capsys):
    assert main(["worlds"]) == 0
    out = capsys.readouterr().out
    assert "cassidy-like" in out and "leschi-like" in out


def test_capacity_mixed(capsys):
    rc = main(["capacity", "--length", "170", "--width", "7.5",
               "--policy", "mixed", "--ugvs", "18", "--uavs", "112"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "18 UGVs + 112 UAVs = 130 vehicles" in out


def test_layout_generate_and_check(tmp_path, capsys):
    cfg = tmp_path / "layout.json"
    rc = main(["layout", "--world", "cassidy-like", "--pattern", "hexagonal",
               "--spacing", "2", "--rows", "5", "--cols", "8",
               "--uavs", "40", "--out", str(cfg)])
    assert rc == 0
    assert cfg.exists()
    rc = main(["layout", "--world", "cassidy-like", "--check", str(cfg)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "0 violations" in out


def test_layout_check_reports_violations(tmp_path, capsys):
    cfg = tmp_path / "naive.json"
    data = {
        "pattern": "square", "spacing_m": 1.5, "rows": 2, "cols": 2,
        "vehicles": [{"id": f"u{i}", "platform": "Solo", "camera": "forward"}
                     for i in range(4)],
    }
    cfg.write_text(json.dumps(data))
    rc = main(["layout", "--world", "cassidy-like", "--check", str(cfg)])
    assert rc == 1
    assert "violations" in capsys.readouterr().out


def test_plan_subcommand(tmp_path, capsys):
    out = tmp_path / "plan.json"
    rc = main(["plan", "--world", "cassidy-like", "--building-set", "cassidy",
               "--waves", "6", "--out", str(out)])
    assert rc == 0
    stdout = capsys.readouterr().out
    assert "wave 1: 12,21" in stdout
    data = json.loads(out.read_text())
    assert data["num_waves"] == 6


def test_run_and_compare(tmp_path, capsys):
    log1 = tmp_path / "t1.jsonl"
    rc = main(["run", "--world", "cassidy-like", "--building-set",
               "cassidy-desk", "--seed", "3", "--duration", "120",
               "--out", str(log1)])
    assert rc == 0
    assert "blocks" in capsys.readouterr().out
    assert log1.exists()

    rc = main(["compare", "--real", str(log1), "--sim", str(log1),
               "--bucket", "20", "--out-dir", str(tmp_path / "cmp")])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    assert report["count_series_r"] == pytest.approx(1.0)
    assert (tmp_path / "cmp" / "report.json").exists()


def test_run_with_injection(tmp_path, capsys):
    log = tmp_path / "t.jsonl"
    rc = main(["run", "--world", "cassidy-like", "--building-set",
               "cassidy-desk", "--seed", "3", "--duration", "90",
               "--rtl-inject", "20:uav-001", "--out", str(log)])
    assert rc == 0
    assert any(json.loads(line).get("detail") == "rtl_injected"
               for line in log.read_text().splitlines())


def test_sweep_profile_desk_small(tmp_path, capsys):
    cfg = {
        "world": "cassidy-like",
        "building_ids": ["28", "43"],
        "spacings_m": [2.0],
        "wave_counts": [1],
        "patterns": ["square"],
        "trials": 2,
        "rows": 2,
        "cols": 5,
        "post_wave_duration_s": 45.0,
        "base_seed": 5,
        "out_dir": str(tmp_path / "s"),
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    rc = main(["sweep", "--config", str(cfg_path), "--workers", "1"])
    assert rc == 0
    assert (tmp_path / "s" / "summary.csv").exists()
    assert "2 trials recorded" in capsys.readouterr().out


def test_stats_subcommands(tmp_path, capsys):
    anova_csv = tmp_path / "anova.csv"
    lines = ["A,B,value"]
    vals = {
        ("a1", "b1"): [12.1, 11.8, 12.5, 11.9, 12.3],
        ("a1", "b2"): [14.2, 14.8, 13.9, 14.5, 14.1],
        ("a2", "b1"): [10.2, 10.8, 9.9, 10.5, 10.4],
        ("a2", "b2"): [13.0, 12.6, 13.4, 12.8, 13.1],
    }
    for (a, b), vs in vals.items():
        lines += [f"{a},{b},{v}" for v in vs]
    anova_csv.write_text("\n".join(lines) + "\n")
    rc = main(["stats", "anova", "--data", str(anova_csv),
               "--factors", "A,B", "--value", "value"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "115.126" in out

    tukey_csv = tmp_path / "tukey.csv"
    rows = ["group,value"]
    rows += [f"low,{v}" for v in (0.0, 0.2, -0.1, 0.1, -0.2)]
    rows += [f"high,{v}" for v in (10.0, 10.2, 9.9, 10.1, 9.8)]
    tukey_csv.write_text("\n".join(rows) + "\n")
    rc = main(["stats", "tukey", "--data", str(tukey_csv)])
    assert rc == 0
    assert "True" in capsys.readouterr().out

    xy_csv = tmp_path / "xy.csv"
    xy_csv.write_text("x,y\n" + "\n".join(f"{i},{2 * i + 1}" for i in range(10)))
    rc = main(["stats", "pearson", "--data", str(xy_csv)])
    assert rc == 0
    assert "r=1.000000" in capsys.readouterr().out
