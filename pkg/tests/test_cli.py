import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from bohrlab.cli import (ConfigError, load_config, main, replay_report,
                         run_experiment)

FIXTURES = Path(__file__).parent / "fixtures"


def _run(name, **overrides):
    config = load_config(str(FIXTURES / name))
    config.update({k: str(v) for k, v in overrides.items()})
    return run_experiment(config)


def test_group_info_payload():
    report = _run("group_info_z12.ini")
    assert report.status == "ok"
    assert report.payload["order"] == 12
    assert report.payload["abelian"] is True
    assert report.config["seed"] == "0"


def test_irreps_payload():
    report = _run("irreps_s4.ini")
    assert report.status == "ok"
    assert sorted(report.payload["dims"]) == [1, 1, 2, 3, 3]
    assert report.payload["sum_dim_sq"] == 24
    assert report.payload["max_hom_residual"] <= 1e-9


def test_bohr_payload():
    report = _run("bohr_z12.ini")
    assert report.status == "ok"
    assert report.payload["spec"]["realized_members"] == [0, 1, 11]
    assert report.payload["cover_count"] == 4
    assert report.payload["nm"] == {"m": 1, "size": 3, "cover_bound": 7,
                                    "cover_actual": 4, "bound_ok": True}


def test_bohr_nonabelian_nm():
    # quaternion:8 irreps sort with the 2-dim irrep last (index 4)
    report = run_experiment({"kind": "bohr", "group": "quaternion:8",
                             "summands": "4", "delta": "1.0", "nm": "true"})
    assert report.status == "ok"
    assert report.payload["nm"]["m"] == 2
    assert report.payload["spec"]["kind"] == "unitary"


def test_bohr_nm_simple_group_errors(tmp_path):
    cfg = tmp_path / "a5.ini"
    cfg.write_text("[experiment]\nkind = bohr\ngroup = alt:5\n"
                   "summands = 1\ndelta = 1.0\nnm = true\n")
    code = main(["bohr", "--config", str(cfg), "--out", str(tmp_path / "o.json")])
    assert code == 1


def test_ladder_payload_and_budget_exhaustion():
    ok = _run("ladder_z4.ini")
    assert ok.status == "ok"
    assert ok.payload["search_status"] in ("exact", "capped")
    starved = _run("ladder_budget1.ini")
    assert starved.status == "inconclusive"
    assert starved.payload["search_status"] == "inconclusive"


def test_convolve_payload():
    report = _run("convolve_z16.ini")
    assert report.status == "ok"
    assert report.payload["fubini_residual"] < 1e-12
    assert report.payload["fft_residual"] < 1e-10


def test_regularity_fixture_certificate():
    report = _run("regularity_zpz.ini")
    assert report.status == "ok"
    cert = report.payload["certificate"]
    assert cert["max_defect"] == 0.0
    assert cert["bohr_spec"]["kind"] == "torus"
    assert report.payload["table"]


def test_regularity_csv_columns(tmp_path):
    report = _run("regularity_zpz.ini")
    text = report.to_csv()
    rows = list(csv.DictReader(text.splitlines()))
    assert set(rows[0].keys()) == {"translate_rep", "defect", "range"}
    assert len(rows) == 101


def test_quasirandom_csv_rows():
    report = _run("quasirandom_a5.ini")
    assert report.status == "ok"
    text = report.to_csv()
    rows = list(csv.DictReader(text.splitlines()))
    assert len(rows) == 10
    assert {"trial", "seed", "ab_density", "abc_covers"} == set(rows[0].keys())
    assert report.payload["d"] == 3
    assert report.payload["all_covers"] is True


def test_bogolyubov_fixture():
    report = _run("bogolyubov_z200.ini")
    assert report.status == "ok"
    members = report.payload["spec"]["realized_members"]
    assert members and all(m % 2 == 0 for m in members)
    assert report.payload["separated"]["covers"] is True


def test_two_set_fixture():
    report = _run("two_set_z12.ini")
    assert report.status == "ok"
    assert report.payload["conditions"] == {"i": True, "ii": True, "iii": True}


def test_croot_sisask_fixture():
    report = _run("croot_sisask_z101.ini")
    assert report.status == "ok"
    assert report.payload["size"] >= 3
    assert report.payload["sup_norm"] < 0.1


def test_expected_failure_fixture_reports_none():
    report = _run("regularity_noise_expect_none.ini")
    assert report.status == "none-within-budget"
    assert report.config["expect"] == "none"
    assert report.payload["certificate"] if "certificate" in report.payload \
        else report.payload["candidates_scored"] == 150
    code = main(["regularity", "--config",
                 str(FIXTURES / "regularity_noise_expect_none.ini"),
                 "--out", "/tmp/noise.json"])
    assert code == 2


def test_file_based_inputs(tmp_path, z12):
    from bohrlab.groups import format_cayley_table, format_subset
    from bohrlab import Subset

    table_path = tmp_path / "z12.txt"
    table_path.write_text(format_cayley_table(z12))
    set_path = tmp_path / "evens.txt"
    set_path.write_text(format_subset(Subset.from_indices(z12, range(0, 12, 2))))
    report = run_experiment({
        "kind": "bogolyubov", "group": f"file:{table_path}",
        "set_a": f"file:{set_path}", "alpha": "0.5"})
    assert report.status == "ok"
    members = report.payload["spec"]["realized_members"]
    assert members and all(m % 2 == 0 for m in members)


def test_missing_referenced_path_errors(tmp_path):
    with pytest.raises(ConfigError):
        run_experiment({"kind": "bogolyubov", "group": "zmod:12",
                        "set_a": f"file:{tmp_path}/nope.txt", "alpha": "0.5"})


def test_replay_round_trip(tmp_path):
    report = _run("regularity_zpz.ini")
    path = tmp_path / "report.json"
    path.write_text(report.to_json())
    doc = json.loads(path.read_text())
    assert replay_report(doc)


def test_seed_override_changes_payload():
    base = _run("croot_sisask_z101.ini")
    other = _run("croot_sisask_z101.ini", seed=8)
    assert base.config["seed"] != other.config["seed"]


def test_missing_config_key():
    with pytest.raises(ConfigError):
        run_experiment({"kind": "ladder", "group": "zmod:4"})
    with pytest.raises(ConfigError):
        run_experiment({"kind": "nope", "group": "zmod:4"})


def test_main_exit_codes(tmp_path):
    out = tmp_path / "r.json"
    code = main(["group-info", "--config", str(FIXTURES / "group_info_z12.ini"),
                 "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["status"] == "ok"
    assert doc["toolkit_version"]

    code = main(["ladder", "--config", str(FIXTURES / "ladder_budget1.ini"),
                 "--out", str(tmp_path / "l.json")])
    assert code == 2

    code = main(["ladder", "--config", str(tmp_path / "missing.ini"),
                 "--out", str(out)])
    assert code == 1


def test_env_default_out_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("BOHRLAB_OUT_DIR", str(tmp_path))
    code = main(["group-info", "--config", str(FIXTURES / "group_info_z12.ini")])
    assert code == 0
    assert (tmp_path / "group-info.json").exists()


def test_console_entry_point(tmp_path):
    out = tmp_path / "cli.json"
    proc = subprocess.run(
        [sys.executable, "-m", "bohrlab", "group-info",
         "--config", str(FIXTURES / "group_info_z12.ini"), "--out", str(out)],
        capture_output=True, text=True, cwd="/root/pkg")
    assert proc.returncode == 0, proc.stderr
    assert json.loads(out.read_text())["payload"]["order"] == 12
