import json

import numpy as np
from click.testing import CliRunner

from tdas.cli import main
from tdas.core import load_dataset, load_tensor


def invoke(*args):
    return CliRunner().invoke(main, list(args))


def make_data(tmp_path, kind="low_freq_blobs", count=10, name="ds", seed=3):
    out = tmp_path / name
    res = invoke("make-data", str(out), "--kind", kind, "--count", str(count),
                 "--shape", "1", "8", "8", "--seed", str(seed))
    assert res.exit_code == 0, res.output
    return out


def write_run_config(tmp_path, ds_dir, **overrides):
    cfg = {
        "shape": [1, 8, 8],
        "model": {"kind": "empirical", "dataset": str(ds_dir)},
        "levels": {"sigma_max": 1.0, "sigma_min": 0.1, "levels": 5, "steps_per_level": 2},
        "eps0": 0.001,
        "seed": 21,
        "n_samples": 3,
        "out_dir": str(tmp_path / "run"),
    }
    cfg.update(overrides)
    path = tmp_path / f"run_{abs(hash(json.dumps(cfg, sort_keys=True))) % 10**8}.json"
    path.write_text(json.dumps(cfg))
    return path


class TestMakeData:
    def test_writes_dataset_and_manifest(self, tmp_path):
        out = make_data(tmp_path)
        ds = load_dataset(out)
        assert len(ds) == 10 and ds.shape == (1, 8, 8)
        assert (out / "run_manifest.json").exists()

    def test_bad_kind_is_usage_error(self, tmp_path):
        res = invoke("make-data", str(tmp_path / "x"), "--kind", "bogus")
        assert res.exit_code != 0


class TestSample:
    def test_vanilla_run_produces_outputs(self, tmp_path):
        ds = make_data(tmp_path)
        cfg = write_run_config(tmp_path, ds)
        res = invoke("sample", str(cfg), "--vanilla")
        assert res.exit_code == 0, res.output
        out = load_dataset(tmp_path / "run" / "tensors")
        assert len(out) == 3
        manifest = json.loads((tmp_path / "run" / "run_manifest.json").read_text())
        assert manifest["command"] == "sample" and manifest["seed"] == 21
        assert "total" in manifest["wall_times"]

    def test_seed_reproducible(self, tmp_path):
        ds = make_data(tmp_path)
        a_cfg = write_run_config(tmp_path, ds, out_dir=str(tmp_path / "a"))
        b_cfg = write_run_config(tmp_path, ds, out_dir=str(tmp_path / "b"))
        assert invoke("sample", str(a_cfg), "--vanilla").exit_code == 0
        assert invoke("sample", str(b_cfg), "--vanilla").exit_code == 0
        a = load_dataset(tmp_path / "a" / "tensors")
        b = load_dataset(tmp_path / "b" / "tensors")
        assert np.array_equal(a.items, b.items)

    def test_seed_flag_overrides_config(self, tmp_path):
        ds = make_data(tmp_path)
        a_cfg = write_run_config(tmp_path, ds, out_dir=str(tmp_path / "a"))
        b_cfg = write_run_config(tmp_path, ds, out_dir=str(tmp_path / "b"))
        assert invoke("sample", str(a_cfg), "--vanilla").exit_code == 0
        assert invoke("sample", str(b_cfg), "--vanilla", "--seed", "99").exit_code == 0
        a = load_dataset(tmp_path / "a" / "tensors")
        b = load_dataset(tmp_path / "b" / "tensors")
        assert not np.array_equal(a.items, b.items)

    def test_missing_config_errors_cleanly(self, tmp_path):
        res = invoke("sample", str(tmp_path / "nope.json"))
        assert res.exit_code != 0

    def test_bad_iterations_exit_one(self, tmp_path):
        ds = make_data(tmp_path)
        cfg = write_run_config(tmp_path, ds)
        res = invoke("sample", str(cfg), "--vanilla", "--iterations", "7")
        assert res.exit_code == 1
        assert "error:" in res.output


class TestCalibrateStatsBench:
    def test_calibrate_emits_params_and_curve(self, tmp_path):
        ref = make_data(tmp_path, count=30, name="ref", seed=1)
        gen = make_data(tmp_path, kind="unstructured", count=30, name="gen", seed=2)
        params_path = tmp_path / "p.json"
        curve_path = tmp_path / "c.csv"
        res = invoke("calibrate", str(ref), str(gen), "--out", str(params_path),
                     "--curve", str(curve_path))
        assert res.exit_code == 0, res.output
        params = json.loads(params_path.read_text())
        assert {"lambda1", "lambda2", "r1", "r2"} <= set(params)
        assert curve_path.read_text().startswith("r,kappa")

    def test_calibrate_no_crossing_exits_two(self, tmp_path):
        # Generated set low-frequency heavy vs white reference: the ratio falls
        # with radius, so kappa can never reach the upper quantiles.
        ref = make_data(tmp_path, kind="unstructured", count=30, name="ref2", seed=1)
        gen = make_data(tmp_path, kind="low_freq_blobs", count=30, name="gen2", seed=2)
        res = invoke("calibrate", str(ref), str(gen))
        assert res.exit_code == 2

    def test_stats_writes_power_and_profile(self, tmp_path):
        ds = make_data(tmp_path)
        out = tmp_path / "s.tdt"
        prof = tmp_path / "p.csv"
        res = invoke("stats", str(ds), "--out", str(out), "--profile", str(prof))
        assert res.exit_code == 0, res.output
        power = load_tensor(out)
        assert power.shape == (1, 8, 8) and np.all(power >= 0)
        assert prof.read_text().startswith("radius,power")

    def test_bench_csv(self, tmp_path):
        out = tmp_path / "b.csv"
        res = invoke("bench", "--filter-overhead", "16", "--repeats", "2",
                     "--out", str(out))
        assert res.exit_code == 0, res.output
        lines = out.read_text().splitlines()
        assert lines[0] == "size,median_seconds" and lines[1].startswith("16,")


class TestValidate:
    def test_theorem1_passes(self, tmp_path):
        res = invoke("validate", "--theorem1", "--steps", "20", "--shape", "1", "8", "8")
        assert res.exit_code == 0, res.output
        report = json.loads(res.output)
        assert report["passed"] and report["max_deviation"] <= 1e-6

    def test_theorem2_report_file(self, tmp_path):
        path = tmp_path / "r.json"
        res = invoke("validate", "--theorem2", "--n-mc", "200", "--report", str(path))
        assert res.exit_code == 0, res.output
        assert json.loads(path.read_text())["passed"]

    def test_metrics_needs_dirs(self):
        res = invoke("validate", "--metrics")
        assert res.exit_code == 1

    def test_no_mode_is_error(self):
        assert invoke("validate").exit_code == 1
