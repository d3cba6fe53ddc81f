"""End-to-end command tests: every command is a pure function of
(config, input files, seed) and writes deterministic CSV/JSON pairs."""

import csv
import json
from pathlib import Path

import numpy as np
import pytest

from regime_risk.cli import main
from regime_risk.entropic_risk import RiskQuery, spot_risk_closed
from regime_risk.ou_model import OUParams, simulate_path, TRADING_DAYS_PER_YEAR
from regime_risk.regime_chain import validate_generator

from conftest import EXAMPLE_CONFIG


def run(args) -> int:
    return main([str(a) for a in args])


def read_csv(path: Path):
    lines = path.read_text().splitlines()
    rows = [r for r in csv.reader(line for line in lines if not line.startswith("#"))]
    return rows[0], rows[1:]


def write_config(tmp_path: Path, payload: dict, name="cfg.json") -> Path:
    p = tmp_path / name
    p.write_text(json.dumps(payload, indent=1))
    return p


def base_config(**overrides) -> dict:
    cfg = {
        "chain": {
            "kind": "generator",
            "matrix": [[-0.8, 0.5], [0.8, -0.5]],
            "z0": 0,
        },
        "ou": {"alpha": 5.0, "mu": 48.22, "sigma": 13.66, "x0": 62.24},
        "claim": {"type": "linear", "delta": [0.75, 0.75]},
        "grids": {
            "gammas": [1.0, 2.5, 5.0, 10.0],
            "horizons_days": [50.0, 150.0],
            "yields": [0.0, 0.04, 0.08],
            "n_times": 8,
        },
        "mc": {"n_paths": 4000, "seed": 11},
        "output": {"dir": "out"},
    }
    cfg.update(overrides)
    return cfg


def synthetic_csv(tmp_path: Path, n=6000, seed=77) -> Path:
    p = OUParams(alpha=5.0, mu=48.22, sigma=13.66, x0=62.24)
    rng = np.random.default_rng(seed)
    x = simulate_path(p, np.arange(n + 1) / TRADING_DAYS_PER_YEAR, rng)
    days = np.datetime64("2012-01-03") + np.arange(n + 1).astype("timedelta64[D]")
    f = tmp_path / "prices.csv"
    f.write_text(
        "date,price\n"
        + "\n".join(f"{d},{v:.8f}" for d, v in zip(days, x))
        + "\n"
    )
    return f


class TestCalibrateCommand:
    def test_round_trip_recovery(self, tmp_path, capsys):
        csv_path = synthetic_csv(tmp_path)
        cfg = write_config(tmp_path, {"ou": {"csv": csv_path.name}, "output": {"dir": "out"}})
        assert run(["calibrate", "--config", cfg]) == 0
        payload = json.loads((tmp_path / "out" / "ou_params.json").read_text())
        fitted = payload["data"]["params"]
        ses = payload["data"]["std_errors"]
        assert abs(fitted["alpha"] - 5.0) < 3 * ses["alpha"]
        assert abs(fitted["mu"] - 48.22) < 3 * ses["mu"]
        assert abs(fitted["sigma"] - 13.66) < 3 * ses["sigma"]
        assert "alpha" in capsys.readouterr().out

    def test_params_file_feeds_other_commands(self, tmp_path):
        csv_path = synthetic_csv(tmp_path)
        cfg1 = write_config(tmp_path, {"ou": {"csv": csv_path.name}, "output": {"dir": "out"}})
        run(["calibrate", "--config", cfg1])
        cfg2 = write_config(
            tmp_path,
            base_config(ou={"params_file": "out/ou_params.json"}),
            name="risk.json",
        )
        assert run(["risk", "--config", cfg2, "--out", tmp_path / "out2"]) == 0

    def test_two_row_csv_reports_too_few_points(self, tmp_path, capsys):
        f = tmp_path / "short.csv"
        f.write_text("date,price\n2020-01-02,10.0\n2020-01-03,11.0\n")
        cfg = write_config(tmp_path, {"ou": {"csv": "short.csv"}})
        assert run(["calibrate", "--config", cfg]) == 2
        assert "TooFewPoints" in capsys.readouterr().err

    def test_unsorted_csv_names_row(self, tmp_path):
        f = tmp_path / "bad.csv"
        f.write_text("date,price\n2020-01-02,10.0\n2020-01-06,11.0\n2020-01-03,12.0\n")
        cfg = write_config(tmp_path, {"ou": {"csv": "bad.csv"}})
        with pytest.raises(ValueError, match="row 3"):
            run(["calibrate", "--config", cfg])


class TestRiskCommand:
    def test_zero_loading_gives_zero_vector(self, tmp_path):
        cfg = write_config(tmp_path, base_config(claim={"type": "linear", "delta": [0.0, 0.0]}))
        assert run(["risk", "--config", cfg]) == 0
        header, rows = read_csv(tmp_path / "out" / "risk.csv")
        closed = [float(r[header.index("closed")]) for r in rows]
        assert closed == [0.0] * len(rows)

    def test_single_regime_matches_oracle_column(self, tmp_path):
        cfg = base_config(
            chain={"kind": "generator", "matrix": [[0.0]], "z0": 0},
            claim={"type": "future", "delta": [0.75], "r": 0.01, "y": 0.07},
        )
        path = write_config(tmp_path, cfg)
        assert run(["risk", "--config", path]) == 0
        header, rows = read_csv(tmp_path / "out" / "risk.csv")
        for r in rows:
            closed = float(r[header.index("closed")])
            oracle = float(r[header.index("oracle")])
            assert closed == pytest.approx(oracle, abs=1e-10)

    def test_example_config_mc_z_scores_within_three(self, tmp_path):
        assert run(["risk", "--config", EXAMPLE_CONFIG, "--mc", "--out", tmp_path]) == 0
        header, rows = read_csv(tmp_path / "risk.csv")
        zs = [abs(float(r[header.index("z_score")])) for r in rows]
        assert len(zs) == 16
        assert max(zs) <= 3.0

    def test_swap_requires_mc(self, tmp_path, capsys):
        cfg = base_config(
            claim={
                "type": "swap",
                "delta": [1.0, 1.0],
                "rates": [0.05, 0.05],
                "yield": {"kind": "constant", "r": 0.02, "y": 0.06},
            }
        )
        path = write_config(tmp_path, cfg)
        assert run(["risk", "--config", path]) == 2
        assert "--mc" in capsys.readouterr().err
        assert run(["risk", "--config", path, "--mc"]) == 0
        header, rows = read_csv(tmp_path / "out" / "risk.csv")
        assert all(r[header.index("closed")] == "" for r in rows)
        assert all(r[header.index("mc_value")] != "" for r in rows)


class TestSweepCommand:
    def test_table_shape_matches_report_layout(self, tmp_path):
        cfg = write_config(tmp_path, base_config())
        assert run(["sweep", "--config", cfg]) == 0
        header, rows = read_csv(tmp_path / "out" / "sweep.csv")
        assert header == ["horizon", "gamma=1", "gamma=2.5", "gamma=5", "gamma=10"]
        assert [r[0] for r in rows] == [
            "T=50 days",
            "T=150 days",
            "variation_abs (last-first)",
            "variation_pct (%)",
        ]
        payload = json.loads((tmp_path / "out" / "sweep.json").read_text())
        cells = np.array(payload["data"]["cells"])
        assert cells.shape == (2, 4)
        var_abs = payload["data"]["variation_abs"]
        np.testing.assert_allclose(var_abs, cells[1] - cells[0], rtol=1e-12)

    def test_single_cell_grid_has_empty_variation(self, tmp_path):
        cfg = base_config()
        cfg["grids"] = {"gammas": [2.0], "horizons_days": [50.0]}
        path = write_config(tmp_path, cfg)
        assert run(["sweep", "--config", path]) == 0
        header, rows = read_csv(tmp_path / "out" / "sweep.csv")
        assert len(rows) == 3
        assert rows[1] == ["variation_abs (last-first)", ""]
        assert rows[2] == ["variation_pct (%)", ""]

    def test_rows_nondecreasing_in_gamma(self, tmp_path):
        cfg = write_config(tmp_path, base_config())
        run(["sweep", "--config", cfg])
        payload = json.loads((tmp_path / "out" / "sweep.json").read_text())
        cells = np.array(payload["data"]["cells"])
        assert np.all(np.diff(cells, axis=1) >= -1e-9)

    def test_mc_cross_check_writes_flags(self, tmp_path):
        cfg = base_config()
        cfg["grids"] = {"gammas": [2.0, 5.0], "horizons_days": [50.0]}
        cfg["mc"] = {"n_paths": 20000, "seed": 6}
        path = write_config(tmp_path, cfg)
        assert run(["sweep", "--config", path, "--mc"]) == 0
        header, rows = read_csv(tmp_path / "out" / "sweep_mc.csv")
        assert header[-1] == "flagged"
        for r in rows:
            z = float(r[header.index("z_score")])
            assert r[-1] == str(abs(z) > 3.0)
        assert all(r[-1] == "False" for r in rows)

    def test_swap_claim_rejected(self, tmp_path, capsys):
        cfg = base_config(
            claim={
                "type": "swap",
                "delta": [1.0, 1.0],
                "rates": [0.05],
                "yield": {"kind": "constant", "r": 0.0, "y": 0.0},
            }
        )
        path = write_config(tmp_path, cfg)
        assert run(["sweep", "--config", path]) == 2
        assert "sweep" in capsys.readouterr().err


class TestYieldSweepCommand:
    def test_zero_yield_curve_equals_spot_risk(self, tmp_path):
        cfg = base_config(claim={"type": "future", "delta": [0.75, 0.9], "r": 0.0, "y": 0.05})
        cfg["grids"]["yields"] = [0.0]
        path = write_config(tmp_path, cfg)
        assert run(["yield-sweep", "--config", path]) == 0
        payload = json.loads((tmp_path / "out" / "yield_sweep.json").read_text())
        ou = OUParams(alpha=5.0, mu=48.22, sigma=13.66, x0=62.24)
        g = validate_generator([[-0.8, 0.5], [0.8, -0.5]])
        T = 50.0 / TRADING_DAYS_PER_YEAR
        for t, y, risk in payload["data"]["rows"]:
            assert y == 0.0
            q = RiskQuery(gamma=1.0, s=t, T=T, x_s=62.24)
            expected = spot_risk_closed(ou, g, [0.75, 0.9], q).risk_given_state(0)
            assert risk == pytest.approx(expected, abs=1e-12)

    def test_configured_yield_levels_present(self, tmp_path):
        cfg = write_config(
            tmp_path,
            base_config(claim={"type": "future", "delta": [0.75, 0.75], "r": 0.0, "y": 0.08}),
        )
        assert run(["yield-sweep", "--config", cfg]) == 0
        header, rows = read_csv(tmp_path / "out" / "yield_sweep.csv")
        yields = {r[1] for r in rows}
        assert "0.08" in yields and "0" in yields and "0.04" in yields

    def test_spread_shrinks_toward_maturity(self, tmp_path):
        cfg = write_config(
            tmp_path,
            base_config(claim={"type": "future", "delta": [0.75, 0.75], "r": 0.0, "y": 0.08}),
        )
        run(["yield-sweep", "--config", cfg])
        _, rows = read_csv(tmp_path / "out" / "yield_sweep_summary.csv")
        spreads = [float(r[1]) for r in rows]
        assert spreads[-1] < spreads[0]

    def test_linear_claim_rejected(self, tmp_path):
        cfg = write_config(tmp_path, base_config())
        assert run(["yield-sweep", "--config", cfg]) == 2


class TestSimulateCommand:
    def test_deterministic_outputs(self, tmp_path):
        cfg = write_config(tmp_path, base_config())
        run(["simulate", "--config", cfg, "--out", tmp_path / "a"])
        run(["simulate", "--config", cfg, "--out", tmp_path / "b"])
        assert (tmp_path / "a" / "paths.csv").read_bytes() == (tmp_path / "b" / "paths.csv").read_bytes()
        assert (tmp_path / "a" / "paths.json").read_bytes() == (tmp_path / "b" / "paths.json").read_bytes()

    def test_zero_vol_path_is_monotone_relaxation(self, tmp_path):
        cfg = base_config(ou={"alpha": 5.0, "mu": 48.22, "sigma": 0.0, "x0": 62.24})
        path = write_config(tmp_path, cfg)
        run(["simulate", "--config", path])
        header, rows = read_csv(tmp_path / "out" / "paths.csv")
        spot = [float(r[header.index("spot")]) for r in rows]
        assert all(a > b for a, b in zip(spot, spot[1:]))
        assert spot[-1] > 48.22

    def test_daily_year_path_within_gaussian_envelope(self, tmp_path):
        cfg = base_config()
        cfg["grids"]["horizons_days"] = [252.0]
        path = write_config(tmp_path, cfg)
        run(["simulate", "--config", path])
        header, rows = read_csv(tmp_path / "out" / "paths.csv")
        spot = np.array([float(r[header.index("spot")]) for r in rows])
        sd = np.sqrt(13.66**2 / 10.0)
        low = min(48.22, 62.24) - 6 * sd
        high = max(48.22, 62.24) + 6 * sd
        assert spot.min() > low and spot.max() < high

    def test_swap_with_stochastic_yield_adds_column(self, tmp_path):
        cfg = base_config(
            claim={
                "type": "swap",
                "delta": [1.0, 1.0],
                "rates": [0.05, 0.05],
                "yield": {
                    "kind": "gibson_schwartz",
                    "kappa": 1.5,
                    "y_bar": 0.08,
                    "sigma_y": 0.1,
                    "rho": -0.3,
                    "lambda_y": 0.0,
                    "y0": 0.05,
                },
            }
        )
        path = write_config(tmp_path, cfg)
        run(["simulate", "--config", path])
        header, _ = read_csv(tmp_path / "out" / "paths.csv")
        assert header == ["step", "t_years", "spot", "regime", "yield"]


class TestDeterminismAndOverrides:
    def test_sweep_byte_identical_reruns(self, tmp_path):
        cfg = write_config(tmp_path, base_config())
        run(["sweep", "--config", cfg, "--out", tmp_path / "a"])
        run(["sweep", "--config", cfg, "--out", tmp_path / "b"])
        for name in ("sweep.csv", "sweep.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_calibrate_and_yield_sweep_byte_identical_reruns(self, tmp_path):
        csv_path = synthetic_csv(tmp_path, n=500)
        calib = write_config(tmp_path, {"ou": {"csv": csv_path.name}}, name="calib.json")
        run(["calibrate", "--config", calib, "--out", tmp_path / "c1"])
        run(["calibrate", "--config", calib, "--out", tmp_path / "c2"])
        assert (tmp_path / "c1" / "ou_params.json").read_bytes() == (
            tmp_path / "c2" / "ou_params.json"
        ).read_bytes()
        ys = write_config(
            tmp_path,
            base_config(claim={"type": "future", "delta": [0.75, 0.75], "r": 0.0, "y": 0.08}),
            name="ys.json",
        )
        run(["yield-sweep", "--config", ys, "--out", tmp_path / "y1"])
        run(["yield-sweep", "--config", ys, "--out", tmp_path / "y2"])
        for name in ("yield_sweep.csv", "yield_sweep_summary.csv"):
            assert (tmp_path / "y1" / name).read_bytes() == (tmp_path / "y2" / name).read_bytes()

    def test_risk_mc_identical_across_worker_counts(self, tmp_path):
        cfg = write_config(tmp_path, base_config())
        run(["risk", "--config", cfg, "--mc", "--out", tmp_path / "w1", "--workers", "1"])
        run(["risk", "--config", cfg, "--mc", "--out", tmp_path / "w4", "--workers", "4"])
        assert (tmp_path / "w1" / "risk.csv").read_bytes() == (tmp_path / "w4" / "risk.csv").read_bytes()

    def test_seed_override_changes_provenance_and_results(self, tmp_path):
        cfg = write_config(tmp_path, base_config())
        run(["risk", "--config", cfg, "--mc", "--out", tmp_path / "s1", "--seed", "1"])
        run(["risk", "--config", cfg, "--mc", "--out", tmp_path / "s2", "--seed", "2"])
        a = (tmp_path / "s1" / "risk.csv").read_text()
        b = (tmp_path / "s2" / "risk.csv").read_text()
        assert "# seed=1" in a and "# seed=2" in b
        assert a != b

    def test_paths_override(self, tmp_path):
        cfg = write_config(tmp_path, base_config())
        run(["risk", "--config", cfg, "--mc", "--out", tmp_path / "p", "--paths", "2500"])
        payload = json.loads((tmp_path / "p" / "risk.json").read_text())
        assert payload["provenance"]["n_paths"] == 2500


class TestConfigValidation:
    def test_missing_file(self, capsys):
        assert run(["risk", "--config", "/nonexistent.json"]) == 2
        assert "not found" in capsys.readouterr().err

    def test_invalid_json(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        assert run(["risk", "--config", p]) == 2

    def test_defective_transition_matrix_surfaces(self, tmp_path, capsys):
        cfg = base_config()
        cfg["chain"] = {
            "kind": "transition",
            "matrix": [
                [0.75, 0.25, 0.0, 0.0],
                [0.25, 0.75, 0.0, 0.0],
                [0.0, 0.0, 0.25, 0.70],
                [0.0, 0.0, 0.75, 0.25],
            ],
            "dt": 1 / 252,
        }
        path = write_config(tmp_path, cfg)
        assert run(["risk", "--config", path]) == 2
        err = capsys.readouterr().err
        assert "NotStochastic" in err and "row 2" in err

    def test_transition_requires_dt(self, tmp_path):
        cfg = base_config()
        cfg["chain"] = {"kind": "transition", "matrix": [[1.0, 0.0], [0.0, 1.0]]}
        assert run(["risk", "--config", write_config(tmp_path, cfg)]) == 2

    def test_bad_kind(self, tmp_path):
        cfg = base_config()
        cfg["chain"]["kind"] = "mystery"
        assert run(["risk", "--config", write_config(tmp_path, cfg)]) == 2

    def test_z0_bounds(self, tmp_path):
        cfg = base_config()
        cfg["chain"]["z0"] = 5
        assert run(["risk", "--config", write_config(tmp_path, cfg)]) == 2

    def test_nonpositive_gamma_rejected(self, tmp_path):
        cfg = base_config()
        cfg["grids"]["gammas"] = [0.0, 1.0]
        assert run(["risk", "--config", write_config(tmp_path, cfg)]) == 2

    def test_delta_length_checked_against_chain(self, tmp_path):
        cfg = base_config(claim={"type": "linear", "delta": [1.0, 1.0, 1.0]})
        assert run(["risk", "--config", write_config(tmp_path, cfg)]) == 2

    def test_missing_section_for_command(self, tmp_path, capsys):
        cfg = {"ou": {"alpha": 1.0, "mu": 50.0, "sigma": 5.0, "x0": 50.0}}
        assert run(["risk", "--config", write_config(tmp_path, cfg)]) == 2
        assert "chain" in capsys.readouterr().err
