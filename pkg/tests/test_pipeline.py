import copy
import json
import os

import numpy as np
import pytest

from cointegra.errors import (
    ConfigInvalid,
    DataDirMissing,
    IndexBaseMissing,
    MissingColumn,
)
from cointegra.fixtures import default_config
from cointegra.panel import VARIABLES, PanelDataset
from cointegra.pipeline import (
    emit_plot_data,
    fmt3,
    fmt6,
    load_aux_series,
    load_config,
    lq_records_for_panel,
    parse_config,
    run_pipeline,
)
from cointegra.quarters import QuarterDate, QuarterlySeries
from cointegra.vecm import ForecastPath

DATA_ROOT = os.path.abspath(
    os.path.join(os.path.dirname(__file__), "..", "data", "sixstate")
)


def minimal_config(**overrides):
    obj = {
        "dataDir": DATA_ROOT,
        "outDir": "out",
        "models": [{"state": "AL", "naics": 113}],
    }
    obj.update(overrides)
    return obj


def small_run_config(tmp_path, models=None):
    obj = {
        "dataDir": DATA_ROOT,
        "outDir": str(tmp_path / "out"),
        "models": models
        or [
            {"state": "AL", "naics": 113, "k": 1, "r": 1},
            {"state": "ME", "naics": 113, "k": 1, "r": 0, "case": "none"},
        ],
        "defaults": {"maxLag": 2, "horizon": 4, "holdoutStart": "2017Q1"},
        "seed": 11,
    }
    return parse_config(obj)


class TestParseConfig:
    def test_minimal_valid(self):
        config = parse_config(minimal_config())
        assert config.models[0].state == "AL"
        assert config.defaults.max_lag == 4
        assert config.defaults.horizon == 20
        assert config.defaults.johansen_case == "restrictedConstant"
        assert config.defaults.lq_threshold == 1.0
        assert config.defaults.holdout_start is None
        assert config.seed == 0

    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigInvalid):
            parse_config(minimal_config(extra=1))

    def test_unknown_defaults_key(self):
        with pytest.raises(ConfigInvalid):
            parse_config(minimal_config(defaults={"maxlag": 4}))

    def test_unknown_model_key(self):
        cfg = minimal_config()
        cfg["models"][0]["lag"] = 2
        with pytest.raises(ConfigInvalid):
            parse_config(cfg)

    def test_empty_models(self):
        with pytest.raises(ConfigInvalid):
            parse_config(minimal_config(models=[]))

    def test_unsupported_state_and_naics(self):
        with pytest.raises(ConfigInvalid):
            parse_config(minimal_config(models=[{"state": "TX", "naics": 113}]))
        with pytest.raises(ConfigInvalid):
            parse_config(minimal_config(models=[{"state": "AL", "naics": 999}]))

    def test_duplicate_models(self):
        models = [{"state": "AL", "naics": 113}, {"state": "AL", "naics": 113}]
        with pytest.raises(ConfigInvalid):
            parse_config(minimal_config(models=models))

    def test_bad_spec_fields(self):
        with pytest.raises(ConfigInvalid):
            parse_config(minimal_config(models=[{"state": "AL", "naics": 113, "k": 0}]))
        with pytest.raises(ConfigInvalid):
            parse_config(minimal_config(models=[{"state": "AL", "naics": 113, "r": -1}]))

    def test_trend_case_not_estimable(self):
        cfg = minimal_config(defaults={"johansenCase": "rtrend"})
        with pytest.raises(ConfigInvalid):
            parse_config(cfg)

    def test_case_aliases_accepted(self):
        cfg = minimal_config(defaults={"johansenCase": "rconst"})
        assert parse_config(cfg).defaults.johansen_case == "restrictedConstant"

    def test_holdout_parsed(self):
        cfg = minimal_config(defaults={"holdoutStart": "2016Q1"})
        assert parse_config(cfg).defaults.holdout_start == QuarterDate(2016, 1)
        with pytest.raises(ConfigInvalid):
            parse_config(minimal_config(defaults={"holdoutStart": "sometime"}))

    def test_relative_paths_resolved_against_base(self):
        cfg = minimal_config(dataDir="data", outDir="out")
        config = parse_config(cfg, base_dir="/somewhere")
        assert config.data_dir == os.path.normpath("/somewhere/data")
        assert config.out_dir == os.path.normpath("/somewhere/out")

    def test_hash_tracks_content(self):
        a = parse_config(minimal_config(seed=1))
        b = parse_config(minimal_config(seed=1))
        c = parse_config(minimal_config(seed=2))
        assert a.config_hash == b.config_hash
        assert a.config_hash != c.config_hash

    def test_load_config_applies_overrides_before_hashing(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps(minimal_config()))
        base = load_config(str(path))
        overridden = load_config(str(path), seed=9)
        assert overridden.seed == 9
        assert overridden.config_hash != base.config_hash


class TestFormatting:
    def test_fmt6(self):
        assert fmt6(1234567.0) == "1.23457e+06"
        assert fmt6(0.0352871234) == "0.0352871"
        assert fmt6(150755.5) == "150756"

    def test_fmt3(self):
        assert fmt3(4770.7224) == "4770.722"
        assert fmt3(5852) == "5852.000"


class TestPlotData:
    def make_panel(self, values, start=QuarterDate(2010, 1)):
        series = {
            name: QuarterlySeries(start, np.asarray(values, dtype=float))
            for name in VARIABLES
        }
        return PanelDataset(state="AL", naics=113, **series)

    def test_self_normalization(self):
        panel = self.make_panel([2.0, 4.0, 6.0])
        path = ForecastPath(origin=panel.end, horizon=1, values=np.full((1, 5), 8.0))
        rows = emit_plot_data([path], [panel], QuarterDate(2010, 1))
        history = [r for r in rows if r[5] == "0" and r[3] == "output"]
        assert [r[4] for r in history] == ["1", "2", "3"]
        forecast_rows = [r for r in rows if r[5] == "1" and r[3] == "output"]
        assert forecast_rows == [("AL", 113, "2010Q4", "output", "4", "1")]

    def test_base_after_series_start(self):
        panel = self.make_panel([2.0, 4.0, 6.0])
        path = ForecastPath(origin=panel.end, horizon=1, values=np.full((1, 5), 8.0))
        rows = emit_plot_data([path], [panel], QuarterDate(2010, 2))
        history = [r for r in rows if r[5] == "0" and r[3] == "output"]
        assert [r[4] for r in history] == ["0.5", "1", "1.5"]

    def test_missing_index_base(self):
        panel = self.make_panel([2.0, 4.0, 6.0])
        path = ForecastPath(origin=panel.end, horizon=1, values=np.full((1, 5), 8.0))
        with pytest.raises(IndexBaseMissing):
            emit_plot_data([path], [panel], QuarterDate(2009, 4))


class TestAuxLoading:
    def test_loads_all_kinds(self):
        aux = load_aux_series(DATA_ROOT, ["AL", "ME"], [113, 322])
        assert (2001, 1) in aux["national_total"]
        assert set(aux["state_total"]) == {"AL", "ME"}
        assert set(aux["national_industry"]) == {113, 322}

    def test_lq_records_missing_quarter(self):
        aux = load_aux_series(DATA_ROOT, ["AL"], [113])
        del aux["national_total"][(2013, 2)]
        from cointegra.panel import ingest_panel

        panel = ingest_panel(os.path.join(DATA_ROOT, "panels", "AL_113.csv"))
        with pytest.raises(MissingColumn):
            lq_records_for_panel(panel, aux)


class TestRunPipeline:
    def test_missing_data_dir(self, tmp_path):
        config = parse_config(
            {
                "dataDir": str(tmp_path / "nope"),
                "outDir": str(tmp_path / "out"),
                "models": [{"state": "AL", "naics": 113}],
            }
        )
        with pytest.raises(DataDirMissing):
            run_pipeline(config)

    def test_small_run_shape(self, tmp_path):
        config = small_run_config(tmp_path)
        manifest = run_pipeline(config)
        assert not manifest.failed
        assert [m["state"] for m in manifest.models] == ["AL", "ME"]
        assert all(m["status"] == "ok" for m in manifest.models)
        out = config.out_dir
        on_disk = sorted(f for f in os.listdir(out) if f != "manifest.json")
        assert on_disk == manifest.files
        with open(os.path.join(out, "backtest.csv")) as fh:
            lines = fh.read().splitlines()
        assert lines[0] == "state,naics,variable,rmse,mape"
        assert len(lines) == 1 + 2 * 5

    def test_manifest_spec_fields(self, tmp_path):
        config = small_run_config(tmp_path)
        manifest = run_pipeline(config)
        al = next(m for m in manifest.models if m["state"] == "AL")
        assert (al["k"], al["r"], al["case"]) == (1, 1, "rconst")
        me = next(m for m in manifest.models if m["state"] == "ME")
        assert (me["k"], me["r"], me["case"]) == (1, 0, "none")

    def test_determinism_byte_identical(self, tmp_path):
        config_a = small_run_config(tmp_path / "a")
        config_b = small_run_config(tmp_path / "b")
        run_pipeline(config_a)
        run_pipeline(config_b)
        names = sorted(os.listdir(config_a.out_dir))
        assert names == sorted(os.listdir(config_b.out_dir))
        for name in names:
            if name == "manifest.json":
                continue
            with open(os.path.join(config_a.out_dir, name), "rb") as fh:
                first = fh.read()
            with open(os.path.join(config_b.out_dir, name), "rb") as fh:
                second = fh.read()
            assert first == second, name

    def test_failure_recorded_and_run_continues(self, tmp_path):
        import shutil

        data = tmp_path / "data"
        shutil.copytree(DATA_ROOT, data)
        os.remove(data / "panels" / "ME_113.csv")
        config = parse_config(
            {
                "dataDir": str(data),
                "outDir": str(tmp_path / "out"),
                "models": [
                    {"state": "AL", "naics": 113, "k": 1, "r": 1},
                    {"state": "ME", "naics": 113, "k": 1, "r": 1},
                ],
                "defaults": {"maxLag": 2},
            }
        )
        manifest = run_pipeline(config)
        assert manifest.failed
        by_state = {m["state"]: m for m in manifest.models}
        assert by_state["AL"]["status"] == "ok"
        assert by_state["ME"]["status"] == "error"
        assert "message" in by_state["ME"]
        with open(tmp_path / "out" / "summary.csv") as fh:
            body = fh.read()
        assert "AL" in body and "ME" not in body

    def test_thread_cap_respected(self, tmp_path, monkeypatch):
        monkeypatch.setenv("COINTEGRA_THREADS", "1")
        manifest = run_pipeline(small_run_config(tmp_path))
        assert not manifest.failed
        monkeypatch.setenv("COINTEGRA_THREADS", "0")
        with pytest.raises(ConfigInvalid):
            run_pipeline(small_run_config(tmp_path / "again"))

    def test_plot_rows_normalized_at_shared_base(self, tmp_path):
        config = small_run_config(tmp_path)
        run_pipeline(config)
        with open(os.path.join(config.out_dir, "plot.csv")) as fh:
            rows = fh.read().splitlines()[1:]
        base_rows = [r for r in rows if ",2001Q1," in r and r.startswith("AL")]
        assert base_rows and all(r.split(",")[4] == "1" for r in base_rows)


class TestDefaultConfigObject:
    def test_round_trip_through_validation(self):
        obj = copy.deepcopy(default_config())
        config = parse_config(obj, base_dir=DATA_ROOT)
        assert len(config.models) == 16
        naics_counts = {}
        for model in config.models:
            naics_counts[model.naics] = naics_counts.get(model.naics, 0) + 1
        assert naics_counts == {113: 5, 321: 6, 322: 5}
