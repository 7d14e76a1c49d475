"""Sweep declaration, execution, minima extraction and the self-dual
structure report, mostly on small chains so the whole module stays
fast.  Consistency checks inside extract_minima are driven with
hand-built records as well as with real sweeps."""

import numpy as np
import pytest

from scramble.errors import NumericalConsistencyError
from scramble.experiments import (ExperimentSpec, MinimaRow, SelfDualReport,
                                  SweepRecord, SweepResult, extract_minima,
                                  presets, resolve_workers, run_sweep,
                                  self_dual_report)
from scramble.scrambling import InitialState
from scramble.tau import SELF_DUAL, TauSpec


def small_spec(**overrides):
    kwargs = dict(model="floquet", n_list=(4,), ell_list=(1, 2),
                  tau_list=(TauSpec(1, 4),), init_list=("allup", "neel"),
                  t1=2, t2=6, steps=6)
    kwargs.update(overrides)
    return ExperimentSpec(**kwargs)


class TestSpecValidation:
    def test_model_checked(self):
        with pytest.raises(ValueError):
            small_spec(model="heisenberg")

    def test_n_range(self):
        with pytest.raises(ValueError):
            small_spec(n_list=(2,))
        with pytest.raises(ValueError):
            small_spec(n_list=(12,))
        with pytest.raises(ValueError):
            small_spec(n_list=())

    def test_ell_range(self):
        with pytest.raises(ValueError):
            small_spec(ell_list=(3,))  # n=4 allows 1..2
        with pytest.raises(ValueError):
            small_spec(ell_list=())

    def test_tau_grid_required_for_kicks(self):
        with pytest.raises(ValueError, match="tau grid"):
            small_spec(tau_list=())

    def test_tau_must_sit_on_half_increment_grid(self):
        with pytest.raises(ValueError, match="pi/32"):
            small_spec(tau_list=(TauSpec(1, 3),))

    def test_continuous_model_rejects_tau_grid(self):
        with pytest.raises(ValueError):
            ExperimentSpec(model="tfim", n_list=(4,), ell_list=(1,),
                           tau_list=(TauSpec(1, 4),), t1=0, t2=5)

    def test_continuous_model_gets_zero_tau(self):
        spec = ExperimentSpec(model="tfim", n_list=(4,), ell_list=(1,),
                              t1=0, t2=5)
        assert spec.tau_list == (TauSpec(0, 1),)

    def test_init_list(self):
        with pytest.raises(ValueError):
            small_spec(init_list=())
        with pytest.raises(ValueError):
            small_spec(init_list=("sideways",))
        assert small_spec().init_list == (InitialState.ALL_UP,
                                          InitialState.NEEL)

    def test_window_ordering(self):
        with pytest.raises(ValueError):
            small_spec(t1=6, t2=6)
        with pytest.raises(ValueError):
            small_spec(t1=-1)
        with pytest.raises(ValueError):
            small_spec(t2=9, steps=6)  # window past the last kick
        with pytest.raises(ValueError):
            small_spec(dt=0.0)

    def test_steps_defaults_to_t2(self):
        spec = small_spec(steps=None)
        assert spec.steps == spec.t2

    def test_ells_for(self):
        spec = small_spec(ell_list="all")
        assert spec.ells_for(4) == (1, 2)
        assert spec.ells_for(7) == (1, 2, 3, 4, 5)
        assert small_spec().ells_for(4) == (1, 2)

    def test_grid_contents(self):
        grid = small_spec().grid()
        assert len(grid) == 2 * 1 * 2  # ells x taus x inits
        assert grid == tuple(sorted(
            grid, key=lambda p: (p[0], p[1], p[2].value, p[3].value)))

    def test_time_grid(self):
        assert small_spec().time_grid() == 6
        spec = ExperimentSpec(model="tfim", n_list=(4,), ell_list=(1,),
                              t1=0, t2=5, dt=0.5)
        grid = spec.time_grid()
        assert grid.shape == (11,)
        assert grid[0] == 0.0 and grid[-1] == pytest.approx(5.0)

    def test_mapping_round_trip(self):
        spec = small_spec(fit=True, fit_delta=0.05)
        again = ExperimentSpec.from_mapping(spec.as_mapping())
        assert again == spec

    def test_mapping_rejects_unknown_keys(self):
        data = small_spec().as_mapping()
        data["temperature"] = 0.1
        with pytest.raises(ValueError, match="unknown spec keys"):
            ExperimentSpec.from_mapping(data)


@pytest.fixture(scope="module")
def result():
    return run_sweep(small_spec(), workers=1)


class TestRunSweep:
    def test_every_grid_point_present(self, result):
        assert len(result.records) == 4
        assert not result.errors()
        for rec in result.records:
            assert rec.i3_avg is not None
            assert rec.table is not None

    def test_record_lookup(self, result):
        rec = result.record(4, 1, TauSpec(1, 4), "allup")
        assert rec.n == 4 and rec.ell == 1
        assert rec.init is InitialState.ALL_UP
        with pytest.raises(KeyError):
            result.record(5, 1, TauSpec(1, 4), "allup")

    def test_sorted_output(self, result):
        keys = [(r.n, r.ell, r.tau.value, r.init.value)
                for r in result.records]
        assert keys == sorted(keys)

    def test_one_minimum_per_group(self, result):
        for init in ("allup", "neel"):
            group = [r for r in result.records if r.init.value == init]
            assert sum(r.is_min for r in group) == 1

    def test_pool_matches_inline(self, result):
        pooled = run_sweep(small_spec(), workers=2)
        for a, b in zip(result.records, pooled.records):
            assert a.key == b.key
            assert a.i3_avg == b.i3_avg

    def test_fit_failure_is_recorded_not_raised(self):
        # six kicks of the integrable chain stay too close to zero for
        # the growth window; the average must survive the fit failure
        spec = small_spec(init_list=("allup",), fit=True)
        result = run_sweep(spec, workers=1)
        for rec in result.records:
            assert rec.i3_avg is not None
            assert rec.error is not None and rec.error.startswith("fit:")
        assert result.errors()


class TestResolveWorkers:
    def test_argument_wins(self, monkeypatch):
        monkeypatch.setenv("SCRAMBLE_THREADS", "7")
        assert resolve_workers(3) == 3

    def test_env_fallback(self, monkeypatch):
        monkeypatch.setenv("SCRAMBLE_THREADS", "5")
        assert resolve_workers() == 5

    def test_cpu_count_fallback(self, monkeypatch):
        monkeypatch.delenv("SCRAMBLE_THREADS", raising=False)
        assert resolve_workers() >= 1

    def test_invalid(self):
        with pytest.raises(ValueError):
            resolve_workers(0)


def fake_result(avgs, n, tau=None, init="allup"):
    tau = tau or TauSpec(1, 4)
    records = tuple(
        SweepRecord(n=n, ell=ell, tau=tau, init=InitialState(init),
                    i3_avg=avg)
        for ell, avg in avgs.items())
    return SweepResult(spec=None, records=records)


class TestExtractMinima:
    # the central-minimum structure belongs to the small-tau regime
    # with a late window, so these sweeps run at tau = pi/32
    def test_odd_chain_real_sweep(self):
        spec = small_spec(n_list=(5,), ell_list="all",
                          tau_list=(TauSpec(1, 32),),
                          init_list=("allup",), t1=50, t2=200, steps=200,
                          hx=1.0)
        rows = extract_minima(run_sweep(spec, workers=1))
        assert len(rows) == 1
        assert rows[0].ell == 2
        assert rows[0].n == 5

    def test_even_chain_real_sweep(self):
        spec = small_spec(n_list=(4,), ell_list="all",
                          tau_list=(TauSpec(1, 32),),
                          init_list=("allup",), t1=50, t2=200, steps=200,
                          hx=1.0)
        rows = extract_minima(run_sweep(spec, workers=1))
        assert rows[0].ell in (1, 2)

    def test_parity_filter(self):
        spec = small_spec(n_list=(4, 5), ell_list="all",
                          tau_list=(TauSpec(1, 32),),
                          init_list=("allup",), t1=50, t2=200, steps=200,
                          hx=1.0)
        result = run_sweep(spec, workers=1)
        odd = extract_minima(result, parity="odd")
        assert [row.n for row in odd] == [5]
        even = extract_minima(result, parity="even")
        assert [row.n for row in even] == [4]
        with pytest.raises(ValueError):
            extract_minima(result, parity="prime")

    def test_incomplete_sweep_rejected(self):
        result = fake_result({1: -0.1, 2: -0.3}, n=5)  # ell=3 missing
        with pytest.raises(ValueError, match="incomplete"):
            extract_minima(result)

    def test_odd_offcenter_minimum_rejected(self):
        result = fake_result({1: -0.5, 2: -0.3, 3: -0.1}, n=5)
        with pytest.raises(NumericalConsistencyError, match="expected 2"):
            extract_minima(result)

    def test_even_pair_mismatch_rejected(self):
        result = fake_result({1: -0.5, 2: -0.3}, n=4)
        with pytest.raises(NumericalConsistencyError, match="central pair"):
            extract_minima(result)

    def test_hand_built_accepted(self):
        result = fake_result({1: -0.1, 2: -0.5, 3: -0.1}, n=5)
        rows = extract_minima(result)
        assert rows == (MinimaRow(n=5, tau=TauSpec(1, 4),
                                  init=InitialState.ALL_UP, ell=2,
                                  i3_min=-0.5),)


class TestSelfDualReport:
    def test_integrable_structure(self):
        report = self_dual_report(5, 2, steps=120, t1=100)
        assert report.ok
        assert set(report.tables) == {"allup", "neel"}
        assert max(report.period_dev.values()) < 1e-10
        assert report.init_pair_dev < 1e-10
        for init, table in report.tables.items():
            assert table.times.size == 121

    def test_longitudinal_field_relaxes_period_claim(self):
        report = self_dual_report(5, 2, hx=1.0, steps=120, t1=100)
        # the deviation is reported but never flagged away from hx=0
        assert all(report.period_ok.values())
        assert max(report.period_dev.values()) > 1e-3

    def test_argument_checks(self):
        with pytest.raises(ValueError):
            self_dual_report(4, 1)
        with pytest.raises(ValueError):
            self_dual_report(5, 2, steps=8, t1=2)  # < 2n kicks

    def test_ok_aggregation(self):
        report = SelfDualReport(n=5, ell=2, hx=0.0, tables={}, i3_avg={},
                                period_dev={}, period_ok={"allup": True},
                                init_pair_dev=1.0, init_equal_ok=False)
        assert not report.ok
        report = SelfDualReport(n=5, ell=2, hx=0.0, tables={}, i3_avg={},
                                period_dev={}, period_ok={"allup": True},
                                init_pair_dev=None, init_equal_ok=True)
        assert report.ok


class TestPresets:
    def test_catalog(self):
        cat = presets()
        assert set(cat) == {
            "table1", "growth-integrable", "growth-nonintegrable",
            "ell-sweep-integrable", "ell-sweep-nonintegrable",
            "tau-sweep-integrable", "tau-sweep-nonintegrable",
            "near-self-dual-integrable", "near-self-dual-nonintegrable",
            "tfim-growth-integrable", "tfim-growth-nonintegrable",
            "tfim-saturation-integrable", "tfim-saturation-nonintegrable",
        }
        for spec in cat.values():
            assert isinstance(spec, ExperimentSpec)

    def test_table1_preset(self):
        spec = presets()["table1"]
        assert spec.n_list == (11,)
        assert spec.ell_list == (5,)
        assert spec.tau_list == (SELF_DUAL,)
        assert spec.init_list == (InitialState.ALL_UP,)
        assert (spec.t1, spec.t2, spec.steps) == (0, 11, 11)

    def test_tau_sweep_excludes_zero(self):
        spec = presets()["tau-sweep-integrable"]
        assert len(spec.tau_list) == 16
        assert spec.tau_list[0] == TauSpec(1, 32)
        assert SELF_DUAL in spec.tau_list

    def test_nonintegrable_presets_set_hx(self):
        cat = presets()
        for name, spec in cat.items():
            if "nonintegrable" in name:
                assert spec.hx == 1.0
            else:
                assert spec.hx == 0.0

    def test_tfim_presets(self):
        cat = presets()
        assert cat["tfim-growth-integrable"].model == "tfim"
        assert cat["tfim-growth-integrable"].t2 == 10
        assert cat["tfim-saturation-nonintegrable"].t2 == 500
