import numpy as np
import pytest

from sandcal import GAConfig, SearchDomain, load_inputs
from sandcal.errors import ParseError
from sandcal.io_config import (
    OutputBundle,
    RunInput,
    read_manifest,
    write_inputs,
    write_outputs,
)
from sandcal.simulator import integrate_population


@pytest.fixture
def ga_cfg():
    return GAConfig(n_ind=24, n_iter=6, n_eli=2, n_f=0.5, mu_in=0.3,
                    mu_en=0.05, seed=11)


@pytest.fixture
def input_set(tmp_path, domain, ga_cfg, oe_test, td_test):
    return write_inputs(tmp_path / "data", domain, ga_cfg, [oe_test, td_test],
                        n_step=60, weights=(1.0, 2.0, 0.5))


class TestRoundTrip:
    def test_full_round_trip(self, input_set, domain, ga_cfg, oe_test, td_test):
        loaded = load_inputs(input_set)
        assert loaded.run_input == RunInput(1, 1, 60, (1.0, 2.0, 0.5),
                                            loaded.run_input.file_names)
        np.testing.assert_allclose(loaded.domain.p_min, domain.p_min, rtol=1e-12)
        np.testing.assert_allclose(loaded.domain.p_max, domain.p_max, rtol=1e-12)
        assert loaded.ga == ga_cfg.__class__(**{**ga_cfg.__dict__, "seed": 0})
        oe, td = loaded.tests
        assert (oe.kind, oe.test_id) == ("OE", 1)
        assert oe.initial == oe_test.initial
        np.testing.assert_allclose(oe.data, oe_test.data, rtol=1e-9)
        assert td.initial == td_test.initial
        np.testing.assert_allclose(td.data, td_test.data, rtol=1e-9, atol=1e-14)

    def test_percent_conversion(self, input_set):
        td = load_inputs(input_set).tests[1]
        assert td.eps_fin == pytest.approx(0.095)

    def test_sign_conversion(self, input_set):
        oe = load_inputs(input_set).tests[0]
        assert oe.initial.T1 < 0 and oe.initial.T2 < 0


class TestParseErrors:
    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError) as err:
            load_inputs(tmp_path / "data" / "Input.txt")
        assert "Input.txt" in str(err.value)

    def test_count_mismatch_names_file(self, input_set):
        # declare 2 OE tests while OE_init has one row
        text = input_set.read_text().replace("1 1", "2 1")
        input_set.write_text(text)
        with pytest.raises(ParseError) as err:
            load_inputs(input_set)
        assert "OE_init.txt" in str(err.value)

    def test_non_ascending_ids(self, input_set):
        oe_data = input_set.parent / "OE_data.txt"
        lines = oe_data.read_text().splitlines()
        lines.append(lines[2].rsplit(" ", 1)[0] + " 0")
        oe_data.write_text("\n".join(lines) + "\n")
        with pytest.raises(ParseError) as err:
            load_inputs(input_set)
        assert "ascending" in str(err.value)

    def test_wrong_domain_rows(self, input_set):
        dom = input_set.parent / "Domain_file.txt"
        lines = dom.read_text().splitlines()
        dom.write_text("\n".join(lines[:-1]) + "\n")
        with pytest.raises(ParseError) as err:
            load_inputs(input_set)
        assert "8" in str(err.value)

    def test_non_numeric_value(self, input_set):
        ga = input_set.parent / "GA_setup.txt"
        ga.write_text(ga.read_text().replace("24", "abc"))
        with pytest.raises(ParseError) as err:
            load_inputs(input_set)
        assert "GA_setup.txt" in str(err.value)

    def test_error_carries_line_number(self, input_set):
        oe_data = input_set.parent / "OE_data.txt"
        lines = oe_data.read_text().splitlines()
        lines[2] = "0.7 0.1"   # a column short
        oe_data.write_text("\n".join(lines) + "\n")
        with pytest.raises(ParseError) as err:
            load_inputs(input_set)
        assert ":3:" in str(err.value)


class TestUnloadingBranch:
    def test_points_past_minimum_dropped(self, input_set):
        oe_data = input_set.parent / "OE_data.txt"
        with oe_data.open("a") as fh:
            fh.write("0.70 0.05 1\n")   # void ratio rises again: unloading
        with pytest.warns(UserWarning, match="unloading"):
            loaded = load_inputs(input_set)
        assert len(loaded.tests[0].data) == 4


class TestOutputs:
    def _bundle(self, loaded, pop):
        costs = np.linspace(0.5, 1.0, len(pop))
        curves = {
            (t.test_id, t.kind): integrate_population(pop, t, loaded.run_input.n_step)
            for t in loaded.tests
        }
        return OutputBundle(loaded.run_input, loaded.tests, pop[0], 0.5, 0,
                            pop, costs, [(1, pop, costs)], curves)

    def test_files_and_manifest_consistent(self, tmp_path, input_set):
        loaded = load_inputs(input_set)
        pop = np.array([[33, 1000.0, 0.25, 0.95, 0.25, 1.5, 0.58, 1.1],
                        [34, 1500.0, 0.3, 1.0, 0.2, 1.2, 0.6, 1.15]])
        out = tmp_path / "out"
        write_outputs(self._bundle(loaded, pop), out)
        manifest = read_manifest(out / "manifest.txt")
        assert int(manifest["n_candidates"]) == 2
        assert int(manifest["best_candidate_id"]) == 1
        for name in ("X_OE.csv", "X_TD.csv", "HX_OE.csv", "HX_TD.csv"):
            rows = len((out / name).read_text().splitlines()) - 1
            assert rows == int(manifest[f"rows[{name}]"])
        assert int(manifest["rows[X_OE.csv]"]) == 4
        assert int(manifest["rows[X_TD.csv]"]) == 4
        # two feasible candidates, full-length curves
        assert int(manifest["rows[HX_OE.csv]"]) == 2 * 61

    def test_best_fit_has_named_parameters(self, tmp_path, input_set):
        loaded = load_inputs(input_set)
        pop = np.array([[33, 1000.0, 0.25, 0.95, 0.25, 1.5, 0.58, 1.1]])
        out = tmp_path / "run"
        write_outputs(self._bundle(loaded, pop), out)
        text = (out / "best_fit.txt").read_text()
        for name in ("phi_c", "h_s", "lambda_i", "cost"):
            assert name in text
        values = [line.split()[-1] for line in text.splitlines()[1:]]
        assert len(values) == 9

    def test_log_pop_appends(self, tmp_path, input_set):
        loaded = load_inputs(input_set)
        pop = np.array([[33, 1000.0, 0.25, 0.95, 0.25, 1.5, 0.58, 1.1]])
        out = tmp_path / "run"
        write_outputs(self._bundle(loaded, pop), out)
        first = len((out / "log_Pop.txt").read_text().splitlines())
        write_outputs(self._bundle(loaded, pop), out)
        second = len((out / "log_Pop.txt").read_text().splitlines())
        assert second == 2 * first - 1   # header written once
