"""Tests for output formatters and binary dumps."""
# pylint: disable=missing-class-docstring, no-self-use, missing-function-docstring
# pylint: disable=redefined-outer-name
import json
import os

import numpy as np
import pytest

from kslab.core.bounds import ModelParams, check_existence_condition, derive_constants
from kslab.core.formatters import (
    ConstantsFormatter,
    ReportFormatter,
    SweepFormatter,
    field_rows,
    output_path,
    read_positions,
    read_snapshot,
    write_csv,
    write_field,
    write_particles,
    write_positions,
    write_snapshot,
)
from kslab.core.formatters.constants import SNAPSHOT_HEADER
from kslab.core.formatters.generic import QUANTITIES
from kslab.core.models import GridSpec
from kslab.core.special import C1Convention
from kslab.core.verification import VerificationReport, loads_reports

HASH = "0123456789ab"


@pytest.fixture
def field():
    grid = GridSpec(2, 8, 4.0)
    return grid.sample(lambda x: np.exp(-np.sum(x**2, axis=-1)))


@pytest.fixture
def params():
    return ModelParams(d=3, chi=1e-3, q=4.5, norm_grad_c0_d=0.5, norm_p0_dhalf=0.8)


class TestBinary:
    def test_snapshot(self, tmp_path, field):
        path = tmp_path / "rho.bin"
        write_snapshot(path, field, 0.25, HASH)
        assert os.path.getsize(path) == SNAPSHOT_HEADER.itemsize + 8 * 64
        loaded, t, config_hash = read_snapshot(path)
        assert loaded.grid == field.grid
        assert np.array_equal(loaded.values, field.values)
        assert t == 0.25
        assert config_hash == HASH

    def test_positions(self, tmp_path):
        positions = np.random.default_rng(0).normal(size=(17, 3))
        path = tmp_path / "x.bin"
        write_positions(path, positions, 1.5, HASH)
        loaded, t, config_hash = read_positions(path)
        assert np.array_equal(loaded, positions)
        assert (t, config_hash) == (1.5, HASH)

    def test_wrong_kind(self, tmp_path):
        path = tmp_path / "x.bin"
        write_positions(path, np.zeros((4, 2)), 0.0, HASH)
        with pytest.raises(ValueError, match="magic"):
            read_snapshot(path)

    def test_wrong_version(self, tmp_path, field):
        path = tmp_path / "rho.bin"
        write_snapshot(path, field, 0.0, HASH)
        data = bytearray(path.read_bytes())
        data[8:12] = (99).to_bytes(4, "little")
        path.write_bytes(bytes(data))
        with pytest.raises(ValueError, match="version 99"):
            read_snapshot(path)

    def test_truncated_payload(self, tmp_path, field):
        path = tmp_path / "rho.bin"
        write_snapshot(path, field, 0.0, HASH)
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(ValueError, match="payload"):
            read_snapshot(path)


class TestFiles:
    def test_output_path(self, tmp_path):
        path = output_path(str(tmp_path / "new"), "pde-rho", HASH, "csv")
        assert os.path.isdir(tmp_path / "new")
        assert os.path.basename(path) == f"pde-rho-{HASH}.csv"

    def test_csv(self, tmp_path):
        path = tmp_path / "rows.csv"
        rows = [(0.0, 1.0), (0.1, 0.999999999999)]
        write_csv(path, rows, ("t", "mass"), HASH)
        lines = path.read_text().splitlines()
        assert lines[0] == f"# format_version=1 config_hash={HASH}"
        assert lines[1] == "t,mass"
        assert np.array_equal(np.loadtxt(path, delimiter=",", skiprows=2), np.array(rows))

    def test_field_rows(self, field):
        rows = field_rows(field)
        assert rows.shape == (64, 3)
        assert np.array_equal(rows[:, 2], field.values.reshape(-1))
        assert rows[0, :2].tolist() == [-2.0, -2.0]

    def test_field_as_json(self, tmp_path, field):
        path = write_field(str(tmp_path), "pde-rho", field, 0.5, HASH, "json")
        with open(path, encoding="utf-8") as dump:
            data = json.load(dump)
        assert data["grid"] == {"d": 2, "n": 8, "box_length": 4.0}
        assert np.array_equal(np.array(data["values"]), field.values)

    def test_field_as_binary(self, tmp_path, field):
        path = write_field(str(tmp_path), "pde-rho", field, 0.5, HASH, "binary")
        assert path.endswith(".bin")
        assert np.array_equal(read_snapshot(path)[0].values, field.values)

    def test_particles_as_csv(self, tmp_path):
        positions = np.arange(6.0).reshape(3, 2)
        path = write_particles(str(tmp_path), "positions", positions, 0.0, HASH, "csv")
        assert path.endswith(f"positions-{HASH}.csv")
        assert (tmp_path / f"positions-{HASH}.csv").read_text().splitlines()[1] == "x,y"


class TestFormatters:
    def test_constants(self, params):
        constants = [derive_constants(params, convention) for convention in C1Convention]
        conditions = [check_existence_condition(params, convention) for convention in C1Convention]
        formatter = ConstantsFormatter(params, constants, conditions, HASH, 0.02)
        data = json.loads(formatter.format())
        assert data["config_hash"] == HASH
        assert data["params"]["d"] == 3
        assert len(data["constants"]) == len(C1Convention)
        assert len(formatter.table().columns) == 1 + len(C1Convention)

    def test_constants_name_the_threshold_convention(self, params):
        constants = [derive_constants(params, convention) for convention in C1Convention]
        formatter = ConstantsFormatter(params, constants, [], HASH, 0.02, C1Convention.printed)
        assert json.loads(formatter.format())["existence_threshold_convention"] == "printed"
        table = formatter.table()
        assert table.row_count == len(QUANTITIES) + 1
        cells = [list(column.cells)[-1] for column in table.columns]
        assert cells == ["existence_threshold", "-", "0.02"]

    def test_sweep(self):
        formatter = SweepFormatter([(0.0, 0.1, 1.2, True), (0.5, 3.0, None, False)], HASH)
        lines = formatter.format().splitlines()
        assert lines[1] == "chi,condition_lhs,C_q,satisfied"
        assert lines[2] == "0.0,0.1,1.2,1"
        assert lines[3] == "0.5,3.0,nan,0"
        assert formatter.table().row_count == 2

    def test_reports(self):
        reports = [
            VerificationReport("mass", "conserved", "equality", 0.0, 1e-12, 1e-10, HASH),
            VerificationReport("decay_q", "bound", "bound", 1.0, 2.0, 0.05, HASH),
        ]
        formatter = ReportFormatter(reports)
        assert loads_reports(formatter.format()) == reports
        assert formatter.table().row_count == 2
