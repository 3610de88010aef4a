"""Tests for the command line parser, commands and entry point."""
# pylint: disable=missing-class-docstring, no-self-use, missing-function-docstring
# pylint: disable=redefined-outer-name
import json
import os

import pytest

from kslab.core import Commands, Format
from kslab.core.__main__ import main
from kslab.core.commands import CommandError, Context
from kslab.core.constants import EXIT_BLOW_UP, EXIT_CHECK_FAILURE, EXIT_CONFIG_ERROR, EXIT_OK
from kslab.core.parsers import ArgumentError, CliParser, CommandLine, parse_sizes, parse_sweep

CONSTANTS_CONFIG = """
[model]
d = 3
chi = 0.001
q = 4.5

[[rho0]]
weight = 1.0
mean = [0.0, 0.0, 0.0]
variance = 1.0

[[c0]]
weight = 1.0
mean = [0.0, 0.0, 0.0]
variance = 1.0
"""

RUN_CONFIG = """
[model]
d = 2
chi = 0.05
lam = 1.0
T = 0.1

[[rho0]]
weight = 1.0
mean = [0.0, 0.0]
variance = 1.0

[[c0]]
weight = 1.0
mean = [0.5, 0.0]
variance = 1.0

[grid]
n = 32
box_length = 12.0
dt = 0.005

[particles]
N = 100
dt = 0.05
"""


def write_config(tmp_path, text, name="run.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def command_line(tmp_path, command, text, **kwargs):
    return CommandLine(
        command=command,
        config=write_config(tmp_path, text),
        out=str(tmp_path / "out"),
        **kwargs,
    )


class TestParser:
    @pytest.fixture
    def parser(self):
        return CliParser()

    def test_common_flags(self, parser):
        line = parser.parse(
            ["solve-pde", "--config", "run.toml", "--seed", "5", "--workers", "2", "--dry-run"]
        )
        assert line.command == "solve-pde"
        assert line.config == "run.toml"
        assert line.seed == 5
        assert line.workers == 2
        assert line.dry_run
        assert line.format == "json"
        assert line.options == {}

    def test_sweep_chi(self, parser):
        line = parser.parse(["constants", "--sweep-chi", "0:0.01:5", "--format", "csv"])
        assert line.options == {"sweep_chi": (0.0, 0.01, 5)}
        assert line.format == "csv"

    def test_compare_options(self, parser):
        line = parser.parse(["compare", "--trend", "100,10", "--sweep-epsilon"])
        assert line.options == {"trend": [10, 100], "sweep_epsilon": True, "kde_every": None}

    @pytest.mark.parametrize(
        "argv",
        [
            [],
            ["bogus"],
            ["solve-pde", "--epsilon", "0.1"],
            ["simulate", "--workers", "0"],
            ["simulate", "--seed", "-1"],
            ["simulate", "--seed", str(2**64)],
            ["simulate", "--format", "xml"],
            ["constants", "--sweep-chi", "1:0:5"],
        ],
    )
    def test_errors(self, parser, argv):
        with pytest.raises(ArgumentError):
            parser.parse(argv)


class TestArgumentValues:
    def test_sweep(self):
        assert parse_sweep("0:1e-3:4") == (0.0, 1e-3, 4)

    @pytest.mark.parametrize("value", ["0:1", "a:b:c", "0:1:1", "-1:1:3", "0:0:3"])
    def test_bad_sweep(self, value):
        with pytest.raises(ArgumentError):
            parse_sweep(value)

    def test_sizes(self):
        assert parse_sizes("1000,100,1000,10") == [10, 100, 1000]

    @pytest.mark.parametrize("value", ["100", "0,10", "ten,100"])
    def test_bad_sizes(self, value):
        with pytest.raises(ArgumentError):
            parse_sizes(value)


class TestConstants:
    @pytest.mark.asyncio
    async def test_json(self, tmp_path):
        result = await Commands().run(command_line(tmp_path, "constants", CONSTANTS_CONFIG))
        assert result.exit_code == EXIT_OK
        data = json.loads(result.text)
        assert data["params"]["d"] == 3
        assert [item["convention"] for item in data["constants"]] == ["exact", "printed"]
        assert data["existence_threshold"] > 0.001
        assert data["existence_threshold_convention"] == "exact"
        assert result.files == [
            os.path.join(str(tmp_path / "out"), f"constants-{data['config_hash']}.json")
        ]
        assert os.path.exists(result.files[0])

    @pytest.mark.asyncio
    async def test_sweep_csv(self, tmp_path):
        line = command_line(
            tmp_path, "constants", CONSTANTS_CONFIG, options={"sweep_chi": (0.0, 0.05, 6)}
        )
        result = await Commands(format=Format.csv).run(line)
        assert result.exit_code == EXIT_OK
        rows = [row.split(",") for row in result.text.splitlines()[2:]]
        assert len(rows) == 6
        lhs = [float(row[1]) for row in rows]
        assert lhs == sorted(lhs)
        assert rows[0][3] == "1"
        assert result.files[0].endswith(".csv")

    @pytest.mark.asyncio
    async def test_binary_not_allowed(self, tmp_path):
        line = command_line(tmp_path, "constants", CONSTANTS_CONFIG)
        result = await Commands(format=Format.binary).run(line)
        assert result.exit_code == EXIT_CONFIG_ERROR

    @pytest.mark.asyncio
    async def test_q_out_of_range(self, tmp_path):
        text = CONSTANTS_CONFIG.replace("q = 4.5", "q = 7.0")
        result = await Commands().run(command_line(tmp_path, "constants", text))
        assert result.exit_code == EXIT_CONFIG_ERROR

    @pytest.mark.asyncio
    async def test_missing_config(self, tmp_path):
        line = CommandLine(command="constants", config=str(tmp_path / "missing.toml"))
        assert (await Commands().run(line)).exit_code == EXIT_CONFIG_ERROR

    @pytest.mark.asyncio
    async def test_unknown_command(self, tmp_path):
        with pytest.raises(CommandError):
            await Commands().run(CommandLine(command="plot"))


class TestRuns:
    @pytest.mark.asyncio
    async def test_dry_run(self, tmp_path):
        line = command_line(tmp_path, "compare", RUN_CONFIG, dry_run=True)
        result = await Commands().run(line)
        plan = json.loads(result.text)
        assert result.exit_code == EXIT_OK
        assert plan["pde_steps"] == 20
        assert plan["particle_steps"] == 2
        assert plan["backend"]["mode"] == "pairwise"
        assert not os.path.exists(tmp_path / "out")

    @pytest.mark.asyncio
    async def test_context_decides_dry_run(self, tmp_path):
        line = command_line(tmp_path, "simulate", RUN_CONFIG)
        result = await Commands().run(line, Context(dry_run=True))
        assert "pde_steps" not in json.loads(result.text)
        assert result.files == []

    @pytest.mark.asyncio
    async def test_solve_pde(self, tmp_path):
        result = await Commands().run(command_line(tmp_path, "solve-pde", RUN_CONFIG))
        assert result.exit_code in (EXIT_OK, EXIT_CHECK_FAILURE)
        names = [os.path.basename(path).split("-")[:-1] for path in result.files]
        assert ["pde", "summary"] in names
        assert ["pde", "rho"] in names
        assert ["pde", "decay"] in names
        assert ["reports", "pde"] in names
        assert all(os.path.exists(path) for path in result.files)
        assert result.reports[0].check_id == "mass"

    @pytest.mark.asyncio
    async def test_unstable_step(self, tmp_path):
        text = RUN_CONFIG.replace("chi = 0.05", "chi = 1.0").replace("n = 32", "n = 64")
        text = text.replace("dt = 0.005", "dt = 0.05")
        result = await Commands().run(command_line(tmp_path, "solve-pde", text))
        assert result.exit_code == EXIT_CONFIG_ERROR

    @pytest.mark.asyncio
    async def test_blow_up(self, tmp_path):
        text = RUN_CONFIG.replace("dt = 0.005", "dt = 0.005\nblowup_cap = 1e-3")
        result = await Commands().run(command_line(tmp_path, "solve-pde", text))
        assert result.exit_code == EXIT_BLOW_UP
        assert any("blowup" in os.path.basename(path) for path in result.files)

    @pytest.mark.asyncio
    async def test_simulate_binary(self, tmp_path):
        line = command_line(tmp_path, "simulate", RUN_CONFIG, options={"kde_every": 1})
        result = await Commands(format=Format.binary).run(line)
        assert result.exit_code in (EXIT_OK, EXIT_CHECK_FAILURE)
        assert sum(path.endswith(".bin") for path in result.files) == 3
        manifest = next(path for path in result.files if "manifest" in path)
        with open(manifest, encoding="utf-8") as dump:
            assert json.load(dump)["N"] == 100

    @pytest.mark.asyncio
    async def test_compare(self, tmp_path):
        line = command_line(tmp_path, "compare", RUN_CONFIG, options={"kde_every": 1})
        result = await Commands().run(line)
        ids = [report.check_id for report in result.reports]
        assert "duhamel_c" in ids
        assert "mass" in ids
        assert "particles:decay_q" in ids
        assert "kde_l1_initial@0" in ids
        assert result.exit_code in (EXIT_OK, EXIT_CHECK_FAILURE)


class TestMain:
    def test_bad_arguments(self, mocker):
        logging_setup = mocker.patch("kslab.core.__main__.setup_logging")
        assert main(["nope"]) == EXIT_CONFIG_ERROR
        logging_setup.assert_called_once_with()

    def test_constants(self, tmp_path, mocker, capsys):
        logging_setup = mocker.patch("kslab.core.__main__.setup_logging")
        path = write_config(tmp_path, CONSTANTS_CONFIG)
        argv = ["constants", "--config", path, "--out", str(tmp_path), "--verbose"]
        assert main(argv) == EXIT_OK
        logging_setup.assert_called_once_with(True)
        assert json.loads(capsys.readouterr().out)["params"]["q"] == 4.5
