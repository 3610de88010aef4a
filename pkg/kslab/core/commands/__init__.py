import asyncio
from enum import Enum
import functools
import json
import logging
from typing import List, Optional, Sequence

from attrs import define, evolve, field
import numpy as np
from rich.console import Console
from rich.table import Table

from ..bounds import (
    check_existence_condition,
    check_uniqueness_condition,
    derive_constants,
    existence_threshold,
)
from ..constants import EXIT_BLOW_UP, EXIT_CHECK_FAILURE, EXIT_CONFIG_ERROR, EXIT_OK
from ..errors import (
    BlowUpError,
    ConfigError,
    ConfigMismatchError,
    DomainError,
    NonFiniteParticleError,
    StabilityError,
)
from ..formatters import (
    ConstantsFormatter,
    ReportFormatter,
    SweepFormatter,
    output_path,
    write_csv,
    write_field,
    write_particles,
)
from ..models.config import Config, RunConfig
from ..parsers import ArgumentError, CliParser, CommandLine
from ..parsers.constants import EPSILON_FACTORS
from ..particles import DIAGNOSTIC_COLUMNS, ParticleRun, simulate
from ..pde import SUMMARY_COLUMNS, PdeRun, density_decay_report, solve
from ..special import C1Convention
from ..verification import (
    VerificationReport,
    dumps_reports,
    epsilon_sweep,
    gather_reports,
    run_cross_check,
    run_decay_check,
    trend_check,
)

logger = logging.getLogger(__name__)

__all__ = ["Commands", "CommandError", "CommandResult", "Context", "Format"]


class CommandError(NameError):
    """Command is not known."""


class Format(Enum):
    json = "json"
    csv = "csv"
    binary = "binary"


@define
class Context:
    """A kslab command context."""

    dry_run: bool = False
    # Tables and plans go to stderr; stdout carries machine-readable output.
    console: Console = field(factory=lambda: Console(stderr=True))


@define
class CommandResult:
    exit_code: int = EXIT_OK
    text: str = ""
    reports: List[VerificationReport] = field(factory=list)
    files: List[str] = field(factory=list)


def _exit_code(reports: Sequence[VerificationReport]):
    return EXIT_CHECK_FAILURE if any(report.failed for report in reports) else EXIT_OK


def _sweep_rows(params, start: float, stop: float, num: int):
    rows = []
    for chi in np.linspace(start, stop, num):
        constants = derive_constants(params.with_chi(float(chi)))
        rows.append(
            (float(chi), constants.condition_lhs, constants.C_q, constants.condition_lhs < 1)
        )
    return rows


def _tagged(reports, prefix: str):
    return [evolve(report, check_id=f"{prefix}:{report.check_id}") for report in reports]


def _plan(config: RunConfig, command: str):
    params = config.model
    plan = {
        "command": command,
        "config_hash": config.config_hash,
        "out": config.run.out,
        "workers": config.workers(),
        "config": config.to_dict(),
    }
    if command in ("solve-pde", "compare"):
        plan["pde_steps"] = int(round(params.T / config.grid.dt))
        plan["grid"] = config.grid_spec().to_dict()
    if command in ("simulate", "compare"):
        plan["particle_steps"] = int(round(params.T / config.particles.dt))
        plan["backend"] = config.backend().to_dict()
    return plan


@define
class Commands:
    """A kslab command processor."""

    parser: CliParser = field(factory=CliParser)
    format: Format = Format.json

    def _dry_run(self, ctx: Context, config: RunConfig, command: str):
        plan = _plan(config, command)
        table = Table(title=f"{command} plan (dry run)")
        table.add_column("item")
        table.add_column("value")
        for key, value in plan.items():
            if key != "config":
                table.add_row(key, json.dumps(value))
        ctx.console.print(table)
        return CommandResult(text=json.dumps(plan, indent=2) + "\n")

    def _finish(self, ctx: Context, config: RunConfig, stem: str, result: CommandResult):
        path = output_path(config.run.out, f"reports-{stem}", config.config_hash, "json")
        with open(path, "w", encoding="utf-8") as dump:
            dump.write(dumps_reports(result.reports))
        result.files.append(path)
        formatter = ReportFormatter(result.reports)
        ctx.console.print(formatter.table())
        result.text = formatter.format() + "\n"
        if result.exit_code == EXIT_OK:
            result.exit_code = _exit_code(result.reports)
        return result

    async def constants(self, ctx: Context, config: RunConfig, sweep_chi=None):
        if ctx.dry_run:
            return self._dry_run(ctx, config, "constants")
        if self.format is Format.binary:
            raise ArgumentError("constants are written as json or csv")
        params = await asyncio.to_thread(config.params)
        if sweep_chi:
            rows = await asyncio.to_thread(_sweep_rows, params, *sweep_chi)
            formatter = SweepFormatter(rows, config.config_hash)
            if self.format is Format.csv:
                text = formatter.format()
            else:
                columns = SweepFormatter.COLUMNS
                text = json.dumps([dict(zip(columns, row)) for row in rows], indent=2) + "\n"
            stem = "sweep"
        else:
            constants = [derive_constants(params, convention) for convention in C1Convention]
            conditions = [
                check_existence_condition(params, convention) for convention in C1Convention
            ]
            conditions += [
                check_uniqueness_condition(params, derived.C_q, derived.convention)
                for derived in constants
                if derived.C_q is not None
            ]
            formatter = ConstantsFormatter(
                params,
                constants,
                conditions,
                config.config_hash,
                existence_threshold(params, C1Convention.exact),
                C1Convention.exact,
            )
            text = formatter.format() + "\n"
            stem = "constants"
        suffix = "csv" if self.format is Format.csv and sweep_chi else "json"
        path = output_path(config.run.out, stem, config.config_hash, suffix)
        with open(path, "w", encoding="utf-8") as dump:
            dump.write(text)
        ctx.console.print(formatter.table())
        return CommandResult(text=text, files=[path])

    def _write_pde(self, config: RunConfig, run: PdeRun):
        config_hash = config.config_hash
        out = config.run.out
        summary = output_path(out, "pde-summary", config_hash, "csv")
        write_csv(summary, run.summary, SUMMARY_COLUMNS, config_hash)
        state = run.state
        files = [summary]
        for stem, grid_field in (("pde-rho", state.rho), ("pde-c", state.c)):
            files.append(
                write_field(out, stem, grid_field, state.t, config_hash, self.format.value)
            )
        params = run.params
        exponents = sorted({1.0, max(params.d / 2, 1.0), params.q})
        report = density_decay_report(run.history, params, exponents)
        decay = output_path(out, "pde-decay", config_hash, "json")
        with open(decay, "w", encoding="utf-8") as dump:
            json.dump(report.to_dict(), dump, indent=2)
        files.append(decay)
        if run.blowup:
            path = output_path(out, "blowup", config_hash, "json")
            with open(path, "w", encoding="utf-8") as dump:
                json.dump(run.blowup.to_dict(), dump, indent=2)
            files.append(path)
        return files

    def _write_particles(self, config: RunConfig, run: ParticleRun):
        config_hash = config.config_hash
        out = config.run.out
        ensemble = run.ensemble
        diagnostics = output_path(out, "particle-diagnostics", config_hash, "csv")
        write_csv(diagnostics, run.diagnostics, DIAGNOSTIC_COLUMNS, config_hash)
        manifest = output_path(out, "manifest", config_hash, "json")
        with open(manifest, "w", encoding="utf-8") as dump:
            json.dump(run.manifest(), dump, indent=2, sort_keys=True)
        fmt = self.format.value
        return [
            diagnostics,
            manifest,
            write_particles(out, "positions-0", run.initial_positions, 0.0, config_hash, fmt),
            write_particles(out, "positions", ensemble.positions, ensemble.t, config_hash, fmt),
            write_field(out, "kde", run.final_density(), ensemble.t, config_hash, fmt),
        ]

    async def solve_pde(self, ctx: Context, config: RunConfig):
        if ctx.dry_run:
            return self._dry_run(ctx, config, "solve-pde")
        run = await asyncio.to_thread(solve, config)
        result = CommandResult(files=self._write_pde(config, run))
        result.reports = await gather_reports(functools.partial(run_decay_check, run))
        if run.blowup:
            result.exit_code = EXIT_BLOW_UP
        return self._finish(ctx, config, "pde", result)

    async def simulate(
        self,
        ctx: Context,
        config: RunConfig,
        epsilon: Optional[float] = None,
        kde_every: Optional[int] = None,
    ):
        if ctx.dry_run:
            return self._dry_run(ctx, config, "simulate")
        run = await asyncio.to_thread(simulate, config, None, epsilon, None, kde_every)
        result = CommandResult(files=self._write_particles(config, run))
        result.reports = await gather_reports(functools.partial(run_decay_check, run))
        return self._finish(ctx, config, "particles", result)

    async def compare(
        self,
        ctx: Context,
        config: RunConfig,
        trend: Optional[Sequence[int]] = None,
        sweep_epsilon: bool = False,
        kde_every: Optional[int] = None,
    ):
        if ctx.dry_run:
            return self._dry_run(ctx, config, "compare")
        params = await asyncio.to_thread(config.params)
        pde_run, particle_run = await asyncio.gather(
            asyncio.to_thread(solve, config, params),
            asyncio.to_thread(simulate, config, params, None, None, kde_every),
        )
        checks = [
            functools.partial(run_cross_check, particle_run, pde_run),
            functools.partial(run_decay_check, pde_run),
            lambda: _tagged(run_decay_check(particle_run), "particles"),
        ]
        if sweep_epsilon:
            dt = config.particles.dt
            sweep = await asyncio.gather(
                *(
                    asyncio.to_thread(simulate, config, params, factor * dt)
                    for factor in EPSILON_FACTORS
                )
            )
            checks.append(functools.partial(epsilon_sweep, sweep))
        if trend:
            sized = await asyncio.gather(
                *(asyncio.to_thread(simulate, config, params, None, size) for size in trend)
            )
            checks.append(
                functools.partial(
                    trend_check, dict(zip(trend, sized)), pde_run, seed=config.run.seed
                )
            )
        result = CommandResult(
            files=self._write_pde(config, pde_run) + self._write_particles(config, particle_run)
        )
        result.reports = await gather_reports(*checks)
        if pde_run.blowup:
            result.exit_code = EXIT_BLOW_UP
        return self._finish(ctx, config, "compare", result)

    async def run(self, line: CommandLine, ctx: Optional[Context] = None) -> CommandResult:
        """Load the configuration, run one command and map failures to exit codes."""
        ctx = ctx or Context(dry_run=line.dry_run)
        method = getattr(self, line.command.replace("-", "_"), None)
        if method is None:
            raise CommandError(f"unknown command {line.command!r}")
        try:
            config = Config(path=line.config).run_config()
            config = config.with_overrides(seed=line.seed, out=line.out, workers=line.workers)
            return await method(ctx, config, **line.options)
        except (
            ArgumentError,
            ConfigError,
            ConfigMismatchError,
            DomainError,
            StabilityError,
        ) as err:
            logger.error("%s", err)
            return CommandResult(exit_code=EXIT_CONFIG_ERROR)
        except (BlowUpError, NonFiniteParticleError) as err:
            logger.error("%s", err)
            return CommandResult(exit_code=EXIT_BLOW_UP)
