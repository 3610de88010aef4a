"""Text, table and file formatters for command results.

Every formatter renders plain data with ``format()``; ``table()`` gives the
rich rendering shown on a terminal.
"""
import json
import math
import os
from typing import Iterable, List, Sequence

from attrs import asdict
import numpy as np
from rich.table import Table

from ..bounds import ConditionReport, DerivedConstants
from ..constants import FORMAT_VERSION
from ..special import C1Convention
from ..verification import VerificationReport, dumps_reports
from .binary import write_positions, write_snapshot
from .constants import CSV_FORMAT, VERDICT_STYLES

__all__ = [
    "BaseFormatter",
    "ConstantsFormatter",
    "SweepFormatter",
    "ReportFormatter",
    "field_rows",
    "output_path",
    "write_csv",
    "write_field",
    "write_particles",
]


QUANTITIES = ("A", "B", "K1", "K2", "discriminant", "C_q", "condition_lhs", "uniqueness_lhs")


def _number(value):
    if value is None:
        return "-"
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return f"{value:.6g}"


def output_path(out: str, stem: str, config_hash: str, suffix: str):
    """<out>/<stem>-<hash>.<suffix>, creating the directory."""
    os.makedirs(out, exist_ok=True)
    return os.path.join(out, f"{stem}-{config_hash}.{suffix}")


def write_csv(path, rows, columns: Sequence[str], config_hash: str):
    header = "\n".join(
        [f"# format_version={FORMAT_VERSION} config_hash={config_hash}", ",".join(columns)]
    )
    np.savetxt(
        path,
        np.asarray(rows, dtype=float).reshape(-1, len(columns)),
        delimiter=",",
        header=header,
        comments="",
        fmt=CSV_FORMAT,
    )


class BaseFormatter:
    def format(self):
        raise NotImplementedError

    def table(self):
        raise NotImplementedError


class ConstantsFormatter(BaseFormatter):
    """Derived constants and condition reports for each C1 convention."""

    def __init__(
        self,
        params,
        constants: Sequence[DerivedConstants],
        conditions: Sequence[ConditionReport],
        config_hash: str,
        threshold: float = None,
        threshold_convention: C1Convention = C1Convention.exact,
    ):
        self.params = params
        self.constants = constants
        self.conditions = conditions
        self.config_hash = config_hash
        self.threshold = threshold
        self.threshold_convention = threshold_convention

    def to_dict(self):
        return {
            "format_version": FORMAT_VERSION,
            "config_hash": self.config_hash,
            "params": asdict(self.params),
            "existence_threshold": self.threshold,
            "existence_threshold_convention": self.threshold_convention.name,
            "constants": [constants.to_dict() for constants in self.constants],
            "conditions": [condition.to_dict() for condition in self.conditions],
        }

    def format(self):
        return json.dumps(self.to_dict(), indent=2)

    def table(self):
        params = self.params
        table = Table(title=f"constants d={params.d} q={params.q:g} chi={params.chi:g}")
        table.add_column("quantity")
        for constants in self.constants:
            table.add_column(constants.convention.name, justify="right")
        for name in QUANTITIES:
            table.add_row(name, *(_number(getattr(c, name)) for c in self.constants))
        for name in dict.fromkeys(condition.name for condition in self.conditions):
            by_convention = {
                condition.convention: condition
                for condition in self.conditions
                if condition.name == name
            }
            cells = []
            for constants in self.constants:
                condition = by_convention.get(constants.convention)
                if condition is None:
                    cells.append("-")
                else:
                    cells.append("satisfied" if condition.satisfied else "violated")
            table.add_row(name, *cells)
        if self.threshold is not None:
            table.add_row(
                "existence_threshold",
                *(
                    _number(self.threshold) if c.convention is self.threshold_convention else "-"
                    for c in self.constants
                ),
            )
        return table


class SweepFormatter(BaseFormatter):
    """Condition left-hand side over a chi grid."""

    COLUMNS = ("chi", "condition_lhs", "C_q", "satisfied")

    def __init__(self, rows: Iterable[tuple], config_hash: str):
        self.rows = list(rows)
        self.config_hash = config_hash

    def format(self):
        lines = [f"# format_version={FORMAT_VERSION} config_hash={self.config_hash}"]
        lines.append(",".join(self.COLUMNS))
        for chi, lhs, C_q, satisfied in self.rows:
            C_q = "nan" if C_q is None else repr(C_q)
            lines.append(f"{chi!r},{lhs!r},{C_q},{int(satisfied)}")
        return "\n".join(lines) + "\n"

    def table(self):
        table = Table(title="existence condition sweep")
        for column in self.COLUMNS:
            table.add_column(column, justify="right")
        for chi, lhs, C_q, satisfied in self.rows:
            table.add_row(_number(chi), _number(lhs), _number(C_q), str(bool(satisfied)))
        return table


class ReportFormatter(BaseFormatter):
    def __init__(self, reports: List[VerificationReport]):
        self.reports = reports

    def format(self):
        return dumps_reports(self.reports)

    def table(self):
        table = Table(title="verification")
        for column in ("check", "kind", "predicted", "measured", "tolerance", "verdict"):
            table.add_column(column)
        for report in self.reports:
            verdict = report.verdict.value
            table.add_row(
                report.check_id,
                report.kind.value,
                _number(report.predicted),
                _number(report.measured),
                _number(report.tolerance),
                f"[{VERDICT_STYLES[verdict]}]{verdict}[/]",
            )
        return table


def _axis_columns(d: int):
    return ("x", "y", "z")[:d]


def field_rows(field):
    """One row per grid point: coordinates then value."""
    coordinates = field.grid.coordinates().reshape(-1, field.d)
    return np.column_stack([coordinates, field.values.reshape(-1)])


def write_field(out: str, stem: str, field, t: float, config_hash: str, fmt: str):
    """Dump a scalar grid field as binary, CSV rows or JSON; returns the path."""
    if fmt == "binary":
        path = output_path(out, stem, config_hash, "bin")
        write_snapshot(path, field, t, config_hash)
    elif fmt == "csv":
        path = output_path(out, stem, config_hash, "csv")
        write_csv(path, field_rows(field), (*_axis_columns(field.d), "value"), config_hash)
    else:
        path = output_path(out, stem, config_hash, "json")
        with open(path, "w", encoding="utf-8") as dump:
            json.dump(
                {
                    "format_version": FORMAT_VERSION,
                    "config_hash": config_hash,
                    "t": t,
                    "grid": field.grid.to_dict(),
                    "values": field.values.tolist(),
                },
                dump,
            )
    return path


def write_particles(out: str, stem: str, positions, t: float, config_hash: str, fmt: str):
    if fmt == "binary":
        path = output_path(out, stem, config_hash, "bin")
        write_positions(path, positions, t, config_hash)
    elif fmt == "csv":
        path = output_path(out, stem, config_hash, "csv")
        write_csv(path, positions, _axis_columns(positions.shape[1]), config_hash)
    else:
        path = output_path(out, stem, config_hash, "json")
        with open(path, "w", encoding="utf-8") as dump:
            json.dump(
                {
                    "format_version": FORMAT_VERSION,
                    "config_hash": config_hash,
                    "t": t,
                    "positions": positions.tolist(),
                },
                dump,
            )
    return path
