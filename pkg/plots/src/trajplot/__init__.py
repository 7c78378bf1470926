"""Trajectory CSV files to static figure images.

Consumes the simulator's flat-file interface: CSV with columns
``t,E_N,Delta,nu_minus,purity`` (optionally followed by the sixteen
covariance entries ``s11..s44``) and, when present, a JSON sidecar next
to each CSV carrying a legend ``label`` and a ``death_time``. No physics
is computed here, and rendering never drops, reorders, or resamples
points: each curve's vertex count equals its CSV row count. The one
exception is a log-scale y axis, where non-positive values cannot be
placed by the scale itself.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import matplotlib
from matplotlib.figure import Figure

REQUIRED_COLUMNS = ("t", "E_N", "Delta", "nu_minus", "purity")
SIGMA_COLUMNS = tuple(f"s{i}{j}" for i in range(1, 5) for j in range(1, 5))
Y_CHOICES = ("E_N", "Delta", "purity")

# Fixed salt so the hashed ids inside the SVG (clip paths, markers) are
# stable across runs; path simplification off so every data point
# survives into the output.
_RC = {
    "svg.hashsalt": "trajplot",
    "svg.fonttype": "none",
    "path.simplify": False,
}


class SchemaError(Exception):
    """Input file absent or not in the trajectory CSV schema.

    The message always names the offending file, and the column or line
    where the file diverges from the schema.
    """


@dataclass(frozen=True)
class PlotSpec:
    """One figure: one curve per input CSV."""

    inputs: tuple
    out: str
    y: str = "E_N"
    labels: Optional[tuple] = None
    title: Optional[str] = None
    fmt: Optional[str] = None
    log_y: bool = False

    def validate(self) -> None:
        if not self.inputs:
            raise ValueError("at least one input CSV is required")
        if self.y not in Y_CHOICES:
            raise ValueError(f"y must be one of {', '.join(Y_CHOICES)}; got {self.y!r}")
        if self.labels is not None and len(self.labels) != len(self.inputs):
            raise ValueError(
                f"{len(self.labels)} labels for {len(self.inputs)} inputs"
            )
        if self.resolved_format() not in ("svg", "png"):
            raise ValueError(f"unsupported format {self.resolved_format()!r}")

    def resolved_format(self) -> str:
        if self.fmt is not None:
            return self.fmt
        suffix = Path(self.out).suffix.lower().lstrip(".")
        return suffix if suffix in ("svg", "png") else "svg"


def read_trajectory(path) -> dict:
    """Parse one CSV into a column -> values dict, schema-checked.

    Raises SchemaError naming the file and the first offending column,
    line, or cell. The five required columns must come first and in
    order; covariance columns, when present, must be the complete
    s11..s44 block.
    """
    path = Path(path)
    if not path.is_file():
        raise SchemaError(f"{path}: no such file")
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        for i, want in enumerate(REQUIRED_COLUMNS):
            got = header[i] if i < len(header) else "end of header"
            if got != want:
                raise SchemaError(f"{path}: column {i + 1} must be {want!r}, got {got!r}")
        extra = header[len(REQUIRED_COLUMNS):]
        if extra:
            for k, want in enumerate(SIGMA_COLUMNS):
                got = extra[k] if k < len(extra) else "end of header"
                if got != want:
                    raise SchemaError(
                        f"{path}: covariance columns must be the full "
                        f"{SIGMA_COLUMNS[0]}..{SIGMA_COLUMNS[-1]} block; "
                        f"column {len(REQUIRED_COLUMNS) + k + 1} is {got!r}"
                    )
            if len(extra) > len(SIGMA_COLUMNS):
                raise SchemaError(
                    f"{path}: unexpected column {extra[len(SIGMA_COLUMNS)]!r}"
                )

        columns = {name: [] for name in header}
        for line_number, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise SchemaError(
                    f"{path}: line {line_number}: expected {len(header)} fields, "
                    f"got {len(row)}"
                )
            for name, cell in zip(header, row):
                try:
                    value = float(cell)
                except ValueError:
                    raise SchemaError(
                        f"{path}: line {line_number}, column {name!r}: "
                        f"not a number: {cell!r}"
                    ) from None
                if not math.isfinite(value):
                    raise SchemaError(
                        f"{path}: line {line_number}, column {name!r}: "
                        f"non-finite value {cell!r}"
                    )
                columns[name].append(value)
    if not columns["t"]:
        raise SchemaError(f"{path}: no data rows")
    return columns


def load_sidecar(csv_path) -> dict:
    """Metadata JSON next to the CSV; {} when absent or unusable.

    The sidecar is optional decoration (legend label, death time), so a
    missing or malformed one downgrades to the filename fallback instead
    of failing the render.
    """
    sidecar = Path(csv_path).with_suffix(".json")
    try:
        loaded = json.loads(sidecar.read_text())
    except (OSError, ValueError):
        return {}
    return loaded if isinstance(loaded, dict) else {}


def _legend_label(spec: PlotSpec, index: int, meta: dict) -> str:
    if spec.labels is not None and spec.labels[index] is not None:
        return str(spec.labels[index])
    label = meta.get("label")
    if isinstance(label, str) and label:
        return label
    return Path(spec.inputs[index]).stem


def render(spec: PlotSpec) -> Path:
    """Write the figure described by spec; returns the output path.

    One curve per input, in input order, carrying gid ``curve-<i>`` so
    the output SVG is mechanically checkable. Death times found in
    sidecars are drawn as x-markers on the zero line (E_N plots only,
    gid ``death-<i>``).
    """
    spec.validate()
    curves = [read_trajectory(p) for p in spec.inputs]
    sidecars = [load_sidecar(p) for p in spec.inputs]

    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(8.0, 5.0))
        ax = fig.add_subplot(111)
        data_lines = []
        death_lines = []
        for i, (cols, meta) in enumerate(zip(curves, sidecars)):
            (line,) = ax.plot(
                cols["t"],
                cols[spec.y],
                linewidth=1.2,
                label=_legend_label(spec, i, meta),
            )
            data_lines.append(line)
            t0 = meta.get("death_time")
            if spec.y == "E_N" and isinstance(t0, (int, float)) and math.isfinite(t0):
                (marker,) = ax.plot(
                    [t0],
                    [0.0],
                    linestyle="none",
                    marker="x",
                    markersize=7.0,
                    color="black",
                )
                death_lines.append((i, marker))
        if spec.log_y:
            ax.set_yscale("log")
        ax.set_xlabel("omega2 t")
        ax.set_ylabel(spec.y)
        if spec.title:
            ax.set_title(spec.title)
        ax.grid(True, alpha=0.25, linewidth=0.5)
        ax.legend(frameon=False)
        # gids go on after the legend is built: legend handles clone the
        # line properties, and a cloned gid would duplicate ids in the SVG.
        for i, line in enumerate(data_lines):
            line.set_gid(f"curve-{i}")
        for i, marker in death_lines:
            marker.set_gid(f"death-{i}")

        out = Path(spec.out)
        fmt = spec.resolved_format()
        if fmt == "svg":
            fig.savefig(out, format="svg", metadata={"Date": None})
        else:
            fig.savefig(out, format="png", dpi=150)
    return out


__all__ = [
    "PlotSpec",
    "REQUIRED_COLUMNS",
    "SIGMA_COLUMNS",
    "SchemaError",
    "Y_CHOICES",
    "load_sidecar",
    "read_trajectory",
    "render",
]
