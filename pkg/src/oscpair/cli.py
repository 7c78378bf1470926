"""Command-line front end: trajectory runs, regime reports, sweeps, presets.

Output contract: one CSV per run with header

    t,E_N,Delta,nu_minus,purity[,s11..s44]

plus a JSON sidecar (same path, .json extension) carrying the resolved
configuration, regime diagnostics and the library version. Numbers are
written as shortest round-trip decimals so identical configurations
produce byte-identical files.

Exit codes: 0 success, 2 usage or configuration error, 3 numerical
inconsistency, 4 trajectory truncated by the overflow guard.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .dynamics import (
    DissipationSpec,
    death_time,
    drift_and_diffusion,
    entanglement_trajectory,
)
from .model import (
    OscillatorPair,
    build_hamiltonian,
    classify_regime,
    critical_coupling,
    diagonal_hamiltonian,
    diagonalizer_params,
    normal_mode_energies_sq,
    symplectic_frequencies,
)
from .states import NumericalInconsistencyError, ThermalSpec, thermal_covariance

__all__ = ["RunConfig", "UsageError", "run_simulation", "regime_report", "sweep", "PRESETS", "main"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_TRUNCATED = 4

SWEEP_AXES = ("g", "g_over_gc", "eta1", "eta2", "gamma1", "gamma2", "nbar1", "nbar2")


class UsageError(ValueError):
    """Configuration or argument problem; maps to exit code 2."""


@dataclasses.dataclass
class RunConfig:
    """Resolved inputs of a single simulation run.

    Exactly one of g and g_over_gc must be set. Dissipation is active
    when either coupling rate is positive.
    """

    omega1: float = 1.0
    omega2: float = 1.0
    g: Optional[float] = None
    g_over_gc: Optional[float] = None
    eta1: float = 0.0
    eta2: float = 0.0
    gamma1: float = 0.0
    gamma2: float = 0.0
    nbar1: float = 0.0
    nbar2: float = 0.0
    t_max: float = 20.0
    dt: float = 0.01
    emit_sigma: bool = False
    out: str = "trajectory.csv"
    fmt: str = "csv"
    label: Optional[str] = None
    primary_observable: str = "E_N"

    def resolved_coupling(self) -> tuple[float, float]:
        """(g, g_over_gc) with the missing one derived."""
        if (self.g is None) == (self.g_over_gc is None):
            raise UsageError("exactly one of g and g_over_gc must be given")
        if not (self.omega1 > 0 and self.omega2 > 0):
            raise UsageError(
                f"frequencies must be positive, got omega1={self.omega1}, omega2={self.omega2}"
            )
        gc = math.sqrt(self.omega1 * self.omega2)
        if self.g is not None:
            return self.g, self.g / gc
        return self.g_over_gc * gc, self.g_over_gc

    def oscillator(self) -> OscillatorPair:
        g, _ = self.resolved_coupling()
        try:
            return OscillatorPair(self.omega1, self.omega2, g)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc

    def thermal(self) -> ThermalSpec:
        try:
            return ThermalSpec(self.eta1, self.eta2)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc

    def dissipation(self) -> Optional[DissipationSpec]:
        if self.gamma1 == 0 and self.gamma2 == 0:
            return None
        try:
            return DissipationSpec(self.gamma1, self.gamma2, self.nbar1, self.nbar2)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc

    def time_grid(self) -> list[float]:
        if not (self.t_max > 0 and math.isfinite(self.t_max)):
            raise UsageError(f"t_max must be positive, got {self.t_max}")
        if not (0 < self.dt <= self.t_max):
            raise UsageError(f"dt must satisfy 0 < dt <= t_max, got {self.dt}")
        n = max(1, math.ceil(self.t_max / self.dt - 1e-9))
        h = self.t_max / n
        return [k * h for k in range(n + 1)]

    def validate(self) -> None:
        self.oscillator()
        self.thermal()
        self.dissipation()
        self.time_grid()
        if self.fmt not in ("csv", "json"):
            raise UsageError(f"format must be csv or json, got {self.fmt}")
        if self.primary_observable not in ("E_N", "Delta", "purity"):
            raise UsageError(f"unknown primary observable {self.primary_observable}")


def _fmt_num(x: float) -> str:
    return repr(float(x))


SIGMA_COLUMNS = [f"s{i}{j}" for i in range(1, 5) for j in range(1, 5)]


def _csv_lines(records, emit_sigma: bool) -> list[str]:
    header = "t,E_N,Delta,nu_minus,purity"
    if emit_sigma:
        header += "," + ",".join(SIGMA_COLUMNS)
    lines = [header]
    for r in records:
        fields = [
            _fmt_num(r.t),
            _fmt_num(r.log_negativity),
            _fmt_num(r.seralian),
            _fmt_num(r.nu_minus),
            _fmt_num(r.purity),
        ]
        if emit_sigma:
            fields.extend(_fmt_num(v) for v in np.asarray(r.sigma).reshape(-1))
        lines.append(",".join(fields))
    return lines


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def regime_report(cfg: RunConfig) -> dict:
    """Static diagnostics of the configured pair, no time evolution."""
    cfg.validate()
    osc = cfg.oscillator()
    g, g_over_gc = cfg.resolved_coupling()
    hmat = build_hamiltonian(osc)
    eplus_sq, eminus_sq = normal_mode_energies_sq(osc)
    nu_plus, nu_minus_sq = symplectic_frequencies(hmat)
    mode_plus, mode_minus = diagonal_hamiltonian(osc)
    report = {
        "omega1": osc.omega1,
        "omega2": osc.omega2,
        "g": g,
        "g_over_gc": g_over_gc,
        "g_c": critical_coupling(osc),
        "regime": classify_regime(osc).value,
        "normal_mode_energies_sq": {"plus": eplus_sq, "minus": eminus_sq},
        "symplectic_frequencies": {"nu_plus": nu_plus, "nu_minus_sq": nu_minus_sq},
        "modes": [
            {"label": m.label, "p_coeff": m.p_coeff, "x_coeff": m.x_coeff}
            for m in (mode_plus, mode_minus)
        ],
        "version": __version__,
    }
    if osc.g > 0:
        p = diagonalizer_params(osc)
        report["diagonalizer"] = {"A": p.A, "B": p.B, "c": p.c, "s": p.s}
    else:
        report["diagonalizer"] = None
    d = cfg.dissipation()
    if d is not None:
        drift, _ = drift_and_diffusion(hmat, d)
        eig = np.linalg.eigvals(drift)
        order = np.lexsort((eig.imag, eig.real))
        report["drift_eigenvalues"] = [[float(z.real), float(z.imag)] for z in eig[order]]
    else:
        report["drift_eigenvalues"] = None
    return report


def run_simulation(cfg: RunConfig, assumptions: Optional[list[str]] = None) -> int:
    """Run one trajectory and write the data file plus its sidecar."""
    cfg.validate()
    osc = cfg.oscillator()
    hmat = build_hamiltonian(osc)
    sigma0 = thermal_covariance(cfg.thermal())
    d = cfg.dissipation()
    grid = cfg.time_grid()
    records = entanglement_trajectory(sigma0, hmat, grid, dissipation=d, keep_sigma=cfg.emit_sigma)
    truncated = len(records) < len(grid)

    out = Path(cfg.out)
    if cfg.fmt == "csv":
        _write_text(out, "\n".join(_csv_lines(records, cfg.emit_sigma)) + "\n")
    else:
        columns = ["t", "E_N", "Delta", "nu_minus", "purity"]
        rows = [[r.t, r.log_negativity, r.seralian, r.nu_minus, r.purity] for r in records]
        if cfg.emit_sigma:
            columns += SIGMA_COLUMNS
            rows = [
                row + [float(v) for v in np.asarray(r.sigma).reshape(-1)]
                for row, r in zip(rows, records)
            ]
        _write_text(out, _dump_json({"columns": columns, "rows": rows}))

    sidecar = regime_report(cfg)
    g, g_over_gc = cfg.resolved_coupling()
    sidecar["config"] = {
        "omega1": cfg.omega1,
        "omega2": cfg.omega2,
        "g": g,
        "g_over_gc": g_over_gc,
        "eta1": cfg.eta1,
        "eta2": cfg.eta2,
        "gamma1": cfg.gamma1,
        "gamma2": cfg.gamma2,
        "nbar1": cfg.nbar1,
        "nbar2": cfg.nbar2,
        "t_max": cfg.t_max,
        "dt": cfg.dt,
        "emit_sigma": cfg.emit_sigma,
        "format": cfg.fmt,
    }
    sidecar["label"] = cfg.label or f"g/g_c={_fmt_num(g_over_gc)}"
    sidecar["primary_observable"] = cfg.primary_observable
    sidecar["rows"] = len(records)
    sidecar["truncated"] = truncated
    sidecar["death_time"] = (
        death_time(sigma0, hmat, d, cfg.t_max, dt=cfg.dt) if d is not None else None
    )
    if assumptions:
        sidecar["assumptions"] = assumptions
    sidecar_path = out.with_suffix(".json") if cfg.fmt == "csv" else out.with_suffix(".meta.json")
    _write_text(sidecar_path, _dump_json(sidecar))
    return EXIT_TRUNCATED if truncated else EXIT_OK


def sweep(
    cfg: RunConfig,
    axis: str,
    values: Sequence[float],
    out_dir: str,
    workers: int = 1,
    prefix: str = "sweep",
    assumptions: Optional[list[str]] = None,
) -> int:
    """One run per axis value; file names derive from the value."""
    if axis not in SWEEP_AXES:
        raise UsageError(f"unknown sweep axis {axis!r}; choose one of {', '.join(SWEEP_AXES)}")
    values = [float(v) for v in values]
    if not values:
        raise UsageError("sweep needs at least one value")
    if workers < 1:
        raise UsageError("workers must be >= 1")

    runs = []
    for v in values:
        override = {axis: v}
        # Setting a coupling axis clears the other coupling field.
        if axis == "g":
            override["g_over_gc"] = None
        elif axis == "g_over_gc":
            override["g"] = None
        label_key = "g/g_c" if axis == "g_over_gc" else axis
        out = Path(out_dir) / f"{prefix}_{axis}_{_fmt_num(v)}.csv"
        runs.append(
            dataclasses.replace(
                cfg, out=str(out), label=f"{label_key}={_fmt_num(v)}", **override
            )
        )
    for r in runs:
        r.validate()

    def one(c: RunConfig) -> int:
        return run_simulation(c, assumptions=assumptions)

    if workers == 1:
        codes = [one(r) for r in runs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            codes = list(pool.map(one, runs))
    return max(codes)


def _preset_assumptions(extra: list[str]) -> list[str]:
    base = ["time window and sweep values are documented choices, not published numbers"]
    return base + extra


PRESETS: dict[str, dict] = {
    "fig2a": {
        "base": dict(omega1=5.0, omega2=1.0, eta1=0.0, eta2=1.0, t_max=20.0, dt=0.01,
                     primary_observable="E_N"),
        "axis": "g_over_gc",
        "values": [0.5, 0.9, 1.0, 1.2, 1.5],
        "assumptions": _preset_assumptions([]),
    },
    "fig2b": {
        "base": dict(omega1=5.0, omega2=1.0, eta1=0.0, eta2=1.0, t_max=20.0, dt=0.01,
                     primary_observable="Delta"),
        "axis": "g_over_gc",
        "values": [0.5, 0.9, 1.0, 1.2, 1.5],
        "assumptions": _preset_assumptions([]),
    },
    "fig3a": {
        "base": dict(omega1=1.0, omega2=1.0, g_over_gc=1.0, eta1=0.0, t_max=20.0, dt=0.01,
                     primary_observable="E_N"),
        "axis": "eta2",
        "values": [0.0, 1.0, 2.0, 5.0],
        "assumptions": _preset_assumptions([]),
    },
    "fig3b": {
        "base": dict(omega1=1.0, omega2=1.0, g_over_gc=1.0, eta1=5.0, t_max=50.0, dt=0.01,
                     primary_observable="E_N"),
        "axis": "eta2",
        "values": [0.0, 1.0, 2.0, 5.0],
        "assumptions": _preset_assumptions([]),
    },
    "fig4": {
        "base": dict(omega1=5.0, omega2=1.0, eta1=0.0, eta2=1.0, gamma1=0.05, gamma2=0.25,
                     nbar1=1.0, nbar2=1.0, t_max=20.0, dt=0.01, primary_observable="E_N"),
        "axis": "g_over_gc",
        "values": [0.5, 1.0, 1.5],
        "assumptions": _preset_assumptions([
            "initial thermal occupations (eta1, eta2) = (0, 1) carried over from the "
            "closed-system configuration",
            "nbar2 = 1 assumed; only nbar1 and the rates are pinned",
        ]),
    },
}


def run_preset(name: str, out_dir: str, workers: int = 1) -> int:
    spec = PRESETS.get(name)
    if spec is None:
        raise UsageError(f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}")
    cfg = RunConfig(**spec["base"])
    return sweep(
        cfg,
        spec["axis"],
        spec["values"],
        out_dir,
        workers=workers,
        prefix=name,
        assumptions=spec["assumptions"],
    )


# ---------------------------------------------------------------------------
# argument parsing

_PHYSICS_FLAGS: dict[str, dict] = {
    "omega1": dict(type=float, help="frequency of mode 1 (units of omega2)"),
    "omega2": dict(type=float, help="frequency of mode 2"),
    "g": dict(type=float, help="coupling rate (exclusive with --g-over-gc)"),
    "g_over_gc": dict(type=float, help="coupling in units of the critical coupling"),
    "eta1": dict(type=float, help="initial mean excitation of mode 1"),
    "eta2": dict(type=float, help="initial mean excitation of mode 2"),
    "gamma1": dict(type=float, help="mode 1 environment coupling rate"),
    "gamma2": dict(type=float, help="mode 2 environment coupling rate"),
    "nbar1": dict(type=float, help="mode 1 bath occupation"),
    "nbar2": dict(type=float, help="mode 2 bath occupation"),
    "t_max": dict(type=float, help="end of the time window"),
    "dt": dict(type=float, help="sample spacing"),
    "label": dict(type=str, help="legend label stored in the sidecar"),
}


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    for name, spec in _PHYSICS_FLAGS.items():
        parser.add_argument(f"--{name.replace('_', '-')}", default=None, **spec)
    parser.add_argument("--config", default=None, help="key=value config file; flags override it")
    parser.add_argument("--emit-sigma", action="store_true", default=None,
                        help="append the 16 covariance entries to each row")
    parser.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None,
                        help="data file format (default csv)")


def _parse_config_file(path: str) -> dict:
    fields = {f.name: f for f in dataclasses.fields(RunConfig)}
    out: dict = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in fields:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        if key in ("out", "fmt", "label", "primary_observable"):
            out[key] = value
        elif key == "emit_sigma":
            if value.lower() not in ("true", "false"):
                raise UsageError(f"{path}:{lineno}: emit_sigma must be true or false")
            out[key] = value.lower() == "true"
        else:
            try:
                out[key] = float(value)
            except ValueError as exc:
                raise UsageError(f"{path}:{lineno}: {key} needs a number, got {value!r}") from exc
    return out


def _build_config(args: argparse.Namespace) -> RunConfig:
    merged: dict = {}
    if getattr(args, "config", None):
        merged.update(_parse_config_file(args.config))
    for f in dataclasses.fields(RunConfig):
        flag_value = getattr(args, f.name, None)
        if flag_value is not None:
            merged[f.name] = flag_value
    return RunConfig(**merged)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="oscpair",
        description="Covariance-level simulator for two linearly coupled oscillators.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one trajectory and write CSV + sidecar")
    _add_run_flags(p_sim)
    p_sim.add_argument("--out", default=None, help="output data file (default trajectory.csv)")

    p_rep = sub.add_parser("report", help="print regime diagnostics as JSON")
    _add_run_flags(p_rep)
    p_rep.add_argument("--out", default=None, help="write the report here instead of stdout")

    p_swp = sub.add_parser("sweep", help="run a family of trajectories over one axis")
    _add_run_flags(p_swp)
    p_swp.add_argument("--axis", required=True, help=f"one of {', '.join(SWEEP_AXES)}")
    p_swp.add_argument("--values", required=True,
                       help="comma-separated values, e.g. 0.5,1.0,1.5")
    p_swp.add_argument("--out-dir", default=".", help="directory for the output files")
    p_swp.add_argument("--prefix", default="sweep", help="output file name prefix")
    p_swp.add_argument("--workers", type=int, default=1, help="concurrent runs")

    p_pre = sub.add_parser("preset", help="run a named figure preset")
    p_pre.add_argument("name", help=f"one of {', '.join(sorted(PRESETS))}")
    p_pre.add_argument("--out-dir", default=".", help="directory for the output files")
    p_pre.add_argument("--workers", type=int, default=1, help="concurrent runs")

    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            cfg = _build_config(args)
            if args.out is not None:
                cfg.out = args.out
            return run_simulation(cfg)
        if args.command == "report":
            cfg = _build_config(args)
            doc = _dump_json(regime_report(cfg))
            if args.out:
                _write_text(Path(args.out), doc)
            else:
                sys.stdout.write(doc)
            return EXIT_OK
        if args.command == "sweep":
            cfg = _build_config(args)
            try:
                values = [float(v) for v in args.values.split(",") if v.strip()]
            except ValueError as exc:
                raise UsageError(f"bad --values list: {exc}") from exc
            return sweep(cfg, args.axis, values, args.out_dir,
                         workers=args.workers, prefix=args.prefix)
        if args.command == "preset":
            return run_preset(args.name, args.out_dir, workers=args.workers)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalInconsistencyError as exc:
        print(f"error: numerical inconsistency: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
