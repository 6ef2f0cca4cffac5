"""Config-driven command line front end.

Usage:

    damped-eb <command> --config <path> [--out <dir>] [--profile paper|fast]

Commands: simulate, temporal-study, spatial-study, energy-study,
validate-law.  Configs are flat ``key = value`` files with ``[section]``
headers ([problem], [grid], [time], [study], [output]), ``#`` comments,
and double-quoted expressions; see the bundled configs for the layout.
The fast profile substitutes the *_fast keys (when present) for their
full-size counterparts.

Artifacts land in the output directory: ``report.csv`` always,
``report.md`` for studies, ``energy.svg`` for energy studies,
``solution.csv`` (final U and V per node) for simulate.  Every CSV starts
with a comment line carrying the sha256 of the config file and the
profile, then a header row.  Exit status is nonzero on I/O errors and on
acceptance-relevant violations (a stability-bound breach, or an energy
increase beyond tolerance in an unforced run).
"""
from __future__ import annotations

import argparse
import dataclasses
import hashlib
import sys
from pathlib import Path

import numpy as np

from . import damping as damping_mod
from . import expr as expr_mod
from . import harness
from .mesh import Grid1D, Grid2D, TimeGrid
from .stepper1d import Problem1D, run, stability_check
from .stepper2d import Problem2D, run2d

__all__ = ["ConfigError", "RunConfig", "load_config", "execute", "main", "entry"]

COMMANDS = (
    "simulate",
    "temporal-study",
    "spatial-study",
    "energy-study",
    "validate-law",
)

ENERGY_TOL_1D = 1e-12
ENERGY_TOL_2D = 1e-11
STABILITY_TOL = 1e-10


class ConfigError(ValueError):
    pass


_EXPR_KEYS = {"u0", "u1", "f", "lap_u0", "bilap_u0"}
_INT_KEYS = {"dimension", "J", "J2", "N", "N_fast", "samples"}
_FLOAT_KEYS = {"T", "cg_tol", "law_p0", "z_max"}
_LIST_KEYS = {"N_list", "N_list_fast", "J_list", "J_list_fast"}

_SECTION_KEYS = {
    "problem": {"dimension", "u0", "u1", "f", "lap_u0", "bilap_u0", "law", "law_p0"},
    "grid": {"J", "J2", "cg_tol"},
    "time": {"N", "N_fast", "T"},
    "study": {"N_list", "N_list_fast", "J_list", "J_list_fast", "z_max", "samples"},
    "output": {"dir"},
}

_REQUIRED = {
    "simulate": ("dimension", "u0", "u1", "f", "law", "J", "N", "T"),
    "temporal-study": ("dimension", "u0", "u1", "f", "law", "J", "T", "N_list"),
    "spatial-study": ("dimension", "u0", "u1", "f", "law", "N", "T", "J_list"),
    "energy-study": ("dimension", "u0", "u1", "f", "law", "J", "N", "T"),
    "validate-law": ("law",),
}


@dataclasses.dataclass
class RunConfig:
    path: Path
    raw: bytes
    command: str | None = None
    dimension: int | None = None
    u0: object | None = None
    u1: object | None = None
    f: object | None = None
    lap_u0: object | None = None
    bilap_u0: object | None = None
    law: str | None = None
    law_p0: float | None = None
    J: int | None = None
    J2: int | None = None
    cg_tol: float | None = None
    N: int | None = None
    N_fast: int | None = None
    T: float | None = None
    N_list: list[int] | None = None
    N_list_fast: list[int] | None = None
    J_list: list[int] | None = None
    J_list_fast: list[int] | None = None
    z_max: float | None = None
    samples: int | None = None
    out_dir: str = "."


def _strip_comment(line: str) -> str:
    out = []
    in_quote = False
    for c in line:
        if c == '"':
            in_quote = not in_quote
        if c == "#" and not in_quote:
            break
        out.append(c)
    return "".join(out)


def _convert(key: str, value: str, where: str):
    if key in _EXPR_KEYS:
        if not (value.startswith('"') and value.endswith('"') and len(value) >= 2):
            raise ConfigError(f"{where}: expression value for {key} must be quoted")
        try:
            return expr_mod.parse(value[1:-1])
        except expr_mod.ParseError as exc:
            raise ConfigError(f"{where}: bad expression for {key}: {exc}") from None
    if value.startswith('"') and value.endswith('"'):
        value = value[1:-1]
    try:
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
        if key in _LIST_KEYS:
            return [int(part.strip()) for part in value.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"{where}: invalid value {value!r} for {key}") from None
    return value


def load_config(path, command: str | None = None) -> RunConfig:
    """Parse and validate a config file; eagerly parses all expressions.

    When ``command`` is given, presence of that command's required keys is
    enforced here (errors name the missing key).
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    raw = path.read_bytes()
    cfg = RunConfig(path=path, raw=raw, command=command)
    section = None
    for lineno, full_line in enumerate(raw.decode("utf-8").splitlines(), start=1):
        where = f"{path.name}:{lineno}"
        line = _strip_comment(full_line).strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SECTION_KEYS:
                raise ConfigError(f"{where}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"{where}: expected 'key = value'")
        if section is None:
            raise ConfigError(f"{where}: key outside of any [section]")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _SECTION_KEYS[section]:
            raise ConfigError(f"{where}: unknown key {key!r} in [{section}]")
        attr = "out_dir" if key == "dir" else key
        setattr(cfg, attr, _convert(key, value, where))
    _validate(cfg, command)
    return cfg


def _validate(cfg: RunConfig, command: str | None):
    name = cfg.path.name
    if cfg.dimension is not None and cfg.dimension not in (1, 2):
        raise ConfigError(f"{name}: dimension must be 1 or 2")
    for key in ("J", "J2"):
        v = getattr(cfg, key)
        if v is not None and v < 2:
            raise ConfigError(f"{name}: {key} must be >= 2")
    for key in ("N", "N_fast", "samples"):
        v = getattr(cfg, key)
        if v is not None and v < 1:
            raise ConfigError(f"{name}: {key} must be positive")
    for key in ("T", "cg_tol", "z_max"):
        v = getattr(cfg, key)
        if v is not None and v <= 0:
            raise ConfigError(f"{name}: {key} must be positive")
    for key in ("N_list", "N_list_fast", "J_list", "J_list_fast"):
        v = getattr(cfg, key)
        if v is not None and (not v or any(n < 1 for n in v) or v != sorted(v)):
            raise ConfigError(f"{name}: {key} must be ascending positive integers")
    if cfg.dimension == 1:
        for key in ("u0", "u1", "f", "lap_u0", "bilap_u0"):
            tree = getattr(cfg, key)
            if tree is not None and expr_mod.uses_variable(tree, "y"):
                raise ConfigError(
                    f"{name}: {key} uses variable y but dimension = 1"
                )
    if cfg.law is not None:
        try:
            damping_mod.law_from_spec(cfg.law, p0=cfg.law_p0)
        except (ValueError, ArithmeticError) as exc:
            raise ConfigError(f"{name}: bad law {cfg.law!r}: {exc}") from None
    if command is not None:
        if command not in _REQUIRED:
            raise ConfigError(f"unknown command {command!r}")
        for key in _REQUIRED[command]:
            if getattr(cfg, key) is None:
                raise ConfigError(f"{name}: missing key {key!r} for {command}")


# ---------------------------------------------------------------------------
# artifact writers

def _fmt_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_csv(path: Path, comment: str, header: list[str], rows) -> None:
    lines = [f"# {comment}", ",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt_cell(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _energy_svg(records, caption: str) -> str:
    width, height = 640, 400
    ml, mr, mt, mb = 80, 20, 40, 50
    # decimate long runs; a 32768-point polyline adds nothing visually
    stride = max(1, len(records) // 2048)
    pts = records[::stride]
    if pts[-1] is not records[-1]:
        pts = list(pts) + [records[-1]]
    ns = [r.n for r in pts]
    es = [r.E for r in pts]
    emin, emax = min(es), max(es)
    espan = (emax - emin) or 1.0
    nspan = (ns[-1] - ns[0]) or 1

    def xmap(n):
        return ml + (width - ml - mr) * (n - ns[0]) / nspan

    def ymap(e):
        return mt + (height - mt - mb) * (emax - e) / espan

    points = " ".join(f"{xmap(n):.2f},{ymap(e):.2f}" for n, e in zip(ns, es))
    return f"""<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}">
<rect width="{width}" height="{height}" fill="white"/>
<text x="{width / 2:.0f}" y="22" text-anchor="middle" font-size="14">{caption}</text>
<line x1="{ml}" y1="{height - mb}" x2="{width - mr}" y2="{height - mb}" stroke="black"/>
<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{height - mb}" stroke="black"/>
<text x="{ml}" y="{height - mb + 18}" text-anchor="middle" font-size="11">{ns[0]}</text>
<text x="{width - mr}" y="{height - mb + 18}" text-anchor="middle" font-size="11">{ns[-1]}</text>
<text x="{(ml + width - mr) / 2:.0f}" y="{height - 12}" text-anchor="middle" font-size="12">time index n</text>
<text x="{ml - 8}" y="{height - mb}" text-anchor="end" font-size="11">{emin:.6g}</text>
<text x="{ml - 8}" y="{mt + 6}" text-anchor="end" font-size="11">{emax:.6g}</text>
<text x="16" y="{(mt + height - mb) / 2:.0f}" font-size="12" transform="rotate(-90 16 {(mt + height - mb) / 2:.0f})" text-anchor="middle">energy</text>
<polyline fill="none" stroke="#1f6fb2" stroke-width="1.5" points="{points}"/>
</svg>
"""


# ---------------------------------------------------------------------------
# command execution

def _resolve_profile(cfg: RunConfig, profile: str):
    if profile == "fast":
        N = cfg.N_fast if cfg.N_fast is not None else cfg.N
        n_list = cfg.N_list_fast if cfg.N_list_fast is not None else cfg.N_list
        j_list = cfg.J_list_fast if cfg.J_list_fast is not None else cfg.J_list
        return N, n_list, j_list
    return cfg.N, cfg.N_list, cfg.J_list


def _build_problem(cfg: RunConfig):
    law = damping_mod.law_from_spec(cfg.law, p0=cfg.law_p0)
    cls = Problem1D if cfg.dimension == 1 else Problem2D
    return cls(
        u0=cfg.u0,
        u1=cfg.u1,
        f=cfg.f,
        law=law,
        T=cfg.T,
        lap_u0=cfg.lap_u0,
        bilap_u0=cfg.bilap_u0,
    )


def _records_unforced(records) -> bool:
    # the bound only grows past E^0 when some sampled forcing was nonzero
    return records[-1].bound == records[0].E


def _check_energy_monotone(records, dimension: int) -> list[str]:
    tol = (ENERGY_TOL_1D if dimension == 1 else ENERGY_TOL_2D) * (1.0 + records[0].E)
    problems = []
    for prev, cur in zip(records, records[1:]):
        if cur.E > prev.E + tol:
            problems.append(
                f"energy increased at n={cur.n}: {prev.E!r} -> {cur.E!r}"
            )
    return problems


def execute(cfg: RunConfig, out_dir=None, profile: str = "paper") -> int:
    """Run the config's command; returns the process exit status."""
    command = cfg.command
    if command not in COMMANDS:
        print(f"error: unknown command {command!r}", file=sys.stderr)
        return 2
    digest = hashlib.sha256(cfg.raw).hexdigest()
    comment = f"config sha256={digest} profile={profile}"
    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create output directory: {exc}", file=sys.stderr)
        return 1
    N, n_list, j_list = _resolve_profile(cfg, profile)
    try:
        if command == "validate-law":
            law = damping_mod.law_from_spec(cfg.law, p0=cfg.law_p0)
            report = damping_mod.validate_law(
                law, cfg.z_max or 100.0, cfg.samples or 1000
            )
            _write_csv(
                out / "report.csv",
                comment,
                [
                    "law",
                    "z_max",
                    "samples",
                    "p_min",
                    "p_max",
                    "lower_bound_violations",
                    "monotonicity_violations",
                    "lipschitz_violations",
                ],
                [
                    (
                        report.law,
                        report.z_max,
                        report.samples,
                        report.p_min,
                        report.p_max,
                        len(report.lower_bound_violations),
                        len(report.monotonicity_violations),
                        len(report.lipschitz_violations),
                    )
                ],
            )
            status = "ok" if report.ok else "violations found (advisory)"
            print(f"validate-law {report.law}: {status}")
            return 0

        problem = _build_problem(cfg)
        if command in ("temporal-study", "spatial-study"):
            cg_tol = cfg.cg_tol if cfg.cg_tol is not None else harness.STUDY_CG_TOL
            if command == "temporal-study":
                report = harness.temporal_study(
                    problem, cfg.J, n_list, J2=cfg.J2, cg_tol=cg_tol, profile=profile
                )
            else:
                report = harness.spatial_study(
                    problem, N, j_list, cg_tol=cg_tol, profile=profile
                )
            (out / "report.csv").write_text(
                f"# {comment}\n" + harness.report_csv(report), encoding="utf-8"
            )
            (out / "report.md").write_text(
                harness.report_markdown(report), encoding="utf-8"
            )
            return 0

        # simulate / energy-study share the single run
        tg = TimeGrid(N, cfg.T)
        if cfg.dimension == 1:
            grid = Grid1D(cfg.J)
            state, records = run(problem, grid, tg)
        else:
            grid = Grid2D(cfg.J, cfg.J2 if cfg.J2 is not None else cfg.J)
            state, records = run2d(
                problem, grid, tg, tol=cfg.cg_tol if cfg.cg_tol else 1e-12
            )
        _write_csv(
            out / "report.csv",
            comment,
            ["n", "energy", "bound"],
            [(r.n, r.E, r.bound) for r in records],
        )
        problems = []
        stability = stability_check(records, STABILITY_TOL)
        if not stability.ok:
            problems += [
                f"stability bound violated at n={n} (excess {excess:.3e})"
                for n, excess in stability.violations
            ]
        if _records_unforced(records):
            problems += _check_energy_monotone(records, cfg.dimension)
        if command == "energy-study":
            caption = (
                f"energy decay: {cfg.dimension}D, law {cfg.law}, "
                f"J={cfg.J}, N={N}"
            )
            (out / "energy.svg").write_text(
                _energy_svg(records, caption), encoding="utf-8"
            )
        else:
            _write_solution(out / "solution.csv", comment, cfg.dimension, grid, state)
        if problems:
            for p in problems:
                print(f"error: {p}", file=sys.stderr)
            return 1
        return 0
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _write_solution(path: Path, comment: str, dimension: int, grid, state) -> None:
    if dimension == 1:
        rows = [
            (j, grid.nodes[j], state.U_curr[j], state.V_curr[j])
            for j in range(grid.shape[0])
        ]
        _write_csv(path, comment, ["j", "x", "U", "V"], rows)
        return
    rows = []
    for i in range(grid.shape[0]):
        for j in range(grid.shape[1]):
            rows.append(
                (i, j, grid.xs[i], grid.ys[j], state.U_curr[i, j], state.V_curr[i, j])
            )
    _write_csv(path, comment, ["i", "j", "x", "y", "U", "V"], rows)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="damped-eb",
        description=(
            "Compact-difference solver for damped Euler-Bernoulli beam and "
            "plate equations"
        ),
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="path to a .cfg file")
    parser.add_argument("--out", default=None, help="output directory override")
    parser.add_argument("--profile", choices=("paper", "fast"), default="paper")
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, command=args.command)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return execute(cfg, out_dir=args.out, profile=args.profile)
    except Exception as exc:  # solver/expression failures become diagnostics
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    raise SystemExit(main())
