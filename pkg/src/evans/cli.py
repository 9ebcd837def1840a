"""Command-line front end: configured contour sweeps, root searches, and
oracle cross-checks, with artifacts written to disk.

Runs are described by a TOML file (see README for the schema) with four
tables: [system] names and parameterizes the problem, [contour] describes
the sweep path, [run] holds solver settings, [roots] holds the search
region. Command-line flags override file values. Exit codes: 0 success,
1 configuration error (nothing is written), 2 numerical failure (report.json
carries a machine-readable "error" object).
"""

from __future__ import annotations

import argparse
import cmath
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # 3.10
    import tomli as tomllib

from .contours import ContourSpec, contour_eval, root_localize, winding_number
from .errors import EvansError, InvalidArgumentError
from .evaluation import EvansConfig
from .oracle import shooting_wronskian
from .systems import load_profile, registry, swift_hohenberg

__all__ = ["ConfigError", "RunConfig", "main"]


class ConfigError(Exception):
    """Anything wrong with flags or the TOML file; maps to exit code 1."""


@dataclass(frozen=True)
class RunConfig:
    """A fully validated run: the built system, the sweep path if one was
    configured, solver settings, and output destination."""

    system_name: str
    system: object
    contour: ContourSpec | None
    evans: EvansConfig
    output_dir: Path
    region: tuple[float, float, float, float] | None


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; 2 is reserved for numerical failure
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="evans", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("contour", "sweep a contour, write samples.csv/report.json/plot.gp"),
        ("roots", "localize roots in a region, write roots.json"),
        ("oracle-compare", "cross-check the contour winding against shooting"),
        ("validate-config", "schema-check a config without computing"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="TOML run configuration")
        p.add_argument("--system", help="registry name, overrides [system].name")
        p.add_argument("--L", type=float, help="truncation half-length")
        p.add_argument("--N", type=int, help="collocation degree")
        p.add_argument("--mode", choices=("sort", "track"),
                       help="frame labeling along the contour")
        p.add_argument("--ratio", type=float,
                       help="refinement ratio (contour sweep or root boxes)")
        p.add_argument("--out", help="output directory, overrides [run].output_dir")
        p.add_argument("--threads", help="worker count or 'auto'")
    return parser


# --------------------------------------------------------------- config load

def _load_toml(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    except tomllib.TOMLDecodeError as err:
        raise ConfigError(f"malformed TOML in {path}: {err}") from err


def _as_complex(value, where: str) -> complex:
    if (isinstance(value, (list, tuple)) and len(value) == 2
            and all(isinstance(v, (int, float)) for v in value)):
        return complex(value[0], value[1])
    raise ConfigError(f"{where} must be a [re, im] pair, got {value!r}")


def _build_system(table: dict, override: str | None):
    table = dict(table)
    name = override or table.pop("name", None)
    if override is not None:
        table.pop("name", None)
    if not name:
        raise ConfigError("system name missing: set [system].name or --system")
    profile_path = table.pop("profile", None)
    if name == "custom":
        if profile_path is None:
            raise ConfigError("system 'custom' needs a profile path")
        builder = swift_hohenberg
    else:
        try:
            builder = registry()[name]
        except KeyError:
            known = ", ".join(sorted([*registry(), "custom"]))
            raise ConfigError(f"unknown system {name!r}; known: {known}") from None
    kwargs = dict(table)
    if profile_path is not None:
        try:
            kwargs["profile"] = load_profile(profile_path)
        except (OSError, ValueError, EvansError) as err:
            raise ConfigError(f"cannot load profile {profile_path}: {err}") from err
    try:
        return name, builder(**kwargs)
    except TypeError as err:
        raise ConfigError(f"bad parameters for system {name!r}: {err}") from err
    except (EvansError, ValueError) as err:
        raise ConfigError(f"cannot build system {name!r}: {err}") from err


def _build_contour(table: dict, ratio_override: float | None) -> ContourSpec | None:
    if not table:
        return None
    table = dict(table)
    kind = table.pop("kind", "circle")
    kwargs = {"kind": kind}
    if "center" in table:
        kwargs["center"] = _as_complex(table.pop("center"), "[contour].center")
    if "vertices" in table:
        verts = table.pop("vertices")
        if not isinstance(verts, list):
            raise ConfigError("[contour].vertices must be a list of [re, im] pairs")
        kwargs["vertices"] = tuple(
            _as_complex(v, "[contour].vertices entry") for v in verts)
    for key in ("radius", "initial_points", "refinement_ratio"):
        if key in table:
            kwargs[key] = table.pop(key)
    if table:
        raise ConfigError(f"unknown [contour] keys: {', '.join(sorted(table))}")
    if ratio_override is not None:
        kwargs["refinement_ratio"] = ratio_override
    try:
        return ContourSpec(**kwargs)
    except (InvalidArgumentError, TypeError) as err:
        raise ConfigError(f"bad [contour]: {err}") from err


def _parse_threads(value) -> int:
    if value in (None, ""):
        return 1
    if value == "auto":
        return os.cpu_count() or 1
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"threads must be an integer or 'auto', got {value!r}") \
            from None


def load_run_config(args) -> RunConfig:
    data = _load_toml(args.config) if args.config else {}
    for key in data:
        if key not in ("system", "contour", "run", "roots"):
            raise ConfigError(f"unknown config table [{key}]")

    name, system = _build_system(data.get("system", {}), args.system)

    run = dict(data.get("run", {}))
    roots = dict(data.get("roots", {}))
    region = roots.pop("region", None)
    if region is not None:
        if (not isinstance(region, list) or len(region) != 4
                or not all(isinstance(v, (int, float)) for v in region)):
            raise ConfigError("[roots].region must be [re_lo, re_hi, im_lo, im_hi]")
        region = tuple(float(v) for v in region)

    is_roots = args.command == "roots"
    file_L, file_N = run.pop("L", None), run.pop("N", None)
    file_mode, file_threads = run.pop("mode", "sort"), run.pop("threads", 1)
    evans_kwargs = {
        "L": args.L if args.L is not None else file_L,
        "N": args.N if args.N is not None else file_N,
        "mode": args.mode or file_mode,
        "threads": _parse_threads(args.threads if args.threads is not None
                                  else file_threads),
        "max_points": run.pop("max_points", 4096),
        "target_size": roots.pop("target_size", 1e-3),
        "root_box_points": roots.pop("box_points", 16),
        "root_refinement_ratio": roots.pop("refinement_ratio", 0.1),
    }
    if is_roots and args.ratio is not None:
        evans_kwargs["root_refinement_ratio"] = args.ratio
    file_outdir = run.pop("output_dir", "out")
    outdir = Path(args.out if args.out else file_outdir)
    if run:
        raise ConfigError(f"unknown [run] keys: {', '.join(sorted(run))}")
    if roots:
        raise ConfigError(f"unknown [roots] keys: {', '.join(sorted(roots))}")
    try:
        evans_cfg = EvansConfig(**evans_kwargs)
    except InvalidArgumentError as err:
        raise ConfigError(f"bad solver settings: {err}") from err

    contour = _build_contour(data.get("contour", {}),
                             args.ratio if not is_roots else None)
    return RunConfig(system_name=name, system=system, contour=contour,
                     evans=evans_cfg, output_dir=outdir, region=region)


# ----------------------------------------------------------------- artifacts

def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_samples_csv(path: Path, samples) -> None:
    # fixed ordering (by contour parameter) and fixed formatting keep the
    # file byte-identical between identical runs
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("s,re_lambda,im_lambda,re_E,im_E,abs_E,arg_E\n")
        for sm in samples:
            row = (sm.diagnostics.get("s", math.nan),
                   sm.lam.real, sm.lam.imag,
                   sm.value.real, sm.value.imag,
                   abs(sm.value), cmath.phase(sm.value))
            fh.write(",".join(format(v, ".17e") for v in row) + "\n")


_PLOT_SCRIPT = """\
# generated by the evans CLI; renders the swept contour and its image
set datafile separator ","
set terminal pngcairo size 1100,520
set output "contour.png"
set multiplot layout 1,2
set size square
set title "lambda contour"
set xlabel "Re lambda"
set ylabel "Im lambda"
plot "samples.csv" skip 1 using 2:3 with linespoints pt 7 ps 0.4 notitle
set title "image, origin marked"
set xlabel "Re E"
set ylabel "Im E"
plot "samples.csv" skip 1 using 4:5 with lines notitle, \\
     "<echo 0 0" with points pt 2 ps 2 lc rgb "red" title "origin"
unset multiplot
"""


def _residual_maxima(samples) -> dict:
    keys = ("bvp_ode_residual", "bvp_bc_residual",
            "solve_c_residual_plus", "solve_c_residual_minus")
    return {k: max(sm.diagnostics.get(k, 0.0) for sm in samples) for k in keys}


def _error_payload(err: Exception, elapsed: float) -> dict:
    return {
        "error": {"type": type(err).__name__, "message": str(err)},
        "timing_seconds": elapsed,
    }


def _settings(cfg: RunConfig) -> dict:
    L, N = cfg.evans.resolve(cfg.system)
    return {"system": cfg.system_name, "L": L, "N": N,
            "mode": cfg.evans.mode, "threads": cfg.evans.threads}


# ------------------------------------------------------------------ commands

def cmd_contour(cfg: RunConfig) -> int:
    if cfg.contour is None:
        raise ConfigError("contour run needs a [contour] table")
    outdir = cfg.output_dir
    outdir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    try:
        report = contour_eval(cfg.system, cfg.contour, cfg.evans)
    except EvansError as err:
        _write_json(outdir / "report.json",
                    _error_payload(err, time.perf_counter() - t0))
        print(f"numerical failure: {err}", file=sys.stderr)
        return 2
    elapsed = time.perf_counter() - t0
    _write_samples_csv(outdir / "samples.csv", report.samples)
    _write_json(outdir / "report.json", {
        "winding": report.winding,
        "defect": report.defect,
        "max_step_ratio": report.max_step_ratio,
        "points": len(report.samples),
        "residual_maxima": _residual_maxima(report.samples),
        "timing_seconds": elapsed,
        **_settings(cfg),
    })
    (outdir / "plot.gp").write_text(_PLOT_SCRIPT, encoding="utf-8")
    print(f"winding {report.winding} from {len(report.samples)} points "
          f"in {elapsed:.1f}s -> {outdir}")
    return 0


def cmd_roots(cfg: RunConfig) -> int:
    if cfg.region is None:
        raise ConfigError("roots run needs [roots].region")
    outdir = cfg.output_dir
    outdir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    try:
        boxes = root_localize(cfg.system, cfg.region, cfg.evans)
    except EvansError as err:
        _write_json(outdir / "report.json",
                    _error_payload(err, time.perf_counter() - t0))
        print(f"numerical failure: {err}", file=sys.stderr)
        return 2
    elapsed = time.perf_counter() - t0
    _write_json(outdir / "roots.json", {
        "region": list(cfg.region),
        "boxes": [{"center": [b.root.real, b.root.imag],
                   "multiplicity": b.multiplicity,
                   "size": b.size} for b in boxes],
        "total_winding": sum(b.multiplicity for b in boxes),
        "timing_seconds": elapsed,
        **_settings(cfg),
    })
    print(f"{len(boxes)} root box(es), total winding "
          f"{sum(b.multiplicity for b in boxes)} in {elapsed:.1f}s -> {outdir}")
    return 0


def cmd_oracle_compare(cfg: RunConfig) -> int:
    if cfg.contour is None:
        raise ConfigError("oracle-compare needs a [contour] table")
    if cfg.system.n > 6:
        raise ConfigError("shooting oracle is limited to systems with n <= 6")
    outdir = cfg.output_dir
    outdir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    try:
        report = contour_eval(cfg.system, cfg.contour, cfg.evans)
        shots = [shooting_wronskian(cfg.system, sm.lam) for sm in report.samples]
        oracle_winding, oracle_defect = winding_number(shots, closed=True)
    except EvansError as err:
        _write_json(outdir / "report.json",
                    _error_payload(err, time.perf_counter() - t0))
        print(f"numerical failure: {err}", file=sys.stderr)
        return 2
    elapsed = time.perf_counter() - t0
    # the two routes differ by a nonvanishing factor, so log|W/E| should
    # wander smoothly; its spread is reported but only windings are compared
    logs = [math.log(abs(w) / abs(sm.value))
            for w, sm in zip(shots, report.samples) if w != 0 and sm.value != 0]
    agree = report.winding == oracle_winding
    _write_json(outdir / "report.json", {
        "winding": report.winding,
        "oracle_winding": oracle_winding,
        "agree": agree,
        "defect": report.defect,
        "oracle_defect": oracle_defect,
        "points": len(report.samples),
        "log_ratio_spread": (max(logs) - min(logs)) if logs else None,
        "timing_seconds": elapsed,
        **_settings(cfg),
    })
    print(f"contour winding {report.winding}, shooting winding {oracle_winding} "
          f"({'agree' if agree else 'DISAGREE'}) in {elapsed:.1f}s -> {outdir}")
    return 0 if agree else 2


def cmd_validate(cfg: RunConfig) -> int:
    summary = {**_settings(cfg), "output_dir": str(cfg.output_dir)}
    if cfg.contour is not None:
        summary["contour"] = {"kind": cfg.contour.kind,
                              "initial_points": cfg.contour.initial_points}
    if cfg.region is not None:
        summary["region"] = list(cfg.region)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


_COMMANDS = {
    "contour": cmd_contour,
    "roots": cmd_roots,
    "oracle-compare": cmd_oracle_compare,
    "validate-config": cmd_validate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = load_run_config(args)
        return _COMMANDS[args.command](cfg)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
