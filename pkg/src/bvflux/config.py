"""Run configuration: YAML parsing and validation.

A config file is a single YAML document with nested sections.  The parsed
RunConfig keeps plain scalars and tables; translating them into flux models
and grids happens in the runner module.  Every malformed input raises
ConfigError with the offending key in the message, which the CLI maps to
exit status 2.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping, Optional

import yaml

from .errors import ConfigError

DEFAULT_SEED = 20250815

KNOWN_TOP_KEYS = frozenset({
    "reference", "flux", "domain", "m_cells", "t_final", "cfl_safety",
    "lam", "initial_data", "snapshot_times", "partition_min_width",
    "outputs", "seed", "threads",
})
KNOWN_FLUX_KEYS = frozenset({"family", "breakpoints", "values", "p", "q"})
KNOWN_INITIAL_KEYS = frozenset({"builtin", "constant", "breakpoints", "values"})
KNOWN_OUTPUT_KEYS = frozenset({"directory", "formats"})
KNOWN_FORMATS = frozenset({"csv", "plots"})


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


def _as_float(value: Any, key: str) -> float:
    _require(isinstance(value, (int, float)) and not isinstance(value, bool),
             f"{key} must be a number, got {value!r}")
    return float(value)


def _as_int(value: Any, key: str) -> int:
    _require(isinstance(value, int) and not isinstance(value, bool),
             f"{key} must be an integer, got {value!r}")
    return int(value)


def _as_float_list(value: Any, key: str) -> tuple:
    _require(isinstance(value, (list, tuple)),
             f"{key} must be a list of numbers, got {value!r}")
    return tuple(_as_float(v, f"{key}[{i}]") for i, v in enumerate(value))


def _check_keys(mapping: Mapping, allowed: frozenset, section: str) -> None:
    unknown = sorted(set(mapping) - allowed)
    _require(not unknown, f"unknown key(s) in {section}: {', '.join(unknown)}")


@dataclass
class RunConfig:
    """Validated run parameters; tables stay as plain tuples."""

    t_final: float
    m_cells: tuple
    x_left: Optional[float] = None
    x_right: Optional[float] = None
    reference: Optional[str] = None
    flux: Optional[dict] = None
    initial_data: Optional[dict] = None
    cfl_safety: float = 0.9
    lam: Optional[float] = None
    snapshot_times: tuple = ()
    partition_min_width: float = 0.0
    out_dir: str = "out"
    formats: tuple = ("csv",)
    seed: int = DEFAULT_SEED
    threads: int = 1

    def echo(self) -> dict:
        """Resolved configuration as a plain mapping for the manifest."""
        return {
            "reference": self.reference,
            "flux": self.flux,
            "domain": {"x_left": self.x_left, "x_right": self.x_right},
            "m_cells": list(self.m_cells),
            "t_final": self.t_final,
            "cfl_safety": self.cfl_safety,
            "lam": self.lam,
            "initial_data": self.initial_data,
            "snapshot_times": list(self.snapshot_times),
            "partition_min_width": self.partition_min_width,
            "outputs": {"directory": self.out_dir,
                        "formats": list(self.formats)},
            "seed": self.seed,
            "threads": self.threads,
        }


def _parse_flux(raw: Any) -> dict:
    _require(isinstance(raw, Mapping), f"flux must be a mapping, got {raw!r}")
    _check_keys(raw, KNOWN_FLUX_KEYS, "flux")
    _require("family" in raw, "flux.family is required")
    family = raw["family"]
    _require(isinstance(family, str), f"flux.family must be a string, got {family!r}")
    out = {"family": family}
    if "breakpoints" in raw or "values" in raw:
        _require("breakpoints" in raw and "values" in raw,
                 "flux tables need both breakpoints and values")
        out["breakpoints"] = _as_float_list(raw["breakpoints"], "flux.breakpoints")
        out["values"] = _as_float_list(raw["values"], "flux.values")
    for key in ("p", "q"):
        if key in raw:
            out[key] = _as_float(raw[key], f"flux.{key}")
    return out


def _parse_initial_data(raw: Any) -> dict:
    _require(isinstance(raw, Mapping),
             f"initial_data must be a mapping, got {raw!r}")
    _check_keys(raw, KNOWN_INITIAL_KEYS, "initial_data")
    kinds = [k for k in ("builtin", "constant", "breakpoints") if k in raw]
    _require(len(kinds) == 1,
             "initial_data needs exactly one of: builtin, constant, "
             "or a breakpoints/values table")
    kind = kinds[0]
    if kind == "builtin":
        _require(isinstance(raw["builtin"], str),
                 f"initial_data.builtin must be a string, got {raw['builtin']!r}")
        return {"builtin": raw["builtin"]}
    if kind == "constant":
        return {"constant": _as_float(raw["constant"], "initial_data.constant")}
    _require("values" in raw, "initial_data table needs values")
    breakpoints = _as_float_list(raw["breakpoints"], "initial_data.breakpoints")
    values = _as_float_list(raw["values"], "initial_data.values")
    return {"breakpoints": breakpoints, "values": values}


def parse_config(raw: Any) -> RunConfig:
    """Validate a parsed YAML mapping into a RunConfig."""
    _require(isinstance(raw, Mapping),
             f"config root must be a mapping, got {type(raw).__name__}")
    _check_keys(raw, KNOWN_TOP_KEYS, "config")

    reference = raw.get("reference")
    if reference is not None:
        _require(isinstance(reference, str),
                 f"reference must be a string, got {reference!r}")

    flux = _parse_flux(raw["flux"]) if "flux" in raw else None
    initial = (_parse_initial_data(raw["initial_data"])
               if "initial_data" in raw else None)
    _require(reference is not None or flux is not None,
             "config needs a reference example id or a flux section")
    _require(reference is not None or initial is not None,
             "config without a reference needs an initial_data section")

    x_left = x_right = None
    if "domain" in raw:
        dom = raw["domain"]
        _require(isinstance(dom, Mapping), f"domain must be a mapping, got {dom!r}")
        _check_keys(dom, frozenset({"x_left", "x_right"}), "domain")
        _require("x_left" in dom and "x_right" in dom,
                 "domain needs both x_left and x_right")
        x_left = _as_float(dom["x_left"], "domain.x_left")
        x_right = _as_float(dom["x_right"], "domain.x_right")
        _require(x_left < x_right, "domain needs x_left < x_right")
    else:
        _require(reference is not None,
                 "config without a reference needs a domain section")

    _require("m_cells" in raw, "m_cells is required")
    raw_m = raw["m_cells"]
    if isinstance(raw_m, (list, tuple)):
        _require(len(raw_m) > 0, "m_cells list must be nonempty")
        m_cells = tuple(_as_int(v, f"m_cells[{i}]") for i, v in enumerate(raw_m))
    else:
        m_cells = (_as_int(raw_m, "m_cells"),)
    for m in m_cells:
        _require(m >= 2, f"m_cells entries must be >= 2, got {m}")

    _require("t_final" in raw, "t_final is required")
    t_final = _as_float(raw["t_final"], "t_final")
    _require(t_final > 0.0, f"t_final must be positive, got {t_final}")

    cfl_safety = _as_float(raw.get("cfl_safety", 0.9), "cfl_safety")
    _require(0.0 < cfl_safety <= 1.0,
             f"cfl_safety must be in (0, 1], got {cfl_safety}")

    lam = None
    if raw.get("lam") is not None:
        lam = _as_float(raw["lam"], "lam")
        _require(lam > 0.0, f"lam must be positive, got {lam}")

    snapshot_times = _as_float_list(raw.get("snapshot_times", ()),
                                    "snapshot_times")
    for t in snapshot_times:
        _require(0.0 <= t <= t_final,
                 f"snapshot time {t} outside [0, {t_final}]")
    _require(tuple(sorted(snapshot_times)) == snapshot_times,
             "snapshot_times must be sorted ascending")

    min_width = _as_float(raw.get("partition_min_width", 0.0),
                          "partition_min_width")
    _require(min_width >= 0.0,
             f"partition_min_width must be >= 0, got {min_width}")

    out_dir = "out"
    formats: tuple = ("csv",)
    if "outputs" in raw:
        outs = raw["outputs"]
        _require(isinstance(outs, Mapping),
                 f"outputs must be a mapping, got {outs!r}")
        _check_keys(outs, KNOWN_OUTPUT_KEYS, "outputs")
        if "directory" in outs:
            _require(isinstance(outs["directory"], str),
                     f"outputs.directory must be a string, got {outs['directory']!r}")
            out_dir = outs["directory"]
        if "formats" in outs:
            fmts = outs["formats"]
            _require(isinstance(fmts, (list, tuple)) and fmts,
                     f"outputs.formats must be a nonempty list, got {fmts!r}")
            for f in fmts:
                _require(f in KNOWN_FORMATS,
                         f"unknown output format {f!r} (known: csv, plots)")
            formats = tuple(fmts)

    seed = _as_int(raw.get("seed", DEFAULT_SEED), "seed")
    threads = _as_int(raw.get("threads", 1), "threads")
    _require(threads >= 1, f"threads must be >= 1, got {threads}")

    return RunConfig(
        t_final=t_final, m_cells=m_cells, x_left=x_left, x_right=x_right,
        reference=reference, flux=flux, initial_data=initial,
        cfl_safety=cfl_safety, lam=lam, snapshot_times=snapshot_times,
        partition_min_width=min_width, out_dir=out_dir, formats=formats,
        seed=seed, threads=threads)


def load_config(path: str) -> RunConfig:
    """Read and validate a YAML config file."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = yaml.safe_load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    return parse_config(raw)
