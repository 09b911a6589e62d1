"""Run configuration: a small line-oriented grammar and its round trip.

Grammar: `key = value` lines grouped under `[section]` headers, `#` starts a
comment, blank lines are ignored. Sections and keys:

    preset = <name>          top level; seeds every field from the catalog
    [grid]       L1 L2 N1 N2
    [model]      epsilon  axes (tokens from {x1, x2}, or `none`)
                 delta (two floats)  sigma
    [integrator] scheme  dt  t_end  stiff_cutoff  krasny_tau  linear_only
    [initial]    kind (stationary_perturbed | gaussian | file)
                 sign (+1 | -1)  amplitude  path (snapshot file)
    [frame]      moving (tokens from {x1, x2}, or `none`)
    [monitor]    mass_drift_limit  resolution_limit  sample_every
                 snapshot_times (floats)
    [output]     series  snapshot_dir  summary

Without a preset line, [grid], [integrator] dt and t_end, and [initial] kind
are required; everything else has defaults. Explicit keys override preset
values. Every field that falls back to a default is logged on the
`dnls2d.config` logger. parse_config and serialize_config are exact
inverses on the RunConfig level.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Callable, Dict, Optional, Tuple

from .evolution import FrameState, IntegratorConfig, MonitorConfig
from .spectral import Grid, ModelParams

__all__ = [
    "ConfigError",
    "InitialData",
    "OutputSpec",
    "RunConfig",
    "config_for_preset",
    "parse_config",
    "serialize_config",
]

logger = logging.getLogger("dnls2d.config")


class ConfigError(Exception):
    """Parse or validation failure; `line` is 1-based when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


@dataclass(frozen=True)
class InitialData:
    """Initial-data recipe for a configured run.

    kind "stationary_perturbed" solves (or loads from `path`) a stationary
    profile and perturbs it by sign * amplitude * e^{-r^2}; "gaussian" uses
    amplitude * e^{-r^2}; "file" reads the initial field from a snapshot at
    `path` verbatim.
    """

    kind: str
    sign: int = 1
    amplitude: float = 0.1
    path: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind not in ("stationary_perturbed", "gaussian", "file"):
            raise ValueError(f"initial kind must name a known recipe, got {self.kind!r}")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.kind == "file" and not self.path:
            raise ValueError("initial kind 'file' requires path")


@dataclass(frozen=True)
class OutputSpec:
    series: Optional[str] = None
    snapshot_dir: Optional[str] = None
    summary: Optional[str] = None


@dataclass(frozen=True)
class RunConfig:
    grid: Grid
    params: ModelParams
    integrator: IntegratorConfig
    initial: InitialData
    frame: Optional[FrameState]
    monitors: MonitorConfig
    output: OutputSpec = OutputSpec()
    preset: Optional[str] = None


# ---------------------------------------------------------------------------
# low-level line scanner


def _scan(text: str) -> Dict[str, Dict[str, Tuple[str, int]]]:
    sections: Dict[str, Dict[str, Tuple[str, int]]] = {"": {}}
    current = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]") or len(line) < 3:
                raise ConfigError(f"malformed section header {raw.strip()!r}", lineno)
            current = line[1:-1].strip().lower()
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError("empty key", lineno)
        if key in sections[current]:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        sections[current][key] = (value, lineno)
    return sections


class _Section:
    """Typed accessors over one section's raw (value, line) pairs."""

    def __init__(self, name: str, raw: Dict[str, Tuple[str, int]]):
        self.name = name
        self.raw = dict(raw)
        self.seen = set()

    def _take(self, key: str) -> Optional[Tuple[str, int]]:
        if key in self.raw:
            self.seen.add(key)
            return self.raw[key]
        return None

    def get(self, key: str, convert: Callable, default, required: bool = False):
        cell = self._take(key)
        if cell is None:
            if required:
                raise ConfigError(f"[{self.name}] is missing required key {key!r}")
            logger.info("config default: [%s] %s = %r", self.name, key, default)
            return default
        value, lineno = cell
        try:
            return convert(value)
        except ConfigError:
            raise
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"[{self.name}] {key}: {exc}", lineno) from None

    def reject_unknown(self) -> None:
        extra = set(self.raw) - self.seen
        if extra:
            key = sorted(extra)[0]
            raise ConfigError(
                f"unknown key {key!r} in section [{self.name}]", self.raw[key][1]
            )


def _float(value: str) -> float:
    return float(value)


def _int(value: str) -> int:
    return int(value)


def _bool(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected a boolean, got {value!r}")


def _axes(value: str) -> Tuple[str, ...]:
    tokens = value.split()
    if tokens in ([], ["none"]):
        return ()
    for tok in tokens:
        if tok not in ("x1", "x2"):
            raise ValueError(f"axes tokens must be x1 or x2, got {tok!r}")
    return tuple(tokens)


def _floats(value: str) -> Tuple[float, ...]:
    return tuple(float(tok) for tok in value.split())


def _pair(value: str) -> Tuple[float, float]:
    vals = _floats(value)
    if len(vals) != 2:
        raise ValueError(f"expected two floats, got {len(vals)}")
    return vals  # type: ignore[return-value]


def _sign(value: str) -> int:
    if value in ("+1", "1", "+"):
        return 1
    if value in ("-1", "-"):
        return -1
    raise ValueError(f"sign must be +1 or -1, got {value!r}")


def _str(value: str) -> str:
    return value


# ---------------------------------------------------------------------------
# assembly


def _default_base() -> dict:
    return {
        "grid": None,
        "params": ModelParams(),
        "integrator": None,
        "initial": None,
        "frame": None,
        "monitors": MonitorConfig(),
        "output": OutputSpec(),
        "preset": None,
    }


def config_for_preset(name: str) -> RunConfig:
    """The canonical RunConfig a bare `preset = <name>` line expands to."""
    from .presets import get_preset

    p = get_preset(name)
    return RunConfig(
        grid=p.grid,
        params=p.params,
        integrator=p.integrator,
        initial=InitialData(kind=p.initial.kind, sign=p.initial.sign, amplitude=p.initial.amplitude),
        frame=p.frame,
        monitors=p.monitors,
        output=OutputSpec(),
        preset=name,
    )


def parse_config(text: str) -> RunConfig:
    """Parse and validate configuration text into a RunConfig.

    Raises ConfigError carrying a line number for syntax problems and the
    offending section/field name for validation problems.
    """
    sections = _scan(text)
    top = _Section("", sections.get("", {}))
    preset_name = top.get("preset", _str, None)
    top.reject_unknown()

    base = _default_base()
    if preset_name is not None:
        try:
            canon = config_for_preset(preset_name)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        base.update(
            grid=canon.grid,
            params=canon.params,
            integrator=canon.integrator,
            initial=canon.initial,
            frame=canon.frame,
            monitors=canon.monitors,
            preset=preset_name,
        )

    # [grid]
    sec = _Section("grid", sections.get("grid", {}))
    have_grid = base["grid"] is not None
    g = {
        "L1": sec.get("L1", _float, base["grid"].L1 if have_grid else None, required=not have_grid),
        "L2": sec.get("L2", _float, base["grid"].L2 if have_grid else None, required=not have_grid),
        "N1": sec.get("N1", _int, base["grid"].N1 if have_grid else None, required=not have_grid),
        "N2": sec.get("N2", _int, base["grid"].N2 if have_grid else None, required=not have_grid),
    }
    sec.reject_unknown()
    try:
        grid = Grid(**g)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"[grid] {exc}") from None

    # [model]
    sec = _Section("model", sections.get("model", {}))
    m = base["params"]
    params_kw = {
        "epsilon": sec.get("epsilon", _float, m.epsilon),
        "axes": sec.get("axes", _axes, m.axes),
        "delta": sec.get("delta", _pair, m.delta),
        "sigma": sec.get("sigma", _float, m.sigma),
    }
    sec.reject_unknown()
    try:
        params = ModelParams(**params_kw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"[model] {exc}") from None

    # [integrator]
    sec = _Section("integrator", sections.get("integrator", {}))
    icur = base["integrator"]
    have = icur is not None
    integ_kw = {
        "dt": sec.get("dt", _float, icur.dt if have else None, required=not have),
        "t_end": sec.get("t_end", _float, icur.t_end if have else None, required=not have),
        "scheme": sec.get("scheme", _str, icur.scheme if have else "composite_rk"),
        "stiff_cutoff": sec.get("stiff_cutoff", _float, icur.stiff_cutoff if have else 1.0),
        "krasny_tau": sec.get("krasny_tau", _float, icur.krasny_tau if have else 0.0),
        "linear_only": sec.get("linear_only", _bool, icur.linear_only if have else False),
    }
    sec.reject_unknown()
    try:
        integrator = IntegratorConfig(**integ_kw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"[integrator] {exc}") from None

    # [initial]
    sec = _Section("initial", sections.get("initial", {}))
    icur = base["initial"]
    have = icur is not None
    init_kw = {
        "kind": sec.get("kind", _str, icur.kind if have else None, required=not have),
        "sign": sec.get("sign", _sign, icur.sign if have else 1),
        "amplitude": sec.get("amplitude", _float, icur.amplitude if have else 0.1),
        "path": sec.get("path", _str, icur.path if have else None),
    }
    sec.reject_unknown()
    try:
        initial = InitialData(**init_kw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"[initial] {exc}") from None

    # [frame]
    sec = _Section("frame", sections.get("frame", {}))
    fcur = base["frame"]
    default_moving = fcur.pinned_axis if fcur is not None else ()
    moving = sec.get("moving", _axes, default_moving)
    sec.reject_unknown()
    try:
        frame = FrameState(pinned_axis=tuple(moving)) if moving else None
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"[frame] {exc}") from None

    # [monitor]
    sec = _Section("monitor", sections.get("monitor", {}))
    mcur = base["monitors"]
    mon_kw = {
        "mass_drift_limit": sec.get("mass_drift_limit", _float, mcur.mass_drift_limit),
        "resolution_limit": sec.get("resolution_limit", _float, mcur.resolution_limit),
        "sample_every": sec.get("sample_every", _int, mcur.sample_every),
        "snapshot_times": sec.get("snapshot_times", _floats, mcur.snapshot_times),
    }
    sec.reject_unknown()
    try:
        monitors = MonitorConfig(**mon_kw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"[monitor] {exc}") from None

    # [output]
    sec = _Section("output", sections.get("output", {}))
    ocur = base["output"]
    output = OutputSpec(
        series=sec.get("series", _str, ocur.series),
        snapshot_dir=sec.get("snapshot_dir", _str, ocur.snapshot_dir),
        summary=sec.get("summary", _str, ocur.summary),
    )
    sec.reject_unknown()

    known = {"", "grid", "model", "integrator", "initial", "frame", "monitor", "output"}
    for name in sections:
        if name not in known:
            raise ConfigError(f"unknown section [{name}]")

    for label, number in (
        ("grid.L1", grid.L1),
        ("grid.L2", grid.L2),
        ("model.epsilon", params.epsilon),
        ("model.delta", params.delta[0]),
        ("model.delta", params.delta[1]),
        ("model.sigma", params.sigma),
        ("integrator.dt", integrator.dt),
        ("integrator.t_end", integrator.t_end),
    ):
        if not _finite(number):
            raise ConfigError(f"{label} must be finite, got {number!r}")

    return RunConfig(
        grid=grid,
        params=params,
        integrator=integrator,
        initial=initial,
        frame=frame,
        monitors=monitors,
        output=output,
        preset=preset_name,
    )


def _finite(x: float) -> bool:
    return x == x and abs(x) != float("inf")


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def serialize_config(cfg: RunConfig) -> str:
    """Emit text that parse_config maps back to an identical RunConfig."""
    lines = []
    if cfg.preset is not None:
        lines.append(f"preset = {cfg.preset}")
    lines.append("[grid]")
    lines += [
        f"L1 = {_fmt(cfg.grid.L1)}",
        f"L2 = {_fmt(cfg.grid.L2)}",
        f"N1 = {cfg.grid.N1}",
        f"N2 = {cfg.grid.N2}",
    ]
    lines.append("[model]")
    lines += [
        f"epsilon = {_fmt(cfg.params.epsilon)}",
        f"axes = {' '.join(cfg.params.axes) if cfg.params.axes else 'none'}",
        f"delta = {_fmt(cfg.params.delta[0])} {_fmt(cfg.params.delta[1])}",
        f"sigma = {_fmt(cfg.params.sigma)}",
    ]
    lines.append("[integrator]")
    lines += [
        f"scheme = {cfg.integrator.scheme}",
        f"dt = {_fmt(cfg.integrator.dt)}",
        f"t_end = {_fmt(cfg.integrator.t_end)}",
        f"stiff_cutoff = {_fmt(cfg.integrator.stiff_cutoff)}",
        f"krasny_tau = {_fmt(cfg.integrator.krasny_tau)}",
        f"linear_only = {'true' if cfg.integrator.linear_only else 'false'}",
    ]
    lines.append("[initial]")
    lines += [
        f"kind = {cfg.initial.kind}",
        f"sign = {cfg.initial.sign:+d}",
        f"amplitude = {_fmt(cfg.initial.amplitude)}",
    ]
    if cfg.initial.path is not None:
        lines.append(f"path = {cfg.initial.path}")
    lines.append("[frame]")
    moving = cfg.frame.pinned_axis if cfg.frame is not None else ()
    lines.append(f"moving = {' '.join(moving) if moving else 'none'}")
    lines.append("[monitor]")
    lines += [
        f"mass_drift_limit = {_fmt(cfg.monitors.mass_drift_limit)}",
        f"resolution_limit = {_fmt(cfg.monitors.resolution_limit)}",
        f"sample_every = {cfg.monitors.sample_every}",
    ]
    if cfg.monitors.snapshot_times:
        lines.append(
            "snapshot_times = " + " ".join(_fmt(t) for t in cfg.monitors.snapshot_times)
        )
    out = cfg.output
    if out.series or out.snapshot_dir or out.summary:
        lines.append("[output]")
        for key, val in (("series", out.series), ("snapshot_dir", out.snapshot_dir), ("summary", out.summary)):
            if val is not None:
                lines.append(f"{key} = {val}")
    return "\n".join(lines) + "\n"
