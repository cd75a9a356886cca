"""Scenario files: parsing, validation and round-trippable dumps.

A scenario is a TOML file with sections [pv], [mppt], [source_converter],
[profile] and one or more [[pmu]] tables, each with a nested
[pmu.battery].  Every key is optional; an empty file resolves to the
default scenario (two identical 12 V units under the four-level
irradiance pattern).  Unknown keys are rejected, not ignored.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .converters import PmuConfig
from .errors import ConfigError
from .grid import IrradianceProfile
from .mppt import MpptConfig
from .pv import PvParams
from .storage import BatteryConfig

DEFAULT_PROFILE_STEPS = [(0.0, 1000.0), (3.0, 500.0), (6.0, 50.0), (9.0, 1000.0)]
DEFAULT_T_CELL = 40.0


@dataclass
class SourceConverterConfig:
    """Boost / bus / run-control settings."""

    epsilon: float = 1e-6        # V, boost denominator guard
    c_bus: float = 2000e-6       # F
    v_bus_init: float = 48.0     # V
    dt: float = 50e-6            # s
    duration: float = 12.0       # s
    avg_window: float | None = None  # s; defaults to the final 20% of the run

    @property
    def window(self) -> float:
        return self.avg_window if self.avg_window is not None else 0.2 * self.duration

    def validate(self):
        if self.epsilon <= 0:
            raise ConfigError("source_converter: epsilon must be positive")
        if self.c_bus <= 0:
            raise ConfigError("source_converter: c_bus must be positive")
        if self.v_bus_init < 0:
            raise ConfigError("source_converter: v_bus_init must be non-negative")
        if self.dt <= 0:
            raise ConfigError("source_converter: dt must be positive")
        if self.duration <= 0:
            raise ConfigError("source_converter: duration must be positive")
        if self.window <= 0:
            raise ConfigError("source_converter: avg_window must be positive")
        if self.duration < 2.0 * self.window:
            raise ConfigError(
                "source_converter: duration must be at least twice avg_window")
        return self


@dataclass
class PmuUnit:
    converter: PmuConfig = field(default_factory=PmuConfig)
    battery: BatteryConfig = field(default_factory=BatteryConfig)


@dataclass
class Scenario:
    label: str = "default"
    pv: PvParams = field(default_factory=PvParams)
    mppt: MpptConfig = field(default_factory=MpptConfig)
    source: SourceConverterConfig = field(default_factory=SourceConverterConfig)
    pmus: list[PmuUnit] = field(default_factory=lambda: [PmuUnit(), PmuUnit()])
    profile: IrradianceProfile = field(default_factory=lambda: IrradianceProfile(
        steps=list(DEFAULT_PROFILE_STEPS), t_cell=DEFAULT_T_CELL))

    def validate(self):
        if not self.pmus:
            raise ConfigError("scenario: at least one [[pmu]] required")
        self.mppt.validate()
        self.source.validate()
        self.profile.validate()
        for j, unit in enumerate(self.pmus):
            try:
                unit.converter.validate()
                unit.battery.validate()
            except ConfigError as exc:
                raise ConfigError(f"[[pmu]] #{j + 1}: {exc}") from exc
        return self


_PV_KEYS = ("i_sc_stc", "v_oc_stc", "v_mp_stc", "i_mp_stc",
            "alpha_isc", "beta_voc", "n_s")
_MPPT_KEYS = ("d_init", "d_max", "d_min", "delta_d", "sample_period", "enabled")
_SRC_KEYS = ("epsilon", "c_bus", "v_bus_init", "dt", "duration", "avg_window")
_PMU_KEYS = ("n", "duty", "r_on", "r_d", "v_d", "f_sw", "l_lk", "l_out",
             "c_out", "rated_va")
_BAT_KEYS = ("v_nominal", "capacity", "soc_init", "r_internal",
             "ocv_at_0", "ocv_at_1", "response_time")
_PROFILE_KEYS = ("t_cell", "steps")
_TOP_KEYS = ("label", "pv", "mppt", "source_converter", "profile", "pmu")


def _require_table(raw, path):
    if not isinstance(raw, dict):
        raise ConfigError(f"'{path}' must be a table")
    return raw


def _pick_float(raw: dict, key: str, path: str, default):
    if key not in raw:
        return default
    val = raw[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"'{path}.{key}' must be a number")
    return float(val)


def _reject_unknown(raw: dict, allowed, path: str):
    for key in raw:
        if key not in allowed:
            where = f"{path}.{key}" if path else key
            raise ConfigError(f"unknown key '{where}'")


def _parse_profile(raw: dict) -> IrradianceProfile:
    _reject_unknown(raw, _PROFILE_KEYS, "profile")
    t_cell = _pick_float(raw, "t_cell", "profile", DEFAULT_T_CELL)
    steps_raw = raw.get("steps")
    if steps_raw is None:
        steps = list(DEFAULT_PROFILE_STEPS)
    else:
        if not isinstance(steps_raw, list):
            raise ConfigError("'profile.steps' must be a list of [time, irradiance] pairs")
        steps = []
        for item in steps_raw:
            if (not isinstance(item, list) or len(item) != 2
                    or any(isinstance(x, bool) or not isinstance(x, (int, float))
                           for x in item)):
                raise ConfigError(
                    "'profile.steps' entries must be [time, irradiance] number pairs")
            steps.append((float(item[0]), float(item[1])))
    return IrradianceProfile(steps=steps, t_cell=t_cell)


def _parse_pmu(raw: dict, idx: int) -> PmuUnit:
    path = f"pmu[{idx}]"
    _reject_unknown(raw, _PMU_KEYS + ("battery",), path)
    conv_defaults = PmuConfig()
    conv = PmuConfig(**{k: _pick_float(raw, k, path, getattr(conv_defaults, k))
                        for k in _PMU_KEYS})
    bat_raw = _require_table(raw.get("battery", {}), f"{path}.battery")
    _reject_unknown(bat_raw, _BAT_KEYS, f"{path}.battery")
    bat_defaults = BatteryConfig()
    bat = BatteryConfig(**{k: _pick_float(bat_raw, k, f"{path}.battery",
                                          getattr(bat_defaults, k))
                           for k in _BAT_KEYS})
    return PmuUnit(converter=conv, battery=bat)


def scenario_from_dict(data: dict) -> Scenario:
    """Build and validate a Scenario from a parsed TOML document."""
    _reject_unknown(data, _TOP_KEYS, "")

    label = data.get("label", "default")
    if not isinstance(label, str):
        raise ConfigError("'label' must be a string")

    pv_raw = _require_table(data.get("pv", {}), "pv")
    _reject_unknown(pv_raw, _PV_KEYS, "pv")
    pv_kwargs = {k: _pick_float(pv_raw, k, "pv", None) for k in _PV_KEYS
                 if k in pv_raw}
    if "n_s" in pv_kwargs:
        pv_kwargs["n_s"] = int(pv_kwargs["n_s"])
    pv = PvParams(**pv_kwargs)

    mppt_raw = _require_table(data.get("mppt", {}), "mppt")
    _reject_unknown(mppt_raw, _MPPT_KEYS, "mppt")
    mppt_defaults = MpptConfig()
    enabled = mppt_raw.get("enabled", mppt_defaults.enabled)
    if not isinstance(enabled, bool):
        raise ConfigError("'mppt.enabled' must be a boolean")
    mppt = MpptConfig(
        d_init=_pick_float(mppt_raw, "d_init", "mppt", mppt_defaults.d_init),
        d_max=_pick_float(mppt_raw, "d_max", "mppt", mppt_defaults.d_max),
        d_min=_pick_float(mppt_raw, "d_min", "mppt", mppt_defaults.d_min),
        delta_d=_pick_float(mppt_raw, "delta_d", "mppt", mppt_defaults.delta_d),
        sample_period=_pick_float(mppt_raw, "sample_period", "mppt",
                                  mppt_defaults.sample_period),
        enabled=enabled)

    src_raw = _require_table(data.get("source_converter", {}), "source_converter")
    _reject_unknown(src_raw, _SRC_KEYS, "source_converter")
    src_defaults = SourceConverterConfig()
    src = SourceConverterConfig(
        epsilon=_pick_float(src_raw, "epsilon", "source_converter",
                            src_defaults.epsilon),
        c_bus=_pick_float(src_raw, "c_bus", "source_converter", src_defaults.c_bus),
        v_bus_init=_pick_float(src_raw, "v_bus_init", "source_converter",
                               src_defaults.v_bus_init),
        dt=_pick_float(src_raw, "dt", "source_converter", src_defaults.dt),
        duration=_pick_float(src_raw, "duration", "source_converter",
                             src_defaults.duration),
        avg_window=_pick_float(src_raw, "avg_window", "source_converter", None))

    profile = _parse_profile(_require_table(data.get("profile", {}), "profile"))

    pmu_raw = data.get("pmu")
    if pmu_raw is None:
        pmus = [PmuUnit(), PmuUnit()]
    else:
        if not isinstance(pmu_raw, list):
            raise ConfigError("'pmu' must be given as [[pmu]] tables")
        pmus = [_parse_pmu(_require_table(item, f"pmu[{i}]"), i)
                for i, item in enumerate(pmu_raw)]

    scenario = Scenario(label=label, pv=pv, mppt=mppt, source=src,
                        pmus=pmus, profile=profile)
    return scenario.validate()


def parse_scenario(path) -> Scenario:
    """Load, fill defaults and validate a scenario file."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"scenario file not found: {path}")
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        # tomllib/tomli messages carry "at line N, column M"
        raise ConfigError(f"{path}: syntax error: {exc}") from exc
    try:
        return scenario_from_dict(data)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dump_scenario(scenario: Scenario) -> str:
    """Emit the fully-resolved scenario as TOML.

    Every value is written at full precision, so parsing the dump yields
    a Scenario equal to the original.
    """
    out = [f'label = "{scenario.label}"', ""]

    out.append("[pv]")
    for k in _PV_KEYS:
        out.append(f"{k} = {_fmt(getattr(scenario.pv, k))}")
    out.append("")

    out.append("[mppt]")
    for k in _MPPT_KEYS:
        out.append(f"{k} = {_fmt(getattr(scenario.mppt, k))}")
    out.append("")

    out.append("[source_converter]")
    for k in _SRC_KEYS:
        val = getattr(scenario.source, k)
        if k == "avg_window" and val is None:
            continue
        out.append(f"{k} = {_fmt(val)}")
    out.append("")

    out.append("[profile]")
    out.append(f"t_cell = {_fmt(scenario.profile.t_cell)}")
    steps = ", ".join(f"[{_fmt(t)}, {_fmt(g)}]" for t, g in scenario.profile.steps)
    out.append(f"steps = [{steps}]")

    for unit in scenario.pmus:
        out.append("")
        out.append("[[pmu]]")
        for k in _PMU_KEYS:
            out.append(f"{k} = {_fmt(getattr(unit.converter, k))}")
        out.append("[pmu.battery]")
        for k in _BAT_KEYS:
            out.append(f"{k} = {_fmt(getattr(unit.battery, k))}")

    return "\n".join(out) + "\n"


def with_overrides(scenario: Scenario, dt: float | None = None,
                   duration: float | None = None) -> Scenario:
    """Copy a scenario with run-control overrides applied and revalidated."""
    out = copy.deepcopy(scenario)
    if dt is not None:
        out.source.dt = dt
    if duration is not None:
        out.source.duration = duration
    return out.validate()
