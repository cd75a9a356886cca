"""Lead-acid battery model: linear open-circuit voltage over state of
charge, a series internal resistance, and coulomb-counting SOC updates.
Good enough for terminal behavior near the middle of the charge range,
which is where the power-sharing scenarios operate."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError


@dataclass
class BatteryConfig:
    v_nominal: float = 12.0      # V
    capacity: float = 5.4        # Ah
    soc_init: float = 0.75       # fraction
    r_internal: float = 0.0325   # ohm
    ocv_at_0: float = 11.77      # V at SOC = 0
    ocv_at_1: float = 12.97      # V at SOC = 1
    response_time: float = 3000.0  # s (metadata, not simulated)

    def validate(self):
        if self.capacity <= 0:
            raise ConfigError("battery: capacity must be positive")
        if not 0.0 <= self.soc_init <= 1.0:
            raise ConfigError("battery: soc_init must lie in [0, 1]")
        if self.r_internal <= 0:
            raise ConfigError("battery: r_internal must be positive")
        if not self.ocv_at_1 > self.ocv_at_0 > 0:
            raise ConfigError("battery: require ocv_at_1 > ocv_at_0 > 0")
        return self


@dataclass(frozen=True)
class BatteryState:
    soc: float          # fraction
    i_charge: float     # A, positive = charging
    v_terminal: float   # V


def battery_ocv(cfg: BatteryConfig, soc: float) -> float:
    """Open-circuit voltage, linear in SOC."""
    if not 0.0 <= soc <= 1.0:
        raise ValueError(f"soc {soc} outside [0, 1]")
    return cfg.ocv_at_0 + soc * (cfg.ocv_at_1 - cfg.ocv_at_0)


def battery_initial_state(cfg: BatteryConfig) -> BatteryState:
    return BatteryState(soc=cfg.soc_init, i_charge=0.0,
                        v_terminal=battery_ocv(cfg, cfg.soc_init))


def battery_step(state: BatteryState, cfg: BatteryConfig, i_charge: float,
                 dt: float) -> BatteryState:
    """Coulomb-count one step; SOC clamps at the rails."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    soc = state.soc + i_charge * dt / (cfg.capacity * 3600.0)
    soc = min(1.0, max(0.0, soc))
    v = battery_ocv(cfg, soc) + i_charge * cfg.r_internal
    return BatteryState(soc=soc, i_charge=i_charge, v_terminal=v)
