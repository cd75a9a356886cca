"""Perturb-and-observe maximum power point tracker.

Produces the duty cycle of the source boost converter from sampled array
voltage and current.  Raising the duty pulls the array voltage down, so
the perturbation direction is inferred from the sign of the last voltage
change: power went up and voltage went down -> keep increasing duty;
power went down -> reverse.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import ConfigError

# |dP| below this is treated as "power unchanged" so floating-point noise
# cannot flip the perturbation direction.
POWER_DEAD_BAND = 1e-6  # W


@dataclass(frozen=True)
class MpptConfig:
    d_init: float = 0.5
    d_max: float = 0.9
    d_min: float = 0.1
    delta_d: float = 0.001          # duty increment per sample
    sample_period: float = 1e-3     # s
    enabled: bool = True

    def validate(self):
        if not 0.0 <= self.d_min <= self.d_init <= self.d_max < 1.0:
            raise ConfigError(
                "mppt: require 0 <= d_min <= d_init <= d_max < 1")
        if self.delta_d <= 0:
            raise ConfigError("mppt: delta_d must be positive")
        if self.sample_period <= 0:
            raise ConfigError("mppt: sample_period must be positive")
        return self


@dataclass(frozen=True)
class MpptState:
    """Controller memory: previous power/voltage sample and current duty."""

    prev_p: float | None = None
    prev_v: float | None = None
    duty: float = 0.5
    last_sample_time: float = 0.0

    @classmethod
    def initial(cls, config: MpptConfig) -> "MpptState":
        return cls(prev_p=None, prev_v=None, duty=config.d_init,
                   last_sample_time=0.0)


def mppt_step(state: MpptState, config: MpptConfig, v_k: float, i_k: float,
              t: float = 0.0) -> tuple[MpptState, float]:
    """One controller sample; returns (updated state, duty command)."""
    if v_k < 0 or i_k < 0:
        raise ValueError("mppt samples must be non-negative")
    if not config.enabled:
        return replace(state, last_sample_time=t), state.duty

    p_k = v_k * i_k
    if state.prev_p is None:
        # First sample ever: emit the configured initial duty, remember
        # the operating point.  The first perturbation afterwards is
        # +delta_d (dv == 0 falls into the "voltage decreased" branch).
        new = MpptState(prev_p=p_k, prev_v=v_k, duty=config.d_init,
                        last_sample_time=t)
        return new, new.duty

    dp = p_k - state.prev_p
    dv = v_k - state.prev_v
    duty = state.duty
    if abs(dp) >= POWER_DEAD_BAND:
        direction = -1.0 if dv > 0 else 1.0
        if dp < 0:
            direction = -direction
        duty = min(config.d_max, max(config.d_min,
                                     duty + direction * config.delta_d))
    new = MpptState(prev_p=p_k, prev_v=v_k, duty=duty, last_sample_time=t)
    return new, duty
