"""Fixed-step simulation engine.

Couples the PV array, the perturb-and-observe tracker, the boost average
model, a single bus capacitance node and any number of full-bridge units,
each charging its own battery.  One engine instance is strictly
sequential and deterministic: the same scenario produces bit-identical
results.

Per step (dt):
  1. sample the irradiance profile
  2. array voltage from the boost input law (previous bus voltage)
  3. array current from the diode model at that voltage
  4. on tracker sample instants, update the boost duty
  5. bus injection current from the boost output law
  6. solve every full-bridge unit against its battery at the current SOC
  7. integrate the bus node:  v += dt * (i_dc - sum(i1)) / c_bus
  8. coulomb-count every battery
  9. push the boost history
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .converters import (BoostState, boost_input_voltage,
                         boost_output_current, pmu_solve_current)
from .errors import ConfigError, MicrogridError, SimulationError
from .mppt import MpptState, mppt_step
from .pv import current_from_coefficients, diode_coefficients
from .storage import battery_initial_state, battery_ocv, battery_step


@dataclass
class IrradianceProfile:
    """Piecewise-constant irradiance steps plus a fixed cell temperature."""

    steps: list[tuple[float, float]]  # (start time [s], irradiance [W/m^2])
    t_cell: float = 40.0              # degC

    def validate(self):
        if not self.steps:
            raise ConfigError("profile: at least one step required")
        if self.steps[0][0] != 0.0:
            raise ConfigError("profile: first step must start at t = 0")
        for (t0, g0), (t1, _) in zip(self.steps, self.steps[1:]):
            if t1 <= t0:
                raise ConfigError("profile: start times must be strictly increasing")
        if any(g < 0 for _, g in self.steps):
            raise ConfigError("profile: irradiance must be non-negative")
        return self

    def value(self, t: float) -> float:
        g = self.steps[0][1]
        for t0, g0 in self.steps:
            if t0 <= t:
                g = g0
            else:
                break
        return g


@dataclass
class BusState:
    v_bus: float   # V
    c_bus: float   # F


@dataclass
class SteadySummary:
    """Trailing-window means of every logged channel."""

    window: float
    pv_v: float
    pv_i: float
    pv_p: float
    duty: float
    v_bus: float
    i_dc: float
    src_p: float                  # mean of v_bus * i_dc
    irradiance: float
    pmu_v: tuple[float, ...]
    pmu_i: tuple[float, ...]
    pmu_p: tuple[float, ...]
    pmu_soc: tuple[float, ...]
    efficiency: float             # sum(pmu_p) / pv_p, nan when dark
    zero_power: bool


@dataclass
class SimResult:
    """Time series of one run plus its configured-window summary."""

    dt: float
    t: np.ndarray
    g: np.ndarray
    pv_v: np.ndarray
    pv_i: np.ndarray
    pv_p: np.ndarray
    duty: np.ndarray
    v_bus: np.ndarray
    i_dc: np.ndarray
    pmu_v: np.ndarray    # shape (n_pmu, n_steps)
    pmu_i: np.ndarray    # secondary/battery current
    pmu_i1: np.ndarray   # primary current drawn from the bus
    pmu_p: np.ndarray
    pmu_soc: np.ndarray
    v_bus_init: float
    summary: SteadySummary | None = None


def steady_state_summary(result: SimResult, window: float) -> SteadySummary:
    """Arithmetic means over the trailing window of the run."""
    n = result.t.size
    if n == 0:
        raise ValueError("empty time series")
    duration = n * result.dt
    if window <= 0:
        raise ValueError("window must be positive")
    if duration < 2.0 * window:
        raise ValueError(
            f"run length {duration:.6g} s must be at least twice the "
            f"window {window:.6g} s")
    m = max(1, int(round(window / result.dt)))
    sl = slice(n - m, n)

    pv_p = float(result.pv_p[sl].mean())
    pmu_p = tuple(float(result.pmu_p[j, sl].mean())
                  for j in range(result.pmu_p.shape[0]))
    zero_power = pv_p <= 1e-9
    efficiency = float("nan") if zero_power else sum(pmu_p) / pv_p
    return SteadySummary(
        window=window,
        pv_v=float(result.pv_v[sl].mean()),
        pv_i=float(result.pv_i[sl].mean()),
        pv_p=pv_p,
        duty=float(result.duty[sl].mean()),
        v_bus=float(result.v_bus[sl].mean()),
        i_dc=float(result.i_dc[sl].mean()),
        src_p=float((result.v_bus[sl] * result.i_dc[sl]).mean()),
        irradiance=float(result.g[sl].mean()),
        pmu_v=tuple(float(result.pmu_v[j, sl].mean())
                    for j in range(result.pmu_v.shape[0])),
        pmu_i=tuple(float(result.pmu_i[j, sl].mean())
                    for j in range(result.pmu_i.shape[0])),
        pmu_p=pmu_p,
        pmu_soc=tuple(float(result.pmu_soc[j, sl].mean())
                      for j in range(result.pmu_soc.shape[0])),
        efficiency=efficiency,
        zero_power=zero_power,
    )


def simulate(scenario) -> SimResult:
    """Run a scenario to completion.  See the module docstring for the
    step ordering; any sub-model failure aborts with the timestep and
    component identified."""
    src = scenario.source
    profile = scenario.profile
    dt = src.dt
    n_steps = int(round(src.duration / dt))
    if n_steps < 1:
        raise MicrogridError("scenario duration shorter than one step")

    n_pmu = len(scenario.pmus)
    mppt_cfg = scenario.mppt
    mppt_state = MpptState.initial(mppt_cfg)
    duty = mppt_state.duty
    boost = BoostState.seeded(src.v_bus_init, epsilon=src.epsilon)
    bus = BusState(v_bus=src.v_bus_init, c_bus=src.c_bus)
    batteries = [battery_initial_state(u.battery) for u in scenario.pmus]
    stride = max(1, int(round(mppt_cfg.sample_period / dt)))

    t_arr = np.empty(n_steps)
    g_arr = np.empty(n_steps)
    pv_v = np.empty(n_steps)
    pv_i = np.empty(n_steps)
    pv_p = np.empty(n_steps)
    duty_arr = np.empty(n_steps)
    v_bus_arr = np.empty(n_steps)
    i_dc_arr = np.empty(n_steps)
    pmu_v = np.empty((n_pmu, n_steps))
    pmu_i = np.empty((n_pmu, n_steps))
    pmu_i1 = np.empty((n_pmu, n_steps))
    pmu_p = np.empty((n_pmu, n_steps))
    pmu_soc = np.empty((n_pmu, n_steps))

    # The profile is piecewise constant, so the translated diode
    # coefficients only change at segment boundaries.
    seg_starts = [s[0] for s in profile.steps]
    seg_values = [s[1] for s in profile.steps]
    seg_idx = 0
    g = seg_values[0]
    coeffs = diode_coefficients(scenario.pv, g, profile.t_cell)

    for k in range(n_steps):
        t = k * dt
        while seg_idx + 1 < len(seg_starts) and seg_starts[seg_idx + 1] <= t:
            seg_idx += 1
            g = seg_values[seg_idx]
            coeffs = diode_coefficients(scenario.pv, g, profile.t_cell)

        v_a = boost_input_voltage(boost, duty)
        try:
            i_a = current_from_coefficients(coeffs, v_a, g, profile.t_cell)
        except MicrogridError as exc:
            raise SimulationError(
                f"pv solve failed at step {k} (t={t:.6g} s): {exc}",
                step=k, t=t, component="pv") from exc

        if k % stride == 0:
            mppt_state, duty = mppt_step(mppt_state, mppt_cfg, v_a, i_a, t)

        i_dc = boost_output_current(boost, duty)

        i1_total = 0.0
        v_g = bus.v_bus
        for j, unit in enumerate(scenario.pmus):
            bat = batteries[j]
            try:
                ocv = battery_ocv(unit.battery, bat.soc)
                st = pmu_solve_current(unit.converter, v_g, ocv,
                                       unit.battery.r_internal)
            except (MicrogridError, ValueError) as exc:
                raise SimulationError(
                    f"pmu[{j}] solve failed at step {k} (t={t:.6g} s): {exc}",
                    step=k, t=t, component=f"pmu[{j}]") from exc
            i1_total += st.i1
            batteries[j] = battery_step(bat, unit.battery, st.i2, dt)
            pmu_v[j, k] = st.v_out
            pmu_i[j, k] = st.i2
            pmu_i1[j, k] = st.i1
            pmu_p[j, k] = st.p_out
            pmu_soc[j, k] = batteries[j].soc

        bus.v_bus += dt * (i_dc - i1_total) / bus.c_bus
        boost.advance(bus.v_bus, i_a)

        t_arr[k] = t
        g_arr[k] = g
        pv_v[k] = v_a
        pv_i[k] = i_a
        pv_p[k] = v_a * i_a
        duty_arr[k] = duty
        v_bus_arr[k] = bus.v_bus
        i_dc_arr[k] = i_dc

    result = SimResult(
        dt=dt, t=t_arr, g=g_arr, pv_v=pv_v, pv_i=pv_i, pv_p=pv_p,
        duty=duty_arr, v_bus=v_bus_arr, i_dc=i_dc_arr,
        pmu_v=pmu_v, pmu_i=pmu_i, pmu_i1=pmu_i1, pmu_p=pmu_p,
        pmu_soc=pmu_soc, v_bus_init=src.v_bus_init)
    result.summary = steady_state_summary(result, src.window)
    return result
