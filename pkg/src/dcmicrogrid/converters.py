"""Averaged converter models.

Two converters are modeled:

* the source boost converter as a pair of difference equations over the
  last few output-voltage samples (controlled voltage source at the
  input, controlled current source at the output), and
* the full-bridge unit that feeds each battery, as a steady-state gain
  M(D) = (2D - 1)^2 / n, with an optional conduction-loss correction for
  switch on-resistance, rectifier diode resistance and diode drop.

The full-bridge operating point against a battery (open-circuit voltage
plus series resistance) has a closed-form solution because the loss terms
are linear in the primary current.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError

EPSILON_DEFAULT = 1e-6  # V, divide-by-zero guard in the boost output law


@dataclass
class BoostState:
    """History buffer of the boost average model.

    v_dc_hist holds the output voltage at the previous three steps,
    most recent first; i_a_prev is the input current one step back.
    """

    v_dc_hist: list[float]
    i_a_prev: float = 0.0
    epsilon: float = EPSILON_DEFAULT

    @classmethod
    def seeded(cls, v_dc_init: float, epsilon: float = EPSILON_DEFAULT) -> "BoostState":
        """Start-up state: history filled with the initial bus voltage."""
        if epsilon <= 0:
            raise ConfigError("source_converter: epsilon must be positive")
        return cls(v_dc_hist=[v_dc_init, v_dc_init, v_dc_init],
                   i_a_prev=0.0, epsilon=epsilon)

    def advance(self, v_dc: float, i_a: float):
        """Push the step's output voltage and input current."""
        self.v_dc_hist[2] = self.v_dc_hist[1]
        self.v_dc_hist[1] = self.v_dc_hist[0]
        self.v_dc_hist[0] = v_dc
        self.i_a_prev = i_a


def boost_input_voltage(state: BoostState, d_b: float) -> float:
    """Input-side controlled voltage: (1 - D_b) * V_dc(k-1)."""
    return (1.0 - d_b) * state.v_dc_hist[0]


def boost_output_current(state: BoostState, d_b: float) -> float:
    """Output-side controlled current.

    I_dc(k) = (1 - D_b) * V_dc(k-2) * I_a(k-1)
              / (2*V_dc(k-2) - V_dc(k-3) + eps)

    The epsilon in the denominator keeps the all-zero start-up state and
    any transient sign cancellation from dividing by zero.
    """
    v2 = state.v_dc_hist[1]
    v3 = state.v_dc_hist[2]
    return (1.0 - d_b) * v2 * state.i_a_prev / (2.0 * v2 - v3 + state.epsilon)


@dataclass
class PmuConfig:
    """Full-bridge power stage parameters.

    f_sw, l_lk, l_out and rated_va do not enter the averaged equations;
    they are carried so runs record the hardware they represent.
    """

    n: float = 7.12            # transformer primary:secondary turns ratio
    duty: float = 0.9993       # fixed bridge duty, must exceed 0.5
    r_on: float = 0.1          # active switch on-resistance [ohm]
    r_d: float = 0.01          # rectifier diode resistance [ohm]
    v_d: float = 0.3           # rectifier diode forward drop [V]
    f_sw: float = 100e3        # switching frequency [Hz] (metadata)
    l_lk: float = 26e-6        # leakage inductance [H] (metadata)
    l_out: float = 10e-6       # output inductance [H] (metadata)
    c_out: float = 7500e-6     # output capacitance [F]
    rated_va: float = 150.0    # transformer nominal power [VA] (metadata)

    def validate(self):
        if self.n <= 0:
            raise ConfigError("pmu: turns ratio n must be positive")
        if not 0.5 < self.duty < 1.0:
            raise ConfigError("pmu: duty must exceed 0.5 and stay below 1")
        if self.r_on < 0 or self.r_d < 0 or self.v_d < 0:
            raise ConfigError("pmu: loss parameters must be non-negative")
        if self.f_sw <= 0 or self.c_out <= 0:
            raise ConfigError("pmu: f_sw and c_out must be positive")
        return self


@dataclass(frozen=True)
class PmuState:
    """Solved operating point of one full-bridge unit."""

    i1: float     # primary-side current [A]
    i2: float     # secondary-side current [A], n * i1
    v_out: float  # output (battery terminal) voltage [V]
    p_in: float   # output power plus modeled conduction losses [W]
    p_out: float  # power delivered to the battery [W]


def fb_gain_ideal(n: float, d: float) -> float:
    """Lossless voltage gain (2d - 1)^2 / n."""
    if n <= 0:
        raise ValueError("turns ratio must be positive")
    q = 2.0 * d - 1.0
    return q * q / n


def fb_gain_lossy(cfg: PmuConfig, v_g: float, i1: float) -> float:
    """Voltage gain corrected for conduction losses at primary current i1.

    M'(D) = M(D) * [1 - 2*i1*r_on / (v_g*(2D-1))
                      - 2*n*v_d / (v_g*(2D-1)^2)
                      - 2*n^2*i1*r_d / (v_g*(2D-1)^2)]
    """
    if cfg.duty <= 0.5:
        raise ValueError("lossy gain undefined for duty <= 0.5")
    if v_g <= 0:
        raise ValueError("input voltage must be positive")
    q = 2.0 * cfg.duty - 1.0
    m = fb_gain_ideal(cfg.n, cfg.duty)
    bracket = (1.0
               - 2.0 * i1 * cfg.r_on / (v_g * q)
               - 2.0 * cfg.n * cfg.v_d / (v_g * q * q)
               - 2.0 * cfg.n ** 2 * i1 * cfg.r_d / (v_g * q * q))
    return m * bracket


def pmu_solve_current(cfg: PmuConfig, v_g: float, ocv: float,
                      r_bat: float) -> PmuState:
    """Operating point of a full-bridge unit charging a battery.

    Solves the volt-second balance

        v_g*(2D-1)^2 / n = 2*i1*r_on*(2D-1)/n + v + 2*v_d + 2*n*i1*r_d

    together with v = ocv + i2*r_bat and i2 = n*i1.  A negative solution
    means the battery voltage exceeds what the rectifier can deliver, in
    which case the diodes block and all port quantities are zero.
    """
    if cfg.duty <= 0.5:
        raise ValueError("operating point undefined for duty <= 0.5")
    if v_g <= 0:
        raise ValueError("input voltage must be positive")
    if r_bat < 0:
        raise ValueError("battery resistance must be non-negative")

    q = 2.0 * cfg.duty - 1.0
    num = v_g * q * q / cfg.n - ocv - 2.0 * cfg.v_d
    den = (2.0 / cfg.n) * cfg.r_on * q + 2.0 * cfg.n * cfg.r_d + cfg.n * r_bat
    if den <= 0:
        raise ConfigError(
            "pmu: loss terms and battery resistance sum to a non-positive "
            "denominator; the operating point is unconstrained")

    i1 = max(0.0, num / den)
    i2 = cfg.n * i1
    v_out = ocv + i2 * r_bat
    p_out = v_out * i2
    losses = 2.0 * i1 * i1 * cfg.r_on + 2.0 * i2 * cfg.v_d + 2.0 * i2 * i2 * cfg.r_d
    if i1 == 0.0:
        return PmuState(i1=0.0, i2=0.0, v_out=ocv, p_in=0.0, p_out=0.0)
    return PmuState(i1=i1, i2=i2, v_out=v_out, p_in=p_out + losses, p_out=p_out)
