"""Single-diode photovoltaic array model.

A five-parameter single-diode model is fitted from datasheet values
(short-circuit current, open-circuit voltage, maximum-power point and
temperature coefficients at standard test conditions) and translated to
arbitrary irradiance / cell temperature with the usual De Soto rules:

    I = I_ph - I_sat*(exp((V + I*Rs)/a) - 1) - (V + I*Rs)/Rsh

Terminal current is obtained by bisection on the implicit equation, which
is unconditionally convergent because the residual is strictly decreasing
in I.  The maximum power point is located by golden-section search over
voltage; the power curve V*I(V) is unimodal on [0, Voc].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import ConfigError, SolverError

BOLTZMANN_EV = 8.617333262e-5  # eV/K
T_REF = 25.0 + 273.15          # STC cell temperature [K]
G_REF = 1000.0                 # STC irradiance [W/m^2]
BANDGAP_REF = 1.121            # silicon bandgap at T_REF [eV]
BANDGAP_SLOPE = -0.0002677     # relative bandgap variation [1/K]

BISECT_TOL = 1e-9              # current tolerance [A]
BISECT_MAX_ITER = 200

# SunPower SPR-315E-WHT-D datasheet values (96-cell module).
DEFAULT_DATASHEET = dict(
    i_sc_stc=6.14,      # A
    v_oc_stc=64.6,      # V
    v_mp_stc=54.7,      # V
    i_mp_stc=5.76,      # A
    alpha_isc=3.5e-3,   # A/degC
    beta_voc=-0.1766,   # V/degC
    n_s=96,
)


@dataclass
class PvParams:
    """Datasheet inputs plus the fitted five-parameter model at STC."""

    i_sc_stc: float = DEFAULT_DATASHEET["i_sc_stc"]
    v_oc_stc: float = DEFAULT_DATASHEET["v_oc_stc"]
    v_mp_stc: float = DEFAULT_DATASHEET["v_mp_stc"]
    i_mp_stc: float = DEFAULT_DATASHEET["i_mp_stc"]
    alpha_isc: float = DEFAULT_DATASHEET["alpha_isc"]
    beta_voc: float = DEFAULT_DATASHEET["beta_voc"]
    n_s: int = DEFAULT_DATASHEET["n_s"]

    # Fitted at construction: photocurrent, diode saturation current,
    # modified ideality voltage a = n_ideal*Ns*kT/q, series and shunt
    # resistance, all at STC.
    i_ph_ref: float = field(init=False, repr=False, default=0.0)
    i_sat_ref: float = field(init=False, repr=False, default=0.0)
    a_ref: float = field(init=False, repr=False, default=0.0)
    r_s: float = field(init=False, repr=False, default=0.0)
    r_sh_ref: float = field(init=False, repr=False, default=0.0)

    def __post_init__(self):
        if not self.v_mp_stc < self.v_oc_stc:
            raise ConfigError("pv: v_mp_stc must be below v_oc_stc")
        if not self.i_mp_stc < self.i_sc_stc:
            raise ConfigError("pv: i_mp_stc must be below i_sc_stc")
        if self.n_s <= 0:
            raise ConfigError("pv: n_s must be positive")
        self._fit()

    @property
    def ideality(self) -> float:
        return self.a_ref / (self.n_s * BOLTZMANN_EV * T_REF)

    def _fit(self):
        """Solve the five-parameter system from the datasheet anchors.

        Equations: short circuit, open circuit, MPP current, zero power
        slope at MPP, and the open-circuit point shifted by beta_voc to
        T_REF + 2 K.  The saturation current is solved in log space, the
        raw system is far too badly scaled otherwise.
        """
        isc, voc = self.i_sc_stc, self.v_oc_stc
        vmp, imp = self.v_mp_stc, self.i_mp_stc
        alpha, beta = self.alpha_isc, self.beta_voc

        def residuals(x):
            i_ph, ln_isat, r_s, r_sh, a = x
            i_sat = math.exp(ln_isat)
            y = np.empty(5)
            y[0] = isc - i_ph + i_sat * math.expm1(isc * r_s / a) + isc * r_s / r_sh
            y[1] = -i_ph + i_sat * math.expm1(voc / a) + voc / r_sh
            vd = vmp + imp * r_s
            y[2] = imp - i_ph + i_sat * math.expm1(vd / a) + vd / r_sh
            e = math.exp(vd / a)
            y[3] = imp - vmp * ((i_sat / a) * e + 1.0 / r_sh) / (
                1.0 + (i_sat * r_s / a) * e + r_s / r_sh)
            t2 = T_REF + 2.0
            voc2 = voc + 2.0 * beta
            a2 = a * t2 / T_REF
            i_ph2 = i_ph + 2.0 * alpha
            eg2 = BANDGAP_REF * (1.0 + BANDGAP_SLOPE * 2.0)
            i_sat2 = i_sat * (t2 / T_REF) ** 3 * math.exp(
                (BANDGAP_REF / T_REF - eg2 / t2) / BOLTZMANN_EV)
            y[4] = -i_ph2 + i_sat2 * math.expm1(voc2 / a2) + voc2 / r_sh
            return y

        a0 = 1.5 * BOLTZMANN_EV * T_REF * self.n_s
        x0 = [isc, math.log(isc) - voc / a0, 0.3, 100.0, a0]
        sol = optimize.root(residuals, x0=x0, method="lm",
                            options={"xtol": 1e-14, "maxiter": 20000})
        resid = float(np.max(np.abs(sol.fun)))
        if not sol.success or resid > 1e-8:
            raise ConfigError(
                f"pv: five-parameter fit did not converge (residual {resid:.2e})")

        self.i_ph_ref, ln_isat, self.r_s, self.r_sh_ref, self.a_ref = sol.x
        self.i_sat_ref = math.exp(ln_isat)

        if self.r_s <= 0 or self.r_sh_ref <= 0:
            raise ConfigError("pv: fitted resistances must be positive")
        # High-efficiency back-contact modules fit slightly below the
        # textbook lower bound of 1, so accept down to 0.9.
        if not 0.9 <= self.ideality <= 2.5:
            raise ConfigError(
                f"pv: fitted ideality factor {self.ideality:.3f} outside [0.9, 2.5]")


@dataclass(frozen=True)
class PvOperatingPoint:
    """A solved terminal point on the array's I-V curve."""

    v: float       # V
    i: float       # A
    p: float       # W, exactly v*i
    g: float       # W/m^2
    t_cell: float  # degC


def diode_coefficients(params: PvParams, g: float, t_cell: float):
    """Translate the STC fit to (g, t_cell).

    Returns (i_ph, i_sat, r_s, r_sh, a).  Photocurrent scales linearly
    with irradiance, saturation current follows the bandgap temperature
    law, shunt resistance scales inversely with irradiance.
    """
    if g < 0:
        raise ValueError("irradiance must be non-negative")
    t_k = t_cell + 273.15
    a = params.a_ref * t_k / T_REF
    i_ph = (g / G_REF) * (params.i_ph_ref + params.alpha_isc * (t_k - T_REF))
    eg = BANDGAP_REF * (1.0 + BANDGAP_SLOPE * (t_k - T_REF))
    i_sat = params.i_sat_ref * (t_k / T_REF) ** 3 * math.exp(
        (BANDGAP_REF / T_REF - eg / t_k) / BOLTZMANN_EV)
    r_sh = params.r_sh_ref * G_REF / g if g > 0 else math.inf
    return i_ph, i_sat, params.r_s, r_sh, a


def current_from_coefficients(coeffs, v: float, g: float = 0.0,
                              t_cell: float = 0.0,
                              max_iter: int = BISECT_MAX_ITER) -> float:
    """Bisection solve of the implicit diode equation for current.

    The bracket [-(v/r_s + i_ph + 1), i_ph + 1] always contains the root,
    and the residual is strictly decreasing in I, so plain bisection to
    BISECT_TOL amps cannot stall.  (g, t_cell) are carried only for error
    reporting.
    """
    i_ph, i_sat, r_s, r_sh, a = coeffs
    inv_rsh = 0.0 if math.isinf(r_sh) else 1.0 / r_sh

    lo = -(v / r_s + i_ph + 1.0)
    hi = i_ph + 1.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        vd = v + mid * r_s
        f = i_ph - i_sat * math.expm1(vd / a) - vd * inv_rsh - mid
        if f > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < BISECT_TOL:
            return 0.5 * (lo + hi)
    raise SolverError(
        f"pv current solve did not converge at v={v:.4f} V, g={g:.1f} W/m^2, "
        f"t_cell={t_cell:.1f} degC", v=v, g=g, t_cell=t_cell)


def pv_current(params: PvParams, v: float, g: float, t_cell: float,
               max_iter: int = BISECT_MAX_ITER) -> float:
    """Terminal current at voltage v under (g, t_cell)."""
    if v < 0:
        raise ValueError("voltage must be non-negative")
    coeffs = diode_coefficients(params, g, t_cell)
    return current_from_coefficients(coeffs, v, g, t_cell, max_iter=max_iter)


def pv_open_circuit_voltage(params: PvParams, g: float, t_cell: float) -> float:
    """Voltage at which terminal current crosses zero (0 for a dark array)."""
    coeffs = diode_coefficients(params, g, t_cell)
    i_ph, i_sat, _, _, a = coeffs
    if i_ph <= 0:
        return 0.0
    lo, hi = 0.0, a * math.log1p(i_ph / i_sat) + 1.0
    for _ in range(BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if current_from_coefficients(coeffs, mid, g, t_cell) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-9:
            break
    return 0.5 * (lo + hi)


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def pv_mpp(params: PvParams, g: float, t_cell: float) -> PvOperatingPoint:
    """Maximum power point by golden-section search over [0, Voc]."""
    if g <= 0:
        return PvOperatingPoint(v=0.0, i=0.0, p=0.0, g=g, t_cell=t_cell)
    coeffs = diode_coefficients(params, g, t_cell)
    v_oc = pv_open_circuit_voltage(params, g, t_cell)

    def power(v):
        return v * current_from_coefficients(coeffs, v, g, t_cell)

    lo, hi = 0.0, v_oc
    v1 = hi - _GOLDEN * (hi - lo)
    v2 = lo + _GOLDEN * (hi - lo)
    p1, p2 = power(v1), power(v2)
    for _ in range(80):
        if p1 < p2:
            lo, v1, p1 = v1, v2, p2
            v2 = lo + _GOLDEN * (hi - lo)
            p2 = power(v2)
        else:
            hi, v2, p2 = v2, v1, p1
            v1 = hi - _GOLDEN * (hi - lo)
            p1 = power(v1)
        if hi - lo < 1e-7:
            break
    v = 0.5 * (lo + hi)
    i = current_from_coefficients(coeffs, v, g, t_cell)
    return PvOperatingPoint(v=v, i=i, p=v * i, g=g, t_cell=t_cell)
