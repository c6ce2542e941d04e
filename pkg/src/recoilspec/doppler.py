"""Doppler-induced systematic shift of the two-point-sampled resonance.

The velocity dependence of the probe detuning adds a weak damping term g
to the momentum dynamics.  To first order in g the remain probability
acquires an odd-in-detuning component deltaP, which a two-point sampling
scheme converts into a frequency offset delta_omega = -deltaP / (dP/dDelta)
on the flank of the resonance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bloch import PulseParams
from .errors import ConfigError, FlatFlankError, PerturbativeRegimeError
from .metrology import _richardson_derivative, find_root_tbar, _march_step
from .phasespace import (FPParams, GaussianState, evolve_gaussian,
                         overlap_gaussian)
from .recoil import compute_coefficients, doppler_damping

MAX_GTBAR = 0.1


@dataclass(frozen=True)
class ShiftResult:
    delta_p_asym: float
    c_const: float
    shift: float
    shift_analytic: float
    tstar: float
    p_sym: float
    dp_ddelta: float


def _first_order_moments(s: GaussianState, fp: FPParams):
    """Evolved mean/cov at g=0 plus their derivatives with respect to g."""
    a, d, t = fp.alpha, fp.d, fp.tbar
    mean = s.mean.copy()
    mean[1] -= a * t
    cov = s.cov + np.diag([0.0, d * t])
    dmean = np.array([0.0, -s.mean[1] * t + 0.5 * a * t**2])
    dcov = np.array([[0.0, -t * s.cov[0, 1]],
                     [-t * s.cov[0, 1], -2.0 * t * s.cov[1, 1] - d * t**2]])
    return mean, cov, dmean, dcov


def asymmetric_overlap(state: GaussianState, fp: FPParams):
    """(P_sym, deltaP, c): symmetric overlap, first-order-in-g odd part and
    the order-unity constant c = deltaP / ((g tbar / 2) P_sym)."""
    if not isinstance(state, GaussianState):
        raise ConfigError("asymmetric overlap implemented for Gaussian states")
    if abs(fp.g * fp.tbar) > MAX_GTBAR:
        raise PerturbativeRegimeError(
            f"|g tbar| = {abs(fp.g * fp.tbar):.3g} beyond perturbative range")
    mt, ct, dmt, dct = _first_order_moments(state, fp)
    sigma = state.cov + ct
    dm = state.mean - mt
    inv = np.linalg.inv(sigma)
    p_sym = float(np.linalg.det(sigma) ** -0.5
                  * math.exp(-0.5 * dm @ inv @ dm))
    # d/dg of log P: determinant term, quadratic-form metric term, mean term
    dlogp = (-0.5 * float(np.trace(inv @ dct))
             + 0.5 * float(dm @ inv @ dct @ inv @ dm)
             + float(dm @ inv @ dmt))
    delta_p = fp.g * p_sym * dlogp
    if fp.g == 0.0 or fp.tbar == 0.0:
        return p_sym, 0.0, 0.0
    c = delta_p / (0.5 * fp.g * fp.tbar * p_sym)
    return p_sym, delta_p, c


def exact_overlap_with_damping(state: GaussianState, fp: FPParams) -> float:
    """Full (non-perturbative) Gaussian overlap including damping."""
    return overlap_gaussian(state, evolve_gaussian(state, fp))


def two_point_shift(state: GaussianState, pulse: PulseParams,
                    p0: float = 0.5, neglect_diffusion: bool = False,
                    slope_floor: float = 1e-18) -> ShiftResult:
    """Systematic frequency offset of the resonance sampled at P = p0.

    Coefficients are evaluated at the pulse detuning; the working point is
    found in per-pulse units, then the detuning slope of P is taken through
    the whole pipeline at fixed interrogation time.
    """
    if not 0.0 < p0 < 1.0:
        raise ConfigError("p0 must lie in (0, 1)")

    def alpha_d(delta: float):
        coeffs = compute_coefficients(pulse.with_detuning(delta))
        d = 0.0 if neglect_diffusion else coeffs.d_pp
        return coeffs.alpha_p, d

    alpha0, d0 = alpha_d(pulse.detuning)
    if alpha0 <= 0.0:
        raise ConfigError("drift must be positive at the chosen detuning")
    g0 = doppler_damping(pulse)

    def prob(t):
        return overlap_gaussian(
            state, evolve_gaussian(state, FPParams(alpha=alpha0, d=d0, tbar=t)))

    t_max = 40.0 * math.sqrt(2.0 * math.log(2.0)) / alpha0
    tstar = find_root_tbar(prob, p0, _march_step(state, alpha0), t_max)
    if abs(g0 * tstar) > MAX_GTBAR:
        raise PerturbativeRegimeError(
            f"|g tbar*| = {abs(g0 * tstar):.3g} beyond perturbative range")

    p_sym, delta_p, c = asymmetric_overlap(
        state, FPParams(alpha=alpha0, d=d0, tbar=tstar, g=g0))

    def p_of_delta(delta: float) -> float:
        a, d = alpha_d(delta)
        return overlap_gaussian(
            state, evolve_gaussian(state, FPParams(alpha=a, d=d, tbar=tstar)))

    dp_ddelta = _richardson_derivative(p_of_delta, pulse.detuning,
                                       1e-3 * pulse.linewidth, rel_tol=1e-7)
    if abs(dp_ddelta) < slope_floor:
        raise FlatFlankError("overlap slope too small to define a shift")
    shift = -delta_p / dp_ddelta
    shift_analytic = (pulse.lamb_dicke * pulse.mode_freq
                      / (2.0 * math.sqrt(math.log(1.0 / p0))))
    return ShiftResult(delta_p_asym=delta_p, c_const=c, shift=shift,
                       shift_analytic=shift_analytic, tstar=tstar,
                       p_sym=p_sym, dp_ddelta=dp_ddelta)
