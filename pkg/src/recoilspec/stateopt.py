"""Probe-state optimization and the single-photon squeezing budget.

Two separate questions share the machinery here: which finite Fock
superposition maximizes the recoil sensitivity under an energy bound, and
how much squeezing a dipole-transition measurement needs so that a single
scattered photon on average moves the overlap to the working point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize

from .bloch import PulseParams
from .errors import ConfigError, NoCrossingError, OptimizerError
from .metrology import recoil_sensitivity
from .phasespace import FockSuperposition
from .recoil import DriftDiffusion, compute_coefficients

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class OptimizationProblem:
    basis: tuple[int, ...] = (2, 4)
    nbar_max: float = 4.0
    epsilon: float = 0.1
    p0: float = 0.5
    mode: str = "drift-only"

    def __post_init__(self):
        if len(set(self.basis)) != len(self.basis):
            raise ConfigError("basis indices must be distinct")
        if any(n < 0 for n in self.basis):
            raise ConfigError("basis indices must be non-negative")
        if self.nbar_max <= 0.0:
            raise ConfigError("nbar_max must be positive")


@dataclass(frozen=True)
class OptimizationResult:
    coeffs: np.ndarray
    s_abs: float
    nbar_used: float
    constraint_slack: float
    n_converged: int


@dataclass(frozen=True)
class SinglePhotonBudget:
    pulse: PulseParams
    coeffs: DriftDiffusion
    tstar: float
    r_required: float
    nbar: float
    enhancement: float

    @property
    def squeezing_db(self) -> float:
        return squeezing_db(self.r_required)


def squeezing_db(r: float) -> float:
    """Squeezing strength in dB, 10 log10 of the variance ratio e^{2r}."""
    return 10.0 * math.log10(math.exp(2.0 * r))


def _angles_to_coeffs(angles: np.ndarray) -> np.ndarray:
    """Hypersphere parameterization; exactly normalized for any angles."""
    dim = len(angles) + 1
    c = np.ones(dim)
    for i, a in enumerate(angles):
        c[i] *= math.cos(a)
        c[i + 1:] *= math.sin(a)
    return c


def _state_from_coeffs(basis, c) -> FockSuperposition:
    return FockSuperposition.from_dict(
        {n: float(ci) for n, ci in zip(basis, c)})


def fock_sensitivity(prob: OptimizationProblem, c) -> float:
    """|S| of the basis superposition with coefficients c (normalized)."""
    c = np.asarray(c, dtype=float)
    c = c / np.linalg.norm(c)
    state = _state_from_coeffs(prob.basis, c)
    res = recoil_sensitivity(state, prob.epsilon, p0=prob.p0, mode=prob.mode,
                             allow_large_epsilon=True)
    return res.s_abs


def optimize_fock_superposition(prob: OptimizationProblem,
                                n_restarts: int = 8,
                                seed: int = 0) -> OptimizationResult:
    """Best-found coefficients maximizing |S| subject to nbar <= nbar_max."""
    if len(prob.basis) == 1:
        c = np.array([1.0])
        s = fock_sensitivity(prob, c)
        nbar = float(prob.basis[0])
        return OptimizationResult(coeffs=c, s_abs=s, nbar_used=nbar,
                                  constraint_slack=prob.nbar_max - nbar,
                                  n_converged=1)
    rng = np.random.default_rng(seed)
    ns = np.asarray(prob.basis, dtype=float)
    penalty_w = 1e3

    def objective(angles):
        c = _angles_to_coeffs(angles)
        nbar = float(ns @ c**2)
        try:
            s = fock_sensitivity(prob, c)
        except NoCrossingError:
            return 1e3
        return -s + penalty_w * max(0.0, nbar - prob.nbar_max) ** 2

    best = None
    n_converged = 0
    dim = len(prob.basis) - 1
    starts = [rng.uniform(0.0, math.pi, size=dim) for _ in range(n_restarts)]
    for x0 in starts:
        res = minimize(objective, x0, method="L-BFGS-B",
                       options={"ftol": 1e-12, "gtol": 1e-9, "eps": 1e-6})
        if res.success:
            n_converged += 1
        if best is None or res.fun < best.fun:
            best = res
    if n_converged == 0:
        raise OptimizerError("no restart reached the gradient tolerance")
    c = _angles_to_coeffs(best.x)
    # canonical sign: first nonzero coefficient positive
    nz = np.flatnonzero(np.abs(c) > 1e-12)
    if len(nz) and c[nz[0]] < 0:
        c = -c
    nbar = float(ns @ c**2)
    return OptimizationResult(coeffs=c, s_abs=fock_sensitivity(prob, c),
                              nbar_used=nbar,
                              constraint_slack=prob.nbar_max - nbar,
                              n_converged=n_converged)


def squeezed_overlap(alpha: float, d: float, tbar: float, r: float) -> float:
    """Overlap of a momentum-squeezed vacuum with its drifted/diffused self."""
    den = 1.0 + d * math.exp(2.0 * r) * tbar
    return den**-0.5 * math.exp(
        -0.5 * math.exp(2.0 * r) * (alpha * tbar) ** 2 / den)


def single_photon_budget(pulse: PulseParams, p0: float = 0.5,
                         r_max: float = 20.0) -> SinglePhotonBudget:
    """Squeezing needed so one scattered photon on average reaches P = p0."""
    if not 0.0 < p0 < 1.0:
        raise ConfigError("p0 must lie in (0, 1)")
    coeffs = compute_coefficients(pulse)
    if coeffs.n1 <= 0.0:
        raise ConfigError("mean photon number per pulse must be positive")
    tstar = 1.0 / coeffs.n1

    def gap(r):
        return squeezed_overlap(coeffs.alpha_p, coeffs.d_pp, tstar, r) - p0

    if gap(0.0) <= 0.0:
        r_req = 0.0
    else:
        if gap(r_max) > 0.0:
            raise NoCrossingError(
                "overlap cannot be brought to p0 by squeezing alone")
        r_req = float(brentq(gap, 0.0, r_max, xtol=1e-12, rtol=8.9e-16))
    return SinglePhotonBudget(pulse=pulse, coeffs=coeffs, tstar=tstar,
                              r_required=r_req, nbar=math.sinh(r_req) ** 2,
                              enhancement=math.exp(r_req))
