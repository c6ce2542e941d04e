"""Motional states, their drift/diffusion propagation and overlap signals.

Phase-space convention: x = (a + a^dag)/sqrt(2), p = -i(a - a^dag)/sqrt(2),
vacuum covariance diag(1/2, 1/2).  The momentum drift displaces states along
-p by alpha*tbar; only the magnitude of the displacement enters any overlap,
so the choice is fixed purely for reproducibility.

Gaussian states evolve by closed-form moment solutions (exact also with the
Doppler damping g).  Cat states use the closed-form overlap, Fock
superpositions the characteristic-function route with Gauss-Hermite
quadrature; both are restricted to g = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from .errors import (ConfigError, QuadratureConvergenceError,
                     UnsupportedDampingError)

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class FPParams:
    """Constant-coefficient momentum drift/diffusion for a time tbar (pulses)."""

    alpha: float
    d: float
    tbar: float
    g: float = 0.0

    def __post_init__(self):
        if self.d < 0.0:
            raise ConfigError("diffusion coefficient must be non-negative")
        if self.tbar < 0.0:
            raise ConfigError("tbar must be non-negative")


class GaussianState:
    """Gaussian motional state with mean vector and covariance matrix."""

    __slots__ = ("mean", "cov")

    def __init__(self, mean, cov):
        mean = np.asarray(mean, dtype=float)
        cov = np.asarray(cov, dtype=float)
        if mean.shape != (2,) or cov.shape != (2, 2):
            raise ConfigError("mean must be length 2, cov 2x2")
        if not np.allclose(cov, cov.T, atol=1e-12):
            raise ConfigError("covariance must be symmetric")
        if np.linalg.det(cov) < 0.25 * (1.0 - 1e-9):
            raise ConfigError("covariance violates the uncertainty relation")
        self.mean = mean
        self.cov = 0.5 * (cov + cov.T)

    @classmethod
    def _unchecked(cls, mean, cov) -> "GaussianState":
        """Skip the uncertainty-relation check.

        The drift/diffusion/damping map is a classical evolution of the
        Wigner function and may compress the covariance below vacuum noise
        for strong damping; evolved states must not be rejected for that.
        """
        out = object.__new__(cls)
        out.mean = np.asarray(mean, dtype=float)
        out.cov = np.asarray(cov, dtype=float)
        return out

    @classmethod
    def vacuum(cls) -> "GaussianState":
        return cls(np.zeros(2), 0.5 * np.eye(2))

    @classmethod
    def squeezed(cls, r: float, phase: float = math.pi / 2) -> "GaussianState":
        """Squeezed vacuum; phase pi/2 squeezes the momentum quadrature."""
        rot = np.array([[math.cos(phase), -math.sin(phase)],
                        [math.sin(phase), math.cos(phase)]])
        core = 0.5 * np.diag([math.exp(-2 * r), math.exp(2 * r)])
        return cls(np.zeros(2), rot @ core @ rot.T)

    def qfi_displacement(self) -> float:
        """QFI for momentum displacements: 4 Var(x)."""
        return 4.0 * self.cov[0, 0]


@dataclass(frozen=True)
class CatState:
    """Even superposition of coherent states |beta> and |-beta>, beta real."""

    beta: float

    def __post_init__(self):
        if self.beta < 0.0:
            raise ConfigError("beta must be non-negative")

    @property
    def normalization(self) -> float:
        return (2.0 + 2.0 * math.exp(-2.0 * self.beta**2)) ** -0.5

    @property
    def nbar(self) -> float:
        return self.beta**2 * math.tanh(self.beta**2)

    def qfi_displacement(self) -> float:
        n2 = self.normalization**2
        return 2.0 * (1.0 + 8.0 * self.beta**2 * n2)


class FockSuperposition:
    """Finite superposition sum_n c_n |n>, truncated at n_max <= 64."""

    __slots__ = ("coeffs",)

    MAX_N = 64

    def __init__(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.ndim != 1 or len(coeffs) == 0:
            raise ConfigError("coeffs must be a non-empty 1-D sequence")
        if len(coeffs) - 1 > self.MAX_N:
            raise ConfigError(f"truncation above n_max={self.MAX_N}")
        norm = np.sum(np.abs(coeffs) ** 2)
        if abs(norm - 1.0) > 1e-12:
            raise ConfigError("coefficients must be normalized to 1e-12")
        self.coeffs = coeffs

    @classmethod
    def from_dict(cls, entries: dict[int, complex]) -> "FockSuperposition":
        n_max = max(entries)
        c = np.zeros(n_max + 1, dtype=complex)
        for n, v in entries.items():
            c[n] = v
        return cls(c)

    @classmethod
    def fock(cls, n: int) -> "FockSuperposition":
        c = np.zeros(n + 1, dtype=complex)
        c[n] = 1.0
        return cls(c)

    @property
    def nbar(self) -> float:
        n = np.arange(len(self.coeffs))
        return float(np.sum(n * np.abs(self.coeffs) ** 2))

    def x_moments(self):
        """(<x>, <x^2>) from the tridiagonal position operator."""
        c = self.coeffs
        n = np.arange(len(c))
        # <x> couples n, n+1; <x^2> has diagonal (n + 1/2) and n, n+2 terms.
        ex = _SQRT2 * float(np.real(np.sum(np.conj(c[:-1]) * c[1:]
                                           * np.sqrt(n[1:]))))
        diag = float(np.sum((n + 0.5) * np.abs(c) ** 2))
        off2 = 0.0
        if len(c) > 2:
            amp = np.sqrt((n[2:] - 1.0) * n[2:])
            off2 = float(np.real(np.sum(np.conj(c[:-2]) * c[2:] * amp)))
        return ex, diag + off2

    def qfi_displacement(self) -> float:
        ex, ex2 = self.x_moments()
        return 4.0 * (ex2 - ex**2)


MotionalState = GaussianState | CatState | FockSuperposition


def _damping_factors(g: float, tbar: float):
    """(e^{-g t}, (1-e^{-g t})/g, (1-e^{-2g t})/(2g)) with safe g -> 0."""
    if g == 0.0:
        return 1.0, tbar, tbar
    e1 = math.exp(-g * tbar)
    f1 = -math.expm1(-g * tbar) / g
    f2 = -math.expm1(-2.0 * g * tbar) / (2.0 * g)
    return e1, f1, f2


def evolve_gaussian(s: GaussianState, fp: FPParams) -> GaussianState:
    """Closed-form moment evolution under drift, diffusion and damping."""
    e1, f1, f2 = _damping_factors(fp.g, fp.tbar)
    mean = s.mean.copy()
    mean[1] = mean[1] * e1 - fp.alpha * f1
    cov = s.cov.copy()
    cov[0, 1] = cov[1, 0] = cov[0, 1] * e1
    cov[1, 1] = cov[1, 1] * e1**2 + fp.d * f2
    return GaussianState._unchecked(mean, cov)


def overlap_gaussian(a: GaussianState, b: GaussianState) -> float:
    """tr(rho_a rho_b) for two Gaussian states."""
    sigma = a.cov + b.cov
    det = np.linalg.det(sigma)
    if det <= 0.0:
        raise ConfigError("singular covariance sum")
    dm = a.mean - b.mean
    return float(det**-0.5 * math.exp(-0.5 * dm @ np.linalg.solve(sigma, dm)))


def evolve_and_overlap_cat(c: CatState, fp: FPParams) -> float:
    """Overlap of a cat state with its drift/diffusion-evolved self (g = 0)."""
    if fp.g != 0.0:
        raise UnsupportedDampingError("cat propagation requires g = 0")
    b2 = c.beta**2
    u = fp.alpha * fp.tbar
    v = fp.d * fp.tbar
    den = 1.0 + v
    q = math.exp(-2.0 * b2)
    bracket = (1.0
               + 2.0 * math.exp(-4.0 * b2)
               + math.exp(-4.0 * v * b2 / den)
               * math.cos(2.0 * _SQRT2 * u * c.beta / den)
               + 4.0 * math.exp(-b2 * (2.0 + 3.0 * v) / den)
               * math.cos(_SQRT2 * u * c.beta / den))
    return (0.5 / (1.0 + q) ** 2 / math.sqrt(den)
            * math.exp(-0.5 * u**2 / den) * bracket)


def _displacement_elements(m: int, n: int, lam: np.ndarray) -> np.ndarray:
    """<m| D(lam) |n> for the displacement operator D = exp(lam a^dag - lam* a)."""
    a2 = np.abs(lam) ** 2
    if m >= n:
        lnf = 0.5 * (gammaln(n + 1) - gammaln(m + 1))
        return (np.exp(lnf - 0.5 * a2) * lam ** (m - n)
                * eval_genlaguerre(n, m - n, a2))
    lnf = 0.5 * (gammaln(m + 1) - gammaln(n + 1))
    return (np.exp(lnf - 0.5 * a2) * (-np.conj(lam)) ** (n - m)
            * eval_genlaguerre(m, n - m, a2))


def characteristic_function(f: FockSuperposition, k1, k2) -> np.ndarray:
    """chi(k) = <exp(i k1 x + i k2 p)> for a Fock superposition."""
    k1 = np.asarray(k1, dtype=float)
    k2 = np.asarray(k2, dtype=float)
    lam = (1j * k1 - k2) / _SQRT2
    chi = np.zeros(np.broadcast(k1, k2).shape, dtype=complex)
    c = f.coeffs
    idx = [n for n in range(len(c)) if c[n] != 0.0]
    for m in idx:
        for n in idx:
            chi += np.conj(c[m]) * c[n] * _displacement_elements(m, n, lam)
    return chi


def cat_characteristic_function(c: CatState, k1, k2) -> np.ndarray:
    """chi(k) for the even cat state (lobes separated along x)."""
    k1 = np.asarray(k1, dtype=float)
    k2 = np.asarray(k2, dtype=float)
    n2 = c.normalization**2
    env = np.exp(-0.25 * (k1**2 + k2**2))
    return 2.0 * n2 * env * (np.cos(_SQRT2 * k1 * c.beta)
                             + math.exp(-2.0 * c.beta**2)
                             * np.cosh(_SQRT2 * k2 * c.beta))


@lru_cache(maxsize=8)
def _hermgauss(n: int):
    x, w = np.polynomial.hermite.hermgauss(n)
    return x, w


def _char_overlap(chi_sq_fn, fp: FPParams, nodes: int) -> float:
    """(1/2pi) int |chi0(k)|^2 e^{i k2 alpha tbar - k2^2 d tbar / 2} d^2k.

    `chi_sq_fn(k1, k2)` must return |chi0|^2 * exp(+k^2/2) (the slowly varying
    residual after factoring out the Gauss-Hermite weight).
    """
    x, w = _hermgauss(nodes)
    k = _SQRT2 * x
    k1, k2 = np.meshgrid(k, k, indexing="ij")
    w2 = np.outer(w, w)
    u = fp.alpha * fp.tbar
    phase = np.exp(1j * k2 * u - 0.5 * fp.d * fp.tbar * k2**2)
    val = np.sum(w2 * chi_sq_fn(k1, k2) * phase) / math.pi
    return float(np.real(val))


def evolve_and_overlap_fock(f: FockSuperposition, fp: FPParams,
                            nodes: int = 80, check: bool = False) -> float:
    """Overlap of a Fock superposition with its evolved self (g = 0).

    The evolved characteristic function is the initial one times the exact
    drift/diffusion factor; the overlap integral is done with tensor
    Gauss-Hermite quadrature against the Gaussian envelope.
    """
    if fp.g != 0.0:
        raise UnsupportedDampingError("Fock propagation requires g = 0")

    def chi_sq(k1, k2):
        chi = characteristic_function(f, k1, k2)
        return np.abs(chi) ** 2 * np.exp(0.5 * (k1**2 + k2**2))

    val = _char_overlap(chi_sq, fp, nodes)
    if check:
        ref = _char_overlap(chi_sq, fp, 2 * nodes)
        if abs(ref - val) > 1e-8:
            raise QuadratureConvergenceError(
                f"Fock overlap quadrature not converged ({abs(ref - val):.2e})")
        val = ref
    return val


def overlap_after(state: MotionalState, fp: FPParams, **kwargs) -> float:
    """Probability to remain in the initial state after drift/diffusion."""
    if isinstance(state, GaussianState):
        return overlap_gaussian(state, evolve_gaussian(state, fp))
    if isinstance(state, CatState):
        return evolve_and_overlap_cat(state, fp)
    if isinstance(state, FockSuperposition):
        return evolve_and_overlap_fock(state, fp, **kwargs)
    raise ConfigError(f"unsupported state type {type(state).__name__}")


def state_nbar(state: MotionalState) -> float:
    """Mean occupation number of any supported state."""
    if isinstance(state, GaussianState):
        # nbar = (tr(cov) - 1)/2 + |mean|^2/2 for our convention.
        return float(0.5 * (np.trace(state.cov) - 1.0)
                     + 0.5 * state.mean @ state.mean)
    return state.nbar


def state_qfi(state: MotionalState) -> float:
    """QFI under momentum displacements, 4 Var(x) for pure states."""
    return state.qfi_displacement()
