"""Independent drift/diffusion propagation on a Wigner-function grid.

A Crank-Nicolson scheme integrates

    dW/dtbar = alpha dW/dp + (d/2) d2W/dp2 + g d(p W)/dp

column-by-column in p (x enters only as a parameter), then the remain
probability is the 2 pi weighted trapezoidal overlap with the initial
Wigner function.  This route shares nothing with the closed-form and
characteristic-function evaluations and serves as their cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import diags
from scipy.sparse.linalg import splu

from .errors import ConfigError, GridUnderflowError
from .phasespace import (CatState, FockSuperposition, FPParams, GaussianState,
                         MotionalState)


@dataclass(frozen=True)
class GridSpec:
    """Uniform phase-space grid, symmetric about the origin."""

    half_width_x: float
    half_width_p: float
    nx: int
    np_: int

    def axes(self):
        x = np.linspace(-self.half_width_x, self.half_width_x, self.nx)
        p = np.linspace(-self.half_width_p, self.half_width_p, self.np_)
        return x, p


def wigner_gaussian(s: GaussianState, x, p):
    xx, pp = np.meshgrid(x, p, indexing="ij")
    dv = np.stack([xx - s.mean[0], pp - s.mean[1]], axis=-1)
    inv = np.linalg.inv(s.cov)
    quad = np.einsum("...i,ij,...j->...", dv, inv, dv)
    norm = 1.0 / (2.0 * math.pi * math.sqrt(np.linalg.det(s.cov)))
    return norm * np.exp(-0.5 * quad)


def wigner_cat(c: CatState, x, p):
    xx, pp = np.meshgrid(x, p, indexing="ij")
    n2 = c.normalization**2
    s = math.sqrt(2.0) * c.beta
    return (n2 / math.pi) * (np.exp(-(xx - s) ** 2 - pp**2)
                             + np.exp(-(xx + s) ** 2 - pp**2)
                             + 2.0 * np.exp(-xx**2 - pp**2)
                             * np.cos(2.0 * s * pp))


def _fock_wavefunction(coeffs: np.ndarray, y: np.ndarray) -> np.ndarray:
    """psi(y) = sum_n c_n phi_n(y) via the Hermite-function recurrence."""
    out = np.zeros_like(y, dtype=complex)
    phi_prev = np.zeros_like(y)
    phi = math.pi**-0.25 * np.exp(-0.5 * y**2)
    for n, c in enumerate(coeffs):
        if c != 0.0:
            out += c * phi
        nxt = (math.sqrt(2.0 / (n + 1)) * y * phi
               - math.sqrt(n / (n + 1)) * phi_prev)
        phi_prev, phi = phi, nxt
    return out


def wigner_fock(f: FockSuperposition, x, p, ny: int = 512,
                y_half: float = 6.0):
    """W(x, p) = (1/pi) int dy psi(x+y) conj(psi(x-y)) e^{-2ipy}."""
    y = np.linspace(-y_half, y_half, ny)
    dy = y[1] - y[0]
    psi_plus = _fock_wavefunction(f.coeffs, x[:, None] + y[None, :])
    psi_minus = _fock_wavefunction(f.coeffs, x[:, None] - y[None, :])
    kernel = np.exp(-2j * np.outer(y, p))
    w = (psi_plus * np.conj(psi_minus)) @ kernel * (dy / math.pi)
    return np.real(w)


def initial_wigner(state: MotionalState, x, p):
    if isinstance(state, GaussianState):
        return wigner_gaussian(state, x, p)
    if isinstance(state, CatState):
        return wigner_cat(state, x, p)
    if isinstance(state, FockSuperposition):
        return wigner_fock(state, x, p)
    raise ConfigError(f"unsupported state type {type(state).__name__}")


def default_grid(state: MotionalState, fp: FPParams) -> GridSpec:
    """Resolution tight enough for the smallest momentum feature."""
    sig = 1.0 / math.sqrt(2.0)
    feat_p = sig  # smallest structure to resolve along p
    feat_x = sig
    ext_x = sig  # half-width scale of the state along each axis
    ext_p = sig
    if isinstance(state, GaussianState):
        ext_x = math.sqrt(state.cov[0, 0]) + abs(state.mean[0]) / 6.0
        ext_p = math.sqrt(state.cov[1, 1]) + abs(state.mean[1]) / 6.0
        if abs(state.cov[0, 1]) > 1e-12:
            feat_p = feat_x = math.sqrt(min(np.linalg.eigvalsh(state.cov)))
        else:
            feat_x = math.sqrt(state.cov[0, 0])
            feat_p = math.sqrt(state.cov[1, 1])
    elif isinstance(state, CatState):
        # interference fringe period pi / (sqrt(2) beta) along p
        if state.beta > 0.0:
            feat_p = min(sig, 1.0 / (2.0 * math.sqrt(2.0) * state.beta))
        ext_x = sig + math.sqrt(2.0) * state.beta / 6.0
    elif isinstance(state, FockSuperposition):
        n_top = len(state.coeffs) - 1
        radius = math.sqrt(2.0 * n_top + 1.0)
        ext_x = ext_p = max(sig, radius / 6.0 + sig)
        if n_top > 0:
            feat_p = feat_x = min(sig, 1.5 / radius)
    shift = abs(fp.alpha) * fp.tbar
    spread = math.sqrt(max(fp.d * fp.tbar, 0.0))
    half_p = 6.0 * ext_p + shift + 5.0 * spread + 1.0
    half_x = 6.0 * ext_x + 1.0
    # hp controls the finite-difference truncation error; hx only enters the
    # trapezoidal overlap, which converges much faster for smooth integrands.
    hp = feat_p / 48.0
    hx = feat_x / 3.0
    np_ = int(2 * math.ceil(half_p / hp) + 1)
    nx = int(2 * math.ceil(half_x / hx) + 1)
    return GridSpec(half_x, half_p, nx, np_)


def _osc_wavenumber(state: MotionalState) -> float:
    """Largest momentum-fringe wavenumber carried by the Wigner function."""
    if isinstance(state, CatState):
        return 2.0 * math.sqrt(2.0) * state.beta
    if isinstance(state, FockSuperposition):
        return 2.0 * math.sqrt(2.0 * (len(state.coeffs) - 1) + 1.0)
    return 0.0


def propagate(w0: np.ndarray, p: np.ndarray, fp: FPParams,
              n_steps: int | None = None, osc_k: float = 0.0) -> np.ndarray:
    """Crank-Nicolson integration of the momentum drift/diffusion PDE."""
    hp = p[1] - p[0]
    if n_steps is None:
        # Crank-Nicolson is unconditionally stable, but its phase error grows
        # as (k alpha dt)^3 per step on fringes of wavenumber k.
        adv = abs(fp.alpha) + abs(fp.g) * float(np.max(np.abs(p)))
        dt = 0.02
        if adv > 0:
            dt = min(dt, 12.0 * hp / adv)
            if osc_k > 0.0:
                dt = min(dt, 1.0 / (30.0 * osc_k * adv))
        n_steps = max(100, int(math.ceil(fp.tbar / dt)))
    dt = fp.tbar / n_steps

    m = len(p)
    # fourth-order central differences in the interior, second order on the
    # rows adjacent to the (deep-tail) Dirichlet boundary
    main = np.zeros(m)
    lo1 = np.zeros(m - 1)
    up1 = np.zeros(m - 1)
    lo2 = np.zeros(m - 2)
    up2 = np.zeros(m - 2)
    cd = 0.5 * fp.d / hp**2
    adv = (fp.alpha + fp.g * p) / hp
    i = np.arange(2, m - 2)
    main[i] = -30.0 / 12.0 * cd + fp.g
    up1[i] = 16.0 / 12.0 * cd + 8.0 / 12.0 * adv[i]
    lo1[i - 1] = 16.0 / 12.0 * cd - 8.0 / 12.0 * adv[i]
    up2[i] = -1.0 / 12.0 * cd - 1.0 / 12.0 * adv[i]
    lo2[i - 2] = -1.0 / 12.0 * cd + 1.0 / 12.0 * adv[i]
    for j in (1, m - 2):
        main[j] = -2.0 * cd + fp.g
        up1[j] = cd + 0.5 * adv[j]
        lo1[j - 1] = cd - 0.5 * adv[j]
    op = diags([lo2, lo1, main, up1, up2],
               offsets=[-2, -1, 0, 1, 2], format="csc")
    ident = diags([np.ones(m)], offsets=[0], format="csc")
    lhs = splu((ident - 0.5 * dt * op).tocsc())
    rhs = (ident + 0.5 * dt * op).tocsr()

    w = w0.T.copy()  # shape (np_, nx): solve all x columns at once
    for _ in range(n_steps):
        w = lhs.solve(rhs @ w)
        w[0, :] = 0.0
        w[-1, :] = 0.0
    return w.T


def overlap_pde(state: MotionalState, fp: FPParams,
                grid: GridSpec | None = None,
                n_steps: int | None = None,
                mass_tol: float = 1e-6) -> float:
    """Remain probability via grid propagation of the Wigner function."""
    if grid is None:
        grid = default_grid(state, fp)
    x, p = grid.axes()
    hx = x[1] - x[0]
    hp = p[1] - p[0]
    w0 = initial_wigner(state, x, p)
    mass = float(np.trapezoid(np.trapezoid(w0, dx=hp, axis=1), dx=hx))
    if mass < 1.0 - mass_tol:
        raise GridUnderflowError(
            f"initial Wigner mass {mass:.8f} below tolerance; enlarge grid")
    wt = propagate(w0, p, fp, n_steps=n_steps, osc_k=_osc_wavenumber(state))
    mass_t = float(np.trapezoid(np.trapezoid(wt, dx=hp, axis=1), dx=hx))
    if mass_t < 1.0 - 1e-4:
        raise GridUnderflowError(
            f"propagated Wigner mass {mass_t:.8f}; state left the grid")
    return float(2.0 * math.pi
                 * np.trapezoid(np.trapezoid(w0 * wt, dx=hp, axis=1), dx=hx))


def overlap_pde_batch(state: MotionalState, fps: list[FPParams],
                      mass_tol: float = 1e-6) -> list[float]:
    """Remain probabilities for several drift/diffusion settings.

    The grid and initial Wigner function are built once, sized for the
    worst-case drift and diffusion in the batch.
    """
    if not fps:
        return []
    worst = FPParams(alpha=max(abs(f.alpha) for f in fps),
                     d=max(f.d for f in fps),
                     tbar=max(f.tbar for f in fps),
                     g=0.0)
    grid = default_grid(state, worst)
    x, p = grid.axes()
    hx = x[1] - x[0]
    hp = p[1] - p[0]
    w0 = initial_wigner(state, x, p)
    mass = float(np.trapezoid(np.trapezoid(w0, dx=hp, axis=1), dx=hx))
    if mass < 1.0 - mass_tol:
        raise GridUnderflowError(
            f"initial Wigner mass {mass:.8f} below tolerance; enlarge grid")
    out = []
    osc_k = _osc_wavenumber(state)
    for fp in fps:
        wt = propagate(w0, p, fp, osc_k=osc_k)
        out.append(float(2.0 * math.pi * np.trapezoid(
            np.trapezoid(w0 * wt, dx=hp, axis=1), dx=hx)))
    return out
