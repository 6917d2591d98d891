"""Wigner quasiprobability on a rectangular phase-space grid.

Units follow the dimensionless oscillator convention (hbar = 1): the
vacuum has W(0, 0) = 1/pi and quadrature variance 1/2.  For a density
operator written in the number basis the transform is a sum of closed
Laguerre-polynomial kernels,

    W_{|m><n|}(x, p) = (1/pi) e^{-x^2-p^2} (-1)^n sqrt(n!/m!)
                       (sqrt(2) (x + i p))^{m-n} L_n^{m-n}(2 x^2 + 2 p^2)

for m >= n, with the m < n kernel its complex conjugate.  This closed
form is the production path; direct quadrature of the defining integral
lives in the test suite as an independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from .states import DensityOperator, FockKet, TruncationError

#: closed-form kernels stay inside double range up to this cutoff
MAX_WIGNER_CUTOFF = 60

DEFAULT_GRID_MIN = -5.0
DEFAULT_GRID_MAX = 5.0
DEFAULT_GRID_POINTS = 201


@dataclass(frozen=True, eq=False)
class PhaseSpaceGrid:
    """Uniform rectangular grid of x (first axis) and p (second axis) samples."""

    x: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        for name in ("x", "p"):
            axis = np.array(getattr(self, name), dtype=float)
            if axis.ndim != 1 or axis.size < 3:
                raise ValueError(f"{name} axis needs at least 3 samples")
            steps = np.diff(axis)
            if steps.min() <= 0:
                raise ValueError(f"{name} axis must be strictly ascending")
            if np.abs(steps - steps[0]).max() > 1e-12:
                raise ValueError(f"{name} axis must be uniform to 1e-12")
            axis.setflags(write=False)
            object.__setattr__(self, name, axis)

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def dp(self) -> float:
        return float(self.p[1] - self.p[0])

    def meshes(self) -> tuple:
        return np.meshgrid(self.x, self.p, indexing="ij")


def default_grid() -> PhaseSpaceGrid:
    pts = np.linspace(DEFAULT_GRID_MIN, DEFAULT_GRID_MAX, DEFAULT_GRID_POINTS)
    return PhaseSpaceGrid(pts, pts.copy())


@dataclass(frozen=True, eq=False)
class WignerGrid:
    """Real Wigner samples W[i, j] = W(x[i], p[j]) on a phase-space grid."""

    grid: PhaseSpaceGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != (self.grid.x.size, self.grid.p.size):
            raise ValueError(f"values shape {vals.shape} does not match the grid")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def integrate(self, integrand=None) -> float:
        """Trapezoid integral of W (or integrand * W) over the grid."""
        wx = _trapezoid_weights(self.grid.x)
        wp = _trapezoid_weights(self.grid.p)
        field = self.values if integrand is None else integrand * self.values
        return float(wx @ field @ wp)


def _trapezoid_weights(axis: np.ndarray) -> np.ndarray:
    h = axis[1] - axis[0]
    w = np.full(axis.size, h)
    w[0] = w[-1] = 0.5 * h
    return w


def _kernel_sum(rho: np.ndarray, grid: PhaseSpaceGrid) -> np.ndarray:
    """Sum rho[n, m] W_{|m><n|} over the grid, ascending in n then m."""
    d = rho.shape[0]
    if d > MAX_WIGNER_CUTOFF:
        raise TruncationError(f"cutoff {d} exceeds Wigner kernel limit {MAX_WIGNER_CUTOFF}")
    X, P = grid.meshes()
    r2 = X * X + P * P
    u = 2.0 * r2
    envelope = np.exp(-r2) / math.pi
    ladder = math.sqrt(2.0) * (X + 1j * P)
    log_fact = gammaln(np.arange(d) + 1)
    out = np.zeros_like(envelope, dtype=complex)
    power = np.ones_like(ladder)  # ladder^delta, updated per diagonal
    for delta in range(d):
        for n in range(d - delta):
            m = n + delta
            upper = rho[n, m]
            lower = rho[m, n] if delta else 0.0
            if upper == 0 and lower == 0:
                continue
            scale = (-1.0) ** n * math.exp(0.5 * (log_fact[n] - log_fact[m]))
            kernel = scale * power * eval_genlaguerre(n, delta, u)
            out += upper * kernel
            if delta:
                out += lower * np.conj(kernel)  # the m < n kernel is the conjugate
        power = power * ladder
    out *= envelope
    residue = np.abs(out.imag).max()
    if residue > 1e-10:
        raise ValueError(f"Wigner transform left imaginary residue {residue:.3e}")
    return out.real


def wigner_pure(ket: FockKet, grid: PhaseSpaceGrid) -> WignerGrid:
    """Wigner function of a (possibly unnormalized) single-mode ket."""
    if not isinstance(ket, FockKet):
        raise ValueError("wigner_pure expects a single-mode ket")
    rho = np.outer(ket.coeffs, ket.coeffs.conj())
    return WignerGrid(grid, _kernel_sum(rho, grid))


def wigner_mixed(state, grid: PhaseSpaceGrid) -> WignerGrid:
    """Wigner function of a density operator or a list of branch kets.

    A branch list is summed term by term in ascending branch order, so
    the result is bit-for-bit the sum of the per-branch grids.
    """
    if isinstance(state, DensityOperator):
        if state.modes != 1:
            raise ValueError("wigner_mixed needs a single-mode density operator")
        return WignerGrid(grid, _kernel_sum(np.asarray(state.matrix), grid))
    branches = list(state)
    if not branches:
        raise ValueError("empty branch list")
    total = None
    for ket in branches:
        part = wigner_pure(ket, grid).values
        total = part if total is None else total + part
    return WignerGrid(grid, total)


def oscillator_wavefunction(n: int, x) -> np.ndarray:
    """Real position wavefunction of the n-photon number state.

    Uses the normalized Hermite-function recurrence
    f_k = sqrt(2/k) x f_{k-1} - sqrt((k-1)/k) f_{k-2}, which stays finite
    where an explicit factorial would overflow.
    """
    n = int(n)
    if n < 0:
        raise ValueError("photon number must be nonnegative")
    x = np.asarray(x, dtype=float)
    prev = math.pi ** (-0.25) * np.exp(-0.5 * x * x)
    if n == 0:
        return prev
    cur = math.sqrt(2.0) * x * prev
    for k in range(2, n + 1):
        prev, cur = cur, math.sqrt(2.0 / k) * x * cur - math.sqrt((k - 1.0) / k) * prev
    return cur


@dataclass(frozen=True)
class GaussianFit:
    """Centered Gaussian surface A exp(-(s x^2 + p^2/s) / (2 sigma^2))."""

    A: float
    s: float
    sigma: float


def fit_gaussian(w: WignerGrid) -> GaussianFit:
    """Moment-match a centered Gaussian to a Wigner grid.

    The squeeze ratio is s = sqrt(V_p / V_x) and the width is
    sigma = (V_x V_p)^{1/4}, with the variances taken as plain second
    moments; inputs displaced from the origin by more than 0.05 in
    either quadrature are rejected.
    """
    X, P = w.grid.meshes()
    total = w.integrate()
    mean_x = w.integrate(X) / total
    mean_p = w.integrate(P) / total
    if abs(mean_x) > 0.05 or abs(mean_p) > 0.05:
        raise ValueError(f"grid is not centered: mean x {mean_x:.3f}, mean p {mean_p:.3f}")
    v_x = w.integrate(X * X) / total
    v_p = w.integrate(P * P) / total
    if v_x <= 0 or v_p <= 0:
        raise ValueError(f"nonpositive variances V_x={v_x:.3e}, V_p={v_p:.3e}")
    sigma = (v_x * v_p) ** 0.25
    return GaussianFit(A=1.0 / (2.0 * math.pi * sigma**2), s=math.sqrt(v_p / v_x), sigma=sigma)


def negativity_volume(w: WignerGrid) -> float:
    """Integrated negative part of W: the integral of (|W| - W) / 2."""
    return w.integrate(np.where(w.values < 0, -1.0, 0.0))


def wigner_csv(w: WignerGrid) -> str:
    """Render a Wigner grid as CSV (header x,p,w; row-major in x then p)."""
    lines = ["x,p,w"]
    vals = w.values
    for i, xi in enumerate(w.grid.x):
        for j, pj in enumerate(w.grid.p):
            lines.append(f"{xi:.12e},{pj:.12e},{vals[i, j]:.12e}")
    return "\n".join(lines) + "\n"


def fit_json_dict(fit: GaussianFit) -> dict:
    return {"A": fit.A, "s": fit.s, "sigma": fit.sigma}
