"""Beam-splitter coupling, photon loss, and heralded (zero-click) attenuation.

The beam splitter convention used throughout maps the input creation
operator of the first mixed mode to ``t a' + i r b'`` and of the second
to ``i r a' + t b'``, i.e. the transmitted amplitude is real and the
reflected amplitude carries a fixed i phase.  Attenuation of a single
mode is modeled by mixing it with a vacuum ancilla and then resolving
the ancilla in one of three ways:

* trace it out                  -> ordinary (lossy) attenuation,
* project it on zero photons    -> noiseless attenuation (equivalent to
                                   applying nu^n to the kept mode),
* weight branch n by (1-eta)^n  -> no-click herald with a detector of
                                   finite efficiency eta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .states import (
    DensityOperator,
    FockKet,
    MultiModeKet,
    NORM_SLACK,
)

#: herald outcomes rarer than this are treated as impossible
MIN_HERALD_PROBABILITY = 1e-15

#: squared amplitude that may be silently dropped when a beam splitter
#: would scatter population past a mode cutoff
CLIP_TOL = 1e-20


class HeraldError(RuntimeError):
    """A conditioning outcome has (numerically) zero probability."""


@dataclass(frozen=True)
class BeamSplitter:
    """Lossless two-port coupler with transmission t and reflection r.

    t is restricted to [0, 1]; r may be negative so that the adjoint
    coupler (t, -r) is expressible.  t^2 + r^2 must equal one.
    """

    t: float
    r: float

    def __post_init__(self):
        t, r = float(self.t), float(self.r)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "r", r)
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"transmission amplitude {t} outside [0, 1]")
        if not -1.0 <= r <= 1.0:
            raise ValueError(f"reflection amplitude {r} outside [-1, 1]")
        if abs(t * t + r * r - 1.0) > 1e-12:
            raise ValueError(f"not unitary: t^2 + r^2 = {t * t + r * r}")

    @classmethod
    def balanced(cls) -> "BeamSplitter":
        return cls(math.sqrt(0.5), math.sqrt(0.5))

    @classmethod
    def from_keep(cls, kappa: float) -> "BeamSplitter":
        """Attenuator keeping amplitude kappa and shedding sqrt(1 - kappa^2)."""
        kappa = float(kappa)
        if not 0.0 <= kappa <= 1.0:
            raise ValueError(f"kept amplitude {kappa} outside [0, 1]")
        return cls(kappa, math.sqrt(max(0.0, 1.0 - kappa * kappa)))

    def adjoint(self) -> "BeamSplitter":
        return BeamSplitter(self.t, -self.r)


@dataclass(frozen=True)
class HeraldOutcome:
    """A conditioned state together with the probability of its herald."""

    state: object  # FockKet or DensityOperator, normalized
    probability: float

    def __post_init__(self):
        p = float(self.probability)
        object.__setattr__(self, "probability", p)
        if not 0.0 <= p <= 1.0 + NORM_SLACK:
            raise ValueError(f"herald probability {p} outside [0, 1]")


def inject(ket: FockKet, bs: BeamSplitter) -> MultiModeKet:
    """Send a single-mode ket into one port of a beam splitter, vacuum in the other.

    Output coefficients follow the binomial expansion
    coeffs[n_a, n_b] = c_{n_a+n_b} sqrt(C(n_a+n_b, n_b)) t^{n_a} (i r)^{n_b},
    with the same cutoff on both output modes (total photon number is
    conserved, so nothing is lost to truncation).
    """
    if not isinstance(ket, FockKet):
        raise ValueError("inject expects a single-mode ket")
    if not ket.normalized:
        raise ValueError("inject expects a normalized input")
    d = ket.cutoff
    na = np.arange(d)[:, None]
    nb = np.arange(d)[None, :]
    n = na + nb
    log_binom = 0.5 * (gammaln(n + 1) - gammaln(na + 1) - gammaln(nb + 1))
    amp = np.exp(log_binom) * bs.t**na * (1j * bs.r) ** nb
    src = np.where(n < d, ket.coeffs[np.minimum(n, d - 1)], 0.0)
    return MultiModeKet(src * amp)


@lru_cache(maxsize=64)
def _bs_kernel_cached(d_i: int, d_j: int, t: float, r: float) -> np.ndarray:
    # A[k, n_i]: amplitude for k of n_i input photons staying in mode i
    # B[l, n_j]: amplitude for l of n_j input photons crossing into mode i
    ni = np.arange(d_i)
    nj = np.arange(d_j)
    k = ni[:, None]
    l = nj[:, None]
    binom_i = np.exp(gammaln(ni + 1) - gammaln(k + 1) - gammaln(np.maximum(ni - k, 0) + 1))
    binom_j = np.exp(gammaln(nj + 1) - gammaln(l + 1) - gammaln(np.maximum(nj - l, 0) + 1))
    A = np.where(k <= ni, binom_i * t**k * (1j * r) ** np.maximum(ni - k, 0), 0.0)
    B = np.where(l <= nj, binom_j * (1j * r) ** l * t ** np.maximum(nj - l, 0), 0.0)
    lg = gammaln(np.arange(d_i + d_j) + 1)
    kernel = np.zeros((d_i, d_j, d_i, d_j), dtype=complex)
    for a in range(d_i):
        for b in range(d_j):
            total = a + b
            conv = np.convolve(A[: a + 1, a], B[: b + 1, b])  # index: photons ending in mode i
            mi = np.arange(total + 1)
            mj = total - mi
            weight = np.exp(0.5 * (lg[mi] + lg[mj] - lg[a] - lg[b]))
            keep = (mi < d_i) & (mj < d_j)
            kernel[mi[keep], mj[keep], a, b] = conv[keep] * weight[keep]
    return kernel.reshape(d_i * d_j, d_i * d_j)


def bs_kernel(d_i: int, d_j: int, bs: BeamSplitter) -> np.ndarray:
    """Number-basis matrix of the two-mode coupler on dims (d_i, d_j), row-major."""
    return _bs_kernel_cached(int(d_i), int(d_j), bs.t, bs.r)


def apply_bs(state: MultiModeKet, mode_i: int, mode_j: int, bs: BeamSplitter) -> MultiModeKet:
    """Mix two modes of a multimode ket on a beam splitter.

    Mode cutoffs are left unchanged.  If the input holds population whose
    total photon number could scatter past either cutoff (more than
    CLIP_TOL in squared amplitude), the operation refuses rather than
    silently break unitarity; pad the register first via states.embed.
    """
    if not isinstance(state, MultiModeKet):
        raise ValueError("apply_bs expects a multimode ket")
    k = state.modes
    if not (0 <= mode_i < k and 0 <= mode_j < k) or mode_i == mode_j:
        raise ValueError(f"invalid mode pair ({mode_i}, {mode_j}) for {k} modes")
    work = np.moveaxis(state.coeffs, (mode_i, mode_j), (0, 1))
    d_i, d_j = work.shape[0], work.shape[1]
    total = np.add.outer(np.arange(d_i), np.arange(d_j))
    overflow = (total >= d_i) | (total >= d_j)
    if overflow.any():
        clipped = float((np.abs(work[overflow, ...]) ** 2).sum())
        if clipped > CLIP_TOL:
            raise ValueError(
                f"beam splitter would scatter squared amplitude {clipped:.3e} "
                f"past the mode cutoffs ({d_i}, {d_j}); pad the register first"
            )
    kernel = bs_kernel(d_i, d_j, bs)
    mixed = kernel @ work.reshape(d_i * d_j, -1)
    out = np.moveaxis(mixed.reshape(work.shape), (0, 1), (mode_i, mode_j))
    return MultiModeKet(out, normalized=state.normalized)


def phase_shift(state: MultiModeKet, mode: int, phi: float) -> MultiModeKet:
    """Apply exp(i n phi) along one mode."""
    if not isinstance(state, MultiModeKet):
        raise ValueError("phase_shift expects a multimode ket")
    if not 0 <= mode < state.modes:
        raise ValueError(f"mode {mode} out of range for {state.modes} modes")
    d = state.cutoffs[mode]
    phases = np.exp(1j * float(phi) * np.arange(d))
    shape = [1] * state.modes
    shape[mode] = d
    return MultiModeKet(state.coeffs * phases.reshape(shape), normalized=state.normalized)


def project_photons(state: MultiModeKet, mode: int, n: int):
    """Unnormalized remainder after finding exactly n photons in one mode."""
    if not 0 <= mode < state.modes:
        raise ValueError(f"mode {mode} out of range for {state.modes} modes")
    if not 0 <= n < state.cutoffs[mode]:
        raise ValueError(f"photon count {n} outside mode cutoff {state.cutoffs[mode]}")
    rest = np.take(state.coeffs, n, axis=mode)
    if rest.ndim == 1:
        return FockKet(rest, normalized=False)
    return MultiModeKet(rest, normalized=False)


def branch(two_mode: MultiModeKet, n_b: int) -> FockKet:
    """Unnormalized single-mode ket left after the second mode shows n_b photons."""
    _require_two_modes(two_mode, "branch")
    return project_photons(two_mode, 1, n_b)


def trace_out(state: MultiModeKet, mode: int) -> DensityOperator:
    """Discard one mode of a ket, returning the reduced density operator."""
    if not isinstance(state, MultiModeKet):
        raise ValueError("trace_out expects a multimode ket")
    if not 0 <= mode < state.modes:
        raise ValueError(f"mode {mode} out of range for {state.modes} modes")
    if state.modes - 1 > 2:
        raise ValueError("reduced state would exceed two modes")
    kept = np.moveaxis(state.coeffs, mode, -1)
    rest_dims = kept.shape[:-1]
    flat = kept.reshape(-1, kept.shape[-1])
    rho = flat @ flat.conj().T
    return DensityOperator(rho, rest_dims)


def herald_zero(two_mode: MultiModeKet) -> HeraldOutcome:
    """Condition on an ideal detector finding the second mode empty."""
    _require_two_modes(two_mode, "herald_zero")
    b = branch(two_mode, 0)
    p = b.norm_squared()
    if p < MIN_HERALD_PROBABILITY:
        raise HeraldError(f"zero-photon herald has probability {p:.3e}")
    return HeraldOutcome(FockKet(b.coeffs / math.sqrt(p)), p)


def nu_to_n(ket: FockKet, nu: float) -> HeraldOutcome:
    """Apply the noiseless attenuation operator nu^n directly to a ket.

    Equivalent to mixing with vacuum on a beam splitter of transmission
    nu and heralding zero photons in the reflected port.
    """
    if not isinstance(ket, FockKet):
        raise ValueError("nu_to_n expects a single-mode ket")
    nu = float(nu)
    if not 0.0 < nu <= 1.0:
        raise ValueError(f"attenuation factor {nu} outside (0, 1]")
    scaled = ket.coeffs * nu ** np.arange(ket.cutoff)
    p = float(np.vdot(scaled, scaled).real)
    if p < MIN_HERALD_PROBABILITY:
        raise HeraldError(f"attenuated state has vanishing norm {p:.3e}")
    return HeraldOutcome(FockKet(scaled / math.sqrt(p)), p)


def herald_noclick(two_mode: MultiModeKet, eta: float) -> HeraldOutcome:
    """Condition on a detector of efficiency eta not firing on the second mode.

    Branch n_b of the joint state survives with weight (1 - eta)^{n_b};
    eta = 1 recovers the ideal zero-photon herald and eta = 0 recovers an
    ordinary trace.
    """
    _require_two_modes(two_mode, "herald_noclick")
    eta = float(eta)
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"detector efficiency {eta} outside [0, 1]")
    c = two_mode.coeffs
    weights = (1.0 - eta) ** np.arange(c.shape[1])
    rho = np.einsum("an,n,bn->ab", c, weights, c.conj())
    p = float(np.trace(rho).real)
    if p < MIN_HERALD_PROBABILITY:
        raise HeraldError(f"no-click herald has probability {p:.3e}")
    return HeraldOutcome(DensityOperator(rho / p, (c.shape[0],)), p)


def cat_split_coefficient(alpha, bs: BeamSplitter, n_a: int, n_b: int) -> complex:
    """Closed-form joint amplitude for an even cat split on a beam splitter.

    Nonzero only for even total photon number:
    (t alpha)^{n_a} (i r alpha)^{n_b} / sqrt(n_a! n_b! cosh alpha^2).
    """
    n_a, n_b = _photon_pair(n_a, n_b)
    alpha = float(alpha)
    if (n_a + n_b) % 2:
        return 0j
    log_norm = 0.5 * (gammaln(n_a + 1) + gammaln(n_b + 1) + _log_cosh_f(alpha * alpha))
    return complex((bs.t * alpha) ** n_a * (1j * bs.r * alpha) ** n_b * math.exp(-log_norm))


def smsv_split_coefficient(xi, bs: BeamSplitter, n_a: int, n_b: int) -> complex:
    """Closed-form joint amplitude for squeezed vacuum split on a beam splitter.

    Nonzero only for even total 2k = n_a + n_b:
    (2k)!/k! (t q)^{n_a} (i r q)^{n_b} / sqrt(n_a! n_b! cosh xi)
    with q = sqrt(-tanh(xi)/2) taken on the branch i sqrt(tanh(xi)/2)
    for positive xi.
    """
    n_a, n_b = _photon_pair(n_a, n_b)
    xi = float(xi)
    total = n_a + n_b
    if total % 2:
        return 0j
    th = math.tanh(xi)
    q = 1j * math.sqrt(th / 2.0) if th >= 0 else complex(math.sqrt(-th / 2.0))
    log_mag = (
        gammaln(total + 1)
        - gammaln(total // 2 + 1)
        - 0.5 * (gammaln(n_a + 1) + gammaln(n_b + 1) + _log_cosh_f(xi))
    )
    return complex((bs.t * q) ** n_a * (1j * bs.r * q) ** n_b * math.exp(log_mag))


def _photon_pair(n_a, n_b) -> tuple:
    n_a, n_b = int(n_a), int(n_b)
    if n_a < 0 or n_b < 0:
        raise ValueError("photon numbers must be nonnegative")
    return n_a, n_b


def _log_cosh_f(y: float) -> float:
    y = abs(y)
    return y + math.log1p(math.exp(-2.0 * y)) - math.log(2.0)


def _require_two_modes(state, op: str) -> None:
    if not isinstance(state, MultiModeKet) or state.modes != 2:
        raise ValueError(f"{op} expects a two-mode ket")
