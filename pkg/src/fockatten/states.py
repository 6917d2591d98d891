"""Truncated photon-number-basis states.

Pure states are stored as complex coefficient arrays indexed by photon
number, one axis per mode, truncated at a finite cutoff.  Constructors
validate that the cutoff actually holds the state: the mass missing
beyond the cutoff and the mass sitting in the top decile of retained
indices must both stay below ``TAIL_TOL``, otherwise the truncation is
judged unsafe and a :class:`TruncationError` is raised.

All state values are immutable after construction; operations return
new objects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

DEFAULT_CUTOFF = 20
DEFAULT_TWOMODE_CUTOFF = 12

#: maximum tolerated probability mass beyond / near the cutoff
TAIL_TOL = 1e-6
#: tolerance for the unit-norm check on states flagged as normalized
NORM_TOL = 1e-9
#: slack allowed above exact unit norm (rounding headroom)
NORM_SLACK = 1e-12


class TruncationError(ValueError):
    """The photon-number cutoff is too small for the requested object."""


def _frozen_array(values, ndim_min=1) -> np.ndarray:
    arr = np.array(values, dtype=complex, order="C")
    if arr.ndim < ndim_min or arr.size == 0:
        raise ValueError("coefficient array must be nonempty with one axis per mode")
    arr.setflags(write=False)
    return arr


def _real_scalar(value, name: str) -> float:
    if isinstance(value, complex) or np.iscomplexobj(value):
        raise ValueError(f"{name} must be real, got complex value {value!r}")
    out = float(value)
    if not math.isfinite(out):
        raise ValueError(f"{name} must be finite, got {out!r}")
    return out


@dataclass(frozen=True, eq=False)
class FockKet:
    """Single-mode pure state; ``coeffs[n]`` multiplies the n-photon basis ket."""

    coeffs: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _frozen_array(self.coeffs))
        if self.coeffs.ndim != 1:
            raise ValueError("FockKet holds exactly one mode")
        _check_norm(self.norm_squared(), self.normalized)

    @property
    def cutoff(self) -> int:
        return self.coeffs.size

    def norm_squared(self) -> float:
        return float(np.vdot(self.coeffs, self.coeffs).real)

    def probabilities(self) -> np.ndarray:
        """Photon-number distribution, renormalized to unit total."""
        p = np.abs(self.coeffs) ** 2
        return p / p.sum()


@dataclass(frozen=True, eq=False)
class MultiModeKet:
    """Pure state of two or more modes; one tensor axis per mode."""

    coeffs: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _frozen_array(self.coeffs, ndim_min=2))
        _check_norm(self.norm_squared(), self.normalized)

    @property
    def modes(self) -> int:
        return self.coeffs.ndim

    @property
    def cutoffs(self) -> tuple:
        return self.coeffs.shape

    def norm_squared(self) -> float:
        return float(np.vdot(self.coeffs, self.coeffs).real)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Mixed state over one or two modes in the joint number basis.

    ``matrix`` is indexed row-major over the joint basis (for two modes,
    index = n_first * dims[1] + n_second).  The trace ("weight") may sit
    below one for unnormalized herald branches.
    """

    matrix: np.ndarray
    dims: tuple

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not 1 <= len(dims) <= 2 or any(d < 1 for d in dims):
            raise ValueError(f"dims must name one or two modes, got {dims}")
        object.__setattr__(self, "dims", dims)
        mat = _frozen_array(self.matrix, ndim_min=2)
        side = int(np.prod(dims))
        if mat.shape != (side, side):
            raise ValueError(f"matrix shape {mat.shape} does not match dims {dims}")
        object.__setattr__(self, "matrix", mat)
        if np.abs(mat - mat.conj().T).max() > 1e-12:
            raise ValueError("density matrix is not Hermitian to 1e-12")
        eigs = np.linalg.eigvalsh(mat)
        if eigs.min() < -1e-10:
            raise ValueError(f"density matrix has negative eigenvalue {eigs.min():.3e}")
        w = self.weight
        if not 0.0 < w <= 1.0 + NORM_SLACK:
            raise ValueError(f"density weight {w} outside (0, 1]")

    @property
    def modes(self) -> int:
        return len(self.dims)

    @property
    def weight(self) -> float:
        return float(np.trace(self.matrix).real)

    def diagonal_probabilities(self) -> np.ndarray:
        """Joint photon-number distribution, renormalized by the weight."""
        return np.diag(self.matrix).real / self.weight


def _check_norm(norm_sq: float, normalized: bool) -> None:
    if norm_sq > 1.0 + NORM_SLACK:
        raise ValueError(f"squared norm {norm_sq} exceeds one")
    if normalized and abs(norm_sq - 1.0) >= NORM_TOL:
        raise ValueError(f"state flagged normalized but squared norm is {norm_sq}")


def _tail_report(amplitudes: np.ndarray) -> tuple:
    """(missing mass beyond cutoff, mass in the top decile of indices)."""
    p = np.abs(np.asarray(amplitudes)) ** 2
    missing = max(0.0, 1.0 - float(p.sum()))
    n_tail = max(1, math.ceil(0.1 * p.shape[-1]))
    tail = float(p[..., -n_tail:].sum())
    return missing, tail


def _checked_ket(amps: np.ndarray, what: str) -> FockKet:
    missing, tail = _tail_report(amps)
    if missing > TAIL_TOL or tail > TAIL_TOL:
        raise TruncationError(
            f"cutoff {amps.size} too small for {what}: "
            f"missing mass {missing:.3e}, top-decile mass {tail:.3e} (limit {TAIL_TOL:.0e})"
        )
    return FockKet(amps / math.sqrt(float(np.vdot(amps, amps).real)))


def coherent(alpha, cutoff: int = DEFAULT_CUTOFF) -> FockKet:
    """Coherent state with real amplitude: c_n = e^{-alpha^2/2} alpha^n / sqrt(n!).

    Coefficients are assembled in log space so large photon numbers never
    overflow the factorial.  The cutoff must hold all but 1e-6 of the
    Poisson photon-number distribution (mean alpha^2).
    """
    alpha = _real_scalar(alpha, "alpha")
    if cutoff < 1:
        raise ValueError("cutoff must be at least 1")
    n = np.arange(cutoff)
    if alpha == 0.0:
        amps = np.zeros(cutoff, dtype=complex)
        amps[0] = 1.0
        return FockKet(amps)
    log_mag = -0.5 * alpha**2 + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    amps = np.sign(alpha) ** n * np.exp(log_mag) + 0j
    return _checked_ket(amps, f"coherent(alpha={alpha})")


def _log_cosh(y: float) -> float:
    # stable for large y: cosh y = e^{|y|}(1 + e^{-2|y|})/2
    y = abs(y)
    return y + math.log1p(math.exp(-2.0 * y)) - math.log(2.0)


def even_cat(alpha, cutoff: int = DEFAULT_CUTOFF) -> FockKet:
    """Even superposition of +/- alpha coherent states.

    In the number basis only even occupations survive:
    c_{2k} = alpha^{2k} / (sqrt((2k)!) sqrt(cosh alpha^2)).
    """
    alpha = _real_scalar(alpha, "alpha")
    if cutoff < 1:
        raise ValueError("cutoff must be at least 1")
    amps = np.zeros(cutoff, dtype=complex)
    if alpha == 0.0:
        amps[0] = 1.0
        return FockKet(amps)
    even = np.arange(0, cutoff, 2)
    log_mag = even * math.log(abs(alpha)) - 0.5 * gammaln(even + 1) - 0.5 * _log_cosh(alpha**2)
    amps[even] = np.exp(log_mag)
    return _checked_ket(amps, f"even_cat(alpha={alpha})")


def smsv(xi, cutoff: int = DEFAULT_CUTOFF) -> FockKet:
    """Squeezed vacuum: c_{2n} = sqrt(C(2n,n)) (-tanh(xi)/2)^n / sqrt(cosh xi).

    Positive xi squeezes the x quadrature; only even photon numbers are
    populated and successive even amplitudes alternate in sign.
    """
    xi = _real_scalar(xi, "xi")
    if cutoff < 2:
        raise ValueError("smsv needs cutoff >= 2")
    amps = np.zeros(cutoff, dtype=complex)
    if xi == 0.0:
        amps[0] = 1.0
        return FockKet(amps)
    k = np.arange(0, cutoff, 2) // 2
    th = math.tanh(xi)
    log_mag = (
        0.5 * (gammaln(2 * k + 1) - 2.0 * gammaln(k + 1))
        + k * math.log(abs(th) / 2.0)
        - 0.5 * _log_cosh(xi)
    )
    sign = np.where(th > 0, (-1.0) ** k, 1.0)
    amps[2 * k] = sign * np.exp(log_mag)
    return _checked_ket(amps, f"smsv(xi={xi})")


def tmsv(xi, cutoff: int = DEFAULT_TWOMODE_CUTOFF) -> MultiModeKet:
    """Two-mode squeezed vacuum: coeffs[n, n] = (-tanh xi)^n / cosh xi."""
    xi = _real_scalar(xi, "xi")
    if cutoff < 2:
        raise ValueError("tmsv needs cutoff >= 2")
    th = math.tanh(xi)
    n = np.arange(cutoff)
    diag = (-th) ** n / math.cosh(xi)
    missing = th ** (2 * cutoff)  # geometric remainder of the exact distribution
    if missing > TAIL_TOL:
        raise TruncationError(
            f"cutoff {cutoff} too small for tmsv(xi={xi}): missing mass {missing:.3e}"
        )
    p_mode = diag**2
    n_tail = max(1, math.ceil(0.1 * cutoff))
    tail = float(p_mode[-n_tail:].sum())
    if tail > TAIL_TOL:
        raise TruncationError(
            f"cutoff {cutoff} too small for tmsv(xi={xi}): top-decile mass {tail:.3e}"
        )
    coeffs = np.zeros((cutoff, cutoff), dtype=complex)
    coeffs[n, n] = diag / math.sqrt(float(p_mode.sum()))
    return MultiModeKet(coeffs)


def fock(n: int, cutoff: int) -> FockKet:
    """Number state |n> in a basis truncated at ``cutoff``."""
    if not 0 <= n < cutoff:
        raise ValueError(f"need 0 <= n < cutoff, got n={n}, cutoff={cutoff}")
    amps = np.zeros(cutoff, dtype=complex)
    amps[n] = 1.0
    return FockKet(amps)


def embed(state, cutoffs) -> FockKet | MultiModeKet:
    """Zero-pad a ket into a basis with larger per-mode cutoffs."""
    if isinstance(state, FockKet):
        shape = (int(cutoffs),) if np.isscalar(cutoffs) else (int(cutoffs[0]),)
        if shape[0] < state.cutoff:
            raise ValueError("embed cannot shrink the cutoff")
        out = np.zeros(shape, dtype=complex)
        out[: state.cutoff] = state.coeffs
        return FockKet(out, normalized=state.normalized)
    shape = tuple(int(c) for c in cutoffs)
    if len(shape) != state.modes or any(a < b for a, b in zip(shape, state.cutoffs)):
        raise ValueError(f"cannot embed shape {state.cutoffs} into {shape}")
    out = np.zeros(shape, dtype=complex)
    out[tuple(slice(0, c) for c in state.cutoffs)] = state.coeffs
    return MultiModeKet(out, normalized=state.normalized)


def overlap(a, b) -> complex:
    """Inner product <a|b> of two kets over the same basis."""
    for s in (a, b):
        if not isinstance(s, (FockKet, MultiModeKet)):
            raise ValueError(f"overlap expects kets, got {type(s).__name__}")
    if a.coeffs.shape != b.coeffs.shape:
        raise ValueError(f"basis mismatch: {a.coeffs.shape} vs {b.coeffs.shape}")
    return complex(np.vdot(a.coeffs, b.coeffs))


def mean_photon_number(state) -> float:
    """Mean total photon number of a ket or density operator."""
    if isinstance(state, FockKet):
        return float(np.arange(state.cutoff) @ state.probabilities())
    if isinstance(state, MultiModeKet):
        p = np.abs(state.coeffs) ** 2
        p = p / p.sum()
        total = np.zeros(state.cutoffs)
        for axis, dim in enumerate(state.cutoffs):
            shape = [1] * state.modes
            shape[axis] = dim
            total = total + np.arange(dim).reshape(shape)
        return float((total * p).sum())
    if isinstance(state, DensityOperator):
        p = state.diagonal_probabilities()
        if state.modes == 1:
            n_tot = np.arange(state.dims[0])
        else:
            n_tot = np.add.outer(np.arange(state.dims[0]), np.arange(state.dims[1])).ravel()
        return float(n_tot @ p)
    raise ValueError(f"unsupported state type {type(state).__name__}")


def to_json_dict(state) -> dict:
    """Wire format: row-major [re, im] coefficient pairs plus basis shape."""
    if isinstance(state, FockKet):
        modes, cutoffs = 1, [state.cutoff]
    elif isinstance(state, MultiModeKet):
        modes, cutoffs = state.modes, list(state.cutoffs)
    else:
        raise ValueError("only kets serialize to the state JSON format")
    flat = state.coeffs.ravel(order="C")
    return {
        "modes": modes,
        "cutoffs": cutoffs,
        "coeffs": [[float(c.real), float(c.imag)] for c in flat],
        "normalized": bool(state.normalized),
    }


def from_json_dict(doc: dict) -> FockKet | MultiModeKet:
    """Inverse of :func:`to_json_dict`."""
    required = {"modes", "cutoffs", "coeffs", "normalized"}
    missing = required - set(doc)
    if missing:
        raise ValueError(f"state document missing keys {sorted(missing)}")
    modes = int(doc["modes"])
    cutoffs = tuple(int(c) for c in doc["cutoffs"])
    if modes != len(cutoffs) or modes < 1:
        raise ValueError(f"modes {modes} inconsistent with cutoffs {cutoffs}")
    pairs = np.asarray(doc["coeffs"], dtype=float)
    if pairs.shape != (int(np.prod(cutoffs)), 2):
        raise ValueError(f"expected {int(np.prod(cutoffs))} [re, im] pairs, got {pairs.shape}")
    flat = pairs[:, 0] + 1j * pairs[:, 1]
    coeffs = flat.reshape(cutoffs, order="C")
    if modes == 1:
        return FockKet(coeffs, normalized=bool(doc["normalized"]))
    return MultiModeKet(coeffs, normalized=bool(doc["normalized"]))
