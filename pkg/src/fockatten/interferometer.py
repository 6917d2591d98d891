"""Mach-Zehnder interferometer fed by two-mode squeezed vacuum.

Pipeline: the source enters a balanced splitter, each arm passes an
attenuator that couples amplitude kappa into the kept path and
sqrt(1 - kappa^2) into a vacuum ancilla, the ancillas are resolved
(traced, heralded on zero photons, or weighted by a no-click POVM of
efficiency eta), one arm picks up a phase, and a second balanced
splitter recombines the arms.  The observable is the coincidence
probability <1,1|rho|1,1> at the two outputs.

Each ancilla is resolved immediately after its attenuator, so the
working set is a list of weighted two-mode branches rather than a
four-mode tensor.  The register is padded to 2*cutoff - 1 levels per
mode up front, which keeps every splitter exactly unitary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .channels import (
    BeamSplitter,
    HeraldError,
    HeraldOutcome,
    MIN_HERALD_PROBABILITY,
    bs_kernel,
)
from .states import DensityOperator, embed, tmsv

MODES = ("ordinary", "heralded", "efficiency")

DEFAULT_PHI_SAMPLES = 64
DEFAULT_MZI_CUTOFF = 10


@dataclass(frozen=True)
class MziConfig:
    """Interferometer settings; hashable so resolved branches can be cached."""

    xi: float
    arm_keep: float
    mode: str
    eta: float | None = None
    phi_samples: int = DEFAULT_PHI_SAMPLES
    cutoff: int = DEFAULT_MZI_CUTOFF

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not 0.0 <= float(self.arm_keep) <= 1.0:
            raise ValueError(f"arm_keep {self.arm_keep} outside [0, 1]")
        if self.mode == "efficiency":
            if self.eta is None:
                raise ValueError("efficiency mode needs eta")
            if not 0.0 <= float(self.eta) <= 1.0:
                raise ValueError(f"eta {self.eta} outside [0, 1]")
        elif self.eta is not None:
            raise ValueError(f"eta is only meaningful in efficiency mode, not {self.mode!r}")
        if int(self.phi_samples) < 8:
            raise ValueError("phi_samples must be at least 8")
        if int(self.cutoff) < 2:
            raise ValueError("cutoff must be at least 2")


@dataclass(frozen=True, eq=False)
class InterferenceCurve:
    """Coincidence probability sampled over one phase period."""

    phi: np.ndarray
    probability: np.ndarray

    def __post_init__(self):
        phi = np.array(self.phi, dtype=float)
        prob = np.array(self.probability, dtype=float)
        if phi.ndim != 1 or phi.shape != prob.shape:
            raise ValueError("phi and probability must be matching 1-d arrays")
        if prob.size and (prob.min() < -1e-12 or prob.max() > 1.0 + 1e-12):
            raise ValueError("probabilities must lie in [0, 1]")
        prob = np.clip(prob, 0.0, 1.0)
        phi.setflags(write=False)
        prob.setflags(write=False)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "probability", prob)


def _branch_weight(config: MziConfig, n_aux: int) -> float:
    if config.mode == "ordinary":
        return 1.0
    if config.mode == "heralded":
        return 1.0 if n_aux == 0 else 0.0
    return (1.0 - float(config.eta)) ** n_aux


@lru_cache(maxsize=8)
def _resolved_branches(config: MziConfig) -> tuple:
    """Weights and two-mode branch stack after both ancillas are resolved.

    Returns (weights, branches) with branches[k] the unnormalized
    two-mode coefficients of branch k just before the phase shift.
    """
    n_src = int(config.cutoff)
    dim = 2 * n_src - 1  # holds all of the source's total photon number in one mode
    source = embed(tmsv(config.xi, n_src), (dim, dim))
    state = _apply_kernel(source.coeffs, 0, 1, dim, BeamSplitter.balanced())
    attenuator = BeamSplitter.from_keep(float(config.arm_keep))
    branches = [(1.0, state)]
    for arm in (0, 1):
        resolved = []
        for weight, coeffs in branches:
            with_aux = np.zeros(coeffs.shape + (dim,), dtype=complex)
            with_aux[..., 0] = coeffs
            mixed = _apply_kernel(with_aux, arm, 2, dim, attenuator)
            for n_aux in range(dim):
                w = _branch_weight(config, n_aux)
                if w == 0.0:
                    continue
                cut = mixed[..., n_aux]
                if not cut.any():
                    continue
                resolved.append((weight * w, cut))
        branches = resolved
    weights = np.array([w for w, _ in branches])
    stack = np.stack([c for _, c in branches])
    weights.setflags(write=False)
    stack.setflags(write=False)
    return weights, stack


def _apply_kernel(coeffs: np.ndarray, mode_i: int, mode_j: int, dim: int, bs: BeamSplitter):
    """Mix two equal-cutoff modes of a bare coefficient tensor."""
    work = np.moveaxis(coeffs, (mode_i, mode_j), (0, 1))
    mixed = bs_kernel(dim, dim, bs) @ work.reshape(dim * dim, -1)
    return np.moveaxis(mixed.reshape(work.shape), (0, 1), (mode_i, mode_j))


def mzi_output(config: MziConfig, phi: float) -> HeraldOutcome:
    """Two-mode output state at phase phi, with the herald probability.

    In heralded mode the probability is that of both ancillas showing
    zero photons; in ordinary mode it is one.
    """
    weights, stack = _resolved_branches(config)
    dim = stack.shape[-1]
    phases = np.exp(1j * float(phi) * np.arange(dim))
    shifted = stack * phases[None, None, :]
    recombined = shifted.reshape(-1, dim * dim) @ bs_kernel(dim, dim, BeamSplitter.balanced()).T
    rho = (recombined.T * weights) @ recombined.conj()
    total = float(np.trace(rho).real)
    if total < MIN_HERALD_PROBABILITY:
        raise HeraldError(f"interferometer herald has probability {total:.3e}")
    state = DensityOperator(rho / total, (dim, dim))
    return HeraldOutcome(state, total)


def coincidence_probability(rho: DensityOperator) -> float:
    """Probability of exactly one photon in each output, <1,1|rho|1,1>."""
    if not isinstance(rho, DensityOperator) or rho.modes != 2:
        raise ValueError("coincidence_probability expects a two-mode density operator")
    d0, d1 = rho.dims
    if d0 < 2 or d1 < 2:
        raise ValueError("mode cutoffs too small to hold one photon each")
    idx = 1 * d1 + 1
    return float(rho.matrix[idx, idx].real)


def phase_sweep(config: MziConfig) -> InterferenceCurve:
    """Coincidence probability at phi_samples phases uniform on [0, 2 pi)."""
    samples = int(config.phi_samples)
    phis = 2.0 * math.pi * np.arange(samples) / samples
    probs = [coincidence_probability(mzi_output(config, phi).state) for phi in phis]
    return InterferenceCurve(phis, np.array(probs))


def visibility(curve: InterferenceCurve) -> float:
    """Interference visibility (max - min) / (max + min) of a sampled curve."""
    if curve.probability.size == 0:
        raise ValueError("cannot take visibility of an empty curve")
    hi = float(curve.probability.max())
    lo = float(curve.probability.min())
    if hi == 0.0:
        return 0.0
    return (hi - lo) / (hi + lo)


def visibility_vs_efficiency(config: MziConfig, etas) -> list:
    """Visibility for each detector efficiency, as (eta, visibility) rows."""
    rows = []
    for eta in etas:
        eta = float(eta)
        if not 0.0 <= eta <= 1.0:
            raise ValueError(f"eta {eta} outside [0, 1]")
        run = replace(config, mode="efficiency", eta=eta)
        rows.append((eta, visibility(phase_sweep(run))))
    return rows


def curve_csv(curve: InterferenceCurve) -> str:
    lines = ["phi,p_coincidence"]
    for phi, prob in zip(curve.phi, curve.probability):
        lines.append(f"{phi:.12e},{prob:.12e}")
    return "\n".join(lines) + "\n"


def efficiency_csv(rows) -> str:
    lines = ["eta,visibility"]
    for eta, vis in rows:
        lines.append(f"{eta:.12e},{vis:.12e}")
    return "\n".join(lines) + "\n"
