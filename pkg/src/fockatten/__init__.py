"""Truncated Fock-space toolkit for ordinary and zero-photon-heralded attenuation."""

from .states import (
    DEFAULT_CUTOFF,
    DEFAULT_TWOMODE_CUTOFF,
    DensityOperator,
    FockKet,
    MultiModeKet,
    TruncationError,
    coherent,
    embed,
    even_cat,
    fock,
    from_json_dict,
    mean_photon_number,
    overlap,
    smsv,
    tmsv,
    to_json_dict,
)
from .channels import (
    BeamSplitter,
    HeraldError,
    HeraldOutcome,
    apply_bs,
    branch,
    bs_kernel,
    cat_split_coefficient,
    herald_noclick,
    herald_zero,
    inject,
    nu_to_n,
    phase_shift,
    project_photons,
    smsv_split_coefficient,
    trace_out,
)
from .wigner import (
    GaussianFit,
    PhaseSpaceGrid,
    WignerGrid,
    default_grid,
    fit_gaussian,
    negativity_volume,
    oscillator_wavefunction,
    wigner_mixed,
    wigner_pure,
)
from .interferometer import (
    InterferenceCurve,
    MziConfig,
    coincidence_probability,
    mzi_output,
    phase_sweep,
    visibility,
    visibility_vs_efficiency,
)

__version__ = "0.1.0"

__all__ = [
    "BeamSplitter",
    "DEFAULT_CUTOFF",
    "DEFAULT_TWOMODE_CUTOFF",
    "DensityOperator",
    "FockKet",
    "GaussianFit",
    "HeraldError",
    "HeraldOutcome",
    "InterferenceCurve",
    "MultiModeKet",
    "MziConfig",
    "PhaseSpaceGrid",
    "TruncationError",
    "WignerGrid",
    "apply_bs",
    "branch",
    "bs_kernel",
    "cat_split_coefficient",
    "coherent",
    "coincidence_probability",
    "default_grid",
    "embed",
    "even_cat",
    "fit_gaussian",
    "fock",
    "from_json_dict",
    "herald_noclick",
    "herald_zero",
    "inject",
    "mean_photon_number",
    "mzi_output",
    "negativity_volume",
    "nu_to_n",
    "oscillator_wavefunction",
    "overlap",
    "phase_shift",
    "phase_sweep",
    "project_photons",
    "smsv",
    "smsv_split_coefficient",
    "tmsv",
    "to_json_dict",
    "trace_out",
    "visibility",
    "visibility_vs_efficiency",
    "wigner_mixed",
    "wigner_pure",
]
