import math

import numpy as np
import pytest

from fockatten.channels import BeamSplitter, herald_zero, inject, trace_out
from fockatten.states import DensityOperator, FockKet, coherent, even_cat, fock, smsv
from fockatten.wigner import (
    GaussianFit,
    PhaseSpaceGrid,
    WignerGrid,
    default_grid,
    fit_gaussian,
    fit_json_dict,
    negativity_volume,
    oscillator_wavefunction,
    wigner_csv,
    wigner_mixed,
    wigner_pure,
)

from oracles import wigner_quadrature


def test_grid_validation():
    g = default_grid()
    assert g.x[0] == -5.0 and g.x[-1] == 5.0 and g.x.size == 201
    assert abs(g.dx - 0.05) < 1e-12
    with pytest.raises(ValueError):
        PhaseSpaceGrid(np.array([0.0, 1.0, 0.5]), np.linspace(0, 1, 3))  # not ascending
    with pytest.raises(ValueError):
        PhaseSpaceGrid(np.array([0.0, 0.1, 0.5]), np.linspace(0, 1, 3))  # not uniform
    with pytest.raises(ValueError):
        PhaseSpaceGrid(np.array([0.0, 1.0]), np.array([0.0, 1.0]))  # too few points


def test_oscillator_wavefunctions_are_orthonormal():
    x = np.linspace(-12, 12, 4801)
    f = [oscillator_wavefunction(n, x) for n in range(6)]
    for m in range(6):
        for n in range(6):
            ip = np.trapezoid(f[m] * f[n], x)
            assert abs(ip - (1.0 if m == n else 0.0)) < 1e-9


def test_vacuum_wigner_is_gaussian():
    g = default_grid()
    w = wigner_pure(fock(0, 5), g)
    xx, pp = np.meshgrid(g.x, g.p, indexing="ij")
    expect = np.exp(-(xx**2) - pp**2) / math.pi
    assert np.abs(w.values - expect).max() < 1e-12
    assert abs(w.integrate() - 1.0) < 1e-6


def test_single_photon_origin_value():
    w = wigner_pure(fock(1, 5), default_grid())
    assert abs(w.values[100, 100] - (-1.0 / math.pi)) < 1e-12


def test_closed_form_matches_quadrature_on_random_states():
    rng = np.random.default_rng(7)
    pts = [(-1.3, 0.4), (0.0, 0.0), (0.9, -1.7), (2.0, 1.1)]
    for _ in range(20):
        c = rng.normal(size=12) + 1j * rng.normal(size=12)
        c /= np.linalg.norm(c)
        ket = FockKet(c)
        g = PhaseSpaceGrid(np.linspace(-2, 2, 5), np.linspace(-2, 2, 5))
        w = wigner_pure(ket, g)
        for x, p in pts:
            ref = wigner_quadrature(c, x, p)
            gi = PhaseSpaceGrid(np.array([x - 0.1, x, x + 0.1]), np.array([p - 0.1, p, p + 0.1]))
            wi = wigner_pure(ket, gi)
            assert abs(wi.values[1, 1] - ref.real) < 1e-6
            assert abs(ref.imag) < 1e-8
        assert w.values.dtype == float


def test_parity_identity_at_origin():
    # W(0,0) = (1/pi) * sum_n (-1)^n p_n for any state
    rng = np.random.default_rng(21)
    mid = np.array([-0.05, 0.0, 0.05])
    for _ in range(10):
        c = rng.normal(size=10) + 1j * rng.normal(size=10)
        c /= np.linalg.norm(c)
        w = wigner_pure(FockKet(c), PhaseSpaceGrid(mid, mid.copy()))
        parity = ((-1.0) ** np.arange(10) * np.abs(c) ** 2).sum()
        assert abs(w.values[1, 1] - parity / math.pi) < 1e-12


def test_normalization_of_reference_states():
    # a window holding the state to ~4.5 sigma; the alpha=2 states reach x=2.83
    axis = np.linspace(-6.0, 6.0, 241)
    g = PhaseSpaceGrid(axis, axis.copy())
    for ket in (even_cat(2.0, 20), smsv(math.log(math.sqrt(3.0)), 20), coherent(2.0, 20)):
        assert abs(wigner_pure(ket, g).integrate() - 1.0) < 1e-3


def test_mixed_wigner_is_linear_and_matches_density():
    two = inject(even_cat(2.0, 20), BeamSplitter.from_keep(math.sqrt(0.5)))
    rho = trace_out(two, 1)
    g = default_grid()
    w_rho = wigner_mixed(rho, g)
    # sum the pure-branch Wigner functions weighted by branch probability
    from fockatten.channels import branch

    acc = np.zeros_like(w_rho.values)
    for nb in range(20):
        b = branch(two, nb)
        p = b.norm_squared()
        if p == 0.0:
            continue
        ket = FockKet(b.coeffs / math.sqrt(p))
        acc = acc + p * wigner_pure(ket, g).values
    assert np.abs(w_rho.values - acc).max() < 1e-12
    assert abs(w_rho.integrate() - 1.0) < 1e-3


def test_mixed_wigner_accepts_branch_list():
    two = inject(smsv(0.5, 20), BeamSplitter.balanced())
    rho = trace_out(two, 1)
    g = default_grid()
    from fockatten.channels import branch

    # unnormalized branch kets carry their weight in the squared norm
    branches = [branch(two, nb) for nb in range(20) if branch(two, nb).norm_squared() > 0]
    w_list = wigner_mixed(branches, g)
    w_rho = wigner_mixed(rho, g)
    assert np.abs(w_list.values - w_rho.values).max() < 1e-10


def test_wigner_symmetry_of_even_states():
    g = default_grid()
    for ket in (even_cat(2.0, 20), smsv(0.5, 20)):
        w = wigner_pure(ket, g).values
        assert np.abs(w - w[::-1, :]).max() < 1e-12  # x -> -x
        assert np.abs(w - w[:, ::-1]).max() < 1e-12  # p -> -p


def test_fit_recovers_known_gaussians():
    # build exact squeezed-vacuum Wigner surfaces and invert them
    rng = np.random.default_rng(31)
    g = default_grid()
    xx, pp = np.meshgrid(g.x, g.p, indexing="ij")
    for _ in range(20):
        s = math.exp(rng.uniform(-1.0, 1.0))
        sigma = rng.uniform(0.65, 0.85)
        if sigma * max(math.sqrt(s), 1.0 / math.sqrt(s)) > 1.25:
            continue  # keep the surface well inside the grid
        A = 1.0 / (2.0 * math.pi * sigma**2)
        vals = A * np.exp(-(xx**2) * s / (2 * sigma**2) - pp**2 / (2 * sigma**2 * s))
        fit = fit_gaussian(WignerGrid(g, vals))
        assert abs(fit.s - s) < 2e-3 * s
        assert abs(fit.sigma - sigma) < 1e-3
        assert abs(fit.A - A) < 1e-2 * A


def test_fit_on_reference_squeezed_states():
    g = default_grid()
    fit = fit_gaussian(wigner_pure(smsv(math.log(math.sqrt(3.0)), 20), g))
    assert abs(fit.s - 3.0) < 0.02
    assert abs(fit.sigma - math.sqrt(0.5)) < 0.005


def test_fit_rejects_off_center_surface():
    g = default_grid()
    xx, pp = np.meshgrid(g.x, g.p, indexing="ij")
    vals = np.exp(-((xx - 1.0) ** 2) - pp**2) / math.pi
    with pytest.raises(ValueError):
        fit_gaussian(WignerGrid(g, vals))


def test_negativity_values():
    g = default_grid()
    assert negativity_volume(wigner_pure(fock(0, 5), g)) == 0.0
    # |1>: integral of |W| minus one is 2 e^{-1/2} - 1
    neg = negativity_volume(wigner_pure(fock(1, 8), g))
    expect = 2.0 * math.exp(-0.5) - 1.0
    assert abs(neg - expect) < 1e-3


def test_heralded_cat_grids_match_exact_cat():
    bs = BeamSplitter.from_keep(math.sqrt(0.5))
    out = herald_zero(inject(even_cat(2.0, 20), bs))
    g = default_grid()
    w_h = wigner_pure(out.state, g)
    w_ref = wigner_pure(even_cat(math.sqrt(2.0), 20), g)
    assert np.abs(w_h.values - w_ref.values).max() < 1e-6


def test_csv_and_json_formats():
    g = PhaseSpaceGrid(np.linspace(-1, 1, 3), np.linspace(-1, 1, 3))
    w = wigner_pure(fock(0, 4), g)
    text = wigner_csv(w)
    lines = text.strip().split("\n")
    assert lines[0] == "x,p,w"
    assert len(lines) == 1 + 9
    first = lines[1].split(",")
    assert float(first[0]) == -1.0 and float(first[1]) == -1.0
    assert abs(float(first[2]) - w.values[0, 0]) < 1e-12  # %.12e round-trip

    doc = fit_json_dict(GaussianFit(A=0.5, s=2.0, sigma=0.7))
    assert doc == {"A": 0.5, "s": 2.0, "sigma": 0.7}
