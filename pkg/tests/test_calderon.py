import csv

import numpy as np
import pytest

from varbesov.calderon import (
    build_continuous_pair,
    build_dyadic,
    build_local_means,
    build_mu_eta_pair,
    export_radial_table,
    max_dyadic_level,
    reproducing_residual,
)
from varbesov.grid import GridFunction, GridSpec, ScaleGrid, fourier, inverse_fourier, norm_l2


# --- continuous pair -----------------------------------------------------------


def test_low_pass_at_origin(pair):
    assert pair.phi0_hat(np.array([0.0]))[0] == 1.0


def test_phi_vanishes_off_annulus(pair):
    vals = pair.phi_hat(np.array([0.4, 2.1]))
    assert np.all(vals == 0.0)


def test_support_containment(pair):
    r = np.linspace(0.0, 8.0, 4001)
    phi = pair.phi_hat(r)
    assert np.abs(phi[(r < 0.5) | (r > 2.0)]).max() < 1e-12
    low = pair.phi0_hat(r)
    assert np.abs(low[r > 2.0]).max() < 1e-12


@pytest.mark.parametrize("profile", ["mollifier", "gauss", "mu-eta"])
def test_reproducing_residual_all_profiles(spec, scales, profile):
    p = build_continuous_pair(spec, scales, profile=profile)
    res = reproducing_residual(p, spec.xi_radius().ravel(), check_K=64)
    assert res < 1e-6


def test_mu_eta_alias(spec, scales):
    p = build_mu_eta_pair(spec, scales)
    assert p.label == "mu-eta"


def test_construction_rejects_unresolvable():
    spec = GridSpec(1, 64, 16.0)  # xi_max ~ 6.3
    with pytest.raises(ValueError, match="resolves only"):
        build_continuous_pair(spec, ScaleGrid(4, 4))


def test_coarse_construction_rejected(spec, scales):
    # 8 scales per octave cannot reach the 1e-6 identity residual
    with pytest.raises(ValueError, match="residual"):
        build_continuous_pair(spec, scales, construction_K=8)


@pytest.mark.parametrize("profile", ["mollifier", "gauss", "mu-eta"])
def test_calderon_reconstruction(spec, profile):
    """Low-pass plus dt/t aggregate of the band parts rebuilds f.

    Verified on the construction-matched scale grid (the construction and
    check quadratures join seamlessly at t = 1 there); band-limited corpus
    member with spectrum inside the resolvable ball.
    """
    s64 = ScaleGrid(64, 5)
    p = build_continuous_pair(spec, s64, profile=profile)
    (x,) = spec.coords()
    f = GridFunction(spec, np.exp(-(x**2) / 2.0) * np.exp(1j * 5.0 * x))
    fhat = fourier(f).values
    rr = spec.xi_radius()
    acc = fhat * p.phi0_hat(rr)
    for t, w in zip(s64.t, s64.weights):
        acc = acc + w * fhat * p.phi_hat(t * rr)
    rec = inverse_fourier(GridFunction(spec, acc))
    assert norm_l2(rec - f) / norm_l2(f) < 1e-4


# --- dyadic family --------------------------------------------------------------


def test_dyadic_partition_residual(spec, dyadic):
    assert dyadic.partition_residual(spec.xi_radius().ravel()) < 1e-10


def test_dyadic_telescoping_exact(dyadic):
    r = np.linspace(0.0, 32.0, 2001)
    acc = sum(dyadic.psi_hat(v)(r) for v in range(dyadic.v_max + 1))
    expect = dyadic.psi0_hat(r * 2.0**-dyadic.v_max)
    assert np.abs(acc - expect).max() < 1e-12


def test_dyadic_block_supports(dyadic):
    for v in range(1, dyadic.v_max + 1):
        r = np.concatenate([np.linspace(0, 2.0 ** (v - 1), 200, endpoint=False),
                            np.linspace(2.0 ** (v + 1), 2.0 ** (v + 2), 200)])
        assert np.abs(dyadic.psi_hat(v)(r)).max() == 0.0


def test_dyadic_rejects_oversized_level(spec):
    with pytest.raises(ValueError, match="top annulus"):
        build_dyadic(spec, 7)
    assert max_dyadic_level(spec) == 5


def test_dyadic_reconstruction(spec, dyadic):
    (x,) = spec.coords()
    f = GridFunction(spec, np.exp(-(x**2) / 2.0) * np.exp(1j * 7.0 * x))
    fhat = fourier(f).values
    rr = spec.xi_radius()
    acc = np.zeros_like(fhat)
    for v in range(dyadic.v_max + 1):
        acc = acc + fhat * dyadic.psi_hat(v)(rr)
    rec = inverse_fourier(GridFunction(spec, acc))
    assert norm_l2(rec - f) / norm_l2(f) < 1e-8


# --- local means -----------------------------------------------------------------


def test_local_means_values(local_means):
    assert local_means.k_hat(np.array([1.0]))[0] == pytest.approx(1.0)
    assert local_means.k0_hat(np.array([0.0]))[0] == pytest.approx(1.0)


def test_local_means_tauberian(local_means):
    m0, m1 = local_means.tauberian_margins()
    assert m0 > 0 and m1 > 0


@pytest.mark.parametrize("S", [-1, 0, 1, 3])
def test_local_means_moment_slope(spec, S):
    k = build_local_means(S, 1.0, spec)
    assert k.moment_slope() >= S + 1 - 0.1


def test_local_means_rejects_bad_inputs(spec):
    with pytest.raises(ValueError, match="S must be >= -1"):
        build_local_means(-2, 1.0, spec)
    with pytest.raises(ValueError, match="eps"):
        build_local_means(3, 0.0, spec)


# --- export ----------------------------------------------------------------------


def test_radial_table_export(tmp_path, pair):
    path = tmp_path / "phi.csv"
    export_radial_table(pair.phi_hat, path, rmax=2.5, npoints=512)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["r", "value"]
    assert len(rows) == 513
    r = np.array([float(x[0]) for x in rows[1:]])
    v = np.array([float(x[1]) for x in rows[1:]])
    assert np.abs(v - pair.phi_hat(r)).max() < 1e-15
