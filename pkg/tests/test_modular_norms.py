import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from varbesov.exponent import ExponentField
from varbesov.grid import GridFunction, GridSpec, ScaleGrid
from varbesov.modular_norms import (
    luxemburg_norm,
    mixed_norm_continuous,
    mixed_norm_discrete,
    modular_lp,
    power_quotient_norm,
)


def classical_lp(f, p):
    return float((f.spec.cell_volume * np.sum(np.abs(f.values) ** p)) ** (1.0 / p))


@pytest.fixture(scope="module")
def small_spec():
    return GridSpec(1, 256, 16.0)


@pytest.fixture(scope="module")
def noisy(small_spec):
    rng = np.random.default_rng(11)
    (x,) = small_spec.coords()
    vals = (rng.standard_normal(256) + 1j * rng.standard_normal(256)) * np.exp(-(x**2) / 18.0)
    return GridFunction(small_spec, 3.0 * vals)


# --- modular -----------------------------------------------------------------


def test_modular_zero(small_spec):
    p = ExponentField.from_constant(small_spec, 2.0)
    assert modular_lp(GridFunction.zeros(small_spec), p) == 0.0


def test_modular_constant_p_is_lp_power(small_spec, noisy):
    p = ExponentField.from_constant(small_spec, 2.0)
    assert modular_lp(noisy, p) == pytest.approx(classical_lp(noisy, 2.0) ** 2, rel=1e-12)


def test_modular_piecewise_direct_sum(small_spec):
    # p = 1 on the left half, 2 on the right half, f constant c:
    # modular = c * |left| + c^2 * |right|
    (x,) = small_spec.coords()
    p = ExponentField(small_spec, np.where(x < 0, 1.0, 2.0))
    c = 0.7
    f = GridFunction(small_spec, np.full(small_spec.shape, c))
    area = 2.0 * small_spec.L / 2.0
    expect = c * area + c**2 * area
    assert modular_lp(f, p) == pytest.approx(expect, rel=1e-12)


def test_modular_propagates_infinity(small_spec):
    (x,) = small_spec.coords()
    p = ExponentField(small_spec, np.where(x < 0, 2.0, math.inf))
    f = GridFunction(small_spec, np.full(small_spec.shape, 1.5))
    assert modular_lp(f, p) == math.inf
    g = GridFunction(small_spec, np.full(small_spec.shape, 0.9))
    assert math.isfinite(modular_lp(g, p))


# --- Luxemburg norm ------------------------------------------------------------


def test_luxemburg_zero(small_spec):
    p = ExponentField.from_constant(small_spec, 2.0)
    assert luxemburg_norm(GridFunction.zeros(small_spec), p) == 0.0


def test_luxemburg_classical_reduction(small_spec, noisy):
    for pv in (1.0, 2.0, 3.5):
        p = ExponentField.from_constant(small_spec, pv)
        got = luxemburg_norm(noisy, p)
        assert got == pytest.approx(classical_lp(noisy, pv), rel=1e-6)


def test_luxemburg_unit_ball(small_spec, noisy):
    p = ExponentField.from_callable(
        small_spec, lambda x: 2.0 + 0.5 * np.sin(np.pi * x / 16.0))
    lam = luxemburg_norm(noisy, p)
    mod = modular_lp(GridFunction(small_spec, noisy.values / lam), p)
    assert 1.0 - 1e-6 <= mod <= 1.0


@settings(max_examples=20, deadline=None)
@given(st.floats(0.01, 100.0))
def test_luxemburg_homogeneity(c):
    spec = GridSpec(1, 64, 4.0)
    rng = np.random.default_rng(5)
    f = GridFunction(spec, rng.standard_normal(64))
    p = ExponentField.from_callable(spec, lambda x: 1.5 + 0.4 * np.cos(np.pi * x / 4.0))
    assert luxemburg_norm(c * f, p) == pytest.approx(c * luxemburg_norm(f, p), rel=1e-6)


def test_luxemburg_with_infinite_p_region(small_spec):
    """p = inf on part of the grid acts as a sup constraint there."""
    (x,) = small_spec.coords()
    p = ExponentField(small_spec, np.where(x < 0, math.inf, 2.0))
    f = GridFunction(small_spec, np.where(x < 0, 3.0, 0.0))
    # on the inf region the norm is the sup: modular(f/lam) jumps at lam = 3
    assert luxemburg_norm(f, p) == pytest.approx(3.0, rel=1e-6)


# --- mixed norms ----------------------------------------------------------------


def test_mixed_single_term_reduction(small_spec, noisy):
    p = ExponentField.from_constant(small_spec, 2.0)
    got = mixed_norm_discrete([noisy], p, p)
    assert got == pytest.approx(classical_lp(noisy, 2.0), rel=1e-6)


def test_mixed_classical_three_terms(small_spec):
    (x,) = small_spec.coords()
    fam = [GridFunction(small_spec, np.exp(-((x - c) ** 2))) for c in (0.0, 1.0, 2.0)]
    p = ExponentField.from_constant(small_spec, 1.5)
    q = ExponentField.from_constant(small_spec, 3.0)
    got = mixed_norm_discrete(fam, p, q)
    expect = (sum(classical_lp(f, 1.5) ** 3 for f in fam)) ** (1.0 / 3.0)
    assert got == pytest.approx(expect, rel=1e-6)


def test_mixed_zero_and_empty(small_spec):
    p = ExponentField.from_constant(small_spec, 2.0)
    assert mixed_norm_discrete([], p, p) == 0.0
    zeros = [GridFunction.zeros(small_spec) for _ in range(3)]
    assert mixed_norm_discrete(zeros, p, p) == 0.0


def test_mixed_rejects_unbounded_q(small_spec, noisy):
    p = ExponentField.from_constant(small_spec, 2.0)
    qinf = ExponentField.from_constant(small_spec, math.inf)
    with pytest.raises(ValueError, match="q bounded"):
        mixed_norm_discrete([noisy], p, qinf)


def test_mixed_continuous_zero(small_spec):
    s = ScaleGrid(4, 3)
    p = ExponentField.from_constant(small_spec, 2.0)
    fam = [GridFunction.zeros(small_spec) for _ in range(len(s))]
    assert mixed_norm_continuous(fam, p, p, s) == 0.0


def test_mixed_continuous_t_independent_closed_form(small_spec, gaussian_256=None):
    (x,) = small_spec.coords()
    g = GridFunction(small_spec, np.exp(-(x**2) / 2.0))
    s = ScaleGrid(8, 5)
    p = ExponentField.from_constant(small_spec, 2.0)
    got = mixed_norm_continuous([g] * len(s), p, p, s)
    expect = classical_lp(g, 2.0) * float(s.weights.sum()) ** 0.5
    assert got == pytest.approx(expect, rel=1e-8)


def test_mixed_continuous_refinement_stable(small_spec):
    # doubling K changes the result by < 1% for a smooth scale family
    (x,) = small_spec.coords()
    p = ExponentField.from_constant(small_spec, 2.0)
    q = ExponentField.from_callable(small_spec, lambda x: 2.0 + 0.3 * np.sin(np.pi * x / 16.0))
    vals = []
    for K in (8, 16):
        s = ScaleGrid(K, 3)
        fam = [GridFunction(small_spec, t**0.4 * np.exp(-(x**2) / 2.0)) for t in s.t]
        vals.append(mixed_norm_continuous(fam, p, q, s))
    assert abs(vals[1] - vals[0]) / vals[0] < 0.01


def test_mixed_length_mismatch(small_spec, noisy):
    s = ScaleGrid(4, 3)
    p = ExponentField.from_constant(small_spec, 2.0)
    with pytest.raises(ValueError, match="scale grid"):
        mixed_norm_continuous([noisy], p, p, s)


# --- structural properties -------------------------------------------------------


def test_quasi_triangle_p_q_at_least_one(small_spec):
    rng = np.random.default_rng(21)
    p = ExponentField.from_callable(small_spec, lambda x: 1.5 + 0.4 * np.sin(np.pi * x / 16.0))
    q = ExponentField.from_constant(small_spec, 2.0)
    for trial in range(5):
        fam_f = [GridFunction(small_spec, rng.standard_normal(256)) for _ in range(3)]
        fam_g = [GridFunction(small_spec, rng.standard_normal(256)) for _ in range(3)]
        fam_s = [GridFunction(small_spec, a.values + b.values) for a, b in zip(fam_f, fam_g)]
        lhs = mixed_norm_discrete(fam_s, p, q)
        rhs = mixed_norm_discrete(fam_f, p, q) + mixed_norm_discrete(fam_g, p, q)
        assert lhs <= rhs * (1.0 + 1e-6)


def test_r_power_triangle_below_one(small_spec):
    rng = np.random.default_rng(22)
    p = ExponentField.from_constant(small_spec, 0.75)
    q = ExponentField.from_constant(small_spec, 2.0)
    r = 0.75
    for trial in range(5):
        fam_f = [GridFunction(small_spec, rng.standard_normal(256)) for _ in range(2)]
        fam_g = [GridFunction(small_spec, rng.standard_normal(256)) for _ in range(2)]
        fam_s = [GridFunction(small_spec, a.values + b.values) for a, b in zip(fam_f, fam_g)]
        lhs = mixed_norm_discrete(fam_s, p, q) ** r
        rhs = mixed_norm_discrete(fam_f, p, q) ** r + mixed_norm_discrete(fam_g, p, q) ** r
        assert lhs <= rhs * (1.0 + 1e-6)


def test_lattice_monotonicity(small_spec, noisy):
    p = ExponentField.from_callable(small_spec, lambda x: 2.0 + 0.5 * np.cos(np.pi * x / 16.0))
    bigger = GridFunction(small_spec, np.abs(noisy.values) * 1.3)
    smaller = GridFunction(small_spec, np.abs(noisy.values))
    assert luxemburg_norm(smaller, p) <= luxemburg_norm(bigger, p) * (1.0 + 1e-10)
    q = ExponentField.from_constant(small_spec, 2.0)
    fam_small = [smaller, smaller]
    fam_big = [bigger, bigger]
    assert mixed_norm_discrete(fam_small, p, q) <= mixed_norm_discrete(fam_big, p, q) * (1 + 1e-10)


def test_dzw_property_random_corpus(small_spec):
    # whenever the power-quotient norm is >= 1 it dominates ||f||_p^{q-}
    rng = np.random.default_rng(23)
    p = ExponentField.from_callable(small_spec, lambda x: 2.2 + 0.5 * np.cos(np.pi * x / 16.0))
    q = ExponentField.from_callable(small_spec, lambda x: 1.5 + 0.4 * np.sin(np.pi * x / 16.0))
    (x,) = small_spec.coords()
    env = np.exp(-(x**2) / 18.0)
    checked = 0
    for trial in range(20):
        f = GridFunction(small_spec, 2.5 * rng.standard_normal(256) * env)
        rhs = power_quotient_norm(f, p, q)
        if rhs < 1.0:
            continue
        lhs = luxemburg_norm(f, p) ** q.range_min
        assert lhs <= rhs * (1.0 + 1e-8)
        checked += 1
    assert checked >= 10
