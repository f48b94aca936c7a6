"""Frequency-side kernel families: the continuous resolution of unity
{Phi_hat, phi_hat}, the dyadic partition {psi_hat_v}, and local-means
kernels with Tauberian and moment conditions.

All kernels are radial and stored as radial profiles on the multiplier
side: profiles are normalised so that

    Phi_hat(xi) + integral_0^1 phi_hat(t xi) dt/t = 1        (continuous)
    sum_v psi_hat_v(xi) = 1   for |xi| <= 2^v_max            (dyadic)

and applying a kernel to f means multiplying f_hat by the profile (see
`grid.apply_multiplier`).  The continuous pair is built from a smooth
annulus bump a(r) supported in [1/2, 2]: phi_hat = a/c with
c = integral_0^inf a(r)/r dr, which makes the full dt/t integral equal 1
by scale invariance, and Phi_hat(xi) = integral_1^inf phi_hat(t xi) dt/t
accumulated on a dense radial table.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .grid import GridSpec, ScaleGrid

__all__ = [
    "RadialProfile",
    "KernelPair",
    "DyadicFamily",
    "LocalMeansKernels",
    "build_continuous_pair",
    "build_mu_eta_pair",
    "build_dyadic",
    "build_local_means",
    "reproducing_residual",
    "export_radial_table",
]

ANNULUS = (0.5, 2.0)
OUTER_RADIUS = 2.0

_DENSE = 1 << 17  # radial table resolution for the cumulative integral


class RadialProfile:
    """Radial function of |xi| with support metadata; vectorised callable."""

    def __init__(self, fn, support, label=""):
        self._fn = fn
        self.support = support
        self.label = label

    def __call__(self, r):
        return self._fn(np.asarray(r, dtype=float))

    def table(self, rmax: float, npoints: int = 4096):
        r = np.linspace(0.0, rmax, npoints)
        return r, self(r)


def _mollifier(z):
    """exp(1 - 1/(1-z^2)) on |z| < 1, identically 0 outside; peak value 1."""
    z = np.asarray(z, dtype=float)
    out = np.zeros_like(z)
    inside = np.abs(z) < 1.0
    zi = z[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - zi * zi))
    return out


def _smoothstep(z):
    """C-infinity step: 0 for z <= 0, 1 for z >= 1."""
    z = np.asarray(z, dtype=float)
    gz = np.zeros_like(z)
    g1z = np.zeros_like(z)
    pos = z > 0
    gz[pos] = np.exp(-1.0 / z[pos])
    pos1 = (1.0 - z) > 0
    g1z[pos1] = np.exp(-1.0 / (1.0 - z[pos1]))
    return gz / (gz + g1z)


def annulus_bump(kind: str = "mollifier", **params) -> RadialProfile:
    """Smooth bump a(r) supported in [1/2, 2], parametrised in s = log2(r).

    kinds:
      mollifier -- exp-of-reciprocal bump over the full annulus
      gauss     -- Gaussian in s, truncated where it falls below ~1e-15
      mu-eta    -- product of a Gaussian ring (positive on the annulus) and
                   a mollifier strictly inside it, mirroring the two-kernel
                   construction of the reproducing pair
    """
    if kind == "mollifier":
        def fn(r):
            with np.errstate(divide="ignore"):
                s = np.where(r > 0, np.log2(np.where(r > 0, r, 1.0)), -np.inf)
            return _mollifier(s)
        return RadialProfile(fn, ANNULUS, "mollifier")
    if kind == "gauss":
        w = params.get("width", 0.12)
        c = params.get("center", 0.0)
        if abs(c) + 4 * w > 0.99:
            raise ValueError("gauss bump parameters leak outside the annulus")
        def fn(r):
            out = np.zeros_like(np.asarray(r, dtype=float))
            pos = r > 0
            s = np.log2(r[pos])
            v = np.exp(-((s - c) ** 2) / (2.0 * w * w))
            v[np.abs(s) >= 1.0] = 0.0
            out[pos] = v
            return out
        return RadialProfile(fn, ANNULUS, f"gauss(w={w},c={c})")
    if kind == "mu-eta":
        s_lo, s_hi = math.log2(0.55), math.log2(1.9)
        def fn(r):
            r = np.asarray(r, dtype=float)
            ring = np.exp(-(((r - 1.1) / 0.45) ** 2))
            out = np.zeros_like(r)
            pos = r > 0
            s = np.log2(r[pos])
            z = (2.0 * s - (s_lo + s_hi)) / (s_hi - s_lo)
            out[pos] = ring[pos] * _mollifier(z)
            return out
        return RadialProfile(fn, ANNULUS, "mu-eta")
    raise ValueError(f"unknown bump kind {kind!r}")


@dataclass(frozen=True)
class KernelPair:
    """Resolution-of-unity pair: low-pass profile Phi_hat and annulus
    profile phi_hat, with phi_hat supported in [1/2, 2] and Phi_hat in
    [0, 2].  construction_K records the scales-per-octave of the quadrature
    that built Phi_hat: a downward dt/t sum at the same rate joins it with
    no seam at t = 1."""

    phi0_hat: RadialProfile
    phi_hat: RadialProfile
    annulus: tuple = ANNULUS
    outer_radius: float = OUTER_RADIUS
    label: str = ""
    construction_K: int = 64


def _normalised_bump_pair(bump: RadialProfile, label: str,
                          construction_K: int) -> KernelPair:
    """Normalise the bump and accumulate the low-pass profile.

    phi_hat = a/c with c = integral_0^inf a(r)/r dr.  Phi_hat is the upward
    scale integral integral_1^inf phi_hat(t .) dt/t evaluated by the same
    log-geometric trapezoid rule (construction_K nodes per octave,
    half-weight at t = 1) that the downward quadratures use; the two rules
    then join seamlessly at t = 1, so the discrete reproducing identity
    holds to the accuracy of a full-line trapezoid sum of a smooth bump.
    """
    s_grid = np.linspace(-1.0, 1.0, _DENSE + 1)
    vals = bump(2.0**s_grid)
    c = math.log(2.0) * np.trapezoid(vals, s_grid)
    if not c > 0:
        raise ValueError("annulus bump integrates to zero")

    phi_fn = lambda r: bump(r) / c

    # Dense radial table of Phi_hat in s = log2(r) over the transition zone.
    K = construction_K
    delta = math.log(2.0) / K
    n_up = int(math.ceil(2.2 * K))  # covers 2^(j/K) r past the outer support
    s_tab = np.linspace(-1.02, 1.02, (1 << 16) + 1)
    shifts = np.arange(1, n_up + 1) / K
    acc = 0.5 * bump(2.0**s_tab)
    for sh in shifts:
        acc = acc + bump(2.0 ** (s_tab + sh))
    phi0_tab = delta * acc / c

    def phi0_fn(r):
        r = np.asarray(r, dtype=float)
        out = np.ones_like(r)
        with np.errstate(divide="ignore"):
            s = np.where(r > 0, np.log2(np.where(r > 0, r, 1.0)), -np.inf)
        mid = (s > -1.0) & (s < 1.0)
        out[mid] = np.interp(s[mid], s_tab, phi0_tab)
        out[s >= 1.0] = 0.0
        return np.clip(out, 0.0, 1.0)

    return KernelPair(
        phi0_hat=RadialProfile(phi0_fn, (0.0, OUTER_RADIUS), f"Phi[{label}]"),
        phi_hat=RadialProfile(phi_fn, ANNULUS, f"phi[{label}]"),
        label=label,
        construction_K=construction_K,
    )


def reproducing_residual(pair: KernelPair, radii, check_K: int = 64) -> float:
    """Max over the given |xi| samples of |Phi_hat + sum_j w_j phi_hat(t_j .) - 1|,
    with a dt/t quadrature fine enough (check_K scales per octave) to cover
    the full annulus of every sample."""
    radii = np.asarray(radii, dtype=float).ravel()
    rmax = float(radii.max())
    J = max(1, int(math.ceil(math.log2(max(2.0 * rmax, 2.0)))))
    s = ScaleGrid(check_K, J)
    acc = pair.phi0_hat(radii)
    for t, w in zip(s.t, s.weights):
        acc = acc + w * pair.phi_hat(t * radii)
    return float(np.abs(acc - 1.0).max())


def _support_leak(profile: RadialProfile, lo: float, hi: float) -> float:
    parts = [np.linspace(hi, 4.0 * hi, 2048)]
    if lo > 0:
        parts.append(np.linspace(0.0, lo, 2048, endpoint=False))
    vals = np.abs(profile(np.concatenate(parts)))
    return float(vals.max())


def build_continuous_pair(spec: GridSpec, s: ScaleGrid, profile: str = "mollifier",
                          check_K: int = None, residual_tol: float = 1e-6,
                          construction_K: int = 64, **bump_params) -> KernelPair:
    """Construct and verify a resolution-of-unity pair usable on `spec`.

    Raises if the scale grid cannot resolve its smallest annulus on the
    grid, if the annulus bump leaks outside [1/2, 2], or if the
    reproducing residual on the resolvable frequencies exceeds
    `residual_tol` under a check_K-per-octave quadrature (by default the
    construction quadrature rate, whose seam at t = 1 cancels exactly).
    """
    s.require_resolvable(spec)
    if check_K is None:
        check_K = construction_K
    pair = _normalised_bump_pair(annulus_bump(profile, **bump_params), profile,
                                 construction_K)
    lo, hi = pair.annulus
    leak = max(_support_leak(pair.phi_hat, lo, hi),
               _support_leak(pair.phi0_hat, 0.0, pair.outer_radius))
    if leak > 1e-12:
        raise ValueError(f"kernel support leaks outside its annulus: {leak:.2e}")
    radii = spec.xi_radius().ravel()
    res = reproducing_residual(pair, radii, check_K)
    if res > residual_tol:
        raise ValueError(
            f"reproducing residual {res:.2e} exceeds {residual_tol:.0e}; "
            "construction quadrature too coarse"
        )
    return pair


def build_mu_eta_pair(spec: GridSpec, s: ScaleGrid, **kw) -> KernelPair:
    """Alternate construction from a positive ring kernel times a strictly
    interior bump (normalised); cross-validates `build_continuous_pair`."""
    return build_continuous_pair(spec, s, profile="mu-eta", **kw)


# --- dyadic family -------------------------------------------------------------


@dataclass(frozen=True)
class DyadicFamily:
    """Dyadic partition of unity: psi_hat_0 = Psi, and for v >= 1
    psi_hat_v(xi) = Psi(2^-v xi) - Psi(2^(1-v) xi); Psi is a smooth radial
    cutoff equal to 1 on r <= 1 and 0 on r >= 2."""

    psi0_hat: RadialProfile
    v_max: int

    def psi_hat(self, v: int):
        """Radial profile of block v as a callable."""
        if not 0 <= v <= self.v_max:
            raise ValueError(f"block index {v} outside 0..{self.v_max}")
        if v == 0:
            return self.psi0_hat
        Psi = self.psi0_hat
        return RadialProfile(
            lambda r, _v=v: Psi(np.asarray(r) * 2.0**-_v) - Psi(np.asarray(r) * 2.0 ** (1 - _v)),
            (2.0 ** (v - 1), 2.0 ** (v + 1)),
            f"psi_{v}",
        )

    @property
    def coverage_radius(self) -> float:
        """Partition sums to 1 exactly for |xi| <= 2^v_max."""
        return 2.0**self.v_max

    def partition_residual(self, radii) -> float:
        radii = np.asarray(radii, dtype=float).ravel()
        radii = radii[radii <= self.coverage_radius]
        acc = np.zeros_like(radii)
        for v in range(self.v_max + 1):
            acc += self.psi_hat(v)(radii)
        return float(np.abs(acc - 1.0).max())


def build_dyadic(spec: GridSpec, v_max: int) -> DyadicFamily:
    if 2.0 ** (v_max + 1) > spec.xi_max:
        raise ValueError(
            f"top annulus needs |xi| up to {2.0 ** (v_max + 1):.0f} but the grid "
            f"resolves only {spec.xi_max:.1f}"
        )
    Psi = RadialProfile(lambda r: _smoothstep(2.0 - np.asarray(r, dtype=float)),
                        (0.0, 2.0), "Psi")
    return DyadicFamily(psi0_hat=Psi, v_max=v_max)


def max_dyadic_level(spec: GridSpec) -> int:
    return int(math.floor(math.log2(spec.xi_max))) - 1


# --- local means ---------------------------------------------------------------


@dataclass(frozen=True)
class LocalMeansKernels:
    """Kernel pair (k0, k) given by radial frequency profiles.

    k has S+1 vanishing moments through the |xi|^(S+1) factor; both
    profiles are positive where the Tauberian conditions require
    (|k0_hat| > 0 on |xi| < 2 eps, |k_hat| > 0 on eps/2 < |xi| < 2 eps).
    """

    k0_hat: RadialProfile
    k_hat: RadialProfile
    S: int
    eps: float

    def tauberian_margins(self, samples: int = 4096) -> tuple:
        r0 = np.linspace(0.0, 2.0 * self.eps, samples, endpoint=False)
        m0 = float(np.abs(self.k0_hat(r0)).min())
        r1 = np.linspace(0.5 * self.eps, 2.0 * self.eps, samples + 2)[1:-1]
        m1 = float(np.abs(self.k_hat(r1)).min())
        return m0, m1

    def moment_slope(self) -> float:
        """Fitted log-log exponent of |k_hat| as r -> 0; >= S+1 certifies
        the vanishing moments."""
        r = self.eps * np.logspace(-3, -1.5, 40)
        v = np.abs(self.k_hat(r))
        if np.all(v == 0):
            return math.inf
        if self.S == -1:
            return 0.0  # profile tends to the positive constant e at 0
        coef = np.polyfit(np.log(r), np.log(v), 1)
        return float(coef[0])


def build_local_means(S: int, eps: float, spec: GridSpec) -> LocalMeansKernels:
    if S + 1 < 0:
        raise ValueError(f"moment order S must be >= -1, got {S}")
    if not eps > 0:
        raise ValueError("Tauberian radius eps must be positive")
    if 2.0 * eps > spec.xi_max:
        raise ValueError("Tauberian annulus exceeds the resolvable frequencies")

    def k_fn(r, _S=S, _e=eps):
        r = np.asarray(r, dtype=float) / _e
        with np.errstate(invalid="ignore"):
            out = r ** (_S + 1) * np.exp(1.0 - r * r)
        if _S + 1 == 0:
            out = np.where(np.asarray(r) == 0, np.exp(1.0), out)
        return out

    def k0_fn(r, _e=eps):
        r = np.asarray(r, dtype=float) / (2.0 * _e)
        return np.exp(-r * r)

    return LocalMeansKernels(
        k0_hat=RadialProfile(k0_fn, (0.0, math.inf), "k0"),
        k_hat=RadialProfile(k_fn, (0.0, math.inf), "k"),
        S=S,
        eps=eps,
    )


# --- export --------------------------------------------------------------------


def export_radial_table(profile: RadialProfile, path, rmax: float,
                        npoints: int = 4096):
    """CSV radial table (r, value) for plotting and debugging."""
    r, v = profile.table(rmax, npoints)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["r", "value"])
        for ri, vi in zip(r, v):
            writer.writerow([repr(float(ri)), repr(float(vi))])
