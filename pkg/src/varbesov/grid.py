"""Periodic-torus sampling, Fourier transform, scale convolution and quadrature.

Functions live on the torus [-L, L)^n sampled with N points per axis
(N a power of two).  The Fourier transform follows the symmetric
convention  F(f)(xi) = (2pi)^(-n/2) * integral e^{-i x.xi} f(x) dx,
discretised so that the forward/inverse pair is an exact DFT round trip
and, for functions with negligible mass near the boundary, matches the
continuous transform at the grid frequencies xi_k = pi*k/L,
k = -N/2 .. N/2-1 (stored in ascending order).

Scale decompositions integrate over t in (0, 1] against dt/t; ScaleGrid
discretises that measure on a geometric grid with trapezoid weights in
log t, so that the weights sum exactly to ln(2^J).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "GridSpec",
    "GridFunction",
    "ScaleGrid",
    "fourier",
    "inverse_fourier",
    "convolve_kernel",
    "eta_pointwise",
    "eta_periodized",
    "eta_hat",
    "integrate",
    "norm_l2",
    "write_csv",
    "read_csv",
    "write_binary",
    "read_binary",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on [-L, L)^n with N points per axis."""

    n: int
    N: int
    L: float

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ValueError(f"dimension n must be 1 or 2, got {self.n}")
        if self.N < 16 or (self.N & (self.N - 1)) != 0:
            raise ValueError(f"N must be a power of two >= 16, got {self.N}")
        if not self.L > 0:
            raise ValueError(f"half-period L must be positive, got {self.L}")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def cell_volume(self) -> float:
        return self.h**self.n

    @property
    def npoints(self) -> int:
        return self.N**self.n

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.n

    @property
    def xi_max(self) -> float:
        """Largest per-axis frequency magnitude, pi*N/(2L)."""
        return np.pi * self.N / (2.0 * self.L)

    def axis(self) -> np.ndarray:
        """Spatial sample positions along one axis, -L .. L-h."""
        return _axis(self.n, self.N, self.L)

    def freq_axis(self) -> np.ndarray:
        """Frequencies pi*k/L for k = -N/2 .. N/2-1, ascending."""
        return _freq_axis(self.n, self.N, self.L)

    def coords(self) -> tuple:
        """Meshgrid of spatial coordinates, one array per axis."""
        x = self.axis()
        if self.n == 1:
            return (x,)
        return tuple(np.meshgrid(x, x, indexing="ij"))

    def freq_coords(self) -> tuple:
        xi = self.freq_axis()
        if self.n == 1:
            return (xi,)
        return tuple(np.meshgrid(xi, xi, indexing="ij"))

    def xi_radius(self) -> np.ndarray:
        """|xi| at every grid frequency."""
        return _xi_radius(self.n, self.N, self.L)

    def periodic_radius(self) -> np.ndarray:
        """Periodic distance from the origin at every spatial sample."""
        return _periodic_radius(self.n, self.N, self.L)


@lru_cache(maxsize=64)
def _axis(n, N, L):
    a = -L + (2.0 * L / N) * np.arange(N)
    a.setflags(write=False)
    return a


@lru_cache(maxsize=64)
def _freq_axis(n, N, L):
    a = (np.pi / L) * (np.arange(N) - N // 2)
    a.setflags(write=False)
    return a


@lru_cache(maxsize=64)
def _xi_radius(n, N, L):
    xi = _freq_axis(n, N, L)
    if n == 1:
        r = np.abs(xi)
    else:
        r = np.sqrt(xi[:, None] ** 2 + xi[None, :] ** 2)
    r.setflags(write=False)
    return r


@lru_cache(maxsize=64)
def _periodic_radius(n, N, L):
    x = _axis(n, N, L)
    d = np.minimum(np.abs(x), 2.0 * L - np.abs(x))
    if n == 1:
        r = d
    else:
        r = np.sqrt(d[:, None] ** 2 + d[None, :] ** 2)
    r.setflags(write=False)
    return r


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex samples on a GridSpec, row-major.  Immutable after creation."""

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex).reshape(self.spec.shape)
        if not np.all(np.isfinite(v)):
            raise ValueError("GridFunction values must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, spec: GridSpec, fn) -> "GridFunction":
        return cls(spec, fn(*spec.coords()))

    @classmethod
    def zeros(cls, spec: GridSpec) -> "GridFunction":
        return cls(spec, np.zeros(spec.shape))

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.spec, values)

    def __mul__(self, c):
        return GridFunction(self.spec, self.values * c)

    __rmul__ = __mul__

    def __add__(self, other):
        _require_same_spec(self, other)
        return GridFunction(self.spec, self.values + other.values)

    def __sub__(self, other):
        _require_same_spec(self, other)
        return GridFunction(self.spec, self.values - other.values)


def _require_same_spec(f: GridFunction, g: GridFunction):
    if f.spec != g.spec:
        raise ValueError(f"grid spec mismatch: {f.spec} vs {g.spec}")


def fourier(f: GridFunction) -> GridFunction:
    """Forward transform; output samples approximate F(f) at grid frequencies.

    Output is ordered by ascending frequency along each axis.  Exact
    inverse is `inverse_fourier`.
    """
    spec = f.spec
    scale = spec.cell_volume * (2.0 * np.pi) ** (-spec.n / 2.0)
    v = np.fft.fftshift(np.fft.fftn(np.fft.ifftshift(f.values)))
    return GridFunction(spec, scale * v)


def inverse_fourier(g: GridFunction) -> GridFunction:
    spec = g.spec
    scale = (2.0 * np.pi) ** (spec.n / 2.0) / spec.cell_volume
    v = np.fft.fftshift(np.fft.ifftn(np.fft.ifftshift(g.values)))
    return GridFunction(spec, scale * v)


def convolve_kernel(f: GridFunction, khat: GridFunction) -> GridFunction:
    """Convolution realised in frequency: inverse of (2pi)^(n/2) * fhat * khat.

    `khat` is the frequency-side kernel (same layout as `fourier` output);
    with the symmetric transform convention this matches the continuous
    convolution theorem F(f*k) = (2pi)^(n/2) F(f) F(k).
    """
    _require_same_spec(f, khat)
    n = f.spec.n
    fhat = fourier(f)
    prod = (2.0 * np.pi) ** (n / 2.0) * fhat.values * khat.values
    return inverse_fourier(GridFunction(f.spec, prod))


def apply_multiplier(f: GridFunction, mult: np.ndarray) -> GridFunction:
    """Fourier multiplier operator: inverse(mult * fhat).

    Used for partition-of-unity kernels whose profiles are normalised on
    the multiplier side (profile values sum to 1 across scales), i.e. the
    kernel k with F(k) = (2pi)^(-n/2) * mult.
    """
    fhat = fourier(f)
    return inverse_fourier(f.with_values(fhat.values * mult))


def apply_multiplier_to_hat(fhat_values: np.ndarray, mult: np.ndarray,
                            spec: GridSpec) -> GridFunction:
    """Same as `apply_multiplier` but reusing a precomputed transform."""
    return inverse_fourier(GridFunction(spec, fhat_values * mult))


def integrate(f: GridFunction) -> complex:
    """Torus quadrature h^n * sum(values); exact for band-limited integrands."""
    return complex(f.spec.cell_volume * f.values.sum())


def norm_l2(f: GridFunction) -> float:
    return float(np.sqrt(f.spec.cell_volume * np.sum(np.abs(f.values) ** 2)))


# --- the kernels eta_{t,m}(x) = t^-n (1 + |x|/t)^-m --------------------------


def eta_pointwise(t: float, m: float, dist, n: int):
    """eta_{t,m} evaluated at distances `dist` (no periodisation)."""
    if not m > n:
        raise ValueError(f"eta_{{t,m}} requires m > n for integrability, got m={m}, n={n}")
    if not 0 < t:
        raise ValueError(f"scale t must be positive, got {t}")
    return t ** (-n) * (1.0 + np.asarray(dist) / t) ** (-m)


def eta_periodized(t: float, m: float, spec: GridSpec,
                   tail_tol: float = 1e-12) -> GridFunction:
    """Spatial samples of sum_j eta_{t,m}(x + 2Lj), image shells added until
    the last shell contributes less than `tail_tol` of the peak value."""
    if not m > spec.n:
        raise ValueError(f"eta_{{t,m}} requires m > n, got m={m}, n={spec.n}")
    if not 0 < t <= 1:
        raise ValueError(f"scale t must lie in (0, 1], got {t}")
    return _eta_periodized_cached(t, m, spec.n, spec.N, spec.L, tail_tol)


@lru_cache(maxsize=256)
def _eta_periodized_cached(t, m, n, N, L, tail_tol):
    spec = GridSpec(n, N, L)
    period = 2.0 * L
    peak = t ** (-n)
    max_shells = 400
    hit_cap = False
    if n == 1:
        x = spec.axis()
        acc = eta_pointwise(t, m, np.abs(x), n)
        j = 1
        while True:
            add = (eta_pointwise(t, m, np.abs(x + period * j), n)
                   + eta_pointwise(t, m, np.abs(x - period * j), n))
            acc = acc + add
            if add.max() < tail_tol * peak:
                break
            if j >= max_shells:
                hit_cap = True
                break
            j += 1
        if hit_cap:
            # remaining images are flat across the cell; add their continuum
            # density (1/2L) * integral_{|u|>R} eta du, R = (j+1/2) period
            A = (j + 0.5) * period / t
            acc = acc + (2.0 / period) * (1.0 + A) ** (1.0 - m) / (m - 1.0)
    else:
        X, Y = spec.coords()
        acc = eta_pointwise(t, m, np.sqrt(X**2 + Y**2), n)
        j = 1
        max_shells_2d = 60
        while True:
            add = np.zeros_like(acc)
            # shell of image copies at Chebyshev radius j
            for jx in range(-j, j + 1):
                for jy in range(-j, j + 1):
                    if max(abs(jx), abs(jy)) != j:
                        continue
                    d = np.sqrt((X + period * jx) ** 2 + (Y + period * jy) ** 2)
                    add += eta_pointwise(t, m, d, n)
            acc = acc + add
            if add.max() < tail_tol * peak:
                break
            if j >= max_shells_2d:
                hit_cap = True
                break
            j += 1
        if hit_cap:
            if not m > 2:
                raise ValueError("2d eta periodisation needs m > 2")
            A = (j + 0.5) * period / t
            tail = (1.0 + A) ** (2.0 - m) / (m - 2.0) - (1.0 + A) ** (1.0 - m) / (m - 1.0)
            acc = acc + (2.0 * np.pi / period**2) * tail
    return GridFunction(spec, acc)


def eta_hat(t: float, m: float, spec: GridSpec) -> GridFunction:
    """Frequency side of the periodised eta_{t,m}; feed to `convolve_kernel`
    to realise eta_{t,m} * f on the torus."""
    return fourier(eta_periodized(t, m, spec))


# --- geometric scale grid for integral_0^1 ... dt/t --------------------------


@dataclass(frozen=True)
class ScaleGrid:
    """Scales t_j = 2^(-j/K), j = 0..J*K, with trapezoid dt/t weights.

    K scales per octave over J octaves; sum of weights equals ln(2^J)
    exactly, the dt/t measure of [2^-J, 1].
    """

    K: int
    J: int

    def __post_init__(self):
        if self.K < 1 or self.J < 1:
            raise ValueError("ScaleGrid needs K >= 1 scales per octave and J >= 1 octaves")

    @property
    def t(self) -> np.ndarray:
        return _scale_nodes(self.K, self.J)[0]

    @property
    def weights(self) -> np.ndarray:
        return _scale_nodes(self.K, self.J)[1]

    @property
    def t_min(self) -> float:
        return 2.0 ** (-self.J)

    @property
    def resolvable_radius(self) -> float:
        """Largest |xi| whose full annulus of scales [1/(2|xi|), 2/|xi|]
        is covered by the grid: 2^(J-1)."""
        return 0.5 / self.t_min

    def __len__(self):
        return self.J * self.K + 1

    def require_resolvable(self, spec: GridSpec):
        if 2.0 / self.t_min > spec.xi_max:
            raise ValueError(
                f"smallest scale 2^-{self.J} needs frequencies up to "
                f"{2.0 / self.t_min:.1f} but the grid resolves only {spec.xi_max:.1f}"
            )

    def octave_sums(self) -> np.ndarray:
        """Per-octave trapezoid weight sums; each equals ln 2."""
        w = np.full(self.K + 1, np.log(2.0) / self.K)
        w[0] = w[-1] = 0.5 * np.log(2.0) / self.K
        return np.array([w.sum() for _ in range(self.J)])


@lru_cache(maxsize=64)
def _scale_nodes(K, J):
    j = np.arange(J * K + 1)
    t = 2.0 ** (-j / K)
    w = np.full(J * K + 1, np.log(2.0) / K)
    w[0] *= 0.5
    w[-1] *= 0.5
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


# --- import / export ----------------------------------------------------------


def write_csv(f: GridFunction, path):
    """Columns: coordinates per axis, then re, im."""
    spec = f.spec
    cols = [c.ravel() for c in spec.coords()]
    v = f.values.ravel()
    header = ",".join(["x", "y"][: spec.n] + ["re", "im"])
    data = np.column_stack(cols + [v.real, v.imag])
    np.savetxt(path, data, delimiter=",", header=header, comments="")


def read_csv(path, spec: GridSpec) -> GridFunction:
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    re = data[:, spec.n]
    im = data[:, spec.n + 1]
    return GridFunction(spec, (re + 1j * im).reshape(spec.shape))


_BIN_HEADER = struct.Struct("<iid")  # n, N int32; L float64, little-endian


def write_binary(f: GridFunction, path):
    """Header (n, N, L little-endian) followed by complex64 samples row-major."""
    with open(path, "wb") as fh:
        fh.write(_BIN_HEADER.pack(f.spec.n, f.spec.N, f.spec.L))
        fh.write(np.ascontiguousarray(f.values, dtype="<c8").tobytes())


def read_binary(path) -> GridFunction:
    with open(path, "rb") as fh:
        n, N, L = _BIN_HEADER.unpack(fh.read(_BIN_HEADER.size))
        spec = GridSpec(n, N, L)
        raw = np.frombuffer(fh.read(), dtype="<c8", count=spec.npoints)
    return GridFunction(spec, raw.astype(complex).reshape(spec.shape))
