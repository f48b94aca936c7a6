"""Variable-exponent modulars, the Luxemburg norm solver, and mixed norms.

The modular of f is the quadrature of omega_{p(x)}(|f(x)|) over the torus;
the Luxemburg (quasi-)norm is inf{lambda > 0 : modular(f/lambda) <= 1},
found by bisection in log(lambda) -- the modular is nonincreasing in
lambda, and +inf values (possible where p = inf) simply count as "> 1".

Mixed sequence-space norms aggregate a family (f_v) through the modular
sum_v ||  |f_v/mu|^{q(.)} ||_{p(.)/q(.)}  (weighted by dt/t quadrature
weights in the scale-continuous version) with an outer Luxemburg solve in
mu.  The inner power |f|^{q(x)} is always formed in log space after
normalising the family by its global maximum, so no overflow occurs.
q must be bounded for the mixed modular; the q = inf norms are handled by
their sup-over-scales form in the `besov` module instead.
"""

from __future__ import annotations

import math

import numpy as np

from .exponent import ExponentField
from .grid import GridFunction, ScaleGrid

__all__ = [
    "modular_lp",
    "luxemburg_norm",
    "power_quotient_norm",
    "mixed_norm_discrete",
    "mixed_norm_continuous",
]

_TINY = 1e-12
_REL_TOL = 1e-10  # solver tolerance; tighter than callers need


def _check_field(f: GridFunction, g: ExponentField, name: str):
    if f.spec != g.spec:
        raise ValueError(f"{name} is sampled on a different grid than f")


def _omega_sum(a: np.ndarray, p: np.ndarray, cell: float) -> float:
    """Quadrature of omega_{p(x)}(a(x)); a nonnegative, p in (0, inf]."""
    out = np.zeros_like(a)
    pinf = np.isinf(p)
    if pinf.any():
        if np.any(a[pinf] > 1.0):
            return math.inf
    pos = (a > 0) & ~pinf
    with np.errstate(over="ignore"):
        out[pos] = np.exp(p[pos] * np.log(a[pos]))
    s = cell * out.sum()
    return float(s)


def modular_lp(f: GridFunction, p: ExponentField) -> float:
    """Variable exponent modular; +inf propagates (p = inf and |f| > 1)."""
    _check_field(f, p, "p")
    p.require_p0("p")
    a = np.abs(f.values).ravel()
    return _omega_sum(a, p.samples.ravel(), f.spec.cell_volume)


def luxemburg_norm(f: GridFunction, p: ExponentField, rel_tol: float = _REL_TOL) -> float:
    """inf{lambda > 0 : modular(f/lambda) <= 1}; 0 for f identically zero."""
    _check_field(f, p, "p")
    p.require_p0("p")
    a = np.abs(f.values).ravel()
    amax = float(a.max())
    if amax == 0.0:
        return 0.0
    g = a / amax
    ps = p.samples.ravel()
    cell = f.spec.cell_volume
    pmin = p.range_min
    box = (2.0 * f.spec.L) ** f.spec.n

    lo = _TINY
    hi = box ** (1.0 / pmin) + 1.0
    for _ in range(200):
        if _omega_sum(g / hi, ps, cell) <= 1.0:
            break
        hi *= 2.0
    else:
        raise ArithmeticError("could not bracket the Luxemburg norm from above")
    for _ in range(200):
        if _omega_sum(g / lo, ps, cell) > 1.0:
            break
        lo *= 1e-2
    while hi / lo - 1.0 > rel_tol:
        mid = math.sqrt(lo * hi)
        if _omega_sum(g / mid, ps, cell) <= 1.0:
            hi = mid
        else:
            lo = mid
    return amax * hi


# --- batched Luxemburg solves over a family of rows ---------------------------


def _lux_rows(A: np.ndarray, e: np.ndarray, cell: float, box: float,
              rel_tol: float = _REL_TOL) -> np.ndarray:
    """Row-wise Luxemburg norms with a shared finite exponent field e > 0.

    A is (T, M) nonnegative; all rows are bisected jointly in log space.
    """
    T, M = A.shape
    out = np.zeros(T)
    rmax = A.max(axis=1)
    live = rmax > 0
    if not live.any():
        return out
    G = A[live] / rmax[live, None]
    with np.errstate(divide="ignore"):
        LG = np.log(G)  # -inf where G == 0; exp maps it back to 0

    def modular(lam):
        with np.errstate(over="ignore", invalid="ignore"):
            z = np.exp(e[None, :] * (LG - np.log(lam)[:, None]))
        return cell * z.sum(axis=1)

    emin = float(e.min())
    k = G.shape[0]
    lo = np.full(k, _TINY)
    hi = np.full(k, box ** (1.0 / emin) + 1.0)
    for _ in range(200):
        bad = modular(hi) > 1.0
        if not bad.any():
            break
        hi[bad] *= 2.0
    for _ in range(200):
        good = modular(lo) > 1.0
        if good.all():
            break
        lo[~good] *= 1e-2
    while (hi / lo - 1.0).max() > rel_tol:
        mid = np.sqrt(lo * hi)
        feas = modular(mid) <= 1.0
        hi = np.where(feas, mid, hi)
        lo = np.where(feas, lo, mid)
    out[live] = rmax[live] * hi
    return out


def power_quotient_norm(f: GridFunction, p: ExponentField, q: ExponentField) -> float:
    """|| |f|^{q(.)} ||_{p(.)/q(.)}, the inner term of the mixed modular."""
    _check_field(f, p, "p")
    _check_field(f, q, "q")
    p.require_p0("p").require_finite("p")
    q.require_p0("q").require_finite("q")
    a = np.abs(f.values).ravel()[None, :]
    qs = q.samples.ravel()
    with np.errstate(divide="ignore"):
        P = np.exp(qs[None, :] * np.log(a))
    e = (p.samples / q.samples).ravel()
    box = (2.0 * f.spec.L) ** f.spec.n
    return float(_lux_rows(P, e, f.spec.cell_volume, box)[0])


def _mixed_norm(A: np.ndarray, w: np.ndarray, p: ExponentField, q: ExponentField,
                cell: float, box: float, rel_tol: float = _REL_TOL) -> float:
    """Outer Luxemburg solve for the weighted mixed modular.

    A: (T, M) |f_v| samples, w: (T,) quadrature weights (all ones in the
    discrete case).  For constant q the outer inf has the closed form
    (sum_v w_v T_v)^(1/q) with T_v the inner norms of the unscaled family.
    """
    amax = float(A.max())
    if amax == 0.0:
        return 0.0
    A = A / amax
    qs = q.samples.ravel()
    e = (p.samples / q.samples).ravel()
    with np.errstate(divide="ignore"):
        LA = np.log(A)
        P = np.exp(qs[None, :] * LA)

    if q.is_constant:
        qc = q.range_min
        T1 = _lux_rows(P, e, cell, box, rel_tol)
        return amax * float(np.dot(w, T1)) ** (1.0 / qc)

    def modular(mu):
        with np.errstate(over="ignore", invalid="ignore"):
            Pm = P * np.exp(-math.log(mu) * qs)[None, :]
        vals = _lux_rows(Pm, e, cell, box, rel_tol)
        return float(np.dot(w, vals))

    lo = _TINY
    hi = (box ** (1.0 / p.range_min) + 1.0) * (float(w.sum()) + 1.0) ** (1.0 / q.range_min)
    for _ in range(200):
        if modular(hi) <= 1.0:
            break
        hi *= 2.0
    else:
        raise ArithmeticError("could not bracket the mixed norm from above")
    for _ in range(200):
        if modular(lo) > 1.0:
            break
        lo *= 1e-2
    while hi / lo - 1.0 > rel_tol:
        mid = math.sqrt(lo * hi)
        if modular(mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    return amax * hi


def _validate_mixed(fs, p: ExponentField, q: ExponentField):
    for f in fs:
        _check_field(f, p, "p")
    p.require_p0("p").require_finite("p")
    q.require_p0("q")
    if not q.is_finite:
        raise ValueError(
            "mixed norms require q bounded (q+ < inf); use the sup-over-scales "
            "Besov branch for q = inf"
        )


def mixed_norm_discrete(fs, p: ExponentField, q: ExponentField,
                        rel_tol: float = _REL_TOL) -> float:
    """Mixed sequence-space norm of a finite family (f_v)."""
    fs = list(fs)
    if not fs:
        return 0.0
    _validate_mixed(fs, p, q)
    A = np.stack([np.abs(f.values).ravel() for f in fs])
    spec = fs[0].spec
    w = np.ones(len(fs))
    return _mixed_norm(A, w, p, q, spec.cell_volume, (2.0 * spec.L) ** spec.n, rel_tol)


def mixed_norm_continuous(ft, p: ExponentField, q: ExponentField, s: ScaleGrid,
                          rel_tol: float = _REL_TOL) -> float:
    """Scale-continuous mixed norm: the discrete sum over v becomes the
    dt/t quadrature over the ScaleGrid."""
    ft = list(ft)
    if not ft:
        return 0.0
    if len(ft) != len(s):
        raise ValueError(f"family has {len(ft)} members but the scale grid has {len(s)}")
    _validate_mixed(ft, p, q)
    A = np.stack([np.abs(f.values).ravel() for f in ft])
    spec = ft[0].spec
    return _mixed_norm(A, s.weights, p, q, spec.cell_volume,
                       (2.0 * spec.L) ** spec.n, rel_tol)
