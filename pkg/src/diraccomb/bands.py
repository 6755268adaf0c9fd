"""Band structure of the generalized Dirac comb.

Roots of the reduced spectral function are bracketed on a uniform grid in the
signed wavenumber ``t`` (``eps = t|t|``: ``t = q`` above zero, ``t = -frakq``
below), refined by bisection, and near-tangent roots are resolved by a
golden-section search. Since ``F = P(k) - G(eps)`` with only ``P`` depending on
``k``, ``G`` is evaluated once per boundary condition and the whole Brillouin
zone is processed as one array.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np

from .boundary import BoundaryCondition
from .spectral import bz_fold, g_of_signed_wavenumber, hopping_term

TANGENT_ACCEPT = 1e-11
ZERO_ENERGY_TOL = 1e-12
MERGE_TOL = 1e-9
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class RootFindOptions:
    n_k: int = 201
    q_max: float = 6 * math.pi
    frakq_max: float = 12.0
    scan_step: float = math.pi / 400
    tol_eps: float = 1e-12
    tangency_threshold: float = 1e-8

    def __post_init__(self):
        if int(self.n_k) != self.n_k or self.n_k < 1:
            raise ValueError("n_k must be a positive integer")
        for name in ("q_max", "frakq_max", "scan_step", "tol_eps", "tangency_threshold"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite")
        if self.scan_step >= math.pi / 4:
            raise ValueError("scan_step must be smaller than pi/4")

    @property
    def eps_window(self) -> tuple[float, float]:
        return -self.frakq_max**2, self.q_max**2


def k_grid(n_k: int) -> np.ndarray:
    """Uniform grid of ``n_k`` quasimomenta on ``[-pi, pi)``."""
    return -np.pi + 2 * np.pi * np.arange(n_k) / n_k


def _signed_grid(opts: RootFindOptions) -> np.ndarray:
    # one extra step past each end so roots sitting on the window edge are bracketed
    n_pos = int(math.ceil(opts.q_max / opts.scan_step)) + 1
    n_neg = int(math.ceil(opts.frakq_max / opts.scan_step)) + 1
    return np.concatenate(
        [-np.arange(n_neg, 0, -1) * opts.scan_step, np.arange(n_pos + 1) * opts.scan_step]
    )


class _Residual:
    """``F(t) = P - G(t)`` for an array of hopping values ``P``."""

    def __init__(self, eta: float, m0: float):
        self.eta, self.m0 = eta, m0

    def __call__(self, P, t):
        return P - g_of_signed_wavenumber(self.eta, self.m0, t)


def _bisect(F: _Residual, P, lo, hi, rtol: float, max_iter: int = 200):
    lo, hi, P = (np.array(x, dtype=float) for x in (lo, hi, P))
    flo = F(P, lo)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        active = (hi - lo) > rtol * np.maximum(np.abs(mid), 1e-300)
        active &= (mid != lo) & (mid != hi)
        if not active.any():
            break
        fmid = F(P, mid)
        exact = fmid == 0
        left = (np.sign(fmid) == np.sign(flo)) & ~exact
        lo = np.where(active & left, mid, lo)
        flo = np.where(active & left, fmid, flo)
        hi = np.where(active & ~left, mid, hi)
        lo = np.where(active & exact, mid, lo)
    return 0.5 * (lo + hi)


def _golden_min(F: _Residual, P, sgn, a, b, n_iter: int = 80):
    """Minimize ``sgn * F`` on ``[a, b]`` elementwise; returns (argmin, F there)."""
    a, b = np.array(a, dtype=float), np.array(b, dtype=float)
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = sgn * F(P, c), sgn * F(P, d)
    for _ in range(n_iter):
        left = fc < fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - _GOLDEN * (b - a)
        new_d = a + _GOLDEN * (b - a)
        c_next = np.where(left, new_c, d)
        d_next = np.where(left, c, new_d)
        fc_next = np.where(left, sgn * F(P, new_c), fd)
        fd_next = np.where(left, fc, sgn * F(P, new_d))
        c, d, fc, fd = c_next, d_next, fc_next, fd_next
    x = np.where(fc < fd, c, d)
    return x, F(P, x)


def _roots_for_hoppings(bc: BoundaryCondition, P: np.ndarray, opts: RootFindOptions) -> list[np.ndarray]:
    """Sorted energies of the real zeros for each hopping value in ``P``."""
    P = np.atleast_1d(np.asarray(P, dtype=float))
    t = _signed_grid(opts)
    F = _Residual(bc.eta, bc.m0)
    f = P[:, None] - g_of_signed_wavenumber(bc.eta, bc.m0, t)[None, :]
    rtol = opts.tol_eps / 4  # eps = t|t| doubles the relative error

    rows, cols = [], []
    # sign changes between neighbours
    r, c = np.nonzero(f[:, :-1] * f[:, 1:] < 0)
    roots_t = _bisect(F, P[r], t[c], t[c + 1], rtol)
    rows.append(r)
    cols.append(roots_t)

    # grid points that are exact zeros: simple if the sign flips across them, double otherwise
    r0, c0 = np.nonzero(f == 0)
    interior = (c0 > 0) & (c0 < t.size - 1)
    tangent = np.zeros(r0.size, dtype=bool)
    tangent[interior] = f[r0[interior], c0[interior] - 1] * f[r0[interior], c0[interior] + 1] > 0
    rows += [r0, r0[tangent]]
    cols += [t[c0], t[c0[tangent]]]

    # local minima of |F| with no sign change: possible tangency or a hidden pair of roots
    fl, fm, fr = f[:, :-2], f[:, 1:-1], f[:, 2:]
    same = (fl * fm > 0) & (fm * fr > 0)
    afm = np.abs(fm)
    is_min = same & (afm <= np.abs(fl)) & (afm <= np.abs(fr))
    sgn_all = np.sign(fm)
    curv = fl - 2 * fm + fr
    with np.errstate(divide="ignore", invalid="ignore"):
        vertex = fm - (fr - fl) ** 2 / (8 * curv)
    dips = (sgn_all * curv > 0) & (sgn_all * vertex <= opts.tangency_threshold)
    rm, cm = np.nonzero(is_min & ((afm < opts.tangency_threshold) | dips))
    if rm.size:
        sgn = sgn_all[rm, cm]
        lo, hi = t[cm], t[cm + 2]
        xs, fx = _golden_min(F, P[rm], sgn, lo, hi)
        double = np.abs(fx) <= TANGENT_ACCEPT
        rows += [rm[double], rm[double]]
        cols += [xs[double], xs[double]]
        crossed = (sgn * fx < 0) & ~double
        if crossed.any():
            Pc = P[rm[crossed]]
            rows += [rm[crossed], rm[crossed]]
            cols += [
                _bisect(F, Pc, lo[crossed], xs[crossed], rtol),
                _bisect(F, Pc, xs[crossed], hi[crossed], rtol),
            ]

    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    lo_eps, hi_eps = opts.eps_window
    out = []
    for i in range(P.size):
        ts = np.sort(cols[rows == i])
        ts = _collapse_tangent_pairs(F, P[i], ts, opts.scan_step)
        eps = ts * np.abs(ts)
        if F(P[i], 0.0) != 0 and abs(F(P[i], 0.0)) <= ZERO_ENERGY_TOL and not np.any(eps == 0):
            # |F(0)| tiny but no bracket: report eps = 0 itself
            near = np.abs(eps) <= ZERO_ENERGY_TOL
            eps = np.concatenate([eps[~near], [0.0]])
        keep = (eps >= lo_eps * (1 + MERGE_TOL)) & (eps <= hi_eps * (1 + MERGE_TOL))
        out.append(np.sort(eps[keep]))
    return out


def _collapse_tangent_pairs(F: _Residual, P: float, ts: np.ndarray, step: float) -> np.ndarray:
    """Merge adjacent simple roots that only enclose ``|F| <= 1e-11`` into a double root."""
    if ts.size < 2:
        return ts
    ts = ts.copy()
    i = 0
    while i < ts.size - 1:
        a, b = ts[i], ts[i + 1]
        if 0 < b - a < step and abs(F(P, 0.5 * (a + b))) <= TANGENT_ACCEPT:
            ts[i] = ts[i + 1] = 0.5 * (a + b)
            i += 2
        else:
            i += 1
    return ts


def band_roots(bc: BoundaryCondition, k: float, opts: RootFindOptions | None = None) -> np.ndarray:
    """All zeros of the spectral function in ``[-frakq_max**2, q_max**2]``, ascending.

    A double root (band tangency) is listed twice.
    """
    opts = opts or RootFindOptions()
    return _roots_for_hoppings(bc, np.array([hopping_term(bc, k)]), opts)[0]


def _pad(rows: list[np.ndarray], n: int) -> np.ndarray:
    out = np.full((n, len(rows)), np.nan)
    for j, r in enumerate(rows):
        out[: r.size, j] = r
    return out


def edge_quasimomenta(bc: BoundaryCondition, tol: float = 1e-14) -> tuple[float, ...]:
    """Quasimomenta where ``m1 cos k + m2 sin k`` reaches ``+-R``; band edges live there."""
    if math.hypot(bc.m1, bc.m2) <= tol:
        return ()
    phi = math.atan2(bc.m2, bc.m1)
    return bz_fold(phi), bz_fold(phi + math.pi)


@dataclass(frozen=True)
class BandStructure:
    """Band energies ``bands[n, j] = eps_n(k_grid[j])`` (NaN where a band leaves the window).

    ``edge_k``/``edge_bands`` hold the same data at the extremal quasimomenta
    so that band intervals are exact even when those points are off-grid.
    """

    bc: BoundaryCondition
    options: RootFindOptions
    k_grid: np.ndarray
    bands: np.ndarray
    edge_k: tuple[float, ...] = ()
    edge_bands: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))
    metadata: dict = field(default_factory=dict)

    @property
    def n_bands(self) -> int:
        return self.bands.shape[0]

    def band_range(self, n: int) -> tuple[float, float]:
        values = self.bands[n]
        if self.edge_bands.size and n < self.edge_bands.shape[0]:
            values = np.concatenate([values, self.edge_bands[n]])
        values = values[np.isfinite(values)]
        return float(values.min()), float(values.max())


def compute_bands(bc: BoundaryCondition, opts: RootFindOptions | None = None) -> BandStructure:
    opts = opts or RootFindOptions()
    ks = k_grid(opts.n_k)
    edges = edge_quasimomenta(bc)
    R = math.hypot(bc.m1, bc.m2)
    # at the edges the hopping term is exactly +R / -R
    P = np.concatenate([hopping_term(bc, ks), [R, -R][: len(edges)]])
    roots = _roots_for_hoppings(bc, P, opts)
    n = max((r.size for r in roots), default=0)
    grid_roots, edge_roots = roots[: ks.size], roots[ks.size:]
    return BandStructure(
        bc=bc,
        options=opts,
        k_grid=ks,
        bands=_pad(grid_roots, n),
        edge_k=tuple(edges),
        edge_bands=_pad(edge_roots, n) if edges else np.empty((n, 0)),
        metadata={"multiplicity": "double roots at band tangencies are listed twice"},
    )


def _merge(intervals: list[tuple[float, float]], tol: float = MERGE_TOL) -> list[tuple[float, float]]:
    merged: list[list[float]] = []
    for lo, hi in sorted(intervals):
        if merged and lo <= merged[-1][1] + tol * max(1.0, abs(lo)):
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [(lo, hi) for lo, hi in merged]


def spectrum_intervals(bs: BandStructure) -> list[tuple[float, float]]:
    """Merged, ascending closed intervals covered by the bands."""
    ranges = []
    for n in range(bs.n_bands):
        try:
            ranges.append(bs.band_range(n))
        except ValueError:  # band entirely outside the window
            continue
    return _merge(ranges)


class Gap(NamedTuple):
    lo: float
    hi: float
    width: float


def gaps(bs: BandStructure) -> list[Gap]:
    iv = spectrum_intervals(bs)
    return [Gap(a[1], b[0], b[0] - a[1]) for a, b in zip(iv, iv[1:])]


def band_gap(bs: BandStructure, n: int) -> float:
    """``min eps_{n+1} - max eps_n``; non-positive when the two bands overlap or touch."""
    return bs.band_range(n + 1)[0] - bs.band_range(n)[1]


# --- valence-band regimes ----------------------------------------------------


class Regime(str, Enum):
    NO_NEGATIVE_STATES = "no_negative_states"
    MIXED_BAND = "mixed_band"
    FULLY_NEGATIVE_BAND = "fully_negative_band"
    GAPPED_NEGATIVE = "gapped_negative"
    TOUCHING_ZERO = "touching_zero"
    GAP_CLOSES = "gap_closes"


@dataclass(frozen=True)
class ValenceRegime:
    tag: Regime
    thresholds: tuple[float, ...]
    at_threshold: bool = False


def valence_regime_delta(g1: float, tol: float = 1e-12) -> ValenceRegime:
    """Regime of the lowest band of the delta comb with coupling ``g1``.

    At ``g1 = 0`` (free comb) there are no negative states; at ``g1 = -2`` the
    lowest band is non-positive and touches zero at ``k = pi``.
    """
    if not math.isfinite(g1):
        raise ValueError("g1 must be finite")
    thresholds = (-2.0, 0.0)
    if abs(g1) <= tol:
        return ValenceRegime(Regime.NO_NEGATIVE_STATES, thresholds, True)
    if abs(g1 + 2.0) <= tol:
        return ValenceRegime(Regime.FULLY_NEGATIVE_BAND, thresholds, True)
    if g1 > 0:
        return ValenceRegime(Regime.NO_NEGATIVE_STATES, thresholds)
    if g1 > -2:
        return ValenceRegime(Regime.MIXED_BAND, thresholds)
    return ValenceRegime(Regime.FULLY_NEGATIVE_BAND, thresholds)


def valence_regime_metric(g4: float, tol: float = 1e-12) -> ValenceRegime:
    """Regime of the singular-metric comb as classified by the published analysis."""
    if not math.isfinite(g4):
        raise ValueError("g4 must be finite")
    thresholds = (0.0, 0.5)
    if abs(g4 - 0.5) <= tol:
        return ValenceRegime(Regime.GAP_CLOSES, thresholds, True)
    if g4 <= 0:
        return ValenceRegime(Regime.NO_NEGATIVE_STATES, thresholds, abs(g4) <= tol)
    if g4 < 0.5:
        return ValenceRegime(Regime.GAPPED_NEGATIVE, thresholds)
    return ValenceRegime(Regime.TOUCHING_ZERO, thresholds)
