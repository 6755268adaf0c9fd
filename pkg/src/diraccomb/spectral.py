"""Spectral function of the generalized Dirac comb.

Energies are in units of hbar^2 / (2 m L^2) with lattice spacing 1. For a
boundary condition ``U(eta, m)`` and quasimomentum ``k`` the fiber eigenvalues
are the real zeros of

    F(eps) = m1 cos k + m2 sin k - G(eps),
    G(eps) = sinc(q) [q^2 (cos eta - m0) + cos eta + m0] / 2 + cos(q) sin eta,

with ``q = sqrt(eps)`` (``q = i*frakq`` below zero). :func:`spectral_det` gives
the unreduced determinant ``det(B_k(eps) - U)`` which is kept as a cross-check.
"""
from __future__ import annotations

import math

import numpy as np

from .boundary import BoundaryCondition, unitary_matrix
from .exceptions import DegenerateDenominatorError

SERIES_CUTOFF = 1e-3


def bz_fold(k):
    """Representative of ``k`` in the Brillouin zone ``[-pi, pi)``."""
    folded = np.mod(np.asarray(k, dtype=float) + np.pi, 2 * np.pi) - np.pi
    # mod can round up to exactly 2*pi
    folded = np.where(folded >= np.pi, -np.pi, folded)
    return float(folded) if np.ndim(folded) == 0 else folded


def wavenumber(eps):
    """``q(eps)``: real and non-negative above zero, positive imaginary below."""
    eps = np.asarray(eps, dtype=float)
    q = np.where(eps >= 0, np.sqrt(np.abs(eps)) + 0j, 1j * np.sqrt(np.abs(eps)))
    return complex(q) if q.ndim == 0 else q


def sinc(q):
    """``sin(q)/q`` for real or complex ``q``, series-evaluated near zero."""
    q = np.asarray(q)
    q2 = q * q
    small = np.abs(q) < SERIES_CUTOFF
    safe = np.where(small, 1.0, q)
    out = np.where(small, 1 - q2 / 6 + q2 * q2 / 120 - q2 * q2 * q2 / 5040, np.sin(safe) / safe)
    return out[()] if out.ndim == 0 else out


def sinhc(x):
    """``sinh(x)/x`` for real ``x``, series-evaluated near zero."""
    x = np.asarray(x, dtype=float)
    x2 = x * x
    small = np.abs(x) < SERIES_CUTOFF
    safe = np.where(small, 1.0, x)
    out = np.where(small, 1 + x2 / 6 + x2 * x2 / 120 + x2 * x2 * x2 / 5040, np.sinh(safe) / safe)
    return out[()] if out.ndim == 0 else out


def ab_coefficients(eps) -> tuple[complex, complex]:
    """Coefficients of ``B_k(eps) = a I + b sigma_k``.

    Numerator and denominator are divided by ``q``, which removes the 0/0 at
    ``eps = 0`` and gives the limits ``a(0) = -(1+2i)/5``, ``b(0) = (-4+2i)/5``.
    """
    q = np.asarray(wavenumber(eps))
    sq = sinc(q)
    den = (q * q + 1) * sq - 2j * np.cos(q)
    if np.any(np.abs(den) <= 1e-300):
        raise DegenerateDenominatorError("a(eps), b(eps) denominator vanished")
    a = (q * q - 1) * sq / den
    b = 2j / den
    if a.ndim == 0:
        return complex(a), complex(b)
    return a, b


def sigma_k(k: float) -> np.ndarray:
    return np.array([[0.0, np.exp(-1j * k)], [np.exp(1j * k), 0.0]])


def b_matrix(eps: float, k: float) -> np.ndarray:
    a, b = ab_coefficients(eps)
    return a * np.eye(2) + b * sigma_k(k)


def spectral_det(bc: BoundaryCondition, k: float, eps: float) -> complex:
    """Expanded determinant ``a^2 - b^2 + det U - a tr U + b tr(U sigma_k)``."""
    a, b = ab_coefficients(eps)
    U = unitary_matrix(bc)
    return complex(
        a * a - b * b + np.linalg.det(U) - a * np.trace(U) + b * np.trace(U @ sigma_k(k))
    )


def spectral_det_direct(bc: BoundaryCondition, k: float, eps: float) -> complex:
    """``det(B_k(eps) - U)`` evaluated as a plain 2x2 determinant."""
    M = b_matrix(eps, k) - unitary_matrix(bc)
    return complex(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])


def g_positive(eta: float, m0: float, q):
    """``G`` at ``eps = q**2 >= 0``."""
    q = np.asarray(q, dtype=float)
    c, s = math.cos(eta), math.sin(eta)
    return 0.5 * sinc(q) * (q * q * (c - m0) + c + m0) + np.cos(q) * s


def g_negative(eta: float, m0: float, frakq):
    """``G`` at ``eps = -frakq**2 <= 0``."""
    x = np.asarray(frakq, dtype=float)
    c, s = math.cos(eta), math.sin(eta)
    return 0.5 * sinhc(x) * (x * x * (m0 - c) + m0 + c) + np.cosh(x) * s


def g_function(eta: float, m0: float, eps):
    """k-independent part ``G(eps)`` of the reduced spectral function."""
    eps = np.asarray(eps, dtype=float)
    root = np.sqrt(np.abs(eps))
    out = np.where(eps >= 0, g_positive(eta, m0, root), g_negative(eta, m0, root))
    return float(out) if out.ndim == 0 else out


def g_of_signed_wavenumber(eta: float, m0: float, t):
    """``G`` on the signed axis ``t``: ``eps = t|t|`` (so ``q = t`` or ``frakq = -t``)."""
    t = np.asarray(t, dtype=float)
    return np.where(t >= 0, g_positive(eta, m0, np.abs(t)), g_negative(eta, m0, np.abs(t)))


def hopping_term(bc: BoundaryCondition, k):
    """The only k-dependent piece, ``m1 cos k + m2 sin k``."""
    k = np.asarray(k, dtype=float)
    out = bc.m1 * np.cos(k) + bc.m2 * np.sin(k)
    return float(out) if out.ndim == 0 else out


def spectral_reduced(bc: BoundaryCondition, k, eps):
    """Real reduced spectral function; broadcasts over ``k`` and ``eps``."""
    out = np.asarray(hopping_term(bc, k)) - np.asarray(g_function(bc.eta, bc.m0, eps))
    return float(out) if out.ndim == 0 else out


def spectral_negative(bc: BoundaryCondition, k, frakq):
    """Reduced spectral function at ``eps = -frakq**2``."""
    frakq = np.asarray(frakq, dtype=float)
    if np.any(frakq < 0):
        raise ValueError("frakq must be non-negative")
    out = np.asarray(hopping_term(bc, k)) - g_negative(bc.eta, bc.m0, frakq)
    return float(out) if out.ndim == 0 else out
