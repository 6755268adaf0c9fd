"""Symmetries of the boundary matrix and isospectrality checks.

The group of automorphisms and anti-automorphisms of U(2) acts on a boundary
matrix as ``U -> nu d(U) nu^dagger`` with ``nu`` in SU(2)/Z2 and ``d`` one of
``id`` (identity), ``kappa`` (complex conjugation), ``iota`` (adjoint) and
``tau`` (transpose). Writing ``U = e^{i eta}(m0 + i m.sigma)``, the inner part
rotates the 3-vector ``(m1, m2, m3)`` and leaves ``eta`` and ``m0`` alone, which
is why the named transformations below are computed directly in coordinates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence, Union

import numpy as np

from .boundary import (
    BoundaryCondition,
    Confinement,
    confinement_class,
    from_matrix,
    unitary_matrix,
)
from .exceptions import NonBijectiveShiftError, ResolutionError
from .spectral import bz_fold, g_function, hopping_term

# --- group elements ----------------------------------------------------------


class Discrete(str, Enum):
    ID = "id"
    KAPPA = "kappa"
    IOTA = "iota"
    TAU = "tau"

    @property
    def is_anti(self) -> bool:
        # adjoint and transpose reverse products
        return self in (Discrete.IOTA, Discrete.TAU)

    def __mul__(self, other: "Discrete") -> "Discrete":
        # Klein four-group: every element is an involution, the product of two
        # distinct non-identity elements is the third
        if self is Discrete.ID:
            return other
        if other is Discrete.ID:
            return self
        if self is other:
            return Discrete.ID
        (rest,) = {Discrete.KAPPA, Discrete.IOTA, Discrete.TAU} - {self, other}
        return rest


def _apply_discrete(d: Discrete, U: np.ndarray) -> np.ndarray:
    if d is Discrete.KAPPA:
        return U.conj()
    if d is Discrete.IOTA:
        return U.conj().T
    if d is Discrete.TAU:
        return U.T
    return U


def _twist(d: Discrete, nu: np.ndarray) -> np.ndarray:
    # d(nu X nu^dagger) = tw(nu) d(X) tw(nu)^dagger
    return nu.conj() if d in (Discrete.KAPPA, Discrete.TAU) else nu


def su2(delta: float, n: Sequence[float]) -> np.ndarray:
    """``exp(-i (delta/2) n.sigma)``."""
    nx, ny, nz = n
    c, s = math.cos(delta / 2), math.sin(delta / 2)
    return np.array(
        [[c - 1j * s * nz, -1j * s * nx - s * ny], [-1j * s * nx + s * ny, c + 1j * s * nz]]
    )


def _axis_angle(nu: np.ndarray, tol: float = 1e-14) -> tuple[float, tuple[float, float, float]]:
    """Canonical ``(delta, n)`` of ``+-nu`` with ``delta`` in ``[0, pi]``."""
    c = nu[0, 0].real
    v = np.array([-nu[0, 1].imag, nu[1, 0].real, -nu[0, 0].imag])  # sin(delta/2) n
    if c < 0:
        c, v = -c, -v
    s = float(np.linalg.norm(v))
    if s <= tol:
        return 0.0, (0.0, 0.0, 1.0)
    delta = 2.0 * math.atan2(s, c)
    n = v / s
    if abs(delta - math.pi) <= 1e-12:
        delta = math.pi
        first = next(x for x in n if abs(x) > 1e-12)
        if first < 0:
            n = -n
    return delta, (float(n[0]), float(n[1]), float(n[2]))


@dataclass(frozen=True)
class SymmetryElement:
    """Element ``(nu(delta, n), d)`` acting as ``U -> nu d(U) nu^dagger``."""

    delta: float = 0.0
    n: tuple[float, float, float] = (0.0, 0.0, 1.0)
    discrete: Discrete = Discrete.ID

    def __post_init__(self):
        n = np.asarray(self.n, dtype=float)
        if n.shape != (3,) or abs(np.linalg.norm(n) - 1.0) > 1e-12:
            raise ValueError("axis n must be a unit 3-vector")
        if not math.isfinite(self.delta):
            raise ValueError("delta must be finite")
        delta, axis = _axis_angle(su2(float(self.delta), n))
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "n", axis)
        object.__setattr__(self, "discrete", Discrete(self.discrete))

    @classmethod
    def from_su2(cls, nu: np.ndarray, discrete: Discrete | str = Discrete.ID) -> "SymmetryElement":
        delta, n = _axis_angle(np.asarray(nu, dtype=complex))
        return cls(delta, n, Discrete(discrete))

    @property
    def inner(self) -> np.ndarray:
        return su2(self.delta, self.n)

    def matrix(self, U: np.ndarray) -> np.ndarray:
        nu = self.inner
        return nu @ _apply_discrete(self.discrete, np.asarray(U, dtype=complex)) @ nu.conj().T

    def __matmul__(self, other: "SymmetryElement") -> "SymmetryElement":
        return compose(self, other)


IDENTITY = SymmetryElement()


def compose(e1: SymmetryElement, e2: SymmetryElement) -> SymmetryElement:
    """The element acting as ``e1`` after ``e2``."""
    nu = e1.inner @ _twist(e1.discrete, e2.inner)
    return SymmetryElement.from_su2(nu, e1.discrete * e2.discrete)


def inverse(e: SymmetryElement) -> SymmetryElement:
    return SymmetryElement.from_su2(_twist(e.discrete, e.inner.conj().T), e.discrete)


def apply_symmetry(e: SymmetryElement, bc: BoundaryCondition) -> BoundaryCondition:
    return from_matrix(e.matrix(unitary_matrix(bc)))


def oblique_element(delta: float) -> SymmetryElement:
    return SymmetryElement(delta, (0.0, 0.0, 1.0))


def vertical_element(delta: float, k: float) -> SymmetryElement:
    return SymmetryElement(delta, (math.cos(k), math.sin(k), 0.0))


def mirror_element() -> SymmetryElement:
    # sigma_x U^T sigma_x; sigma_x equals nu(pi, x) up to a phase
    return SymmetryElement(math.pi, (1.0, 0.0, 0.0), Discrete.TAU)


# --- named transformations -----------------------------------------------------


def _rotate(v: np.ndarray, axis: np.ndarray, delta: float) -> np.ndarray:
    c, s = math.cos(delta), math.sin(delta)
    return v * c + np.cross(axis, v) * s + axis * float(axis @ v) * (1 - c)


def _with_vector(bc: BoundaryCondition, v: Sequence[float]) -> BoundaryCondition:
    # rotations keep eta and m0; renormalize only the rotated part so m0 stays bit-exact
    v = np.asarray(v, dtype=float)
    old = math.sqrt(math.fsum(x * x for x in bc.m[1:]))
    new = float(np.linalg.norm(v))
    if new > 0 and old > 0:
        v = v * (old / new)
    m = (bc.m0, float(v[0]), float(v[1]), float(v[2]))
    if abs(math.fsum(x * x for x in m) - 1.0) > 1e-12:
        raise ArithmeticError("rotation lost unit norm")
    return BoundaryCondition(bc.eta, m)


def vertical_transform(bc: BoundaryCondition, delta: float, k: float) -> BoundaryCondition:
    """Conjugation by ``exp(-i (delta/2) sigma_k)``: rotates ``m`` about ``(cos k, sin k, 0)``."""
    axis = np.array([math.cos(k), math.sin(k), 0.0])
    return _with_vector(bc, _rotate(np.array(bc.m[1:]), axis, delta))


def oblique_transform(bc: BoundaryCondition, delta: float) -> BoundaryCondition:
    """Conjugation by ``exp(-i (delta/2) sigma_z)``: rotates ``(m1, m2)`` by ``delta``."""
    c, s = math.cos(delta), math.sin(delta)
    m1, m2 = bc.m1, bc.m2
    return _with_vector(bc, (m1 * c - m2 * s, m2 * c + m1 * s, bc.m3))


def mirror_transform(bc: BoundaryCondition) -> BoundaryCondition:
    """``sigma_x U^T sigma_x``, i.e. ``m3 -> -m3``."""
    return BoundaryCondition(bc.eta, (bc.m0, bc.m1, bc.m2, 0.0 - bc.m3))


def anti_vertical_transform(bc: BoundaryCondition, delta: float, k: float) -> BoundaryCondition:
    return mirror_transform(vertical_transform(bc, delta, k))


def anti_oblique_transform(bc: BoundaryCondition, delta: float) -> BoundaryCondition:
    return mirror_transform(oblique_transform(bc, delta))


def oblique_orbit(bc: BoundaryCondition, n_samples: int) -> list[BoundaryCondition]:
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    return [oblique_transform(bc, 2 * math.pi * j / n_samples) for j in range(n_samples)]


# --- displacement profiles and invariance checks -------------------------------


@dataclass(frozen=True)
class DisplacementProfile:
    """Displacement ``delta(k) = f(k) - k``, constant or sampled on ``[-pi, pi)``.

    Sampled values sit on ``k_j = -pi + 2 pi j / N`` and are linearly
    interpolated (periodically) in between.
    """

    kind: str = "constant"
    value: float = 0.0
    samples: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in ("constant", "sampled"):
            raise ValueError("kind must be 'constant' or 'sampled'")
        if self.kind == "sampled":
            samples = tuple(float(x) for x in self.samples)
            if len(samples) < 2:
                raise ValueError("a sampled profile needs at least two samples")
            if not all(math.isfinite(x) for x in samples):
                raise ValueError("samples must be finite")
            object.__setattr__(self, "samples", samples)
        elif not math.isfinite(self.value):
            raise ValueError("value must be finite")

    @classmethod
    def constant(cls, value: float) -> "DisplacementProfile":
        return cls("constant", float(value))

    @classmethod
    def sampled(cls, samples: Sequence[float]) -> "DisplacementProfile":
        return cls("sampled", 0.0, tuple(samples))

    @property
    def grid(self) -> np.ndarray:
        n = len(self.samples)
        return -np.pi + 2 * np.pi * np.arange(n) / n

    def __call__(self, k):
        k = np.asarray(k, dtype=float)
        if self.kind == "constant":
            out = np.full(k.shape, self.value)
        else:
            grid = self.grid
            out = np.interp(bz_fold(k), grid, np.asarray(self.samples), period=2 * np.pi)
        return float(out) if out.ndim == 0 else out

    def check_bijective(self) -> None:
        """Raise :class:`NonBijectiveShiftError` unless ``k -> k + delta(k)`` is a bijection."""
        if self.kind == "constant":
            return
        images = np.asarray(bz_fold(self.grid + np.asarray(self.samples)))
        steps = np.diff(np.append(images, images[0]))
        descents = int(np.count_nonzero(steps < 0))
        if np.any(steps == 0) or descents != 1:
            raise NonBijectiveShiftError("displacement does not induce a bijection of the zone")

    def to_dict(self) -> dict:
        if self.kind == "constant":
            return {"kind": "constant", "value": self.value}
        return {"kind": "sampled", "samples": list(self.samples)}


@dataclass(frozen=True)
class InvarianceReport:
    max_abs_deviation: float
    max_rel_deviation: float
    k_samples: int
    eps_samples: int
    eps_range: tuple[float, float]
    shift: DisplacementProfile = field(default_factory=DisplacementProfile)

    def holds(self, tol: float = 1e-12) -> bool:
        return self.max_abs_deviation <= tol

    def to_dict(self) -> dict:
        return {
            "max_abs_deviation": self.max_abs_deviation,
            "max_rel_deviation": self.max_rel_deviation,
            "k_samples": self.k_samples,
            "eps_samples": self.eps_samples,
            "eps_range": list(self.eps_range),
            "shift": self.shift.to_dict(),
        }


BoundaryProfile = Union[BoundaryCondition, Callable[[float], BoundaryCondition]]


def check_spectral_invariance(
    bc: BoundaryCondition,
    bc2: BoundaryProfile,
    shift: DisplacementProfile | None = None,
    k_samples: int = 101,
    eps_samples: int = 201,
    q_max: float = 6 * math.pi,
    frakq_max: float = 12.0,
) -> InvarianceReport:
    """Compare ``F(bc2, k, eps)`` with ``F(bc, k + delta(k), eps)`` on a grid.

    ``bc2`` may also be a function of ``k`` (per-fiber conditions such as a
    vertical transform with k-dependent angle). The hopping and ``G`` parts
    are differenced separately: ``G`` reaches ~1e7 at the bottom of the
    default window, and subtracting it first would swamp a 1e-12 comparison
    with rounding noise.
    """
    shift = shift or DisplacementProfile.constant(0.0)
    shift.check_bijective()
    if k_samples < 1 or eps_samples < 1:
        raise ValueError("grid sizes must be positive")
    ks = -np.pi + 2 * np.pi * np.arange(k_samples) / k_samples
    eps = np.linspace(-frakq_max**2, q_max**2, eps_samples)
    fk = np.asarray(bz_fold(ks + np.asarray(shift(ks))))

    g_ref = np.asarray(g_function(bc.eta, bc.m0, eps))
    p_ref = np.asarray(hopping_term(bc, fk))
    if isinstance(bc2, BoundaryCondition):
        p_new = np.asarray(hopping_term(bc2, ks))
        g_new = np.broadcast_to(np.asarray(g_function(bc2.eta, bc2.m0, eps)), (k_samples, eps_samples))
    else:
        fibers = [bc2(float(k)) for k in ks]
        p_new = np.array([hopping_term(b, float(k)) for b, k in zip(fibers, ks)])
        g_new = np.array([g_function(b.eta, b.m0, eps) for b in fibers])
    dev = np.abs((p_new - p_ref)[:, None] - (g_new - g_ref[None, :]))
    scale = np.maximum(1.0, np.abs(p_ref[:, None] - g_ref[None, :]))
    return InvarianceReport(
        max_abs_deviation=float(dev.max()),
        max_rel_deviation=float((dev / scale).max()),
        k_samples=k_samples,
        eps_samples=eps_samples,
        eps_range=(float(eps[0]), float(eps[-1])),
        shift=shift,
    )


# --- hearability -------------------------------------------------------------


class Hearability(str, Enum):
    SPECTRALLY_UNIQUE = "spectrally_unique"
    MIRROR_PAIR_ONLY = "mirror_pair_only"
    NOT_HEARD = "not_heard"


HEARABILITY_CAVEAT = (
    "The verdict only accounts for isospectral maps generated by automorphisms and "
    "anti-automorphisms of U(2). Whether other isospectral maps exist for conditions "
    "that are not of Robin type is an open question, so 'spectrally_unique' is not a "
    "completeness claim beyond that group."
)

_EXPLANATIONS = {
    Hearability.SPECTRALLY_UNIQUE: (
        "U is a multiple of the identity (symmetric Robin): it is fixed by every inner "
        "automorphism and by the mirror map, so no other comb in the group orbit shares its spectrum."
    ),
    Hearability.MIRROR_PAIR_ONLY: (
        "U is diagonal but not scalar (asymmetric Robin): every oblique rotation fixes it, "
        "and its only isospectral partner in the group orbit is its mirror image."
    ),
    Hearability.NOT_HEARD: (
        "U has off-diagonal entries: oblique rotations produce a one-parameter family of "
        "distinct combs with the same spectrum."
    ),
}


def hearability(bc: BoundaryCondition) -> Hearability:
    return {
        Confinement.SYMMETRIC_ROBIN: Hearability.SPECTRALLY_UNIQUE,
        Confinement.ASYMMETRIC_ROBIN: Hearability.MIRROR_PAIR_ONLY,
        Confinement.NON_CONFINING: Hearability.NOT_HEARD,
    }[confinement_class(bc)]


def hearability_explanation(verdict: Hearability) -> str:
    return _EXPLANATIONS[Hearability(verdict)]


# --- Fourier modes of k-dependent couplings ------------------------------------


def coupling_fourier_modes(samples: Sequence[float] | DisplacementProfile, n_max: int) -> np.ndarray:
    """``g_n = (1/N) sum_j exp(i k_j n) g(k_j)`` for ``n = -n_max .. n_max``.

    ``samples`` are values on ``k_j = -pi + 2 pi j / N``.
    """
    if isinstance(samples, DisplacementProfile):
        if samples.kind != "sampled":
            raise ValueError("a constant profile has no sample grid; pass samples explicitly")
        samples = samples.samples
    g = np.asarray(samples, dtype=float)
    if g.ndim != 1:
        raise ValueError("samples must be one-dimensional")
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    N = g.size
    if N < 2 * n_max + 1:
        raise ResolutionError(f"{N} samples cannot resolve {2 * n_max + 1} modes")
    ks = -np.pi + 2 * np.pi * np.arange(N) / N
    ns = np.arange(-n_max, n_max + 1)
    return np.exp(1j * np.outer(ns, ks)) @ g / N
