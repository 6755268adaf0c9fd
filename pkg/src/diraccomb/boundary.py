"""Generalized point interactions on the line.

A point interaction at the origin is fixed by a unitary ``U`` in U(2), acting
through ``(I - U) Psi' = i (I + U) Psi`` on the boundary data
``Psi = (psi(0-), psi(0+))`` and ``Psi' = (psi'(0-), -psi'(0+))``.  This module
converts between the ``(eta, m)`` parametrization of ``U``, the matrix itself,
the four Kurasov couplings ``g``, and the named families used in the literature
(Robin, pseudo-periodic, delta, ...).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .exceptions import NoCayleyFormError, SingularRepresentationError

UNIT_TOL = 1e-12
CLASSIFY_TOL = 1e-10
SINGULAR_TOL = 1e-12
UNITARITY_TOL = 1e-9


@dataclass(frozen=True)
class BoundaryCondition:
    """Canonical ``(eta, m)`` pair with ``eta`` in ``[0, pi)`` and ``|m| = 1``.

    Use :func:`make_boundary` to build one from arbitrary input; the
    constructor only validates.
    """

    eta: float
    m: tuple[float, float, float, float]

    def __post_init__(self):
        m = tuple(float(x) for x in self.m)
        if len(m) != 4:
            raise ValueError("m must have four components")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "eta", float(self.eta))
        if not all(math.isfinite(x) for x in (self.eta, *m)):
            raise ValueError("non-finite boundary parameters")
        if abs(math.fsum(x * x for x in m) - 1.0) > UNIT_TOL:
            raise ValueError(f"m must have unit norm, got |m|^2={sum(x * x for x in m)!r}")
        if not 0.0 <= self.eta < math.pi:
            raise ValueError(f"eta must lie in [0, pi), got {self.eta!r}")

    @property
    def m0(self) -> float:
        return self.m[0]

    @property
    def m1(self) -> float:
        return self.m[1]

    @property
    def m2(self) -> float:
        return self.m[2]

    @property
    def m3(self) -> float:
        return self.m[3]

    def as_array(self) -> np.ndarray:
        return np.array([self.eta, *self.m])


def _fold(eta: float, m: Sequence[float]) -> tuple[float, tuple[float, ...]]:
    # (eta + pi, -m) and (eta, m) give the same U
    m = tuple(m)
    n = math.floor(eta / math.pi)
    eta = eta - n * math.pi
    if n % 2:
        m = tuple(0.0 - x for x in m)
    if eta >= math.pi:
        eta -= math.pi
        m = tuple(0.0 - x for x in m)
    if eta < 0.0:
        eta = 0.0
    return eta, m


def make_boundary(eta: float, m: Sequence[float]) -> BoundaryCondition:
    """Build a canonical boundary condition, renormalizing ``m``."""
    m = np.asarray(m, dtype=float)
    if m.shape != (4,):
        raise ValueError("m must be a real 4-vector")
    if not (np.all(np.isfinite(m)) and math.isfinite(eta)):
        raise ValueError("non-finite boundary parameters")
    norm = float(np.linalg.norm(m))
    if norm == 0.0:
        raise ValueError("m must have non-zero norm")
    if abs(norm - 1.0) > 1e-15:
        m = m / norm
    eta, mt = _fold(float(eta), m.tolist())
    return BoundaryCondition(eta, mt)


def unitary_matrix(bc: BoundaryCondition) -> np.ndarray:
    m0, m1, m2, m3 = bc.m
    inner = np.array([[m0 + 1j * m3, m2 + 1j * m1], [-m2 + 1j * m1, m0 - 1j * m3]])
    return np.exp(1j * bc.eta) * inner


def is_unitary(U: np.ndarray, tol: float = UNIT_TOL) -> bool:
    U = np.asarray(U, dtype=complex)
    return U.shape == (2, 2) and np.abs(U.conj().T @ U - np.eye(2)).max() <= tol


def from_matrix(U) -> BoundaryCondition:
    """Recover the canonical ``(eta, m)`` of a 2x2 unitary matrix."""
    U = np.asarray(U, dtype=complex)
    if U.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    if not is_unitary(U, UNITARITY_TOL):
        raise ValueError("matrix is not unitary")
    eta = 0.5 * float(np.angle(np.linalg.det(U)))
    V = np.exp(-1j * eta) * U
    m0 = 0.5 * (V[0, 0] + V[1, 1]).real
    m3 = 0.5 * (V[0, 0] - V[1, 1]).imag
    m2 = 0.5 * (V[0, 1] - V[1, 0]).real
    m1 = 0.5 * (V[0, 1] + V[1, 0]).imag
    return make_boundary(eta, (m0, m1, m2, m3))


def boundary_distance(a: BoundaryCondition, b: BoundaryCondition) -> float:
    """Max-entry distance between the unitary matrices of ``a`` and ``b``."""
    return float(np.abs(unitary_matrix(a) - unitary_matrix(b)).max())


def same_boundary(a: BoundaryCondition, b: BoundaryCondition, tol: float = 1e-10) -> bool:
    return boundary_distance(a, b) <= tol


# --- Kurasov couplings -------------------------------------------------------


@dataclass(frozen=True)
class Couplings:
    """Kurasov coupling constants ``(g1, g2, g3, g4)``.

    ``at_infinity`` marks the projective points (``m1 + sin(eta) = 0``) where
    no finite vector exists; ``g`` is then all-NaN.
    """

    g: tuple[float, float, float, float]
    at_infinity: bool = False

    def __post_init__(self):
        g = tuple(float(x) for x in self.g)
        if len(g) != 4:
            raise ValueError("g must have four components")
        object.__setattr__(self, "g", g)
        if not self.at_infinity and not all(math.isfinite(x) for x in g):
            raise ValueError("finite couplings must be finite reals")

    @classmethod
    def infinite(cls) -> "Couplings":
        return cls((math.nan,) * 4, at_infinity=True)


def kurasov_forward(bc: BoundaryCondition) -> Couplings:
    m0, m1, m2, m3 = bc.m
    s = m1 + math.sin(bc.eta)
    if abs(s) <= SINGULAR_TOL:
        return Couplings.infinite()
    c = math.cos(bc.eta)
    return Couplings(((m0 + c) / s, -m3 / s, m2 / s, (m0 - c) / s))


def coupling_discriminant(g: Sequence[float]) -> float:
    g1, g2, g3, g4 = g
    return 1.0 + g1 * g4 + g2 * g2 + g3 * g3


def kurasov_inverse(g: Couplings | Sequence[float]) -> BoundaryCondition:
    """Boundary condition realized by finite Kurasov couplings.

    ``(g1 - g4, Delta)`` is proportional to ``(cos eta, sin eta)``, so the
    two-argument arctangent recovers eta up to the ``(eta + pi, -m)`` ambiguity,
    which canonicalization removes. ``Delta = 0`` needs no separate branch.
    """
    if isinstance(g, Couplings):
        if g.at_infinity:
            raise ValueError("couplings at infinity have no finite inverse")
        g = g.g
    g1, g2, g3, g4 = (float(x) for x in g)
    if not all(math.isfinite(x) for x in (g1, g2, g3, g4)):
        raise ValueError("couplings must be finite")
    delta = coupling_discriminant((g1, g2, g3, g4))
    radius = math.hypot(g1 - g4, delta)
    eta = math.atan2(delta, g1 - g4)
    m = (g1 + g4, 2.0 - delta, 2.0 * g3, -2.0 * g2)
    return make_boundary(eta, [x / radius for x in m])


def _finite_g(g: Couplings | Sequence[float]) -> tuple[float, ...]:
    if isinstance(g, Couplings):
        if g.at_infinity:
            raise ValueError("couplings at infinity")
        return g.g
    g = tuple(float(x) for x in g)
    if len(g) != 4 or not all(math.isfinite(x) for x in g):
        raise ValueError("expected four finite couplings")
    return g


def jump_average_matrix(g: Couplings | Sequence[float]) -> np.ndarray:
    """``M_g`` with ``(l[psi'], [psi]) = 2 M_g ({psi}, l{psi'})``."""
    g1, g2, g3, g4 = _finite_g(g)
    return np.array([[g1, -g2 + 1j * g3], [g2 + 1j * g3, g4]])


def transfer_matrix(g: Couplings | Sequence[float]) -> np.ndarray:
    """Matrix mapping ``(psi(0-), psi'(0-))`` to ``(psi(0+), psi'(0+))``."""
    g1, g2, g3, g4 = _finite_g(g)
    den = (1 - 1j * g3) ** 2 - g1 * g4 - g2 * g2
    if abs(den) <= SINGULAR_TOL:
        raise SingularRepresentationError("boundary condition has no transfer-matrix form")
    rest = g1 * g4 + g3 * g3
    return np.array([[(1 + g2) ** 2 + rest, 2 * g4], [2 * g1, (1 - g2) ** 2 + rest]]) / den


def cayley(bc: BoundaryCondition) -> np.ndarray:
    """Hermitian ``C(U) = i (I + U)(I - U)^-1``, so that ``Psi' = C(U) Psi``."""
    m0, m1, m2, m3 = bc.m
    c, s = math.cos(bc.eta), math.sin(bc.eta)
    # det(I - U) = 2 e^{i eta} (cos eta - m0)
    if 2.0 * abs(m0 - c) <= SINGULAR_TOL:
        raise NoCayleyFormError("U has eigenvalue 1")
    return np.array([[-s + m3, m1 - 1j * m2], [m1 + 1j * m2, -s - m3]]) / (m0 - c)


# --- named families ----------------------------------------------------------

FAMILY_ARITY = {
    "robin": 2,
    "pseudo_periodic": 1,
    "imaginary_quasi_periodic": 1,
    "delta": 1,
    "delta_prime": 1,
    "gauge": 1,
    "metric": 1,
    "dirichlet": 0,
    "neumann": 0,
    "periodic": 0,
    "anti_periodic": 0,
    "zaremba": 0,
}

# families whose parameters are angles (converted by --deg on the CLI)
ANGLE_FAMILIES = {"robin", "pseudo_periodic", "imaginary_quasi_periodic"}


@dataclass(frozen=True)
class NamedFamily:
    tag: str
    params: tuple[float, ...] = ()

    def __post_init__(self):
        if self.tag not in FAMILY_ARITY:
            raise ValueError(f"unknown family {self.tag!r}")
        params = tuple(float(p) for p in self.params)
        if len(params) != FAMILY_ARITY[self.tag]:
            raise ValueError(
                f"family {self.tag!r} takes {FAMILY_ARITY[self.tag]} parameter(s), got {len(params)}"
            )
        if not all(math.isfinite(p) for p in params):
            raise ValueError("family parameters must be finite")
        object.__setattr__(self, "params", params)


def named(family: NamedFamily | str, *params: float) -> BoundaryCondition:
    """Boundary condition of a named family, e.g. ``named("delta", 2.0)``."""
    if not isinstance(family, NamedFamily):
        family = NamedFamily(family, params)
    tag, p = family.tag, family.params
    half_pi = math.pi / 2
    if tag == "robin":
        eta, alpha = p
        return make_boundary(eta, (math.cos(alpha), 0.0, 0.0, -math.sin(alpha)))
    if tag == "pseudo_periodic":
        (alpha,) = p
        return make_boundary(half_pi, (0.0, math.cos(alpha), math.sin(alpha), 0.0))
    if tag == "imaginary_quasi_periodic":
        (alpha,) = p
        return make_boundary(half_pi, (0.0, 0.0, math.sin(alpha), math.cos(alpha)))
    if tag == "delta":
        (g1,) = p
        return make_boundary(half_pi - math.atan(g1), (g1, 1.0, 0.0, 0.0))
    if tag == "delta_prime":
        (g2,) = p
        d = 1.0 + g2 * g2
        return make_boundary(half_pi, (0.0, (1.0 - g2 * g2) / d, 0.0, -2.0 * g2 / d))
    if tag == "gauge":
        (g3,) = p
        return named("pseudo_periodic", 2.0 * math.atan(g3))
    if tag == "metric":
        (g4,) = p
        return make_boundary(half_pi + math.atan(g4), (g4, 1.0, 0.0, 0.0))
    if tag == "dirichlet":
        return BoundaryCondition(0.0, (1.0, 0.0, 0.0, 0.0))
    if tag == "neumann":
        return BoundaryCondition(0.0, (-1.0, 0.0, 0.0, 0.0))
    if tag == "periodic":
        return named("pseudo_periodic", 0.0)
    if tag == "anti_periodic":
        return named("pseudo_periodic", math.pi)
    # zaremba
    return named("imaginary_quasi_periodic", 0.0)


class Confinement(str, Enum):
    SYMMETRIC_ROBIN = "symmetric_robin"
    ASYMMETRIC_ROBIN = "asymmetric_robin"
    NON_CONFINING = "non_confining"


def confinement_class(bc: BoundaryCondition, tol: float = CLASSIFY_TOL) -> Confinement:
    """Separated (Robin) conditions are exactly those with diagonal ``U``."""
    m0, m1, m2, m3 = bc.m
    if abs(m1) > tol or abs(m2) > tol:
        return Confinement.NON_CONFINING
    if abs(m3) <= tol and abs(abs(m0) - 1.0) <= tol:
        return Confinement.SYMMETRIC_ROBIN
    return Confinement.ASYMMETRIC_ROBIN


def identify_families(bc: BoundaryCondition, tol: float = 1e-10) -> list[NamedFamily]:
    """Named families (with parameters) that reproduce ``bc``."""
    out = []
    m0, m1, m2, m3 = bc.m
    for tag in ("dirichlet", "neumann", "periodic", "anti_periodic", "zaremba"):
        if same_boundary(named(tag), bc, tol):
            out.append(NamedFamily(tag))
    if abs(m1) <= tol and abs(m2) <= tol:
        alpha = math.atan2(-m3, m0) % (2 * math.pi)
        out.append(NamedFamily("robin", (bc.eta, alpha)))
    if abs(bc.eta - math.pi / 2) <= tol:
        if abs(m0) <= tol and abs(m3) <= tol:
            alpha = math.atan2(m2, m1) % (2 * math.pi)
            out.append(NamedFamily("pseudo_periodic", (alpha,)))
        if abs(m0) <= tol and abs(m1) <= tol:
            alpha = math.atan2(m2, m3) % (2 * math.pi)
            out.append(NamedFamily("imaginary_quasi_periodic", (alpha,)))
    g = kurasov_forward(bc)
    if not g.at_infinity:
        g1, g2, g3, g4 = g.g
        single = [i for i, x in enumerate(g.g) if abs(x) > tol]
        if single == [0]:
            out.append(NamedFamily("delta", (g1,)))
        elif single == [1]:
            out.append(NamedFamily("delta_prime", (g2,)))
        elif single == [2]:
            out.append(NamedFamily("gauge", (g3,)))
        elif single == [3]:
            out.append(NamedFamily("metric", (g4,)))
    return out
