"""Moebius action of transfer matrices on the Riemann sphere and on hyperbolic half-space."""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import ContractViolation, EverywhereFixed
from .scatter import as_array, require_unimodular

PARABOLIC_TOL = 1e-9


class _Infinity:
    """The point at infinity of the Riemann sphere."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()

RiemannPoint = Union[complex, _Infinity]


def is_infinity(p) -> bool:
    return p is INFINITY


@dataclass(frozen=True)
class HalfSpacePoint:
    """Point of the upper half-space model: boundary coordinate ``w`` and height ``z``."""

    w: complex
    z: float

    def __post_init__(self):
        object.__setattr__(self, "w", complex(self.w))
        object.__setattr__(self, "z", float(self.z))
        if not self.z > 0:
            raise ContractViolation(f"half-space height must be positive, got {self.z}")


class MoebiusType(str, enum.Enum):
    IDENTITY = "Identity"
    ELLIPTIC = "Elliptic"
    HYPERBOLIC = "Hyperbolic"
    PARABOLIC = "Parabolic"
    LOXODROMIC = "Loxodromic"


@dataclass(frozen=True)
class MoebiusClassification:
    label: MoebiusType
    trace_sq: complex
    fixed_points: tuple
    canonical_parameter: complex


def mobius_apply(m, p: RiemannPoint) -> RiemannPoint:
    """``w -> (m11 w + m12) / (m21 w + m22)``, total on the Riemann sphere."""
    a = as_array(m)
    if not np.any(a):
        raise ContractViolation("the zero matrix does not define a Moebius map")
    (m11, m12), (m21, m22) = a
    if p is INFINITY:
        return INFINITY if m21 == 0 else complex(m11 / m21)
    w = complex(p)
    den = m21 * w + m22
    if den == 0:
        return INFINITY
    return complex((m11 * w + m12) / den)


def _normalised(m) -> np.ndarray:
    a = as_array(m)
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    if det == 0:
        raise ContractViolation("singular matrix does not define a Moebius map")
    return a / cmath.sqrt(det)


def mobius_apply_halfspace(m, p: HalfSpacePoint) -> HalfSpacePoint:
    """Poincare extension of the Moebius map to the upper half-space.

    Closed form for ``[[a, b], [c, d]]`` with unit determinant::

        w' = ((a w + b) conj(c w + d) + a conj(c) z^2) / D
        z' = z / D,        D = |c w + d|^2 + |c|^2 z^2
    """
    (a, b), (c, d) = _normalised(m)
    w, z = p.w, p.z
    cwd = c * w + d
    den = abs(cwd) ** 2 + abs(c) ** 2 * z * z
    w_new = ((a * w + b) * cwd.conjugate() + a * c.conjugate() * z * z) / den
    return HalfSpacePoint(w_new, z / den)


# elementary isometries; composing them gives an independent route to the closed form


def translate(p: HalfSpacePoint, lam: complex) -> HalfSpacePoint:
    return HalfSpacePoint(p.w + lam, p.z)


def dilate(p: HalfSpacePoint, lam: complex) -> HalfSpacePoint:
    return HalfSpacePoint(lam * p.w, abs(lam) * p.z)


def invert(p: HalfSpacePoint) -> HalfSpacePoint:
    r2 = abs(p.w) ** 2 + p.z**2
    return HalfSpacePoint(-p.w.conjugate() / r2, p.z / r2)


def hyperbolic_distance(p: HalfSpacePoint, q: HalfSpacePoint) -> float:
    """Distance for the metric ``|dx| / z``.

    Uses ``sinh(d/2) = |p - q| / (2 sqrt(z_p z_q))``, which stays accurate for
    nearby points where the arccosh form loses digits.
    """
    chord2 = abs(p.w - q.w) ** 2 + (p.z - q.z) ** 2
    return 2 * math.asinh(math.sqrt(chord2) / (2 * math.sqrt(p.z * q.z)))


def _is_scalar_identity(a: np.ndarray, tol: float) -> bool:
    return bool(
        np.max(np.abs(a - np.eye(2))) <= tol or np.max(np.abs(a + np.eye(2))) <= tol
    )


def fixed_points(m, tol: float = PARABOLIC_TOL) -> tuple[RiemannPoint, Optional[RiemannPoint]]:
    """Fixed points of the Moebius map; the second entry is None for a parabolic map."""
    a = _normalised(m)
    if _is_scalar_identity(a, tol):
        raise EverywhereFixed("every point is fixed by the identity map")
    (m11, m12), (m21, m22) = a
    tr = m11 + m22
    disc2 = tr * tr - 4
    parabolic = abs(disc2) <= tol
    if m21 == 0:
        if m11 == m22 or parabolic:
            return INFINITY, None
        return INFINITY, complex(m12 / (m22 - m11))
    b = m11 - m22
    if parabolic:
        return complex(b / (2 * m21)), None
    disc = cmath.sqrt(disc2)
    # pick the sign without cancellation, then use w1 * w2 = -m12 / m21
    big = b + disc if abs(b + disc) >= abs(b - disc) else b - disc
    w1 = complex(big / (2 * m21))
    w2 = complex(-2 * m12 / big)
    return w1, w2


def classify_mobius(m, tol: float = PARABOLIC_TOL) -> MoebiusClassification:
    """Trace classification of a unimodular matrix.

    Real traces give elliptic (tr^2 < 4), hyperbolic (tr^2 > 4) or parabolic
    (tr^2 = 4); a non-real trace is loxodromic.  The canonical parameter is the
    rotation angle theta, the squeeze xi, the displacement lambda or the complex
    multiplier exponent, respectively.  For a parabolic map lambda is the larger
    off-diagonal entry after fixing the sign so that tr = +2; for the invisible
    scatterer ``[[1, r], [0, 1]]`` this is ``r`` itself.
    """
    a = require_unimodular(m)
    tr = complex(a[0, 0] + a[1, 1])
    tr2 = tr * tr
    if _is_scalar_identity(a, tol):
        return MoebiusClassification(MoebiusType.IDENTITY, tr2, (), 0j)
    points = tuple(p for p in fixed_points(a, tol) if p is not None)
    if abs(tr2 - 4) <= tol:
        sign = 1 if tr.real > 0 else -1
        lam = a[0, 1] if abs(a[0, 1]) >= abs(a[1, 0]) else a[1, 0]
        return MoebiusClassification(MoebiusType.PARABOLIC, tr2, points, complex(sign * lam))
    if abs(tr.imag) <= tol * max(1.0, abs(tr)):
        t = tr.real
        if t * t < 4:
            theta = 2 * math.acos(t / 2)
            return MoebiusClassification(MoebiusType.ELLIPTIC, tr2, points, complex(theta))
        xi = 2 * math.acosh(abs(t) / 2)
        return MoebiusClassification(MoebiusType.HYPERBOLIC, tr2, points, complex(xi))
    lam = 2 * cmath.acosh(tr / 2)
    if lam.real < 0:
        lam = -lam
    return MoebiusClassification(MoebiusType.LOXODROMIC, tr2, points, lam)
