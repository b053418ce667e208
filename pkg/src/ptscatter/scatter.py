"""Transfer-matrix algebra for one-dimensional scattering.

Amplitudes are coefficients of plane waves ``exp(+-ikx)`` referenced to the
global origin, and the transfer matrix maps the amplitudes on the left of a
scatterer to those on its right::

    (B+, B-) = M (A+, A-)

With this convention a region with zero potential has the identity as its
transfer matrix, so adjacent pieces compose by plain matrix multiplication.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ContractViolation, SpectralSingularityError

#: |m22| below this is treated as an exact zero of m22.
SINGULARITY_THRESHOLD = 1e-12

#: Tolerance on |det M - 1| used when checking unimodular preconditions.
UNIMODULAR_TOL = 1e-6


def principal_sqrt(z: complex) -> complex:
    """Principal square root with the cut mapped to the upper half (Im >= 0)."""
    z = complex(z)
    # -0.0 imaginary parts would otherwise land on the lower lip of the cut
    return cmath.sqrt(complex(z.real, z.imag + 0.0))


@dataclass(frozen=True)
class WaveAmplitudes:
    """Right-moving (``plus``) and left-moving (``minus``) amplitudes on one side."""

    plus: complex
    minus: complex

    def as_vector(self) -> np.ndarray:
        return np.array([self.plus, self.minus], dtype=complex)


@dataclass(frozen=True)
class TransferMatrix:
    m11: complex
    m12: complex
    m21: complex
    m22: complex
    k: Optional[complex] = None

    def __post_init__(self):
        for name in ("m11", "m12", "m21", "m22"):
            value = complex(getattr(self, name))
            if not cmath.isfinite(value):
                raise ContractViolation(f"transfer matrix entry {name} is not finite: {value}")
            object.__setattr__(self, name, value)
        if self.k is not None:
            object.__setattr__(self, "k", complex(self.k))

    @classmethod
    def from_array(cls, a, k=None) -> "TransferMatrix":
        a = np.asarray(a, dtype=complex)
        if a.shape != (2, 2):
            raise ContractViolation(f"expected a 2x2 matrix, got shape {a.shape}")
        return cls(a[0, 0], a[0, 1], a[1, 0], a[1, 1], k)

    @classmethod
    def identity(cls, k=None) -> "TransferMatrix":
        return cls(1, 0, 0, 1, k)

    @property
    def array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]], dtype=complex)

    @property
    def det(self) -> complex:
        return self.m11 * self.m22 - self.m12 * self.m21

    @property
    def trace(self) -> complex:
        return self.m11 + self.m22

    def apply(self, a: WaveAmplitudes) -> WaveAmplitudes:
        """Map left-side amplitudes to right-side amplitudes."""
        return WaveAmplitudes(
            self.m11 * a.plus + self.m12 * a.minus,
            self.m21 * a.plus + self.m22 * a.minus,
        )


@dataclass(frozen=True)
class ScatterCoefficients:
    t: complex
    r_left: complex
    r_right: complex

    @property
    def tau(self) -> float:
        """Transmission phase."""
        return cmath.phase(self.t)

    @property
    def rho_left(self) -> float:
        return cmath.phase(self.r_left)

    @property
    def rho_right(self) -> float:
        return cmath.phase(self.r_right)


@dataclass(frozen=True)
class ScatteringMatrix:
    """Maps incoming amplitudes (A+, B-) to outgoing amplitudes (B+, A-)."""

    s11: complex
    s12: complex
    s21: complex
    s22: complex

    @property
    def array(self) -> np.ndarray:
        return np.array([[self.s11, self.s12], [self.s21, self.s22]], dtype=complex)


def as_array(m) -> np.ndarray:
    """Return the 2x2 complex array behind a TransferMatrix or array-like."""
    if isinstance(m, TransferMatrix):
        return m.array
    a = np.asarray(m, dtype=complex)
    if a.shape != (2, 2):
        raise ContractViolation(f"expected a 2x2 matrix, got shape {a.shape}")
    return a


def require_unimodular(m, tol=UNIMODULAR_TOL):
    a = as_array(m)
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    if abs(det - 1) > tol:
        raise ContractViolation(f"matrix is not unimodular: det = {det}")
    return a


def _same_k(k1, k2) -> bool:
    if k1 is None or k2 is None:
        return True
    return abs(k1 - k2) <= 1e-12 * max(1.0, abs(k1), abs(k2))


def compose(left_piece: TransferMatrix, right_piece: TransferMatrix) -> TransferMatrix:
    """Transfer matrix of two adjacent scatterers, ``left_piece`` spatially on the left.

    Amplitudes pass through the left piece first, so the product is
    ``right_piece @ left_piece``.
    """
    if not _same_k(left_piece.k, right_piece.k):
        raise ContractViolation(
            f"cannot compose matrices evaluated at different wavenumbers "
            f"({left_piece.k} and {right_piece.k})"
        )
    k = left_piece.k if left_piece.k is not None else right_piece.k
    return TransferMatrix.from_array(right_piece.array @ left_piece.array, k)


def compose_chain(pieces) -> TransferMatrix:
    """Compose a left-to-right sequence of transfer matrices."""
    pieces = list(pieces)
    if not pieces:
        return TransferMatrix.identity()
    total = pieces[0]
    for piece in pieces[1:]:
        total = compose(total, piece)
    return total


def _guard_m22(m: TransferMatrix):
    if abs(m.m22) < SINGULARITY_THRESHOLD:
        raise SpectralSingularityError(m.k, abs(m.m22))


def coefficients_from_transfer(m: TransferMatrix) -> ScatterCoefficients:
    _guard_m22(m)
    return ScatterCoefficients(
        t=1 / m.m22,
        r_left=-m.m21 / m.m22,
        r_right=m.m12 / m.m22,
    )


def transfer_from_coefficients(c: ScatterCoefficients, k=None) -> TransferMatrix:
    """Inverse of :func:`coefficients_from_transfer`.

    ``m11`` is fixed by unimodularity, so the determinant is one by construction.
    """
    if c.t == 0:
        raise ContractViolation("transmission must be nonzero to build a transfer matrix")
    t = complex(c.t)
    return TransferMatrix(
        m11=t - c.r_left * c.r_right / t,
        m12=c.r_right / t,
        m21=-c.r_left / t,
        m22=1 / t,
        k=k,
    )


def scattering_from_transfer(m: TransferMatrix) -> ScatteringMatrix:
    c = coefficients_from_transfer(m)
    return ScatteringMatrix(s11=c.t, s12=c.r_right, s21=c.r_left, s22=c.t)


def s_eigenvalues(m: TransferMatrix, guard: bool = True) -> tuple[complex, complex]:
    """Eigenvalues ``(s+, s-)`` of the scattering matrix.

    At a spectral singularity ``s+`` diverges while ``s-`` tends to ``m11 / 2``.
    With ``guard=False`` the pair is evaluated even when m22 is below the
    singularity threshold (``s+`` is infinite if m22 is exactly zero).
    """
    if guard:
        _guard_m22(m)
    radical = principal_sqrt(1 - m.m11 * m.m22)
    # (1 - r) / m22 == m11 / (1 + r); the right side avoids cancellation as m22 -> 0
    # and |1 + r| >= 1 on the principal branch.
    s_minus = m.m11 / (1 + radical)
    if m.m22 == 0:
        return complex("inf"), s_minus
    return (1 + radical) / m.m22, s_minus


def reciprocity_check(c_left_incidence: complex, c_right_incidence: complex) -> float:
    """Distance between the transmissions for left and right incidence."""
    return abs(complex(c_left_incidence) - complex(c_right_incidence))
