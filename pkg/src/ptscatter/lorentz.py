"""SL(2,C) -> SO(1,3): transfer matrices as Lorentz transformations.

A pair of amplitudes defines the rank-one Hermitian matrix ``X = a a^dagger``;
``M`` acts on it by congruence ``X -> M X M^dagger``, which is a Lorentz
transformation of the Minkowski coordinates ``x^mu = Tr(X sigma^mu) / 2``
(signature ``+---``).  Invisible scatterers map to null rotations.

Generator basis used by :func:`generator_decomposition`: ``K_i`` has ones at
``(0, i)`` and ``(i, 0)``; ``J_1`` has ``(2, 3) = -1, (3, 2) = +1`` and
``J_2`` has ``(1, 3) = -1, (3, 1) = +1``.  These signs make
``Re(rho) (K1 + J2) - Im(rho) (K2 + J1)`` reproduce the null generator entrywise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation
from .scatter import WaveAmplitudes, as_array, require_unimodular

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])

SIGMA = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


def _unit(i, j):
    e = np.zeros((4, 4))
    e[i, j] = 1.0
    return e


K1 = _unit(0, 1) + _unit(1, 0)
K2 = _unit(0, 2) + _unit(2, 0)
K3 = _unit(0, 3) + _unit(3, 0)
J1 = _unit(3, 2) - _unit(2, 3)
J2 = _unit(3, 1) - _unit(1, 3)


@dataclass(frozen=True)
class HermitianState:
    x11: float
    x12: complex
    x22: float

    @property
    def array(self) -> np.ndarray:
        return np.array([[self.x11, self.x12], [np.conj(self.x12), self.x22]], dtype=complex)

    @classmethod
    def from_array(cls, a) -> "HermitianState":
        a = np.asarray(a, dtype=complex)
        if not np.allclose(a, a.conj().T, rtol=0, atol=1e-12 * max(1.0, np.abs(a).max())):
            raise ContractViolation("matrix is not Hermitian")
        return cls(float(a[0, 0].real), complex(a[0, 1]), float(a[1, 1].real))


@dataclass(frozen=True)
class MinkowskiVector:
    x0: float
    x1: float
    x2: float
    x3: float

    @property
    def array(self) -> np.ndarray:
        return np.array([self.x0, self.x1, self.x2, self.x3])

    @classmethod
    def from_array(cls, v) -> "MinkowskiVector":
        return cls(*(float(c) for c in v))

    @property
    def norm(self) -> float:
        """Minkowski square ``x0^2 - x1^2 - x2^2 - x3^2``."""
        return self.x0**2 - self.x1**2 - self.x2**2 - self.x3**2

    def transform(self, lam) -> "MinkowskiVector":
        return MinkowskiVector.from_array(np.asarray(lam) @ self.array)


@dataclass(frozen=True)
class NullGenerator:
    matrix: np.ndarray
    rho: complex

    def exp(self) -> np.ndarray:
        """``exp(N)``; the series stops at ``N^2`` because ``N^3 = 0``."""
        n = self.matrix
        return np.eye(4) + n + n @ n / 2


def hermitian_from_amplitudes(a: WaveAmplitudes) -> HermitianState:
    return HermitianState(abs(a.plus) ** 2, a.plus * np.conj(a.minus), abs(a.minus) ** 2)


def minkowski_coords(x) -> MinkowskiVector:
    a = x.array if isinstance(x, HermitianState) else np.asarray(x, dtype=complex)
    return MinkowskiVector(
        float(0.5 * (a[0, 0] + a[1, 1]).real),
        float(a[0, 1].real),
        float(-a[0, 1].imag),
        float(0.5 * (a[0, 0] - a[1, 1]).real),
    )


def hermitian_from_coords(v: MinkowskiVector) -> HermitianState:
    """Inverse of :func:`minkowski_coords`: ``X = x^mu sigma^mu``."""
    return HermitianState(v.x0 + v.x3, complex(v.x1, -v.x2), v.x0 - v.x3)


def lorentz_from_transfer(m) -> np.ndarray:
    """``Lambda[mu, nu] = Tr(sigma^mu M sigma^nu M^dagger) / 2``.

    ``M`` and ``-M`` give the same matrix.
    """
    a = require_unimodular(m)
    conj = np.einsum("ij,njk,lk->nil", a, SIGMA, a.conj())  # M sigma^nu M^dagger
    lam = 0.5 * np.einsum("mij,nji->mn", SIGMA, conj)
    return lam.real.copy()


def lorentz_defects(lam) -> tuple[float, float]:
    """``(max |L^T g L - g|, |det L - 1|)`` for a candidate Lorentz matrix."""
    lam = np.asarray(lam, dtype=float)
    metric_err = float(np.max(np.abs(lam.T @ METRIC @ lam - METRIC)))
    return metric_err, abs(float(np.linalg.det(lam)) - 1.0)


def is_proper_orthochronous(lam, tol: float = 1e-9) -> bool:
    metric_err, det_err = lorentz_defects(lam)
    return metric_err <= tol and det_err <= tol and lam[0][0] >= 1 - tol


def null_rotation(rho: complex) -> np.ndarray:
    """Image of the invisible-scatterer matrix ``[[1, rho], [0, 1]]``."""
    a, b = complex(rho).real, complex(rho).imag
    h = abs(rho) ** 2 / 2
    return np.array(
        [
            [1 + h, a, -b, -h],
            [a, 1, 0, -a],
            [-b, 0, 1, b],
            [h, a, -b, 1 - h],
        ]
    )


def null_generator(rho: complex) -> NullGenerator:
    a, b = complex(rho).real, complex(rho).imag
    n = np.array(
        [
            [0, a, -b, 0],
            [a, 0, 0, -a],
            [-b, 0, 0, b],
            [0, a, -b, 0],
        ],
        dtype=float,
    )
    return NullGenerator(n, complex(rho))


def generator_decomposition(n) -> tuple[float, float]:
    """Coefficients ``(c1, c2)`` with ``N = c1 (K1 + J2) + c2 (K2 + J1)``.

    For a generator built from ``rho`` this is ``(Re rho, -Im rho)``: the boost
    rapidity and rotation angle of each summand share the same coefficient.
    """
    mat = n.matrix if isinstance(n, NullGenerator) else np.asarray(n, dtype=float)
    c1, c2 = float(mat[0, 1]), float(mat[0, 2])
    rebuilt = c1 * (K1 + J2) + c2 * (K2 + J1)
    if np.max(np.abs(rebuilt - mat)) > 1e-12 * max(1.0, np.max(np.abs(mat))):
        raise ContractViolation("matrix is not in the span of K1+J2 and K2+J1")
    return c1, c2


def killing_invariants(v: MinkowskiVector) -> tuple[float, float, float]:
    """``(x2, x0 - x3, x0^2 - x1^2 - x3^2)``.

    These are conserved by null rotations with real ``rho``; for other
    directions use :func:`flow_invariants`.
    """
    return v.x2, v.x0 - v.x3, v.x0**2 - v.x1**2 - v.x3**2


def flow_invariants(v: MinkowskiVector, rho: complex) -> tuple[float, float, float]:
    """Invariants of the one-parameter flow ``t -> null_rotation(t * rho)``.

    The displacement direction in the ``(x1, x2)`` plane is
    ``(Re rho, -Im rho)``.  Conserved are the transverse component, ``x0 - x3``,
    and ``x0^2 - p^2 - x3^2`` with ``p`` the component along the displacement.
    Reduces to :func:`killing_invariants` for real positive ``rho``.
    """
    rho = complex(rho)
    if rho == 0:
        raise ContractViolation("flow direction rho must be nonzero")
    ux, uy = rho.real / abs(rho), -rho.imag / abs(rho)
    along = ux * v.x1 + uy * v.x2
    across = -uy * v.x1 + ux * v.x2
    return across, v.x0 - v.x3, v.x0**2 - along**2 - v.x3**2


def flow_orbit(v: MinkowskiVector, rho: complex, params) -> np.ndarray:
    """Points ``null_rotation(t * rho) v`` for each ``t`` in ``params``, one per row."""
    x = v.array
    return np.array([null_rotation(t * complex(rho)) @ x for t in params])


def hermitian_congruence(m, x: HermitianState) -> HermitianState:
    a = as_array(m)
    return HermitianState.from_array(a @ x.array @ a.conj().T)
