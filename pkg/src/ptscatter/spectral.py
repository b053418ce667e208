"""Spectral singularities, bound states, PT symmetry and unidirectional invisibility."""

from __future__ import annotations

import cmath
import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Callable, Optional

import numpy as np

from .errors import ContractViolation, SearchFailure, SpectralSingularityError
from .potentials import DEFAULT_RTOL, Potential, transfer_of_potential
from .scatter import (
    ScatterCoefficients,
    TransferMatrix,
    coefficients_from_transfer,
    require_unimodular,
)

ROOT_RESIDUAL = 1e-8
TOL_UNIT = 1e-6
TOL_NONZERO = 1e-3


class SingularityKind(str, enum.Enum):
    SPECTRAL_SINGULARITY = "SpectralSingularity"
    BOUND_STATE = "BoundState"


class InvisibilityLabel(str, enum.Enum):
    LEFT_INVISIBLE = "LeftInvisible"
    RIGHT_INVISIBLE = "RightInvisible"
    LEFT_REFLECTIONLESS = "LeftReflectionless"
    RIGHT_REFLECTIONLESS = "RightReflectionless"
    NOT_INVISIBLE = "NotInvisible"


@dataclass(frozen=True)
class SpectrumRow:
    k: float
    matrix: TransferMatrix
    coefficients: Optional[ScatterCoefficients]
    m22_abs: float

    @property
    def singular(self) -> bool:
        """True when m22 vanished and the coefficients are undefined."""
        return self.coefficients is None


@dataclass(frozen=True)
class SpectrumScan:
    rows: tuple[SpectrumRow, ...]

    @property
    def k(self) -> np.ndarray:
        return np.array([r.k for r in self.rows])

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)


@dataclass(frozen=True)
class SingularityReport:
    k_star: complex
    residual: float
    kind: SingularityKind


@dataclass(frozen=True)
class InvisibilityVerdict:
    label: InvisibilityLabel
    residuals: tuple[float, float, float, float]  # |m11-1|, |m22-1|, |m12|, |m21|
    defective: bool


# -- scans ----------------------------------------------------------------------


def _row(p: Potential, k: float, rtol: float) -> SpectrumRow:
    m = transfer_of_potential(p, k, rtol=rtol)
    try:
        c = coefficients_from_transfer(m)
    except SpectralSingularityError:
        c = None
    return SpectrumRow(float(k), m, c, abs(m.m22))


def scan_spectrum(p: Potential, k_min: float, k_max: float, n: int,
                  rtol: float = DEFAULT_RTOL, workers: int = 1) -> SpectrumScan:
    """Evaluate the scattering data on ``n`` evenly spaced real wavenumbers.

    With ``workers > 1`` the k-points are farmed out to a process pool; rows
    always come back in ascending k.
    """
    if not (0 < k_min < k_max):
        raise ContractViolation(f"need 0 < k_min < k_max, got {k_min}, {k_max}")
    if n < 2:
        raise ContractViolation("a scan needs at least two points")
    ks = np.linspace(k_min, k_max, n)
    job = partial(_row, p, rtol=rtol)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(job, ks))
    else:
        rows = [job(k) for k in ks]
    return SpectrumScan(tuple(rows))


# -- root finding ---------------------------------------------------------------


def _m22(p: Potential, k: complex, rtol: float) -> complex:
    return transfer_of_potential(p, k, rtol=rtol).m22


def _diff_step(k: complex) -> float:
    return 1e-7 * max(1.0, abs(k))


def _polish_real(f: Callable[[float], complex], k0: float, max_iter: int = 60) -> float:
    """Gauss-Newton on the real line for a complex function of a real variable.

    Drives Re f and Im f to zero jointly; converges quadratically at a
    genuine real zero and stalls at the closest approach otherwise.
    """
    k = float(k0)
    for _ in range(max_iter):
        h = _diff_step(k)
        fk = f(k)
        df = (f(k + h) - f(k - h)) / (2 * h)
        denom = abs(df) ** 2
        if denom == 0:
            break
        step = (df.conjugate() * fk).real / denom
        k -= step
        if abs(step) <= 1e-15 * max(1.0, abs(k)):
            break
    return k


def find_spectral_singularities(p: Potential, k_min: float, k_max: float, n_scan: int = 400,
                                residual_tol: float = ROOT_RESIDUAL,
                                rtol: float = DEFAULT_RTOL) -> list[SingularityReport]:
    """Real zeros of m22 (lasing thresholds) in ``[k_min, k_max]``."""
    if not (0 < k_min < k_max):
        raise ContractViolation(f"need 0 < k_min < k_max, got {k_min}, {k_max}")
    f = partial(_m22, p, rtol=rtol)
    ks = np.linspace(k_min, k_max, n_scan)
    mags = np.array([abs(f(k)) for k in ks])
    candidates = [
        ks[i] for i in range(n_scan)
        if (i == 0 or mags[i] <= mags[i - 1]) and (i == n_scan - 1 or mags[i] <= mags[i + 1])
    ]
    roots: list[SingularityReport] = []
    for k0 in candidates:
        k = _polish_real(f, k0)
        if not (k_min <= k <= k_max):
            continue
        residual = abs(f(k))
        if residual > residual_tol:
            continue
        if any(abs(k - r.k_star) <= 1e-6 for r in roots):
            continue
        roots.append(SingularityReport(complex(k), residual, SingularityKind.SPECTRAL_SINGULARITY))
    return sorted(roots, key=lambda r: r.k_star.real)


def find_lasing_threshold(make_potential: Callable[[float], Potential], gains, k_min: float,
                          k_max: float, n_scan: int = 200, rtol: float = DEFAULT_RTOL,
                          max_iter: int = 50) -> tuple[float, float]:
    """Sweep a gain parameter until m22 acquires a real zero.

    ``make_potential(g)`` builds the profile at gain ``g``.  The coarse sweep
    picks the gain whose scan dips lowest; Newton on ``(k, g)`` with
    ``(Re m22, Im m22) = 0`` then pins the threshold.  Returns ``(g, k)``.
    """
    ks = np.linspace(k_min, k_max, n_scan)
    best = None
    for g in gains:
        p = make_potential(g)
        mags = [abs(_m22(p, k, rtol)) for k in ks]
        i = int(np.argmin(mags))
        if best is None or mags[i] < best[0]:
            best = (mags[i], float(g), float(ks[i]))
    if best is None:
        raise ContractViolation("gain sweep is empty")
    _, g, k = best

    def residual(x):
        value = _m22(make_potential(x[1]), x[0], rtol)
        return np.array([value.real, value.imag])

    x = np.array([k, g])
    for _ in range(max_iter):
        fx = residual(x)
        jac = np.empty((2, 2))
        for j in range(2):
            h = _diff_step(x[j])
            e = np.zeros(2)
            e[j] = h
            jac[:, j] = (residual(x + e) - residual(x - e)) / (2 * h)
        step = np.linalg.solve(jac, fx)
        x = x - step
        if np.max(np.abs(step)) <= 1e-15 * max(1.0, float(np.max(np.abs(x)))):
            break
    if np.max(np.abs(residual(x))) > ROOT_RESIDUAL:
        raise SearchFailure(f"gain sweep did not converge to a threshold (last g={x[1]}, k={x[0]})")
    return float(x[1]), float(x[0])


@dataclass(frozen=True)
class Box:
    """Axis-aligned rectangle in the complex k-plane."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ContractViolation("search box must have positive extent")

    def contains(self, z: complex) -> bool:
        return self.re_min <= z.real <= self.re_max and self.im_min <= z.imag <= self.im_max

    @property
    def corners(self):
        return (
            complex(self.re_min, self.im_min),
            complex(self.re_max, self.im_min),
            complex(self.re_max, self.im_max),
            complex(self.re_min, self.im_max),
        )

    @property
    def centre(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    @property
    def size(self) -> float:
        return max(self.re_max - self.re_min, self.im_max - self.im_min)

    def split(self, fx: float, fy: float) -> list["Box"]:
        xm = self.re_min + fx * (self.re_max - self.re_min)
        ym = self.im_min + fy * (self.im_max - self.im_min)
        return [
            Box(self.re_min, xm, self.im_min, ym),
            Box(xm, self.re_max, self.im_min, ym),
            Box(self.re_min, xm, ym, self.im_max),
            Box(xm, self.re_max, ym, self.im_max),
        ]


class _BoundaryZero(Exception):
    pass


def _edge_phase(f, a: complex, b: complex, n: int, cache: dict, depth_limit: int = 30) -> float:
    """Accumulated change of arg f along the segment a -> b.

    Sub-intervals whose phase jump exceeds pi/4 are bisected, so the unwrapped
    total is reliable without derivatives.
    """

    def value(z):
        if z not in cache:
            cache[z] = f(z)
        return cache[z]

    def walk(z0, f0, z1, f1, depth):
        d = cmath.phase(f1 / f0)
        if abs(d) <= math.pi / 4 or depth >= depth_limit:
            if depth >= depth_limit and abs(d) > math.pi / 2:
                raise _BoundaryZero()
            return d
        zm = 0.5 * (z0 + z1)
        fm = value(zm)
        if fm == 0:
            raise _BoundaryZero()
        return walk(z0, f0, zm, fm, depth + 1) + walk(zm, fm, z1, f1, depth + 1)

    zs = [a + (b - a) * j / n for j in range(n + 1)]
    fs = [value(z) for z in zs]
    if any(v == 0 for v in fs):
        raise _BoundaryZero()
    return sum(walk(zs[j], fs[j], zs[j + 1], fs[j + 1], 0) for j in range(n))


def winding_number(f, box: Box, n_edge: int = 16, cache: Optional[dict] = None) -> float:
    """Raw (unrounded) winding number of f around the box boundary."""
    cache = {} if cache is None else cache
    c = box.corners
    total = sum(_edge_phase(f, c[j], c[(j + 1) % 4], n_edge, cache) for j in range(4))
    return total / (2 * math.pi)


def _newton_complex(f, z0: complex, box: Box, max_iter: int = 60) -> Optional[complex]:
    z = complex(z0)
    for _ in range(max_iter):
        h = _diff_step(z)
        fz = f(z)
        df = (f(z + h) - f(z - h)) / (2 * h)
        if df == 0:
            return None
        step = fz / df
        z -= step
        if not box.contains(z):
            return None
        if abs(step) <= 1e-15 * max(1.0, abs(z)):
            break
    return z


_SPLITS = ((0.5123, 0.4871), (0.4619, 0.5437), (0.5791, 0.4237))


def find_bound_states(p: Potential, search_box: Box, max_depth: int = 10,
                      residual_tol: float = ROOT_RESIDUAL,
                      rtol: float = DEFAULT_RTOL) -> list[SingularityReport]:
    """Zeros of m22 in the upper half k-plane, counted by the argument principle.

    The box is subdivided until every cell encloses at most one zero; each
    single zero is then polished by Newton with a central-difference derivative.
    """
    if search_box.im_min <= 0:
        raise ContractViolation("bound-state search box must lie strictly in Im k > 0")
    cache: dict = {}

    def f(z):
        return _m22(p, z, rtol)

    roots: list[SingularityReport] = []

    def count(box):
        for n_edge in (16, 48, 144):
            try:
                w = winding_number(f, box, n_edge, cache)
            except _BoundaryZero:
                return None
            if abs(w - round(w)) <= 0.2:
                return int(round(w))
        raise SearchFailure(f"winding number {w:.3f} is not near an integer on {box}")

    def search(box, n_zeros, depth):
        if n_zeros == 0:
            return
        if n_zeros == 1:
            z = _newton_complex(f, box.centre, box)
            if z is not None and abs(f(z)) <= residual_tol:
                roots.append(SingularityReport(z, abs(f(z)), SingularityKind.BOUND_STATE))
                return
        if depth >= max_depth:
            raise SearchFailure(f"could not isolate {n_zeros} zero(s) in {box} after {depth} subdivisions")
        for fx, fy in _SPLITS:
            children = box.split(fx, fy)
            counts = [count(child) for child in children]
            if None not in counts and sum(counts) == n_zeros:
                break
        else:
            raise SearchFailure(f"inconsistent zero counts while subdividing {box}")
        for child, n_child in zip(children, counts):
            search(child, n_child, depth + 1)

    total = count(search_box)
    if total is None:
        raise SearchFailure("m22 vanishes on the search-box boundary")
    if total < 0:
        raise SearchFailure(f"negative winding number {total}: m22 has poles inside {search_box}")
    search(search_box, total, 0)
    unique: list[SingularityReport] = []
    for r in sorted(roots, key=lambda r: (r.k_star.imag, r.k_star.real)):
        if all(abs(r.k_star - u.k_star) > 1e-6 for u in unique):
            unique.append(r)
    return unique


# -- PT symmetry ----------------------------------------------------------------


def pt_transform_matrix(m: TransferMatrix) -> TransferMatrix:
    """Transfer matrix of the PT-transformed scatterer, ``conj(M^-1)``."""
    require_unimodular(m)
    return TransferMatrix(
        m.m22.conjugate(), -m.m12.conjugate(), -m.m21.conjugate(), m.m11.conjugate(), m.k
    )


def pt_symmetry_residual(m: TransferMatrix) -> float:
    return float(np.max(np.abs(pt_transform_matrix(m).array - m.array)))


def phasor_residuals(c: ScatterCoefficients) -> tuple[float, float]:
    """``(|Re(r_left/t)|, |Re(r_right/t)|)``; both vanish for a PT-invariant scatterer."""
    if c.t == 0:
        raise ContractViolation("transmission must be nonzero")
    return abs((c.r_left / c.t).real), abs((c.r_right / c.t).real)


# -- invisibility ---------------------------------------------------------------


def classify_invisibility(m: TransferMatrix, tol_unit: float = TOL_UNIT,
                          tol_nonzero: float = TOL_NONZERO) -> InvisibilityVerdict:
    """Unidirectional reflectionlessness / invisibility of a transfer matrix.

    Left-reflectionless means ``r_left = -m21/m22 = 0`` with ``m12`` nonzero;
    invisible additionally needs ``m11 = m22 = 1``.  Entries count as zero below
    ``tol_unit`` and as nonzero above ``tol_nonzero``.  Note that the
    upper-triangular matrix ``[[1, r], [0, 1]]`` is therefore *left* invisible.
    """
    require_unimodular(m)
    res = (abs(m.m11 - 1), abs(m.m22 - 1), abs(m.m12), abs(m.m21))
    unit = res[0] <= tol_unit and res[1] <= tol_unit
    if res[3] <= tol_unit and res[2] > tol_nonzero:
        label = InvisibilityLabel.LEFT_INVISIBLE if unit else InvisibilityLabel.LEFT_REFLECTIONLESS
    elif res[2] <= tol_unit and res[3] > tol_nonzero:
        label = InvisibilityLabel.RIGHT_INVISIBLE if unit else InvisibilityLabel.RIGHT_REFLECTIONLESS
    else:
        label = InvisibilityLabel.NOT_INVISIBLE
    # one-sided reflectionlessness is an exceptional point of S (and of M when invisible)
    return InvisibilityVerdict(label, res, label is not InvisibilityLabel.NOT_INVISIBLE)
