"""Complex potential profiles and their transfer matrices.

All quantities are in reduced units: ``U = 2 m V / hbar^2`` and the energy is
``k**2``.  A potential vanishes identically outside its support.
"""

from __future__ import annotations

import cmath
import re
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.integrate import DOP853

from .errors import ContractViolation, IntegrationFailure
from .scatter import TransferMatrix, compose_chain

DEFAULT_RTOL = 1e-10
DEFAULT_MAX_STEPS = 1_000_000


class Potential:
    """Common interface: a callable profile with a finite support."""

    @property
    def support(self) -> tuple[float, float]:
        raise NotImplementedError

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Sorted points (support ends included) where the profile may be non-smooth."""
        return self.support

    def __call__(self, x: float) -> complex:
        raise NotImplementedError

    def values(self, xs) -> np.ndarray:
        return np.array([self(float(x)) for x in np.atleast_1d(xs)], dtype=complex)

    @property
    def is_empty(self) -> bool:
        lo, hi = self.support
        return hi <= lo


@dataclass(frozen=True)
class Segment:
    x0: float
    x1: float
    u: complex

    def __post_init__(self):
        object.__setattr__(self, "x0", float(self.x0))
        object.__setattr__(self, "x1", float(self.x1))
        object.__setattr__(self, "u", complex(self.u))
        if not self.x1 > self.x0:
            raise ContractViolation(f"segment must have positive width, got [{self.x0}, {self.x1}]")

    @property
    def width(self) -> float:
        return self.x1 - self.x0


@dataclass(frozen=True)
class PiecewiseConstant(Potential):
    segments: tuple[Segment, ...] = ()

    def __post_init__(self):
        segments = tuple(self.segments)
        object.__setattr__(self, "segments", segments)
        for a, b in zip(segments, segments[1:]):
            if b.x0 != a.x1:
                raise ContractViolation(
                    f"segments must be contiguous and ordered: [{a.x0}, {a.x1}] then [{b.x0}, {b.x1}]"
                )

    @classmethod
    def from_layers(cls, layers: Sequence[tuple[complex, float]], x_start: float = 0.0):
        """Build a stack from ``(u, width)`` pairs laid out left to right."""
        segments = []
        x = float(x_start)
        for u, width in layers:
            segments.append(Segment(x, x + width, u))
            x += width
        return cls(tuple(segments))

    @property
    def support(self):
        if not self.segments:
            return (0.0, 0.0)
        return (self.segments[0].x0, self.segments[-1].x1)

    @property
    def breakpoints(self):
        if not self.segments:
            return (0.0, 0.0)
        return (self.segments[0].x0,) + tuple(s.x1 for s in self.segments)

    def __call__(self, x):
        for s in self.segments:
            if s.x0 <= x < s.x1:
                return s.u
        return 0j


@dataclass(frozen=True, eq=False)
class Sampled(Potential):
    """Profile given on a strictly increasing grid, linearly interpolated."""

    x: tuple[float, ...]
    u: tuple[complex, ...]

    def __post_init__(self):
        x = tuple(float(v) for v in self.x)
        u = tuple(complex(v) for v in self.u)
        if len(x) != len(u):
            raise ContractViolation("grid and values must have the same length")
        if len(x) < 2:
            raise ContractViolation("a sampled profile needs at least two grid points")
        if any(b <= a for a, b in zip(x, x[1:])):
            raise ContractViolation("sampled grid must be strictly increasing")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "u", u)

    def __eq__(self, other):
        return isinstance(other, Sampled) and self.x == other.x and self.u == other.u

    def __hash__(self):
        return hash((self.x, self.u))

    @cached_property
    def _grid(self):
        return np.asarray(self.x), np.asarray(self.u)

    @property
    def support(self):
        return (self.x[0], self.x[-1])

    @property
    def breakpoints(self):
        # the interpolant has a kink at every grid point
        return self.x

    def __call__(self, x):
        if x < self.x[0] or x > self.x[-1]:
            return 0j
        xs, us = self._grid
        return complex(np.interp(x, xs, us))


@dataclass(frozen=True)
class Slab(Potential):
    """Constant ``u`` on ``[x0, x0 + d]``."""

    u: complex
    d: float
    x0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "u", complex(self.u))
        if not self.d > 0:
            raise ContractViolation("slab width must be positive")

    @property
    def support(self):
        return (float(self.x0), float(self.x0 + self.d))

    def __call__(self, x):
        lo, hi = self.support
        return self.u if lo <= x < hi else 0j

    def to_segments(self) -> PiecewiseConstant:
        lo, hi = self.support
        return PiecewiseConstant((Segment(lo, hi, self.u),))


@dataclass(frozen=True)
class PTDimer(Potential):
    """``a + ib`` on ``[-d, 0]`` followed by ``a - ib`` on ``[0, d]``."""

    a: float
    b: float
    d: float

    def __post_init__(self):
        if not self.d > 0:
            raise ContractViolation("dimer half-width must be positive")

    @property
    def support(self):
        return (-float(self.d), float(self.d))

    @property
    def breakpoints(self):
        return (-float(self.d), 0.0, float(self.d))

    def __call__(self, x):
        if -self.d <= x < 0:
            return complex(self.a, self.b)
        if 0 <= x < self.d:
            return complex(self.a, -self.b)
        return 0j

    def to_segments(self) -> PiecewiseConstant:
        return PiecewiseConstant(
            (
                Segment(-self.d, 0.0, complex(self.a, self.b)),
                Segment(0.0, self.d, complex(self.a, -self.b)),
            )
        )


@dataclass(frozen=True)
class ExpGrating(Potential):
    """Truncated complex exponential ``alpha * exp(2i beta x)`` on ``[-L/2, L/2]``."""

    alpha: complex
    beta: float
    length: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        if not self.beta > 0:
            raise ContractViolation("grating wavenumber beta must be positive")
        if not self.length > 0:
            raise ContractViolation("grating length must be positive")

    @property
    def support(self):
        return (-self.length / 2, self.length / 2)

    def __call__(self, x):
        lo, hi = self.support
        if lo <= x <= hi:
            return self.alpha * cmath.exp(2j * self.beta * x)
        return 0j


FAMILIES = {"slab": Slab, "pt_dimer": PTDimer, "exp_grating": ExpGrating}


# -- profile manipulation -------------------------------------------------------


def pt_reflect_potential(p: Potential) -> Potential:
    """The PT image ``x -> conj(U(-x))`` of a profile."""
    if isinstance(p, PiecewiseConstant):
        return PiecewiseConstant(
            tuple(Segment(-s.x1, -s.x0, s.u.conjugate()) for s in reversed(p.segments))
        )
    if isinstance(p, Sampled):
        return Sampled(tuple(-v for v in reversed(p.x)), tuple(v.conjugate() for v in reversed(p.u)))
    if isinstance(p, Slab):
        return Slab(p.u.conjugate(), p.d, -(p.x0 + p.d))
    if isinstance(p, PTDimer):
        return PTDimer(p.a, p.b, p.d)
    if isinstance(p, ExpGrating):
        return ExpGrating(p.alpha.conjugate(), p.beta, p.length)
    raise ContractViolation(f"unsupported potential type {type(p).__name__}")


def _comparison_grid(p: Potential, q: Potential, n: int = 2001) -> np.ndarray:
    lo = min(p.support[0], q.support[0])
    hi = max(p.support[1], q.support[1])
    if hi <= lo:
        return np.array([lo])
    knots = np.unique(np.concatenate([np.linspace(lo, hi, n), p.breakpoints, q.breakpoints]))
    # midpoints dodge the ambiguity of evaluating exactly on a jump
    return 0.5 * (knots[1:] + knots[:-1])


def is_pt_symmetric_potential(p: Potential, tol: float = 1e-12) -> bool:
    q = pt_reflect_potential(p)
    xs = _comparison_grid(p, q)
    return float(np.max(np.abs(p.values(xs) - q.values(xs)))) <= tol


def load_sampled_profile(path) -> Sampled:
    """Read ``x, Re U, Im U`` columns separated by commas or whitespace.

    A single non-numeric header line is skipped, as are blank lines and lines
    starting with ``#``.
    """
    xs, us = [], []
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f for f in re.split(r"[,\s]+", line) if f]
        try:
            values = [float(f) for f in fields]
        except ValueError:
            if not xs:
                continue
            raise ContractViolation(f"{path}:{lineno}: non-numeric field in {line!r}") from None
        if len(values) != 3:
            raise ContractViolation(f"{path}:{lineno}: expected 3 columns, got {len(values)}")
        xs.append(values[0])
        us.append(complex(values[1], values[2]))
    return Sampled(tuple(xs), tuple(us))


# -- transfer matrices ----------------------------------------------------------


def _sinc_term(q: complex, d: float) -> complex:
    """``sin(q d) / q``, even in ``q`` and regular at ``q = 0``."""
    if abs(q * d) < 1e-8:
        return d * (1 - (q * d) ** 2 / 6)
    return cmath.sin(q * d) / q


def slab_transfer(u: complex, d: float, k: complex, x0: float = 0.0) -> TransferMatrix:
    """Closed-form transfer matrix of a constant slab on ``[x0, x0 + d]``.

    Only ``cos(qd)`` and ``sin(qd)/q`` enter, so the branch of ``q = sqrt(k^2 - u)``
    does not matter and evanescent slabs need no special handling.
    """
    k = complex(k)
    if k == 0:
        raise ContractViolation("slab_transfer needs a nonzero wavenumber")
    if not d > 0:
        raise ContractViolation("slab width must be positive")
    q2 = k * k - complex(u)
    q = cmath.sqrt(q2)
    c = cmath.cos(q * d)
    s = _sinc_term(q, d)
    diag = (k * k + q2) / (2 * k) * s
    off = (q2 - k * k) / (2 * k) * s
    centre = 2 * x0 + d
    return TransferMatrix(
        m11=cmath.exp(-1j * k * d) * (c + 1j * diag),
        m12=cmath.exp(-1j * k * centre) * 1j * off,
        m21=cmath.exp(1j * k * centre) * (-1j) * off,
        m22=cmath.exp(1j * k * d) * (c - 1j * diag),
        k=k,
    )


def plane_wave_basis(x: float, k: complex) -> np.ndarray:
    """Columns are ``(psi, psi')`` of ``exp(ikx)`` and ``exp(-ikx)`` at ``x``."""
    ep = cmath.exp(1j * k * x)
    em = cmath.exp(-1j * k * x)
    return np.array([[ep, em], [1j * k * ep, -1j * k * em]], dtype=complex)


def _integrate_piece(p, k2, y0, x_from, x_to, rtol, atol, max_steps, k, step_count):
    def rhs(x, y):
        w = p(x) - k2
        return np.array([y[1], w * y[0], y[3], w * y[2]])

    solver = DOP853(rhs, x_from, y0, x_to, rtol=rtol, atol=atol)
    while solver.status == "running":
        solver.step()
        step_count[0] += 1
        if step_count[0] > max_steps:
            raise IntegrationFailure("step budget exhausted", k=k, x=solver.t, steps=step_count[0])
    if solver.status == "failed":
        raise IntegrationFailure("adaptive integrator failed", k=k, x=solver.t, steps=step_count[0])
    return solver.y


def propagator(p: Potential, k: complex, x_from: float, x_to: float,
               rtol: float = DEFAULT_RTOL, max_steps: int = DEFAULT_MAX_STEPS) -> np.ndarray:
    """Fundamental matrix mapping ``(psi, psi')`` at ``x_from`` to ``x_to``.

    Integration restarts at every breakpoint between the two points so that
    jumps in the profile never sit inside a step.  Either direction works.
    """
    k = complex(k)
    k2 = k * k
    lo, hi = sorted((x_from, x_to))
    knots = [x_from] + [b for b in p.breakpoints if lo < b < hi] + [x_to]
    if x_to < x_from:
        knots = [x_from] + sorted((b for b in p.breakpoints if lo < b < hi), reverse=True) + [x_to]
    y = np.array([1, 0, 0, 1], dtype=complex)
    steps = [0]
    for a, b in zip(knots, knots[1:]):
        if a == b:
            continue
        scale = max(1.0, float(np.max(np.abs(y))))
        # evaluate U strictly inside the piece so jump points take the piece's value
        eps = 1e-13 * max(1.0, abs(a), abs(b))
        nudge = eps if b > a else -eps
        piece = _InsidePiece(p, a, b, nudge)
        y = _integrate_piece(piece, k2, y, a, b, rtol, rtol * 1e-2 * scale, max_steps, k, steps)
    return np.array([[y[0], y[2]], [y[1], y[3]]], dtype=complex)


class _InsidePiece:
    """Profile restricted to one smooth piece, clamping x off the piece ends."""

    def __init__(self, p, a, b, nudge):
        self.p = p
        self.lo, self.hi = sorted((a, b))
        self.lo_in = self.lo + abs(nudge)
        self.hi_in = self.hi - abs(nudge)

    def __call__(self, x):
        return self.p(min(max(x, self.lo_in), self.hi_in))


def transfer_of_potential(p: Potential, k: complex, rtol: float = DEFAULT_RTOL,
                          max_steps: int = DEFAULT_MAX_STEPS) -> TransferMatrix:
    """Transfer matrix of ``p`` at wavenumber ``k``.

    Piecewise-constant stacks use the closed-form slab matrices; every other
    profile is integrated numerically for two independent initial conditions.
    Complex ``k`` is accepted (bound-state searches evaluate off the real axis).
    """
    k = complex(k)
    if k == 0:
        raise ContractViolation("wavenumber must be nonzero")
    if p.is_empty:
        return TransferMatrix.identity(k)
    if isinstance(p, PiecewiseConstant):
        return compose_chain(slab_transfer(s.u, s.width, k, s.x0) for s in p.segments)
    lo, hi = p.support
    prop = propagator(p, k, lo, hi, rtol=rtol, max_steps=max_steps)
    m = np.linalg.solve(plane_wave_basis(hi, k), prop @ plane_wave_basis(lo, k))
    return TransferMatrix.from_array(m, k)


def directional_transmissions(p: Potential, k: complex, rtol: float = DEFAULT_RTOL,
                              max_steps: int = DEFAULT_MAX_STEPS) -> tuple[complex, complex]:
    """Transmission for left and right incidence from two separate shooting solves.

    Each solve starts from a pure outgoing wave on the far side and integrates
    across the support, never forming the transfer matrix.
    """
    k = complex(k)
    if p.is_empty:
        return 1 + 0j, 1 + 0j
    lo, hi = p.support
    # left incidence: pure t e^{ikx} on the right, integrate leftward
    start = plane_wave_basis(hi, k)[:, 0]
    at_lo = propagator(p, k, hi, lo, rtol=rtol, max_steps=max_steps) @ start
    a_plus, _ = np.linalg.solve(plane_wave_basis(lo, k), at_lo)
    # right incidence: pure t e^{-ikx} on the left, integrate rightward
    start = plane_wave_basis(lo, k)[:, 1]
    at_hi = propagator(p, k, lo, hi, rtol=rtol, max_steps=max_steps) @ start
    _, b_minus = np.linalg.solve(plane_wave_basis(hi, k), at_hi)
    return complex(1 / a_plus), complex(1 / b_minus)
