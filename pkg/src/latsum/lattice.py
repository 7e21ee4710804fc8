"""Two-parameter lattices, fundamental-domain reduction, duals, special shift points.

A unit-covolume planar lattice is parametrized by (x, y) with y > 0, the
point tau = x + iy of the upper half plane.  The canonical generator is

    gen = y**-0.5 * [[1, x], [0, y]]

whose columns span the lattice.  Lattices produced by dual constructions
keep their exact generator and carry the shape parameters of its rotated
upper-triangular form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import NonPositiveY, NoConvergence, NotUpperHalfPlane

_REDUCE_TOL = 1e-12
_MAX_GENERATOR_APPLICATIONS = 10_000


class Frame(Enum):
    """Coordinate frame of a phase-space point."""

    LATTICE = "lattice"
    CARTESIAN = "cartesian"


@dataclass(frozen=True, eq=False)
class Lattice:
    """A planar lattice gen @ Z^2 with shape parameters (x, y).

    ``gen`` equals a rotation of ``y**-0.5 * [[1, x], [0, y]]``; the
    canonical constructor :func:`lattice_from_tau` stores that matrix
    exactly (determinant 1).  Scaled generators (covolume != 1) are
    allowed through :func:`lattice_from_generator`, which some callers
    (symplectic duals, periodic charge cells) need.
    """

    x: float
    y: float
    gen: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.y <= 0:
            raise NonPositiveY(f"y must be positive, got {self.y}")
        g = np.asarray(self.gen, dtype=float)
        if g.shape != (2, 2):
            raise ValueError("generator must be a 2x2 matrix")
        if np.linalg.det(g) <= 0:
            raise ValueError("generator must have positive determinant")
        g = g.copy()
        g.flags.writeable = False
        object.__setattr__(self, "gen", g)

    @property
    def tau(self) -> complex:
        return complex(self.x, self.y)

    @property
    def covolume(self) -> float:
        return float(np.linalg.det(self.gen))

    @property
    def gram(self) -> np.ndarray:
        return self.gen.T @ self.gen

    def basis(self) -> tuple[np.ndarray, np.ndarray]:
        """Columns of the generator."""
        return self.gen[:, 0].copy(), self.gen[:, 1].copy()

    def scale(self, factor: float) -> "Lattice":
        """The lattice factor * self (factor > 0)."""
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return Lattice(self.x, self.y, factor * self.gen)


@dataclass(frozen=True)
class PhasePoint:
    """A shift or charge point, either in lattice or Cartesian coordinates."""

    u: float
    v: float
    frame: Frame = Frame.LATTICE

    def to_cartesian(self, lattice: Lattice) -> np.ndarray:
        if self.frame is Frame.CARTESIAN:
            return np.array([self.u, self.v])
        return lattice.gen @ np.array([self.u, self.v])

    def to_lattice(self, lattice: Lattice) -> "PhasePoint":
        if self.frame is Frame.LATTICE:
            return self
        u, v = np.linalg.solve(lattice.gen, np.array([self.u, self.v]))
        return PhasePoint(float(u), float(v), Frame.LATTICE)

    def canonical(self) -> "PhasePoint":
        """Reduce lattice coordinates mod 1 into [0, 1)."""
        if self.frame is not Frame.LATTICE:
            raise ValueError("only lattice-frame points canonicalize mod 1")
        return PhasePoint(self.u % 1.0, self.v % 1.0, Frame.LATTICE)


def lattice_from_tau(x: float, y: float) -> Lattice:
    """Unit-covolume lattice with the canonical generator for (x, y)."""
    if y <= 0:
        raise NonPositiveY(f"y must be positive, got {y}")
    s = 1.0 / math.sqrt(y)
    gen = np.array([[s, s * x], [0.0, s * y]])
    return Lattice(x, y, gen)


def lattice_from_generator(gen: np.ndarray) -> Lattice:
    """Lattice with the given generator; shape parameters from its QR form.

    Any generator with positive determinant factors as Q @ R with Q a
    rotation and R upper triangular with positive diagonal; then
    x = R[0,1]/R[0,0] and y = R[1,1]/R[0,0].
    """
    g = np.asarray(gen, dtype=float)
    q, r = np.linalg.qr(g)
    # enforce positive diagonal of R (QR is unique only up to signs)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    r = np.diag(signs) @ r
    x = r[0, 1] / r[0, 0]
    y = r[1, 1] / r[0, 0]
    return Lattice(float(x), float(y), g)


def hexagonal_lattice() -> Lattice:
    return lattice_from_tau(0.5, math.sqrt(3) / 2)


def square_lattice() -> Lattice:
    return lattice_from_tau(0.0, 1.0)


# ---------------------------------------------------------------------------
# Modular reduction
# ---------------------------------------------------------------------------

def apply_generator(tau: complex, label: str) -> complex:
    """Apply one reduction generator to tau."""
    if label == "T":
        return tau + 1.0
    if label == "Tinv":
        return tau - 1.0
    if label == "J":
        return -1.0 / tau
    if label == "Mirror":
        return complex(-tau.real, tau.imag)
    raise ValueError(f"unknown generator label {label!r}")


@dataclass(frozen=True)
class ReductionTrace:
    """Result of reducing tau into the right half fundamental domain.

    ``word`` lists the generators applied, in order; replaying it on
    ``tau_in`` reproduces ``tau_out``.
    """

    tau_in: complex
    tau_out: complex
    word: tuple[str, ...]

    def replay(self) -> complex:
        tau = self.tau_in
        for label in self.word:
            tau = apply_generator(tau, label)
        return tau


def in_fundamental_domain_plus(tau: complex, tol: float = _REDUCE_TOL) -> bool:
    """Membership in {0 <= Re <= 1/2, |tau| >= 1} up to tol on the boundary."""
    return (
        tau.imag > 0
        and -tol <= tau.real <= 0.5 + tol
        and abs(tau) >= 1.0 - tol
    )


def reduce_to_fundamental(tau: complex) -> ReductionTrace:
    """Reduce tau into D_+ by translations and inversions, mirror last.

    Classical Gauss reduction: translate the real part into [-1/2, 1/2],
    invert while |tau| < 1, finally mirror x -> |x|.  Boundary ties land
    on the representative with nonnegative real part.
    """
    tau = complex(tau)
    if tau.imag <= 0:
        raise NotUpperHalfPlane(f"Im(tau) must be positive, got {tau.imag}")
    word: list[str] = []
    z = tau
    applications = 0
    while True:
        k = round(z.real)
        if k != 0:
            if applications + abs(k) > _MAX_GENERATOR_APPLICATIONS:
                raise NoConvergence("generator application budget exhausted")
            label = "Tinv" if k > 0 else "T"
            word.extend([label] * abs(k))
            applications += abs(k)
            z = complex(z.real - k, z.imag)
        if abs(z) >= 1.0 - _REDUCE_TOL:
            break
        z = -1.0 / z
        word.append("J")
        applications += 1
        if applications > _MAX_GENERATOR_APPLICATIONS:
            raise NoConvergence("generator application budget exhausted")
    if z.real < 0:
        z = complex(-z.real, z.imag)
        word.append("Mirror")
    return ReductionTrace(tau_in=tau, tau_out=z, word=tuple(word))


# ---------------------------------------------------------------------------
# Duals
# ---------------------------------------------------------------------------

def dual_lattice(lattice: Lattice) -> Lattice:
    """The dual lattice, generated by the inverse transpose of gen."""
    gen_dual = np.linalg.inv(lattice.gen).T
    return lattice_from_generator(gen_dual)


def symplectic_dual(lattice: Lattice) -> Lattice:
    """The adjoint (symplectic dual) lattice: the input scaled by 1/covolume.

    In two dimensions every lattice is symplectic, so the adjoint is just
    a rescaled copy; unit covolume gives the lattice itself back.
    """
    vol = lattice.covolume
    return Lattice(lattice.x, lattice.y, lattice.gen / vol)


def symplectic_form(p: np.ndarray, q: np.ndarray) -> float:
    """Standard skew form sigma((x, w), (x', w')) = x w' - x' w."""
    return float(p[0] * q[1] - p[1] * q[0])


# ---------------------------------------------------------------------------
# Special shift points
# ---------------------------------------------------------------------------

def special_point_a(x: float, y: float) -> PhasePoint:
    """Circumcenter of the fundamental triangle, in lattice coordinates.

    Satisfies a1 + x*a2 = 1/2; the Cartesian image gen @ a is equidistant
    from 0 and the two basis vectors.
    """
    if y <= 0:
        raise NonPositiveY(f"y must be positive, got {y}")
    y2 = y * y
    a1 = (1.0 - x) * (x * x + y2) / (2.0 * y2)
    a2 = (-x + x * x + y2) / (2.0 * y2)
    return PhasePoint(a1, a2, Frame.LATTICE)


def special_point_b(x: float, y: float) -> PhasePoint:
    """The designed shift point with b1 + x*b2 = 1/2 and b2 independent of x.

    Exposed as a formula only: it agrees with the circumcenter on the
    line x = 1/2 but carries no geometric interpretation elsewhere.
    """
    if y <= 0:
        raise NonPositiveY(f"y must be positive, got {y}")
    y2 = y * y
    b1 = (x + (1.0 - x) * 4.0 * y2) / (8.0 * y2)
    b2 = (4.0 * y2 - 1.0) / (8.0 * y2)
    return PhasePoint(b1, b2, Frame.LATTICE)
