"""Global minimization of lattice Gaussian sums over the torus, and sweeps.

The minimizer runs a coarse grid scan in lattice coordinates followed by
derivative-free pattern search from the best cells.  Sweep routines
evaluate the minimum across a family of lattice shapes; derivative scans
probe the lattice-shape gradient of the shifted and charged families at
the moving special points.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import NonPositiveAlpha
from .lattice import (
    Frame,
    Lattice,
    PhasePoint,
    in_fundamental_domain_plus,
    lattice_from_tau,
    special_point_a,
    special_point_b,
)
from .theta import (
    DEFAULT_POLICY,
    CertifiedValue,
    ShiftedSumEvaluator,
    TruncationPolicy,
    lattice_gaussian_sum,
    theta_charged,
    theta_shifted,
)

_STEP_TOL = 1e-9


class CriticalRule(Enum):
    """Which moving point a lattice-shape derivative is taken at."""

    POINT_A = "a"
    POINT_B = "b"


@dataclass(frozen=True)
class MinResult:
    argmin: PhasePoint
    value: CertifiedValue
    grid_resolution: int
    refinement_steps: int


@dataclass(frozen=True)
class SweepRecord:
    x: float
    y: float
    alpha: float
    min_value: float
    argmin_u: float
    argmin_v: float
    tail_bound: float


def _pattern_search(
    batch: Callable[[np.ndarray], np.ndarray],
    start: np.ndarray,
    step0: float,
    step_tol: float = _STEP_TOL,
) -> tuple[np.ndarray, float, int]:
    """Compass search with shrinking steps on the unit torus.

    A move is accepted only on sufficient decrease (a few ulps of the
    incumbent), which stops roundoff-level drift along flat valleys.
    """
    moves = np.array(
        [[1, 0], [-1, 0], [0, 1], [0, -1], [1, 1], [1, -1], [-1, 1], [-1, -1]],
        dtype=float,
    )
    point = np.asarray(start, dtype=float)
    best = float(batch(point[None, :])[0])
    step = step0
    iterations = 0
    moves_at_level = 0
    while step >= step_tol and iterations < 20_000:
        candidates = (point[None, :] + step * moves) % 1.0
        vals = batch(candidates)
        j = int(np.argmin(vals))
        iterations += 1
        accept = vals[j] < best - 4.0 * abs(best) * np.finfo(float).eps
        if accept and moves_at_level < 500:
            best = float(vals[j])
            point = candidates[j]
            moves_at_level += 1
        else:
            step *= 0.5
            moves_at_level = 0
    return point % 1.0, best, iterations


def minimize_torus(
    batch: Callable[[np.ndarray], np.ndarray],
    grid_n: int,
    n_starts: int = 5,
    v_max: float = 1.0,
    step_tol: float = _STEP_TOL,
) -> tuple[np.ndarray, float, int]:
    """Grid scan plus multistart refinement of a batch-evaluable torus function."""
    if grid_n < 8:
        raise ValueError("grid_n must be at least 8")
    us = np.arange(grid_n) / grid_n
    n_v = max(int(round(grid_n * v_max)), 1)
    vs = np.arange(n_v) / grid_n
    uu, vv = np.meshgrid(us, vs, indexing="ij")
    grid = np.column_stack([uu.ravel(), vv.ravel()])
    vals = batch(grid)
    order = np.argsort(vals, kind="stable")[:n_starts]
    best_point = grid[order[0]]
    best_val = float(vals[order[0]])
    total_iters = 0
    for j in order:
        point, val, iters = _pattern_search(batch, grid[j], 1.0 / grid_n, step_tol)
        total_iters += iters
        if val < best_val:
            best_val = val
            best_point = point
    return best_point, best_val, total_iters


def minimize_over_cell(
    lattice: Lattice,
    alpha: float,
    grid_n: int = 64,
    pol: TruncationPolicy = DEFAULT_POLICY,
    n_starts: int = 5,
) -> MinResult:
    """Global minimum of E(.; alpha) over one torus cell.

    The search runs in lattice coordinates on [0, 1)^2.  On the boundary
    shapes x in {0, 1/2} the central symmetry z -> -z is exploited to
    halve the scanned cell.
    """
    if alpha <= 0:
        raise NonPositiveAlpha(f"alpha must be positive, got {alpha}")
    ev = ShiftedSumEvaluator(lattice, alpha, pol)
    x = lattice.x
    v_max = 0.5 + 1.5 / grid_n if (abs(x) < 1e-12 or abs(x - 0.5) < 1e-12) else 1.0
    point, _, iters = minimize_torus(ev.values_centered, grid_n, n_starts, v_max)
    argmin = PhasePoint(float(point[0]), float(point[1]), Frame.LATTICE).canonical()
    value = lattice_gaussian_sum(lattice, argmin, alpha, pol)
    return MinResult(argmin, value, grid_n, iters)


def verify_max_at_origin(
    lattice: Lattice,
    alpha: float,
    samples: int = 1000,
    pol: TruncationPolicy = DEFAULT_POLICY,
    rng: np.random.Generator | None = None,
) -> bool:
    """Check E(z; alpha) <= E(0; alpha) within tails for random shifts z."""
    rng = rng or np.random.default_rng(0)
    ev = ShiftedSumEvaluator(lattice, alpha, pol)
    zs = rng.random((samples, 2))
    at_origin = float(ev.values(np.zeros((1, 2)))[0])
    slack = 2.0 * ev.tail_bound + 1e-13
    return bool(np.all(ev.values(zs) <= at_origin + slack))


def sweep_fundamental_domain(
    alphas: Sequence[float],
    xs: Sequence[float],
    ys: Sequence[float],
    grid_n: int = 32,
    pol: TruncationPolicy = DEFAULT_POLICY,
    skip_outside: bool = False,
) -> list[SweepRecord]:
    """One minimization record per (x, y, alpha), ordered x, then y, then alpha.

    Every (x, y) must lie in the right half fundamental domain; with
    ``skip_outside`` the grid points below the unit circle are dropped
    instead (rectangular grids intersected with the domain).
    """
    records = []
    for x in sorted(xs):
        for y in sorted(ys):
            tau = complex(x, y)
            if not in_fundamental_domain_plus(tau):
                if skip_outside:
                    continue
                raise ValueError(f"(x, y) = ({x}, {y}) outside the fundamental domain")
            lattice = lattice_from_tau(x, y)
            for alpha in sorted(alphas):
                res = minimize_over_cell(lattice, alpha, grid_n, pol)
                records.append(
                    SweepRecord(
                        x=x,
                        y=y,
                        alpha=alpha,
                        min_value=res.value.value,
                        argmin_u=res.argmin.u,
                        argmin_v=res.argmin.v,
                        tail_bound=res.value.tail_bound,
                    )
                )
    return records


def _moving_point(rule: CriticalRule, x: float, y: float) -> PhasePoint:
    if rule is CriticalRule.POINT_A:
        return special_point_a(x, y)
    return special_point_b(x, y)


def gradient_at_point(
    rule: CriticalRule,
    x: float,
    y: float,
    alpha: float,
    h: float = 1e-5,
    pol: TruncationPolicy = DEFAULT_POLICY,
) -> tuple[float, float]:
    """Central-difference lattice-shape gradient of the shifted family.

    The shift point is re-evaluated at each perturbed shape, i.e. it
    moves with the lattice.
    """
    if not 1e-7 <= h <= 1e-3:
        raise ValueError("finite-difference step h must lie in [1e-7, 1e-3]")

    def f(xx: float, yy: float) -> float:
        lat = lattice_from_tau(xx, yy)
        return theta_shifted(lat, _moving_point(rule, xx, yy), alpha, pol).value

    gx = (f(x + h, y) - f(x - h, y)) / (2.0 * h)
    gy = (f(x, y + h) - f(x, y - h)) / (2.0 * h)
    return gx, gy


def x_derivative_sign_scan(
    alpha: float,
    y: float,
    xs: Iterable[float],
    h: float = 1e-5,
    pol: TruncationPolicy = DEFAULT_POLICY,
) -> list[tuple[float, float]]:
    """d/dx of the shifted and charged families at the moving point b.

    Returns one (shifted, charged) derivative pair per x; on
    0 < x < 1/2 with y >= 1/sqrt(2) both entries are positive.
    """

    def pair(xx: float) -> tuple[float, float]:
        lat = lattice_from_tau(xx, y)
        b = special_point_b(xx, y)
        return (
            theta_shifted(lat, b, alpha, pol).value,
            theta_charged(lat, b, alpha, pol).value,
        )

    out = []
    for x in xs:
        sp, cp = pair(x + h)
        sm, cm = pair(x - h)
        out.append(((sp - sm) / (2.0 * h), (cp - cm) / (2.0 * h)))
    return out


class RidgeFamily(Enum):
    """Profile along the boundary line x = 1/2: shifted (F) or charged (G)."""

    F = "shifted"
    G = "charged"


def ridge_profile(
    family: RidgeFamily,
    alpha: float,
    ys: Sequence[float],
    pol: TruncationPolicy = DEFAULT_POLICY,
) -> list[float]:
    """Values of the x = 1/2 profile at the circumcenter for each y."""
    out = []
    for y in ys:
        lat = lattice_from_tau(0.5, y)
        a = special_point_a(0.5, y)
        if family is RidgeFamily.F:
            out.append(theta_shifted(lat, a, alpha, pol).value)
        else:
            out.append(theta_charged(lat, a, alpha, pol).value)
    return out
