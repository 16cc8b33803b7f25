"""Ground-state solver: stabilized fixed-point iteration with a descent fallback.

The update u <- M^gamma P(D)^{-1} N(u) with M = <P(D)u, u> / <N(u), u> is the
classical stabilized iteration for homogeneous nonlinearities; the default
stabilization exponent is degree/(degree - 1).  Every iterate is symmetrized
over the axis reflections and recentered, which pins the translation mode and
keeps the iteration inside the even class.  If the residual stalls, the solver
switches to preconditioned descent on the action with a homogeneity rescaling
after each step.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .grid import Grid, SpectralField, inner_product, sobolev_norm, symmetrize
from .nonlinearity import NonlinearitySpec, _coulomb_values
from .operators import OperatorSpec, symbol

__all__ = [
    "SolverConfig",
    "GroundStateResult",
    "GroundStateError",
    "solve",
    "residual",
    "action",
    "gaussian_guess",
    "initialization_stability",
]

COLLAPSE_NORM = 1.0e-8
STAGNATION_WINDOW = 50
STAGNATION_FACTOR = 0.99


class GroundStateError(RuntimeError):
    """Raised when the iteration collapses or its quadratic pairings degenerate."""


@dataclass(frozen=True)
class SolverConfig:
    """Iteration controls; tolerance is the relative L^2 residual target."""

    method: str = "petviashvili"
    tolerance: float = 1.0e-12
    max_iterations: int = 2000
    time_step: float = 0.5
    initial_guess: float | SpectralField = 1.0
    gamma: float | None = None

    def __post_init__(self) -> None:
        if self.method not in ("petviashvili", "gradient_flow"):
            raise ValueError(f"method must be 'petviashvili' or 'gradient_flow', got {self.method!r}")
        if not 1.0e-14 <= self.tolerance <= 1.0e-4:
            raise ValueError(f"tolerance must lie in [1e-14, 1e-4], got {self.tolerance}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if self.time_step <= 0:
            raise ValueError("time_step must be positive")
        if self.gamma is not None and not 1.0 < self.gamma <= 3.0:
            raise ValueError(f"stabilization exponent must lie in (1, 3], got {self.gamma}")


@dataclass(frozen=True)
class GroundStateResult:
    field: SpectralField
    residual: float
    action: float
    iterations: int
    converged: bool
    residual_history: tuple[float, ...] = ()


def gaussian_guess(grid: Grid, width: float = 1.0) -> SpectralField:
    """Centered Gaussian exp(-|x|^2 / (2 width^2))."""
    return SpectralField(grid, np.exp(-grid.radius_sq() / (2.0 * width**2)))


def _nonlinearity_values(spec: NonlinearitySpec, grid: Grid, u: np.ndarray) -> np.ndarray:
    if spec.kind == "power":
        return u**spec.p
    return _coulomb_values(grid, u * u) * u


def _symmetrize_recenter(grid: Grid, u: np.ndarray) -> np.ndarray:
    peak = np.unravel_index(np.argmax(np.abs(u)), grid.shape)
    shift = tuple(c - p for c, p in zip(grid.center_index, peak))
    if any(s != 0 for s in shift):
        u = np.roll(u, shift, axis=tuple(range(grid.n)))
    for ax in range(grid.n):
        u = 0.5 * (u + np.roll(np.flip(u, axis=ax), 1, axis=ax))
    return u


def solve(op: OperatorSpec, nl: NonlinearitySpec, grid: Grid, cfg: SolverConfig = SolverConfig()) -> GroundStateResult:
    """Compute the positive even ground state of P(D)u = N(u) on the grid.

    Returns a result with converged=False (carrying the best iterate) if the
    tolerance is not reached within max_iterations; raises GroundStateError on
    collapse to the zero field.
    """
    nl.validate_dimension(grid.n)
    sym = symbol(op, grid.xi_sq)
    degree = nl.degree
    gamma = cfg.gamma if cfg.gamma is not None else degree / (degree - 1.0)

    if isinstance(cfg.initial_guess, SpectralField):
        if cfg.initial_guess.grid != grid:
            raise ValueError("initial guess lives on a different grid")
        u = cfg.initial_guess.values.copy()
    else:
        u = gaussian_guess(grid, cfg.initial_guess).values.copy()
    u = _symmetrize_recenter(grid, u)

    descent = cfg.method == "gradient_flow"
    history: list[float] = []
    best_res = np.inf
    best_u = u
    iterations = 0

    for _ in range(cfg.max_iterations + 1):
        norm_u = np.linalg.norm(u)
        if norm_u * np.sqrt(grid.cell_volume) < COLLAPSE_NORM:
            raise GroundStateError("iterate collapsed to the zero field; bad initial guess")
        uh = np.fft.fftn(u)
        nu = _nonlinearity_values(nl, grid, u)
        nh = np.fft.fftn(nu)
        res = np.linalg.norm(np.fft.ifftn(sym * uh).real - nu) / norm_u
        history.append(float(res))
        if res < best_res:
            best_res = float(res)
            best_u = u
        if res <= cfg.tolerance or iterations >= cfg.max_iterations:
            break

        if not descent and len(history) > STAGNATION_WINDOW:
            if history[-1] > STAGNATION_FACTOR * history[-1 - STAGNATION_WINDOW]:
                descent = True

        num = float(np.sum(sym * (uh.real**2 + uh.imag**2)))
        den = float(np.sum(np.conj(nh) * uh).real)
        if den <= 0.0:
            raise GroundStateError("nonlinear pairing lost positivity during iteration")
        factor = num / den

        if descent:
            u_next = u - cfg.time_step * (u - np.fft.ifftn(nh / sym).real)
            uh2 = np.fft.fftn(u_next)
            nu2 = _nonlinearity_values(nl, grid, u_next)
            num2 = float(np.sum(sym * (uh2.real**2 + uh2.imag**2)))
            den2 = float(np.sum(np.conj(np.fft.fftn(nu2)) * uh2).real)
            if den2 <= 0.0:
                raise GroundStateError("nonlinear pairing lost positivity during descent")
            u_next = (num2 / den2) ** (1.0 / (degree - 1.0)) * u_next
        else:
            u_next = np.fft.ifftn(factor**gamma * nh / sym).real
        u = _symmetrize_recenter(grid, u_next)
        iterations += 1

    converged = history[-1] <= cfg.tolerance
    final = u if converged else best_u
    final_res = history[-1] if converged else best_res
    field = SpectralField(grid, final)
    return GroundStateResult(
        field=field,
        residual=float(final_res),
        action=action(field, op, nl),
        iterations=iterations,
        converged=bool(converged),
        residual_history=tuple(history),
    )


def residual(u: SpectralField, op: OperatorSpec, nl: NonlinearitySpec) -> float:
    """Relative equation residual ||P(D)u - N(u)||_{L^2} / ||u||_{L^2}."""
    if u.space != "real":
        raise ValueError("residual requires a real-space field")
    nl.validate_dimension(u.grid.n)
    norm_u = np.linalg.norm(u.values)
    if norm_u == 0.0:
        raise ValueError("residual of the zero field is undefined")
    sym = symbol(op, u.grid.xi_sq)
    pu = np.fft.ifftn(sym * np.fft.fftn(u.values)).real
    nu = _nonlinearity_values(nl, u.grid, u.values)
    return float(np.linalg.norm(pu - nu) / norm_u)


def action(u: SpectralField, op: OperatorSpec, nl: NonlinearitySpec) -> float:
    """Action value (1/2) <P(D)u, u> - (1/p) <N(u), u> with the mass term included.

    P(D) is the full symbol (its zero-frequency value is 1 for both kinds) and
    p is the variational exponent: degree + 1 for powers, 4 for Hartree.
    """
    if u.space != "real":
        raise ValueError("action requires a real-space field")
    nl.validate_dimension(u.grid.n)
    grid = u.grid
    sym = symbol(op, grid.xi_sq)
    uh = np.fft.fftn(u.values) * grid.cell_volume
    quad = float(np.sum(sym * (uh.real**2 + uh.imag**2)) / grid.volume)
    nu = _nonlinearity_values(nl, grid, u.values)
    pairing = float(np.sum(nu * u.values) * grid.cell_volume)
    return 0.5 * quad - pairing / nl.variational_exponent


def initialization_stability(
    op: OperatorSpec, nl: NonlinearitySpec, grid: Grid, cfg: SolverConfig = SolverConfig()
) -> float:
    """Max pairwise H^1 distance of solves started from perturbed initial data."""
    guesses = [
        gaussian_guess(grid, 1.0),
        gaussian_guess(grid, 0.7),
        gaussian_guess(grid, 1.4),
    ]
    bump = 1.0 + 0.1 * np.cos(2.0 * np.pi * grid.coordinates()[0] / grid.length)
    guesses.append(SpectralField(grid, gaussian_guess(grid, 1.0).values * bump))

    results = []
    for g in guesses:
        cfg_g = SolverConfig(
            method=cfg.method,
            tolerance=cfg.tolerance,
            max_iterations=cfg.max_iterations,
            time_step=cfg.time_step,
            initial_guess=g,
            gamma=cfg.gamma,
        )
        res = solve(op, nl, grid, cfg_g)
        if not res.converged:
            raise GroundStateError("perturbed initialization failed to converge")
        results.append(res.field)

    worst = 0.0
    for a, b in combinations(results, 2):
        diff = SpectralField(grid, a.values - b.values)
        worst = max(worst, sobolev_norm(diff, 1.0))
    return worst
