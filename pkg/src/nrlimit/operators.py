"""Linear Fourier multipliers: the relativistic kinetic symbol and -Delta + 1.

The relativistic symbol sqrt(c^2|xi|^2 + c^4/4) - c^2/2 + 1 is evaluated in
rationalized form to avoid the catastrophic cancellation of the square root
against c^2/2 when c >> |xi|; the same trick gives the pointwise difference
(1+|xi|^2) - P_c(xi) = c^2 |xi|^4 / D^2 exactly, with
D = sqrt(c^2|xi|^2 + c^4/4) + c^2/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid, SpectralField, transform

__all__ = [
    "OperatorSpec",
    "pseudo_relativistic",
    "nonrelativistic",
    "symbol",
    "symbol_defect",
    "apply_multiplier",
    "symbol_gap_ratio",
    "symbol_gap_scan",
    "taylor_residual",
]

PSEUDO = "pseudo_relativistic"
NONREL = "nonrelativistic"


@dataclass(frozen=True)
class OperatorSpec:
    """Which kinetic multiplier to use; c is the light-speed parameter (>= 1)."""

    kind: str
    c: float = float("inf")

    def __post_init__(self) -> None:
        if self.kind not in (PSEUDO, NONREL):
            raise ValueError(f"kind must be {PSEUDO!r} or {NONREL!r}, got {self.kind!r}")
        if self.kind == PSEUDO:
            if not np.isfinite(self.c) or self.c < 1.0:
                raise ValueError(f"light-speed parameter must be finite and >= 1, got {self.c}")


def pseudo_relativistic(c: float) -> OperatorSpec:
    return OperatorSpec(PSEUDO, float(c))


def nonrelativistic() -> OperatorSpec:
    return OperatorSpec(NONREL)


def _sqrt_denominator(c: float, xi_sq):
    return np.sqrt(c * c * xi_sq + 0.25 * c**4) + 0.5 * c * c


def symbol(spec: OperatorSpec, xi_sq):
    """Multiplier value at squared frequency xi_sq (scalar or array).

    Relativistic branch: 1 + c^2 |xi|^2 / D, which equals
    sqrt(c^2|xi|^2 + c^4/4) - c^2/2 + 1 without cancellation.
    """
    xi_sq = np.asarray(xi_sq, dtype=np.float64)
    if np.any(xi_sq < 0):
        raise ValueError("squared frequency must be nonnegative")
    if spec.kind == NONREL:
        return 1.0 + xi_sq
    c = spec.c
    return 1.0 + c * c * xi_sq / _sqrt_denominator(c, xi_sq)


def symbol_defect(spec: OperatorSpec, xi_sq):
    """Pointwise (1 + |xi|^2) - P(xi), always >= 0; zero for the nonrelativistic kind.

    Evaluated as c^2 |xi|^4 / D^2, exact and cancellation-free.
    """
    xi_sq = np.asarray(xi_sq, dtype=np.float64)
    if spec.kind == NONREL:
        return np.zeros_like(xi_sq)
    c = spec.c
    d = _sqrt_denominator(c, xi_sq)
    return c * c * xi_sq * xi_sq / (d * d)


def apply_multiplier(f: SpectralField, spec: OperatorSpec, mode: str = "forward") -> SpectralField:
    """Multiply spectral coefficients by the symbol or its reciprocal.

    The reciprocal is always well defined since the symbol is >= 1 on the
    lattice.  Output representation matches the input representation.
    """
    if mode not in ("forward", "inverse_of_symbol"):
        raise ValueError(f"mode must be 'forward' or 'inverse_of_symbol', got {mode!r}")
    values = symbol(spec, f.grid.xi_sq)
    if mode == "inverse_of_symbol":
        values = 1.0 / values
    if f.space == "freq":
        return SpectralField(f.grid, f.values * values, space="freq")
    fh = transform(f, "forward")
    return transform(SpectralField(f.grid, fh.values * values, space="freq"), "inverse")


def symbol_gap_ratio(spec: OperatorSpec, grid: Grid) -> float:
    """min over the lattice of P(xi) / sqrt(1 + |xi|^2)."""
    ratio = symbol(spec, grid.xi_sq) / np.sqrt(1.0 + grid.xi_sq)
    return float(np.min(ratio))


def symbol_gap_scan(spec: OperatorSpec, xi_max: float = 1.0e3, samples: int = 200_001) -> float:
    """Dense off-lattice scan of P(xi) / sqrt(1 + |xi|^2) over |xi| in [0, xi_max]."""
    xi = np.linspace(0.0, xi_max, samples)
    t = xi * xi
    ratio = symbol(spec, t) / np.sqrt(1.0 + t)
    return float(np.min(ratio))


def taylor_residual(spec: OperatorSpec, grid: Grid, cutoff_fraction: float) -> float:
    """max over lattice 0 < |xi| <= cutoff_fraction * c of c^2 ((1+|xi|^2) - P_c) / |xi|^4.

    Certifies that the multiplier gap scales like |xi|^4 / c^2 in the window
    below the relativistic frequency scale; the max tends to 1 as c grows.
    """
    if spec.kind != PSEUDO:
        raise ValueError("taylor_residual is defined for the pseudo_relativistic kind")
    if not 0.0 < cutoff_fraction <= 0.5:
        raise ValueError(f"cutoff_fraction must lie in (0, 1/2], got {cutoff_fraction}")
    t = grid.xi_sq
    window = (t > 0.0) & (np.sqrt(t) <= cutoff_fraction * spec.c)
    if not np.any(window):
        raise ValueError("frequency window below the cutoff contains no nonzero lattice mode")
    tw = t[window]
    ratio = spec.c**2 * symbol_defect(spec, tw) / (tw * tw)
    return float(np.max(ratio))
