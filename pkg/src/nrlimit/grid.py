"""Periodic-box spectral discretization: grids, sampled fields, transforms, norms.

The box is the cube [-L/2, L/2)^n sampled on N points per axis, with the
frequency lattice {2*pi*k/L : k in [-N/2, N/2)}^n.  Forward transforms are
continuum-normalized (multiplied by dx^n) so that coefficients approximate
the integral transform of the sampled function, and Sobolev norms carry the
weight (1+|xi|^2)^s with the measure (2*pi/L)^n / (2*pi)^n per mode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Grid",
    "SpectralField",
    "make_grid",
    "transform",
    "sobolev_norm",
    "inner_product",
    "symmetrize",
    "recenter",
    "lp_norm",
]

SOBOLEV_ORDER_MIN = -4.0
SOBOLEV_ORDER_MAX = 8.0


@dataclass(frozen=True)
class Grid:
    """Cubic periodic grid: dimension n, box length L, N points per axis.

    Derived arrays (spacing, frequency lattice, centering phase) are
    precomputed once; instances are immutable and cheap to share.
    """

    n: int
    length: float
    points: int

    def __post_init__(self) -> None:
        if self.n not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.n}")
        if self.length <= 0:
            raise ValueError(f"box length must be positive, got {self.length}")
        if self.points % 2 != 0 or self.points < 16:
            raise ValueError(f"points per axis must be even and >= 16, got {self.points}")

        dx = self.length / self.points
        object.__setattr__(self, "dx", dx)
        object.__setattr__(self, "shape", (self.points,) * self.n)

        axis = -0.5 * self.length + dx * np.arange(self.points)
        object.__setattr__(self, "axis", axis)
        freq_axis = 2.0 * np.pi * np.fft.fftfreq(self.points, d=dx)
        object.__setattr__(self, "freq_axis", freq_axis)

        mesh = np.meshgrid(*([freq_axis] * self.n), indexing="ij")
        object.__setattr__(self, "xi_sq", sum(a * a for a in mesh))

        # (-1)^k per axis: shifts the transform origin to the box center so
        # coefficients carry the phase of a function centered at x = 0.
        k = np.rint(np.fft.fftfreq(self.points) * self.points).astype(int)
        sign = np.where(k % 2 == 0, 1.0, -1.0)
        smesh = np.meshgrid(*([sign] * self.n), indexing="ij")
        phase = np.ones(self.shape)
        for s in smesh:
            phase = phase * s
        object.__setattr__(self, "center_phase", phase)

    @property
    def cell_volume(self) -> float:
        return self.dx**self.n

    @property
    def volume(self) -> float:
        return self.length**self.n

    @property
    def center_index(self) -> tuple[int, ...]:
        """Index of the x = 0 sample."""
        return (self.points // 2,) * self.n

    def coordinates(self) -> tuple[np.ndarray, ...]:
        """Meshed coordinate arrays, one per axis."""
        return tuple(np.meshgrid(*([self.axis] * self.n), indexing="ij"))

    def radius_sq(self) -> np.ndarray:
        """|x|^2 on the mesh."""
        return sum(a * a for a in self.coordinates())


@dataclass(frozen=True)
class SpectralField:
    """Samples of a real field on a Grid, in real or frequency representation.

    Real-space values are real float64; frequency-space values are the
    continuum-normalized complex coefficients of a real field (conjugate
    symmetric).  Instances are value objects: the stored array is copied and
    frozen at construction.
    """

    grid: Grid
    values: np.ndarray
    space: str = "real"

    def __post_init__(self) -> None:
        if self.space not in ("real", "freq"):
            raise ValueError(f"space must be 'real' or 'freq', got {self.space!r}")
        arr = np.asarray(self.values)
        if arr.shape != self.grid.shape:
            raise ValueError(f"values shape {arr.shape} does not match grid shape {self.grid.shape}")
        if self.space == "real":
            if np.iscomplexobj(arr):
                raise TypeError("real-space field must have real values")
            arr = np.array(arr, dtype=np.float64)
        else:
            arr = np.array(arr, dtype=np.complex128)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def is_real_space(self) -> bool:
        return self.space == "real"


def make_grid(n: int, length: float, points: int) -> Grid:
    """Build a periodic cubic grid; rejects odd N, N < 16, L <= 0, n not in 1..3."""
    return Grid(n=n, length=float(length), points=int(points))


def transform(f: SpectralField, direction: str) -> SpectralField:
    """Continuum-normalized FFT between real and frequency representations.

    Forward multiplies the discrete transform by dx^n so coefficients
    approximate the integral of f * exp(-i xi . x) over the box; inverse
    undoes this exactly.
    """
    if direction == "forward":
        if f.space != "real":
            raise ValueError("forward transform requires a real-space field")
        coeff = np.fft.fftn(f.values) * (f.grid.cell_volume * f.grid.center_phase)
        return SpectralField(f.grid, coeff, space="freq")
    if direction == "inverse":
        if f.space != "freq":
            raise ValueError("inverse transform requires a frequency-space field")
        vals = np.fft.ifftn(f.values * f.grid.center_phase).real / f.grid.cell_volume
        return SpectralField(f.grid, vals, space="real")
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def _coefficients(f: SpectralField) -> np.ndarray:
    if f.space == "freq":
        return f.values
    return transform(f, "forward").values


def sobolev_norm(f: SpectralField, s: float) -> float:
    """H^s norm of f via (1+|xi|^2)^s spectral weights; s = 0 is the L^2 norm."""
    if not SOBOLEV_ORDER_MIN <= s <= SOBOLEV_ORDER_MAX:
        raise ValueError(f"Sobolev order s={s} outside supported range [{SOBOLEV_ORDER_MIN}, {SOBOLEV_ORDER_MAX}]")
    coeff = _coefficients(f)
    weight = (1.0 + f.grid.xi_sq) ** s
    total = np.sum(weight * (coeff.real**2 + coeff.imag**2))
    return float(np.sqrt(total / f.grid.volume))


def inner_product(f: SpectralField, g: SpectralField, weight: str = "L2") -> float:
    """Integral pairing of two fields on the same grid.

    'L2' returns the integral of f*g; 'H1' returns the integral of
    grad f . grad g + f*g, evaluated spectrally.
    """
    if f.grid != g.grid:
        raise ValueError("inner_product requires fields on the same grid")
    if weight == "L2":
        if f.space == "real" and g.space == "real":
            return float(np.sum(f.values * g.values) * f.grid.cell_volume)
        fh, gh = _coefficients(f), _coefficients(g)
        return float(np.sum(np.conj(fh) * gh).real / f.grid.volume)
    if weight == "H1":
        fh, gh = _coefficients(f), _coefficients(g)
        w = 1.0 + f.grid.xi_sq
        return float(np.sum(w * np.conj(fh) * gh).real / f.grid.volume)
    raise ValueError(f"weight must be 'L2' or 'H1', got {weight!r}")


def _reflect(values: np.ndarray, ax: int) -> np.ndarray:
    # index j -> (-j) mod N realizes x -> -x on the centered periodic lattice
    return np.roll(np.flip(values, axis=ax), 1, axis=ax)


def symmetrize(f: SpectralField) -> SpectralField:
    """Average of f over the per-axis reflections x_i -> -x_i; idempotent."""
    if f.space != "real":
        raise ValueError("symmetrize requires a real-space field")
    vals = f.values
    for ax in range(f.grid.n):
        vals = 0.5 * (vals + _reflect(vals, ax))
    return SpectralField(f.grid, vals)


def recenter(f: SpectralField) -> SpectralField:
    """Circularly shift the peak of |f| to the x = 0 sample."""
    if f.space != "real":
        raise ValueError("recenter requires a real-space field")
    peak = np.unravel_index(np.argmax(np.abs(f.values)), f.grid.shape)
    shift = tuple(c - p for c, p in zip(f.grid.center_index, peak))
    if all(s == 0 for s in shift):
        return f
    return SpectralField(f.grid, np.roll(f.values, shift, axis=tuple(range(f.grid.n))))


def lp_norm(f: SpectralField, p: float) -> float:
    """Lebesgue L^p norm of a real-space field (cell-volume weighted)."""
    if f.space != "real":
        raise ValueError("lp_norm requires a real-space field")
    return float((np.sum(np.abs(f.values) ** p) * f.grid.cell_volume) ** (1.0 / p))
