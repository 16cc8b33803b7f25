"""Analysis layer for the large-c limit: sweeps, rate fits, spectral-gap and
residual diagnostics built on top of the solver.

A sweep solves the relativistic problem over an ascending list of c values
against a single nonrelativistic reference state on the same grid, and
records per-order difference norms, the H^{-1} defect residual, the
projection coefficient of the difference onto the reference state, action
values and sup-norm table entries.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh

from .grid import Grid, SpectralField, inner_product, sobolev_norm, transform
from .nonlinearity import LADDER_EPS, NonlinearitySpec, _coulomb_values, linearize
from .operators import OperatorSpec, nonrelativistic, pseudo_relativistic, symbol_defect
from .ground_state import GroundStateResult, SolverConfig, solve

__all__ = [
    "ConvergenceRecord",
    "RateFit",
    "SweepError",
    "UniformBoundTable",
    "convergence_record",
    "sweep",
    "fit_rate",
    "h_minus1_residual",
    "nondegeneracy_gap",
    "linearization_identity_residual",
    "optimality_functional",
    "bootstrap_ratio",
    "sobolev_ladder",
    "uniform_bound_table",
]

DEFLATION_SHIFT = 10.0  # pushes the removed directions above the sought eigenvalue


@dataclass(frozen=True)
class ConvergenceRecord:
    """One row of a c-sweep: difference norms and diagnostics at a single c."""

    c: float
    diff_norms: dict[float, float]
    h_minus1_residual: float
    lam: float
    v_norm_h1: float
    action_c: float
    sup_norms: dict[float, float]


@dataclass(frozen=True)
class RateFit:
    s: float
    slope: float
    A_hat: float
    B_hat: float
    c_range: tuple[float, ...]


class SweepError(RuntimeError):
    """A sweep point failed to converge; carries the records built so far."""

    def __init__(self, message: str, records: list[ConvergenceRecord]):
        super().__init__(message)
        self.records = records


def convergence_record(
    u_c: SpectralField,
    u_inf: SpectralField,
    c: float,
    s_values,
    action_c: float = 0.0,
) -> ConvergenceRecord:
    """Build a sweep row from solved fields on a shared grid."""
    if u_c.grid != u_inf.grid:
        raise ValueError("difference norms require both fields on the identical grid")
    grid = u_c.grid
    w = SpectralField(grid, u_c.values - u_inf.values)
    diff = {float(s): sobolev_norm(w, s) for s in s_values}
    sup = {float(s): sobolev_norm(u_c, s) for s in s_values}
    ref_sq = inner_product(u_inf, u_inf, "H1")
    lam = inner_product(w, u_inf, "H1") / ref_sq
    v = SpectralField(grid, w.values - lam * u_inf.values)
    return ConvergenceRecord(
        c=float(c),
        diff_norms=diff,
        h_minus1_residual=h_minus1_residual(u_c, c),
        lam=float(lam),
        v_norm_h1=sobolev_norm(v, 1.0),
        action_c=float(action_c),
        sup_norms=sup,
    )


def sweep(
    c_values,
    s_values,
    nl: NonlinearitySpec,
    grid: Grid,
    cfg: SolverConfig = SolverConfig(),
    u_inf: GroundStateResult | None = None,
    threads: int = 1,
) -> list[ConvergenceRecord]:
    """Solve the relativistic problem for each c and record convergence data.

    The nonrelativistic reference is solved once (or supplied precomputed on
    the same grid).  A non-converged point aborts with SweepError carrying the
    records of the points that did converge.
    """
    c_values = [float(c) for c in c_values]
    if not c_values:
        raise ValueError("sweep requires at least one c value")
    if any(c < 1.0 for c in c_values):
        raise ValueError("sweep requires c >= 1")
    if sorted(c_values) != c_values:
        raise ValueError("c values must be ascending")

    if u_inf is None:
        u_inf = solve(nonrelativistic(), nl, grid, cfg)
    if not u_inf.converged:
        raise SweepError("nonrelativistic reference solve did not converge", [])

    def solve_point(c: float) -> GroundStateResult:
        return solve(pseudo_relativistic(c), nl, grid, cfg)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(solve_point, c_values))
    else:
        results = [solve_point(c) for c in c_values]

    records: list[ConvergenceRecord] = []
    failed: list[float] = []
    for c, res in zip(c_values, results):
        if res.converged:
            records.append(convergence_record(res.field, u_inf.field, c, s_values, res.action))
        else:
            failed.append(c)
    if failed:
        raise SweepError(f"sweep points did not converge at c = {failed}", records)
    return records


def fit_rate(records, s: float, floor: float = 0.0) -> RateFit:
    """Least-squares slope of log ||w||_{H^s} against log c, with empirical
    two-sided constants A_hat = min c^2 ||w||, B_hat = max c^2 ||w||.

    Points with ||w||_{H^s} below `floor` are excluded (discretization guard).
    """
    records = list(records)
    if len(records) < 4:
        raise ValueError("rate fit requires at least 4 records")
    pts = []
    for r in records:
        norm = r.diff_norms[float(s)]
        if norm <= 0.0:
            raise ValueError(f"nonpositive difference norm at c={r.c}")
        if norm >= floor:
            pts.append((r.c, norm))
    if len(pts) < 2:
        raise ValueError("too few points above the discretization floor to fit")
    logs_c = np.log([c for c, _ in pts])
    logs_n = np.log([n for _, n in pts])
    slope = float(np.polyfit(logs_c, logs_n, 1)[0])
    scaled = [c * c * n for c, n in pts]
    return RateFit(
        s=float(s),
        slope=slope,
        A_hat=float(min(scaled)),
        B_hat=float(max(scaled)),
        c_range=tuple(c for c, _ in pts),
    )


def h_minus1_residual(u_c: SpectralField, c: float) -> float:
    """H^{-1} norm of the symbol-defect operator applied to u_c at parameter c."""
    spec = pseudo_relativistic(c)
    coeff = u_c.values if u_c.space == "freq" else transform(u_c, "forward").values
    g = SpectralField(u_c.grid, symbol_defect(spec, u_c.grid.xi_sq) * coeff, space="freq")
    return sobolev_norm(g, -1.0)


def _even_projection(grid: Grid, flat: np.ndarray) -> np.ndarray:
    vals = flat.reshape(grid.shape)
    for ax in range(grid.n):
        vals = 0.5 * (vals + np.roll(np.flip(vals, axis=ax), 1, axis=ax))
    return vals.ravel()


def nondegeneracy_gap(
    u_inf: SpectralField,
    nl: NonlinearitySpec,
    grid: Grid | None = None,
    tol: float = 1.0e-10,
    seed: int = 20,
) -> float:
    """Smallest constrained Rayleigh quotient <Lv, v>_{L^2} / ||v||_{H^1}^2.

    L is the linearization (-Delta + 1) - N'(u_inf), the minimum runs over
    even fields H^1-orthogonal to u_inf, and the quotient is computed through
    the symmetric similarity B^{-1/2} L B^{-1/2} (B = -Delta + 1) with the
    constraint and the odd modes deflated by explicit projection inside every
    matrix-vector product.  A nonpositive return signals a defective reference
    state or projection; it is reported as computed, never clipped.
    """
    if grid is None:
        grid = u_inf.grid
    elif grid != u_inf.grid:
        raise ValueError("reference state lives on a different grid")
    nl.validate_dimension(grid.n)

    b_sym = 1.0 + grid.xi_sq
    b_half = np.sqrt(b_sym)
    b_inv_half = 1.0 / b_half
    u0 = u_inf.values

    if nl.kind == "power":
        w_mult = nl.p * u0 ** (nl.p - 1)

        def apply_linearization(v: np.ndarray) -> np.ndarray:
            return np.fft.ifftn(b_sym * np.fft.fftn(v)).real - w_mult * v

    else:
        phi0 = _coulomb_values(grid, u0 * u0)

        def apply_linearization(v: np.ndarray) -> np.ndarray:
            bv = np.fft.ifftn(b_sym * np.fft.fftn(v)).real
            return bv - phi0 * v - 2.0 * u0 * _coulomb_values(grid, u0 * v)

    y = np.fft.ifftn(b_half * np.fft.fftn(u0)).real.ravel()
    y /= np.linalg.norm(y)
    size = u0.size

    def project(flat: np.ndarray) -> np.ndarray:
        even = _even_projection(grid, flat)
        return even - np.dot(y, even) * y

    def matvec(flat: np.ndarray) -> np.ndarray:
        pz = project(flat)
        v = np.fft.ifftn(b_inv_half * np.fft.fftn(pz.reshape(grid.shape))).real
        lv = apply_linearization(v)
        s = np.fft.ifftn(b_inv_half * np.fft.fftn(lv)).real.ravel()
        return project(s) + DEFLATION_SHIFT * (flat - pz)

    rng = np.random.default_rng(seed)
    v0 = project(rng.standard_normal(size))
    operator = LinearOperator((size, size), matvec=matvec, dtype=np.float64)
    vals = eigsh(operator, k=1, which="SA", tol=tol, v0=v0, return_eigenvectors=False)
    return float(vals[0])


def linearization_identity_residual(u_inf: SpectralField, nl: NonlinearitySpec) -> float:
    """Relative residual of L u_inf = -(p-2)(-Delta+1) u_inf at the reference state.

    p is the variational exponent; the identity is exact at any solution of
    the nonrelativistic equation.  Returned value is normalized by the H^2
    norm of the reference state.
    """
    grid = u_inf.grid
    b_sym = 1.0 + grid.xi_sq
    bu = np.fft.ifftn(b_sym * np.fft.fftn(u_inf.values)).real
    lu = bu - linearize(nl, u_inf, u_inf).values
    target = -(nl.variational_exponent - 2) * bu
    err = np.linalg.norm(lu - target) * np.sqrt(grid.cell_volume)
    return float(err / sobolev_norm(u_inf, 2.0))


def optimality_functional(u_inf: SpectralField, c: float) -> float:
    """Quadratic form of the kinetic-symbol defect at parameter c.

    Spectral evaluation of the integral of |u_inf_hat|^2 ((1+|xi|^2) - P_c(xi));
    nonnegative for every field, and c^2 times it converges to the squared
    L^2 norm of the Laplacian of the reference state.
    """
    spec = pseudo_relativistic(c)
    coeff = u_inf.values if u_inf.space == "freq" else transform(u_inf, "forward").values
    defect = symbol_defect(spec, u_inf.grid.xi_sq)
    total = np.sum(defect * (coeff.real**2 + coeff.imag**2))
    return float(total / u_inf.grid.volume)


def bootstrap_ratio(u_c: SpectralField, u_inf: SpectralField, s_from: float, s_to: float, c: float) -> float:
    """||w||_{H^{s_to}} / (||w||_{H^{s_from}} + 1/c^2) for w = u_c - u_inf."""
    if not s_to > s_from >= 0.5:
        raise ValueError("bootstrap requires s_to > s_from >= 1/2")
    if u_c.grid != u_inf.grid:
        raise ValueError("bootstrap requires fields on the identical grid")
    w = SpectralField(u_c.grid, u_c.values - u_inf.values)
    return sobolev_norm(w, s_to) / (sobolev_norm(w, s_from) + 1.0 / (c * c))


def sobolev_ladder(n: int, p: float | None, kind: str, count: int) -> list[float]:
    """Increasing Sobolev orders along which product estimates iterate.

    Hartree: s_k = k + 1/2.  Power type (p is the variational exponent): the
    recursion s_{k+1} = 1 - n(p-2)/2 + (p-1) s_k until the first order above
    n/2, then unit steps.  An order landing exactly on n/2 is nudged down by
    1e-3 before continuing.  Returns count+1 orders starting at 1/2.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if kind == "hartree":
        if n != 3:
            raise ValueError("hartree ladder is defined in dimension 3")
        return [k + 0.5 for k in range(count + 1)]
    if kind != "power":
        raise ValueError(f"kind must be 'power' or 'hartree', got {kind!r}")
    if p is None or p <= 2:
        raise ValueError("power ladder requires a variational exponent p > 2")
    if 1.0 / (p - 2.0) - (n - 1.0) / 2.0 <= 0.0:
        raise ValueError(f"exponent p={p} is outside the subcritical range for n={n}: ladder does not increase")

    half_n = 0.5 * n
    ladder = [0.5]
    crossed = ladder[0] > half_n
    while len(ladder) <= count:
        if crossed:
            nxt = ladder[-1] + 1.0
        else:
            nxt = 1.0 - 0.5 * n * (p - 2.0) + (p - 1.0) * ladder[-1]
            if nxt == half_n:
                nxt = half_n - LADDER_EPS
        crossed = crossed or nxt > half_n
        ladder.append(nxt)
    return ladder


@dataclass(frozen=True)
class UniformBoundTable:
    c_values: tuple[float, ...]
    s_values: tuple[float, ...]
    norms: np.ndarray  # shape (len(c_values), len(s_values))
    max_per_s: dict[float, float]


def uniform_bound_table(
    c_values,
    s_values,
    nl: NonlinearitySpec,
    grid: Grid,
    cfg: SolverConfig = SolverConfig(),
    records: list[ConvergenceRecord] | None = None,
) -> UniformBoundTable:
    """Matrix of ||u_c||_{H^s} over the sweep with the per-s max summary row.

    Reuses precomputed sweep records when provided (they must cover every
    requested c and s); otherwise runs the solves.
    """
    c_values = [float(c) for c in c_values]
    s_values = [float(s) for s in s_values]
    if records is None:
        records = sweep(c_values, s_values, nl, grid, cfg)
    by_c = {r.c: r for r in records}
    matrix = np.empty((len(c_values), len(s_values)))
    for i, c in enumerate(c_values):
        for j, s in enumerate(s_values):
            matrix[i, j] = by_c[c].sup_norms[s]
    max_per_s = {s: float(matrix[:, j].max()) for j, s in enumerate(s_values)}
    return UniformBoundTable(tuple(c_values), tuple(s_values), matrix, max_per_s)
