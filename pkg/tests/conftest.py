from __future__ import annotations

import time

import numpy as np
import pytest

import nrlimit as nr


def random_field(grid, rng, scale=1.0):
    return nr.SpectralField(grid, scale * rng.standard_normal(grid.shape))


def smooth_random_field(grid, rng, width=2.0, scale=1.0):
    """Band-limited random field: white noise with a Gaussian spectral envelope."""
    noise = rng.standard_normal(grid.shape)
    envelope = np.exp(-grid.xi_sq / (2.0 * width**2))
    vals = np.fft.ifftn(envelope * np.fft.fftn(noise)).real
    peak = np.max(np.abs(vals))
    return nr.SpectralField(grid, scale * vals / peak)


@pytest.fixture(scope="session")
def grid1d():
    return nr.make_grid(1, 32.0, 1024)


@pytest.fixture(scope="session")
def sech_exact(grid1d):
    x = grid1d.coordinates()[0]
    return nr.SpectralField(grid1d, np.sqrt(2.0) / np.cosh(x))


@pytest.fixture(scope="session")
def u_inf_1d(grid1d):
    result = nr.solve(nr.nonrelativistic(), nr.power(3), grid1d)
    assert result.converged
    return result


@pytest.fixture(scope="session")
def sweep_1d(grid1d, u_inf_1d):
    """Canonical 1D cubic sweep: c in {4,...,64}, orders up to 4, timed."""
    start = time.perf_counter()
    u_inf = nr.solve(nr.nonrelativistic(), nr.power(3), grid1d)
    records = nr.sweep([4.0, 8.0, 16.0, 32.0, 64.0], [0.5, 1.0, 2.0, 3.0, 4.0], nr.power(3), grid1d, u_inf=u_inf)
    elapsed = time.perf_counter() - start
    return {"records": records, "u_inf": u_inf, "elapsed": elapsed}


@pytest.fixture(scope="session")
def grid3d():
    return nr.make_grid(3, 16.0, 64)


@pytest.fixture(scope="session")
def sweep_3d(grid3d):
    """3D Hartree sweep: c in {4,...,32}, orders up to 4, timed."""
    start = time.perf_counter()
    u_inf = nr.solve(nr.nonrelativistic(), nr.hartree(), grid3d)
    assert u_inf.converged
    records = nr.sweep([4.0, 8.0, 16.0, 32.0], [0.5, 1.0, 2.0, 3.0, 4.0], nr.hartree(), grid3d, u_inf=u_inf)
    elapsed = time.perf_counter() - start
    return {"records": records, "u_inf": u_inf, "elapsed": elapsed}
