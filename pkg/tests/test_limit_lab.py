from __future__ import annotations

import numpy as np
import pytest

import nrlimit as nr
from nrlimit.limit_lab import ConvergenceRecord
from oracles import dense_gap_fd

SMALL = nr.make_grid(1, 16.0, 64)


def synthetic_records(c_values, norm_fn):
    out = []
    for c in c_values:
        n = norm_fn(c)
        out.append(
            ConvergenceRecord(
                c=float(c),
                diff_norms={1.0: n},
                h_minus1_residual=0.0,
                lam=0.0,
                v_norm_h1=0.0,
                action_c=0.0,
                sup_norms={1.0: 1.0},
            )
        )
    return out


class TestSweep:
    def test_identical_fields_give_zero_row(self, u_inf_1d):
        rec = nr.convergence_record(u_inf_1d.field, u_inf_1d.field, 1.0e9, [0.5, 1.0, 2.0])
        assert all(v == 0.0 for v in rec.diff_norms.values())
        assert rec.lam == 0.0
        assert rec.v_norm_h1 == 0.0

    def test_projection_pythagoras(self, sweep_1d):
        u_inf = sweep_1d["u_inf"]
        ref_sq = nr.sobolev_norm(u_inf.field, 1.0) ** 2
        for rec in sweep_1d["records"]:
            w_sq = rec.diff_norms[1.0] ** 2
            gap = abs(w_sq - rec.lam**2 * ref_sq - rec.v_norm_h1**2)
            assert gap <= 1e-8 * w_sq

    def test_halving_per_doubling(self, sweep_1d):
        records = sweep_1d["records"]
        norms = [r.diff_norms[1.0] for r in records]
        for a, b in zip(norms, norms[1:]):
            assert 3.6 <= a / b <= 4.4

    def test_diff_norms_monotone_in_order(self, sweep_1d):
        for rec in sweep_1d["records"]:
            ordered = [rec.diff_norms[s] for s in (0.5, 1.0, 2.0, 3.0, 4.0)]
            assert all(x <= y for x, y in zip(ordered, ordered[1:]))

    def test_lambda_smallness(self, sweep_1d):
        ratios = [abs(r.lam) / (r.diff_norms[1.0] ** 2 + 1.0 / r.c**2) for r in sweep_1d["records"]]
        assert max(ratios) <= 1.0
        assert max(ratios) / min(ratios) <= 2.0

    def test_validation(self, grid1d):
        with pytest.raises(ValueError):
            nr.sweep([8.0, 4.0], [1.0], nr.power(3), grid1d)
        with pytest.raises(ValueError):
            nr.sweep([0.5], [1.0], nr.power(3), grid1d)
        with pytest.raises(ValueError):
            nr.sweep([], [1.0], nr.power(3), grid1d)

    def test_nonconvergence_aborts_with_partial_report(self, grid1d, u_inf_1d):
        starving = nr.SolverConfig(max_iterations=5)
        with pytest.raises(nr.SweepError) as info:
            nr.sweep([4.0, 8.0], [1.0], nr.power(3), grid1d, starving, u_inf=u_inf_1d)
        assert info.value.records == []
        assert "4.0" in str(info.value)

    def test_partial_records_for_mixed_convergence(self, grid1d, u_inf_1d):
        k4 = nr.solve(nr.pseudo_relativistic(4.0), nr.power(3), grid1d).iterations
        k8 = nr.solve(nr.pseudo_relativistic(8.0), nr.power(3), grid1d).iterations
        if k4 >= k8:
            pytest.skip("iteration counts do not separate the two points")
        cfg = nr.SolverConfig(max_iterations=k4)
        with pytest.raises(nr.SweepError) as info:
            nr.sweep([4.0, 8.0], [1.0], nr.power(3), grid1d, cfg, u_inf=u_inf_1d)
        assert [r.c for r in info.value.records] == [4.0]

    def test_threaded_sweep_matches_serial(self, grid1d, u_inf_1d):
        serial = nr.sweep([4.0, 8.0], [1.0], nr.power(3), grid1d, u_inf=u_inf_1d)
        threaded = nr.sweep([4.0, 8.0], [1.0], nr.power(3), grid1d, u_inf=u_inf_1d, threads=2)
        for a, b in zip(serial, threaded):
            assert a.c == b.c
            assert a.diff_norms == b.diff_norms


class TestFitRate:
    def test_exact_inverse_square(self):
        records = synthetic_records([2.0, 4.0, 8.0, 16.0], lambda c: 7.0 / c**2)
        fit = nr.fit_rate(records, 1.0)
        assert np.isclose(fit.slope, -2.0, atol=1e-12)
        assert np.isclose(fit.A_hat, 7.0) and np.isclose(fit.B_hat, 7.0)

    def test_exact_inverse_first_power(self):
        records = synthetic_records([2.0, 4.0, 8.0, 16.0], lambda c: 1.0 / c)
        assert np.isclose(nr.fit_rate(records, 1.0).slope, -1.0, atol=1e-12)

    def test_requires_four_records(self):
        records = synthetic_records([2.0, 4.0, 8.0], lambda c: 1.0 / c)
        with pytest.raises(ValueError):
            nr.fit_rate(records, 1.0)

    def test_rejects_zero_norms(self):
        records = synthetic_records([2.0, 4.0, 8.0, 16.0], lambda c: 0.0)
        with pytest.raises(ValueError):
            nr.fit_rate(records, 1.0)

    def test_floor_filters_points(self):
        records = synthetic_records([2.0, 4.0, 8.0, 16.0], lambda c: 1.0 / c**2)
        fit = nr.fit_rate(records, 1.0, floor=1.0 / 100.0)
        assert fit.c_range == (2.0, 4.0, 8.0)
        with pytest.raises(ValueError):
            nr.fit_rate(records, 1.0, floor=1.0)

    def test_real_sweep_slope(self, sweep_1d):
        fit = nr.fit_rate(sweep_1d["records"], 1.0, floor=1e-10)
        assert -2.15 <= fit.slope <= -1.85
        assert fit.A_hat <= fit.B_hat


class TestHMinus1Residual:
    def test_single_mode_closed_form(self):
        g = nr.make_grid(1, 32.0, 1024)
        x = g.coordinates()[0]
        xi0 = 2.0 * np.pi * 4 / g.length
        u = nr.SpectralField(g, np.cos(xi0 * x))
        c = 7.0
        defect = float(nr.symbol_defect(nr.pseudo_relativistic(c), np.array([xi0**2]))[0])
        expected = defect / np.sqrt(1.0 + xi0**2) * np.sqrt(g.length / 2.0)
        assert np.isclose(nr.h_minus1_residual(u, c), expected, rtol=1e-12)

    def test_vanishes_as_c_grows(self, sech_exact):
        assert nr.h_minus1_residual(sech_exact, 1.0e6) < 1e-9

    def test_scaled_stability_on_sweep(self, sweep_1d):
        vals = [r.c**2 * r.h_minus1_residual for r in sweep_1d["records"] if r.c in (16.0, 32.0, 64.0)]
        assert len(vals) == 3
        assert max(vals) / min(vals) <= 1.05


class TestNondegeneracyGap:
    def test_algebraic_identity_at_reference_state(self, u_inf_1d):
        assert nr.linearization_identity_residual(u_inf_1d.field, nr.power(3)) <= 1e-8

    def test_translation_zero_mode(self, grid1d):
        # sech tanh is annihilated by the linearized operator (odd class)
        x = grid1d.coordinates()[0]
        u_inf = nr.SpectralField(grid1d, np.sqrt(2.0) / np.cosh(x))
        mode = nr.SpectralField(grid1d, np.tanh(x) / np.cosh(x))
        image = nr.apply_multiplier(mode, nr.nonrelativistic()).values - nr.linearize(
            nr.power(3), u_inf, mode
        ).values
        assert np.sqrt(np.sum(image**2) * grid1d.dx) <= 1e-8

    def test_gap_matches_dense_fd_oracle(self, grid1d):
        x = grid1d.coordinates()[0]
        analytic = nr.SpectralField(grid1d, np.sqrt(2.0) / np.cosh(x))
        spectral = nr.nondegeneracy_gap(analytic, nr.power(3))
        dense = dense_gap_fd(32.0, 4096, lambda t: np.sqrt(2.0) / np.cosh(t), 3)
        assert spectral > 0.0
        assert abs(spectral - dense) / dense <= 1e-6

    def test_gap_stable_under_refinement_and_reference_perturbation(self, grid1d, u_inf_1d):
        from_solver = nr.nondegeneracy_gap(u_inf_1d.field, nr.power(3))
        x = grid1d.coordinates()[0]
        analytic = nr.nondegeneracy_gap(nr.SpectralField(grid1d, np.sqrt(2.0) / np.cosh(x)), nr.power(3))
        assert abs(from_solver - analytic) <= 1e-6 * analytic
        fine_grid = nr.make_grid(1, 32.0, 2048)
        xf = fine_grid.coordinates()[0]
        fine = nr.nondegeneracy_gap(nr.SpectralField(fine_grid, np.sqrt(2.0) / np.cosh(xf)), nr.power(3))
        assert abs(fine - analytic) <= 1e-4 * analytic

    def test_hartree_gap_positive(self, sweep_3d):
        gap = nr.nondegeneracy_gap(sweep_3d["u_inf"].field, nr.hartree())
        assert gap > 0.0


class TestOptimalityFunctional:
    def test_nonnegative_on_random_fields(self):
        rng = np.random.default_rng(40)
        for _ in range(100):
            f = nr.SpectralField(SMALL, rng.standard_normal(SMALL.shape))
            for c in (1.0, 4.0, 32.0):
                assert nr.optimality_functional(f, c) >= 0.0

    def test_single_mode_value_and_lower_bound(self):
        g = nr.make_grid(1, 32.0, 1024)
        x = g.coordinates()[0]
        for k in (1, 3, 5):
            xi0 = 2.0 * np.pi * k / g.length
            mode = nr.SpectralField(g, np.cos(xi0 * x))
            mode_mass = g.length / 2.0
            for c in (10.0, 20.0, 50.0):
                got = nr.optimality_functional(mode, c)
                defect = float(nr.symbol_defect(nr.pseudo_relativistic(c), np.array([xi0**2]))[0])
                assert np.isclose(got, defect * mode_mass, rtol=1e-12)
                assert got >= xi0**4 / (1.03 * c * c) * mode_mass

    def test_scaled_form_approaches_laplacian_energy(self, sweep_1d):
        u_inf = sweep_1d["u_inf"].field
        vals = {c: c * c * nr.optimality_functional(u_inf, c) for c in (16.0, 32.0, 64.0)}
        assert vals[16.0] < vals[32.0] < vals[64.0]
        assert abs(vals[64.0] - 28.0 / 15.0) <= 0.02 * 28.0 / 15.0


class TestBootstrapRatio:
    def test_zero_difference(self, u_inf_1d):
        assert nr.bootstrap_ratio(u_inf_1d.field, u_inf_1d.field, 0.5, 3.0, 8.0) == 0.0

    def test_constant_shift_gives_half(self, grid1d, u_inf_1d):
        c = 8.0
        alpha = 1.0 / (c * c * np.sqrt(grid1d.length))
        shifted = nr.SpectralField(grid1d, u_inf_1d.field.values + alpha)
        ratio = nr.bootstrap_ratio(shifted, u_inf_1d.field, 0.5, 3.0, c)
        assert np.isclose(ratio, 0.5, rtol=1e-10)

    def test_order_validation(self, u_inf_1d):
        with pytest.raises(ValueError):
            nr.bootstrap_ratio(u_inf_1d.field, u_inf_1d.field, 3.0, 0.5, 8.0)
        with pytest.raises(ValueError):
            nr.bootstrap_ratio(u_inf_1d.field, u_inf_1d.field, 0.25, 3.0, 8.0)

    def test_bounded_across_sweep(self, sweep_1d):
        ratios = [r.diff_norms[3.0] / (r.diff_norms[0.5] + 1.0 / r.c**2) for r in sweep_1d["records"]]
        assert max(ratios) / min(ratios) <= 3.0


class TestSobolevLadder:
    def test_hartree_sequence(self):
        assert nr.sobolev_ladder(3, None, "hartree", 4) == [0.5, 1.5, 2.5, 3.5, 4.5]

    def test_cubic_one_dimensional(self):
        # variational exponent 4: recursion jumps to 3/2, then unit steps
        assert nr.sobolev_ladder(1, 4, "power", 4) == [0.5, 1.5, 2.5, 3.5, 4.5]

    def test_quadratic_recursions(self):
        assert nr.sobolev_ladder(1, 3, "power", 3) == [0.5, 1.5, 2.5, 3.5]
        perturbed = nr.sobolev_ladder(2, 3, "power", 3)
        assert perturbed[0] == 0.5
        assert np.isclose(perturbed[1], 1.0 - 1e-3)
        assert np.isclose(perturbed[2], 2.0 * (1.0 - 1e-3))
        assert np.isclose(perturbed[3], perturbed[2] + 1.0)

    def test_supercritical_rejected(self):
        with pytest.raises(ValueError):
            nr.sobolev_ladder(2, 4, "power", 3)
        with pytest.raises(ValueError):
            nr.sobolev_ladder(3, 4, "power", 3)

    def test_count_validation(self):
        with pytest.raises(ValueError):
            nr.sobolev_ladder(1, 4, "power", 0)


class TestUniformBoundTable:
    def test_from_sweep_records(self, grid1d, sweep_1d):
        table = nr.uniform_bound_table(
            [4.0, 8.0, 16.0, 32.0, 64.0],
            [0.5, 1.0, 2.0, 3.0],
            nr.power(3),
            grid1d,
            records=sweep_1d["records"],
        )
        assert np.all(np.isfinite(table.norms))
        for row in table.norms:
            assert all(a <= b * (1 + 1e-12) for a, b in zip(row, row[1:]))
        u_inf = sweep_1d["u_inf"].field
        for s in (0.5, 1.0, 2.0, 3.0):
            assert table.max_per_s[s] <= 1.5 * nr.sobolev_norm(u_inf, s)

    def test_low_order_column_uniform(self, sweep_1d):
        col = [r.sup_norms[0.5] for r in sweep_1d["records"]]
        assert max(col) / min(col) <= 1.2
