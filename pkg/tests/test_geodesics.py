"""Geodesic shooting, polar grids, and energy quadrature on test charts."""

import math

import numpy as np
import pytest

from hyperdisk import pseudosphere
from hyperdisk.errors import BoundaryExceededError, SchemaError, StartOnSingularityError
from hyperdisk.geodesics import (CSV_HEADER, EnergyReport, EnergyRow, SurfaceChart,
                                 bending_energy, build_polar_grid, disk_energy,
                                 energy_floor, max_disk_radius_shooting,
                                 shoot_geodesic)


def euclidean_chart(density_value=2.0, margin_radius=50.0):
    """Flat plane in Cartesian coordinates with a constant bending density."""

    def metric(x, y):
        one = np.ones_like(np.asarray(x, dtype=float))
        return one, np.zeros_like(one), one

    def christoffel(x, y):
        z = np.zeros_like(np.asarray(x, dtype=float))
        return z, z, z, z, z, z

    def density(x, y):
        return np.full_like(np.asarray(x, dtype=float), density_value)

    def margin(x, y):
        return margin_radius - np.hypot(x, y)

    return SurfaceChart(name="plane", metric=metric, christoffel=christoffel,
                        density=density, domain_margin=margin)


class TestShooting:
    def test_straight_line_on_plane(self):
        ch = euclidean_chart()
        path = shoot_geodesic(ch, (0.2, -0.1), (3.0, 4.0), 2.0)
        (x, y), (px, py) = path.state_at_arclength(2.0)
        assert abs(x.item() - (0.2 + 2.0 * 0.6)) < 1e-10
        assert abs(y.item() - (-0.1 + 2.0 * 0.8)) < 1e-10
        assert abs(px.item() - 0.6) < 1e-10
        assert abs(py.item() - 0.8) < 1e-10

    def test_unit_speed_normalization(self):
        ch = euclidean_chart()
        path = shoot_geodesic(ch, (0.0, 0.0), (10.0, 0.0), 1.5)
        (x, _), _ = path.state_at_arclength(1.5)
        assert abs(x.item() - 1.5) < 1e-10

    def test_zero_length_shot(self):
        ch = euclidean_chart()
        path = shoot_geodesic(ch, (1.0, 2.0), (1.0, 0.0), 0.0)
        (x, y), _ = path.state_at_arclength(0.0)
        assert x.item() == 1.0 and y.item() == 2.0
        assert path.s_end == 0.0 and not path.hit_boundary

    def test_zero_direction_rejected(self):
        ch = euclidean_chart()
        with pytest.raises(ValueError, match="nonzero tangent"):
            shoot_geodesic(ch, (0.0, 0.0), (0.0, 0.0), 1.0)

    def test_negative_length_rejected(self):
        ch = euclidean_chart()
        with pytest.raises(ValueError, match="nonnegative"):
            shoot_geodesic(ch, (0.0, 0.0), (1.0, 0.0), -1.0)

    def test_start_on_singularity(self):
        ch = euclidean_chart(margin_radius=1.0)
        with pytest.raises(StartOnSingularityError):
            shoot_geodesic(ch, (2.0, 0.0), (1.0, 0.0), 0.5)

    def test_boundary_event_arclength(self):
        ch = euclidean_chart(margin_radius=1.0)
        path = shoot_geodesic(ch, (0.0, 0.0), (1.0, 0.0), 5.0)
        assert path.hit_boundary
        assert abs(path.s_end - 1.0) < 1e-9

    def test_arclength_out_of_range(self):
        ch = euclidean_chart()
        path = shoot_geodesic(ch, (0.0, 0.0), (1.0, 0.0), 1.0)
        with pytest.raises(ValueError, match="arclength"):
            path.state_at_arclength(1.5)

    def test_curved_chart_unit_speed(self):
        ch = pseudosphere.chart()
        path = shoot_geodesic(ch, (1.5, 0.0), (0.3, 1.0), 1.0)
        ts = np.linspace(0.0, path.t_end, 33)
        y = path.sol(ts)
        spd = ch.speed(y[0], y[1], y[2], y[3])
        assert np.abs(spd - 1.0).max() < 1e-9


class TestPolarGrid:
    def test_zero_radius_degenerate(self):
        ch = euclidean_chart()
        grid = build_polar_grid(ch, (0.5, 0.5), 0.0, 8, 16)
        assert grid.r.shape == (1,)
        assert np.allclose(grid.coords[0, :, 0], 0.5)
        assert bending_energy(grid) == (0.0, 0.0)

    def test_plane_grid_is_polar(self):
        ch = euclidean_chart()
        grid = build_polar_grid(ch, (0.0, 0.0), 1.0, 8, 16)
        r = np.hypot(grid.coords[..., 0], grid.coords[..., 1])
        assert np.abs(r - grid.r[:, None]).max() < 1e-9

    def test_boundary_exceeded_payload(self):
        ch = euclidean_chart(margin_radius=1.0)
        with pytest.raises(BoundaryExceededError) as exc:
            build_polar_grid(ch, (0.0, 0.0), 1.2, 8, 16)
        assert abs(exc.value.attained_radius - 1.0) < 1e-9
        assert 0.0 <= exc.value.blocking_direction < 2 * math.pi

    def test_pseudosphere_attained_radius_at_limit(self):
        # a disk hair above the maximal radius trips on the meridian ray
        # (polar angle pi is on the even grid) and reports ln cosh eta0
        eta0 = 1.5
        r_max = math.log(math.cosh(eta0))
        ch = pseudosphere.chart(eta0)
        with pytest.raises(BoundaryExceededError) as exc:
            build_polar_grid(ch, (eta0, 0.0), r_max + 5e-7, 16, 32)
        assert abs(exc.value.attained_radius - r_max) < 1e-6


class TestEnergy:
    def test_constant_density_closed_form(self):
        for R in (0.5, 1.0, 2.0):
            ch = euclidean_chart(density_value=3.0)
            grid = build_polar_grid(ch, (0.0, 0.0), R, 32, 8)
            e, err = bending_energy(grid)
            exact = 2.0 * math.pi * 3.0 * (math.cosh(R) - 1.0)
            assert abs(e - exact) < 1e-10 * max(1.0, exact)

    def test_pointwise_floor_density(self):
        ch = euclidean_chart(density_value=2.0)
        grid = build_polar_grid(ch, (0.0, 0.0), 1.3, 32, 8)
        e, _ = bending_energy(grid)
        assert e == pytest.approx(energy_floor(1.3), rel=1e-12)

    def test_disk_energy_row_fields(self):
        ch = euclidean_chart(density_value=2.0)
        row = disk_energy(ch, (0.0, 0.0), 0.8, n_r=16, n_psi=8, max_doublings=1)
        assert row.surface == "plane"
        assert row.R == 0.8
        assert row.energy == pytest.approx(energy_floor(0.8), rel=1e-10)
        assert row.N_r in (16, 32)

    def test_mirror_symmetric_density(self):
        eta0 = 1.7
        ch = pseudosphere.chart(eta0)
        grid = build_polar_grid(ch, (eta0, 0.0), 0.8, 16, 32)
        mirrored = grid.density[:, 1:][:, ::-1]     # psi -> 2 pi - psi
        assert np.abs(grid.density[:, 1:] - mirrored).max() < 1e-8

    def test_tolerance_halving_within_error_estimate(self):
        eta0 = 1.7
        ch = pseudosphere.chart(eta0)
        g1 = build_polar_grid(ch, (eta0, 0.0), 0.8, 32, 64, rtol=1e-10, atol=1e-12)
        g2 = build_polar_grid(ch, (eta0, 0.0), 0.8, 32, 64, rtol=5e-11, atol=5e-13)
        e1, err1 = bending_energy(g1)
        e2, _ = bending_energy(g2)
        assert abs(e1 - e2) < max(err1, 1e-12)


class TestMaxRadiusShooting:
    def test_plane_disk_unbounded_by_cap(self):
        ch = euclidean_chart(margin_radius=2.0)
        r = max_disk_radius_shooting(ch, (0.0, 0.0), 1.5, n_scan=8)
        assert math.isinf(r)

    def test_plane_disk_off_center(self):
        ch = euclidean_chart(margin_radius=2.0)
        r = max_disk_radius_shooting(ch, (0.5, 0.0), 5.0, n_scan=8)
        assert abs(r - 1.5) < 1e-6


class TestEnergyReport:
    def test_round_trip(self, tmp_path):
        rep = EnergyReport()
        rep.add(EnergyRow("pseudosphere", 1.94, 1.2, 87.24, 1e-6, 128, 256))
        rep.add(EnergyRow("amsler", 3.0, 0.9, 12.5, 2e-5, 64, 128))
        path = tmp_path / "energies.csv"
        rep.to_csv(path)
        back = EnergyReport.from_csv(path)
        assert len(back.rows) == 2
        assert back.rows[0].surface == "pseudosphere"
        assert back.rows[0].energy == pytest.approx(87.24, rel=1e-12)
        assert back.rows[1].N_psi == 128

    def test_header_schema_enforced(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("surface,param,R,energy\nfoo,1,1,1\n")
        with pytest.raises(SchemaError, match="header"):
            EnergyReport.from_csv(path)

    def test_header_constant(self):
        assert CSV_HEADER == ["surface", "param", "R", "energy",
                              "err_estimate", "N_r", "N_psi"]
