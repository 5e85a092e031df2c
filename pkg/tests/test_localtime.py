import numpy as np
import pytest

from skewlab.lab_1_fbm.core import Grid, Lab1Sampler, RngSeed, SamplePath, sample_fbm_volterra
from skewlab.lab_3_localtime.core import (
    Lab3LocalTime,
    SpaceGrid,
    holder_exponent_scan,
    mass_defect,
    occupation_density,
    occupation_formula_residual,
)
from skewlab.shared.errors import DomainError, EstimationError


def fbm_path(n=256, H=0.3, seed=1):
    return sample_fbm_volterra(Grid(1.0, n), H, RngSeed(seed)).fbm


def test_constant_path_fills_one_cell():
    grid = Grid(1.0, 10)
    path = SamplePath(grid, np.full(11, 0.37))
    field = occupation_density(path, SpaceGrid(0.0, 1.0, 10))
    L = field.mass
    assert np.count_nonzero(L[-1]) == 1 and L[-1, 3] > 0
    np.testing.assert_allclose(L.sum(axis=1) * 0.1, grid.points, rtol=1e-12)


def test_unit_speed_path_has_unit_local_time():
    grid = Grid(1.0, 64)
    field = occupation_density(SamplePath(grid, grid.points), SpaceGrid(0.0, 1.0, 16))
    np.testing.assert_allclose(field.at(64), np.ones(16), rtol=1e-12)


def test_triangular_path_crosses_twice():
    grid = Grid(2.0, 128)
    values = 1.0 - np.abs(1.0 - grid.points)
    field = occupation_density(SamplePath(grid, values), SpaceGrid(0.0, 1.0, 16))
    np.testing.assert_allclose(field.at(128), np.full(16, 2.0), rtol=1e-12)


def test_fbm_field_invariants():
    path = fbm_path()
    field = occupation_density(path, SpaceGrid.covering(path.values, 256))
    assert mass_defect(field) <= 1e-10
    L = field.mass
    assert np.all(L >= 0)
    assert np.all(np.diff(L, axis=0) >= 0)
    edges = field.space_grid.edges
    outside = (edges[1:] < path.values.min()) | (edges[:-1] > path.values.max())
    assert outside.any()
    assert np.all(L[:, outside] == 0.0)


def test_space_grid_widens_and_rejects_zero_width():
    path = fbm_path(n=64)
    field = occupation_density(path, SpaceGrid(0.0, 0.1, 4))
    assert field.space_grid.covers(path.values.min(), path.values.max())
    assert field.space_grid.dx == pytest.approx(0.025)
    with pytest.raises(DomainError):
        SpaceGrid(1.0, 1.0, 4)


def test_reflection_is_a_reindexing():
    path = fbm_path(n=128)
    field = occupation_density(path, SpaceGrid.symmetric(3.0, 200))
    mirrored = field.reflected()
    assert np.array_equal(mirrored.mass, field.mass[:, ::-1])
    assert mirrored.space_grid.x_min == -field.space_grid.x_max


def test_residual_for_constant_and_linear_functions():
    path = fbm_path()
    field = occupation_density(path, SpaceGrid.covering(path.values, 256))
    assert occupation_formula_residual(path, field, lambda x: np.ones_like(x)) <= 1e-12 * 1.0

    grid = Grid(1.0, 64)
    line = SamplePath(grid, grid.points)
    line_field = occupation_density(line, SpaceGrid(0.0, 1.0, 16))
    assert occupation_formula_residual(line, line_field, lambda x: x) <= line_field.space_grid.dx


def test_residual_exact_for_cell_unions():
    path = fbm_path(seed=7)
    space = SpaceGrid.covering(path.values, 64)
    field = occupation_density(path, space)
    chosen = np.zeros(space.m_cells, dtype=bool)
    chosen[[20, 21, 22, 40]] = True
    edges = space.edges

    def indicator(x):
        return chosen[space.cell_of(x)].astype(float)

    def antiderivative(y):
        y = np.asarray(y, dtype=float)[..., None]
        return np.clip(y - edges[:-1][chosen], 0.0, space.dx).sum(axis=-1)

    assert occupation_formula_residual(path, field, indicator, antiderivative=antiderivative) <= 1e-12


def test_lipschitz_residual_refines_at_first_order():
    grid = Grid(1.0, 4096)
    path = SamplePath(grid, grid.points**2)
    report = Lab3LocalTime().refinement_ratio(path, lambda x: x, 64)
    print(report)
    assert report["ratio"] >= 1.5


def test_time_mode_exponent_matches_one_minus_h():
    ens = Lab1Sampler().sample_ensemble("volterra", Grid(1.0, 512), 0.3, seed=31, n_paths=200)
    fields = Lab3LocalTime().fields_for_ensemble(ens)
    report = holder_exponent_scan(fields, mode="time", moment=8)
    print(report)
    assert 0.6 <= report["slope_per_moment"] <= 0.8
    assert not report["degenerate"]


def test_space_mode_exponent_is_positive_and_at_most_one():
    ens = Lab1Sampler().sample_ensemble("volterra", Grid(1.0, 256), 0.25, seed=32, n_paths=50)
    fields = Lab3LocalTime().fields_for_ensemble(ens)
    report = holder_exponent_scan(fields, mode="space", moment=2)
    print(report)
    assert 0.0 < report["slope_per_moment"] <= 1.05


def test_identical_fields_are_degenerate_and_short_grids_fail():
    path = fbm_path(n=256)
    field = occupation_density(path, SpaceGrid.covering(path.values, 256))
    assert holder_exponent_scan([field] * 5, mode="time")["degenerate"]
    assert holder_exponent_scan([field] * 3, mode="space", moment=2)["degenerate"]
    short = fbm_path(n=32)
    short_field = occupation_density(short, SpaceGrid.covering(short.values, 32))
    with pytest.raises(EstimationError):
        holder_exponent_scan([short_field, short_field], mode="time")


if __name__ == "__main__":
    test_unit_speed_path_has_unit_local_time()
    test_fbm_field_invariants()
    test_time_mode_exponent_matches_one_minus_h()
    print("✅ local-time checks passed")
