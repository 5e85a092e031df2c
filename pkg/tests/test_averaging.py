import math

import numpy as np
import pytest

from skewlab.lab_1_fbm.core import Grid, RngSeed, SamplePath, sample_fbm_volterra
from skewlab.lab_2_besov.core import DriftSpec, GridField, bump_density, smooth_preset
from skewlab.lab_3_localtime.core import SpaceGrid, occupation_density
from skewlab.lab_4_averaging.core import (
    Lab4Averaging,
    averaging_direct,
    averaging_via_localtime,
    field_regularity,
    mollified_operator_limit,
)
from skewlab.shared.errors import DomainError


def fbm_path(n=512, H=0.3, seed=12, t_end=1.0):
    return sample_fbm_volterra(Grid(t_end, n), H, RngSeed(seed)).fbm


def gaussian_density(x, width):
    return np.exp(-0.5 * x * x / width) / math.sqrt(2.0 * math.pi * width)


def test_constant_drift_averages_to_ct():
    path = fbm_path(n=128)
    field = averaging_direct(smooth_preset("constant", value=2.0), path, SpaceGrid(-1.0, 1.0, 32))
    np.testing.assert_allclose(field.values, 2.0 * np.outer(path.grid.points, np.ones(32)), rtol=1e-12, atol=1e-15)


def test_gaussian_along_the_zero_path():
    grid = Grid(1.0, 64)
    space = SpaceGrid(-3.0, 3.0, 48)
    field = averaging_direct(DriftSpec.gaussian(1.0, 0.5), SamplePath(grid, np.zeros(65)), space)
    expected = np.outer(grid.points, gaussian_density(space.centers, 0.5))
    np.testing.assert_allclose(field.values, expected, rtol=1e-12, atol=1e-15)


def test_direct_route_rejects_drifts_without_pointwise_values():
    path = fbm_path(n=64)
    for b in (DriftSpec.dirac(1.0), DriftSpec.power_cusp(-0.5, 1.0), smooth_preset("linear")):
        with pytest.raises(DomainError):
            averaging_direct(b, path, SpaceGrid(-1.0, 1.0, 8))


def test_dirac_field_is_the_reflected_local_time():
    path = fbm_path(n=256)
    lt = occupation_density(path, SpaceGrid.covering(path.values, 128))
    field = averaging_via_localtime(DriftSpec.dirac(2.5), lt)
    assert np.array_equal(field.values, 2.5 * lt.reflected().mass)
    assert field.space_grid.x_min == -lt.space_grid.x_max


def test_periodic_constant_table_averages_to_ct():
    path = fbm_path(n=256)
    lt = occupation_density(path, SpaceGrid.covering(path.values, 100))
    b = DriftSpec.gridded(GridField(-8.0, 8.0, np.full(256, -1.5)), extension="periodic")
    field = averaging_via_localtime(b, lt)
    np.testing.assert_allclose(field.values, -1.5 * np.outer(path.grid.points, np.ones(100)), atol=1e-10)


def test_two_routes_agree_for_a_smooth_drift():
    path = fbm_path(n=4096, seed=40)
    report = Lab4Averaging().two_route_check(DriftSpec.gaussian(1.0, 2.0), path, m_cells=2048)
    print(f"relative discrepancy {report['relative_discrepancy']:.2e}")
    assert report["relative_discrepancy"] <= 1e-3


def test_drift_support_wider_than_the_window_is_handled_exactly():
    path = fbm_path(n=4096, seed=40)
    wide = DriftSpec.smooth(lambda x: bump_density(x, 20.0), name="wide_bump", nonnegative=True)
    report = Lab4Averaging().two_route_check(wide, path, m_cells=2048)
    window = report["window"]
    assert window["x_max"] - window["x_min"] < 20.0
    assert report["relative_discrepancy"] <= 1e-3

    lt = occupation_density(path, SpaceGrid.covering(path.values, 256))
    cusp = averaging_via_localtime(DriftSpec.power_cusp(-0.4, 50.0), lt)
    assert np.all(np.isfinite(cusp.values))


def test_nonnegative_drifts_give_nondecreasing_fields():
    path = fbm_path(n=512, seed=41)
    lt = occupation_density(path, SpaceGrid.covering(path.values, 256))
    for b in (DriftSpec.gaussian(1.0, 0.05), DriftSpec.power_cusp(-0.4, 0.5)):
        values = averaging_via_localtime(b, lt).values
        assert np.all(values >= 0.0)
        assert np.all(np.diff(values, axis=0) >= 0.0)


def _bumpy(x, phase):
    return np.sin(3.0 * x + phase) * np.exp(-0.5 * x * x)


def test_localtime_route_is_linear_in_the_drift():
    path = fbm_path(n=512, seed=42)
    lt = occupation_density(path, SpaceGrid.covering(path.values, 200))
    x = GridField(-8.0, 8.0, np.zeros(512)).x
    f1, f2 = _bumpy(x, 0.0), _bumpy(x, 1.0)
    T1 = averaging_via_localtime(DriftSpec.gridded(GridField(-8.0, 8.0, f1)), lt).values
    T2 = averaging_via_localtime(DriftSpec.gridded(GridField(-8.0, 8.0, f2)), lt).values
    T12 = averaging_via_localtime(DriftSpec.gridded(GridField(-8.0, 8.0, 2.0 * f1 - f2)), lt).values
    np.testing.assert_allclose(T12, 2.0 * T1 - T2, atol=1e-12 * np.max(np.abs(T12)))


def test_shifting_the_path_shifts_the_field():
    path = fbm_path(n=512, seed=43)
    c = 5.0 / 64.0
    b = DriftSpec.gaussian(1.0, 0.3)
    T = averaging_via_localtime(b, occupation_density(path, SpaceGrid(-8.0, 8.0, 1024)))
    shifted = SamplePath(path.grid, path.values + c)
    Tc = averaging_via_localtime(b, occupation_density(shifted, SpaceGrid(-8.0 + c, 8.0 + c, 1024)))
    # T^{w+c} b(x) = T^w b(x + c): both tables sit on the same cell indices
    np.testing.assert_allclose(Tc.values, T.values, atol=1e-10)
    assert Tc.space_grid.x_min == pytest.approx(T.space_grid.x_min - c)


def test_mollified_dirac_converges_to_local_time():
    path = fbm_path(n=2048, seed=44)
    lt = occupation_density(path, SpaceGrid.covering(path.values, 1024))
    report = mollified_operator_limit(DriftSpec.dirac(1.0), lt, [8, 32, 128])
    print(report["rows"])
    assert report["strictly_decreasing"]


def test_mollified_gaussian_converges_at_first_order():
    path = fbm_path(n=1024, seed=45)
    lt = occupation_density(path, SpaceGrid.covering(path.values, 512))
    report = mollified_operator_limit(DriftSpec.gaussian(1.0, 0.5), lt, [4, 16, 64])
    d = [r["distance"] for r in report["rows"]]
    print(d)
    assert d[1] < 0.5 * d[0] and d[2] < 0.5 * d[1]


def test_zero_drift_has_zero_mollification_distance():
    path = fbm_path(n=256, seed=46)
    lt = occupation_density(path, SpaceGrid.covering(path.values, 64))
    report = mollified_operator_limit(smooth_preset("constant", value=0.0), lt, [2, 4])
    assert all(r["distance"] == 0.0 for r in report["rows"])
    assert report["non_increasing"] and not report["strictly_decreasing"]
    with pytest.raises(DomainError):
        mollified_operator_limit(DriftSpec.dirac(1.0), lt, [8, 4])


def test_regularity_of_a_constant_drift_field():
    path = fbm_path(n=64, t_end=2.0)
    field = averaging_direct(smooth_preset("constant", value=-3.0), path, SpaceGrid(-1.0, 1.0, 16))
    report = field_regularity(field, gamma=0.6, eta=0.5, p_var=1.5)
    assert report["holder_seminorm"] == pytest.approx(3.0 * 2.0 ** 0.4, rel=1e-12)
    assert report["attained_at"] == (0, 64)
    assert report["pvar_seminorm"] == pytest.approx(6.0, rel=1e-10)
    with pytest.raises(DomainError):
        field_regularity(field)


def test_regularity_of_a_dirac_field_is_finite():
    path = fbm_path(n=512, seed=47)
    lt = occupation_density(path, SpaceGrid.covering(path.values, 256))
    report = field_regularity(averaging_via_localtime(DriftSpec.dirac(1.0), lt), gamma=0.52, eta=0.5)
    print(report["holder_seminorm"])
    assert 0.0 < report["holder_seminorm"] < math.inf


if __name__ == "__main__":
    test_constant_drift_averages_to_ct()
    test_dirac_field_is_the_reflected_local_time()
    test_two_routes_agree_for_a_smooth_drift()
    print("✅ averaging checks passed")
