import math

import numpy as np
import pytest
from scipy import integrate, special

from skewlab.lab_1_fbm.core import Ensemble, Grid, HurstParam, Lab1Sampler, SamplePath
from skewlab.lab_7_fracops.core import (
    Lab7Operators,
    OperatorConfig,
    bm_to_fbm,
    bm_to_fbm_rows,
    boundedness_ratio,
    composite_decomposition,
    fbm_to_bm,
    gaussianity_diagnostic,
    pi_tilde,
    riemann_liouville,
)
from skewlab.shared.errors import DomainError, EstimationError, SingularIntegralError


def path_of(fn, n=256, t_end=1.0):
    grid = Grid(t_end, n)
    return SamplePath(grid, fn(grid.points))


# --- Π̃^h ---
@pytest.mark.parametrize("h", [1.0, 0.3, -0.2, -0.5])
def test_pi_tilde_annihilates_constants(h):
    out = pi_tilde(h, path_of(lambda t: np.full_like(t, 2.5)))
    assert np.all(out.values == 0.0)


def test_pi_tilde_closed_forms():
    f = path_of(lambda t: t)
    assert np.array_equal(pi_tilde(0.0, f).values, f.values)
    np.testing.assert_allclose(pi_tilde(1.0, f).values, 0.5 * f.grid.points**2, rtol=1e-12, atol=1e-15)
    # t^a: Π̃^h t^a = a/(h+a) · t^{h+a}, exact for a = 1 with the cell integrals
    np.testing.assert_allclose(pi_tilde(-0.3, f).values, (1.0 / 0.7) * _pow(f.grid.points, 0.7), rtol=1e-10)


def _pow(t, a):
    return np.where(t > 0, t**a, 0.0)


def test_pi_tilde_singular_orders():
    f = path_of(lambda t: 1.0 + t)
    with pytest.raises(SingularIntegralError):
        pi_tilde(-1.0, f)
    assert np.all(pi_tilde(-1.5, path_of(np.zeros_like)).values == 0.0)


def test_pi_tilde_singular_orders_only_need_f_zero_near_the_origin():
    a = 0.25
    late = path_of(lambda t: np.maximum(t - a, 0.0), n=64)
    t = late.grid.points
    after = t >= a
    # Π̃^{-1}(s − a)_+ = log(t/a) and Π̃^{-3/2}(s − a)_+ = 2(a^{-1/2} − t^{-1/2}) for t ≥ a
    log_form = pi_tilde(-1.0, late).values
    np.testing.assert_allclose(log_form[after], np.log(t[after] / a), rtol=1e-12, atol=1e-13)
    assert np.all(log_form[~after] == 0.0)
    np.testing.assert_allclose(pi_tilde(-1.5, late).values[after], 2.0 * (a**-0.5 - t[after] ** -0.5),
                               rtol=1e-12, atol=1e-12)

    with pytest.raises(SingularIntegralError, match="f\\(0\\)"):
        pi_tilde(-1.0, path_of(lambda t: 1.0 + t, n=64))
    with pytest.raises(SingularIntegralError, match="first|t_1"):
        pi_tilde(-1.2, path_of(lambda t: t, n=64))


# --- I^h ---
def test_riemann_liouville_of_order_one_is_the_running_integral():
    f = path_of(lambda t: np.sin(5.0 * t) + t**2)
    expected = integrate.cumulative_trapezoid(f.values, dx=f.grid.dt, initial=0.0)
    np.testing.assert_allclose(riemann_liouville(1.0, f).values, expected, rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("h", [0.2, 0.25, 0.5, 0.8])
def test_riemann_liouville_of_one(h):
    f = path_of(np.ones_like, n=512)
    expected = f.grid.points**h / special.gamma(h + 1.0)
    np.testing.assert_allclose(riemann_liouville(h, f).values, expected, rtol=1e-10, atol=1e-15)


def test_riemann_liouville_semigroup():
    f = path_of(np.ones_like, n=4096)
    twice = riemann_liouville(0.25, riemann_liouville(0.25, f))
    t = f.grid.points
    mask = t >= 0.25
    expected = t[mask] ** 0.5 / special.gamma(1.5)
    rel = np.max(np.abs(twice.values[mask] - expected) / expected)
    print(f"semigroup relative gap {rel:.2e}")
    assert rel <= 1e-4


def test_riemann_liouville_domain():
    f = path_of(np.ones_like, n=8)
    for h in (0.0, -0.5, 1.5):
        with pytest.raises(DomainError):
            riemann_liouville(h, f)


def test_midpoint_quadrature_is_available_but_coarser():
    f = path_of(np.ones_like, n=256)
    cfg = OperatorConfig(HurstParam(0.3), quadrature="midpoint")
    exact = f.grid.points**0.2 / special.gamma(1.2)
    gap_mid = np.max(np.abs(riemann_liouville(0.2, f, cfg).values - exact))
    gap_exact = np.max(np.abs(riemann_liouville(0.2, f).values - exact))
    assert gap_exact < gap_mid
    with pytest.raises(DomainError):
        OperatorConfig(HurstParam(0.3), quadrature="simpson")


# --- 𝒜 and Ā ---
def test_composite_annihilates_constants_and_is_identity_at_half():
    c = path_of(lambda t: np.full_like(t, -4.0), n=512)
    assert np.max(np.abs(fbm_to_bm(c, 0.3).values)) <= 1e-10
    f = path_of(lambda t: np.sin(3.0 * t))
    assert np.array_equal(fbm_to_bm(f, 0.5).values, f.values)
    assert np.array_equal(bm_to_fbm(f, 0.5).values, f.values)


def test_composite_is_linear_and_causal():
    ens = Lab1Sampler().sample_ensemble("volterra", Grid(1.0, 256), 0.3, seed=8, n_paths=2)
    f, g = ens.paths("fbm")
    combined = SamplePath(f.grid, 2.0 * f.values - 3.0 * g.values)
    lhs = fbm_to_bm(combined, 0.3).values
    rhs = 2.0 * fbm_to_bm(f, 0.3).values - 3.0 * fbm_to_bm(g, 0.3).values
    np.testing.assert_allclose(lhs, rhs, atol=1e-12 * np.max(np.abs(lhs)))
    assert Lab7Operators().truncation_gap(f, 0.3, 100) <= 1e-12


def test_roundtrip_recovers_driving_brownian_motion():
    ens = Lab1Sampler().sample_ensemble("volterra", Grid(1.0, 4096), 0.3, seed=2025, n_paths=3)
    report = Lab7Operators().roundtrip(ens)
    print(report)
    assert report["max_rel_error"] <= 0.05
    assert report["constant_image"] <= 1e-10
    assert report["decomposition_rel_gap"] <= 1e-6


def test_four_term_decomposition_matches_composition():
    ens = Lab1Sampler().sample_ensemble("volterra", Grid(1.0, 512), 0.25, seed=9, n_paths=1)
    f = ens.paths("fbm")[0]
    parts = composite_decomposition(f, 0.25)
    direct = fbm_to_bm(f, 0.25).values
    assert np.max(np.abs(parts["total"].values - direct)) <= 1e-6 * np.max(np.abs(direct))
    assert all(np.isfinite(parts[k]).all() for k in ("f1", "f2", "f3", "f4"))


def test_bm_to_fbm_matches_fbm_covariance():
    grid = Grid(1.0, 64)
    sampler = Lab1Sampler()
    bm = sampler.sample_ensemble("volterra", grid, 0.5, seed=17, n_paths=20_000).bm
    fbm = bm_to_fbm_rows(bm, grid, 0.3)
    report = sampler.covariance_probe_report(Ensemble(grid, 0.3, fbm), [(0.25, 0.5), (0.5, 1.0), (1.0, 1.0)])
    print(report)
    assert report["worst_rel_error"] < 0.05


def test_boundedness_ratio_over_corpus():
    report = Lab7Operators().boundedness_corpus(Grid(2.0, 512), 0.3, seed=4, size=50)
    assert len(report["ratios"]) == 50
    assert math.isfinite(report["max_ratio"]) and report["max_ratio"] <= 5.0
    assert boundedness_ratio(path_of(np.zeros_like), 0.3) == 0.0


# --- law diagnostics ---
def test_gaussianity_calibrates_on_brownian_motion():
    ens = Lab1Sampler().sample_ensemble("volterra", Grid(1.0, 256), 0.5, seed=23, n_paths=2000)
    report = gaussianity_diagnostic(ens.paths("bm"))
    print(report)
    assert report["passes"] and not report["degenerate"]


def test_composite_of_fbm_passes_brownian_diagnostic():
    ens = Lab1Sampler().sample_ensemble("volterra", Grid(1.0, 1024), 0.3, seed=24, n_paths=2000)
    report = Lab7Operators().bm_law(ens, stride=16)
    print(report)
    assert report["passes"]


def test_gaussianity_flags_constant_and_small_ensembles():
    grid = Grid(1.0, 32)
    constant = [SamplePath(grid, np.full(33, 1.0)) for _ in range(500)]
    assert gaussianity_diagnostic(constant)["degenerate"]
    with pytest.raises(EstimationError):
        gaussianity_diagnostic(constant[:10])


if __name__ == "__main__":
    test_pi_tilde_closed_forms()
    test_riemann_liouville_semigroup()
    test_roundtrip_recovers_driving_brownian_motion()
    print("✅ fracops checks passed")
