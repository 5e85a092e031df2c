import numpy as np
import pytest
from scipy import integrate

from skewlab.lab_1_fbm.core import (
    Grid,
    Lab1Sampler,
    RngSeed,
    _cholesky_factor,
    conditional_mean,
    conditional_variance,
    fbm_covariance,
    fit_local_nondeterminism,
    fit_two_time_lower_bound,
    kernel_constant,
    kernel_KH,
    kernel_KH_vec,
    kernel_square_integral,
    sample_fbm_cholesky,
    sample_fbm_circulant,
    sample_fbm_volterra,
    volterra_matrix,
)
from skewlab.shared.errors import DomainError, FactorizationError


def test_covariance_closed_form():
    assert fbm_covariance(1.0, 1.0, 0.3) == pytest.approx(1.0)
    assert fbm_covariance(0.3, 0.7, 0.5) == pytest.approx(0.3)
    assert fbm_covariance(1.0, 2.0, 0.25) == pytest.approx(np.sqrt(2.0) / 2.0, abs=1e-7)
    assert fbm_covariance(0.2, 0.9, 0.3) == pytest.approx(fbm_covariance(0.9, 0.2, 0.3))
    with pytest.raises(DomainError):
        fbm_covariance(-0.1, 1.0, 0.3)


def test_kernel_brownian_case_and_domain():
    assert kernel_KH(1.0, 0.4, 0.5) == 1.0
    with pytest.raises(DomainError):
        kernel_KH(1.0, 1.0, 0.3)
    with pytest.raises(DomainError):
        kernel_KH(1.0, 0.0, 0.3)


def test_kernel_matches_independent_quadrature():
    H, t, r = 0.25, 1.0, 0.5
    # plain Gauss–Kronrod with extrapolation, no algebraic weight
    inner, _ = integrate.quad(lambda z: z ** (H - 1.5) * (z - r) ** (H - 0.5), r, t, limit=500, epsabs=1e-13)
    oracle = kernel_constant(H) * ((t / r) ** (H - 0.5) * (t - r) ** (H - 0.5) + (0.5 - H) * r ** (0.5 - H) * inner)
    value = kernel_KH(t, r, H)
    print(f"K_H(1, 0.5, 0.25) = {value:.12f} (oracle {oracle:.12f})")
    assert value == pytest.approx(oracle, rel=1e-7)
    assert float(kernel_KH_vec(t, r, H)) == pytest.approx(value, rel=1e-9)


@pytest.mark.parametrize("H", [0.25, 0.3, 0.4])
@pytest.mark.parametrize("t", [0.25, 0.5, 1.0])
def test_kernel_normalisation(H, t):
    integral = kernel_square_integral(0.0, t, t, H)
    assert abs(integral - t ** (2 * H)) / t ** (2 * H) <= 1e-4


def test_cholesky_single_increment_variance():
    grid = Grid(0.5, 1)
    draws = Lab1Sampler().sample_ensemble("cholesky", grid, 0.3, seed=11, n_paths=100_000).fbm[:, 1]
    assert abs(draws.var() - grid.dt ** 0.6) / grid.dt ** 0.6 < 0.02


def test_cholesky_brownian_increments_uncorrelated():
    grid = Grid(1.0, 16)
    inc = np.diff(Lab1Sampler().sample_ensemble("cholesky", grid, 0.5, seed=3, n_paths=20_000).fbm, axis=1)
    rho = np.corrcoef(inc[:, :-1].ravel(), inc[:, 1:].ravel())[0, 1]
    assert abs(rho) < 0.02
    assert inc.var() == pytest.approx(grid.dt, rel=0.03)


def test_cholesky_covariance_probe():
    grid = Grid(1.0, 64)
    ens = Lab1Sampler().sample_ensemble("cholesky", grid, 0.25, seed=5, n_paths=50_000)
    report = Lab1Sampler().covariance_probe_report(ens, [(0.25, 0.5)])
    print(report)
    assert report["worst_rel_error"] < 0.03


def test_cholesky_rejects_patched_covariance():
    grid = Grid(1.0, 3)
    bad = np.array([[1.0, 2.0, 0.0], [2.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    with pytest.raises(FactorizationError):
        sample_fbm_cholesky(grid, 0.3, RngSeed(1), covariance=bad)
    with pytest.raises(DomainError):
        sample_fbm_cholesky(Grid(1.0, 5000), 0.3, RngSeed(1))


def test_circulant_matches_closed_form_covariance():
    grid = Grid(1.0, 256)
    station = Lab1Sampler()
    ens = station.sample_ensemble("circulant", grid, 0.3, seed=21, n_paths=50_000)
    report = station.covariance_probe_report(ens, [(1.0, 1.0), (0.5, 1.0), (0.5, 0.5)])
    print(report)
    assert report["worst_rel_error"] < 0.03


def test_circulant_brownian_and_domain():
    grid = Grid(2.0, 32)
    inc = np.diff(Lab1Sampler().sample_ensemble("circulant", grid, 0.5, seed=8, n_paths=20_000).fbm, axis=1)
    rho = np.corrcoef(inc[:, :-1].ravel(), inc[:, 1:].ravel())[0, 1]
    assert abs(rho) < 0.02
    with pytest.raises(DomainError):
        sample_fbm_circulant(Grid(1.0, 100), 0.3, RngSeed(1))


def test_single_path_equals_ensemble_row():
    grid = Grid(1.0, 64)
    ens = Lab1Sampler().sample_ensemble("circulant", grid, 0.3, seed=4, n_paths=3)
    single = sample_fbm_circulant(grid, 0.3, RngSeed(4, 2))
    np.testing.assert_allclose(single.values, ens.fbm[2], rtol=0, atol=1e-12)


def test_ensemble_independent_of_worker_count():
    grid = Grid(1.0, 32)
    serial = Lab1Sampler(threads=1).sample_ensemble("volterra", grid, 0.3, seed=19, n_paths=6)
    pooled = Lab1Sampler(threads=4).sample_ensemble("volterra", grid, 0.3, seed=19, n_paths=6)
    assert serial.fbm.tobytes() == pooled.fbm.tobytes()


def test_volterra_brownian_case_is_exact():
    pair = sample_fbm_volterra(Grid(1.0, 128), 0.5, RngSeed(9))
    assert np.array_equal(pair.fbm.values, pair.bm.values)


def test_volterra_variance_and_covariance():
    grid = Grid(1.0, 1024)
    station = Lab1Sampler()
    ens = station.sample_ensemble("volterra", grid, 0.3, seed=2024, n_paths=10_000)
    var_T = ens.fbm[:, -1].var()
    print(f"Var(B_T) = {var_T:.4f}")
    assert abs(var_T - 1.0) < 0.05
    report = station.covariance_probe_report(ens, [(0.25, 0.75)])
    assert report["worst_rel_error"] < 0.05


def test_volterra_pair_is_consistent_and_deterministic():
    grid = Grid(1.0, 64)
    a = sample_fbm_volterra(grid, 0.3, RngSeed(77, 1))
    b = sample_fbm_volterra(grid, 0.3, RngSeed(77, 1))
    c = sample_fbm_volterra(grid, 0.3, RngSeed(77, 2))
    assert a.is_consistent()
    assert a.fbm.values.tobytes() == b.fbm.values.tobytes()
    assert not np.array_equal(a.fbm.values, c.fbm.values)


def test_conditional_mean_edge_cases():
    grid = Grid(1.0, 64)
    pair = sample_fbm_volterra(grid, 0.3, RngSeed(1))
    assert conditional_mean(pair, 0.5, 0.5) == pair.fbm.values[32]
    assert conditional_mean(pair, 0.0, 0.75) == 0.0
    bm_pair = sample_fbm_volterra(grid, 0.5, RngSeed(1))
    assert conditional_mean(bm_pair, 0.25, 0.75) == bm_pair.bm.values[16]
    with pytest.raises(DomainError):
        conditional_mean(pair, 0.3, 0.5)
    with pytest.raises(DomainError):
        conditional_mean(pair, 0.75, 0.5)


def test_prediction_residual_orthogonal_to_past():
    grid = Grid(1.0, 128)
    ens = Lab1Sampler().sample_ensemble("volterra", grid, 0.3, seed=6, n_paths=10_000)
    s, t, u = 0.5, 0.75, 0.25
    residual = np.array([ens.fbm[i, 96] - conditional_mean(ens.pair(i), s, t) for i in range(ens.fbm.shape[0])])
    rho = np.corrcoef(residual, ens.bm[:, 32])[0, 1]
    assert abs(rho) < 0.05
    # the conditional mean row is the same quadrature as the sampler
    row = volterra_matrix(1.0, 128, 0.3)[95, :64]
    assert conditional_mean(ens.pair(0), s, t) == pytest.approx(float(row @ np.diff(ens.bm[0])[:64]))


def test_dense_factor_caches_hold_one_grid():
    volterra_matrix(1.0, 16, 0.3)
    volterra_matrix(1.0, 32, 0.3)
    info = volterra_matrix.cache_info()
    assert info.maxsize == 1 and info.currsize == 1
    assert _cholesky_factor.cache_info().maxsize == 1


def test_conditional_variance_brownian_and_domain():
    assert conditional_variance(0.2, 0.7, 0.5) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        conditional_variance(0.7, 0.7, 0.3)


@pytest.mark.parametrize("H", [0.25, 0.4])
def test_local_nondeterminism_slope(H):
    fit = fit_local_nondeterminism(H)
    print(fit)
    assert abs(fit["slope"] - 2 * H) <= 0.02
    assert fit["fitted_constant"] > 0


def test_two_time_lower_bound_constant_positive():
    rng = np.random.default_rng(0)
    triples = []
    for _ in range(20):
        s = rng.uniform(0.1, 0.6)
        t = s + rng.uniform(0.01, 0.3)
        u = s + rng.uniform(0.1, 1.0) * (t - s)
        triples.append((s, u, t))
    fit = fit_two_time_lower_bound(0.3, triples)
    assert fit["fitted_constant"] > 0


def test_grid_rejects_off_grid_times():
    grid = Grid(1.0, 10)
    assert grid.index_of(0.3) == 3
    with pytest.raises(DomainError):
        grid.index_of(0.35)
    with pytest.raises(DomainError):
        Grid(0.0, 10)


if __name__ == "__main__":
    test_covariance_closed_form()
    test_kernel_matches_independent_quadrature()
    test_local_nondeterminism_slope(0.25)
    test_volterra_variance_and_covariance()
    print("✅ fbm checks passed")
