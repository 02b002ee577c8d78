from __future__ import annotations

from collections import Counter
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randent.errors import RootNotFoundError, ValidationError
from randent.linalg import evolve_unitary, hermitian_eigen, pure_density
from randent.measures import concurrence
from randent.quenched import (
    INDEX_CLASSES,
    LINEAR_ENTROPY_SATURATION,
    GueParams,
    QuenchedEnsembleConfig,
    averaged_linear_entropy_analytic,
    averaged_rho_analytic,
    class_representatives,
    eof_vanishing_time,
    evolve_quenched,
    f_tau,
    gue_normalization,
    gue_phase_average,
    index_class,
    psi_c,
    r_jklm,
    r_table,
    run_quenched_ensemble,
    sample_gue,
)

from conftest import random_hermitian, random_state

BELL = pure_density(np.array([1, 0, 0, 1]) / np.sqrt(2))
KET11 = pure_density([0, 0, 0, 1])
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def exponent_pattern(j, k, l, m):
    """Sorted nonzero |coefficients| of E_1..E_4 in E_j - E_k + E_l - E_m."""
    c = Counter()
    for idx, sign in zip((j, k, l, m), (1, -1, 1, -1)):
        c[idx] += sign
    return tuple(sorted(abs(v) for v in c.values() if v))


PATTERN_CLASS = {
    (): "double-pair",
    (1, 1): "adjacent-pair",
    (1, 1, 2): "cross-pair",
    (2, 2): "double-cross",
    (1, 1, 1, 1): "all-distinct",
}


def test_gue_params():
    p = GueParams(0.5)
    assert p.A == pytest.approx(2.0)
    assert p.to_time(p.to_tau(3.0)) == pytest.approx(3.0)
    with pytest.raises(ValidationError):
        GueParams(0.0)
    with pytest.raises(ValidationError):
        GueParams(float("nan"))


@pytest.mark.parametrize("sigma", [1.0, 0.3])
def test_gue_moments(sigma):
    h = sample_gue(GueParams(sigma), np.random.default_rng(5), 10**5)
    assert np.allclose(h, np.conj(np.swapaxes(h, -1, -2)))
    assert np.var(h[:, 0, 0].real) == pytest.approx(sigma**2, rel=0.03)
    assert np.var(h[:, 0, 1].real) == pytest.approx(sigma**2 / 2, rel=0.03)
    assert np.var(h[:, 2, 3].imag) == pytest.approx(sigma**2 / 2, rel=0.03)
    se = sigma / np.sqrt(10**5)
    assert abs(h[:, 1, 1].real.mean()) < 3 * se
    assert abs(h[:, 0, 2].real.mean()) < 3 * se


def test_gue_level_repulsion():
    e = np.linalg.eigvalsh(sample_gue(GueParams(1.0), np.random.default_rng(9), 10**5))
    assert np.diff(e, axis=-1).min() > 1e-6


def test_gue_normalization_against_mc():
    # E_gauss[prod (E_i - E_j)^2] with A = 1/2 (unit-variance Gaussians).
    A = 0.5
    gauss = (np.pi / A) ** 2
    rng = np.random.default_rng(3)
    x = rng.standard_normal((4 * 10**5, 4))
    vdm = np.ones(len(x))
    for i in range(4):
        for j in range(i + 1, 4):
            vdm *= (x[:, i] - x[:, j]) ** 2
    est, err = vdm.mean(), vdm.std(ddof=1) / np.sqrt(len(x))
    assert gue_normalization(A) / gauss == pytest.approx(288.0)
    assert abs(est - 288.0) < 4 * err


def test_evolve_quenched_zero_time(rng):
    rho = pure_density(random_state(rng))
    assert np.array_equal(evolve_quenched(random_hermitian(rng), rho, 0.0), rho)


def test_evolve_quenched_eigenstate():
    h = np.diag([0.3, -1.0, 2.0, 0.7])
    for t in (0.1, 1.0, 13.0):
        assert np.allclose(evolve_quenched(h, KET11, t), KET11, atol=1e-14)


def test_evolve_quenched_two_paths(rng):
    h = random_hermitian(rng)
    u = evolve_unitary(hermitian_eigen(h), 0.7)
    assert np.allclose(evolve_quenched(h, BELL, 0.7), u @ BELL @ u.conj().T, atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(seeds, st.floats(0.01, 20))
def test_evolve_quenched_preserves_spectrum(seed, t):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    out = evolve_quenched(random_hermitian(rng), rho, t)
    assert np.allclose(np.linalg.eigvalsh(out), np.linalg.eigvalsh(rho), atol=1e-10)


def test_scaling_invariance(rng):
    h = random_hermitian(rng)
    a = evolve_quenched(h, BELL, 0.8)
    b = evolve_quenched(2 * h, BELL, 0.4)
    assert np.allclose(a, b, atol=1e-10)


def test_f_tau_values():
    assert f_tau(0.0) == 1.0
    assert f_tau(1.0) == pytest.approx(-45 / (72 * np.e), abs=1e-15)
    assert f_tau(1.0) == pytest.approx(-0.22992, abs=1e-5)
    tau = np.linspace(0, 20, 4001)
    assert np.all(np.abs(f_tau(tau)) <= 1)
    assert abs(f_tau(20.0)) < 1e-100


def test_f_tau_two_point_mc():
    # E_j - E_k with j != k is the exponent of an adjacent-pair tuple (l = m).
    mean, err = gue_phase_average((1, 2, 3, 3), [0.5, 1.0, 2.0], 2 * 10**5, np.random.default_rng(17))
    assert np.all(np.abs(mean - f_tau([0.5, 1.0, 2.0])) < 3 * err)


def test_averaged_rho_examples():
    assert np.allclose(averaged_rho_analytic(KET11, 0.0), KET11)
    assert np.allclose(averaged_rho_analytic(KET11, 40.0), np.diag([0.2, 0.2, 0.2, 0.4]), atol=1e-15)
    rho = averaged_rho_analytic(BELL, 1.0)
    p = (1 + 4 * f_tau(1.0)) / 5
    assert p == pytest.approx(0.01606, abs=1e-5)
    werner = p * BELL + (1 - p) * np.eye(4) / 4
    assert np.allclose(rho, werner, atol=1e-15)


def test_averaged_rho_is_density_for_all_tau():
    for tau in np.linspace(0, 6, 121):
        rho = averaged_rho_analytic(BELL, tau)
        assert abs(np.trace(rho) - 1) < 1e-12
        assert np.linalg.eigvalsh(rho).min() > -1e-12


def test_averaged_rho_needs_pure_input():
    with pytest.raises(ValidationError):
        averaged_rho_analytic(np.eye(4) / 4, 0.3)


def test_linear_entropy_closed_form_examples():
    assert averaged_linear_entropy_analytic(0.0) == pytest.approx(0.0, abs=1e-15)
    assert averaged_linear_entropy_analytic(10.0) == pytest.approx(13 / 70, abs=1e-9)
    assert LINEAR_ENTROPY_SATURATION == 13 / 70
    tau = np.linspace(0, 10, 10**4)
    vals = averaged_linear_entropy_analytic(tau)
    assert np.all(vals <= 0.2)
    assert np.all((vals >= -1e-15) & (vals <= 0.5))


def test_linear_entropy_local_maximum():
    tau = np.linspace(0, 3, 300001)
    vals = averaged_linear_entropy_analytic(tau)
    i = int(np.argmax(vals))
    assert tau[i] == pytest.approx(0.817377, abs=1e-4)
    assert vals[i] == pytest.approx(0.199936, abs=1e-5)


def test_index_classes_total_and_match_exponent_oracle():
    seen = Counter()
    for t in product(range(1, 5), repeat=4):
        cls = index_class(*t)
        assert cls == PATTERN_CLASS[exponent_pattern(*t)], t
        seen[cls] += 1
    assert sum(seen.values()) == 256
    assert set(seen) == set(INDEX_CLASSES)
    reps = class_representatives()
    assert sum(len(v) for v in reps.values()) == 256


@pytest.mark.parametrize("t", [(1, 1, 2, 2), (3, 2, 2, 3), (4, 4, 4, 4)])
def test_double_pair_is_identically_one(t):
    assert np.all(r_jklm(*t, np.linspace(0, 5, 11)) == 1)


def test_index_out_of_range():
    with pytest.raises(ValidationError):
        index_class(0, 1, 2, 3)


def test_all_tuples_one_at_zero():
    total = sum(float(r_jklm(*t, 0.0)) for t in product(range(1, 5), repeat=4))
    assert total == 256.0
    assert all(float(r_table(*t, 0.0)) == 1.0 for t in product(range(1, 5), repeat=4))


def test_printed_double_cross_value():
    assert float(r_table(1, 2, 1, 2, 1.0)) == pytest.approx(-0.16538, abs=5e-5)
    assert float(r_table(1, 2, 1, 2, 1.0)) == pytest.approx(-11 / (9 * np.e**2), abs=1e-15)


def test_r_reassembles_two_point_function():
    tau = np.linspace(0, 4, 41)
    assert np.allclose(r_jklm(1, 2, 3, 3, tau), f_tau(tau), atol=1e-14)


@pytest.mark.parametrize("cls", ["all-distinct", "adjacent-pair", "cross-pair", "double-cross"])
def test_r_classes_against_spectrum_mc(cls):
    t = class_representatives()[cls][0]
    taus = np.array([0.5, 1.0, 2.0])
    mean, err = gue_phase_average(t, taus, 2 * 10**5, np.random.default_rng(100 + INDEX_CLASSES.index(cls)), sigma=0.7)
    assert np.all(np.abs(mean - r_jklm(*t, taus)) < 3.5 * err + 1e-12)


def test_eof_vanishing_time_bell():
    tau0 = eof_vanishing_time(BELL)
    assert tau0 == pytest.approx(0.4997, abs=5e-4)
    assert f_tau(tau0) == pytest.approx(1 / 6, abs=1e-4)
    assert concurrence(averaged_rho_analytic(BELL, tau0 + 1e-3)) == 0.0


def test_eof_vanishing_time_weak_start_is_earlier():
    assert eof_vanishing_time(pure_density(psi_c(0.204))) < eof_vanishing_time(BELL)


def test_eof_vanishing_time_errors():
    with pytest.raises(ValidationError):
        eof_vanishing_time(KET11)
    with pytest.raises(RootNotFoundError):
        eof_vanishing_time(BELL, tau_max=0.3)


def test_psi_c():
    assert np.allclose(psi_c(0.0), [0, 0, 0, 1])
    assert np.linalg.norm(psi_c(0.4)) == pytest.approx(1.0)
    with pytest.raises(ValidationError):
        psi_c(1.5)


def test_config_validation():
    with pytest.raises(ValidationError):
        QuenchedEnsembleConfig(0, [0, 1], 1)
    with pytest.raises(ValidationError):
        QuenchedEnsembleConfig(10, [1, 0], 1)
    with pytest.raises(ValidationError):
        QuenchedEnsembleConfig(10, [0, 1], 1, initial_c=0.9)
    with pytest.raises(ValidationError):
        QuenchedEnsembleConfig(10, [0, 1], 1, averaging_mode="median")


def test_ensemble_reproducible_across_threads():
    grid = np.linspace(0, 3, 13)
    a = run_quenched_ensemble(QuenchedEnsembleConfig(3000, grid, 77, threads=1))
    b = run_quenched_ensemble(QuenchedEnsembleConfig(3000, grid, 77, threads=4))
    assert np.array_equal(a.mean, b.mean) and np.array_equal(a.stderr, b.stderr)
    c = run_quenched_ensemble(QuenchedEnsembleConfig(3000, grid, 78, threads=1))
    assert not np.array_equal(a.mean, c.mean)


def test_ensemble_linear_entropy_matches_closed_form():
    grid = np.linspace(0, 5, 26)
    s = run_quenched_ensemble(QuenchedEnsembleConfig(20000, grid, 3))
    assert s.mean[0] == 0 and s.stderr[0] == 0
    z = np.abs(s.mean[1:] - averaged_linear_entropy_analytic(grid[1:])) / s.stderr[1:]
    assert z.max() < 4


@pytest.mark.parametrize("c", [0.0, 1 / np.sqrt(2)])
def test_ensemble_averaged_rho_factorises(c):
    grid = np.array([0.0, 0.4, 1.0, 2.5])
    s = run_quenched_ensemble(QuenchedEnsembleConfig(20000, grid, 11, initial_c=c))
    exact = averaged_rho_analytic(pure_density(psi_c(c)), grid)
    # Bound each entry by the worst-case single-trajectory spread |entry| <= 1.
    assert np.max(np.abs(s.rho_mean - exact)) < 3 / np.sqrt(20000) * 1.2


def test_entanglement_of_average_eof_dies():
    grid = np.array([0.0, 0.2, 0.45, 0.6, 1.0, 2.0])
    s = run_quenched_ensemble(
        QuenchedEnsembleConfig(20000, grid, 4, initial_c=1 / np.sqrt(2), averaging_mode="entanglement-of-average", measure="eof")
    )
    assert s.mean[0] == pytest.approx(np.log(2), abs=1e-12)
    assert s.mean[1] > 0.05
    assert np.all(s.mean[3:] == 0)
    assert np.all(s.stderr >= 0)


def test_curves_ordered_by_c():
    grid = np.array([0.3, 0.6, 1.5])
    means = [
        run_quenched_ensemble(QuenchedEnsembleConfig(20000, grid, 5, initial_c=c)).mean
        for c in (0.0, 0.204, 0.464, 1 / np.sqrt(2))
    ]
    for lower, upper in zip(means, means[1:]):
        assert np.all(lower[:2] < upper[:2])
