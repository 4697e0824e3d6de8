import math

import numpy as np
import pytest

from reductionlab import reduction
from reductionlab.linalg import random_density_matrix, random_hermitian
from reductionlab.reduction import (
    EnsembleStats,
    born_statistics,
    gibbs_state,
    luders_scenario,
    reduction_time_scaling,
    statdist_martingale_run,
    variance,
    variance_decay_check,
)


def test_variance_eigenstate_zero():
    h = np.diag([0.0, 1.0, 2.0]).astype(complex)
    assert variance(np.array([0, 1, 0], complex), h) == 0.0


def test_variance_equal_superposition():
    h = np.diag([0.0, 1.0]).astype(complex)
    chi = np.sqrt(np.array([0.5, 0.5], complex))
    assert abs(variance(chi, h) - 0.25) < 1e-14


def test_variance_direct_trace_oracle(rng):
    h = random_hermitian(4, rng)
    rho = random_density_matrix(4, rng)
    v = variance(rho, h)
    oracle = np.trace(rho @ h @ h).real - np.trace(rho @ h).real ** 2
    assert abs(v - oracle) < 1e-12


def test_gibbs_spec_realizes_state(rng):
    h = random_hermitian(3, rng)
    spec = reduction.GibbsSpec(h=h, beta=0.6)
    assert np.allclose(spec.state().matrix, gibbs_state(h, 0.6).matrix)


def test_gibbs_state_properties(rng):
    h = random_hermitian(4, rng)
    g = gibbs_state(h, 0.8).matrix
    assert abs(np.trace(g).real - 1.0) < 1e-12
    assert np.linalg.norm(g @ h - h @ g) < 1e-12
    # infinite temperature: maximally mixed
    g0 = gibbs_state(h, 0.0).matrix
    assert np.allclose(g0, np.eye(4) / 4, atol=1e-12)


def test_born_eigenstate_initial_state():
    h = np.diag([0.0, 1.0]).astype(complex)
    st = born_statistics(h, np.array([0, 1], complex), sigma=1.0,
                         n_traj=32, base_seed=0, dt=1e-3)
    assert st.frequencies[1] == 1.0
    assert st.n_unreduced == 0


def test_born_two_level_within_four_sigma():
    h = np.diag([0.0, 1.0]).astype(complex)
    chi = np.sqrt(np.array([0.3, 0.7], complex))
    st = born_statistics(h, chi, sigma=1.0, n_traj=600, base_seed=3, dt=1e-3)
    for f, p in zip(st.frequencies, st.expected):
        assert abs(f - p) <= 4.0 * math.sqrt(p * (1 - p) / st.n_traj)
    assert abs(st.frequencies.sum() - 1.0) < 1e-12
    # confidence intervals bracket the frequencies
    assert np.all(st.ci_lo <= st.frequencies) and np.all(st.frequencies <= st.ci_hi)


def test_born_nontrivial_basis(rng):
    # H not diagonal: weights are squared projections on its eigenvectors
    h = random_hermitian(2, rng) * 0.5 + np.diag([0.0, 2.0])
    from reductionlab.linalg import eig_hermitian

    spec = eig_hermitian(h)
    chi = spec.eigenvectors[:, 0] * math.sqrt(0.4) + spec.eigenvectors[:, 1] * math.sqrt(0.6)
    st = born_statistics(h, chi, sigma=1.0, n_traj=400, base_seed=11)
    assert abs(st.expected[0] - 0.4) < 1e-10
    assert abs(st.frequencies[0] - 0.4) <= 4.0 * math.sqrt(0.4 * 0.6 / 400)


def test_decay_check_requires_trajectories():
    stats = EnsembleStats(n_traj=50, outcome_labels=[], frequencies=np.array([]),
                          ci_lo=np.array([]), ci_hi=np.array([]))
    with pytest.raises(ValueError):
        variance_decay_check(stats, sigma=1.0)


def test_decay_sigma_zero_trivial():
    from reductionlab.ensemble import run_state_ensemble

    run = run_state_ensemble(np.array([0.0, 1.0]), np.sqrt([0.5, 0.5]).astype(complex),
                             sigma=0.0, dt=1e-3, base_seed=0, n_traj=200,
                             horizon_steps=400, record_stride=100,
                             stop_on_reduction=False)
    stats = EnsembleStats(n_traj=200, outcome_labels=[], frequencies=np.array([]),
                          ci_lo=np.array([]), ci_hi=np.array([]),
                          times=run.times, e_v=run.mean_v,
                          e_v_sem=run.sem_v, e_v2=run.mean_v2)
    # deterministic Euler drift of the populations is O(dt²) per step
    assert np.abs(np.diff(run.mean_v)).max() < 1e-4
    fit = variance_decay_check(stats, sigma=0.0)
    assert fit.slope == 0.0


def test_statdist_uniform_three_level():
    h = np.diag([0.0, 1.0, 2.0]).astype(complex)
    rep = statdist_martingale_run(h, beta=0.0, sigma=1.0, n_traj=600,
                                  base_seed=5, dt=1e-3)
    assert rep.mean_dev_ratio <= 1.0
    for f in rep.stats.frequencies:
        assert abs(f - 1 / 3) <= 4.0 * math.sqrt((1 / 3) * (2 / 3) / 600)


def test_luders_beta_zero_always_transmits():
    bamp = np.sqrt(np.array([0.5, 0.5], complex))
    rep = luders_scenario(1.0, bamp, [0.5, 0.5], [1.0, 2.0], sigma=1.0,
                          n_traj=40, base_seed=1, dt=1e-3)
    assert rep.stats.frequencies[0] == 1.0
    assert rep.transmission_fidelity_min > 1.0 - 1e-12


def test_luders_validation():
    bamp = np.sqrt(np.array([0.5, 0.5], complex))
    with pytest.raises(ValueError):
        luders_scenario(0.7, bamp, [0.6, 0.6], [1.0, 2.0], 1.0, 10, 0)
    with pytest.raises(ValueError):
        # degenerate measured branches are not separated
        luders_scenario(0.7, bamp, [0.5, 0.5], [1.0, 1.0], 1.0, 10, 0)


def test_scaling_sigma_zero_reports_unreduced():
    from reductionlab.ensemble import run_state_ensemble

    run = run_state_ensemble(np.array([0.0, 1.0]), np.sqrt([0.5, 0.5]).astype(complex),
                             sigma=0.0, dt=1e-3, base_seed=0, n_traj=16,
                             max_steps=2000)
    assert run.n_unreduced == 16
    assert np.all(np.isnan(run.reduction_times))


def test_scaling_two_point_smoke():
    rep = reduction_time_scaling([1.0, 2.0], [1.0, 2.0], n_traj=160,
                                 base_seed=4, max_steps=400_000)
    # quadrupling expected when doubling either knob
    assert 2.5 < rep.de_medians[0] / rep.de_medians[1] < 6.5
    assert 2.5 < rep.sigma_medians[0] / rep.sigma_medians[1] < 6.5


def test_budget_error_raised():
    h = np.diag([0.0, 1.0]).astype(complex)
    chi = np.sqrt(np.array([0.5, 0.5], complex))
    with pytest.raises(reduction.ReductionBudgetError):
        born_statistics(h, chi, sigma=1.0, n_traj=64, base_seed=0,
                        dt=1e-3, max_steps=200)


def test_stats_csv(tmp_path):
    h = np.diag([0.0, 1.0]).astype(complex)
    st = born_statistics(h, np.sqrt(np.array([0.4, 0.6], complex)),
                         sigma=1.0, n_traj=128, base_seed=9, dt=1e-3)
    st.outcome_csv(tmp_path / "o.csv")
    lines = (tmp_path / "o.csv").read_text().splitlines()
    assert lines[0] == "outcome,frequency,ci_lo,ci_hi"
    assert len(lines) == 3
