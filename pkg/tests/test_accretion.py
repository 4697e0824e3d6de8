import math

import numpy as np
import pytest
from scipy import stats as sstats
from scipy.special import jv

from reductionlab.accretion import (
    AccretionModel,
    DisplacedOscillator,
    FockTruncation,
    TruncationError,
    accretion_hamiltonians,
    default_truncation,
    displacement_matrix,
    energy_fluctuation_accretion,
    envelope_band,
    fock_ladder,
    occupancy_simulate,
    pnk_bessel,
    pnk_envelope,
    pnk_exact,
    pnk_laguerre,
    poisson_pmf,
    stationary_binomial_pmf,
)


def test_fock_commutator_below_truncation():
    tr = FockTruncation(n_max=8)
    assert tr.commutator_defect() < 1e-14
    a, adag = fock_ladder(4)
    assert np.allclose(adag, a.T)
    assert np.allclose(np.diag(adag @ a), [0, 1, 2, 3, 4])


def test_number_conservation_away_from_boundary():
    n_max = 3
    h_site, delta_h, n_total = accretion_hamiltonians(
        n_sites=1, n_env=2, n_max=n_max, site_mass=1.0,
        couplings=np.array([[0.5, 0.3 + 0.2j]]))
    comm = n_total @ delta_h - delta_h @ n_total
    # interior states: every mode occupation strictly below n_max
    dims = (n_max + 1,) * 3
    interior = [i for i in range(comm.shape[0])
                if all(o < n_max for o in np.unravel_index(i, dims))]
    assert np.abs(comm[:, interior]).max() < 1e-10
    assert np.abs(h_site - h_site.conj().T).max() < 1e-12


def test_model_validation():
    with pytest.raises(ValueError):
        AccretionModel(0, 1.0, 0.1, 0.9)
    with pytest.raises(ValueError):
        AccretionModel(5, 1.0, -0.1, 0.9)
    m = AccretionModel(10, 2.0, 0.25, 0.75)
    assert abs(m.fill_probability - 0.25) < 1e-15
    assert abs(m.mean_occupancy - 2.5) < 1e-15


def test_single_site_stationary_probability():
    # two-state Markov chain closed form: P(occupied) = s/(s+e)
    m = AccretionModel(1, 1.0, 0.3, 0.7)
    res = occupancy_simulate(m, horizon=30_000.0, seed=12)
    p_occ = res.samples.mean()
    n = res.samples.size
    assert abs(p_occ - 0.3) <= 4.0 * math.sqrt(0.3 * 0.7 / n) * 1.5


def test_fast_evaporation_empties_surface():
    m = AccretionModel(5, 1.0, 1.0, 1e6)
    res = occupancy_simulate(m, horizon=50.0, seed=3, sample_dt=0.01)
    assert res.mean <= 1e-3


def test_occupancy_rms_matches_sqrt_mean_dilute():
    m = AccretionModel(400, 1.0, 0.01, 0.99)   # X = 4, dilute
    res = occupancy_simulate(m, horizon=30_000.0, seed=8)
    assert abs(res.std - math.sqrt(m.mean_occupancy)) / math.sqrt(m.mean_occupancy) < 0.1


def test_stationary_histogram_binomial_chisquare():
    m = AccretionModel(50, 1.0, 0.08, 0.92)
    res = occupancy_simulate(m, horizon=40_000.0, seed=21)
    n = np.arange(len(res.histogram))
    expected = stationary_binomial_pmf(m, n) * res.samples.size
    keep = expected > 5
    chi2 = float(((res.histogram[keep] - expected[keep]) ** 2 / expected[keep]).sum())
    pval = float(sstats.chi2.sf(chi2, keep.sum() - 1))
    assert pval > 1e-3


def test_energy_fluctuation():
    assert energy_fluctuation_accretion(AccretionModel(10, 1.0, 0.0, 1.0)) == 0.0
    m = AccretionModel(100, 1.0, 1.0, 3.0)   # X = 25
    assert abs(energy_fluctuation_accretion(m) - 5.0) < 1e-12


def test_displaced_oscillator_from_model():
    m = AccretionModel(1, 2.0, 0.1, 0.9, coherent_amplitude=0.3 + 0.4j)
    osc = DisplacedOscillator.from_model(m)
    assert osc.z == -(0.3 + 0.4j) / 2.0


def test_displacement_ground_state_is_coherent():
    z = 0.4
    n_max = 30
    d = displacement_matrix(z, n_max)
    ground = d[:, 0]
    a, _ = fock_ladder(n_max)
    # a|0_c⟩ = z|0_c⟩ within truncation error
    assert np.linalg.norm(a @ ground - z * ground) < 1e-10


def test_pnk_zero_displacement():
    assert pnk_exact(5, 0, 0.0) == 1.0
    assert pnk_exact(5, 2, 0.0) == 0.0
    assert pnk_laguerre(5, 0, 0.0) == 1.0
    assert pnk_bessel(7, 0, 0.0) == 1.0
    assert pnk_bessel(7, 3, 0.0) == 0.0


def test_pnk_coherent_ground_state_poisson():
    # coherent-state expansion oracle: P(0|−k) = e^{−|z|²}|z|^{2k}/k!
    z = 0.6
    for k in range(6):
        expected = math.exp(-abs(z) ** 2) * abs(z) ** (2 * k) / math.factorial(k)
        assert abs(pnk_exact(0, -k, z) - expected) < 1e-12
        assert abs(pnk_laguerre(0, -k, z) - expected) < 1e-12


def test_pnk_exact_vs_laguerre(rng):
    z = 0.05
    n = 50
    for k in range(-8, 9):
        assert abs(pnk_exact(n, k, z) - pnk_laguerre(n, k, z)) < 1e-12


def test_pnk_sums_to_one():
    n, z = 50, 0.05
    n_max = default_truncation(n, z)
    total = sum(pnk_exact(n, n - m, z, n_max=n_max) for m in range(n_max + 1))
    assert abs(total - 1.0) <= 1e-10


def test_truncation_error_raised():
    with pytest.raises(TruncationError):
        pnk_exact(40, 0, 2.0, n_max=42)
    with pytest.raises(TruncationError):
        pnk_exact(40, 0, 0.05, n_max=10)


def test_bessel_addition_formula():
    for w in (0.5, 2.0, 7.3):
        total = jv(0, w) ** 2 + 2.0 * sum(jv(nn, w) ** 2 for nn in range(1, int(w) + 60))
        assert abs(total - 1.0) <= 1e-10


def test_bessel_converges_to_exact():
    # fixed argument w = 2√n|z|: the l1 distance over k shrinks as n grows
    w = 2.0
    dists = []
    for n in (50, 200):
        z = w / (2.0 * math.sqrt(n))
        n_max = default_truncation(n, z) + 25
        d = sum(abs(pnk_exact(n, k, z, n_max=n_max) - pnk_bessel(n, k, z))
                for k in range(-20, 21))
        dists.append(d)
    assert dists[1] < 0.5 * dists[0]


def test_envelope_values_and_regions():
    n, z = 2500, 0.2
    kb = envelope_band(n, z)
    assert abs(kb - 20.0) < 1e-12
    at0 = pnk_envelope(n, 0, z)
    assert at0.region == "band"
    assert abs(at0.value - 1.0 / (2 * math.pi * math.sqrt(n) * abs(z))) < 1e-14
    assert pnk_envelope(n, 30, z).region == "tail"
    assert pnk_envelope(n, 30, z).value == 0.0
    edge = pnk_envelope(n, 20, z)
    assert edge.region == "edge" and math.isinf(edge.value)


def test_envelope_tracks_windowed_average():
    n, z = 2500, 0.2
    for center in (0, 4, 8, 12):
        ks = range(center - 2, center + 3)
        avg = np.mean([pnk_bessel(n, k, z) for k in ks])
        env = pnk_envelope(n, center, z).value
        assert abs(avg - env) / env < 0.25


def test_occupancy_seed_invariance_distribution():
    # same chain, two seeds: histograms agree distributionally
    m = AccretionModel(30, 1.0, 0.1, 0.9)
    r1 = occupancy_simulate(m, horizon=20_000.0, seed=1)
    r2 = occupancy_simulate(m, horizon=20_000.0, seed=2)
    n = np.arange(max(len(r1.histogram), len(r2.histogram)))
    expected = stationary_binomial_pmf(m, n)
    for r in (r1, r2):
        e = expected[: len(r.histogram)] * r.samples.size
        keep = e > 5
        chi2 = float(((r.histogram[keep] - e[keep]) ** 2 / e[keep]).sum())
        assert sstats.chi2.sf(chi2, keep.sum() - 1) > 1e-3


def test_poisson_limit_of_binomial():
    m = AccretionModel(1000, 1.0, 0.005, 0.995)
    n = np.arange(16)
    pb = stationary_binomial_pmf(m, n)
    pp = poisson_pmf(m.mean_occupancy, n)
    assert np.abs(pb - pp).max() < 2e-3


def test_occupancy_short_horizon_warns():
    m = AccretionModel(10, 1.0, 0.1, 0.9)
    with pytest.warns(RuntimeWarning):
        occupancy_simulate(m, horizon=20.0, seed=0)
