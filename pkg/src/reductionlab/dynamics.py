"""Integrators for the energy-driven stochastic evolution equations.

Implements Euler–Maruyama single steps and full trajectories for

* the state-vector Itô equation  dχ = [α dt + β dW] χ  with
  α = −iH − (σ²/8)(H−⟨H⟩)²  and  β = (σ/2)(H−⟨H⟩),
* the density-matrix equation
  dρ = −i[H,ρ]dt − (σ²/8)[H,[H,ρ]]dt + (σ/2) N(ρ,H) dW
  with the noise coefficient in either of its two forms,
* the pure-noise specialization for states commuting with H
  (dρ = (σ/2)({ρ,H} − 2ρ Tr ρH) dW, a matrix martingale),
* the deterministic flow of the stochastic expectation
  dE[ρ]/dt = −i[H,E[ρ]] − (σ²/8)[H,[H,E[ρ]]].

All steppers take and return plain complex ndarrays; the wrappers from
`linalg` are accepted anywhere an operator or state is expected.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .linalg import as_matrix, as_vector, hermitize, purity_residual
from .noise import wiener_path

__all__ = [
    "ANTICOMMUTATOR",
    "DOUBLE_COMMUTATOR",
    "EULER_MARUYAMA",
    "EULER_RENORMALIZED",
    "SdeConfig",
    "StabilityError",
    "PositivityError",
    "NonCommutingError",
    "default_dt",
    "spectral_range",
    "expectation",
    "energy_variance",
    "noise_coefficient",
    "step_state_vector",
    "step_density",
    "step_commuting_martingale",
    "evolve_expectation",
    "evolve_trajectory",
    "Trajectory",
]

ANTICOMMUTATOR = "anticommutator"
DOUBLE_COMMUTATOR = "double_commutator"
EULER_MARUYAMA = "euler_maruyama"
EULER_RENORMALIZED = "euler_renormalized"

# Discretization is trusted only while sigma²·(spectral range)²·dt stays
# small; past 0.1 the Euler drift can overshoot and positivity breaks down.
STABILITY_HARD = 0.1
STABILITY_WARN = 0.01
STABILITY_TARGET = 1e-3


class StabilityError(RuntimeError):
    """sigma²·ΔE_max²·dt exceeded the hard stability bound."""


class PositivityError(RuntimeError):
    """A density matrix left the PSD cone by more than the step tolerance."""


class NonCommutingError(ValueError):
    """The commuting-martingale step was applied to a non-commuting state."""


def spectral_range(h) -> float:
    """Difference between the largest and smallest eigenvalue of H."""
    w = np.linalg.eigvalsh(as_matrix(h))
    return float(w[-1] - w[0])


def default_dt(sigma: float, h_or_range) -> float:
    """Step size making sigma²·ΔE_max²·dt equal the 1e-3 design target."""
    rng = h_or_range if np.isscalar(h_or_range) else spectral_range(h_or_range)
    if sigma == 0.0 or rng == 0.0:
        return 1e-3
    return STABILITY_TARGET / (sigma * sigma * rng * rng)


def check_stability(sigma: float, dt: float, h_range: float) -> None:
    product = sigma * sigma * h_range * h_range * dt
    if product > STABILITY_HARD:
        raise StabilityError(
            f"sigma²·ΔE²·dt = {product:.3g} exceeds hard bound {STABILITY_HARD}"
        )
    if product > STABILITY_WARN:
        warnings.warn(
            f"sigma²·ΔE²·dt = {product:.3g} above comfort bound {STABILITY_WARN}",
            RuntimeWarning,
            stacklevel=3,
        )


@dataclass
class SdeConfig:
    """Parameters of one stochastic integration run."""

    sigma: float
    dt: float
    n_steps: int
    scheme: str = EULER_RENORMALIZED
    noise_form: str = ANTICOMMUTATOR
    record_stride: int = 1

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        if self.scheme not in (EULER_MARUYAMA, EULER_RENORMALIZED):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.noise_form not in (ANTICOMMUTATOR, DOUBLE_COMMUTATOR):
            raise ValueError(f"unknown noise form {self.noise_form!r}")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")

    def validate_for(self, h) -> None:
        check_stability(self.sigma, self.dt, spectral_range(h))


def expectation(state, h) -> float:
    """⟨H⟩ for a state vector or density matrix."""
    m = as_matrix(h)
    s = np.asarray(state.amplitudes if hasattr(state, "amplitudes") else
                   state.matrix if hasattr(state, "matrix") else state, dtype=complex)
    if s.ndim == 1:
        return float(np.vdot(s, m @ s).real)
    return float(np.trace(s @ m).real)


def energy_variance(state, h) -> float:
    """V = Tr ρH² − (Tr ρH)², clamped at the −1e-12 float floor."""
    m = as_matrix(h)
    s = np.asarray(state.amplitudes if hasattr(state, "amplitudes") else
                   state.matrix if hasattr(state, "matrix") else state, dtype=complex)
    if s.ndim == 1:
        hs = m @ s
        e1 = np.vdot(s, hs).real
        e2 = np.vdot(hs, hs).real
    else:
        e1 = np.trace(s @ m).real
        e2 = np.trace(s @ m @ m).real
    v = float(e2 - e1 * e1)
    if v < -1e-12:
        raise ValueError(f"negative variance {v:.3e} beyond tolerance")
    return max(v, 0.0)


def noise_coefficient(rho, h, form: str = ANTICOMMUTATOR) -> np.ndarray:
    """Coefficient of the Itô noise term; traceless and Hermitian.

    anticommutator:    {ρ,H} − 2ρ Tr ρH
    double_commutator: [ρ,[ρ,H]]

    The two agree exactly on pure states (ρ² = ρ) but define different
    evolutions for mixed ones.
    """
    r = as_matrix(rho)
    m = as_matrix(h)
    if form == ANTICOMMUTATOR:
        rh = r @ m
        return rh + rh.conj().T - 2.0 * r * np.trace(rh).real
    if form == DOUBLE_COMMUTATOR:
        inner = r @ m - m @ r
        return r @ inner - inner @ r
    raise ValueError(f"unknown noise form {form!r}")


def step_state_vector(chi, h, sigma: float, dt: float, dW: float,
                      scheme: str = EULER_RENORMALIZED,
                      h_range: float | None = None) -> np.ndarray:
    """One Euler–Maruyama step of the state-vector equation.

    ⟨H⟩ is evaluated on the incoming (normalized) state.  With
    scheme=euler_renormalized the result is divided by its norm.
    """
    v = as_vector(chi)
    m = as_matrix(h)
    check_stability(sigma, dt, spectral_range(m) if h_range is None else h_range)
    hv = m @ v
    e = np.vdot(v, hv).real
    kv = hv - e * v                       # (H − ⟨H⟩) χ
    k2v = m @ kv - e * kv                 # (H − ⟨H⟩)² χ
    out = v + dt * (-1j * hv - 0.125 * sigma * sigma * k2v) + (0.5 * sigma * dW) * kv
    if scheme == EULER_RENORMALIZED:
        out = out / np.linalg.norm(out)
    return out


def step_density(rho, h, sigma: float, dt: float, dW: float,
                 noise_form: str = ANTICOMMUTATOR,
                 psd_tol: float | None = None) -> np.ndarray:
    """One Euler–Maruyama step of the density-matrix equation.

    The result is re-Hermitized and trace-renormalized (the exact equations
    preserve both; Euler violates them at O(dt²) per step).  The smallest
    eigenvalue must stay above −psd_tol (default 100·dt); a violation means
    dt is too large for this Hamiltonian and sigma.
    """
    r = as_matrix(rho)
    m = as_matrix(h)
    comm = m @ r - r @ m
    dcomm = m @ comm - comm @ m
    n = noise_coefficient(r, m, noise_form)
    out = r + dt * (-1j * comm - 0.125 * sigma * sigma * dcomm) + (0.5 * sigma * dW) * n
    out = hermitize(out)
    out = out / np.trace(out).real
    tol = 100.0 * dt if psd_tol is None else psd_tol
    low = np.linalg.eigvalsh(out)[0]
    if low < -tol:
        raise PositivityError(
            f"eigenvalue {low:.3e} below -{tol:.1e}; decrease dt"
        )
    return out


def step_commuting_martingale(rho, h, sigma: float, dt: float, dW: float,
                              comm_tol: float = 1e-10) -> np.ndarray:
    """One step of the pure-noise evolution valid when [ρ, H] = 0.

    For commuting (e.g. equilibrium) initial data the drift terms of the
    full equation vanish identically and only the anticommutator noise
    remains; the step keeps ρ diagonal in the H eigenbasis and preserves
    the trace.
    """
    r = as_matrix(rho)
    m = as_matrix(h)
    scale = max(np.abs(r).max() * np.abs(m).max(), 1e-300)
    defect = np.abs(r @ m - m @ r).max() / scale
    if defect > comm_tol:
        raise NonCommutingError(
            f"[rho,H] relative defect {defect:.2e}; this specialization needs commuting input"
        )
    out = r + (0.5 * sigma * dW) * noise_coefficient(r, m, ANTICOMMUTATOR)
    out = hermitize(out)
    return out / np.trace(out).real


def evolve_expectation(rho0, h, sigma: float, t: float,
                       n_steps: int | None = None) -> np.ndarray:
    """Deterministic flow of E[ρ] integrated with fixed-step RK4.

    Any function of H is a fixed point; off-diagonal elements in the H
    eigenbasis rotate at (Eᵢ−Eⱼ) and decay at (σ²/8)(Eᵢ−Eⱼ)².
    """
    r = as_matrix(rho0).copy()
    m = as_matrix(h)
    if t == 0.0:
        return r
    if n_steps is None:
        rng = spectral_range(m)
        rate = rng + 0.125 * sigma * sigma * rng * rng
        n_steps = max(200, int(np.ceil(20.0 * rate * abs(t))))

    def rhs(x):
        comm = m @ x - x @ m
        dcomm = m @ comm - comm @ m
        return -1j * comm - 0.125 * sigma * sigma * dcomm

    dt = t / n_steps
    for _ in range(n_steps):
        k1 = rhs(r)
        k2 = rhs(r + 0.5 * dt * k1)
        k3 = rhs(r + 0.5 * dt * k2)
        k4 = rhs(r + dt * k3)
        r = r + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return hermitize(r)


@dataclass
class Trajectory:
    """Recorded sample path with observables at the record stride."""

    times: np.ndarray
    states: list
    energy_mean: np.ndarray
    variance: np.ndarray
    purity_residual: np.ndarray
    kind: str = "state_vector"          # or "density"
    dt: float = 0.0

    def validate(self, c: float = 100.0) -> None:
        """Check stored states against their type invariants at tolerance C·dt."""
        tol = max(c * self.dt, 1e-10)
        for k, s in enumerate(self.states):
            if self.kind == "state_vector":
                drift = abs(float(np.vdot(s, s).real) - 1.0)
                if drift > tol:
                    raise ValueError(f"state {k}: norm² drift {drift:.2e} > {tol:.2e}")
            else:
                tr_drift = abs(np.trace(s).real - 1.0)
                herm = np.abs(s - s.conj().T).max()
                low = np.linalg.eigvalsh(hermitize(s))[0]
                if tr_drift > tol or herm > tol or low < -tol:
                    raise ValueError(
                        f"state {k}: trace drift {tr_drift:.2e}, hermiticity {herm:.2e}, "
                        f"eigmin {low:.2e} outside ±{tol:.2e}"
                    )

    def to_csv(self, path) -> None:
        lines = ["t,reH_exp,V,purity_residual"]
        for t, e, v, p in zip(self.times, self.energy_mean, self.variance,
                              self.purity_residual):
            lines.append(f"{t:.17g},{e:.17g},{v:.17g},{p:.17g}")
        Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def evolve_trajectory(init, h, config: SdeConfig, seed: int) -> Trajectory:
    """Integrate a full sample path, recording ⟨H⟩, V and the purity residual.

    `init` may be a state vector or a density matrix (wrapper or ndarray);
    density evolution follows the anticommutator-form equation unless the
    config selects the double-commutator form (pure states only — the two
    differ on mixed ones).
    """
    m = as_matrix(h)
    config.validate_for(m)
    path = wiener_path(seed, config.dt, config.n_steps)
    raw = np.asarray(init.amplitudes if hasattr(init, "amplitudes") else
                     init.matrix if hasattr(init, "matrix") else init, dtype=complex)
    is_vec = raw.ndim == 1

    times, states, means, variances, purities = [], [], [], [], []

    def record(k, s):
        times.append(k * config.dt)
        states.append(s.copy())
        means.append(expectation(s, m))
        variances.append(energy_variance(s, m))
        if is_vec:
            purities.append(abs(float(np.vdot(s, s).real) - 1.0))
        else:
            purities.append(purity_residual(s))

    s = raw.copy()
    record(0, s)
    h_rng = spectral_range(m)
    for k in range(config.n_steps):
        dW = path.increments[k]
        try:
            if is_vec:
                s = step_state_vector(s, m, config.sigma, config.dt, dW,
                                      scheme=config.scheme, h_range=h_rng)
            else:
                s = step_density(s, m, config.sigma, config.dt, dW,
                                 noise_form=config.noise_form)
        except (PositivityError, StabilityError) as exc:
            raise type(exc)(f"step {k + 1}: {exc}") from exc
        if (k + 1) % config.record_stride == 0 or k + 1 == config.n_steps:
            record(k + 1, s)

    traj = Trajectory(
        times=np.asarray(times),
        states=states,
        energy_mean=np.asarray(means),
        variance=np.asarray(variances),
        purity_residual=np.asarray(purities),
        kind="state_vector" if is_vec else "density",
        dt=config.dt,
    )
    traj.validate()
    return traj
