"""Reproducible vectorized ensemble runner for reduction statistics.

Trajectories are integrated in fixed-size batches with all per-trajectory
noise drawn from streams that depend only on (base_seed, trajectory index),
so results are bit-identical for any batch schedule or worker count.
Evolution happens in the eigenbasis of H, where the state-vector update and
the density-matrix update are elementwise; this is an exact unitary change
of variables of the same discrete process, not an approximation.

A run has two phases: an optional fixed-horizon recording phase in which
every trajectory keeps evolving (so recorded ensemble means are unbiased),
followed, when stop_on_reduction is set, by a first-passage phase in which
trajectories are retired once the reduction criterion holds.  The
criterion is V ≤ eps·V(0) together with a dominant outcome-group
population ≥ popmin, so that every retired endpoint classifies
unambiguously.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .noise import trajectory_generator

__all__ = ["EnsembleRun", "run_state_ensemble", "run_density_ensemble"]

BATCH_SIZE = 1024
CHUNK = 256
CHECK_STRIDE = 8

REDUCTION_EPS = 0.01
POPULATION_MIN = 0.99


@dataclass
class EnsembleRun:
    """Aggregated result of an ensemble integration."""

    n_traj: int
    dt: float
    energies: np.ndarray
    groups: tuple
    times: np.ndarray | None = None
    mean_v: np.ndarray | None = None
    sem_v: np.ndarray | None = None
    mean_v2: np.ndarray | None = None
    mean_e: np.ndarray | None = None
    sem_e: np.ndarray | None = None
    mean_rho: np.ndarray | None = None
    sem_rho_frob: np.ndarray | None = None
    outcomes: np.ndarray | None = None
    reduction_times: np.ndarray | None = None
    final_states: np.ndarray | None = None

    @property
    def n_unreduced(self) -> int:
        return int(np.sum(self.outcomes < 0))

    def outcome_frequencies(self) -> np.ndarray:
        ok = self.outcomes >= 0
        if not ok.any():
            return np.zeros(len(self.groups))
        return np.bincount(self.outcomes[ok], minlength=len(self.groups)) / ok.sum()


def _group_masks(groups, dim) -> np.ndarray:
    g = np.zeros((len(groups), dim))
    for gi, idx in enumerate(groups):
        g[gi, list(idx)] = 1.0
    return g


def run_state_ensemble(
    energies,
    c0,
    sigma: float,
    dt: float,
    base_seed: int,
    n_traj: int,
    *,
    groups=None,
    eps: float = REDUCTION_EPS,
    popmin: float = POPULATION_MIN,
    horizon_steps: int = 0,
    record_stride: int = 0,
    stop_on_reduction: bool = True,
    max_steps: int = 10_000_000,
    workers: int | None = None,
) -> EnsembleRun:
    """Integrate n_traj state-vector trajectories in the H eigenbasis.

    energies: eigenvalues of H; c0: initial amplitudes in the eigenbasis.
    """
    e = np.asarray(energies, dtype=float)
    d = e.shape[0]
    c0 = np.asarray(c0, dtype=complex)
    if groups is None:
        groups = tuple((i,) for i in range(d))
    gmask = _group_masks(groups, d)
    e2 = e * e
    p0 = np.abs(c0) ** 2
    v0 = float(p0 @ e2 - (p0 @ e) ** 2)
    v_stop = eps * v0 if v0 > 0 else 0.0

    n_rec = (horizon_steps // record_stride + 1) if record_stride else 0
    sq = np.sqrt(dt)
    sig2_8 = 0.125 * sigma * sigma

    def run_batch(lo: int, hi: int):
        b = hi - lo
        gens = [trajectory_generator(base_seed, i) for i in range(lo, hi)]
        c = np.tile(c0, (b, 1))
        crossed = np.zeros(b, bool)
        tred = np.full(b, np.nan)
        outcomes = np.full(b, -1, np.int64)
        finals = np.zeros((b, d), complex)
        rec = np.zeros((n_rec, 4)) if n_rec else None  # ΣV, ΣV², Σ⟨H⟩, Σ⟨H⟩²
        rec_i = 0

        def record(pop):
            nonlocal rec_i
            v = pop @ e2 - (pop @ e) ** 2
            eh = pop @ e
            rec[rec_i] = (v.sum(), (v * v).sum(), eh.sum(), (eh * eh).sum())
            rec_i += 1

        def advance(ca, dw):
            pop = ca.real**2 + ca.imag**2
            eh = pop @ e
            k = e[None, :] - eh[:, None]
            ca *= 1.0 + dt * (-1j * e[None, :] - sig2_8 * k * k) + (0.5 * sigma) * k * dw[:, None]
            ca /= np.sqrt((ca.real**2 + ca.imag**2).sum(1))[:, None]

        def criterion(ca):
            pop = ca.real**2 + ca.imag**2
            v = pop @ e2 - (pop @ e) ** 2
            gp = pop @ gmask.T
            return (v <= v_stop) & (gp.max(1) >= popmin), gp

        step = 0
        if n_rec:
            record(np.abs(c) ** 2)
        # phase A: fixed horizon, everyone evolves, crossings only marked
        while step < horizon_steps:
            n = min(CHUNK, horizon_steps - step)
            dws = np.stack([g.standard_normal(n) for g in gens]) * sq
            for j in range(n):
                advance(c, dws[:, j])
                step += 1
                if step % CHECK_STRIDE == 0:
                    hit, _ = criterion(c)
                    new = hit & ~crossed
                    if new.any():
                        tred[new] = step * dt
                        crossed |= new
                if record_stride and step % record_stride == 0:
                    record(np.abs(c) ** 2)
        # phase B: retire reduced trajectories until budget exhausted
        alive = np.arange(b)
        if stop_on_reduction:
            hit, gp = criterion(c)
            if hit.any():
                idx = np.nonzero(hit)[0]
                outcomes[idx] = gp[idx].argmax(1)
                tred[idx] = np.where(np.isnan(tred[idx]), step * dt, tred[idx])
                finals[idx] = c[idx]
                alive = np.nonzero(~hit)[0]
            while alive.size and step < max_steps:
                n = min(CHUNK, max_steps - step)
                dws = np.stack([gens[i].standard_normal(n) for i in alive]) * sq
                ca = c[alive]
                for j in range(n):
                    advance(ca, dws[:, j])
                    step += 1
                    if step % CHECK_STRIDE == 0:
                        hit, gp = criterion(ca)
                        if hit.any():
                            idx = np.nonzero(hit)[0]
                            gi = alive[idx]
                            outcomes[gi] = gp[idx].argmax(1)
                            tred[gi] = np.where(np.isnan(tred[gi]), step * dt, tred[gi])
                            finals[gi] = ca[idx]
                            keep = ~hit
                            ca = ca[keep]
                            alive = alive[keep]
                            dws = dws[keep]
                c[alive] = ca
        finals[alive] = c[alive]
        return rec, outcomes, tred, finals

    spans = [(lo, min(lo + BATCH_SIZE, n_traj)) for lo in range(0, n_traj, BATCH_SIZE)]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(lambda s: run_batch(*s), spans))
    else:
        results = [run_batch(*s) for s in spans]

    out = EnsembleRun(n_traj=n_traj, dt=dt, energies=e, groups=tuple(groups))
    out.outcomes = np.concatenate([r[1] for r in results])
    out.reduction_times = np.concatenate([r[2] for r in results])
    out.final_states = np.concatenate([r[3] for r in results])
    if n_rec:
        sums = sum(r[0] for r in results)
        n = float(n_traj)
        out.times = np.arange(n_rec) * record_stride * dt
        out.mean_v = sums[:, 0] / n
        out.mean_v2 = sums[:, 1] / n
        out.sem_v = np.sqrt(np.maximum(sums[:, 1] / n - out.mean_v**2, 0.0) / n)
        out.mean_e = sums[:, 2] / n
        out.sem_e = np.sqrt(np.maximum(sums[:, 3] / n - out.mean_e**2, 0.0) / n)
    return out


def run_density_ensemble(
    energies,
    rho0,
    sigma: float,
    dt: float,
    base_seed: int,
    n_traj: int,
    *,
    groups=None,
    eps: float = REDUCTION_EPS,
    popmin: float = POPULATION_MIN,
    horizon_steps: int = 0,
    record_stride: int = 0,
    stop_on_reduction: bool = True,
    max_steps: int = 10_000_000,
    workers: int | None = None,
) -> EnsembleRun:
    """Integrate density-matrix trajectories of the anticommutator-form
    equation in the H eigenbasis, where the update is elementwise:

        ρ′_ij = ρ_ij · [1 + dt(−i(Eᵢ−Eⱼ) − (σ²/8)(Eᵢ−Eⱼ)²)
                          + (σ/2)(Eᵢ+Eⱼ − 2 Tr ρH) dW].

    For [ρ0, H] = 0 the drift factors are inert on the populated entries
    and this is exactly the pure-noise martingale evolution.
    """
    e = np.asarray(energies, dtype=float)
    d = e.shape[0]
    r0 = np.asarray(rho0, dtype=complex)
    if groups is None:
        groups = tuple((i,) for i in range(d))
    gmask = _group_masks(groups, d)
    e2 = e * e
    diag0 = np.real(np.diag(r0))
    v0 = float(diag0 @ e2 - (diag0 @ e) ** 2)
    v_stop = eps * v0 if v0 > 0 else 0.0

    n_rec = (horizon_steps // record_stride + 1) if record_stride else 0
    sq = np.sqrt(dt)
    ei = e[:, None]
    ej = e[None, :]
    drift_factor = 1.0 + dt * (-1j * (ei - ej) - 0.125 * sigma * sigma * (ei - ej) ** 2)
    anti = ei + ej

    def run_batch(lo: int, hi: int):
        b = hi - lo
        gens = [trajectory_generator(base_seed, i) for i in range(lo, hi)]
        rho = np.tile(r0, (b, 1, 1))
        crossed = np.zeros(b, bool)
        tred = np.full(b, np.nan)
        outcomes = np.full(b, -1, np.int64)
        finals = np.zeros((b, d, d), complex)
        rec_v = np.zeros((n_rec, 2)) if n_rec else None
        rec_rho = np.zeros((n_rec, d, d), complex) if n_rec else None
        rec_abs2 = np.zeros((n_rec, d, d)) if n_rec else None
        rec_i = 0

        def diag_of(r):
            return np.einsum("bii->bi", r).real

        def record(r):
            nonlocal rec_i
            dg = diag_of(r)
            v = dg @ e2 - (dg @ e) ** 2
            rec_v[rec_i] = (v.sum(), (v * v).sum())
            rec_rho[rec_i] = r.sum(0)
            rec_abs2[rec_i] = (r.real**2 + r.imag**2).sum(0)
            rec_i += 1

        def advance(r, dw):
            tr_h = diag_of(r) @ e
            f = drift_factor[None] + (0.5 * sigma) * dw[:, None, None] * (
                anti[None] - 2.0 * tr_h[:, None, None]
            )
            r *= f

        def renorm(r):
            # trace and Hermiticity are preserved analytically; this only
            # sweeps up float roundoff
            herm = 0.5 * (r + np.conj(np.transpose(r, (0, 2, 1))))
            tr = np.einsum("bii->b", herm).real
            r[:] = herm / tr[:, None, None]

        def criterion(r):
            dg = diag_of(r)
            v = dg @ e2 - (dg @ e) ** 2
            gp = dg @ gmask.T
            return (v <= v_stop) & (gp.max(1) >= popmin), gp

        step = 0
        if n_rec:
            record(rho)
        while step < horizon_steps:
            n = min(CHUNK, horizon_steps - step)
            dws = np.stack([g.standard_normal(n) for g in gens]) * sq
            for j in range(n):
                advance(rho, dws[:, j])
                step += 1
                if step % CHECK_STRIDE == 0:
                    renorm(rho)
                    hit, _ = criterion(rho)
                    new = hit & ~crossed
                    if new.any():
                        tred[new] = step * dt
                        crossed |= new
                if record_stride and step % record_stride == 0:
                    record(rho)
        alive = np.arange(b)
        if stop_on_reduction:
            renorm(rho)
            hit, gp = criterion(rho)
            if hit.any():
                idx = np.nonzero(hit)[0]
                outcomes[idx] = gp[idx].argmax(1)
                tred[idx] = np.where(np.isnan(tred[idx]), step * dt, tred[idx])
                finals[idx] = rho[idx]
                alive = np.nonzero(~hit)[0]
            while alive.size and step < max_steps:
                n = min(CHUNK, max_steps - step)
                dws = np.stack([gens[i].standard_normal(n) for i in alive]) * sq
                ra = rho[alive]
                for j in range(n):
                    advance(ra, dws[:, j])
                    step += 1
                    if step % CHECK_STRIDE == 0:
                        renorm(ra)
                        hit, gp = criterion(ra)
                        if hit.any():
                            idx = np.nonzero(hit)[0]
                            gi = alive[idx]
                            outcomes[gi] = gp[idx].argmax(1)
                            tred[gi] = np.where(np.isnan(tred[gi]), step * dt, tred[gi])
                            finals[gi] = ra[idx]
                            keep = ~hit
                            ra = ra[keep]
                            alive = alive[keep]
                            dws = dws[keep]
                rho[alive] = ra
        finals[alive] = rho[alive]
        return (rec_v, rec_rho, rec_abs2), outcomes, tred, finals

    spans = [(lo, min(lo + BATCH_SIZE, n_traj)) for lo in range(0, n_traj, BATCH_SIZE)]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(lambda s: run_batch(*s), spans))
    else:
        results = [run_batch(*s) for s in spans]

    out = EnsembleRun(n_traj=n_traj, dt=dt, energies=e, groups=tuple(groups))
    out.outcomes = np.concatenate([r[1] for r in results])
    out.reduction_times = np.concatenate([r[2] for r in results])
    out.final_states = np.concatenate([r[3] for r in results])
    if n_rec:
        n = float(n_traj)
        rec_v = sum(r[0][0] for r in results)
        rec_rho = sum(r[0][1] for r in results)
        rec_abs2 = sum(r[0][2] for r in results)
        out.times = np.arange(n_rec) * record_stride * dt
        out.mean_v = rec_v[:, 0] / n
        out.mean_v2 = rec_v[:, 1] / n
        out.sem_v = np.sqrt(np.maximum(out.mean_v2 - out.mean_v**2, 0.0) / n)
        out.mean_rho = rec_rho / n
        var_elem = np.maximum(rec_abs2 / n - np.abs(out.mean_rho) ** 2, 0.0)
        out.sem_rho_frob = np.sqrt(var_elem.sum(axis=(1, 2)) / n)
    return out
