"""Command-line entry point.

Every subcommand writes deterministic CSV artifacts (header row, LF line
endings, 17 significant digits) into an output directory together with a
``config-resolved.json`` copy of the fully resolved parameters, echoes that
config, and prints one machine-readable ``RESULT`` line per check it runs.
The exit status is 0 only if all requested checks pass.  The default seed
comes from ``REDUCTIONLAB_SEED`` (falling back to 0), so a run is
reproducible from its config file alone.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np
from scipy import stats as sstats

from . import accretion, composite, dynamics, phenomenology as ph, reduction
from .linalg import load_array, random_density_matrix, random_hermitian, random_pure_state
from .noise import wiener_path

SEED_ENV = "REDUCTIONLAB_SEED"


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _write_csv(path: Path, header: str, rows) -> None:
    lines = [header]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, (int, float, np.floating))
                              else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n", newline="\n")


class Reporter:
    """Collects pass/fail checks and prints RESULT lines."""

    def __init__(self):
        self.failures = 0

    def check(self, name: str, ok: bool, **info) -> None:
        detail = " ".join(f"{k}={_fmt(v) if isinstance(v, (int, float, np.floating)) else v}"
                          for k, v in info.items())
        status = "PASS" if ok else "FAIL"
        print(f"RESULT check={name} status={status} {detail}".rstrip())
        if not ok:
            self.failures += 1

    def value(self, name: str, **info) -> None:
        detail = " ".join(f"{k}={_fmt(v) if isinstance(v, (int, float, np.floating)) else v}"
                          for k, v in info.items())
        print(f"VALUE name={name} {detail}")


def _resolve_out_dir(args, subname: str) -> Path:
    if args.out_dir:
        out = Path(args.out_dir)
    else:
        stamp = time.strftime("%Y%m%d-%H%M%S")
        out = Path("out") / f"{subname}-{stamp}"
    out.mkdir(parents=True, exist_ok=True)
    return out


def _dump_config(out_dir: Path, args) -> None:
    cfg = {k: v for k, v in vars(args).items() if k not in ("func", "config")}
    cfg_json = json.dumps(cfg, indent=2, sort_keys=True, default=str)
    (out_dir / "config-resolved.json").write_text(cfg_json + "\n", newline="\n")
    print(f"config: {cfg_json}")


def _parse_hamiltonian(spec: str) -> np.ndarray:
    if spec.startswith("diag:"):
        return np.diag([float(x) for x in spec[5:].split(",")]).astype(complex)
    m = load_array(spec)
    if m.ndim != 2:
        raise SystemExit(f"{spec} does not hold a matrix")
    return m


def _parse_state(spec: str, dim: int | None = None) -> np.ndarray:
    if spec.startswith("weights:"):
        w = np.array([float(x) for x in spec[8:].split(",")])
        if abs(w.sum() - 1.0) > 1e-9:
            raise SystemExit("weights must sum to 1")
        return np.sqrt(w).astype(complex)
    if spec.startswith("amps:"):
        pairs = [p.split("/") for p in spec[5:].split(",")]
        v = np.array([complex(float(a), float(b)) for a, b in pairs])
        return v / np.linalg.norm(v)
    v = load_array(spec)
    if v.ndim != 1:
        raise SystemExit(f"{spec} does not hold a vector")
    return v


def _parse_quantity(text: str) -> ph.Quantity:
    import re

    m = re.fullmatch(
        r"\s*([-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*([A-Za-z0-9/*]*)\s*", text)
    if not m:
        raise SystemExit(f"cannot parse quantity {text!r}")
    return ph.qty(float(m.group(1)), m.group(2))


# --- subcommand implementations ----------------------------------------------


def cmd_simulate(args, rep: Reporter, out: Path) -> None:
    h = _parse_hamiltonian(args.hamiltonian)
    init = _parse_state(args.init)
    if args.density:
        init = np.outer(init, init.conj())
    cfg = dynamics.SdeConfig(sigma=args.sigma, dt=args.dt, n_steps=args.steps,
                             scheme=args.scheme, noise_form=args.noise_form,
                             record_stride=args.stride)
    traj = dynamics.evolve_trajectory(init, h, cfg, seed=args.seed)
    traj.to_csv(out / "trajectory.csv")
    if args.dump_noise:
        wiener_path(args.seed, args.dt, args.steps).to_csv(out / "noise.csv")
    rep.value("simulate", final_V=traj.variance[-1], final_E=traj.energy_mean[-1],
              rows=len(traj.times))


def cmd_ensemble_born(args, rep: Reporter, out: Path) -> None:
    energies = ([float(x) for x in args.energies.split(",")] if args.energies
                else list(range(args.dim)))
    w = np.array([float(x) for x in args.weights.split(",")])
    if len(w) != len(energies):
        raise SystemExit("need one weight per energy")
    h = np.diag(np.array(energies, float)).astype(complex)
    chi0 = np.sqrt(w / w.sum()).astype(complex)
    st = reduction.born_statistics(h, chi0, args.sigma, args.ntraj, args.seed,
                                   dt=args.dt, workers=args.workers)
    st.outcome_csv(out / "born-frequencies.csv")
    ok_all = True
    for lab, f, p in zip(st.outcome_labels, st.frequencies, st.expected):
        band = 4.0 * math.sqrt(p * (1 - p) / st.n_traj)
        ok = abs(f - p) <= band
        ok_all &= ok
        rep.check(f"born[{lab}]", ok, freq=f, born_weight=p, band=band)
    counts = np.round(st.frequencies * (st.n_traj - st.n_unreduced))
    chi2, pval = sstats.chisquare(counts, st.expected * counts.sum())
    rep.check("born-chi2", pval > 1e-3, p_value=pval)


def cmd_ensemble_statdist(args, rep: Reporter, out: Path) -> None:
    energies = ([float(x) for x in args.energies.split(",")] if args.energies
                else list(range(args.dim)))
    h = np.diag(np.array(energies, float)).astype(complex)
    report = reduction.statdist_martingale_run(
        h, args.beta, args.sigma, args.ntraj, args.seed,
        dt=args.dt, workers=args.workers)
    report.stats.outcome_csv(out / "statdist-frequencies.csv")
    report.stats.series_csv(out / "statdist-series.csv")
    rep.check("statdist-mean", report.mean_dev_ratio <= 1.0,
              sup_dev=report.sup_mean_deviation, allowed=report.sup_allowed)
    for lab, f, p in zip(report.stats.outcome_labels, report.stats.frequencies,
                         report.gibbs_weights):
        band = 4.0 * math.sqrt(p * (1 - p) / report.stats.n_traj)
        rep.check(f"statdist[{lab}]", abs(f - p) <= band, freq=f, gibbs=p, band=band)


def cmd_ensemble_luders(args, rep: Reporter, out: Path) -> None:
    alpha = math.sqrt(args.alpha2)
    bamp = _parse_state(args.branch)
    mw = np.array([float(x) for x in args.weights.split(",")])
    me = ([float(x) for x in args.energies.split(",")] if args.energies
          else [1.0 + i for i in range(len(mw))])
    rp = reduction.luders_scenario(alpha, bamp, mw / mw.sum(), me,
                                   args.sigma, args.ntraj, args.seed,
                                   dt=args.dt, workers=args.workers)
    rp.stats.outcome_csv(out / "luders-frequencies.csv")
    for lab, f, p in zip(rp.stats.outcome_labels, rp.stats.frequencies, rp.expected):
        band = 4.0 * math.sqrt(p * (1 - p) / rp.stats.n_traj)
        rep.check(f"luders[{lab}]", abs(f - p) <= band, freq=f, expected=p, band=band)
    rep.check("luders-fidelity", rp.transmission_fidelity_min >= 0.99,
              min_fidelity=rp.transmission_fidelity_min)
    rep.check("luders-phase", rp.phase_error_max <= 1e-2,
              max_phase_error=rp.phase_error_max)


def cmd_ensemble_scaling(args, rep: Reporter, out: Path) -> None:
    sv = [float(x) for x in args.sigma_values.split(",")]
    dv = [float(x) for x in args.de_values.split(",")]
    sc = reduction.reduction_time_scaling(dv, sv, n_traj=args.ntraj,
                                          base_seed=args.seed, workers=args.workers)
    _write_csv(out / "scaling-sigma.csv", "sigma,median_t_r",
               zip(sc.sigma_values, sc.sigma_medians))
    _write_csv(out / "scaling-de.csv", "delta_e,median_t_r",
               zip(sc.de_values, sc.de_medians))
    rep.check("scaling-sigma", abs(sc.sigma_exponent + 2.0) <= 0.2,
              exponent=sc.sigma_exponent)
    rep.check("scaling-de", abs(sc.de_exponent + 2.0) <= 0.2,
              exponent=sc.de_exponent)


def cmd_cluster_check(args, rep: Reporter, out: Path) -> None:
    rng = np.random.default_rng(args.seed)
    rows = []
    worst = {"anti-mixed": 0.0, "dc-pure": 0.0, "dc-endpoint": 0.0, "anti-degenerate": 0.0}
    for i in range(args.instances):
        d1, d2 = rng.integers(2, 5), rng.integers(2, 5)
        h1 = random_hermitian(d1, rng)
        h2 = random_hermitian(d2, rng)
        r1m = random_density_matrix(d1, rng)
        r2m = random_density_matrix(d2, rng)
        v1 = random_pure_state(d1, rng)
        v2 = random_pure_state(d2, rng)
        p1 = np.outer(v1, v1.conj())
        p2 = np.outer(v2, v2.conj())
        worst["anti-mixed"] = max(worst["anti-mixed"],
                                  composite.clustering_noise_residual(r1m, r2m, h1, h2, "anticommutator"))
        worst["dc-pure"] = max(worst["dc-pure"],
                               composite.clustering_noise_residual(p1, p2, h1, h2, "double_commutator"))
        e2 = np.diag(rng.standard_normal(d2)).astype(complex)
        worst["dc-endpoint"] = max(worst["dc-endpoint"],
                                   composite.clustering_drift_residual(p1, np.diag(np.abs(v2)**2 / np.sum(np.abs(v2)**2)), h1, e2, "double_commutator"))
        # degenerate submanifold of h2: two equal eigenvalues
        evals = np.sort(rng.standard_normal(d2))
        evals[1] = evals[0]
        u = np.linalg.qr(rng.standard_normal((d2, d2)) + 1j * rng.standard_normal((d2, d2)))[0]
        hdeg = (u * evals) @ u.conj().T
        mix = rng.random()
        rdeg = (mix * np.outer(u[:, 0], u[:, 0].conj())
                + (1 - mix) * np.outer(u[:, 1], u[:, 1].conj()))
        worst["anti-degenerate"] = max(worst["anti-degenerate"],
                                       composite.clustering_drift_residual(p1, rdeg, h1, hdeg, "anticommutator"))
    generic = composite.clustering_noise_residual(
        random_density_matrix(2, rng), np.eye(2) / 2,
        random_hermitian(2, rng), random_hermitian(2, rng), "double_commutator")
    for name, v in worst.items():
        rows.append((name, v))
        rep.check(f"cluster[{name}]", v <= 1e-12, residual=v)
    rows.append(("generic-mixed-dc", generic))
    rep.check("cluster[generic-nonzero]", generic > 1e-6, residual=generic)
    _write_csv(out / "cluster-residuals.csv", "case,worst_residual", rows)


def cmd_hartree(args, rep: Reporter, out: Path) -> None:
    rng = np.random.default_rng(args.seed + 101)
    d = args.dim
    h1 = random_hermitian(d, rng)
    h2 = np.diag(np.linspace(0.0, 1.8, d)).astype(complex)
    dh = random_hermitian(d * d, rng)
    dh /= np.linalg.norm(dh, 2)
    system = composite.CompositeSystem(h1, h2, dh)
    v = random_pure_state(d, rng)
    rho1 = np.outer(v, v.conj())
    rho2 = np.zeros((d, d), complex)
    rho2[1, 1] = 1.0          # eigenstate of h2: equilibrium environment
    gv = [float(x) for x in args.g_values.split(",")]
    report = composite.hartree_vs_full(system, rho1, rho2, args.sigma, args.dt,
                                       args.horizon, gv, args.ntraj, args.seed)
    report.csv(out / "hartree-discrepancy.csv")
    rep.check("hartree-exponent", report.exponent >= 1.7, exponent=report.exponent)
    zero = composite.hartree_vs_full(system, rho1, rho2, args.sigma, args.dt,
                                     args.horizon, [0.0], args.ntraj, args.seed)
    rep.check("hartree-g0", zero.mean_discrepancy[0] <= 1e-10,
              discrepancy=zero.mean_discrepancy[0])


def cmd_accretion_occupancy(args, rep: Reporter, out: Path) -> None:
    model = accretion.AccretionModel(args.sites, args.mass, args.stick, args.evap)
    res = accretion.occupancy_simulate(model, args.horizon, args.seed)
    _write_csv(out / "occupancy-histogram.csv", "count,samples",
               enumerate(res.histogram))
    n = np.arange(len(res.histogram))
    expected = accretion.stationary_binomial_pmf(model, n) * res.samples.size
    obs, exp = _merge_bins(res.histogram, expected)
    chi2 = float(((obs - exp) ** 2 / exp).sum())
    pval = float(sstats.chi2.sf(chi2, max(len(obs) - 1, 1)))
    rep.check("occupancy-binomial", pval > 1e-3, p_value=pval,
              mean=res.mean, expected_mean=model.mean_occupancy)
    rep.value("occupancy-rms", sampled=res.std,
              sqrt_mean=math.sqrt(model.mean_occupancy))


def _merge_bins(observed, expected, floor: float = 5.0):
    obs, exp = [], []
    co = ce = 0.0
    for o, e in zip(observed, expected):
        co += o
        ce += e
        if ce >= floor:
            obs.append(co)
            exp.append(ce)
            co = ce = 0.0
    if ce > 0 and exp:
        obs[-1] += co
        exp[-1] += ce
    return np.asarray(obs), np.asarray(exp)


def cmd_accretion_coherent(args, rep: Reporter, out: Path) -> None:
    n, z = args.n, complex(args.z)
    rows = []
    for k in range(-args.kmax, args.kmax + 1):
        if n - k < 0:
            continue
        pe = accretion.pnk_exact(n, k, z)
        pb = accretion.pnk_bessel(n, k, z)
        env = accretion.pnk_envelope(n, k, z)
        rows.append((k, pe, pb, env.value if env.region == "band" else 0.0))
    _write_csv(out / "coherent-spectrum.csv", "k,p_exact,p_bessel,envelope", rows)
    n_max = accretion.default_truncation(n, z)
    total = sum(accretion.pnk_exact(n, n - m, z, n_max=n_max) for m in range(n_max + 1))
    rep.check("coherent-sum", abs(total - 1.0) <= 1e-10, total=total)
    cross = max(abs(accretion.pnk_exact(n, k, z) - accretion.pnk_laguerre(n, k, z))
                for k in range(-5, 6))
    rep.check("coherent-crosscheck", cross <= 1e-10, max_diff=cross)


def cmd_phenom_treduce(args, rep: Reporter, out: Path) -> None:
    de = _parse_quantity(args.delta_e)
    t = ph.t_reduce(de)
    _write_csv(out / "t-reduce.csv", "delta_e_eV,t_r_s", [(de.to("eV"), t.to("s"))])
    rep.value("t-reduce", delta_e_eV=de.to("eV"), t_r_s=t.to("s"))


def cmd_phenom_accretion(args, rep: Reporter, out: Path) -> None:
    preset = ph.PRESETS[args.preset]
    area = _parse_quantity(args.area)
    est = ph.accretion_reduction_for_area(preset, area)
    _write_csv(out / "phenom-accretion.csv",
               "preset,area_cm2,t_r_s,molecules,valid",
               [(preset.name, area.to("cm2"), est.t_r.to("s"), est.molecules,
                 int(est.valid))])
    rep.value("phenom-accretion", preset=preset.name, t_r_s=est.t_r.to("s"),
              molecules=est.molecules, valid=est.valid)


def cmd_phenom_table(args, rep: Reporter, out: Path) -> None:
    rows = ph.scenario_table()
    ph.scenario_table_csv(out / "scenario-table.csv", rows)
    hdr = f"{'preset':<14}{'A(t_R=1e-8s)':>16}{'A(t_R=3e-4s)':>16}{'t_R(1cm2)':>14}{'molecules':>12}"
    print(hdr)
    for r in rows:
        print(f"{r.preset:<14}{r.area_fast.to('cm2'):>16.3e}"
              f"{r.area_relaxed.to('cm2'):>16.3e}"
              f"{r.t_r_at_1cm2.to('s'):>14.3e}{r.molecules_at_1cm2:>12.3e}")
    rep.value("phenom-table", rows=len(rows))


_PAPER_CHECKS = [
    # (name, compute, paper value, tolerance factor)
    ("eq21-proton", lambda: ph.t_reduce(ph.PROTON_MASS).to("s"), 1e-5, 2.0),
    ("eq21-nitrogen", lambda: ph.t_reduce(ph.NITROGEN_MASS).to("s"), 1e-8, 2.0),
    ("eq21-squid", lambda: ph.t_reduce(ph.qty(8.6e-6, "eV")).to("s"), 1e23, 2.0),
    ("eq21-fullerene", lambda: ph.t_reduce(ph.qty(0.23, "eV")).to("s"), 1.5e14, 2.0),
    ("eq21-hf178", lambda: ph.t_reduce(ph.qty(2.4, "MeV")).to("s"), 1.0, 2.0),
    ("eq21-ta180", lambda: ph.t_reduce(ph.qty(75, "keV")).to("min"), 23.0, 2.0),
    ("eq27-air-tr", lambda: ph.accretion_reduction_for_area(ph.AIR_STP, ph.qty(1, "cm2")).t_r.to("s"), 5e-19, 2.0),
    ("eq27-air-molecules", lambda: ph.accretion_reduction_for_area(ph.AIR_STP, ph.qty(1, "cm2")).molecules, 1.5e5, 2.0),
    ("eq27-moon-area", lambda: ph.area_for_reduction_time(ph.MOON_SURFACE, ph.qty(1e-8, "s")).area.to("cm2"), 3.0, 2.0),
    ("eq27-interstellar-area", lambda: ph.area_for_reduction_time(ph.INTERSTELLAR, ph.qty(1e-8, "s")).area.to("m2"), 30.0, 2.0),
    ("eq27-intergalactic-area", lambda: ph.area_for_reduction_time(ph.INTERGALACTIC, ph.qty(1e-8, "s")).area.to("m2"), 8e5, 2.0),
    ("eq27-intergalactic-protons", lambda: ph.area_for_reduction_time(ph.INTERGALACTIC, ph.qty(1e-8, "s")).molecules, 28.0, 2.0),
    ("eq27-interstellar-relaxed", lambda: ph.area_for_reduction_time(ph.INTERSTELLAR, ph.qty(3e-4, "s")).area.to("cm2"), 10.0, 2.0),
    ("eq27-intergalactic-relaxed", lambda: ph.area_for_reduction_time(ph.INTERGALACTIC, ph.qty(3e-4, "s")).area.to("m2"), 1.0, 2.0),
    ("eq23-water-14GeV", lambda: ph.thermal_fluctuation(ph.qty(298, "K"), ph.qty(4.18, "J/K")).de_rms.to("GeV"), 14.0, 1.2),
    ("eq32-air-decoherence", lambda: (ph.decoherence_rate(ph.qty(1e10, "1/s"))
                                      * ph.accretion_reduction_for_area(ph.AIR_STP, ph.qty(1, "cm2")).molecules).to("1/s"), 0.7e15, 2.0),
    ("eq32-air-reduction-rate", lambda: (1.0 / ph.accretion_reduction_for_area(ph.AIR_STP, ph.qty(1, "cm2")).t_r).to("1/s"), 2e18, 2.0),
    ("eq32-crossover-area", lambda: ph.crossover_area().to("cm2"), 4e-11, 2.0),
    ("shot-delta-n", lambda: ph.shot_noise_energy(6e7, 1e4).delta_n, 8e5, 2.0),
    ("shot-delta-e", lambda: ph.shot_noise_energy(6e7, 1e4).delta_e.to("GeV"), 4e2, 2.0),
    ("shot-t-r", lambda: ph.shot_noise_energy(6e7, 1e4).t_r.to("s"), 5e-11, 2.0),
]


def cmd_reproduce_paper(args, rep: Reporter, out: Path) -> None:
    rows = []
    print(f"{'check':<28}{'computed':>14}{'source':>12}{'ratio':>9}  status")
    for name, fn, target, tol in _PAPER_CHECKS:
        value = float(fn())
        ratio = value / target
        ok = (1.0 / tol) <= ratio <= tol
        rows.append((name, value, target, ratio, "PASS" if ok else "FAIL"))
        print(f"{name:<28}{value:>14.4g}{target:>12.3g}{ratio:>9.3f}  "
              f"{'PASS' if ok else 'FAIL'}")
        rep.check(f"paper[{name}]", ok, computed=value, source=target, ratio=ratio)
    _write_csv(out / "paper-values.csv", "check,computed,source,ratio,status", rows)


# --- parser ------------------------------------------------------------------


def _add_common(p, *, ntraj=None):
    p.add_argument("--seed", type=int,
                   default=int(os.environ.get(SEED_ENV, "0")))
    p.add_argument("--out-dir", default=None,
                   help="output directory (default out/<subcommand>-<timestamp>)")
    p.add_argument("--workers", type=int, default=os.cpu_count(),
                   help="parallel worker threads; results are worker-count independent")
    p.add_argument("--config", default=None,
                   help="JSON file of parameter defaults (flags override)")
    if ntraj is not None:
        p.add_argument("--ntraj", type=int, default=ntraj)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="reductionlab",
        description="energy-driven stochastic reduction laboratory")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate a single trajectory")
    p.add_argument("--hamiltonian", default="diag:0,1", help="'diag:e1,e2,...' or matrix file")
    p.add_argument("--init", default="weights:0.5,0.5",
                   help="'weights:w1,...', 'amps:re/im,...', or vector file")
    p.add_argument("--density", action="store_true", help="evolve |χ⟩⟨χ| instead of χ")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--stride", type=int, default=10)
    p.add_argument("--scheme", default=dynamics.EULER_RENORMALIZED,
                   choices=[dynamics.EULER_MARUYAMA, dynamics.EULER_RENORMALIZED])
    p.add_argument("--noise-form", default=dynamics.ANTICOMMUTATOR,
                   choices=[dynamics.ANTICOMMUTATOR, dynamics.DOUBLE_COMMUTATOR])
    p.add_argument("--dump-noise", action="store_true",
                   help="also write the consumed Wiener increments (step,dW)")
    _add_common(p)
    p.set_defaults(func=cmd_simulate, subname="simulate")

    ens = sub.add_parser("ensemble", help="ensemble statistics").add_subparsers(
        dest="mode", required=True)

    p = ens.add_parser("born", help="Born-rule frequency test")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--weights", default="0.5,0.5")
    p.add_argument("--energies", default=None)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=None)
    _add_common(p, ntraj=10000)
    p.set_defaults(func=cmd_ensemble_born, subname="ensemble-born")

    p = ens.add_parser("statdist", help="Gibbs martingale ensemble")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--energies", default=None)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=None)
    _add_common(p, ntraj=10000)
    p.set_defaults(func=cmd_ensemble_statdist, subname="ensemble-statdist")

    p = ens.add_parser("luders", help="partial-measurement scenario")
    p.add_argument("--alpha2", type=float, default=0.5,
                   help="transmission probability |α|²")
    p.add_argument("--branch",
                   default="amps:0.7071067811865476/0,"
                           "0.5408280772796764/0.4555331482329007",
                   help="amplitudes of the untouched degenerate branch "
                        "(default: (1, e^{0.7i})/sqrt(2))")
    p.add_argument("--weights", default="0.5,0.5", help="measured branch weights")
    p.add_argument("--energies", default=None, help="measured branch energies")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=None)
    _add_common(p, ntraj=10000)
    p.set_defaults(func=cmd_ensemble_luders, subname="ensemble-luders")

    p = ens.add_parser("scaling", help="reduction-time power laws")
    p.add_argument("--sigma-values", default="0.5,0.7071,1.0,1.4142")
    p.add_argument("--de-values", default="0.5,0.7071,1.0,1.4142")
    _add_common(p, ntraj=512)
    p.set_defaults(func=cmd_ensemble_scaling, subname="ensemble-scaling")

    p = sub.add_parser("cluster-check", help="clustering residual checks")
    p.add_argument("--instances", type=int, default=100)
    _add_common(p)
    p.set_defaults(func=cmd_cluster_check, subname="cluster-check")

    p = sub.add_parser("hartree", help="mean-field vs full comparison")
    hsub = p.add_subparsers(dest="mode", required=True)
    p = hsub.add_parser("compare")
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=2e-4)
    p.add_argument("--horizon", type=float, default=1.0)
    p.add_argument("--g-values", default="0.1,0.2,0.4")
    _add_common(p, ntraj=12)
    p.set_defaults(func=cmd_hartree, subname="hartree-compare")

    acc = sub.add_parser("accretion", help="occupancy chain / coherent spectra")
    asub = acc.add_subparsers(dest="mode", required=True)
    p = asub.add_parser("occupancy")
    p.add_argument("--sites", type=int, default=1000)
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--stick", type=float, default=0.005)
    p.add_argument("--evap", type=float, default=0.995)
    p.add_argument("--horizon", type=float, default=20000.0)
    _add_common(p)
    p.set_defaults(func=cmd_accretion_occupancy, subname="accretion-occupancy")
    p = asub.add_parser("coherent")
    p.add_argument("--n", type=int, default=400)
    p.add_argument("--z", default="0.05")
    p.add_argument("--kmax", type=int, default=20)
    _add_common(p)
    p.set_defaults(func=cmd_accretion_coherent, subname="accretion-coherent")

    phn = sub.add_parser("phenom", help="unit-aware estimates")
    psub = phn.add_subparsers(dest="mode", required=True)
    p = psub.add_parser("t-reduce")
    p.add_argument("--delta-e", required=True, help="e.g. 8.6e-6eV or 2.4MeV")
    _add_common(p)
    p.set_defaults(func=cmd_phenom_treduce, subname="phenom-t-reduce")
    p = psub.add_parser("accretion")
    p.add_argument("--area", default="1cm2")
    p.add_argument("--preset", default="air-stp", choices=sorted(ph.PRESETS))
    _add_common(p)
    p.set_defaults(func=cmd_phenom_accretion, subname="phenom-accretion")
    p = psub.add_parser("table")
    _add_common(p)
    p.set_defaults(func=cmd_phenom_table, subname="phenom-table")

    p = sub.add_parser("reproduce-paper",
                       help="evaluate every closed-form estimate against its source value")
    _add_common(p)
    p.set_defaults(func=cmd_reproduce_paper, subname="reproduce-paper")
    return ap


def _apply_config_file(ap: argparse.ArgumentParser, argv) -> argparse.Namespace:
    """Resolve parameters: CLI flags beat the config file beat defaults."""
    args = ap.parse_args(argv)
    if getattr(args, "config", None):
        overrides = json.loads(Path(args.config).read_text())
        explicit = {tok.split("=", 1)[0].lstrip("-").replace("-", "_")
                    for tok in argv if tok.startswith("--")}
        for key, val in overrides.items():
            attr = key.replace("-", "_")
            if hasattr(args, attr) and attr not in explicit:
                setattr(args, attr, val)
    return args


def main(argv=None) -> int:
    ap = build_parser()
    args = _apply_config_file(ap, sys.argv[1:] if argv is None else argv)
    rep = Reporter()
    out = _resolve_out_dir(args, args.subname)
    _dump_config(out, args)
    try:
        args.func(args, rep, out)
    except (ValueError, RuntimeError) as exc:
        print(f"ERROR module={args.subname} detail={exc}", file=sys.stderr)
        return 2
    print(f"artifacts: {out}")
    return 0 if rep.failures == 0 else 1


if __name__ == "__main__":
    raise SystemExit(main())
