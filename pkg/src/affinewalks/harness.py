"""Experiment orchestration for the two scaling-limit statements, plus the
command-line interface.

Both experiments are two-estimator statistical comparisons: the limit
theorems carry no rates, so acceptance means agreement of Monte Carlo
marginals within standard-error bands at frozen scales (see
:mod:`affinewalks.thresholds`).  Reports are pure functions of the
configuration and seeds and carry a content hash of the configuration for
provenance.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import characters, chain, diffusion
from .algebra import (AffineAlgebra, Weight, algebra_from_json,
                      algebra_from_name, classify_weight, pairing_coroot,
                      weyl_vector)
from ._linalg import invert, mat_vec
from .layerseries import increment_atoms
from .thresholds import GOLDEN
from .weyl import dominant_representative

__all__ = [
    "ExperimentConfig",
    "ComparisonReport",
    "ks_statistic",
    "round_to_dominant",
    "scaling_walk_experiment",
    "scaling_chain_experiment",
    "calibrate_chain_harness",
    "run_cli",
    "main",
]


# -- configuration -----------------------------------------------------------------


@dataclass
class ExperimentConfig:
    algebra: str = "A1~"
    spec_n: int = GOLDEN.chain_n
    time_grid: tuple[float, ...] = GOLDEN.chain_times
    samples: int = GOLDEN.chain_samples
    seed: int = 20260808
    dt: float = GOLDEN.chain_dt
    start_pairings: tuple[str, ...] = ("1", "1")   # coroot pairings of x, rationals
    max_abort_fraction: float = GOLDEN.chain_max_abort_fraction
    out: str | None = None

    def __post_init__(self):
        if self.spec_n < 1:
            raise ValueError("spec_n must be >= 1")
        if self.samples <= 0 or any(t < 0 for t in self.time_grid):
            raise ValueError("counts and times must be positive")

    def to_json(self) -> str:
        d = dataclasses.asdict(self)
        d["time_grid"] = list(self.time_grid)
        d["start_pairings"] = list(self.start_pairings)
        return json.dumps(d, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "ExperimentConfig":
        d = json.loads(text)
        d["time_grid"] = tuple(d.get("time_grid", GOLDEN.chain_times))
        d["start_pairings"] = tuple(str(x) for x in d.get(
            "start_pairings", ("1", "1")))
        return ExperimentConfig(**d)

    def content_hash(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]


@dataclass
class ComparisonReport:
    kind: str
    config_hash: str
    per_time: list[dict]
    passed: bool
    notes: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True)

    def write(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json())

    def write_csv(self, path: str) -> None:
        if not self.per_time:
            return
        keys = sorted({k for row in self.per_time for k in row})
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=keys)
            writer.writeheader()
            for row in self.per_time:
                writer.writerow(row)


# -- statistics ---------------------------------------------------------------------


def ks_statistic(samples_a, samples_b_or_cdf) -> float:
    """Kolmogorov-Smirnov statistic: two-sample, or one-sample against a
    callable CDF."""
    a = np.sort(np.asarray(samples_a, dtype=float))
    if a.size == 0:
        raise ValueError("empty sample")
    if callable(samples_b_or_cdf):
        cdf = samples_b_or_cdf(a)
        grid = np.arange(1, a.size + 1) / a.size
        return float(max(np.abs(grid - cdf).max(),
                         np.abs(cdf - (grid - 1.0 / a.size)).max()))
    b = np.sort(np.asarray(samples_b_or_cdf, dtype=float))
    if b.size == 0:
        raise ValueError("empty sample")
    both = np.concatenate([a, b])
    ca = np.searchsorted(a, both, side="right") / a.size
    cb = np.searchsorted(b, both, side="right") / b.size
    return float(np.abs(ca - cb).max())


def _normal_cdf(x):
    return 0.5 * (1.0 + np.vectorize(math.erf)(x / math.sqrt(2.0)))


def _compare_samples(za: np.ndarray, zb: np.ndarray, sigmas: float,
                     ks_threshold: float) -> dict:
    """Mean / variance / KS agreement between two univariate samples."""
    na, nb = za.size, zb.size
    mean_delta = abs(za.mean() - zb.mean())
    se_mean = math.sqrt(za.var() / na + zb.var() / nb)
    var_delta = abs(za.var(ddof=1) - zb.var(ddof=1))
    se_var = math.sqrt(2 * za.var(ddof=1) ** 2 / (na - 1)
                       + 2 * zb.var(ddof=1) ** 2 / (nb - 1))
    ks = ks_statistic(za, zb)
    return {
        "mean_delta": mean_delta, "mean_band": sigmas * se_mean,
        "var_delta": var_delta, "var_band": sigmas * se_var,
        "ks": ks, "ks_threshold": ks_threshold,
        "pass": bool(mean_delta <= sigmas * se_mean
                     and var_delta <= sigmas * se_var
                     and ks <= ks_threshold),
    }


# -- weight helpers ------------------------------------------------------------------


def weight_from_pairings(alg: AffineAlgebra, pairings) -> Weight:
    """Weight with the given coroot pairings (q_0..q_l) and no delta part."""
    vals = [Fraction(str(x)) for x in pairings]
    if len(vals) != alg.rank + 1:
        raise ValueError(f"need {alg.rank + 1} pairings")
    level = sum(Fraction(alg.comarks[i]) * vals[i] for i in range(alg.rank + 1))
    finite = tuple(tuple(Fraction(alg.cartan.entries[i][j])
                         for j in range(1, alg.rank + 1))
                   for i in range(1, alg.rank + 1))
    z = mat_vec(invert(finite), vals[1:])
    return Weight.make(level, z, 0)


def round_to_dominant(alg: AffineAlgebra, x: Weight, n: int) -> Weight:
    """Nearest dominant integral weight to ``n*x`` (componentwise pairing
    rounding with dominance repair through the Weyl group)."""
    target = x.scale(n)
    q = [round(float(pairing_coroot(alg, target, i)))
         for i in range(1, alg.rank + 1)]
    level = round(float(n * x.k))
    finite = tuple(tuple(Fraction(alg.cartan.entries[i][j])
                         for j in range(1, alg.rank + 1))
                   for i in range(1, alg.rank + 1))
    z = mat_vec(invert(finite), [Fraction(v) for v in q])
    cand = Weight.make(level, z, 0)
    cls = classify_weight(alg, cand)
    if not cls.dominant:
        cand, _ = dominant_representative(alg, cand)
        cand = cand.bar()
    if not classify_weight(alg, cand).dominant:
        raise ValueError("dominance repair failed")
    return cand


# -- experiments ---------------------------------------------------------------------


def scaling_walk_experiment(cfg: ExperimentConfig) -> ComparisonReport:
    """Scaled weight-walk marginals against the drifted Gaussian limit.

    Increments follow the projected measure with ``omega = h_vee*Lambda0``
    at ``rho/n``; at each grid time the scaled finite coordinate is tested
    per orthonormal coordinate against N(t*rho_drift, t).
    """
    alg = algebra_from_name(cfg.algebra)
    if alg.rank != 1:
        raise NotImplementedError("walk experiment is wired for rank one")
    omega = Weight.make(alg.dual_coxeter, (0,) * alg.rank, 0)
    s = characters.rho_specialization(alg, cfg.spec_n)
    atoms = increment_atoms(alg, omega, s)
    if atoms.defect > 1e-6:
        raise chain.ChainDefectError("increment table defect above threshold")
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    n = cfg.spec_n
    steps = max(int(round(n * max(cfg.time_grid))), 1)
    offs = atoms.offsets()
    draws = rng.choice(offs, p=atoms.prob, size=(cfg.samples, steps))
    om_z = float(omega.z[0])
    z_alpha = np.cumsum(om_z - draws, axis=1)     # increment = omega_f - m*alpha
    frame = diffusion._frame(alg)
    scale = float(frame.LT[0, 0])                 # alpha-units to orthonormal
    rho_drift = float(frame.rho_o[0])

    per_time = []
    ok = True
    for t in cfg.time_grid:
        k = int(round(n * t))
        if k == 0:
            continue
        z = z_alpha[:, k - 1] / n * scale
        se = z.std() / math.sqrt(z.size)
        mean_delta = abs(z.mean() - t * rho_drift)
        ks = ks_statistic(z, lambda x, t=t: _normal_cdf(
            (x - t * rho_drift) / math.sqrt(t)))
        entry = {
            "t": t, "mean": float(z.mean()), "target_mean": t * rho_drift,
            "mean_delta": float(mean_delta),
            "mean_band": GOLDEN.walk_mean_sigmas * float(se),
            "var": float(z.var()), "target_var": t,
            "ks": float(ks), "ks_threshold": GOLDEN.walk_ks_threshold,
            "pass": bool(mean_delta <= GOLDEN.walk_mean_sigmas * se
                         and ks <= GOLDEN.walk_ks_threshold),
        }
        ok = ok and entry["pass"]
        per_time.append(entry)
    return ComparisonReport(kind="walk-scaling", config_hash=cfg.content_hash(),
                            per_time=per_time, passed=ok,
                            notes={"samples": cfg.samples, "n": n,
                                   "atom_defect": atoms.defect})


def _chain_marginals(cfg: ExperimentConfig, alg: AffineAlgebra,
                     x: Weight) -> dict[float, np.ndarray]:
    omega = Weight.make(alg.dual_coxeter, (0,) * alg.rank, 0)
    s = characters.rho_specialization(alg, cfg.spec_n)
    x_n = round_to_dominant(alg, x, cfg.spec_n)
    kernel = chain.FastBarredKernel(alg, omega, s)
    record = tuple(int(round(cfg.spec_n * t)) for t in cfg.time_grid)
    rec = kernel.sample(x_n, max(record), cfg.samples, cfg.seed,
                        record_steps=record)
    frame = diffusion._frame(alg)
    scale = float(frame.LT[0, 0])
    return {t: rec[int(round(cfg.spec_n * t))] / cfg.spec_n * scale
            for t in cfg.time_grid}


def _diffusion_marginals(cfg: ExperimentConfig, alg: AffineAlgebra,
                         x: Weight, seed: int) -> dict[float, np.ndarray]:
    x0 = diffusion.weight_to_point(alg, x)
    batch = diffusion.sample_path_batch(
        alg, x0, max(cfg.time_grid), cfg.dt, cfg.samples, seed,
        conditioned=True, record_times=cfg.time_grid)
    frac = float(batch.aborted.mean())
    if frac > cfg.max_abort_fraction:
        raise diffusion.OutsideChamberError(
            f"conditioned sampler aborted {frac:.2%} of paths")
    keep = ~batch.aborted
    return {t: batch.z[int(round(t / cfg.dt))][keep][:, 0]
            for t in cfg.time_grid}


def scaling_chain_experiment(cfg: ExperimentConfig) -> ComparisonReport:
    """Finite-dimensional marginals: scaled dominant-weight chain against
    the conditioned space-time diffusion, both Monte Carlo."""
    alg = algebra_from_name(cfg.algebra)
    x = weight_from_pairings(alg, cfg.start_pairings)
    inside, margin = diffusion.chamber_test(alg, diffusion.weight_to_point(alg, x))
    if margin <= 0:
        raise ValueError("start must lie strictly inside the chamber")
    chain_m = _chain_marginals(cfg, alg, x)
    diff_m = _diffusion_marginals(cfg, alg, x, cfg.seed + 1)

    ks_threshold = GOLDEN.chain_ks_const * math.sqrt(
        2.0 / cfg.samples)
    per_time = []
    ok = True
    for t in cfg.time_grid:
        entry = {"t": t}
        entry.update(_compare_samples(chain_m[t], diff_m[t],
                                      GOLDEN.chain_sigmas, ks_threshold))
        ok = ok and entry["pass"]
        per_time.append(entry)
    return ComparisonReport(kind="chain-scaling", config_hash=cfg.content_hash(),
                            per_time=per_time, passed=ok,
                            notes={"n": cfg.spec_n, "samples": cfg.samples,
                                   "dt": cfg.dt})


def calibrate_chain_harness(cfg: ExperimentConfig,
                            n_runs: int | None = None) -> ComparisonReport:
    """Feed the chain-experiment comparison the SAME process on both sides
    (conditioned diffusion vs itself, fresh seeds) and report the pass
    fraction; guards the thresholds against being over-tight."""
    n_runs = n_runs or GOLDEN.calibration_runs
    alg = algebra_from_name(cfg.algebra)
    x = weight_from_pairings(alg, cfg.start_pairings)
    ks_threshold = GOLDEN.chain_ks_const * math.sqrt(2.0 / cfg.samples)
    passes = 0
    rows = []
    for run in range(n_runs):
        a = _diffusion_marginals(cfg, alg, x, cfg.seed + 1000 + 2 * run)
        b = _diffusion_marginals(cfg, alg, x, cfg.seed + 1001 + 2 * run)
        ok = True
        for t in cfg.time_grid:
            res = _compare_samples(a[t], b[t], GOLDEN.chain_sigmas, ks_threshold)
            ok = ok and res["pass"]
        passes += ok
        rows.append({"run": run, "pass": ok})
    frac = passes / n_runs
    return ComparisonReport(
        kind="chain-harness-calibration", config_hash=cfg.content_hash(),
        per_time=rows, passed=bool(frac >= GOLDEN.calibration_pass_fraction),
        notes={"pass_fraction": frac, "runs": n_runs,
               "required": GOLDEN.calibration_pass_fraction})


# -- CLI ------------------------------------------------------------------------------


def _load_algebra(args) -> AffineAlgebra:
    if getattr(args, "json", None):
        with open(args.json) as fh:
            return algebra_from_json(fh.read())
    return algebra_from_name(args.algebra)


def _weight_arg(alg, text) -> Weight:
    return weight_from_pairings(alg, text.split(","))


def _cmd_algebra(args) -> int:
    alg = _load_algebra(args)
    rho = weyl_vector(alg)
    info = {
        "name": alg.name, "rank": alg.rank,
        "marks": list(alg.marks), "comarks": list(alg.comarks),
        "coxeter": alg.coxeter, "dual_coxeter": alg.dual_coxeter,
        "gram_hstar": [[str(x) for x in row] for row in alg.gram_hstar],
        "weyl_vector": {"level": str(rho.k), "z": [str(x) for x in rho.z]},
    }
    print(json.dumps(info, indent=2))
    return 0


def _cmd_mult(args) -> int:
    from .highestweight import character_series_oracle, freudenthal_table
    alg = _load_algebra(args)
    lam = _weight_arg(alg, args.pairings)
    builder = freudenthal_table if args.method == "freudenthal" \
        else character_series_oracle
    table = builder(alg, lam, args.depth)
    if args.csv:
        table.to_csv(args.csv)
    print(json.dumps({"entries": len(table.entries), "depth": args.depth,
                      "total": table.total()}))
    return 0


def _cmd_tensor(args) -> int:
    from .highestweight import tensor_power_table
    alg = _load_algebra(args)
    om = _weight_arg(alg, args.pairings)
    table = tensor_power_table(alg, om, args.n, args.depth)
    if args.csv:
        table.to_csv(args.csv)
    print(json.dumps({"entries": len(table.entries), "depth": args.depth,
                      "total": table.total()}))
    return 0


def _cmd_characters(args) -> int:
    alg = _load_algebra(args)
    s = characters.rho_specialization(alg, args.n)
    if args.action == "eval":
        lam = _weight_arg(alg, args.pairings)
        r = characters.eval_character(alg, lam, s, eps=args.eps)
        out = {"value": r.value, "tail_bound": r.tail_bound,
               "depth": r.truncation_depth}
    elif args.action == "theta":
        lam = _weight_arg(alg, args.pairings)
        r = characters.eval_theta(alg, lam, s, eps=args.eps)
        out = {"value": r.value, "tail_bound": r.tail_bound,
               "depth": r.truncation_depth}
    else:
        res = characters.denominator_residual(alg, s, args.depth)
        out = {"residual": res, "depth": args.depth}
    print(json.dumps(out))
    return 0


def _cmd_chain(args) -> int:
    alg = _load_algebra(args)
    s = characters.rho_specialization(alg, args.n)
    omega = Weight.make(alg.dual_coxeter, (0,) * alg.rank, 0)
    if args.action == "simulate":
        start = _weight_arg(alg, args.start) if args.start \
            else Weight.make(alg.dual_coxeter, (0,) * alg.rank, 0)
        traj = chain.simulate_chain(alg, start, omega, s, args.steps,
                                    args.seed, depth=args.depth)
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "level"]
                            + [f"z{i+1}" for i in range(alg.rank)] + ["b"])
            for i, w in enumerate(traj):
                writer.writerow([i, str(w.k)] + [str(x) for x in w.z]
                                + [str(w.b)])
        print(json.dumps({"steps": args.steps, "out": args.out}))
        return 0
    # verify-reflection
    lam0 = _weight_arg(alg, args.start) if args.start else alg.Lambda0()
    reports = []
    worst = 0.0
    for level_states in [chain.dominant_states(
            alg, int(lam0.k) + args.steps * alg.dual_coxeter)]:
        for b0 in level_states:
            if chain.pbar_power(alg, omega, s, args.steps, lam0, b0, 40) <= 0:
                continue
            res = chain.reflection_discrete_residual(
                alg, omega, s, args.steps, lam0, b0, args.depth)
            worst = max(worst, res)
            reports.append({"beta0": [str(x) for x in b0.z], "residual": res})
    print(json.dumps({"steps": args.steps, "worst": worst,
                      "cases": reports}, indent=2))
    return 0 if worst < GOLDEN.reflection_rtol else 1


def _cmd_diffusion(args) -> int:
    alg = _load_algebra(args)
    rho = weyl_vector(alg)
    if args.action == "sample":
        x0 = diffusion.weight_to_point(alg, rho)
        paths = diffusion.sample_paths(alg, x0, args.horizon, args.dt,
                                       args.paths, args.seed,
                                       conditioned=args.conditioned)
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["path", "t", "s"]
                            + [f"z{i+1}" for i in range(alg.rank)])
            for j, path in enumerate(paths):
                for k, pt in enumerate(path.points):
                    writer.writerow([j, k * path.dt, pt.s] + list(pt.z))
        print(json.dumps({"paths": args.paths, "out": args.out}))
        return 0
    rng = np.random.default_rng(args.seed if args.seed is not None else 0)
    if args.action == "survival":
        pt = diffusion.weight_to_point(alg, rho.scale(Fraction(str(args.scale))))
        v, tail = diffusion.survival(alg, pt)
        print(json.dumps({"value": v, "tail_bound": tail}))
        return 0
    if args.action == "verify-wonpt":
        from .weyl import enumerate_bounded
        worst = 0.0
        alpha_norm = math.sqrt(float(alg.finite_norm2(
            [Fraction(1)] + [Fraction(0)] * (alg.rank - 1))))
        els = list(enumerate_bounded(alg, GOLDEN.wonpt_radius_alpha1 * alpha_norm))
        for _ in range(GOLDEN.wonpt_samples):
            t = 0.2 + 1.8 * rng.random()
            x = Weight.make(Fraction(rng.integers(1, 5)),
                            [Fraction(int(rng.integers(-8, 8)), 4)
                             for _ in range(alg.rank)],
                            Fraction(int(rng.integers(-8, 8)), 4))
            y = Weight.make(x.k + Fraction(str(round(t, 6))) * alg.dual_coxeter,
                            [Fraction(int(rng.integers(-8, 8)), 4)
                             for _ in range(alg.rank)],
                            Fraction(int(rng.integers(-8, 8)), 4))
            t = float(y.k - x.k) / alg.dual_coxeter
            w = els[int(rng.integers(0, len(els)))]
            worst = max(worst, diffusion.wonpt_residual(alg, x, y, t, w))
        print(json.dumps({"worst": worst, "samples": GOLDEN.wonpt_samples}))
        return 0 if worst < GOLDEN.wonpt_rtol else 1
    if args.action == "verify-harmonic":
        from .weyl import enumerate_bounded
        els = list(enumerate_bounded(alg, 3.0))[:GOLDEN.harmonic_elements]
        worst = 0.0
        for w in els:
            for _ in range(3):
                p = diffusion.SpaceTimePoint(
                    1.0 + 3.0 * rng.random(), rng.normal(0, 1, alg.rank))
                worst = max(worst, abs(diffusion.harmonic_residual(
                    alg, w, p, GOLDEN.harmonic_step)))
        print(json.dumps({"worst": worst}))
        return 0 if worst < GOLDEN.harmonic_rtol else 1
    # verify-reflection (continuous)
    worst = 0.0
    for _ in range(GOLDEN.creflect_samples):
        t = 0.3 + 1.5 * rng.random()
        s0 = 1.0 + 2.0 * rng.random()
        x = diffusion.SpaceTimePoint(s0, None)
        zx = _random_interior(alg, s0, rng)
        x = diffusion.SpaceTimePoint(s0, zx)
        sy = s0 + t * alg.dual_coxeter
        y = diffusion.SpaceTimePoint(sy, _random_interior(alg, sy, rng))
        d1 = diffusion.reflected_density(alg, x, y, t, "drifted-by-x")
        d2 = diffusion.reflected_density(alg, x, y, t, "drifted-by-y")
        if max(abs(d1), abs(d2)) > 1e-280:
            worst = max(worst, abs(d1 - d2) / max(abs(d1), abs(d2)))
    print(json.dumps({"worst": worst}))
    return 0 if worst < GOLDEN.creflect_rtol else 1


def _random_interior(alg, s, rng, margin_frac=0.15):
    """Random point of the level-s chamber slice, away from the walls."""
    frame = diffusion._frame(alg)
    for _ in range(1000):
        z = rng.normal(0, max(s / 2.0, 0.5), alg.rank)
        pt = diffusion.SpaceTimePoint(float(s), z)
        inside, margin = diffusion.chamber_test(alg, pt)
        if inside and margin > margin_frac * s / (alg.rank + 1):
            return z
    raise RuntimeError("could not sample an interior point")


def _cmd_experiment(args) -> int:
    if args.seed is None and not args.config:
        print("error: --seed (or a config carrying one) is required for "
              "stochastic commands", file=sys.stderr)
        return 2
    cfg = ExperimentConfig.from_json(open(args.config).read()) if args.config \
        else ExperimentConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    if args.samples:
        cfg.samples = args.samples
    if args.n:
        cfg.spec_n = args.n
    if args.kind == "walk":
        cfg.spec_n = cfg.spec_n if args.n else GOLDEN.walk_n
        cfg.samples = cfg.samples if args.samples else GOLDEN.walk_samples
        cfg.time_grid = (GOLDEN.walk_t,)
        report = scaling_walk_experiment(cfg)
    elif args.kind == "chain":
        report = scaling_chain_experiment(cfg)
    else:
        report = calibrate_chain_harness(cfg, n_runs=args.runs)
    text = report.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        if args.csv:
            report.write_csv(args.csv)
    print(text)
    return 0 if report.passed else 1


def _cmd_verify_all(args) -> int:
    from . import acceptance
    results = acceptance.run_all(algebra=args.algebra, fast=args.fast)
    failed = [r for r in results if not r.passed]
    for r in results:
        print(r.line())
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


def run_cli(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="affinewalks",
        description="affine highest-weight chains and chamber diffusions")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_algebra(p):
        p.add_argument("--algebra", default="A1~")
        p.add_argument("--json", help="JSON file with {rank, matrix}")

    p = sub.add_parser("algebra", help="derived Cartan data")
    add_algebra(p)
    p.set_defaults(func=_cmd_algebra)

    p = sub.add_parser("mult", help="weight multiplicity table")
    add_algebra(p)
    p.add_argument("--pairings", required=True,
                   help="coroot pairings q0,q1,... of the highest weight")
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--method", choices=["series", "freudenthal"],
                   default="series")
    p.add_argument("--csv")
    p.set_defaults(func=_cmd_mult)

    p = sub.add_parser("tensor", help="tensor power multiplicity table")
    add_algebra(p)
    p.add_argument("--pairings", required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--csv")
    p.set_defaults(func=_cmd_tensor)

    p = sub.add_parser("characters", help="numeric character evaluation")
    p.add_argument("action", choices=["eval", "theta", "denominator"])
    add_algebra(p)
    p.add_argument("--pairings", default="1,0")
    p.add_argument("--n", type=int, default=1, help="rho/n specialization")
    p.add_argument("--eps", type=float, default=1e-10)
    p.add_argument("--depth", type=int, default=GOLDEN.denominator_depth)
    p.set_defaults(func=_cmd_characters)

    p = sub.add_parser("chain", help="dominant-weight Markov chain")
    p.add_argument("action", choices=["simulate", "verify-reflection"])
    add_algebra(p)
    p.add_argument("--n", type=int, required=True, help="rho/n specialization")
    p.add_argument("--steps", type=int, default=5)
    p.add_argument("--seed", type=int)
    p.add_argument("--depth", type=int, default=60)
    p.add_argument("--start", help="coroot pairings of the start weight")
    p.add_argument("--out", default="chain.csv")
    p.set_defaults(func=_cmd_chain_dispatch)

    p = sub.add_parser("diffusion", help="space-time chamber diffusion")
    p.add_argument("action", choices=["sample", "survival", "verify-reflection",
                                      "verify-wonpt", "verify-harmonic"])
    add_algebra(p)
    p.add_argument("--horizon", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--paths", type=int, default=10)
    p.add_argument("--seed", type=int)
    p.add_argument("--conditioned", action="store_true")
    p.add_argument("--scale", default="1", help="start at scale*rho")
    p.add_argument("--out", default="paths.csv")
    p.set_defaults(func=_cmd_diffusion_dispatch)

    p = sub.add_parser("experiment", help="scaling-limit experiments")
    p.add_argument("kind", choices=["walk", "chain", "calibrate"])
    p.add_argument("--config", help="JSON ExperimentConfig")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--runs", type=int, default=None)
    p.add_argument("--out")
    p.add_argument("--csv")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("verify-all", help="run the acceptance checks")
    p.add_argument("--algebra", default="A1~")
    p.add_argument("--fast", action="store_true")
    p.set_defaults(func=_cmd_verify_all)

    args = parser.parse_args(argv)
    return args.func(args)


def _cmd_chain_dispatch(args) -> int:
    if args.action == "simulate" and args.seed is None:
        print("error: --seed is required for stochastic commands",
              file=sys.stderr)
        return 2
    return _cmd_chain(args)


def _cmd_diffusion_dispatch(args) -> int:
    if args.action in ("sample",) and args.seed is None:
        print("error: --seed is required for stochastic commands",
              file=sys.stderr)
        return 2
    return _cmd_diffusion(args)


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
