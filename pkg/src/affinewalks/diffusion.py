"""Space-time Gaussian dynamics in the affine Weyl chamber.

Points carry a "time-like" level coordinate ``s`` (the Lambda0 component,
advancing deterministically at rate ``h_vee``) and a spatial part ``z`` in
a fixed orthonormal basis of the finite weight space (Cholesky-reduced from
root coordinates, chosen once per algebra).  The module provides:

* the chamber membership test with its margin,
* free and drifted heat kernels on level slices,
* the survival function (alternating Weyl sum) and its gradient,
* reflected densities for the killed process (three equivalent forms),
* Euler-Maruyama sampling of the drifted and of the conditioned process,
  with recursive near-boundary step halving,
* finite-difference verifiers for the harmonic identity and for the
  translation-covariance identity of the free kernel.

All Weyl sums are truncated by translation norm with the certified
Gaussian shell bound from :mod:`affinewalks.characters`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .algebra import AffineAlgebra, Weight, weyl_vector
from .characters import gaussian_lattice_tail
from .weyl import (AffineWeylElement, apply, finite_group, lattice_basis,
                   translation_vectors)

__all__ = [
    "SpaceTimePoint",
    "SpaceTimePath",
    "PathBatch",
    "chamber_test",
    "weight_to_point",
    "heat_density",
    "survival",
    "survival_gradient",
    "reflected_density",
    "wonpt_residual",
    "harmonic_residual",
    "sample_paths",
    "sample_path_batch",
    "OutsideChamberError",
]


class OutsideChamberError(ValueError):
    pass


@dataclass
class SpaceTimePoint:
    s: float
    z: np.ndarray

    def copy(self) -> "SpaceTimePoint":
        return SpaceTimePoint(self.s, self.z.copy())


@dataclass
class SpaceTimePath:
    points: list[SpaceTimePoint]
    dt: float
    seed: int
    exited_at: float | None = None


@dataclass
class PathBatch:
    """Vectorized trajectories: ``z[k]`` holds all paths at grid time k*dt."""

    times: np.ndarray
    s: np.ndarray                 # level coordinate per grid time
    z: np.ndarray | None          # (n_times, n_paths, l) when recorded
    exit_times: np.ndarray        # +inf where no exit observed
    aborted: np.ndarray           # conditioned paths that hit dt_min
    dt: float
    seed: int

    def exit_fraction(self, horizon: float) -> float:
        ok = ~self.aborted
        return float(np.mean(self.exit_times[ok] <= horizon))


# -- orthonormal frame -------------------------------------------------------------


class _Frame:
    def __init__(self, alg: AffineAlgebra):
        l = alg.rank
        g = np.array([[float(alg.finite_gram[i][j]) for j in range(l)]
                      for i in range(l)])
        self.L = np.linalg.cholesky(g)       # g = L @ L.T
        self.LT = self.L.T
        self.LT_inv = np.linalg.inv(self.LT)
        rho = weyl_vector(alg)
        self.rho_o = self.LT @ np.array([float(x) for x in rho.z])
        self.hv = float(alg.dual_coxeter)
        a = alg.cartan.entries
        rows = np.array([[float(a[i][j]) for j in range(1, l + 1)]
                         for i in range(l + 1)])
        self.pairing = rows @ self.LT_inv    # coroot pairings of the z part
        self.l = l

    def to_orth(self, zfrac) -> np.ndarray:
        return self.LT @ np.array([float(x) for x in zfrac])


@lru_cache(maxsize=None)
def _frame(alg: AffineAlgebra) -> _Frame:
    return _Frame(alg)


def weight_to_point(alg: AffineAlgebra, w: Weight) -> SpaceTimePoint:
    """Drop the delta coordinate and move to orthonormal spatial coordinates."""
    f = _frame(alg)
    return SpaceTimePoint(float(w.k), f.to_orth(w.z))


def chamber_test(alg: AffineAlgebra, p: SpaceTimePoint) -> tuple[bool, float]:
    """All rank+1 coroot pairings nonnegative; margin is the smallest one."""
    f = _frame(alg)
    vals = f.pairing @ p.z
    vals[0] += p.s
    margin = float(vals.min())
    return margin >= 0.0, margin


# -- Weyl terms for the alternating sums --------------------------------------------


@dataclass
class _Term:
    sign: float
    alpha: np.ndarray             # translation in orthonormal coordinates
    rot: np.ndarray               # finite part as an orthogonal matrix
    wrho: np.ndarray              # finite part of w(rho)
    b_wrho: float                 # delta coordinate of w(rho)
    cw: np.ndarray                # wrho - rho
    alpha_norm2: float


@lru_cache(maxsize=None)
def _weyl_terms(alg: AffineAlgebra, radius_key: int) -> tuple[_Term, ...]:
    """All terms with translation norm <= radius_key (integer-quantized)."""
    f = _frame(alg)
    radius = float(radius_key)
    basis = lattice_basis(alg)
    terms = []
    for coeffs in translation_vectors(alg, radius):
        z_alpha = [sum(coeffs[i] * basis[i][j] for i in range(alg.rank))
                   for j in range(alg.rank)]
        alpha_o = f.to_orth(z_alpha)
        for w in finite_group(alg):
            m = np.array([[float(w.matrix[i][j]) for j in range(alg.rank)]
                          for i in range(alg.rank)])
            rot = f.LT @ m @ f.LT_inv
            wrho = rot @ f.rho_o + f.hv * alpha_o
            b_wrho = -(float((rot @ f.rho_o) @ alpha_o)
                       + 0.5 * float(alpha_o @ alpha_o) * f.hv)
            terms.append(_Term(
                sign=float(w.sign), alpha=alpha_o, rot=rot, wrho=wrho,
                b_wrho=b_wrho, cw=wrho - f.rho_o,
                alpha_norm2=float(alpha_o @ alpha_o)))
    return tuple(terms)


def _terms_for(alg: AffineAlgebra, s_min: float, z_norm: float,
               rtol: float) -> tuple[tuple[_Term, ...], float]:
    """Terms plus certified bound on everything beyond the chosen radius.

    The survival-type summand obeys ``|term| <= exp(const + b r - a r^2)``
    with ``a = s_min*h_vee/2``; the radius grows until the lattice tail
    bound sits below ``rtol`` in those units.
    """
    if s_min <= 0:
        raise OutsideChamberError(
            "alternating sums need a positive level coordinate")
    f = _frame(alg)
    a = 0.5 * s_min * f.hv
    rho_norm = float(np.linalg.norm(f.rho_o))
    b = s_min * rho_norm + f.hv * z_norm
    const = 2.0 * z_norm * rho_norm
    group = len(finite_group(alg))
    radius = max(2.0, b / a + 2.0)
    while True:
        tail = group * math.exp(const) * gaussian_lattice_tail(alg, a, b, radius)
        if tail <= rtol:
            return _weyl_terms(alg, int(math.ceil(radius))), tail
        radius += 1.0
        if radius > 500:
            raise RuntimeError("Weyl sum radius cap exceeded")


# -- survival function ---------------------------------------------------------------


def survival(alg: AffineAlgebra, p: SpaceTimePoint, eps: float = 1e-12):
    """Probability of never leaving the chamber, for the drifted process:
    the alternating sum of ``exp((x, w(rho)-rho))`` over the Weyl group.

    Returns ``(value, tail_bound)``.  On the boundary the truncated sum
    cancels to within the tail bound; in the interior the value lies in
    (0, 1] up to the bound.
    """
    inside, margin = chamber_test(alg, p)
    if not inside:
        raise OutsideChamberError(f"point outside the chamber (margin {margin:.3g})")
    terms, tail = _terms_for(alg, p.s, float(np.linalg.norm(p.z)), eps)
    total = 0.0
    for t in terms:
        total += t.sign * math.exp(p.s * t.b_wrho + float(t.cw @ p.z))
    return total, tail


def survival_gradient(alg: AffineAlgebra, p: SpaceTimePoint,
                      eps: float = 1e-12) -> tuple[float, np.ndarray]:
    """Termwise gradient (ds, dz) of the survival sum."""
    inside, _ = chamber_test(alg, p)
    if not inside:
        raise OutsideChamberError("gradient needs an interior point")
    # coefficient growth is linear in the translation radius; one extra
    # order of magnitude on the tail keeps the differentiated sum certified
    terms, _ = _terms_for(alg, p.s, float(np.linalg.norm(p.z)), eps * 1e-2)
    ds = 0.0
    dz = np.zeros_like(p.z)
    for t in terms:
        e = t.sign * math.exp(p.s * t.b_wrho + float(t.cw @ p.z))
        ds += e * t.b_wrho
        dz += e * t.cw
    return ds, dz


# -- heat kernels --------------------------------------------------------------------


def heat_density(alg: AffineAlgebra, x: SpaceTimePoint, y: SpaceTimePoint,
                 t: float, drifted: bool) -> float:
    """Gaussian transition density on the level slice ``y.s = x.s + t*h_vee``;
    zero if the slice constraint fails beyond a 1e-9 tolerance."""
    if t <= 0:
        raise ValueError("time must be positive")
    f = _frame(alg)
    if abs(y.s - x.s - t * f.hv) > 1e-9:
        return 0.0
    disp = y.z - x.z
    if drifted:
        disp = disp - t * f.rho_o
    return math.exp(-float(disp @ disp) / (2 * t)) / (2 * math.pi * t) ** (f.l / 2)


def reflected_density(alg: AffineAlgebra, x: SpaceTimePoint, y: SpaceTimePoint,
                      t: float, mode: str = "drifted-by-x",
                      rtol: float = 1e-12) -> float:
    """Density of the drifted process killed at the chamber wall.

    modes:  ``drifted-by-x``  sum_w det(w) e^{(w(x)-x, rho)} p^rho_t(bar wx, y)
            ``drifted-by-y``  sum_w det(w) e^{(y-w(y), rho)} p^rho_t(x, bar wy)
            ``undrifted``     rho replaced by h_vee*Lambda0 and p^0 (free kernel
                              form of the same reflection argument)
    """
    f = _frame(alg)
    if abs(y.s - x.s - t * f.hv) > 1e-9:
        raise ValueError("level slice mismatch: need y.s = x.s + t*h_vee")
    base = x if mode != "drifted-by-y" else y
    terms, _ = _terms_for(alg, base.s, float(np.linalg.norm(base.z)),
                          rtol * heat_density_scale(alg, t))
    norm = 1.0 / (2 * math.pi * t) ** (f.l / 2)
    total = 0.0
    for tm in terms:
        if mode == "drifted-by-x":
            wx = tm.rot @ x.z + x.s * tm.alpha
            b_wx = -(float((tm.rot @ x.z) @ tm.alpha)
                     + 0.5 * tm.alpha_norm2 * x.s)
            pref = b_wx * f.hv + float((wx - x.z) @ f.rho_o)
            disp = y.z - t * f.rho_o - wx
        elif mode == "drifted-by-y":
            wy = tm.rot @ y.z + y.s * tm.alpha
            b_wy = -(float((tm.rot @ y.z) @ tm.alpha)
                     + 0.5 * tm.alpha_norm2 * y.s)
            pref = -b_wy * f.hv - float((wy - y.z) @ f.rho_o)
            disp = wy - t * f.rho_o - x.z
        elif mode == "undrifted":
            wx = tm.rot @ x.z + x.s * tm.alpha
            b_wx = -(float((tm.rot @ x.z) @ tm.alpha)
                     + 0.5 * tm.alpha_norm2 * x.s)
            pref = b_wx * f.hv
            disp = y.z - wx
        else:
            raise ValueError(f"unknown mode {mode!r}")
        total += tm.sign * math.exp(pref - float(disp @ disp) / (2 * t)) * norm
    return total


def heat_density_scale(alg: AffineAlgebra, t: float) -> float:
    return 1.0 / (2 * math.pi * t) ** (_frame(alg).l / 2)


# -- identity verifiers --------------------------------------------------------------


def wonpt_residual(alg: AffineAlgebra, x: Weight, y: Weight, t: float,
                   w: AffineWeylElement) -> float:
    """Log-space gap in the translation covariance of the free kernel:

    ``p0_t(bar wx, bar wy) = e^{(w(y-x)-(y-x), hv*Lambda0)} p0_t(bar x, bar y)``.

    Exact weight arithmetic feeds both sides; the residual is the absolute
    difference of the two log densities divided by max(1, |log lhs|).
    """
    f = _frame(alg)
    if abs(float(y.k - x.k) - t * f.hv) > 1e-9:
        raise ValueError("level consistency (y|delta) = (x|delta) + t*h_vee required")
    wx, wy = apply(alg, w, x), apply(alg, w, y)

    def log_p0(a: Weight, b: Weight) -> float:
        za = f.to_orth(a.z)
        zb = f.to_orth(b.z)
        disp = zb - za
        return (-float(disp @ disp) / (2 * t)
                - 0.5 * f.l * math.log(2 * math.pi * t))

    lhs = log_p0(wx.bar(), wy.bar())
    w_factor = (wy - wx) - (y - x)
    factor = f.hv * float(w_factor.b)
    rhs = factor + log_p0(x.bar(), y.bar())
    return abs(lhs - rhs) / max(1.0, abs(lhs))


def harmonic_residual(alg: AffineAlgebra, w: AffineWeylElement,
                      p: SpaceTimePoint, step: float) -> float:
    """Central finite differences of the generator applied to
    ``g_w(s, z) = exp((s*Lambda0 + z, w(rho) - rho))``, normalized by g_w(p).

    The generator is ``Laplacian/2 + h_vee d/ds + (rho-drift) . grad``; the
    exact identity makes the residual O(step^2).
    """
    f = _frame(alg)
    rho = weyl_vector(alg)
    wrho = apply(alg, w, rho)
    diff = wrho - rho
    b_w = float(diff.b)
    c_w = f.to_orth(diff.z)

    def g(s, z):
        return math.exp(s * b_w + float(c_w @ z))

    g0 = g(p.s, p.z)
    lap = 0.0
    drift = 0.0
    for i in range(f.l):
        e = np.zeros(f.l)
        e[i] = step
        gp, gm = g(p.s, p.z + e), g(p.s, p.z - e)
        lap += (gp - 2 * g0 + gm) / step**2
        drift += f.rho_o[i] * (gp - gm) / (2 * step)
    dt_term = f.hv * (g(p.s + step, p.z) - g(p.s - step, p.z)) / (2 * step)
    return (0.5 * lap + dt_term + drift) / g0


# -- sampling ------------------------------------------------------------------------


def _margins(f: _Frame, s: float, z: np.ndarray) -> np.ndarray:
    vals = z @ f.pairing.T
    vals[:, 0] += s
    return vals.min(axis=1)


class _TermArrays:
    """Stacked Weyl-term coefficients for vectorized survival sums."""

    def __init__(self, terms):
        self.signs = np.array([t.sign for t in terms])
        self.b = np.array([t.b_wrho for t in terms])
        self.C = np.stack([t.cw for t in terms])

    def survival(self, s: float, z: np.ndarray) -> np.ndarray:
        e = np.exp(s * self.b[None, :] + z @ self.C.T)
        return e @ self.signs

    def drift(self, f: _Frame, s: float, z: np.ndarray) -> np.ndarray:
        e = np.exp(s * self.b[None, :] + z @ self.C.T) * self.signs[None, :]
        h = e.sum(axis=1)
        grad = e @ self.C
        h = np.where(h <= 0, np.nan, h)
        return f.rho_o[None, :] + grad / h[:, None]


_TERM_ARRAYS: dict[tuple, _TermArrays] = {}


def _term_arrays(alg: AffineAlgebra, s_min: float, z_norm: float,
                 rtol: float) -> _TermArrays:
    terms, _ = _terms_for(alg, s_min, z_norm, rtol)
    key = (alg.cartan.entries, len(terms))
    hit = _TERM_ARRAYS.get(key)
    if hit is None:
        hit = _TermArrays(terms)
        _TERM_ARRAYS[key] = hit
    return hit


def sample_path_batch(alg: AffineAlgebra, x0: SpaceTimePoint, t_max: float,
                      dt: float, n_paths: int, seed: int,
                      conditioned: bool, record: bool = False,
                      record_times: tuple[float, ...] = ()) -> PathBatch:
    """Euler-Maruyama batch with recursive near-boundary step halving.

    The level coordinate advances deterministically by ``h_vee * dt``.
    When a not-yet-exited path's chamber margin drops below
    ``10*sqrt(dt_local)`` the step is retried as two halves, down to
    ``dt/1024``.  A conditioned path still that close to the wall at the
    floor resolution is aborted and flagged (discretization-failure
    diagnostic); an unconditioned path records its first exit time and
    keeps evolving (exit is a stopping time of the free process, not an
    absorbing state).
    """
    f = _frame(alg)
    inside, margin = chamber_test(alg, x0)
    if conditioned and margin <= 0:
        raise OutsideChamberError("conditioned sampling needs an interior start")
    rng = np.random.Generator(np.random.Philox(seed))
    n_steps = int(round(t_max / dt))
    dt_min = dt / 1024
    times = np.arange(n_steps + 1) * dt
    svals = x0.s + times * f.hv

    z = np.tile(x0.z, (n_paths, 1))
    exit_times = np.full(n_paths, np.inf)
    aborted = np.zeros(n_paths, dtype=bool)

    rec_idx = {int(round(t / dt)) for t in record_times}
    recorded = {0: z.copy()} if (record or 0 in rec_idx) else {}

    # term arrays are refreshed only when the batch outgrows the radius
    # they were certified for (the certificate is monotone in |z|)
    arrays_cache = {"zn": -1.0, "arrays": None}

    def drift_for(s_now, zi):
        znorm = float(np.abs(zi).max()) * math.sqrt(f.l)
        if arrays_cache["arrays"] is None or znorm > arrays_cache["zn"]:
            arrays_cache["arrays"] = _term_arrays(alg, x0.s, znorm + 2.0, 1e-12)
            arrays_cache["zn"] = znorm + 2.0
        return arrays_cache["arrays"].drift(f, s_now, zi)

    def advance(idx, s_now, t_now, dt_loc):
        """One step of size dt_loc for the index set (recursive halving)."""
        if idx.size == 0:
            return
        zi = z[idx]
        fresh = np.isinf(exit_times[idx])
        margins = _margins(f, s_now, zi)
        careful = fresh & (margins < 10.0 * math.sqrt(dt_loc))
        if dt_loc > dt_min and np.any(careful):
            near, far = idx[careful], idx[~careful]
            advance(far, s_now, t_now, dt_loc)
            advance(near, s_now, t_now, dt_loc / 2)
            advance(near, s_now + f.hv * dt_loc / 2, t_now + dt_loc / 2,
                    dt_loc / 2)
            return
        if conditioned:
            drift = drift_for(s_now, zi)
            nanmask = np.isnan(drift).any(axis=1)
            drift = np.nan_to_num(drift)
        else:
            drift = np.broadcast_to(f.rho_o, zi.shape)
            nanmask = np.zeros(len(zi), dtype=bool)
        znew = zi + drift * dt_loc + rng.normal(0.0, math.sqrt(dt_loc), zi.shape)
        z[idx] = znew
        out = (_margins(f, s_now + f.hv * dt_loc, znew) < 0) | nanmask
        newly = out & np.isinf(exit_times[idx])
        if not np.any(newly):
            return
        bad = idx[newly]
        if conditioned:
            if dt_loc <= dt_min:
                aborted[bad] = True
                exit_times[bad] = t_now + dt_loc
            else:
                z[bad] = zi[newly]
                advance(bad, s_now, t_now, dt_loc / 2)
                advance(bad, s_now + f.hv * dt_loc / 2, t_now + dt_loc / 2,
                        dt_loc / 2)
        else:
            exit_times[bad] = t_now + dt_loc

    # without recording, an exited free path has nothing left to contribute
    freeze_exited = (not conditioned) and not record and not rec_idx
    for k in range(n_steps):
        live = ~aborted
        if freeze_exited:
            live &= np.isinf(exit_times)
        advance(np.flatnonzero(live), float(svals[k]), float(times[k]), dt)
        if record or (k + 1) in rec_idx:
            recorded[k + 1] = z.copy()

    zrec = None
    if record:
        zrec = np.stack([recorded[k] for k in range(n_steps + 1)])
    elif rec_idx:
        zrec = {k: v for k, v in recorded.items()}
    return PathBatch(times=times, s=svals, z=zrec, exit_times=exit_times,
                     aborted=aborted, dt=dt, seed=seed)


def sample_paths(alg: AffineAlgebra, x0: SpaceTimePoint, t_max: float,
                 dt: float, n_paths: int, seed: int,
                 conditioned: bool) -> list[SpaceTimePath]:
    """Fully recorded trajectories (list form); heavy for large batches,
    use :func:`sample_path_batch` for statistics over many paths."""
    batch = sample_path_batch(alg, x0, t_max, dt, n_paths, seed, conditioned,
                              record=True)
    out = []
    for j in range(n_paths):
        pts = [SpaceTimePoint(float(batch.s[k]), batch.z[k][j])
               for k in range(len(batch.times))]
        exited = batch.exit_times[j]
        out.append(SpaceTimePath(
            points=pts, dt=dt, seed=seed,
            exited_at=None if math.isinf(exited) else float(exited)))
    return out
