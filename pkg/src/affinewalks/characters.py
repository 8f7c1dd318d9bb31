"""Numerical evaluation of characters, theta functions and the alternating
denominator sum at specializations with positive delta pairing.

Evaluation points are weights ``p`` (the image of a Cartan element under
the form), so ``<mu, h> = (mu | p)``.  Everything converges on the half
space ``(delta | p) > 0``; the rate degrades as that pairing approaches
zero, which for the ``rho/n`` family means large ``n``.

Two tail-bound regimes are used.  Character series have no elementary
closed-form growth envelope, so the discarded mass is bounded by a fitted
geometric envelope of the observed layer masses with a factor-two safety
margin.  Lattice (theta / Weyl-orbit) sums decay like a Gaussian in the
translation norm and get a fully certified shell-count comparison bound.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .algebra import (AffineAlgebra, Weight, classify_weight, inner_product,
                      weyl_vector)
from .highestweight import (alternant_terms, character_series_oracle,
                            denominator_product_series)
from .weyl import finite_apply, finite_group, lattice_basis, translation_vectors

__all__ = [
    "Specialization",
    "EvalResult",
    "SpecializationError",
    "ConvergenceError",
    "rho_specialization",
    "delta_pairing",
    "eval_character",
    "eval_theta",
    "denominator_residual",
    "weyl_alternating_value",
    "character_ratio",
    "gaussian_lattice_tail",
]


class SpecializationError(ValueError):
    """Evaluation point outside the convergence half-space."""


class ConvergenceError(RuntimeError):
    """Requested accuracy not reachable within the depth/radius caps."""


@dataclass(frozen=True)
class Specialization:
    """Evaluation point ``p`` with ``<mu,h> = (mu|p)``."""

    point: Weight
    description: str = ""


@dataclass
class EvalResult:
    value: float
    truncation_depth: int
    tail_bound: float
    log_value: float

    @property
    def rel_bound(self) -> float:
        return self.tail_bound / self.value if self.value else math.inf


def rho_specialization(alg: AffineAlgebra, n: int) -> Specialization:
    """The ``rho/n`` family; its delta pairing is ``h_vee / n``."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    return Specialization(point=weyl_vector(alg).scale(Fraction(1, n)),
                          description=f"rho/{n}")


def delta_pairing(alg: AffineAlgebra, s: Specialization) -> Fraction:
    return inner_product(alg, alg.delta(), s.point)


def _require_convergent(alg: AffineAlgebra, s: Specialization) -> Fraction:
    c = delta_pairing(alg, s)
    if c <= 0:
        raise SpecializationError(
            f"(delta|point) = {c} <= 0: character series does not converge")
    if c < Fraction(alg.dual_coxeter, 50):
        warnings.warn(
            "specialization is close to the critical line; series "
            "truncations converge slowly (rho/n with n > 50)",
            RuntimeWarning, stacklevel=3)
    return c


def _finite_dot_float(alg: AffineAlgebra, z1, z2) -> float:
    return float(alg.finite_inner([Fraction(x) for x in z1],
                                  [Fraction(x) for x in z2]))


# -- certified Gaussian lattice tail ------------------------------------------------


@lru_cache(maxsize=None)
def _lattice_geometry(alg: AffineAlgebra):
    basis = lattice_basis(alg)
    l = alg.rank
    gram = [[float(alg.finite_inner([Fraction(x) for x in basis[i]],
                                    [Fraction(x) for x in basis[j]]))
             for j in range(l)] for i in range(l)]
    det = 1.0
    work = [row[:] for row in gram]
    for c in range(l):
        piv = work[c][c]
        det *= piv
        for r in range(c + 1, l):
            f = work[r][c] / piv
            for j in range(c, l):
                work[r][j] -= f * work[c][j]
            det *= 1.0
    covol = math.sqrt(det)
    rho_f = 0.5 * sum(math.sqrt(gram[i][i]) for i in range(l))
    ball_vol = math.pi ** (l / 2) / math.gamma(l / 2 + 1)
    return covol, rho_f, ball_vol


def gaussian_lattice_tail(alg: AffineAlgebra, a: float, b: float, start: float) -> float:
    """Upper bound on ``sum_{alpha in M, |alpha| >= start} exp(-a|alpha|^2 + b|alpha|)``.

    Shells ``[j, j+1)`` are counted by a volume bound and each point is
    dominated by the shell's left endpoint, valid once the integrand is
    decreasing there.  Returns ``inf`` when ``start`` is too small for the
    bound to apply; the caller should then enlarge its explicit sum.
    """
    if a <= 0:
        return math.inf
    covol, rho_f, ball_vol = _lattice_geometry(alg)
    l = alg.rank
    j = max(int(math.floor(start)), 0)
    if j < b / (2 * a) + 1:
        return math.inf

    def count(r):
        return ball_vol * (r + 1 + rho_f) ** l / covol

    term = count(j) * math.exp(-a * j * j + b * j)
    nxt = count(j + 1) * math.exp(-a * (j + 1) ** 2 + b * (j + 1))
    if term <= 0:
        return 0.0
    ratio = nxt / term
    if ratio >= 1.0:
        return math.inf
    return term / (1.0 - ratio)


# -- character evaluation ------------------------------------------------------------


def _layer_masses(alg: AffineAlgebra, lam: Weight, s: Specialization,
                  depth: int, c: float):
    table = character_series_oracle(alg, lam, depth)
    p = s.point
    masses = [0.0] * (depth + 1)
    for (d, m), v in table.entries.items():
        masses[d] += v * math.exp(-d * c - _finite_dot_float(alg, m, p.z))
    return masses


def _envelope_tail(masses, depth) -> tuple[float, float]:
    """Fitted geometric envelope: (q_hat, tail_bound_relative_units)."""
    window = max(3, depth // 3)
    ratios = []
    for d in range(max(1, depth - window + 1), depth + 1):
        if masses[d - 1] > 0 and masses[d] > 0:
            ratios.append(masses[d] / masses[d - 1])
    if not ratios:
        return math.inf, math.inf
    q = max(ratios)
    if q >= 1.0:
        return q, math.inf
    return q, 2.0 * masses[depth] * q / (1.0 - q)


def eval_character(alg: AffineAlgebra, lam: Weight, s: Specialization,
                   eps: float = 1e-10, max_depth: int = 1024,
                   start_depth: int = 16) -> EvalResult:
    """Truncated character value with a relative tail bound at most ``eps``.

    The series is summed over delta-depth layers; the discarded mass is
    bounded by a geometric envelope fitted to the trailing observed layer
    ratios with a factor-two safety margin, and the truncation depth grows
    until that bound drops below ``eps`` times the partial sum.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if not classify_weight(alg, lam).dominant:
        raise ValueError("character evaluation needs a dominant integral weight")
    c = float(_require_convergent(alg, s))
    depth = start_depth
    while True:
        masses = _layer_masses(alg, lam, s, depth, c)
        partial = math.fsum(masses)
        q, tail = _envelope_tail(masses, depth)
        if tail <= eps * partial:
            base = float(inner_product(alg, lam, s.point))
            log_value = base + math.log(partial)
            value = math.exp(log_value)
            return EvalResult(value=value, truncation_depth=depth,
                              tail_bound=value * (tail / partial),
                              log_value=log_value)
        if depth >= max_depth:
            raise ConvergenceError(
                f"character tail bound stuck above eps at depth {depth} "
                f"(q_hat={q:.4f})")
        depth = min(max_depth, 2 * depth)


def character_ratio(num: EvalResult, den: EvalResult) -> tuple[float, float]:
    """Ratio of two evaluations with a propagated relative error bound."""
    rel = (num.rel_bound + den.rel_bound) / max(1.0 - den.rel_bound, 1e-12)
    return math.exp(num.log_value - den.log_value), rel


# -- theta functions ---------------------------------------------------------------


def eval_theta(alg: AffineAlgebra, lam: Weight, s: Specialization,
               eps: float = 1e-10, max_radius: float = 400.0) -> EvalResult:
    """Classical theta function of a positive-level weight:

    ``exp(-(lam|lam)/(2k) * (delta|p)) * sum_{alpha in M} exp((t_alpha(lam)|p))``.

    The lattice sum is truncated by translation norm with the certified
    Gaussian shell bound for the discarded part.
    """
    k = inner_product(alg, alg.delta(), lam)
    if k <= 0:
        raise ValueError("theta functions need a positive level")
    c = float(_require_convergent(alg, s))
    p = s.point
    kf = float(k)
    a_coef = 0.5 * kf * c
    # exponent(alpha) - (lam|p) = (alpha | k*p - c*lam)_finite - a|alpha|^2
    drift = [kf * float(x) - c * float(y) for x, y in zip(p.z, lam.z)]
    g = [[float(alg.finite_gram[i][j]) for j in range(alg.rank)]
         for i in range(alg.rank)]
    bnorm = math.sqrt(max(sum(drift[i] * sum(g[i][j] * drift[j]
                                             for j in range(alg.rank))
                              for i in range(alg.rank)), 0.0))
    covol, rho_f, _ = _lattice_geometry(alg)
    step = max(math.sqrt(float(alg.finite_norm2([Fraction(x) for x in bb])))
               for bb in lattice_basis(alg))

    radius = max(2.0 * step, bnorm / max(a_coef, 1e-300) + 2.0)
    while True:
        partial = 0.0
        for vec in translation_vectors(alg, radius):
            zvec = _lattice_to_z(alg, vec)
            quad = _finite_dot_float(alg, zvec, zvec)
            lin = _finite_dot_vec(alg, zvec, drift)
            partial += math.exp(lin - a_coef * quad)
        tail = gaussian_lattice_tail(alg, a_coef, bnorm, radius)
        if tail <= eps * partial:
            break
        if radius > max_radius:
            raise ConvergenceError("theta tail bound not reached within radius cap")
        radius += step
    log_base = (float(inner_product(alg, lam, p))
                - float(inner_product(alg, lam, lam) / (2 * k)) * c)
    log_value = log_base + math.log(partial)
    value = math.exp(log_value)
    return EvalResult(value=value, truncation_depth=int(radius),
                      tail_bound=math.exp(log_base) * tail, log_value=log_value)


def _lattice_to_z(alg: AffineAlgebra, coeffs):
    basis = lattice_basis(alg)
    return tuple(sum(coeffs[i] * basis[i][j] for i in range(alg.rank))
                 for j in range(alg.rank))


def _finite_dot_vec(alg: AffineAlgebra, z1, v2) -> float:
    g = alg.finite_gram
    return sum(float(z1[i]) * sum(float(g[i][j]) * v2[j] for j in range(alg.rank))
               for i in range(alg.rank))


# -- denominator identity -------------------------------------------------------------


def denominator_residual(alg: AffineAlgebra, s: Specialization, depth: int) -> float:
    """Relative gap between the two sides of the denominator identity, both
    truncated at the same delta depth and evaluated at the specialization.

    The product over the root datum is expanded as an exact integer series
    (sparse polynomial multiplication); the sum side is the alternating
    Weyl-orbit series of the Weyl vector with the radius needed to reach
    the same depth.  The identity asserts the two truncated series are
    equal coefficient-by-coefficient, so the evaluated residual sits at
    floating-point noise whenever the coefficients agree.
    """
    c = _require_convergent(alg, s)
    p = s.point
    cf = float(c)

    def evaluate(series) -> float:
        return math.fsum(
            coeff * math.exp(-d * cf - _finite_dot_float(alg, m, p.z))
            for (d, m), coeff in series.items())

    prod = evaluate(denominator_product_series(alg, depth))
    total = evaluate(alternant_terms(alg, weyl_vector(alg), depth))
    return abs(prod - total) / abs(prod)


# -- alternating Weyl-orbit values (numerator route) ----------------------------------


def weyl_alternating_value(alg: AffineAlgebra, mu: Weight, s: Specialization,
                           rtol: float = 1e-13, max_radius: float = 400.0) -> float:
    """Certified value of ``sum_w det(w) exp((w(mu) - mu | p))``.

    For strictly dominant ``mu`` this equals ``exp(-(mu|p))`` times the
    numerator of the character formula at ``mu``; with ``mu = rho`` it is
    the denominator product.  Terms decay like a Gaussian in the
    translation norm at rate ``(mu|delta)(delta|p)/2``.
    """
    c = float(_require_convergent(alg, s))
    kf = float(mu.k)
    a_coef = 0.5 * kf * c
    p = s.point
    group = finite_group(alg)
    z_mu_norm = math.sqrt(float(alg.finite_norm2(mu.z)))
    p_norm = math.sqrt(float(alg.finite_norm2(p.z)))
    # |exp argument + a|alpha|^2| <= const + b|alpha|
    bnorm = kf * p_norm + c * z_mu_norm
    const = 2.0 * z_mu_norm * p_norm
    step = max(math.sqrt(float(alg.finite_norm2([Fraction(x) for x in bb])))
               for bb in lattice_basis(alg))
    radius = max(2.0 * step, bnorm / max(a_coef, 1e-300) + 2.0)

    while True:
        total = 0.0
        for vec in translation_vectors(alg, radius):
            zvec = _lattice_to_z(alg, vec)
            for w in group:
                img = _translate_fast(alg, zvec, finite_apply(alg, w, mu))
                e = float(inner_product(alg, img - mu, p))
                total += w.sign * math.exp(e)
        tail = len(group) * math.exp(const) * gaussian_lattice_tail(
            alg, a_coef, bnorm, radius)
        if tail <= rtol * max(abs(total), 1e-300):
            return total
        if radius > max_radius:
            raise ConvergenceError("alternating sum tail not certified in radius cap")
        radius += step


def _translate_fast(alg: AffineAlgebra, alpha_z, lam: Weight) -> Weight:
    alpha = [Fraction(x) for x in alpha_z]
    pair = alg.finite_inner(lam.z, alpha)
    halfnorm = alg.finite_norm2(alpha) / 2
    return Weight(lam.k,
                  tuple(a + lam.k * b for a, b in zip(lam.z, alpha)),
                  lam.b - (pair + halfnorm * lam.k))
