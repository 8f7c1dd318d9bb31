"""The affine Weyl group as the semidirect product of translations and the
finite Weyl group.

Elements are kept in translation-first normal form ``t_alpha * w`` with
``alpha`` an integer vector in a fixed basis of the translation lattice and
``w`` a finite Weyl element acting on the finite coordinates.  Composition
uses the semidirect rule, so no reduced-word machinery is needed beyond the
breadth-first enumeration of the finite group.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import _linalg
from .algebra import AffineAlgebra, Weight, pairing_coroot

__all__ = [
    "FiniteWeylElement",
    "AffineWeylElement",
    "finite_group",
    "reflect",
    "finite_apply",
    "lattice_basis",
    "translate",
    "apply",
    "compose",
    "enumerate_bounded",
    "translation_vectors",
    "dominant_representative",
    "WeylEnumerationError",
]


class WeylEnumerationError(RuntimeError):
    """Finite Weyl group larger than the configured enumeration cap."""


@dataclass(frozen=True)
class FiniteWeylElement:
    """Finite Weyl group element as an integer matrix on root coordinates."""

    matrix: tuple[tuple[int, ...], ...]
    word: tuple[int, ...]
    sign: int

    def act_z(self, z):
        return tuple(sum(row[j] * z[j] for j in range(len(z))) for row in self.matrix)


@dataclass(frozen=True)
class AffineWeylElement:
    """Normal form ``t_alpha * w``; ``trans`` holds lattice-basis coordinates."""

    trans: tuple[int, ...]
    finite: FiniteWeylElement

    @property
    def sign(self) -> int:
        return self.finite.sign

    def is_identity(self) -> bool:
        return all(c == 0 for c in self.trans) and not self.finite.word

    def to_json(self) -> str:
        return json.dumps({"alpha": list(self.trans), "word": list(self.finite.word)})


def _simple_matrix(alg: AffineAlgebra, i: int) -> tuple[tuple[int, ...], ...]:
    l = alg.rank
    a = alg.cartan.entries
    rows = []
    for r in range(1, l + 1):
        row = [1 if r == c else 0 for c in range(1, l + 1)]
        if r == i:
            for c in range(1, l + 1):
                row[c - 1] -= a[i][c]
        rows.append(tuple(row))
    return tuple(rows)


@lru_cache(maxsize=None)
def finite_group(alg: AffineAlgebra, cap: int = 10**6) -> tuple[FiniteWeylElement, ...]:
    """Breadth-first closure of the finite Weyl group under the generators."""
    l = alg.rank
    ident = FiniteWeylElement(
        matrix=tuple(tuple(1 if i == j else 0 for j in range(l)) for i in range(l)),
        word=(), sign=1)
    gens = {i: _simple_matrix(alg, i) for i in range(1, l + 1)}
    seen = {ident.matrix: ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for w in frontier:
            for i, g in gens.items():
                prod = tuple(
                    tuple(sum(w.matrix[r][m] * g[m][c] for m in range(l))
                          for c in range(l))
                    for r in range(l))
                if prod not in seen:
                    elem = FiniteWeylElement(prod, w.word + (i,), -w.sign)
                    seen[prod] = elem
                    nxt.append(elem)
                    if len(seen) > cap:
                        raise WeylEnumerationError(
                            f"finite Weyl group exceeds cap {cap}")
        frontier = nxt
    return tuple(sorted(seen.values(), key=lambda e: (len(e.word), e.word)))


def reflect(alg: AffineAlgebra, i: int, lam: Weight) -> Weight:
    """Fundamental reflection ``s_i(x) = x - x(coroot_i) * alpha_i``."""
    return lam - pairing_coroot(alg, lam, i) * alg.alpha(i)


def finite_apply(alg: AffineAlgebra, w: FiniteWeylElement, lam: Weight) -> Weight:
    """Finite Weyl action: rotates the finite coordinates, fixes k and b."""
    return Weight(lam.k, tuple(Fraction(x) for x in w.act_z(lam.z)), lam.b)


@lru_cache(maxsize=None)
def lattice_basis(alg: AffineAlgebra) -> tuple[tuple[int, ...], ...]:
    """Z-basis (in root coordinates) of the translation lattice.

    The lattice is generated by the finite-Weyl orbit of the image of
    ``theta∨ = sum_{i>=1} a∨_i coroot_i`` under ``nu``; the Hermite normal
    form of the orbit is returned, so the basis is canonical.
    """
    l = alg.rank
    nu = alg.nu_matrix
    # nu(theta∨) in dual coordinates (Lambda0, alpha_1.., delta)
    coords = [sum(Fraction(alg.comarks[i]) * nu[r][i] for i in range(1, l + 1))
              for r in range(l + 2)]
    if coords[0] != 0 or coords[l + 1] != 0:
        raise AssertionError("nu(theta∨) must be a finite vector")
    theta = coords[1:l + 1]
    orbit = set()
    for w in finite_group(alg):
        vec = w.act_z(theta)
        if any(x.denominator != 1 for x in map(Fraction, vec)):
            raise AssertionError("orbit of nu(theta∨) left the root lattice")
        orbit.add(tuple(int(x) for x in vec))
    hnf = _linalg.hermite_normal_form(sorted(orbit))
    if len(hnf) != l:
        raise AssertionError("translation lattice is not full rank")
    return tuple(hnf)


def translate(alg: AffineAlgebra, alpha_z, lam: Weight) -> Weight:
    """Translation ``t_alpha``:

    ``t_alpha(x) = x + x(K) alpha - ((x|alpha) + (alpha|alpha) x(K)/2) delta``.
    ``alpha_z`` is given in root coordinates and must be a finite vector.
    """
    alpha_z = tuple(Fraction(x) for x in alpha_z)
    if len(alpha_z) != alg.rank:
        raise ValueError("translation vector must live in the finite span")
    level = lam.k  # x(K) equals the Lambda0 coefficient for comark_0 = 1
    pair = alg.finite_inner(lam.z, alpha_z)
    halfnorm = alg.finite_norm2(alpha_z) / 2
    return Weight(
        lam.k,
        tuple(a + level * b for a, b in zip(lam.z, alpha_z)),
        lam.b - (pair + halfnorm * level),
    )


def _trans_to_z(alg: AffineAlgebra, coeffs) -> tuple[Fraction, ...]:
    basis = lattice_basis(alg)
    return tuple(
        Fraction(sum(coeffs[i] * basis[i][j] for i in range(alg.rank)))
        for j in range(alg.rank))


def apply(alg: AffineAlgebra, w: AffineWeylElement, lam: Weight) -> Weight:
    """Apply ``t_alpha * w`` to a weight (finite part first, then translate)."""
    return translate(alg, _trans_to_z(alg, w.trans), finite_apply(alg, w.finite, lam))


@lru_cache(maxsize=None)
def _finite_on_lattice(alg: AffineAlgebra, w: FiniteWeylElement) -> tuple[tuple[int, ...], ...]:
    """Matrix of w on lattice-basis coordinates (integer; the lattice is stable)."""
    basis = lattice_basis(alg)
    bmat = _linalg.as_fraction_matrix(list(zip(*basis)))  # columns = basis vectors
    binv = _linalg.invert(bmat)
    wmat = _linalg.as_fraction_matrix(w.matrix)
    m = _linalg.mat_mul(binv, _linalg.mat_mul(wmat, bmat))
    for row in m:
        for x in row:
            if x.denominator != 1:
                raise AssertionError("finite Weyl element does not preserve lattice")
    return tuple(tuple(int(x) for x in row) for row in m)


def compose(alg: AffineAlgebra, w1: AffineWeylElement, w2: AffineWeylElement) -> AffineWeylElement:
    """Semidirect product rule: ``(t_a u)(t_b v) = t_{a + u(b)} (u v)``."""
    m = _finite_on_lattice(alg, w1.finite)
    moved = tuple(sum(m[r][c] * w2.trans[c] for c in range(alg.rank))
                  for r in range(alg.rank))
    trans = tuple(a + b for a, b in zip(w1.trans, moved))
    l = alg.rank
    prod = tuple(
        tuple(sum(w1.finite.matrix[r][k] * w2.finite.matrix[k][c] for k in range(l))
              for c in range(l)) for r in range(l))
    finite = FiniteWeylElement(prod, w1.finite.word + w2.finite.word,
                               w1.finite.sign * w2.finite.sign)
    return AffineWeylElement(trans, finite)


@lru_cache(maxsize=None)
def _lattice_gram(alg: AffineAlgebra) -> _linalg.Mat:
    basis = lattice_basis(alg)
    l = alg.rank
    return tuple(
        tuple(alg.finite_inner([Fraction(x) for x in basis[i]],
                               [Fraction(x) for x in basis[j]])
              for j in range(l)) for i in range(l))


def translation_vectors(alg: AffineAlgebra, radius) -> list[tuple[int, ...]]:
    """All lattice points with norm at most ``radius``, in deterministic order.

    Box-then-filter: coefficient bounds come from the inverse Gram diagonal,
    membership is decided by the exact quadratic form.
    """
    r2 = Fraction(radius) ** 2
    gram = _lattice_gram(alg)
    ginv = _linalg.invert(gram)
    l = alg.rank
    bounds = []
    for i in range(l):
        bound2 = r2 * ginv[i][i]
        bounds.append(math.isqrt(int(bound2)) + 1 if bound2 > 0 else 0)
    points = []
    for coeffs in itertools.product(*[range(-b, b + 1) for b in bounds]):
        q = sum(coeffs[i] * sum(gram[i][j] * coeffs[j] for j in range(l))
                for i in range(l))
        if q <= r2:
            points.append((q, coeffs))
    points.sort()
    return [c for _, c in points]


def enumerate_bounded(alg: AffineAlgebra, radius):
    """Yield every ``t_alpha * w`` with ``|alpha| <= radius``, each exactly once."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    group = finite_group(alg)
    for coeffs in translation_vectors(alg, radius):
        for w in group:
            yield AffineWeylElement(coeffs, w)


def dominant_representative(alg: AffineAlgebra, lam: Weight, max_steps: int = 100000):
    """Reflect a positive-level weight into the dominant chamber.

    Returns ``(mu, sign)`` where ``mu`` is dominant up to its delta
    component and ``sign`` is the determinant of the element used.  The
    delta coordinate is tracked exactly through the reflections.
    """
    mu = lam
    sign = 1
    for _ in range(max_steps):
        neg = next((i for i in range(alg.rank + 1)
                    if pairing_coroot(alg, mu, i) < 0), None)
        if neg is None:
            return mu, sign
        mu = reflect(alg, neg, mu)
        sign = -sign
    raise RuntimeError("dominant chamber not reached; is the level positive?")
