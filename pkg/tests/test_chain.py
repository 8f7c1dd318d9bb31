import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest

from affinewalks import algebra as al, chain as cn, characters as ch
from affinewalks.algebra import Weight


def omega(a1):
    return Weight.make(2, (0,), 0)


def test_mu_omega_top_probability(a1):
    s = ch.rho_specialization(a1, 3)
    om = omega(a1)
    dist = cn.mu_omega(a1, om, s, 20)
    top = [p for w, p in dist.support if w == om]
    r = ch.eval_character(a1, om, s, eps=1e-13)
    expected = math.exp(float(al.inner_product(a1, om, s.point)) - r.log_value)
    assert top and abs(top[0] - expected) < 1e-13


def test_mu_omega_normalization(a1):
    s = ch.rho_specialization(a1, 3)
    dist = cn.mu_omega(a1, omega(a1), s, 25)
    assert abs(dist.total() + dist.defect - 1.0) <= 1e-9
    assert all(p >= 0 for _, p in dist.support)
    assert dist.defect >= 0


def test_mu_omega_deeper_refinement(a1):
    s = ch.rho_specialization(a1, 5)
    om = omega(a1)
    d1 = cn.mu_omega(a1, om, s, 15)
    d2 = cn.mu_omega(a1, om, s, 25)
    probs2 = {w: p for w, p in d2.support}
    for w, p in d1.support:
        assert abs(probs2[w] - p) <= d1.defect + 1e-12


def test_mu_omega_requires_positive_level(a1):
    s = ch.rho_specialization(a1, 3)
    with pytest.raises(ValueError):
        cn.mu_omega(a1, Weight.make(0, (0,), 0), s, 10)


def test_empirical_increment_law(a1):
    # 1e5 samples against the table, chi-square p-value above 1e-3
    s = ch.rho_specialization(a1, 3)
    dist = cn.mu_omega(a1, omega(a1), s, 30)
    probs = np.array([p for _, p in dist.support])
    probs = probs / probs.sum()
    rng = np.random.Generator(np.random.Philox(1234))
    counts = rng.multinomial(100_000, probs)
    keep = probs * 100_000 >= 5
    other_p = probs[~keep].sum()
    other_c = counts[~keep].sum()
    pk = np.append(probs[keep], other_p)
    ck = np.append(counts[keep], other_c)
    expected = pk * 100_000
    stat = float(((ck - expected) ** 2 / expected).sum())
    dof = len(pk) - 1
    pvalue = float(mp.gammainc(dof / 2, stat / 2, mp.inf, regularized=True))
    assert pvalue > 1e-3


def test_q_omega_row_top_entry(a1):
    s = ch.rho_specialization(a1, 4)
    om = omega(a1)
    lam = a1.Lambda0()
    row = cn.q_omega_row(a1, lam, om, s, 12)
    top = lam + om
    entry = [p for w, p in row.entries if w == top]
    num = ch.eval_character(a1, top, s, eps=1e-12)
    den1 = ch.eval_character(a1, lam, s, eps=1e-12)
    den2 = ch.eval_character(a1, om, s, eps=1e-12)
    expected = math.exp(num.log_value - den1.log_value - den2.log_value)
    assert entry and abs(entry[0] - expected) < 1e-12


def test_row_mass_and_defect(a1):
    s = ch.rho_specialization(a1, 5)
    row = cn.q_omega_row(a1, a1.Lambda0(), omega(a1), s, 20,
                         defect_target=1e-8)
    assert abs(row.total() + row.defect - 1.0) <= 1e-6
    assert all(al.classify_weight(a1, w).dominant for w, _ in row.entries)


def test_row_aggregation_matches_fast_kernel(a1):
    # delta-aggregated exact rows coincide with the reflected fast rows
    s = ch.rho_specialization(a1, 5)
    om = omega(a1)
    fast = cn.FastBarredKernel(a1, om, s)
    for level, q in ((1, 0), (3, 2)):
        lam0 = cn.dominant_states(a1, level)[q]
        agg = np.zeros(level + 2 + 1)
        for w, p in cn.barred_row(a1, lam0, om, s, 40,
                                  defect_target=1e-11).items():
            agg[int(2 * w.z[0])] += p
        probs, _, _ = fast.row(level, int(2 * lam0.z[0]))
        assert np.abs(probs - agg).max() < 1e-9


def test_pbar_basics(a1):
    s = ch.rho_specialization(a1, 3)
    om = omega(a1)
    lam0 = a1.Lambda0()
    assert cn.pbar_power(a1, om, s, 0, lam0, lam0, 10) == 1.0
    other = Weight.make(1, (Fraction(1, 2),), 0)
    assert cn.pbar_power(a1, om, s, 0, lam0, other, 10) == 0.0
    # n = 1 equals the delta-aggregated increment mass
    dist = cn.mu_omega(a1, om, s, 60)
    for b0 in cn.dominant_states(a1, 3):
        agg = sum(p for w, p in dist.support
                  if (lam0 + w).bar().z == b0.z)
        pb = cn.pbar_power(a1, om, s, 1, lam0, b0, 60)
        assert abs(pb - agg) < 1e-10


def test_pbar_two_steps_is_kernel_square(a1):
    # brute-force composition of the one-step projected walk kernel
    s = ch.rho_specialization(a1, 2)
    om = omega(a1)
    lam0 = a1.Lambda0().bar()
    depth = 60
    # intermediate states: all integral barred weights reachable in one step
    dist = cn.mu_omega(a1, om, s, depth)
    one = {}
    for w, p in dist.support:
        key = (lam0 + w).bar().z
        one[key] = one.get(key, 0.0) + p
    two_direct = {}
    for z_mid, p1 in one.items():
        mid = Weight.make(3, z_mid, 0)
        for w, p in dist.support:
            key = (mid + w).bar().z
            two_direct[key] = two_direct.get(key, 0.0) + p1 * p
    for b0 in cn.dominant_states(a1, 5):
        pb = cn.pbar_power(a1, om, s, 2, lam0, b0, depth)
        brute = two_direct.get(b0.z, 0.0)
        assert abs(pb - brute) < 5e-7


def test_pbar_level_mismatch(a1):
    s = ch.rho_specialization(a1, 3)
    with pytest.raises(ValueError):
        cn.pbar_power(a1, omega(a1), s, 1, a1.Lambda0(),
                      Weight.make(2, (0,), 0), 10)


def test_simulate_chain_contract(a1):
    s = ch.rho_specialization(a1, 3)
    om = omega(a1)
    traj = cn.simulate_chain(a1, a1.Lambda0(), om, s, steps=4, seed=7,
                             depth=30)
    assert len(traj) == 5
    for i, w in enumerate(traj):
        assert w.k == 1 + 2 * i                      # arithmetic level growth
        assert al.classify_weight(a1, w).dominant
    again = cn.simulate_chain(a1, a1.Lambda0(), om, s, steps=4, seed=7,
                              depth=30)
    assert traj == again
    other = cn.simulate_chain(a1, a1.Lambda0(), om, s, steps=4, seed=8,
                              depth=30)
    assert isinstance(other, list)


def test_reflection_zero_steps(a1):
    s = ch.rho_specialization(a1, 3)
    res = cn.reflection_discrete_residual(a1, omega(a1), s, 0,
                                          a1.Lambda0(), a1.Lambda0(), 20)
    assert res == 0.0


def test_reflection_small(a1):
    s = ch.rho_specialization(a1, 3)
    om = omega(a1)
    b0 = cn.dominant_states(a1, 3)[0]
    res = cn.reflection_discrete_residual(a1, om, s, 1, a1.Lambda0(), b0, 80)
    assert res < 1e-10


def test_doob_composition_matches_tensor_route(a1):
    # two-step kernel by composing rows equals the tensor-power branching
    # route (associativity of the decomposition)
    s = ch.rho_specialization(a1, 2)
    om = omega(a1)
    lam0 = a1.Lambda0().bar()
    depth = 35
    rows = {}
    dist = {lam0: 1.0}
    for _ in range(2):
        nxt = {}
        for st, pr in dist.items():
            if st not in rows:
                rows[st] = cn.barred_row(a1, st, om, s, depth,
                                         defect_target=1e-9)
            for nu, q in rows[st].items():
                nxt[nu] = nxt.get(nu, 0.0) + pr * q
        dist = nxt
    from affinewalks.highestweight import branching_mult
    log_norm = cn._log_ch(a1, lam0, s) + 2 * cn._log_ch(a1, om, s)
    c = float(ch.delta_pairing(a1, s))
    for b0 in cn.dominant_states(a1, 5):
        direct = 0.0
        for d in range(depth + 1):
            beta = Weight.make(b0.k, b0.z, -d)
            mlt = branching_mult(a1, lam0, om, 2, beta)
            if mlt:
                direct += math.exp(math.log(mlt)
                                   + cn._log_ch(a1, beta, s) - log_norm)
        composed = dist.get(b0, 0.0)
        assert abs(direct - composed) <= 1e-4 * max(composed, 1e-12)


def test_level_coset_conservation(a1):
    # increments keep the finite coordinate in the start's lattice coset
    s = ch.rho_specialization(a1, 4)
    row = cn.q_omega_row(a1, a1.Lambda0(), omega(a1), s, 15)
    for w, p in row.entries:
        assert (w.z[0] - 0).denominator == 1     # integral coset of z=0


def test_fast_kernel_defect_guard(a1):
    s = ch.rho_specialization(a1, 5)
    fk = cn.FastBarredKernel(a1, omega(a1), s, defect_threshold=1e-30)
    with pytest.raises(cn.ChainDefectError):
        fk.row(1, 0)
