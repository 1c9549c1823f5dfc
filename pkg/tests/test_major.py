"""Majorization toolkit: order checks, trimming, convolution, structure."""

from itertools import combinations

import numpy as np
import pytest

import pagereg as pr
from conftest import never_register

from pagereg.major import FiniteDistribution, convolve, is_neat, majorizes, \
    min_likelihood_trim, random_majorization_pair, random_neat, \
    random_symmetric_unimodal, rearrange_nonincreasing

D = FiniteDistribution.centered


def test_rearrange():
    x = D([0.2, 0.5, 0.3])
    assert list(rearrange_nonincreasing(x)) == [0.5, 0.3, 0.2]
    assert list(rearrange_nonincreasing(np.array([0.5, 0.3, 0.2]))) \
        == [0.5, 0.3, 0.2]
    assert list(rearrange_nonincreasing(np.full(4, 0.25))) == [0.25] * 4


def test_majorizes_examples():
    x = D([0.2, 0.3, 0.5])
    assert majorizes(x, x)  # reflexive
    n = 5
    assert majorizes(np.ones(n) / n, np.array([1.0, 0, 0, 0, 0]))
    assert not majorizes(np.array([1.0, 0, 0, 0, 0]), np.ones(n) / n)
    # partial sums (0.5, 0.8, 1.0) vs (0.5, 0.9, 1.0)
    assert majorizes(np.array([0.2, 0.3, 0.5]), np.array([0.1, 0.4, 0.5]))
    assert not majorizes(np.array([0.1, 0.4, 0.5]), np.array([0.2, 0.3, 0.5]))


def test_is_neat_examples():
    assert is_neat(FiniteDistribution.delta(0))
    assert is_neat(D([0.25, 0.5, 0.25]))
    assert not is_neat(D([0.5, 0.3, 0.2]))  # mass at -1 exceeds center
    assert is_neat(D([0.1, 0.2, 0.4, 0.2, 0.1]))
    assert not is_neat(D([0.2, 0.1, 0.4, 0.2, 0.1]))  # -2 heavier than -1


def test_min_likelihood_trim_examples():
    mu = D([0.2, 0.5, 0.3])
    assert np.array_equal(min_likelihood_trim(mu, 0.0).masses, mu.masses)
    nu = min_likelihood_trim(mu, 0.2)
    assert np.allclose(sorted(nu.masses, reverse=True), [0.625, 0.375, 0.0])
    uni = FiniteDistribution(np.arange(5), np.full(5, 0.2))
    nu = min_likelihood_trim(uni, 2 / 5)
    assert np.allclose(sorted(nu.masses, reverse=True),
                       [1 / 3, 1 / 3, 1 / 3, 0, 0])
    with pytest.raises(ValueError):
        min_likelihood_trim(mu, 1.0)


def test_min_likelihood_trim_maximality_small_grid():
    # enumerate trims on a 3-point grid: every feasible trim is majorized
    mu = D([0.2, 0.5, 0.3])
    lam = 0.25
    nu = min_likelihood_trim(mu, lam)
    grid = np.linspace(0, lam, 11)
    for t0 in grid:
        for t1 in grid:
            t2 = lam - t0 - t1
            if t2 < -1e-12:
                continue
            t = np.array([t0, t1, max(t2, 0.0)])
            if np.any(t > mu.masses + 1e-12):
                continue
            other = (mu.masses - np.minimum(t, mu.masses)) / (1 - lam)
            other /= other.sum()
            assert majorizes(other, nu.masses)


def test_convolve_examples():
    x = D([0.1, 0.8, 0.1])
    assert np.allclose(convolve(x, FiniteDistribution.delta(0)).masses,
                       x.masses)
    d = convolve(FiniteDistribution.delta(2), FiniteDistribution.delta(3))
    assert d.offsets[d.masses > 0].tolist() == [5]
    half = FiniteDistribution(np.array([0, 1]), np.array([0.5, 0.5]))
    sq = convolve(half, half)
    assert np.allclose(sq.masses, [0.25, 0.5, 0.25])
    assert sq.offsets.tolist() == [0, 1, 2]


SEED_L2, SEED_L3, SEED_L4, SEED_L5, SEED_L7 = 101, 102, 103, 104, 107


def test_lemma2_schur_order_of_search_cost():
    rng = np.random.default_rng(SEED_L2)
    for _ in range(400):
        x, y = random_majorization_pair(rng, int(rng.integers(2, 12)))
        assert pr.guessing_entropy(x) >= pr.guessing_entropy(y) - 1e-10


def test_lemma3_neat_preserved_by_symmetric_unimodal_convolution():
    rng = np.random.default_rng(SEED_L3)
    for _ in range(400):
        mu = random_neat(rng, int(rng.integers(0, 8)))
        b = random_symmetric_unimodal(rng, int(rng.integers(0, 5)))
        assert is_neat(convolve(mu, b), atol=1e-12)


def test_lemma4_majorization_preserved_by_convolution_with_neat_upper():
    rng = np.random.default_rng(SEED_L4)
    for _ in range(400):
        nu = random_neat(rng, int(rng.integers(1, 7)))
        # T-transforms of the neat vector give a dominated partner on the
        # same offsets, so the convolution comparison is well posed
        mu = FiniteDistribution(nu.offsets, _t_transforms(rng, nu.masses))
        b = random_symmetric_unimodal(rng, int(rng.integers(0, 4)))
        assert majorizes(mu.masses, nu.masses)
        assert majorizes(convolve(mu, b), convolve(nu, b))


def _t_transforms(rng, y, rounds=None):
    x = y.copy()
    for _ in range(rounds if rounds is not None else 2 * len(y)):
        i, j = rng.integers(0, len(y), size=2)
        if i == j:
            continue
        t = rng.random()
        xi, xj = x[i], x[j]
        x[i] = t * xi + (1 - t) * xj
        x[j] = (1 - t) * xi + t * xj
    return x


def test_lemma5_trim_majorizes_random_feasible_trims():
    rng = np.random.default_rng(SEED_L5)
    for _ in range(300):
        n = int(rng.integers(2, 10))
        masses = rng.dirichlet(np.ones(n))
        mu = FiniteDistribution(np.arange(n), masses)
        lam = float(rng.uniform(0.0, 0.9))
        nu = min_likelihood_trim(mu, lam)
        for _ in range(5):
            trim = rng.dirichlet(np.ones(n)) * lam
            # push excess trim mass off entries it cannot come from
            for _ in range(n):
                excess = np.maximum(trim - masses, 0.0)
                if excess.sum() <= 1e-15:
                    break
                trim = np.minimum(trim, masses)
                room = (masses - trim) > 1e-15
                if not room.any():
                    break
                trim[room] += excess.sum() / room.sum()
            trim = np.minimum(trim, masses)
            short = lam - trim.sum()
            if short > 1e-12:
                continue  # could not place the full trim mass; skip draw
            other = (masses - trim) / (1 - lam)
            other = np.clip(other, 0, None)
            other /= other.sum()
            assert majorizes(other, nu.masses)


def test_lemma7_monotone_sum_pairs():
    rng = np.random.default_rng(SEED_L7)
    for _ in range(400):
        n = int(rng.integers(2, 12))
        a = np.sort(rng.random(n))[::-1]
        a[-1] = 0.0
        b = np.sort(rng.random(n))
        b[0] = 0.0
        c = a + b
        d = np.empty(n)
        d[:n - 1] = a[:n - 1] + b[1:]
        d[n - 1] = 0.0
        assert majorizes(c, d)


def test_appendix_c_consecutive_support_is_maximal():
    # exhaustive: every binary F with support size r on a 14-point window,
    # convolved with interval indicators and with unimodal kernels, is
    # majorized by the consecutive-support version
    window = 14
    rng = np.random.default_rng(7)
    kernels = [FiniteDistribution.centered([0.25, 0.5, 0.25]),
               FiniteDistribution.centered([0.2] * 5),
               random_symmetric_unimodal(rng, 3)]
    for r in range(1, 7):
        consec = np.zeros(window)
        consec[:r] = 1.0
        for L in (1, 2, 4):
            interval = np.ones(L)
            best = np.convolve(consec, interval)
            for support in combinations(range(window), r):
                F = np.zeros(window)
                F[list(support)] = 1.0
                assert majorizes(np.convolve(F, interval), best)
        for b in kernels:
            dense_b = b.masses
            best = np.convolve(consec, dense_b)
            for support in combinations(range(window), r):
                F = np.zeros(window)
                F[list(support)] = 1.0
                assert majorizes(np.convolve(F, dense_b), best)


# ---------------------------------------------------------------------------
# Walk structure report


def _walk(k_max=4, width=10, kernel=(0.25, 0.5, 0.25), R=1.5):
    return pr.build_symmetric_walk(width, list(kernel), lambda_p=0.1,
                                   page_cost=1.0, reg_cost=R, beta=0.9,
                                   k_max=k_max)


def test_structure_accepts_threshold_pair():
    m = _walk()
    f, g = pr.stationary_walk_policies(m, 3, 3)
    rep = pr.check_walk_structure(m, f, g)
    assert rep.ok
    assert all(s.d_l is None or s.d_l == 3 for s in rep.slices)


def test_structure_rejects_hole():
    m = _walk(kernel=(0.2,) * 5)  # jumps of two expose the hole
    f, g = pr.stationary_walk_policies(m, 3, 3)
    gd = g.decisions.copy()
    for i0 in range(m.n_states):
        if i0 + 4 < m.n_states:
            gd[i0, :, i0 + 4] = 0  # register at +3 but not +4
    rep = pr.check_walk_structure(m, f, pr.RegistrationRCL(gd))
    assert not rep.threshold


def test_structure_rejects_non_ping_pong():
    m = _walk()
    f, g = pr.stationary_walk_policies(m, 3, 3)
    fo = f.orders.copy()
    c = m.x0
    # swap the ranks of the center and a far state: distance order broken
    fo[c, :, [c, c - 2]] = fo[c, :, [c - 2, c]]
    rep = pr.check_walk_structure(m, pr.PagingRCL(fo), g)
    assert not rep.ping_pong


def test_structure_of_individually_optimal_walk_pair():
    m = _walk(k_max=4, width=12, R=2.0)
    log = pr.individually_optimal(m, never_register(m), tol=1e-12)
    rep = pr.check_walk_structure(m, log.f, log.g)
    assert rep.ok
