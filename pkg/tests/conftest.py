"""Shared helpers for the test suite."""

import numpy as np

import pagereg as pr
from pagereg.model import RegistrationRCL


def simple_closed_form(row, lam, page_cost, reg_cost, beta):
    """Exact discounted cost of the simple example's four feedback policies.

    Independent oracle: the three-step renewal form with the per-row
    registration probability and the second-step extra-page probability.
    """
    p_reg = {"A": 0.0, "B": 0.4, "C": 0.6, "D": 1.0}[row]
    p_two = {"A": 0.4, "B": 0.0, "C": 0.0, "D": 0.0}[row]
    num = reg_cost * beta * (1 - lam) * p_reg + lam * page_cost * (
        1.4 * beta + beta**2 + beta**2 * (1 - lam) * p_two + beta**3)
    return num / (1 - beta**3)


def simple_k_max_for(lam, beta, eps=1e-12):
    """k_max making the forced-registration truncation error below eps."""
    return int(np.ceil(np.log(eps * (1 - beta)) / np.log(beta * (1 - lam)))) + 5


def never_register(model):
    n, K = model.n_states, model.k_max
    return RegistrationRCL(np.zeros((n, K, n), dtype=np.int8))


def always_register(model):
    n, K = model.n_states, model.k_max
    return RegistrationRCL(np.ones((n, K, n), dtype=np.int8))


def random_model(rng, max_states=12, max_k=6):
    """Random sparse-ish motion model for property sweeps."""
    n = int(rng.integers(3, max_states + 1))
    P = np.zeros((n, n))
    for i in range(n):
        outs = rng.choice(n, size=int(rng.integers(2, min(4, n) + 1)),
                          replace=False)
        w = rng.dirichlet(np.ones(len(outs)))
        P[i, outs] = w
        P[i] /= P[i].sum()
    n_cells = int(rng.integers(2, n + 1))
    perm = rng.permutation(n)
    cuts = np.sort(rng.choice(np.arange(1, n), size=n_cells - 1, replace=False))
    cells = [tuple(int(s) for s in grp)
             for grp in np.split(perm, cuts)]
    return pr.build_explicit(
        P, cells, int(rng.integers(0, n)),
        lambda_p=float(rng.uniform(0.02, 0.3)),
        page_cost=1.0,
        reg_cost=float(rng.uniform(0.05, 2.0)),
        beta=float(rng.uniform(0.7, 0.95)),
        k_max=int(rng.integers(2, max_k + 1)))


def reachable_decision_points(model):
    """(i0, k, l) triples that carry no-report mass under some policy.

    Computed under the never-register policy, whose support dominates
    every other registration RCL's.
    """
    pts = []
    for i0 in range(model.n_states):
        m = pr.delta(model.n_states, i0)
        for k in range(1, model.k_max + 1):
            m = m @ model.P
            for l in np.nonzero(m > 1e-14)[0]:
                pts.append((i0, k, int(l)))
    return pts


def brute_force_registration(model, f):
    """Exhaustive search over binary decisions on all reachable points.

    Returns (best cost, best decision bits, points).  Exponential in the
    number of points; callers keep models small.
    """
    from itertools import product

    pts = reachable_decision_points(model)
    n, K = model.n_states, model.k_max
    best, best_bits = np.inf, None
    for bits in product((0, 1), repeat=len(pts)):
        g = np.zeros((n, K, n), dtype=np.int8)
        for (i0, k, l), b in zip(pts, bits):
            g[i0, k - 1, l] = b
        c = pr.policy_cost(model, f, RegistrationRCL(g)).total
        if c < best:
            best, best_bits = c, bits
    return best, best_bits, pts
