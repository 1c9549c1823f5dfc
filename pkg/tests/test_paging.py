"""ML paging orders, guessing entropy, and paging-RCL derivation."""

from itertools import permutations

import numpy as np

import pagereg as pr
from conftest import never_register

from pagereg.paging import aggregate_cells, guessing_entropy, ml_paging_order, \
    rank_cells


def _two_cell_model():
    P = np.full((4, 4), 0.25)
    return pr.build_explicit(P, [(0, 1), (2, 3)], 0, lambda_p=0.1,
                             page_cost=1.0, reg_cost=1.0, beta=0.9, k_max=2)


def test_rank_cells_tie_break_by_index():
    assert list(rank_cells(np.ones(3) / 3)) == [1, 2, 3]


def test_ml_order_expands_to_states():
    m = _two_cell_model()
    # state mass (0.1, 0.2, 0.3, 0.4) -> cell probs (0.3, 0.7)
    q = aggregate_cells(m, np.array([0.1, 0.2, 0.3, 0.4]))
    assert np.allclose(q, [0.3, 0.7])
    assert list(ml_paging_order(m, q)) == [2, 2, 1, 1]


def test_ml_order_point_mass():
    m = pr.build_simple_example(0.05, 1.0, 0.04, 0.9)
    r = ml_paging_order(m, np.array([0.0, 1.0, 0.0]))
    assert list(r) == [2, 1, 1, 3, 3]


def test_guessing_entropy_examples():
    assert guessing_entropy(np.array([1.0, 0, 0])) == 1.0
    for n in (2, 3, 7):
        assert abs(guessing_entropy(np.ones(n) / n) - (n + 1) / 2) < 1e-12
    assert abs(guessing_entropy(np.array([0.5, 0.3, 0.2])) - 1.7) < 1e-15
    assert abs(guessing_entropy(np.array([0.2, 0.5, 0.3])) - 1.7) < 1e-15


def test_ml_order_beats_all_permutations():
    # brute-force optimality over every search order, several cell counts
    rng = np.random.default_rng(11)
    for n_cells in (2, 3, 4, 5):
        for _ in range(20):
            q = rng.dirichlet(np.ones(n_cells))
            ml_ranks = rank_cells(q)
            ml_pages = float(q @ ml_ranks)
            assert abs(ml_pages - guessing_entropy(q)) < 1e-12
            for perm in permutations(range(n_cells)):
                ranks = np.empty(n_cells)
                ranks[list(perm)] = np.arange(1, n_cells + 1)
                assert ml_pages <= q @ ranks + 1e-12


def test_schur_order_of_guessing_entropy():
    # more concentrated cell distributions need fewer pages
    from pagereg.major import random_majorization_pair
    rng = np.random.default_rng(5)
    for _ in range(300):
        x, y = random_majorization_pair(rng, int(rng.integers(2, 10)))
        assert guessing_entropy(x) >= guessing_entropy(y) - 1e-10


def test_derive_paging_simple_first_step():
    m = pr.build_simple_example(0.05, 1.0, 0.04, 0.9)
    f = pr.derive_paging_rcl(m, never_register(m))
    # from state 0 the arrival mass is 0.4/0.6 on cells c1/c2: page c2 first
    assert list(f.order(0, 1)) == [3, 2, 2, 1, 1]
    f.validate(m)


def test_derive_paging_single_step_point_mass():
    m = pr.build_simple_example(0.05, 1.0, 0.04, 0.9)
    f = pr.derive_paging_rcl(m, never_register(m))
    # after a report in state 1 the mobile is in state 2 for sure
    assert list(f.order(1, 1)) == [2, 1, 1, 3, 3]


def test_derive_paging_past_truncation_is_identity():
    m = pr.build_simple_example(0.05, 1.0, 0.04, 0.9)
    _, gD = pr.simple_example_policy_pair(m, "D")
    f = pr.derive_paging_rcl(m, gD)
    assert list(f.order(0, 2)) == [1, 2, 2, 3, 3]


def test_derive_paging_walk_is_ping_pong_up_to_ties():
    m = pr.build_symmetric_walk(8, [0.25, 0.5, 0.25], lambda_p=0.1,
                                page_cost=1.0, reg_cost=1.0, beta=0.9, k_max=6)
    g = never_register(m)
    f = pr.derive_paging_rcl(m, g)
    rep = pr.check_walk_structure(m, f, g)
    assert rep.ping_pong
    # the k-fold self convolution is neat, so the paging order must search
    # the center first at every elapsed time
    for k in range(1, m.k_max + 2):
        assert f.order(m.x0, k)[m.x0] == 1
