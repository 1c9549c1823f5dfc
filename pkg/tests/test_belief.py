"""Trimming update and per-cycle belief recursion."""

import numpy as np
import pytest

import pagereg as pr
from conftest import never_register

from pagereg.belief import delta, phi_update
from pagereg.errors import ZeroSurvivalMass


def test_phi_no_trim_is_markov_step():
    P = np.array([[0.9, 0.1], [0.2, 0.8]])
    out = phi_update(delta(2, 0), np.zeros(2), P)
    assert np.allclose(out, P[0], atol=1e-15)


def test_phi_simple_example_branch():
    m = pr.build_simple_example(0.05, 1.0, 0.04, 0.9)
    out = phi_update(delta(5, 0), np.array([0, 1, 0, 0, 0.0]), m.P)
    assert np.allclose(out, delta(5, 3), atol=1e-15)


def test_phi_two_state_partial_trim():
    # hand-checked arithmetic: wP = (0.55, 0.45); survive = (0.55, 0.225)
    P = np.array([[0.9, 0.1], [0.2, 0.8]])
    out = phi_update(np.array([0.5, 0.5]), np.array([0.0, 0.5]), P)
    assert np.allclose(out, [0.55 / 0.775, 0.225 / 0.775], atol=1e-15)
    assert abs(out[0] - 0.7096774193548387) < 1e-15


def test_phi_zero_survival_raises():
    P = np.array([[0.9, 0.1], [0.2, 0.8]])
    with pytest.raises(ZeroSurvivalMass):
        phi_update(np.array([1.0, 0.0]), np.ones(2), P)


def test_phi_properties_randomized():
    rng = np.random.default_rng(2024)
    P = np.array([[0.5, 0.5, 0.0], [0.0, 0.1, 0.9], [0.3, 0.3, 0.4]])
    for _ in range(300):
        w = rng.dirichlet(np.ones(3))
        d = rng.random(3)
        try:
            out = phi_update(w, d, P)
        except ZeroSurvivalMass:
            continue
        assert np.all(out >= 0)
        assert abs(out.sum() - 1.0) < 1e-12
        # support shrinks: no mass outside the support of wP
        assert np.all(out[(w @ P) <= 1e-15] == 0)


def test_phi_binary_trim_kills_registered_states():
    rng = np.random.default_rng(7)
    P = np.array([[0.5, 0.5, 0.0], [0.0, 0.1, 0.9], [0.3, 0.3, 0.4]])
    for _ in range(100):
        w = rng.dirichlet(np.ones(3))
        d = (rng.random(3) < 0.5).astype(float)
        try:
            out = phi_update(w, d, P)
        except ZeroSurvivalMass:
            continue
        assert np.all(out[d == 1] == 0)


def test_recursion_no_trim_is_matrix_power():
    m = pr.build_simple_example(0.05, 1.0, 0.04, 0.9, k_max=6)
    seq = pr.belief_recursion(m, never_register(m), 0)
    assert seq.truncated_at is None
    probe = delta(5, 0)
    for k in range(7):
        assert np.allclose(seq.w[k], probe, atol=1e-14)
        probe = probe @ m.P


def test_recursion_registration_collapse():
    m = pr.build_simple_example(0.05, 1.0, 0.04, 0.9)
    _, gB = pr.simple_example_policy_pair(m, "B")
    seq = pr.belief_recursion(m, gB, 0)
    assert np.allclose(seq.w[1], delta(5, 3), atol=1e-15)


def test_recursion_truncates_when_no_report_impossible():
    m = pr.build_simple_example(0.05, 1.0, 0.04, 0.9)
    _, gD = pr.simple_example_policy_pair(m, "D")
    seq = pr.belief_recursion(m, gD, 0)
    assert seq.truncated_at == 1
    assert seq.last_k == 0


def test_recursion_matches_self_convolution_on_walk():
    # with no registration the walk belief is the k-fold kernel convolution
    b = pr.FiniteDistribution.centered([0.25, 0.5, 0.25])
    m = pr.build_symmetric_walk(8, [0.25, 0.5, 0.25], lambda_p=0.1,
                                page_cost=1.0, reg_cost=1.0, beta=0.9,
                                k_max=6)
    seq = pr.belief_recursion(m, never_register(m), m.x0)
    acc = pr.FiniteDistribution.delta(0)
    for k in range(1, 7):
        acc = pr.convolve(acc, b)
        dense = np.zeros(m.n_states)
        dense[acc.offsets + m.x0] = acc.masses
        assert np.allclose(seq.w[k], dense, atol=1e-12)
        assert pr.is_neat(acc, atol=1e-15)
