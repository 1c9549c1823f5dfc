"""Exact discounted-cost evaluation, Monte-Carlo cross-check, trace export.

The exact evaluator works on reporting cycles: starting from a report in
state i0 it propagates the unnormalized no-report mass step by step
(move, then page with probability lambda_p, then register), accumulates
the discounted page/registration cost of the cycle, and records where and
with what discounted mass the next report lands.  The per-start costs
then satisfy a linear renewal system whose solution is the exact expected
infinite-horizon discounted cost.
"""

from dataclasses import dataclass

import numpy as np

from .belief import delta, phi_update

RNG_ALGORITHM = "numpy-PCG64"


@dataclass(frozen=True, eq=False)
class CycleStats:
    """Per-(i0, k) reporting-cycle statistics, k = 1..k_max+1 (undiscounted).

    ``alpha_p[i0, k-1]`` / ``alpha_r[i0, k-1]`` are the probabilities that
    the cycle ends at elapsed time k with a page / a registration.
    ``expected_pages`` is the mean number of cells paged given a page at k
    (nan where a page at k is impossible), and ``next_report_mass`` is the
    sub-probability vector of the report landing state.
    """

    alpha_p: np.ndarray
    alpha_r: np.ndarray
    expected_pages: np.ndarray
    next_report_mass: np.ndarray


@dataclass(frozen=True, eq=False)
class CostReport:
    """Exact discounted cost of an RCL pair.

    ``total`` is the cost from the model's initial state and always equals
    ``per_report_state[x0]``.
    """

    total: float
    per_report_state: np.ndarray
    cycle_stats: CycleStats


def policy_cost(model, f, g):
    """Exact expected infinite-horizon discounted cost of the pair (f, g).

    Event order within a step: move, page with probability lambda_p,
    then register per g (forced at elapsed time k_max + 1).  The renewal
    system C(i0) = c(i0) + sum_l M(i0, l) C(l) is solved directly; its
    matrix has row sums <= beta < 1 because forced registration closes
    every cycle.
    """
    n, K = model.n_states, model.k_max
    lam, beta = model.lambda_p, model.beta
    m = np.eye(n)  # row i0: unnormalized no-report mass at elapsed time k
    c = np.zeros(n)
    M = np.zeros((n, n))
    alpha_p = np.zeros((n, K + 1))
    alpha_r = np.zeros((n, K + 1))
    expected_pages = np.full((n, K + 1), np.nan)
    next_report = np.zeros((n, K + 1, n))
    disc = 1.0
    for k in range(1, K + 2):
        disc *= beta
        a = m @ model.P  # arrival mass at elapsed time k
        fk = f.orders[:, k - 1, :]
        gk = g.decision_matrix(k)
        arrived = a.sum(axis=1)
        pages = (a * fk).sum(axis=1)
        reg_mass = (1.0 - lam) * a * gk
        c += disc * (lam * model.page_cost * pages
                     + model.reg_cost * reg_mass.sum(axis=1))
        landing = lam * a + reg_mass
        M += disc * landing
        alpha_p[:, k - 1] = lam * arrived
        alpha_r[:, k - 1] = reg_mass.sum(axis=1)
        next_report[:, k - 1, :] = landing
        with np.errstate(invalid="ignore"):
            expected_pages[:, k - 1] = np.where(arrived > 0, pages / arrived,
                                                np.nan)
        m = (1.0 - lam) * a * (1 - gk)
    closed = alpha_p.sum(axis=1) + alpha_r.sum(axis=1)
    assert np.all(np.abs(closed - 1.0) <= 1e-12), "cycle mass not conserved"
    C = np.linalg.solve(np.eye(n) - M, c)
    stats = CycleStats(alpha_p, alpha_r, expected_pages, next_report)
    return CostReport(float(C[model.x0]), C, stats)


def mc_horizon(model, horizon_eps):
    """Steps until the remaining discounted cost is below horizon_eps."""
    tail = model.page_cost * model.n_cells + model.reg_cost
    t = np.log(horizon_eps * (1.0 - model.beta) / tail) / np.log(model.beta)
    return max(int(np.ceil(t)), 1)


def monte_carlo_cost(model, f, g, seed, n_cycles, horizon_eps=1e-6):
    """Seeded simulation estimate of the discounted cost.

    Runs ``n_cycles`` independent replications of the move/page/register
    event sequence, each truncated once the discounted tail bound drops
    below ``horizon_eps``, and returns (sample mean, standard error).
    The generator is numpy's PCG64; a fixed seed reproduces the estimate
    bit for bit.
    """
    if n_cycles < 1:
        raise ValueError("n_cycles must be at least 1")
    n, K = model.n_states, model.k_max
    lam = model.lambda_p
    rng = np.random.default_rng(seed)
    cum = np.cumsum(model.P, axis=1)
    horizon = mc_horizon(model, horizon_eps)

    states = np.full(n_cycles, model.x0, dtype=np.intp)
    i0 = states.copy()
    k = np.zeros(n_cycles, dtype=np.intp)
    total = np.zeros(n_cycles)
    disc = 1.0
    for _ in range(horizon):
        disc *= model.beta
        u = rng.random(n_cycles)
        states = (u[:, None] > cum[states]).sum(axis=1)
        k += 1
        paged = rng.random(n_cycles) < lam
        ranks = f.orders[i0, k - 1, states]
        total[paged] += disc * model.page_cost * ranks[paged]
        forced = k == K + 1
        chosen = g.decisions[i0, np.minimum(k, K) - 1, states] == 1
        registered = ~paged & (forced | chosen)
        total[registered] += disc * model.reg_cost
        reported = paged | registered
        i0[reported] = states[reported]
        k[reported] = 0
    est = float(total.mean())
    se = float(total.std(ddof=1) / np.sqrt(n_cycles)) if n_cycles > 1 else 0.0
    return est, se


@dataclass(frozen=True, eq=False)
class TraceStep:
    """One time step of a simulated trajectory with the network's belief."""

    t: int
    x: int
    paged: bool
    pages_used: int
    registered: bool
    belief: np.ndarray


def export_trace(model, f, g, seed, t_end):
    """Simulate one seeded trajectory and record states, events, beliefs.

    The belief collapses to a point mass at every report and otherwise
    follows the no-report trimming update, exactly mirroring the per-cycle
    belief recursion.
    """
    if t_end < 1:
        raise ValueError("t_end must be at least 1")
    n, K = model.n_states, model.k_max
    rng = np.random.default_rng(seed)
    cum = np.cumsum(model.P, axis=1)
    x = model.x0
    i0, k = x, 0
    w = delta(n, x)
    steps = []
    for t in range(1, t_end + 1):
        x = int((rng.random() > cum[x]).sum())
        k += 1
        paged = bool(rng.random() < model.lambda_p)
        pages = int(f.orders[i0, k - 1, x]) if paged else 0
        registered = False
        if not paged:
            registered = k == K + 1 or g.decisions[i0, k - 1, x] == 1
        if paged or registered:
            w = delta(n, x)
            i0, k = x, 0
        else:
            w = phi_update(w, g.decision(i0, k), model.P)
        steps.append(TraceStep(t, x, paged, pages, registered, w))
    return steps


# ---------------------------------------------------------------------------
# Writers


def write_trace(path, steps, seed):
    """Newline-delimited trace with a sparse index:mass belief column."""
    with open(path, "w") as fh:
        fh.write(f"# trace seed={seed} generator={RNG_ALGORITHM}\n")
        fh.write("# t\tx\tpaged\tpages_used\tregistered\tbelief\n")
        for s in steps:
            nz = np.nonzero(s.belief > 1e-12)[0]
            bel = ",".join(f"{i}:{float(s.belief[i])!r}" for i in nz)
            fh.write(f"{s.t}\t{s.x}\t{int(s.paged)}\t{s.pages_used}\t"
                     f"{int(s.registered)}\t{bel}\n")


def write_trace_table(path, steps):
    """Long-format plot table: one row per (t, state) with belief mass.

    Rows with kind=x mark the actual position; kind=w rows carry the
    belief snapshot, suitable for position-plus-bubble plots.
    """
    with open(path, "w") as fh:
        fh.write("t\tkind\tstate\tmass\n")
        for s in steps:
            fh.write(f"{s.t}\tx\t{s.x}\t1\n")
            for i in np.nonzero(s.belief > 1e-12)[0]:
                fh.write(f"{s.t}\tw\t{i}\t{float(s.belief[i])!r}\n")


def write_cost_report(path, report):
    """Structured-text cost report with all per-report-state values."""
    with open(path, "w") as fh:
        fh.write(f"total {report.total!r}\n")
        for i0, v in enumerate(report.per_report_state):
            fh.write(f"report_state {i0} {float(v)!r}\n")


def read_cost_report(path):
    """Parse a cost report written by write_cost_report; returns (total, per-state)."""
    total = None
    per = {}
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "total":
                total = float(parts[1])
            elif parts[0] == "report_state":
                per[int(parts[1])] = float(parts[2])
    values = np.array([per[i] for i in sorted(per)])
    return total, values
