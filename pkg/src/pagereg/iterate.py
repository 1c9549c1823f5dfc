"""Alternating policy optimization and the finite-belief-chain joint DP.

``individually_optimal`` alternates maximum-likelihood paging derivation
with the registration dynamic program until the cost stops improving; the
resulting pair is individually optimal (each policy optimal holding the
other fixed).  For models whose reachable belief set is finite,
``reachable_beliefs`` enumerates that set and ``joint_dp`` value-iterates
the belief-space optimality equation restricted to it, certifying jointly
optimal feedback policies.
"""

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .belief import delta, phi_update
from .cost import policy_cost
from .errors import CapExceeded, NonConvergence
from .model import PagingRCL, RegistrationRCL
from .paging import aggregate_cells, derive_paging_rcl, guessing_entropy, \
    ml_paging_order
from .regdp import default_sweep_cap, extract_registration, value_iteration

DEDUP_TOL = 1e-9     # sup-norm belief dedup; closure finiteness depends on it
SUPPORT_TOL = 1e-12  # mass below this does not count as reachable support


@dataclass(frozen=True)
class RoundRecord:
    round: int
    cost_after_paging: float
    cost_after_registration: float


@dataclass
class IterationLog:
    """Cost trajectory and final pair of the alternating optimization."""

    rounds: list
    f: PagingRCL
    g: RegistrationRCL
    cost: float
    converged: bool

    def cost_sequence(self):
        out = []
        for r in self.rounds:
            out.extend([r.cost_after_paging, r.cost_after_registration])
        return out


def individually_optimal(model, g0, tol=1e-12, vi_tol=1e-12, max_rounds=100):
    """Alternate ML paging and the registration DP to an individually optimal pair.

    Starting from registration RCL ``g0``, each round derives the optimal
    paging RCL for the current registration RCL and then the optimal
    registration RCL for that paging RCL.  Stops when a registration step
    no longer improves the cost (within ``tol``); the pair before that
    step is returned.  The logged cost sequence is nonincreasing.

    Raises:
        NonConvergence: round cap exceeded, or a step increased the cost
            by more than 1e-12 (which the theory rules out).
    """
    g = g0
    rounds = []
    prev = np.inf
    for rnd in range(1, max_rounds + 1):
        f = derive_paging_rcl(model, g)
        cost_fg = policy_cost(model, f, g).total
        g_next = extract_registration(model, value_iteration(model, f, tol=vi_tol))
        cost_fg_next = policy_cost(model, f, g_next).total
        if cost_fg > prev + 1e-12 or cost_fg_next > cost_fg + 1e-12:
            raise NonConvergence(
                f"cost increased in round {rnd}: {prev} -> {cost_fg} -> "
                f"{cost_fg_next}")
        rounds.append(RoundRecord(rnd, cost_fg, cost_fg_next))
        if cost_fg - cost_fg_next <= tol:
            return IterationLog(rounds, f, g, cost_fg, True)
        g = g_next
        prev = cost_fg_next
    raise NonConvergence(f"no fixed point within {max_rounds} rounds")


def optimality_certificate(model, f, g, tol=1e-12):
    """Check that neither half-step improves the pair's cost by more than tol.

    Returns (passed, paging_delta, registration_delta) where the deltas
    are the cost changes from re-deriving each policy with the other held
    fixed.
    """
    base = policy_cost(model, f, g).total
    f2 = derive_paging_rcl(model, g)
    d_pag = base - policy_cost(model, f2, g).total
    g2 = extract_registration(model, value_iteration(model, f, tol=min(tol, 1e-12)))
    d_reg = base - policy_cost(model, f, g2).total
    return (abs(d_pag) <= tol and abs(d_reg) <= tol), d_pag, d_reg


# ---------------------------------------------------------------------------
# Reachable belief enumeration


@dataclass(frozen=True)
class TrimTransition:
    """No-report successor of a belief node under one binary trim.

    ``trim`` is the registered subset of the post-transition support;
    ``survive_mass`` the no-report probability (before the page coin);
    ``successor`` the chain index of the surviving belief, or None when
    the trim removes all mass.
    """

    trim: tuple
    survive_mass: float
    successor: int | None


@dataclass
class BeliefNode:
    w: np.ndarray
    wP: np.ndarray
    support: tuple
    trims: list = field(default_factory=list)


@dataclass
class BeliefChain:
    """Finite belief set closed under report collapse and binary trimming."""

    nodes: list
    root: int

    def __len__(self):
        return len(self.nodes)

    def find(self, w):
        for idx, node in enumerate(self.nodes):
            if np.max(np.abs(node.w - w)) <= DEDUP_TOL:
                return idx
        return None


def reachable_beliefs(model, cap):
    """Breadth-first closure of the belief set from the initial point mass.

    From every belief the successors are (a) the point masses at each
    state reachable by a report and (b) the trimming update for every
    binary registration decision restricted to the post-transition
    support.  Beliefs are deduplicated at sup-norm 1e-9.

    Raises:
        CapExceeded: more than ``cap`` distinct beliefs were found, so the
            model is unsuitable for the exact joint DP.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    n = model.n_states
    chain = BeliefChain([], 0)

    def add(w):
        idx = chain.find(w)
        if idx is not None:
            return idx
        if len(chain.nodes) + 1 > cap:
            raise CapExceeded(f"belief closure exceeds cap={cap}")
        wP = w @ model.P
        support = tuple(int(s) for s in np.nonzero(wP > SUPPORT_TOL)[0])
        chain.nodes.append(BeliefNode(w, wP, support))
        return len(chain.nodes) - 1

    chain.root = add(delta(n, model.x0))
    frontier = [chain.root]
    while frontier:
        next_frontier = []

        def visit(w):
            seen = chain.find(w)
            idx = add(w)
            if seen is None:
                next_frontier.append(idx)
            return idx

        for idx in frontier:
            node = chain.nodes[idx]
            for l in node.support:
                visit(delta(n, l))
            for r in range(len(node.support) + 1):
                for trim in combinations(node.support, r):
                    d = np.zeros(n)
                    d[list(trim)] = 1.0
                    survive = float((node.wP * (1.0 - d)).sum())
                    if survive <= SUPPORT_TOL:
                        node.trims.append(TrimTransition(trim, 0.0, None))
                        continue
                    succ = visit(phi_update(node.w, d, model.P))
                    node.trims.append(TrimTransition(trim, survive, succ))
        frontier = next_frontier
    return chain


# ---------------------------------------------------------------------------
# Joint DP on the chain


@dataclass
class JointDPResult:
    """Jointly optimal feedback pair on a finite belief chain.

    ``values[i]`` is the optimal cost-to-go at node i; ``g_bar[i]`` the
    optimal binary registration vector applied to arrivals out of node i;
    ``f_bar[i]`` the matching ML paging order vector.
    """

    chain: BeliefChain
    values: np.ndarray
    g_bar: list
    f_bar: list
    sweeps: int

    def value_at_root(self):
        return float(self.values[self.chain.root])


def joint_dp(model, chain, tol=1e-12, max_sweeps=None):
    """Value-iterate the belief-space optimality equation on a finite chain.

    Each sweep evaluates, per node, the discounted page cost (via the
    guessing entropy of the post-transition cell masses), the report
    continuations, and the best binary trim of the support; binary
    decisions suffice for optimality.  Ties prefer fewer registrations,
    then lexicographic order, so results are deterministic.
    """
    lam, beta = model.lambda_p, model.beta
    n_nodes = len(chain.nodes)
    if max_sweeps is None:
        max_sweeps = default_sweep_cap(model, tol)
    delta_idx = {}
    for i, node in enumerate(chain.nodes):
        sup = np.nonzero(node.w > 1.0 - DEDUP_TOL)[0]
        if sup.size == 1 and abs(node.w[sup[0]] - 1.0) <= DEDUP_TOL:
            delta_idx[int(sup[0])] = i

    page_cost = np.array([
        lam * model.page_cost * guessing_entropy(aggregate_cells(model, node.wP))
        for node in chain.nodes])

    U = np.zeros(n_nodes)
    for sweep in range(1, max_sweeps + 1):
        U_new = np.empty(n_nodes)
        for i, node in enumerate(chain.nodes):
            repval = sum(node.wP[l] * U[delta_idx[l]] for l in node.support)
            best = np.inf
            for tr in node.trims:
                regcost = sum(node.wP[l] * (model.reg_cost + U[delta_idx[l]])
                              for l in tr.trim)
                cont = tr.survive_mass * U[tr.successor] \
                    if tr.successor is not None else 0.0
                val = (1.0 - lam) * (regcost + cont)
                if val < best:
                    best = val
            U_new[i] = beta * (page_cost[i] + lam * repval + best)
        diff = float(np.max(np.abs(U_new - U)))
        U = U_new
        if diff < tol:
            break
    else:
        raise NonConvergence(f"joint DP did not reach {tol} within "
                             f"{max_sweeps} sweeps")

    g_bar, f_bar = [], []
    for i, node in enumerate(chain.nodes):
        best, best_trim = np.inf, ()
        for tr in node.trims:  # trims are ordered by (size, lex): ties keep first
            regcost = sum(node.wP[l] * (model.reg_cost + U[delta_idx[l]])
                          for l in tr.trim)
            cont = tr.survive_mass * U[tr.successor] \
                if tr.successor is not None else 0.0
            val = (1.0 - lam) * (regcost + cont)
            if val < best - 1e-15:
                best, best_trim = val, tr.trim
        gvec = np.zeros(model.n_states, dtype=np.int8)
        gvec[list(best_trim)] = 1
        g_bar.append(gvec)
        f_bar.append(ml_paging_order(model, aggregate_cells(model, node.wP)))
    return JointDPResult(chain, U, g_bar, f_bar, sweep)


def joint_policy_rcls(model, result):
    """Convert a joint DP feedback pair into RCLs for the model's k_max.

    Walks the no-report chain from every point mass, reading off the
    feedback decisions; the paging RCL is then re-derived from the
    registration RCL so both use identical conventions.
    """
    chain = result.chain
    n, K = model.n_states, model.k_max
    g = np.zeros((n, K, n), dtype=np.int8)
    for i0 in range(n):
        idx = chain.find(delta(n, i0))
        if idx is None:
            continue
        for k in range(1, K + 1):
            node = chain.nodes[idx]
            gvec = result.g_bar[idx]
            g[i0, k - 1] = gvec
            trim = tuple(int(l) for l in np.nonzero(gvec)[0]
                         if l in node.support)
            nxt = next(t for t in node.trims if t.trim == trim)
            if nxt.successor is None:
                break
            idx = nxt.successor
    g_rcl = RegistrationRCL(g)
    return derive_paging_rcl(model, g_rcl), g_rcl
