"""Motion models, cell partitions, policy containers, and model builders.

A motion model is a finite Markov chain over dense 0-based states together
with a partition of the states into paging cells and the cost/discount
parameters of the tracking problem.  Policies are stored as reduced
complexity laws (RCLs): tables indexed by the last reported state ``i0``
and the elapsed time ``k`` since that report.
"""

from dataclasses import dataclass
import json

import numpy as np

ROW_SUM_TOL = 1e-12


def _as_matrix(P):
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError("transition matrix must be square")
    return P


@dataclass(frozen=True, eq=False)
class MotionModel:
    """Markov mobility model with paging/registration economics.

    Attributes:
        P: row-stochastic one-step transition matrix.
        cells: partition of the state indices into paging cells; the tuple
            order fixes the cell indices used for paging tie-breaks.
        x0: initial state, known to the network.
        lambda_p: per-step probability that the mobile must be paged.
        page_cost: cost of searching one cell.
        reg_cost: cost of one registration.
        beta: discount factor in (0, 1).
        k_max: forced-registration horizon; an unreported mobile must
            register once the elapsed time since its last report reaches
            ``k_max + 1``.
    """

    P: np.ndarray
    cells: tuple
    x0: int
    lambda_p: float
    page_cost: float
    reg_cost: float
    beta: float
    k_max: int

    def __post_init__(self):
        P = _as_matrix(self.P)
        n = P.shape[0]
        if np.any(P < 0):
            raise ValueError("transition matrix has negative entries")
        rowsums = P.sum(axis=1)
        if np.any(np.abs(rowsums - 1.0) > ROW_SUM_TOL):
            bad = int(np.argmax(np.abs(rowsums - 1.0)))
            raise ValueError(f"row {bad} of P sums to {rowsums[bad]!r}, not 1")
        cells = tuple(tuple(int(s) for s in c) for c in self.cells)
        flat = [s for c in cells for s in c]
        if any(len(c) == 0 for c in cells):
            raise ValueError("empty cell in partition")
        if sorted(flat) != list(range(n)):
            raise ValueError("cells must partition the state set exactly")
        if not 0 <= self.x0 < n:
            raise ValueError("x0 out of range")
        if not 0.0 <= self.lambda_p < 1.0:
            raise ValueError("lambda_p must lie in [0, 1)")
        if not 0.0 < self.beta < 1.0:
            raise ValueError("beta must lie in (0, 1)")
        if self.page_cost <= 0 or self.reg_cost <= 0:
            raise ValueError("page_cost and reg_cost must be positive")
        if int(self.k_max) < 1:
            raise ValueError("k_max must be at least 1")
        cell_of = np.empty(n, dtype=np.intp)
        for ci, c in enumerate(cells):
            cell_of[list(c)] = ci
        P = P.copy()
        P.setflags(write=False)
        cell_of.setflags(write=False)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "x0", int(self.x0))
        object.__setattr__(self, "k_max", int(self.k_max))
        object.__setattr__(self, "cell_of", cell_of)

    @property
    def n_states(self):
        return self.P.shape[0]

    @property
    def n_cells(self):
        return len(self.cells)


@dataclass(frozen=True, eq=False)
class PagingRCL:
    """Paging reduced complexity law.

    ``orders[i0, k-1, j]`` is the number of cells searched until the cell of
    state ``j`` is paged, when paging happens ``k`` steps after a report in
    state ``i0``.  Defined for k = 1 .. k_max + 1 (a page can still arrive
    at elapsed time k_max + 1, before the forced registration fires).
    """

    orders: np.ndarray

    def __post_init__(self):
        orders = np.asarray(self.orders)
        if orders.ndim != 3 or orders.shape[0] != orders.shape[2]:
            raise ValueError("paging RCL must have shape (n, k_max+1, n)")
        if not np.issubdtype(orders.dtype, np.integer):
            orders = orders.astype(np.int32)
        orders = orders.copy()
        orders.setflags(write=False)
        object.__setattr__(self, "orders", orders)

    @property
    def n_states(self):
        return self.orders.shape[0]

    @property
    def k_max(self):
        return self.orders.shape[1] - 1

    def order(self, i0, k):
        """Paging order vector used at elapsed time k after a report at i0."""
        if not 1 <= k <= self.k_max + 1:
            raise ValueError(f"k={k} outside 1..{self.k_max + 1}")
        return self.orders[i0, k - 1]

    def validate(self, model):
        """Check that every stored slice is a cell-rank permutation."""
        first = np.array([c[0] for c in model.cells])
        for i0 in range(self.n_states):
            sl = self.orders[i0]  # (k_max+1, n)
            if np.any(sl != sl[:, first][:, model.cell_of]):
                raise ValueError(f"paging orders not constant on cells (i0={i0})")
            ranks = np.sort(sl[:, first], axis=1)
            if np.any(ranks != np.arange(1, model.n_cells + 1)):
                raise ValueError(f"paging ranks are not 1..n_cells (i0={i0})")


@dataclass(frozen=True, eq=False)
class RegistrationRCL:
    """Registration reduced complexity law.

    ``decisions[i0, k-1, j]`` is 1 when a mobile in state ``j``, unpaged,
    ``k`` steps after a report in state ``i0``, must register.  Stored for
    k = 1 .. k_max; at k = k_max + 1 registration is forced (all ones, not
    stored).
    """

    decisions: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.decisions)
        if d.ndim != 3 or d.shape[0] != d.shape[2]:
            raise ValueError("registration RCL must have shape (n, k_max, n)")
        if not np.all((d == 0) | (d == 1)):
            raise ValueError("registration decisions must be binary")
        d = d.astype(np.int8)
        d.setflags(write=False)
        object.__setattr__(self, "decisions", d)

    @property
    def n_states(self):
        return self.decisions.shape[0]

    @property
    def k_max(self):
        return self.decisions.shape[1]

    def decision(self, i0, k):
        """Decision vector at elapsed time k; all ones at the forced level."""
        if k == self.k_max + 1:
            return np.ones(self.n_states, dtype=np.int8)
        if not 1 <= k <= self.k_max:
            raise ValueError(f"k={k} outside 1..{self.k_max + 1}")
        return self.decisions[i0, k - 1]

    def decision_matrix(self, k):
        """All-i0 decision matrix at elapsed time k (forced level included)."""
        if k == self.k_max + 1:
            return np.ones((self.n_states, self.n_states), dtype=np.int8)
        return self.decisions[:, k - 1, :]


# ---------------------------------------------------------------------------
# Builders


def build_torus(i_max, j_max, p_sty, p_u, p_d, p_l, p_r, x0, *,
                lambda_p, page_cost, reg_cost, beta, k_max):
    """Torus-wrapped rectangular grid with one state per cell.

    State (i, j) is indexed as i * j_max + j.  Both axes wrap, so every
    cell has exactly four neighbors.  ``x0`` is an (i, j) coordinate pair.
    """
    if i_max < 2 or j_max < 2:
        raise ValueError("torus dimensions must be at least 2x2")
    probs = np.array([p_sty, p_u, p_d, p_l, p_r], dtype=float)
    if np.any(probs < 0) or abs(probs.sum() - 1.0) > ROW_SUM_TOL:
        raise ValueError("stay/up/down/left/right probabilities must sum to 1")
    n = i_max * j_max
    P = np.zeros((n, n))
    for i in range(i_max):
        for j in range(j_max):
            s = i * j_max + j
            P[s, s] += p_sty
            P[s, ((i - 1) % i_max) * j_max + j] += p_u
            P[s, ((i + 1) % i_max) * j_max + j] += p_d
            P[s, i * j_max + (j - 1) % j_max] += p_l
            P[s, i * j_max + (j + 1) % j_max] += p_r
    xi, xj = x0
    cells = tuple((s,) for s in range(n))
    return MotionModel(P, cells, int(xi) * j_max + int(xj), lambda_p,
                       page_cost, reg_cost, beta, k_max)


def build_simple_example(lambda_p, page_cost, reg_cost, beta, k_max=3):
    """Five-state example with cells {0}, {1,2}, {3,4} and a 3-step cycle.

    From state 0 the mobile moves to 1 with probability 0.4 and to 3 with
    probability 0.6; the chains 1->2->0 and 3->4->0 are deterministic.
    Every trajectory revisits state 0 each three steps, so k_max = 3
    already covers one full cycle; larger values tighten the match with
    the unconstrained feedback policies.
    """
    P = np.zeros((5, 5))
    P[0, 1], P[0, 3] = 0.4, 0.6
    P[1, 2] = P[2, 0] = P[3, 4] = P[4, 0] = 1.0
    cells = ((0,), (1, 2), (3, 4))
    return MotionModel(P, cells, 0, lambda_p, page_cost, reg_cost, beta, k_max)


def build_symmetric_walk(half_width, b, *, lambda_p, page_cost, reg_cost,
                         beta, k_max):
    """Truncated symmetric random walk on displacements -W..W, one state/cell.

    ``b`` is an odd-length displacement distribution on {-m, .., m},
    symmetric about zero and nonincreasing in |i|.  States index
    displacements (state s corresponds to displacement s - half_width) and
    boundary rows clamp overflow mass to the edge states; half_width must
    be at least k_max * m so the clamping is unreachable within one
    reporting cycle from the center.
    """
    b = np.asarray(b, dtype=float)
    if b.ndim != 1 or len(b) % 2 == 0:
        raise ValueError("b must be an odd-length displacement distribution")
    m = len(b) // 2
    if np.any(b < 0) or abs(b.sum() - 1.0) > ROW_SUM_TOL:
        raise ValueError("b must be a probability distribution")
    if np.any(np.abs(b - b[::-1]) > ROW_SUM_TOL):
        raise ValueError("b must be symmetric about zero")
    half = b[m:]
    if np.any(np.diff(half) > ROW_SUM_TOL):
        raise ValueError("b must be nonincreasing in |i| (unimodal)")
    W = int(half_width)
    if W < k_max * m:
        raise ValueError(f"half_width={W} too small for k_max={k_max} "
                         f"(needs at least k_max*m={k_max * m})")
    n = 2 * W + 1
    P = np.zeros((n, n))
    for s in range(n):
        for d in range(-m, m + 1):
            t = min(max(s + d, 0), n - 1)
            P[s, t] += b[d + m]
    cells = tuple((s,) for s in range(n))
    return MotionModel(P, cells, W, lambda_p, page_cost, reg_cost, beta, k_max)


def build_explicit(P, cells, x0, *, lambda_p, page_cost, reg_cost, beta, k_max):
    """Model from an explicit transition matrix and cell partition."""
    return MotionModel(np.asarray(P, dtype=float), tuple(tuple(c) for c in cells),
                       x0, lambda_p, page_cost, reg_cost, beta, k_max)


# ---------------------------------------------------------------------------
# Config files

_COMMON_KEYS = ("lambda_p", "page_cost", "reg_cost", "beta", "k_max")


def parse_model_config(cfg):
    """Build a MotionModel from a config mapping; ``kind`` selects a builder."""
    kind = cfg.get("kind")
    try:
        common = {k: cfg[k] for k in _COMMON_KEYS}
    except KeyError as e:
        raise ValueError(f"config missing required field {e.args[0]!r}") from None
    if kind == "torus":
        return build_torus(cfg["i_max"], cfg["j_max"], cfg["p_sty"], cfg["p_u"],
                           cfg["p_d"], cfg["p_l"], cfg["p_r"],
                           tuple(cfg["x0"]), **common)
    if kind == "simple":
        return build_simple_example(cfg["lambda_p"], cfg["page_cost"],
                                    cfg["reg_cost"], cfg["beta"],
                                    k_max=cfg["k_max"])
    if kind == "walk":
        return build_symmetric_walk(cfg["half_width"], cfg["b"], **common)
    if kind == "explicit":
        n = int(cfg["n_states"])
        P = np.asarray(cfg["P"], dtype=float).reshape(n, n)
        return build_explicit(P, cfg["cells"], cfg["x0"], **common)
    raise ValueError(f"unknown model kind {kind!r}")


def load_model_config(path):
    """Read a JSON model config; returns (model, raw config dict)."""
    with open(path) as fh:
        cfg = json.load(fh)
    return parse_model_config(cfg), cfg


# ---------------------------------------------------------------------------
# RCL files: header line, then one row `i0 k v0 v1 ... v{n-1}` per (i0, k).


def write_rcl(path, rcl):
    kind = "paging" if isinstance(rcl, PagingRCL) else "registration"
    table = rcl.orders if kind == "paging" else rcl.decisions
    n = rcl.n_states
    with open(path, "w") as fh:
        fh.write(f"# rcl kind={kind} n_states={n} k_max={rcl.k_max}\n")
        for i0 in range(n):
            for kk in range(table.shape[1]):
                vals = " ".join(str(int(v)) for v in table[i0, kk])
                fh.write(f"{i0} {kk + 1} {vals}\n")


def read_rcl(path):
    """Read an RCL file; returns a PagingRCL or RegistrationRCL per header."""
    with open(path) as fh:
        header = fh.readline().strip()
        fields = dict(tok.split("=") for tok in header.split() if "=" in tok)
        try:
            kind = fields["kind"]
            n = int(fields["n_states"])
            k_max = int(fields["k_max"])
        except KeyError:
            raise ValueError(f"malformed RCL header: {header!r}") from None
        levels = k_max + 1 if kind == "paging" else k_max
        table = np.zeros((n, levels, n), dtype=np.int32)
        seen = np.zeros((n, levels), dtype=bool)
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            i0, k = int(parts[0]), int(parts[1])
            vals = [int(v) for v in parts[2:]]
            if len(vals) != n or not (0 <= i0 < n) or not (1 <= k <= levels):
                raise ValueError(f"bad RCL row: {line!r}")
            table[i0, k - 1] = vals
            seen[i0, k - 1] = True
    if not seen.all():
        raise ValueError("RCL file is missing rows")
    if kind == "paging":
        return PagingRCL(table)
    if kind == "registration":
        return RegistrationRCL(table)
    raise ValueError(f"unknown RCL kind {kind!r}")


# ---------------------------------------------------------------------------
# Policy builders for the concrete model families

# Table rows of the five-state example: which of the states {1, 3} register
# when the mobile was last reported in state 0.
SIMPLE_POLICY_ROWS = {
    "A": (),
    "B": (1,),
    "C": (3,),
    "D": (1, 3),
}

# ML paging ranks for the beliefs that occur in the five-state example.
_SIMPLE_RANKS = {
    "mix13": (3, 2, 2, 1, 1),   # arrival mass (0,.4,0,.6,0): page c2, c1, c0
    "delta0": (1, 2, 2, 3, 3),  # arrival delta(0): page c0 first
    "delta2": (2, 1, 1, 3, 3),  # arrival delta(2): page c1 first
    "delta4": (2, 3, 3, 1, 1),  # arrival delta(4): page c2 first
    "mix24": (3, 2, 2, 1, 1),   # arrival mass (0,0,.4,0,.6)
    "dead": (1, 2, 2, 3, 3),    # unreachable: identity cell order
}

_SIMPLE_PHASE = np.array([0, 1, 2, 1, 2])


def simple_example_policy_pair(model, row):
    """RCL pair (f_X, g_X) for one row X of the simple example's policy table.

    The policies register (per ``row``) exactly when the prior belief is a
    point mass at state 0, which happens at every third step; the paging
    RCL is the matching maximum-likelihood order.  Equal to
    ``derive_paging_rcl(model, g_X)`` for any k_max but built directly from
    the three-step phase structure, so it stays cheap for large k_max.
    """
    if model.n_states != 5 or model.cells != ((0,), (1, 2), (3, 4)):
        raise ValueError("model is not the five-state simple example")
    if row not in SIMPLE_POLICY_ROWS:
        raise ValueError(f"unknown policy row {row!r}")
    reg_states = SIMPLE_POLICY_ROWS[row]
    n, K = 5, model.k_max
    gvec = np.zeros(5, dtype=np.int8)
    gvec[list(reg_states)] = 1

    g = np.zeros((n, K, n), dtype=np.int8)
    f = np.zeros((n, K + 1, n), dtype=np.int32)
    ranks = {k: np.array(v, dtype=np.int32) for k, v in _SIMPLE_RANKS.items()}
    for i0 in range(n):
        phase0 = int(_SIMPLE_PHASE[i0])
        # registration fires on arrivals whose prior belief is delta(0)
        for k in range(1, K + 1):
            if (phase0 + k - 1) % 3 == 0:
                g[i0, k - 1] = gvec
        # row D kills the no-report chain at its first phase-1 arrival
        dead_from = None
        if row == "D":
            first_phase1 = next(k for k in range(1, 4)
                                if (phase0 + k) % 3 == 1)
            dead_from = first_phase1 + 1
        for k in range(1, K + 2):
            if dead_from is not None and k >= dead_from:
                f[i0, k - 1] = ranks["dead"]
                continue
            p = (phase0 + k) % 3
            if p == 1:
                f[i0, k - 1] = ranks["mix13"]
            elif p == 0:
                f[i0, k - 1] = ranks["delta0"]
            elif k == 1:  # lead-in from a report in state 1 or 3
                f[i0, k - 1] = ranks["delta2"] if i0 == 1 else ranks["delta4"]
            else:
                key = {"A": "mix24", "B": "delta4", "C": "delta2"}[row]
                f[i0, k - 1] = ranks[key]
    return PagingRCL(f), RegistrationRCL(g)


def ping_pong_order(n_states, i0):
    """Paging ranks searching states by increasing distance from i0.

    Positive displacements are searched before negative ones of the same
    magnitude, matching the canonical order 0, +1, -1, +2, -2, ...
    """
    d = np.arange(n_states) - i0
    order = np.lexsort((d < 0, np.abs(d)))
    ranks = np.empty(n_states, dtype=np.int32)
    ranks[order] = np.arange(1, n_states + 1)
    return ranks


def stationary_walk_policies(model, d_l, d_r):
    """Ping-pong paging plus distance-threshold registration RCLs for a walk.

    Registration fires whenever the displacement from the last report is
    >= d_r or <= -d_l, independent of elapsed time.
    """
    if d_l < 1 or d_r < 1:
        raise ValueError("thresholds must be at least 1")
    n, K = model.n_states, model.k_max
    f = np.zeros((n, K + 1, n), dtype=np.int32)
    g = np.zeros((n, K, n), dtype=np.int8)
    for i0 in range(n):
        disp = np.arange(n) - i0
        f[i0, :, :] = ping_pong_order(n, i0)
        g[i0, :, :] = ((disp >= d_r) | (disp <= -d_l)).astype(np.int8)
    return PagingRCL(f), RegistrationRCL(g)
