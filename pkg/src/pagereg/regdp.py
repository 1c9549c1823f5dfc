"""Value iteration over augmented states (i0, k, j) for optimal registration.

For a fixed paging RCL the optimal registration RCL solves a dynamic
program whose state is (last reported state, elapsed time, current state).
Each sweep propagates one full reporting cycle: level k is computed from
level k+1 of the same sweep and from the previous sweep's post-report
values V(l, 0, l).  Registration is forced at elapsed time k_max + 1,
which the value table carries as an infinity sentinel level (a flag; the
recursion never does arithmetic on it).
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NonConvergence
from .model import RegistrationRCL, ping_pong_order

# Headroom added to the sup-norm contraction-factor check; differences at
# the tolerance floor carry float dust from the matrix products.
CONTRACTION_SLACK = 1e-12


def value_bound(model):
    """Upper bound on any cost-to-go: discounted worst per-step cost."""
    per_step = model.lambda_p * model.page_cost * model.n_cells + model.reg_cost
    return model.beta * per_step / (1.0 - model.beta)


def default_sweep_cap(model, tol):
    """Iterations needed for beta-contraction to push V0=0 below tol."""
    vb = max(value_bound(model), tol)
    cap = np.log(tol * (1.0 - model.beta) / vb) / np.log(model.beta)
    return int(np.ceil(max(cap, 1.0))) + 50


@dataclass
class ValueIterationResult:
    """Converged cost-to-go table plus per-sweep diagnostics.

    ``V[i0, k, j]`` for k = 0..k_max+1; the top level is the +inf forced-
    registration sentinel.  ``sweep_diffs`` holds the sup-norm change of
    each sweep.
    """

    V: np.ndarray
    sweeps: int
    sweep_diffs: list = field(default_factory=list)

    @property
    def sweep_ratios(self):
        d = self.sweep_diffs
        return [d[i] / d[i - 1] for i in range(1, len(d)) if d[i - 1] > 0]


def _sweep(model, forders, V_prev, v0_prev):
    """One application of the cycle operator T."""
    n, K = model.n_states, model.k_max
    lam, beta = model.lambda_p, model.beta
    register = model.reg_cost + v0_prev  # (n_l,)
    V_new = np.empty_like(V_prev)
    for k in range(K, -1, -1):
        page = lam * (model.page_cost * forders[:, k, :] + v0_prev[None, :])
        if k == K:
            # continuing past k_max is the sentinel: min resolves to register
            unpaged = np.broadcast_to(register, (n, n))
        else:
            unpaged = np.minimum(V_new[:, k + 1, :], register)
        V_new[:, k, :] = beta * ((page + (1.0 - lam) * unpaged) @ model.P.T)
    return V_new


def value_iteration(model, f, tol=1e-10, max_sweeps=None):
    """Iterate V_m = T(V_{m-1}) from V0 = 0 until the sup-norm change < tol.

    The returned table satisfies the fixed-point equation within
    tol * beta / (1 - beta).  Every sweep is checked against the beta
    contraction bound.

    Raises:
        NonConvergence: sweep cap exceeded or contraction violated.
    """
    n, K = model.n_states, model.k_max
    if f.n_states != n or f.k_max != K:
        raise ValueError("paging RCL does not match the model")
    if max_sweeps is None:
        max_sweeps = default_sweep_cap(model, tol)
    forders = f.orders.astype(float)
    V = np.zeros((n, K + 1, n))
    v0 = np.zeros(n)
    diffs = []
    for sweep in range(1, max_sweeps + 1):
        V_new = _sweep(model, forders, V, v0)
        diff = float(np.max(np.abs(V_new - V)))
        if diffs and diffs[-1] > 0:
            if diff > model.beta * diffs[-1] + CONTRACTION_SLACK:
                raise NonConvergence(
                    f"sweep {sweep} contracted by {diff / diffs[-1]:.6g} "
                    f"> beta={model.beta}")
        diffs.append(diff)
        V = V_new
        v0 = V[np.arange(n), 0, np.arange(n)]
        if diff < tol:
            full = np.full((n, K + 2, n), np.inf)
            full[:, :K + 1, :] = V
            return ValueIterationResult(full, sweep, diffs)
    raise NonConvergence(f"no convergence to {tol} within {max_sweeps} sweeps")


def fixed_point_residual(model, f, result):
    """Sup-norm of V - T(V) for a converged table (sentinel level excluded)."""
    n, K = model.n_states, model.k_max
    V = result.V[:, :K + 1, :]
    v0 = V[np.arange(n), 0, np.arange(n)]
    return float(np.max(np.abs(_sweep(model, f.orders.astype(float), V, v0) - V)))


def extract_registration(model, V):
    """Optimal registration RCL from a converged value table.

    A mobile arriving in state l at elapsed time k registers exactly when
    continuing is strictly worse: V(i0, k, l) > reg_cost + V(l, 0, l).
    Ties prefer not registering.  The forced all-ones level at k_max + 1
    is implicit in the RCL convention and not stored.
    """
    if isinstance(V, ValueIterationResult):
        V = V.V
    n, K = model.n_states, model.k_max
    v0 = V[np.arange(n), 0, np.arange(n)]
    g = V[:, 1:K + 1, :] > model.reg_cost + v0[None, None, :]
    return RegistrationRCL(g.astype(np.int8))


# ---------------------------------------------------------------------------
# Translation-invariant variant for symmetric random walks


@dataclass
class WalkValueResult:
    """Stationary displacement-indexed values and the threshold policy.

    ``V[j]`` is the cost-to-go at displacement j - half_width from the last
    report.  ``g`` is the stationary register-decision vector; ``d_l`` and
    ``d_r`` are the distance thresholds (register at displacement >= d_r or
    <= -d_l), None on a side where no state registers.
    """

    V: np.ndarray
    g: np.ndarray
    d_l: int | None
    d_r: int | None
    is_threshold: bool
    sweeps: int
    sweep_diffs: list = field(default_factory=list)


def walk_value_iteration(model, f_star=None, tol=1e-10, max_sweeps=None):
    """Stationary value iteration for a symmetric-walk model.

    Uses the time-independent recursion over displacements with the
    ping-pong paging order ``f_star`` (canonical 0, +1, -1, +2, -2, ...
    by default).  Registration is extracted as V(l) >= reg_cost + V(0),
    registering on ties, and reported as distance thresholds.
    """
    n = model.n_states
    center = model.x0
    if f_star is None:
        f_star = ping_pong_order(n, center).astype(float)
    else:
        f_star = np.asarray(f_star, dtype=float)
    lam, beta = model.lambda_p, model.beta
    if max_sweeps is None:
        max_sweeps = default_sweep_cap(model, tol)
    V = np.zeros(n)
    diffs = []
    for sweep in range(1, max_sweeps + 1):
        stay = np.minimum(V, model.reg_cost + V[center])
        term = lam * (model.page_cost * f_star + V[center]) + (1.0 - lam) * stay
        V_new = beta * (model.P @ term)
        diff = float(np.max(np.abs(V_new - V)))
        if diffs and diffs[-1] > 0:
            if diff > beta * diffs[-1] + CONTRACTION_SLACK:
                raise NonConvergence(
                    f"sweep {sweep} contracted by {diff / diffs[-1]:.6g} "
                    f"> beta={beta}")
        diffs.append(diff)
        V = V_new
        if diff < tol:
            break
    else:
        raise NonConvergence(f"no convergence to {tol} within {max_sweeps} sweeps")

    g = (V >= model.reg_cost + V[center]).astype(np.int8)
    disp = np.arange(n) - center
    right = disp[(g == 1) & (disp > 0)]
    left = -disp[(g == 1) & (disp < 0)]
    d_r = int(right.min()) if right.size else None
    d_l = int(left.min()) if left.size else None
    # threshold form: the continue set is exactly the interval between them
    lo = -(d_l if d_l is not None else center + 1)
    hi = d_r if d_r is not None else n - center
    expected = (disp >= hi) | (disp <= lo)
    is_threshold = bool(np.array_equal(expected.astype(np.int8), g))
    return WalkValueResult(V, g, d_l, d_r, is_threshold, len(diffs), diffs)
