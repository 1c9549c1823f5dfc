"""Conditional-distribution updates for the network's belief about the mobile.

The belief w is the network's conditional distribution of the mobile's state
given its observations: a 1-D probability vector over states.  On a step
with no report the belief evolves by the trimming update ``phi_update``;
a report collapses it to a point mass.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ZeroSurvivalMass

# Normalizing masses at or below this are treated as zero (no-report
# impossible); negative dust above -NEG_CLAMP_TOL is clamped to zero.
ZERO_MASS_TOL = 1e-15
NEG_CLAMP_TOL = 1e-15


def delta(n_states, l):
    """Point-mass belief at state l."""
    w = np.zeros(n_states)
    w[l] = 1.0
    return w


def phi_update(w, d, P):
    """One-step belief update conditioned on no report.

    Moves the belief through ``P``, removes the mass that would have
    registered under decision vector ``d`` (entries in [0, 1]), and
    renormalizes.

    Raises:
        ZeroSurvivalMass: the surviving mass is zero (within 1e-15), i.e.
            a no-report outcome is impossible from this belief.
    """
    w = np.asarray(w, dtype=float)
    d = np.asarray(d, dtype=float)
    survive = (w @ P) * (1.0 - d)
    z = survive.sum()
    if z <= ZERO_MASS_TOL:
        raise ZeroSurvivalMass(f"no-report mass {z!r} is zero within "
                               f"{ZERO_MASS_TOL}")
    out = survive / z
    if np.any(out < 0):
        if np.any(out < -NEG_CLAMP_TOL):
            raise ValueError("belief update produced a real negative mass")
        out = np.clip(out, 0.0, None)
        out /= out.sum()
    return out


@dataclass(frozen=True, eq=False)
class BeliefSequence:
    """Per-cycle beliefs w(i0, 0..last_k) and an optional truncation marker.

    ``w[k]`` is the belief at elapsed time k since a report in state i0,
    given no report so far.  When a no-report outcome becomes impossible at
    step ``truncated_at`` the sequence stops at ``truncated_at - 1``.
    """

    w: np.ndarray
    truncated_at: int | None = None

    @property
    def last_k(self):
        return self.w.shape[0] - 1


def belief_recursion(model, g, i0):
    """Beliefs w(i0, k) for k = 0..k_max under registration RCL ``g``.

    Starts from the point mass at i0 and applies ``phi_update`` with the
    decision vector for each elapsed time.  Truncates (and records the
    truncation point) if the no-report probability hits zero.
    """
    n = model.n_states
    ws = [delta(n, i0)]
    for k in range(1, model.k_max + 1):
        try:
            ws.append(phi_update(ws[-1], g.decision(i0, k), model.P))
        except ZeroSurvivalMass:
            return BeliefSequence(np.array(ws), truncated_at=k)
    return BeliefSequence(np.array(ws))
