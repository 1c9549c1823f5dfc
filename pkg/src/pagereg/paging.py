"""Maximum-likelihood serial paging: cell orders and search-cost measures."""

import numpy as np

from .belief import belief_recursion
from .model import PagingRCL


def aggregate_cells(model, state_dist):
    """Collapse a distribution over states to one over cells."""
    q = np.zeros(model.n_cells)
    np.add.at(q, model.cell_of, np.asarray(state_dist, dtype=float))
    return q


def rank_cells(q):
    """Cell ranks 1..n_cells by decreasing probability, ties by cell index."""
    q = np.asarray(q, dtype=float)
    order = np.lexsort((np.arange(len(q)), -q))
    ranks = np.empty(len(q), dtype=np.int32)
    ranks[order] = np.arange(1, len(q) + 1)
    return ranks


def ml_paging_order(model, q):
    """State-level paging order vector for cell distribution ``q``.

    Cells are searched in order of decreasing probability; ties break
    toward the lower cell index so the whole pipeline is deterministic.
    """
    return rank_cells(q)[model.cell_of]


def guessing_entropy(q):
    """Mean number of cells searched under the optimal (ML) order.

    s(q) = sum_i i * q_[i] with q_[i] the nonincreasing rearrangement.
    """
    q = np.sort(np.asarray(q, dtype=float))[::-1]
    return float(q @ np.arange(1, len(q) + 1))


def derive_paging_rcl(model, g):
    """Optimal paging RCL for a fixed registration RCL.

    For every (i0, k) the paging distribution is the no-report belief
    pushed one step through P; the order is its ML cell ranking.  Slices
    past a belief-recursion truncation are unreachable and get the
    identity cell order.
    """
    n, K = model.n_states, model.k_max
    identity = rank_cells(np.zeros(model.n_cells))[model.cell_of]
    orders = np.empty((n, K + 1, n), dtype=np.int32)
    for i0 in range(n):
        seq = belief_recursion(model, g, i0)
        for k in range(1, K + 2):
            if k - 1 <= seq.last_k:
                q = aggregate_cells(model, seq.w[k - 1] @ model.P)
                orders[i0, k - 1] = rank_cells(q)[model.cell_of]
            else:
                orders[i0, k - 1] = identity
    return PagingRCL(orders)
