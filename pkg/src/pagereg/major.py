"""Majorization, rearrangement, and neatness tools for random-walk structure.

The majorization order compares how concentrated two mass vectors are:
x majorized by y means every partial sum of y's nonincreasing rearrangement
dominates x's, with equal totals.  Searching is never harder under the
more concentrated distribution, which is what makes these tools the right
instrument for verifying the ping-pong/threshold structure of optimal
walk policies.
"""

from dataclasses import dataclass

import numpy as np

from .belief import belief_recursion

PARTIAL_SUM_TOL = 1e-12  # strict float comparisons on partial sums are brittle
MASS_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class FiniteDistribution:
    """Probability masses on a finite set of integer offsets."""

    offsets: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        offsets = np.asarray(self.offsets, dtype=int)
        masses = np.asarray(self.masses, dtype=float)
        if offsets.shape != masses.shape or offsets.ndim != 1:
            raise ValueError("offsets and masses must be matching 1-D arrays")
        if len(np.unique(offsets)) != len(offsets):
            raise ValueError("duplicate offsets")
        if np.any(masses < 0) or abs(masses.sum() - 1.0) > MASS_TOL:
            raise ValueError("masses must be nonnegative and sum to 1")
        order = np.argsort(offsets)
        offsets = offsets[order].copy()
        masses = masses[order].copy()
        offsets.setflags(write=False)
        masses.setflags(write=False)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "masses", masses)

    @classmethod
    def delta(cls, offset=0):
        return cls(np.array([offset]), np.array([1.0]))

    @classmethod
    def centered(cls, masses):
        """Distribution on {-m..m} from an odd-length mass array."""
        masses = np.asarray(masses, dtype=float)
        m = len(masses) // 2
        return cls(np.arange(-m, m + 1), masses)

    def mass_at(self, offset):
        hit = np.nonzero(self.offsets == offset)[0]
        return float(self.masses[hit[0]]) if hit.size else 0.0


def _masses(x):
    return x.masses if isinstance(x, FiniteDistribution) else \
        np.asarray(x, dtype=float)


def rearrange_nonincreasing(x):
    """Masses sorted in nonincreasing order."""
    return np.sort(_masses(x))[::-1]


def majorizes(x, y, atol=PARTIAL_SUM_TOL):
    """True iff x is majorized by y (x ≺ y).

    Accepts FiniteDistributions or plain nonnegative vectors with equal
    totals; shorter vectors are zero-padded.
    """
    xs = rearrange_nonincreasing(x)
    ys = rearrange_nonincreasing(y)
    n = max(len(xs), len(ys))
    xs = np.pad(xs, (0, n - len(xs)))
    ys = np.pad(ys, (0, n - len(ys)))
    if abs(xs.sum() - ys.sum()) > atol:
        return False
    return bool(np.all(np.cumsum(xs) <= np.cumsum(ys) + atol))


def is_neat(x, atol=0.0):
    """Check the interleaved chain m0 >= m1 >= m-1 >= m2 >= m-2 >= ...

    ``x`` may be a FiniteDistribution or a (values, center_index) pair for
    raw sequences such as value functions.
    """
    if isinstance(x, FiniteDistribution):
        lo, hi = int(x.offsets[0]), int(x.offsets[-1])
        reach = max(abs(lo), abs(hi))
        m = {int(o): float(v) for o, v in zip(x.offsets, x.masses)}
        seq = [m.get(0, 0.0)]
        for i in range(1, reach + 1):
            seq.extend([m.get(i, 0.0), m.get(-i, 0.0)])
    else:
        values, center = x
        values = np.asarray(values, dtype=float)
        seq = [values[center]]
        for i in range(1, max(center, len(values) - 1 - center) + 1):
            seq.append(values[center + i] if center + i < len(values) else -np.inf)
            seq.append(values[center - i] if center - i >= 0 else -np.inf)
        seq = [v for v in seq if v != -np.inf]
    return bool(np.all(np.diff(seq) <= atol))


def min_likelihood_trim(mu, lam):
    """Remove mass ``lam`` from the smallest entries of mu and renormalize.

    The result is maximal in the majorization order among all trims
    nu with (1 - lam) * nu <= mu pointwise.
    """
    if not 0.0 <= lam < 1.0:
        raise ValueError("lambda must lie in [0, 1)")
    masses = mu.masses.copy()
    order = np.argsort(masses)  # ascending: trim least likely first
    left = lam
    for i in order:
        take = min(masses[i], left)
        masses[i] -= take
        left -= take
        if left <= 0:
            break
    return FiniteDistribution(mu.offsets, masses / (1.0 - lam))


def convolve(x, b):
    """Convolution of two finite distributions (offsets add, masses convolve)."""
    lo_x, lo_b = int(x.offsets[0]), int(b.offsets[0])
    hi_x, hi_b = int(x.offsets[-1]), int(b.offsets[-1])
    dense_x = np.zeros(hi_x - lo_x + 1)
    dense_x[x.offsets - lo_x] = x.masses
    dense_b = np.zeros(hi_b - lo_b + 1)
    dense_b[b.offsets - lo_b] = b.masses
    out = np.convolve(dense_x, dense_b)
    return FiniteDistribution(np.arange(lo_x + lo_b, hi_x + hi_b + 1), out)


# ---------------------------------------------------------------------------
# Seeded generators for property suites


def random_majorization_pair(rng, n, transforms=None):
    """A pair (x, y) of mass vectors with x ≺ y, via random T-transforms.

    y is a random distribution; x is y hit by a product of random
    T-transforms (doubly stochastic), which is the classical construction
    of a majorization-dominated vector.
    """
    y = rng.random(n) + 1e-3
    y /= y.sum()
    x = y.copy()
    for _ in range(transforms if transforms is not None else 2 * n):
        i, j = rng.integers(0, n, size=2)
        if i == j:
            continue
        t = rng.random()
        xi, xj = x[i], x[j]
        x[i] = t * xi + (1 - t) * xj
        x[j] = (1 - t) * xi + t * xj
    return x, y


def random_neat(rng, half_support):
    """Random neat distribution on {-half_support..half_support}."""
    vals = np.sort(rng.random(2 * half_support + 1))[::-1]
    masses = np.zeros(2 * half_support + 1)
    masses[half_support] = vals[0]
    for i in range(1, half_support + 1):
        masses[half_support + i] = vals[2 * i - 1]
        masses[half_support - i] = vals[2 * i]
    return FiniteDistribution.centered(masses / masses.sum())


def random_symmetric_unimodal(rng, half_support):
    """Random symmetric, unimodal displacement kernel on {-m..m}."""
    half = np.sort(rng.random(half_support + 1))[::-1]
    masses = np.concatenate([half[::-1], half[1:]])
    return FiniteDistribution.centered(masses / masses.sum())


# ---------------------------------------------------------------------------
# Walk-policy structure checks


@dataclass(frozen=True)
class SliceStructure:
    """Structure of one (i0, k) policy slice on its reachable support."""

    i0: int
    k: int
    ping_pong: bool
    threshold: bool
    d_l: int | None
    d_r: int | None


@dataclass
class WalkStructureReport:
    """Aggregate ping-pong / distance-threshold verdict for a policy pair."""

    ping_pong: bool
    threshold: bool
    slices: list

    @property
    def ok(self):
        return self.ping_pong and self.threshold


def _interior_states(model):
    """Report states whose cycles cannot reach the clamped boundary."""
    n = model.n_states
    center = (n - 1) // 2
    row = model.P[center]
    m = int(max(abs(np.nonzero(row > 0)[0] - center)))
    margin = (model.k_max + 1) * m
    return [i0 for i0 in range(n) if margin <= i0 < n - margin]


def check_walk_structure(model, f, g):
    """Verify ping-pong paging and threshold registration on a walk model.

    For every interior report state and elapsed time, checks (on the
    reachable support under ``g``) that the paging ranks search states in
    nondecreasing distance from the last report -- a farther state may
    come earlier only when it ties the nearer one in arrival probability,
    since ties may be broken arbitrarily -- and that the registered states
    are exactly the support outside an interval around it with threshold
    asymmetry at most one.  Either left/right orientation of the
    asymmetry is accepted.
    """
    slices = []
    all_pp, all_th = True, False
    any_slice = False
    for i0 in _interior_states(model):
        seq = belief_recursion(model, g, i0)
        for k in range(1, model.k_max + 2):
            if k - 1 > seq.last_k:
                break
            arrival = seq.w[k - 1] @ model.P
            support = np.nonzero(arrival > MASS_TOL)[0]
            if support.size == 0:
                break
            ranks = f.orders[i0, k - 1, support]
            dist = np.abs(support - i0)
            mass = arrival[support]
            by_rank = np.argsort(ranks)
            pp = True
            for a in range(len(by_rank)):
                for b in range(a + 1, len(by_rank)):
                    if dist[by_rank[a]] > dist[by_rank[b]] \
                            and abs(mass[by_rank[a]] - mass[by_rank[b]]) \
                            > MASS_TOL:
                        pp = False
                        break
                if not pp:
                    break
            th, d_l, d_r = True, None, None
            if k <= model.k_max:
                reg = g.decisions[i0, k - 1, support] == 1
                disp = support - i0
                cont = disp[~reg]
                th = False
                if np.any(~reg) and np.all(np.diff(np.sort(cont)) == 1) \
                        and cont.min() <= 0 <= cont.max():
                    right = disp[reg & (disp > 0)]
                    left = -disp[reg & (disp < 0)]
                    d_r = int(right.min()) if right.size else None
                    d_l = int(left.min()) if left.size else None
                    # no register below the implied thresholds (no holes)
                    lo = -(d_l if d_l is not None else disp.max() + 1)
                    hi = d_r if d_r is not None else disp.max() + 1
                    th = bool(np.all(reg == ((disp >= hi) | (disp <= lo))))
                    if th and d_l is not None and d_r is not None:
                        th = abs(d_l - d_r) <= 1
            any_slice = True
            all_pp &= pp
            all_th = th if not slices else (all_th and th)
            slices.append(SliceStructure(i0, k, pp, th, d_l, d_r))
    if not any_slice:
        raise ValueError("no interior report states; widen the walk model")
    return WalkStructureReport(all_pp, all_th, slices)
