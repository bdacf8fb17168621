"""Distribution functions, rearrangements, weighted Lorentz norms and BMO.

A weight argument ``w`` is either ``None`` (Lebesgue measure) or any object
with a ``cell_mass(lo, hi)`` method returning the exact w-measure of each
cell ``[lo_i, hi_i)`` (see :class:`aplab.weights.Weight`).
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, InvalidWeight
from .funcs1d import StepFunction1D
from .operators import _oscillation, _padded


@dataclass(frozen=True)
class DistributionFunction:
    """``measures[j] = w({|f| >= thresholds[j]})`` with thresholds decreasing.

    For ``thresholds[j+1] <= lam < thresholds[j]`` the measure of
    ``{|f| > lam}`` is ``measures[j]``.
    """

    thresholds: np.ndarray
    measures: np.ndarray
    weight_id: str = "const:1"

    def __call__(self, lam):
        lam = np.asarray(lam)
        # number of thresholds strictly above lam
        n = np.searchsorted(-self.thresholds, -lam, side="left")
        m = np.concatenate(([0.0], self.measures)).astype(self.measures.dtype)
        return m[n]

    def __eq__(self, other):
        return (
            isinstance(other, DistributionFunction)
            and np.array_equal(self.thresholds, other.thresholds)
            and np.array_equal(self.measures, other.measures)
        )


def _weight_id(w):
    return "const:1" if w is None else getattr(w, "ident", str(w))


def cell_masses(f, w=None):
    """w-measure of every cell of ``f``."""
    if w is None:
        return f.lengths
    m = np.asarray(w.cell_mass(f.breakpoints[:-1], f.breakpoints[1:]))
    if np.any(m < 0):
        raise InvalidWeight("weight has negative mass on some cell")
    return m


def distribution_cells(values, masses, weight_id="const:1"):
    """Distribution function of raw cells ``(values, masses)``."""
    a = np.abs(np.asarray(values))
    m = np.asarray(masses)
    if np.any(m < 0):
        raise InvalidWeight("negative cell mass")
    keep = (a > 0) & (m > 0)
    a, m = a[keep], m[keep]
    if a.size == 0:
        return DistributionFunction(np.zeros(0, a.dtype), np.zeros(0, m.dtype), weight_id)
    order = np.argsort(-a, kind="stable")
    a, m = a[order], m[order]
    lam, start = np.unique(-a, return_index=True)
    sums = np.add.reduceat(m, start)
    return DistributionFunction(-lam, np.cumsum(sums), weight_id)


def distribution(f, w=None):
    """Exact distribution function of step ``f`` w.r.t. ``w dx``."""
    return distribution_cells(f.values, cell_masses(f, w), _weight_id(w))


def rearrange_cells(values, lengths):
    """Nonincreasing rearrangement of cells as a step function on ``(0, total)``."""
    d = distribution_cells(values, lengths)
    if d.thresholds.size == 0:
        return StepFunction1D(np.array([0.0, 1.0]), np.zeros(1))
    e = np.concatenate((np.zeros(1, d.measures.dtype), d.measures))
    return StepFunction1D(e, d.thresholds)


def rearrange(f):
    """``f*`` on ``(0, |supp f|)``: cells sorted by ``|value|``, equal values merged."""
    return rearrange_cells(f.values, f.lengths)


def weak_from_distribution(d, p):
    """``max_j lam_j * m_j^(1/p)`` evaluated in log space (safe for huge/tiny values)."""
    if d.thresholds.size == 0:
        return 0.0
    logs = np.log(d.thresholds) + np.log(d.measures) / p
    return np.exp(np.max(logs))


def weak_norm_rearranged(fstar, p):
    """``sup_t t^(1/p) f*(t)`` for a nonincreasing step function on ``(0, inf)``."""
    v = fstar.values
    t = fstar.breakpoints[1:]
    keep = v > 0
    if not keep.any():
        return 0.0
    return np.exp(np.max(np.log(v[keep]) + np.log(t[keep]) / p))


def _check_p(p):
    if not p >= 1:
        raise InvalidArgument(f"Lorentz norms need p >= 1, got {p}")


def strong_cells(values, masses, p):
    a = np.abs(np.asarray(values))
    top = a.max() if a.size else 0
    if top == 0:
        return 0.0
    return top * np.sum((a / top) ** p * np.asarray(masses)) ** (1.0 / p)


def lorentz_norm(f, w=None, p=2.0, kind="weak"):
    """``||f||_{L^{p,inf}(w)}`` (kind ``weak``) or ``||f||_{L^p(w)}`` (``strong``)."""
    _check_p(p)
    if kind == "weak":
        return weak_from_distribution(distribution(f, w), p)
    if kind == "strong":
        return strong_cells(f.values, cell_masses(f, w), p)
    raise InvalidArgument(f"unknown norm kind {kind!r}")


def bmo_norm_dyadic(b, lattice):
    """Largest mean oscillation of ``b`` over the lattice cubes (a lower BMO estimate).

    Cubes without a breakpoint of ``b`` strictly inside see a constant, so
    only the cubes that split a breakpoint are visited.
    """
    r0, r1 = lattice.root
    nz = np.flatnonzero(b.values)
    if nz.size and (b.breakpoints[nz[0]] < r0 or b.breakpoints[nz[-1] + 1] > r1):
        raise InvalidArgument("lattice root does not cover the support of b")
    best = 0.0
    for d in range(lattice.max_depth + 1):
        for i in lattice.cubes_splitting(b.breakpoints, d):
            lo, hi = lattice.cube(d, int(i))
            e, v = _padded(b, lo, hi)
            best = max(best, _oscillation(e, v, lo, hi, 1.0))
    return best
