"""Weak-norm ratio curves N(p), exponent fits and the beta lower bound.

Unweighted curves are computed from images that reach far into the tails
and deep into singularities (long double, log-spaced), because the weak
norm at p -> 1 lives at x ~ exp(p') and at p -> inf at distances exp(-p).
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import DEFAULT
from .errors import InsufficientData, InsufficientVariation, InvalidArgument
from .funcs1d import LONG, StepFunction1D, indicator, log_tail_nodes
from .norms import distribution_cells, lorentz_norm, strong_cells, weak_from_distribution
from .operators import OperatorId, hilbert, iterate_maximal, maximal, sharp_maximal, singular_cells
from .sparse import DyadicLattice, apply_sparse, tower_family
from .weights import ap_constant, power_weight

# default p grids
ONE_PLUS = tuple(1 + 2.0**-j for j in range(10, 1, -1))
INFINITY = tuple(2.0**j for j in range(3, 10))


def parse_p_grid(text):
    """``geometric:a:b:n``, ``one_plus``, ``infinity`` or a comma list."""
    text = text.strip()
    if text == "one_plus":
        return list(ONE_PLUS)
    if text == "infinity":
        return list(INFINITY)
    if text.startswith("geometric:"):
        try:
            _, a, b, n = text.split(":")
            a, b, n = float(a), float(b), int(n)
        except ValueError:
            raise InvalidArgument(f"bad p grid {text!r}") from None
        if not (1 < a < b and n >= 2):
            raise InvalidArgument(f"bad p grid {text!r}")
        return list(np.geomspace(a, b, n))
    try:
        return [float(s) for s in text.split(",")]
    except ValueError:
        raise InvalidArgument(f"bad p grid {text!r}") from None


# test-function families --------------------------------------------------------------


def _random_steps(n, seed):
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        e = np.sort(rng.choice(np.arange(1, 17), size=int(rng.integers(2, 6)), replace=False)) / 8.0
        v = rng.uniform(0.25, 2.0, e.size - 1)
        out.append((f"step{i}", StepFunction1D(e, v)))
    return out


def family_members(family, config=DEFAULT):
    """Members ``(id, f)`` of a named test-function family."""
    if family == "indicator":
        return [("chi(0,1)", indicator(0.0, 1.0))]
    if family == "indicators":
        return [("chi(0,1)", indicator(0.0, 1.0)), ("chi(0,2)", indicator(0.0, 2.0)), ("chi(0,1/2)", indicator(0.0, 0.5))]
    if family.startswith("random"):
        n = int(family.partition(":")[2] or 4)
        return _random_steps(n, config.seed)
    raise InvalidArgument(f"unknown test-function family {family!r}")


# images as (values, masses) ----------------------------------------------------------


def wide_grid(f, config=DEFAULT):
    """Long-double grid: breakpoints of ``f`` plus ``±exp(l)`` out to the log window."""
    pos = log_tail_nodes(-20.0, float(config.log_window), float(config.log_step))
    parts = (-pos, np.zeros(1, dtype=LONG), pos, f.breakpoints.astype(LONG))
    return np.unique(np.concatenate(parts))


def _is_unweighted(w):
    return w is None or getattr(w, "ident", "") == "const:1"


def sparse_family_for(op, config=DEFAULT):
    ref = op.params.get("ref", "tower")
    if ref != "tower":
        raise InvalidArgument(f"unknown sparse family {ref!r}")
    D = int(config.near_zero_octaves)
    return tower_family(DyadicLattice((0.0, 1.0), D + 1), D)


def image_cells(op, f, w=None, config=DEFAULT):
    """``(values, masses)`` of ``T f`` measured against ``w`` (Lebesgue if None)."""
    tag, prm = op.tag, op.params
    if tag == "AdjointHardy" and np.any((f.breakpoints[:-1] < 0) & (f.values != 0)):
        raise InvalidArgument("adjoint Hardy family member has support in (-inf, 0]")
    if _is_unweighted(w):
        if tag in ("Hilbert", "CommutatorLogHilbert", "AdjointHardy"):
            kind = {"Hilbert": "hilbert", "CommutatorLogHilbert": "commutator-log-hilbert", "AdjointHardy": "adjoint-hardy"}[tag]
            return singular_cells(f, kind, prm.get("c_H", config.c_H), config)
        if tag in ("Maximal", "IteratedMaximal"):
            g = f.astype(LONG)
            nodes = wide_grid(g, config)
            if tag == "Maximal":
                img = maximal(g, prm["mode"], prm["eps"], nodes=nodes, config=config)
            else:
                img = iterate_maximal(g, prm["k"], nodes=nodes, config=config)
            return img.values, img.lengths
        w = None
    grid = None if w is None else w.grid(config)
    if grid is not None:
        grid = np.unique(np.concatenate((grid, f.breakpoints[(f.breakpoints > grid[0]) & (f.breakpoints < grid[-1])])))
    if tag == "Maximal":
        img = maximal(f, prm["mode"], prm["eps"], nodes=grid, config=config)
    elif tag == "IteratedMaximal":
        img = iterate_maximal(f, prm["k"], nodes=grid, config=config)
    elif tag == "Hilbert":
        img = hilbert(f, prm["c_H"], nodes=grid, config=config)
    elif tag == "SharpMaximal":
        img = sharp_maximal(f, prm["delta"], prm["dyadic"], nodes=grid, config=config)
    elif tag == "SparseForm":
        img = apply_sparse(sparse_family_for(op, config), f)
    else:
        raise InvalidArgument(f"{op} is only available unweighted")
    if w is None:
        return img.values, img.lengths
    e = img.breakpoints
    return img.values, w.cell_mass(e[:-1], e[1:])


def weak_ratio(op, f, w, p, config=DEFAULT, cells=None):
    v, m = image_cells(op, f, w, config) if cells is None else cells
    num = weak_from_distribution(distribution_cells(v, m), p)
    den = lorentz_norm(f, None if _is_unweighted(w) else w, p, "strong")
    return float(num / den)


# curves -----------------------------------------------------------------------------------


@dataclass
class NormCurve:
    operator: str
    family: str
    weight: str
    p: np.ndarray
    N: np.ndarray
    fingerprint: str = ""
    members: list = field(default_factory=list)

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float)
        self.N = np.asarray(self.N, dtype=float)
        if self.p.size != self.N.size:
            raise InvalidArgument("p and N must have the same length")
        if np.any(np.diff(self.p) <= 0) or np.any(self.p <= 1):
            raise InvalidArgument("p values must be strictly increasing and > 1")
        if np.any(~np.isfinite(self.N)) or np.any(self.N <= 0):
            raise InvalidArgument("N values must be positive and finite")

    def to_csv(self, path=None):
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["operator", "family", "weight", "p", "norm"])
        for p, n in zip(self.p, self.N):
            wr.writerow([self.operator, self.family, self.weight, f"{p:.17g}", f"{n:.17g}"])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, source):
        text = str(source) if "\n" in str(source) else Path(source).read_text()
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            raise InsufficientData("empty norm curve file")
        return cls(rows[0]["operator"], rows[0]["family"], rows[0]["weight"],
                   [float(r["p"]) for r in rows], [float(r["norm"]) for r in rows])


def sample_norm_curve(op, family="indicator", w=None, p_grid=ONE_PLUS, config=DEFAULT):
    """``N(p) = max_f ||Tf||_{L^{p,inf}(w)} / ||f||_{L^p(w)}`` over the family."""
    op = OperatorId.parse(op) if isinstance(op, str) else op
    p_grid = np.asarray(sorted(p_grid), dtype=float)
    if p_grid.size == 0 or np.any(p_grid <= 1) or np.any(np.diff(p_grid) <= 0):
        raise InvalidArgument("p grid must be strictly increasing with all p > 1")
    members = family_members(family, config) if isinstance(family, str) else list(family)
    if not members:
        raise InvalidArgument("empty test-function family")
    best = np.zeros(p_grid.size)
    who = [""] * p_grid.size
    for name, f in members:
        cells = image_cells(op, f, w, config)
        for j, p in enumerate(p_grid):
            r = weak_ratio(op, f, w, p, config, cells)
            if r > best[j]:
                best[j], who[j] = r, name
    wid = "const:1" if w is None else w.ident
    return NormCurve(str(op), family if isinstance(family, str) else "custom", wid, p_grid, best,
                     config.fingerprint(), who)


# fits ---------------------------------------------------------------------------------------


@dataclass
class ExponentFit:
    endpoint: str
    exponent: float
    intercept: float
    residual: float
    points_used: int
    clamped: bool = False
    operator: str = ""

    def to_json(self):
        return json.dumps({"operator": self.operator, "endpoint": self.endpoint, "exponent": self.exponent,
                           "residual": self.residual, "points_used": self.points_used}, sort_keys=True)


def fit_exponent(curve, endpoint, tail=None):
    """Least-squares log-log slope over the ``tail`` samples nearest the endpoint.

    ``one_plus`` regresses ``log N`` on ``-log(p-1)`` (alpha), ``infinity`` on
    ``log p`` (gamma).  Negative slopes are clamped to 0 and flagged.
    """
    p, N = curve.p, curve.N
    if endpoint == "one_plus":
        sel = np.flatnonzero(p < 2)
        x_all = -np.log(p - 1)
    elif endpoint == "infinity":
        sel = np.flatnonzero(p > 2)
        x_all = np.log(p)
    else:
        raise InvalidArgument(f"unknown endpoint {endpoint!r}")
    if tail is not None:
        order = sel[np.argsort(x_all[sel])[::-1]]
        sel = np.sort(order[: int(tail)])
    if sel.size < 3 or (tail is not None and tail < 3):
        raise InsufficientData(f"need at least 3 samples near {endpoint}, have {sel.size}")
    x, y = x_all[sel], np.log(N[sel])
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.max(np.abs(y - (slope * x + intercept))))
    clamped = slope < 0
    return ExponentFit(endpoint, 0.0 if clamped else float(slope), float(intercept), residual,
                       int(sel.size), bool(clamped), curve.operator)


@dataclass(frozen=True)
class BetaBound:
    p0: float
    alpha: float
    gamma: float
    beta_min: float

    def to_json(self):
        return json.dumps({"p0": self.p0, "alpha": self.alpha, "gamma": self.gamma, "beta_min": self.beta_min},
                          sort_keys=True)


def beta_lower(alpha, gamma, p0):
    """``max(gamma, alpha/(p0-1))``: the smallest admissible A_{p0} exponent."""
    if not p0 > 1:
        raise InvalidArgument("beta_lower needs p0 > 1")
    if alpha < 0 or gamma < 0:
        raise InvalidArgument("alpha and gamma must be >= 0")
    return BetaBound(p0, alpha, gamma, max(gamma, alpha / (p0 - 1)))


# sharpness probe ------------------------------------------------------------------------------


@dataclass
class ProbeResult:
    operator: str
    p: float
    exponent: float
    intercept: float
    pairs: list

    def to_json(self):
        return json.dumps({"operator": self.operator, "p": self.p, "exponent": self.exponent,
                           "pairs": [[a, r] for a, r in self.pairs]}, sort_keys=True)


def power_test_function(delta, nodes):
    """Exact cell averages of ``x^(delta-1) chi_(0,1)`` on ``nodes``."""
    e = nodes[(nodes >= 0) & (nodes <= 1)]
    if e[0] > 0:
        e = np.concatenate(([0.0], e))
    F = e**delta / delta
    return StepFunction1D(e, np.diff(F) / np.diff(e))


PROBE_DELTAS = (1 / 2, 1 / 3, 1 / 4, 1 / 6, 1 / 8, 1 / 12, 1 / 16)


def sharpness_probe(op, p=2.0, deltas=PROBE_DELTAS, config=None, weights=None, tests=None):
    """Fit ``log ratio`` against ``log [w_delta]_{A_p}`` over a weight family.

    Default family: ``w = |x|^((1-delta)(p-1))`` with ``f = x^(delta-1) chi_(0,1)``,
    both on a grid reaching ``2^-64`` so the singular mass is resolved.
    """
    op = OperatorId.parse(op) if isinstance(op, str) else op
    config = config or DEFAULT.replace(near_zero_octaves=64)
    pairs = []
    for j, d in enumerate(deltas):
        w = weights[j] if weights else power_weight((1 - d) * (p - 1), p, config.window_X)
        f = tests[j] if tests else power_test_function(d, w.grid(config))
        a = ap_constant(w, p, config=config)
        pairs.append((float(a), weak_ratio(op, f, w, p, config)))
    A = np.log([a for a, _ in pairs])
    if not np.isfinite(A).all() or A.max() - A.min() < 1e-9:
        raise InsufficientVariation("A_p constants do not vary across the family")
    slope, intercept = np.polyfit(A, np.log([r for _, r in pairs]), 1)
    return ProbeResult(str(op), p, float(slope), float(intercept), pairs)
