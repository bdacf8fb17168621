"""Weights: A_p constants, power weights, the Rubio de Francia majorant and
the two extrapolation weights built from it."""

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT, bound_Bp
from .errors import InvalidArgument, InvalidWeight
from .funcs1d import StepFunction1D, dyadic_log_nodes, indicator
from .operators import default_lattice, maximal, spanning_max
from .sparse import DyadicLattice


class Weight:
    """A positive weight on a window ``[lo, hi]``.

    Either a step ``body`` (strictly positive cells on the window) or the
    closed-form power ``|x|^a``, which is represented by its exact cell
    averages on a log-refined grid whenever a step form is needed.
    """

    def __init__(self, body=None, power=None, window=None, ident=None, grid=None):
        if (body is None) == (power is None):
            raise InvalidArgument("give exactly one of body or power")
        if power is not None:
            if not power > -1:
                raise InvalidArgument("power weights need a > -1 (local integrability)")
            if window is None:
                raise InvalidArgument("power weights need a window")
        if window is None:
            window = (body.breakpoints[0], body.breakpoints[-1])
        elif np.ndim(window) == 0:
            window = (-float(window), float(window))
        self.window = (float(window[0]), float(window[1]))
        self.power = power
        self.diagnostics = {}
        if body is not None:
            lo, hi = self.window
            e = body.breakpoints
            if e[0] > lo or e[-1] < hi:
                raise InvalidWeight("weight body does not cover its window")
            inside = (e[:-1] < hi) & (e[1:] > lo)
            if np.any(body.values[inside] <= 0):
                raise InvalidWeight("weight vanishes or is negative on its window")
        self.body = body
        self._grid = grid
        self.ident = ident or (f"power:a={power:g}" if power is not None else "step")

    def __repr__(self):
        return f"Weight({self.ident}, window={self.window})"

    @classmethod
    def constant(cls, c=1.0, window=DEFAULT.window_X):
        lo, hi = (-window, window) if np.ndim(window) == 0 else window
        return cls(body=indicator(lo, hi, c), window=(lo, hi), ident=f"const:{c:g}")

    def _power_primitive(self, x):
        a = self.power
        x = np.asarray(x, dtype=float)
        return np.sign(x) * np.abs(x) ** (a + 1) / (a + 1)

    def cell_mass(self, lo, hi):
        """Exact ``w([lo, hi] ∩ window)`` for arrays of cells."""
        wlo, whi = self.window
        a = np.clip(np.asarray(lo, dtype=float), wlo, whi)
        b = np.clip(np.asarray(hi, dtype=float), wlo, whi)
        if self.body is not None:
            return self.body.primitive(b, anchored=True) - self.body.primitive(a, anchored=True)
        return self._power_primitive(b) - self._power_primitive(a)

    def grid(self, config=DEFAULT):
        if self._grid is not None:
            return self._grid
        if self.body is not None:
            e = self.body.breakpoints
            lo, hi = self.window
            return np.unique(np.clip(e, lo, hi))
        X = max(abs(self.window[0]), abs(self.window[1]))
        nodes = dyadic_log_nodes(X, config.per_octave, config.near_zero_octaves)
        return nodes[(nodes >= self.window[0]) & (nodes <= self.window[1])]

    def as_step(self, config=DEFAULT):
        """Step form on the weight's grid (exact cell averages for powers)."""
        nodes = self.grid(config)
        if self.body is not None:
            return self.body.on_grid(nodes) if not np.array_equal(nodes, self.body.breakpoints) else self.body
        mass = self.cell_mass(nodes[:-1], nodes[1:])
        return StepFunction1D(nodes, mass / np.diff(nodes))


def power_weight(a, p_hint=None, window=DEFAULT.window_X):
    """``|x|^a`` on the window; caches the origin-interval A_p candidate.

    For intervals ``[0, r]`` (or centred at 0) the A_p product equals
    ``(1/(a+1)) * ((p-1)/(p-1-a))^(p-1)`` independently of ``r``.
    """
    if not a > -1:
        raise InvalidArgument("power weights need a > -1")
    w = Weight(power=a, window=window)
    if p_hint is not None:
        q = p_hint - 1
        w.diagnostics["candidate"] = math.inf if a >= q else (1 / (a + 1)) * (q / (q - a)) ** q
    return w


# A_p constants ---------------------------------------------------------------------


def _pair_max(x, F, G, p):
    """``max_{a<b} avg(w) * avg(sigma)^(p-1)`` over node pairs, blocked."""
    N = x.size
    best = 1.0
    arg = None
    q = p - 1
    for s in range(1, N, 256):
        bs = np.arange(s, min(N, s + 256))
        L = x[bs][None, :] - x[: bs[-1], None]
        with np.errstate(divide="ignore", invalid="ignore"):
            val = (F[bs][None, :] - F[: bs[-1], None]) / L * ((G[bs][None, :] - G[: bs[-1], None]) / L) ** q
        val[~(L > 0)] = -np.inf
        k = np.unravel_index(np.argmax(val), val.shape)
        if val[k] > best:
            best, arg = float(val[k]), (float(x[k[0]]), float(x[bs[k[1]]]))
    return best, arg


def lattice_refined(x, lattice):
    """``x`` plus the endpoints of every lattice cube with a point of ``x`` strictly inside."""
    pts = [x]
    for d in range(lattice.max_depth + 1):
        idx = lattice.cubes_splitting(x, d)
        if idx.size:
            lo = lattice.root[0] + idx * lattice.side(d)
            pts += [lo, lo + lattice.side(d)]
    out = np.unique(np.concatenate(pts))
    return out[(out >= x[0]) & (out <= x[-1])]


def ap_constant(w, p, mode="bruteforce", lattice=None, config=DEFAULT, return_info=False):
    """``[w]_{A_p}`` over intervals (bruteforce) or lattice cubes (dyadic).

    Bruteforce enumerates intervals whose endpoints are breakpoints of ``w``
    or endpoints of lattice cubes splitting a breakpoint; the latter makes
    every relevant dyadic cube a candidate, so bruteforce >= dyadic always.
    (Breakpoints alone are not enough: the A_p product is not monotone in an
    endpoint moving through a constant cell.)  Grid-carrying weights (power
    weights, Rubio de Francia majorants) live on lattice-aligned grids and
    are used as they are.

    ``p = 1`` gives ``sup Mw/w``; pointwise, ``Mw`` near a breakpoint sees
    the intervals resolved on both adjacent cells.  A power weight whose
    dual weight ``|x|^(-a/(p-1))`` is not locally integrable returns ``inf``
    with ``info["non_integrable"]`` set.
    """
    if not p >= 1:
        raise InvalidArgument(f"A_p needs p >= 1, got {p}")
    if mode not in ("bruteforce", "dyadic"):
        raise InvalidArgument(f"unknown mode {mode!r}")
    info = {"non_integrable": False, "argmax": None}
    if w.power is not None and p > 1 and w.power / (p - 1) >= 1 and w.window[0] < 0 < w.window[1]:
        info["non_integrable"] = True
        return (math.inf, info) if return_info else math.inf
    s = w.as_step(config)
    explicit = lattice is not None
    if lattice is None:
        lattice = DyadicLattice(w.window, config.lattice_depth)
    if explicit or (w.body is not None and w._grid is None):
        x = lattice_refined(s.breakpoints, lattice)
        s = s.on_grid(x)
    x, v = s.breakpoints, s.values
    if p == 1:
        if mode == "bruteforce":
            M = np.maximum(spanning_max(x, s.primitive(x, anchored=True)), v)
            M = np.maximum(M, np.maximum(np.concatenate((M[1:], [0])), np.concatenate(([0], M[:-1]))))
        else:
            M = maximal(s, "dyadic", nodes=x, lattice=lattice, config=config).values
        ratio = M / v
        k = int(np.argmax(ratio))
        info["argmax"] = (float(x[k]), float(x[k + 1]))
        val = float(max(ratio[k], 1.0))
    else:
        sig = StepFunction1D(x, v ** (-1.0 / (p - 1)))
        F, G = s.primitive(x, anchored=True), sig.primitive(x, anchored=True)
        if mode == "bruteforce":
            val, info["argmax"] = _pair_max(x, F, G, p)
        else:
            val = 1.0
            for d in range(lattice.max_depth + 1):
                idx = lattice.cubes_splitting(x, d)
                if idx.size == 0:
                    continue
                side = lattice.side(d)
                a = lattice.root[0] + idx * side
                b = a + side
                Fw = (s.primitive(b, anchored=True) - s.primitive(a, anchored=True)) / side
                Fs = (sig.primitive(b, anchored=True) - sig.primitive(a, anchored=True)) / side
                prod = Fw * Fs ** (p - 1)
                k = int(np.argmax(prod))
                if prod[k] > val:
                    val, info["argmax"] = float(prod[k]), (float(a[k]), float(b[k]))
    return (val, info) if return_info else val


# Rubio de Francia ----------------------------------------------------------------------


@dataclass(frozen=True)
class RdFParams:
    p: float
    bound_Bp: float = None
    terms_K: int = DEFAULT.rdf_terms
    window: float = DEFAULT.window_X

    def __post_init__(self):
        if not self.p > 1:
            raise InvalidArgument("Rubio de Francia needs p > 1")
        if self.bound_Bp is None:
            object.__setattr__(self, "bound_Bp", bound_Bp(self.p))
        if not self.bound_Bp >= 1:
            raise InvalidArgument("bound_Bp must be >= 1")
        if int(self.terms_K) < 1:
            raise InvalidArgument("terms_K must be a positive integer")


def _window_nodes(h, X, config):
    nodes = dyadic_log_nodes(X, config.per_octave, config.near_zero_octaves)
    e = h.breakpoints[(h.breakpoints > -X) & (h.breakpoints < X)]
    return np.unique(np.concatenate((nodes, e)))


def rubio_majorant(h, params, config=DEFAULT, nodes=None):
    """``R_p h = sum_{k<=K} M^k h / (2 B_p)^k`` on the window grid.

    ``M`` is the cell-resolved uncentred maximal function on a grid aligned
    with the dyadic lattice of the window, so dyadic averages of every term
    are dominated by the next term and ``[R_p h]_{A_1}^dyadic <= 2 B_p``
    up to the truncated tail.
    """
    if np.any(h.values < 0):
        raise InvalidArgument("the Rubio de Francia seed must be nonnegative")
    if not np.any(h.values > 0):
        raise InvalidArgument("the Rubio de Francia seed is identically zero")
    X = float(params.window)
    nodes = _window_nodes(h, X, config) if nodes is None else nodes
    g = h.on_grid(nodes)
    total = g.values.astype(float).copy()
    c = 1.0 / (2.0 * params.bound_Bp)
    for k in range(1, int(params.terms_K) + 1):
        g = maximal(g, nodes=nodes)
        total += g.values * c**k
    R = StepFunction1D(nodes, total)
    return Weight(body=R, window=(-X, X), ident=f"rdf:p={params.p:g}", grid=nodes)


def extrapolation_weight(seed, p, p0, direction, params=None, config=DEFAULT):
    """Primal ``(R_p seed)^{-(p0-p)}`` or dual ``(R_{p'} seed)^{(p-p0)/(p-1)}``."""
    if direction == "primal":
        if not 1 < p <= p0:
            raise InvalidArgument("primal extrapolation needs 1 < p <= p0")
        prm = params or RdFParams(p, window=config.window_X, terms_K=config.rdf_terms)
        R = rubio_majorant(seed, prm, config)
        expo = -(p0 - p)
        diag = {"expected_bound": prm.bound_Bp ** (p0 - p), "bound_Bp": prm.bound_Bp}
    elif direction == "dual":
        if not p >= p0 > 1:
            raise InvalidArgument("dual extrapolation needs p >= p0 > 1")
        q = p / (p - 1)
        prm = params or RdFParams(q, window=config.window_X, terms_K=config.rdf_terms)
        R = rubio_majorant(seed, prm, config)
        expo = (p - p0) / (p - 1)
        a1 = ap_constant(R, 1, "dyadic", config=config)
        diag = {"rdf_A1_dyadic": a1, "expected_bound": a1**expo, "bound_Bp": prm.bound_Bp}
    else:
        raise InvalidArgument(f"unknown direction {direction!r}")
    body = R.body
    vals = np.ones_like(body.values) if expo == 0 else body.values**expo
    w = Weight(
        body=StepFunction1D(body.breakpoints, vals),
        window=R.window,
        ident=f"{direction}:p={p:g},p0={p0:g}",
        grid=body.breakpoints,
    )
    w.diagnostics.update(diag, exponent=expo, majorant=R)
    return w


# string syntax ---------------------------------------------------------------------------

SEEDS = {"indicator": lambda: indicator(0.0, 1.0)}


def _kv(rest):
    out = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        k, eq, v = item.partition("=")
        if not eq:
            raise InvalidArgument(f"bad weight option {item!r}")
        out[k] = v
    return out


def parse_weight(text, config=DEFAULT):
    """``const:1``, ``power:a=0.5``, ``step:file=...``, ``rdf:seed=indicator,p=2``,
    ``primal:p=1.5,p0=2``, ``dual:p=4,p0=2``."""
    kind, _, rest = text.strip().partition(":")
    X = config.window_X
    try:
        if kind == "const":
            return Weight.constant(float(rest or 1), X)
        opts = _kv(rest)
        if kind == "power":
            return power_weight(float(opts["a"]), float(opts["p"]) if "p" in opts else None, X)
        if kind == "step":
            body = StepFunction1D.from_csv(opts["file"])
            return Weight(body=body, ident=text)
        seed = SEEDS[opts.get("seed", "indicator")]()
        if kind == "rdf":
            w = rubio_majorant(seed, RdFParams(float(opts["p"]), window=X, terms_K=config.rdf_terms), config)
        elif kind in ("primal", "dual"):
            w = extrapolation_weight(seed, float(opts["p"]), float(opts["p0"]), kind, config=config)
        else:
            raise InvalidArgument(f"unknown weight kind {kind!r}")
        w.ident = text
        return w
    except (KeyError, ValueError) as exc:
        raise InvalidArgument(f"cannot parse weight {text!r}: {exc}") from None
