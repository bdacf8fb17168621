"""Exact (or quadrature-based) action of the operators on step functions.

Grid-valued operators return a :class:`StepFunction1D` on an output grid.
Their value on a cell ``C`` is *cell-resolved*: the supremum over intervals
(or lattice cubes) containing all of ``C``.  This is a lower bound for the
pointwise function and agrees with it at the cell endpoints' one-sided
limits; :func:`maximal_at` gives exact pointwise values.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate as _quad

from .config import DEFAULT
from .errors import InvalidArgument, SingularPointError, ToleranceNotMet
from .funcs1d import LONG, StepFunction1D, dyadic_log_nodes
from .sparse import DyadicLattice

# operator identifiers ---------------------------------------------------------

_TAGS = {
    "maximal": "Maximal",
    "iterated-maximal": "IteratedMaximal",
    "hilbert": "Hilbert",
    "commutator-log-hilbert": "CommutatorLogHilbert",
    "adjoint-hardy": "AdjointHardy",
    "sharp": "SharpMaximal",
    "sparse": "SparseForm",
}
_NAMES = {v: k for k, v in _TAGS.items()}


@dataclass(frozen=True)
class OperatorId:
    tag: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tag not in _NAMES:
            raise InvalidArgument(f"unknown operator tag {self.tag!r}")
        p = dict(self.params)
        if self.tag == "Maximal":
            p.setdefault("mode", "uncentered")
            p.setdefault("eps", 1.0)
            if p["mode"] not in ("uncentered", "dyadic"):
                raise InvalidArgument(f"unknown maximal mode {p['mode']!r}")
            _check_exponent("eps", p["eps"])
        elif self.tag == "IteratedMaximal":
            k = p.get("k", 1)
            if int(k) != k or k < 1:
                raise InvalidArgument("k must be a positive integer")
            p["k"] = int(k)
        elif self.tag == "SharpMaximal":
            p.setdefault("delta", DEFAULT.sharp_delta)
            p.setdefault("dyadic", False)
            _check_exponent("delta", p["delta"])
        elif self.tag in ("Hilbert", "CommutatorLogHilbert"):
            p.setdefault("c_H", DEFAULT.c_H)
            if not p["c_H"] > 0:
                raise InvalidArgument("c_H must be positive")
        object.__setattr__(self, "params", p)

    def __hash__(self):
        return hash((self.tag, tuple(sorted(self.params.items()))))

    @classmethod
    def parse(cls, text):
        """Parse the canonical string form, e.g. ``sharp:delta=0.5,dyadic``."""
        name, _, rest = text.strip().partition(":")
        if name not in _TAGS:
            raise InvalidArgument(f"unknown operator {name!r}")
        tag = _TAGS[name]
        params = {}
        for item in filter(None, (s.strip() for s in rest.split(","))):
            key, eq, val = item.partition("=")
            if not eq:
                if tag == "Maximal" and key in ("uncentered", "dyadic"):
                    params["mode"] = key
                elif tag == "SharpMaximal" and key == "dyadic":
                    params["dyadic"] = True
                elif tag == "SparseForm":
                    params["ref"] = key
                else:
                    raise InvalidArgument(f"bad operator option {item!r}")
                continue
            if key == "k":
                params["k"] = int(val)
            elif key in ("eps", "delta", "c_H", "c"):
                params["c_H" if key == "c" else key] = float(val)
            elif key == "ref":
                params["ref"] = val
            else:
                raise InvalidArgument(f"bad operator option {item!r}")
        return cls(tag, params)

    def __str__(self):
        p = self.params
        name = _NAMES[self.tag]
        opts = []
        if self.tag == "Maximal":
            opts.append(p["mode"])
            if p["eps"] != 1:
                opts.append(f"eps={p['eps']:g}")
        elif self.tag == "IteratedMaximal":
            opts.append(f"k={p['k']}")
        elif self.tag == "SharpMaximal":
            opts.append(f"delta={p['delta']:g}")
            if p["dyadic"]:
                opts.append("dyadic")
        elif self.tag in ("Hilbert", "CommutatorLogHilbert"):
            if p["c_H"] != DEFAULT.c_H:
                opts.append(f"c={p['c_H']:.17g}")
        elif self.tag == "SparseForm" and "ref" in p:
            opts.append(str(p["ref"]))
        return name + (":" + ",".join(opts) if opts else "")


def _check_exponent(name, value):
    if not 0 < value <= 1:
        raise InvalidArgument(f"{name} must lie in (0, 1], got {value}")


# grids -------------------------------------------------------------------------


def default_nodes(f, config=DEFAULT):
    """Breakpoints of ``f`` plus the symmetric log grid of the window."""
    base = dyadic_log_nodes(config.window_X, config.per_octave, config.near_zero_octaves)
    return np.unique(np.concatenate((base.astype(f.dtype), f.breakpoints)))


def default_lattice(config=DEFAULT):
    X = float(config.window_X)
    return DyadicLattice((-X, X), config.lattice_depth)


def _power_abs(f, eps):
    h = np.abs(f.values)
    return StepFunction1D(f.breakpoints, h if eps == 1 else h**eps)


def _root(values, eps):
    return values if eps == 1 else values ** (1.0 / eps)


# maximal functions ---------------------------------------------------------------


def spanning_max(x, F, block=256):
    """``r_i = max_{a <= i < b} (F_b - F_a) / (x_b - x_a)`` for each cell ``i``.

    Blocked O(N^2): for a block of right endpoints ``b`` the slopes form a
    matrix over ``a``; a running max down the ``a`` axis turns "a <= i" into
    a prefix maximum.
    """
    N = x.size
    res = np.full(N - 1, -np.inf, dtype=np.result_type(x, F))
    for s in range(1, N, block):
        bs = np.arange(s, min(N, s + block))
        rows = bs[-1]
        invalid = np.arange(rows)[:, None] >= bs[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            S = (F[bs][None, :] - F[:rows, None]) / (x[bs][None, :] - x[:rows, None])
        S[invalid] = -np.inf
        np.maximum.accumulate(S, axis=0, out=S)
        S[invalid] = -np.inf
        np.maximum(res[:rows], S.max(axis=1), out=res[:rows])
    return res


def _dyadic_cell_max(h, nodes, lattice):
    lo, hi = nodes[:-1], nodes[1:]
    res = np.abs(h(0.5 * (lo + hi)))
    for d in range(lattice.max_depth + 1):
        idx = lattice.containing_index(lo, hi, d)
        ok = idx >= 0
        if not ok.any():
            break
        s = lattice.side(d)
        qlo = lattice.root[0] + idx[ok] * s
        avg = (h.primitive(qlo + s, anchored=True) - h.primitive(qlo, anchored=True)) / s
        res[ok] = np.maximum(res[ok], avg)
    return res


def maximal(f, mode="uncentered", eps=1.0, nodes=None, lattice=None, config=DEFAULT):
    """Cell-resolved ``M_eps f = M(|f|^eps)^(1/eps)`` on an output grid."""
    _check_exponent("eps", eps)
    if mode not in ("uncentered", "dyadic"):
        raise InvalidArgument(f"unknown maximal mode {mode!r}")
    nodes = default_nodes(f, config) if nodes is None else np.unique(np.concatenate((nodes, f.breakpoints)))
    h = _power_abs(f, eps)
    if not np.any(h.values):
        return StepFunction1D(nodes, np.zeros(nodes.size - 1, dtype=nodes.dtype))
    if mode == "uncentered":
        cell = np.abs(h(0.5 * (nodes[:-1] + nodes[1:])))
        vals = np.maximum(spanning_max(nodes, h.primitive(nodes, anchored=True)), cell)
    else:
        lattice = default_lattice(config) if lattice is None else lattice
        vals = _dyadic_cell_max(h, nodes, lattice)
    return StepFunction1D(nodes, _root(vals, eps))


def maximal_at(f, x, mode="uncentered", eps=1.0, lattice=None, config=DEFAULT):
    """Exact pointwise ``M_eps f(x)`` (supremum over intervals/cubes containing x)."""
    _check_exponent("eps", eps)
    x = np.atleast_1d(np.asarray(x, dtype=f.dtype))
    h = _power_abs(f, eps)
    if mode == "dyadic":
        lattice = default_lattice(config) if lattice is None else lattice
        res = np.abs(h(x))
        for d in range(lattice.max_depth + 1):
            s = lattice.side(d)
            idx = np.floor((x - lattice.root[0]) / s)
            ok = (idx >= 0) & (idx < 2**d)
            qlo = lattice.root[0] + idx[ok] * s
            res[ok] = np.maximum(res[ok], (h.primitive(qlo + s, anchored=True) - h.primitive(qlo, anchored=True)) / s)
        return _root(res, eps)
    if mode != "uncentered":
        raise InvalidArgument(f"unknown maximal mode {mode!r}")
    nodes = np.unique(np.concatenate((h.breakpoints, x)))
    cells = np.maximum(spanning_max(nodes, h.primitive(nodes, anchored=True)), np.abs(h(0.5 * (nodes[:-1] + nodes[1:]))))
    k = np.searchsorted(nodes, x)
    left = np.where(k > 0, cells[np.maximum(k - 1, 0)], -np.inf)
    right = np.where(k < cells.size, cells[np.minimum(k, cells.size - 1)], -np.inf)
    return _root(np.maximum(np.maximum(left, right), 0.0), eps)


def iterate_maximal(f, k, mode="uncentered", nodes=None, lattice=None, config=DEFAULT):
    """``M^k f`` on a fixed output grid (the breakpoints of every iterate lie on it)."""
    if int(k) != k or k < 1:
        raise InvalidArgument("k must be a positive integer")
    nodes = default_nodes(f, config) if nodes is None else np.unique(np.concatenate((nodes, f.breakpoints)))
    g = f
    for _ in range(int(k)):
        g = maximal(g, mode, 1.0, nodes=nodes, lattice=lattice, config=config)
    return g


# sharp maximal functions ----------------------------------------------------------


def _oscillation(e, v, lo, hi, delta):
    """``((1/|Q|) int_Q |f - f_Q|^delta)^(1/delta)`` for step data on ``Q=[lo,hi)``.

    Values are taken relative to the first value in ``Q`` so that adding a
    constant to ``f`` leaves every difference bit-identical whenever the
    shifted values are exact.
    """
    seg = np.clip(e, lo, hi)
    w = np.diff(seg)
    keep = w > 0
    w, vv = w[keep], v[keep]
    if vv.size == 0:
        return 0.0
    rel = vv - vv[0]
    dev = np.abs(rel - np.sum(rel * w) / (hi - lo))
    return float(np.sum(w * dev**delta) / (hi - lo)) ** (1.0 / delta)


def _padded(f, lo, hi):
    """Breakpoints/values of ``f`` extended by zero cells to cover ``[lo, hi]``."""
    e, v = f.breakpoints, f.values
    if lo < e[0]:
        e, v = np.concatenate(([lo], e)), np.concatenate(([0.0], v))
    if hi > e[-1]:
        e, v = np.concatenate((e, [hi])), np.concatenate((v, [0.0]))
    return e, v


def sharp_maximal(f, delta=None, dyadic=False, nodes=None, lattice=None, config=DEFAULT, max_nodes=600):
    """Cell-resolved ``M^#_delta f`` (uncentered, or dyadic on the lattice).

    Dyadic mode only visits cubes that have a breakpoint of ``f`` strictly
    inside (on every other cube ``f`` is constant and the oscillation is 0);
    the output grid is the breakpoints plus those cubes' endpoints.
    Uncentered mode enumerates all pairs of grid endpoints and is O(N^3), so
    it is limited to ``max_nodes`` nodes.
    """
    delta = config.sharp_delta if delta is None else delta
    _check_exponent("delta", delta)
    if dyadic:
        lattice = default_lattice(config) if lattice is None else lattice
        cubes = []
        for d in range(lattice.max_depth + 1):
            for i in lattice.cubes_splitting(f.breakpoints, d):
                cubes.append(lattice.cube(d, int(i)))
        pts = [f.breakpoints] + ([np.asarray(cubes, dtype=f.dtype).ravel()] if cubes else [])
        if nodes is not None:
            pts.append(np.asarray(nodes, dtype=f.dtype))
        grid = np.unique(np.concatenate(pts))
        out = np.zeros(grid.size - 1, dtype=f.dtype)
        for lo, hi in cubes:
            e, v = _padded(f, lo, hi)
            osc = _oscillation(e, v, lo, hi, delta)
            i0, i1 = np.searchsorted(grid, [lo, hi])
            np.maximum(out[i0:i1], osc, out=out[i0:i1])
        return StepFunction1D(grid, out)

    grid = f.breakpoints if nodes is None else np.unique(np.concatenate((f.breakpoints, nodes)))
    N = grid.size
    if N > max_nodes:
        raise InvalidArgument(f"uncentered sharp maximal limited to {max_nodes} nodes (got {N}); use dyadic")
    v = f(0.5 * (grid[:-1] + grid[1:]))
    w = np.diff(grid)
    S = np.full((N, N), -np.inf)
    for a in range(N - 1):
        rel = v[a:] - v[a]
        cw = np.cumsum(rel * w[a:])
        L = grid[a + 1 :] - grid[a]
        mean = cw / L  # mean of rel over [grid[a], grid[b]] for b = a+1..N-1
        dev = np.abs(rel[None, :] - mean[:, None]) ** delta * w[a:][None, :]
        dev = np.tril(dev)  # cell j counts for right endpoint b only if j < b
        S[a, a + 1 :] = (dev.sum(axis=1) / L) ** (1.0 / delta)
    out = np.zeros(N - 1)
    for i in range(N - 1):
        out[i] = S[: i + 1, i + 1 :].max()
    return StepFunction1D(grid, out)


# Hilbert transform -------------------------------------------------------------------


def _jumps(f):
    v = np.concatenate(([0.0], f.values, [0.0])).astype(f.dtype)
    return np.diff(v)


def hilbert_step(f, c_H=DEFAULT.c_H, x=None):
    """Exact ``c_H * pv int f(y)/(x-y) dy`` at the points ``x``."""
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=np.result_type(f.dtype, np.float64)))
    e, v = f.breakpoints, f.values
    J = _jumps(f)
    on = np.isin(xs, e)
    if on.any():
        hit = np.searchsorted(e, xs[on])
        if np.any(J[hit] != 0):
            bad = xs[on][J[hit] != 0][0]
            raise SingularPointError(f"x={bad!r} is a jump of f; the transform is infinite there")
    out = np.zeros(xs.shape, dtype=xs.dtype)
    off = ~on
    if off.any():
        d_lo = xs[off][:, None] - e[None, :-1]
        d_hi = xs[off][:, None] - e[None, 1:]
        r = (e[1:] - e[:-1])[None, :] / d_hi
        with np.errstate(divide="ignore", invalid="ignore"):
            direct = np.log(np.abs(d_lo)) - np.log(np.abs(d_hi))
            near = np.log1p(r)
        term = np.where(np.abs(r) < 0.5, near, direct)
        out[off] = c_H * (term @ v.astype(xs.dtype))
    if on.any():
        d = np.abs(xs[on][:, None] - e[None, :])
        nz = J != 0
        out[on] = c_H * (np.log(d[:, nz]) @ J[nz])
    return out[0] if scalar else out


def lower_envelope(left, right):
    """Signed lower envelope of two endpoint values (0 across a sign change)."""
    same = np.sign(left) == np.sign(right)
    return np.where(same, np.sign(left) * np.minimum(np.abs(left), np.abs(right)), 0.0)


def hilbert(f, c_H=DEFAULT.c_H, nodes=None, config=DEFAULT):
    """``Hf`` on a grid; each cell carries the lower envelope of its finite samples.

    Samples are the two endpoints and the midpoint.  Between breakpoints of
    ``f`` the transform is monotone except next to two jumps, so this is a
    pointwise lower bound in absolute value up to that case.  Singular nodes
    (jumps of ``f``) are skipped.
    """
    nodes = default_nodes(f, config) if nodes is None else np.unique(np.concatenate((nodes, f.breakpoints)))
    J = _jumps(f)
    k = np.searchsorted(f.breakpoints, nodes)
    kk = np.minimum(k, f.breakpoints.size - 1)
    sing = (k < f.breakpoints.size) & (f.breakpoints[kk] == nodes) & (J[kk] != 0)
    vals = np.full(nodes.size, np.nan, dtype=np.result_type(nodes.dtype, np.float64))
    vals[~sing] = hilbert_step(f, c_H, nodes[~sing])
    mid = hilbert_step(f, c_H, 0.5 * (nodes[:-1] + nodes[1:]))
    left = np.where(np.isnan(vals[:-1]), mid, vals[:-1])
    right = np.where(np.isnan(vals[1:]), mid, vals[1:])
    return StepFunction1D(nodes, lower_envelope(lower_envelope(left, mid), lower_envelope(mid, right)))


# adjoint Hardy operator ---------------------------------------------------------------


def _check_positive_support(g):
    if np.any((g.breakpoints[:-1] < 0) & (g.values != 0)):
        raise InvalidArgument("adjoint Hardy operator needs g supported in (0, inf)")


def adjoint_hardy(g, x):
    """``Sg(x) = int_x^inf g(s)/s ds``, exact per cell."""
    _check_positive_support(g)
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=np.result_type(g.dtype, np.float64)))
    if np.any(xs <= 0):
        raise InvalidArgument("adjoint Hardy operator is evaluated at x > 0 only")
    e, v = g.breakpoints, g.values
    lo = np.maximum(e[None, :-1], xs[:, None])
    hi = e[None, 1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        seg = np.where(hi > lo, np.log(hi) - np.log(lo), 0.0)
    out = seg @ v.astype(xs.dtype)
    return out[0] if scalar else out


def adjoint_hardy_weak_norm(g, p):
    """Exact ``sup_t t^(1/p) Sg(t)`` for ``g >= 0`` (then ``Sg`` is nonincreasing).

    On each cell ``Sg(t) = v ln(E/t) + C``; the maximiser of
    ``t^(1/p) (v ln(E/t) + C)`` is ``t* = E exp(C/v - p)``, clipped to the cell.
    Arithmetic is in log space, so huge ``p`` is fine.
    """
    _check_positive_support(g)
    if np.any(g.values < 0):
        raise InvalidArgument("weak norm of Sg is computed for g >= 0")
    e = g.breakpoints.astype(LONG)
    v = g.values.astype(LONG)
    pos = e[1:] > 0
    e0 = np.maximum(e[:-1], 0)
    # C_i = Sg(e_{i+1}) accumulated from the right
    seg = np.where(pos, v * (np.log(e[1:]) - np.log(np.where(e0 > 0, e0, 1))), 0)
    C = np.concatenate((np.cumsum(seg[::-1])[::-1][1:], [LONG(0)]))
    best = LONG(0)
    inv_p = LONG(1) / LONG(p)
    for i in np.flatnonzero(pos):
        E, c, vi, a = e[i + 1], C[i], v[i], e0[i]
        cands = [E]
        if a > 0:
            cands.append(a)
        if vi > 0:
            lt = np.log(E) + c / vi - LONG(p)
            t = np.exp(lt) if lt < 11000 else E
            cands.append(min(max(t, a), E))
        for t in cands:
            if t <= 0:
                continue
            val = vi * (np.log(E) - np.log(t)) + c
            if val > 0:
                best = max(best, np.exp(inv_p * np.log(t)) * val)
    return best


# commutator [log|x|, H] -------------------------------------------------------------
#
# With y = x t the commutator becomes  c_H sum_i v_i int_{e_i/x}^{e_{i+1}/x} ln|t|/(t-1) dt.
# In sigma = ln|t| the positive branch integrand is sigma/(1 - e^-sigma) and the
# negative branch gives sigma e^sigma/(1 + e^sigma); both are smooth, so the
# removable point t = 1 needs no special care.  Pieces lying entirely at
# sigma < 0 are integrated against exp(-scale), scale = upper limit, so that
# values like e^-2000 survive; the pieces are recombined in long double.

_SPLITS = (-40.0, 0.0, 40.0)


def _pos_kernel(sig, s):
    if sig > 0:
        return sig / -math.expm1(-sig) * math.exp(-s)
    if sig == 0:
        return math.exp(-s)
    return sig * math.exp(sig - s) / math.expm1(sig)


def _neg_kernel(sig, s):
    if sig > 0:
        return sig / (1.0 + math.exp(-sig)) * math.exp(-s)
    return sig * math.exp(sig - s) / (1.0 + math.exp(sig))


def _sigma_integral(kernel, lo, hi, tol):
    """``int_lo^hi kernel`` as ``(mantissa, scale)`` with value ``mantissa*e^scale``."""
    if not hi > lo:
        return 0.0, 0.0
    s = hi if hi < 0 else 0.0
    epsabs = tol * math.exp(-s) if s > -600 else 0.0
    cuts = [lo] + [c for c in _SPLITS if lo < c < hi] + [hi]
    total, err = 0.0, 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        val, e, *_ = _quad.quad(kernel, a, b, args=(s,), epsabs=epsabs, epsrel=1e-12, limit=200, full_output=1)
        total += val
        err += e
    if err > max(epsabs, 1e-10 * abs(total)) * 10:
        raise ToleranceNotMet(total * math.exp(s) if s > -700 else 0.0, err, "commutator quadrature did not converge")
    return total, s


def _t_integral(ta, tb, tol):
    """``int_ta^tb ln|t|/(t-1) dt`` for endpoints in log form ``(sign, ln|t|)``."""
    (sa, la), (sb, lb) = ta, tb
    flip = (sa, la if sa > 0 else -la) > (sb, lb if sb > 0 else -lb)
    if flip:
        (sa, la), (sb, lb) = (sb, lb), (sa, la)
    parts = []
    if sa > 0:  # 0 < ta < tb
        parts.append(_sigma_integral(_pos_kernel, la, lb, tol))
    elif sb < 0:  # ta < tb < 0, |ta| > |tb|
        m, s = _sigma_integral(_neg_kernel, lb, la, tol)
        parts.append((-m, s))
    else:  # ta <= 0 <= tb
        if sa < 0:
            m, s = _sigma_integral(_neg_kernel, -math.inf, la, tol)
            parts.append((-m, s))
        if sb > 0:
            parts.append(_sigma_integral(_pos_kernel, -math.inf, lb, tol))
    if flip:
        parts = [(-m, s) for m, s in parts]
    return parts


def _log_abs(v):
    return -math.inf if v == 0 else float(np.log(np.abs(LONG(v))))


def commutator_at_log(f, sx, lx, c_H=DEFAULT.c_H, tol=DEFAULT.quad_tol):
    """``[log|.|, H] f`` at ``x = sx * exp(lx)``, returned in long double.

    ``lx`` is ``ln|x|`` (long double), which lets ``x`` range far beyond the
    double exponent range on either side.
    """
    if sx == 0:
        raise SingularPointError("the commutator with log|x| is singular at x = 0")
    e = f.breakpoints
    lx = LONG(lx)
    parts = []
    for i in np.flatnonzero(f.values):
        ends = []
        for y in (e[i], e[i + 1]):
            sy = int(np.sign(y)) * int(sx)
            ends.append((sy, float(np.log(np.abs(LONG(y))) - lx) if sy else -math.inf))
        for m, s in _t_integral(ends[0], ends[1], tol):
            parts.append((float(f.values[i]) * m, s))
    if not parts:
        return LONG(0)
    top = max(s for _, s in parts)
    total = sum(m * math.exp(s - top) for m, s in parts)
    return LONG(c_H) * LONG(total) * np.exp(LONG(top))


def commutator_log_hilbert(f, c_H=DEFAULT.c_H, x=None, tol=DEFAULT.quad_tol):
    """``c_H pv int (ln|x| - ln|y|) f(y)/(x - y) dy`` at the points ``x``."""
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
    out = np.empty(xs.size)
    for j, xv in enumerate(xs):
        if xv == 0:
            raise SingularPointError("the commutator with log|x| is singular at x = 0")
        out[j] = float(commutator_at_log(f, int(np.sign(xv)), np.log(abs(xv)), c_H, tol))
    return out[0] if scalar else out


# anchored sampling of singular images ---------------------------------------------------
#
# Hf, [log|.|, H]f and Sg are smooth away from a few anchors (breakpoints of f,
# and 0 for the log symbol) where they blow up or vary on every scale.  They
# are sampled at x = A + side * exp(l) with l running over a log grid, which
# reaches offsets e^-2600 from an anchor and tails out to e^2600.


def offset_logs(lo, hi, step):
    """Increasing log-offsets from ``lo`` to ``hi``: fine near 0, relative far out."""
    out = [lo]
    l = lo
    while True:
        a = abs(l)
        h = step / 4 if a <= 8 else max(step, 0.01 * a)
        l = l + h
        if l >= hi:
            break
        out.append(l)
    out.append(hi)
    return np.asarray(out, dtype=LONG)


def _hilbert_anchored(f, c_H, A, side, d):
    e = f.breakpoints.astype(LONG)
    J = _jumps(f).astype(LONG)
    u = LONG(A) - e
    dd = d[:, None]
    z = u[None, :] / dd
    with np.errstate(divide="ignore", invalid="ignore"):
        near = np.log1p(side * z)
        far = np.log(np.abs(u[None, :] + side * dd)) - np.log(dd)
    term = np.where(np.abs(z) < 0.5, near, far)
    term = np.where(u[None, :] == 0, LONG(0), term)
    return LONG(c_H) * (term @ J)


def _hardy_anchored(g, A, side, ells):
    e = g.breakpoints.astype(LONG)
    if A == 0:
        lx = ells
    else:
        lx = np.log(LONG(A) + side * np.exp(ells))
    le = np.log(np.where(e > 0, e, 1)).astype(LONG)
    lo = np.maximum(np.where(e[:-1] > 0, le[:-1], -np.inf)[None, :], lx[:, None])
    seg = np.maximum(le[None, 1:] - lo, 0)
    seg = np.where((e[1:] > 0)[None, :], seg, 0)
    return seg @ g.values.astype(LONG)


def _region_cells(values, offsets):
    """Cells tiling ``(0, offsets[-1])`` on one side of an anchor."""
    lengths = np.diff(np.concatenate(([LONG(0)], offsets)))
    left = np.concatenate((values[:1], values[:-1]))
    return lower_envelope(left, values), lengths


def singular_cells(f, kind, c_H=DEFAULT.c_H, config=DEFAULT):
    """Sample ``kind`` in {hilbert, commutator-log-hilbert, adjoint-hardy} applied to ``f``.

    Returns ``(values, lengths)`` in long double: a partition of the domain
    (truncated at ``exp(config.log_window)``) into cells with a lower value
    estimate on each, suitable for distribution functions and weak norms.
    """
    if kind not in ("hilbert", "commutator-log-hilbert", "adjoint-hardy"):
        raise InvalidArgument(f"no anchored sampler for {kind!r}")
    L, step = float(config.log_window), float(config.log_step)
    e = f.breakpoints
    J = _jumps(f)
    positive = kind == "adjoint-hardy"
    if positive:
        _check_positive_support(f)
    anchors = set(float(a) for a in e)
    singular = {float(a) for a, j in zip(e, J) if j != 0} if kind == "hilbert" else set()
    if kind != "hilbert":
        anchors.add(0.0)
        singular.add(0.0)
    A = np.array(sorted(a for a in anchors if (a >= 0 or not positive)))

    def deep(a):
        return -L if a in singular else (math.log(abs(a)) if a else 0.0) - 36.0

    regions = []  # (anchor, side, l_lo, l_hi)
    if not positive:
        regions.append((A[0], -1, deep(A[0]), L))
    for a, b in zip(A[:-1], A[1:]):
        half = math.log((b - a) / 2)
        regions.append((a, 1, min(deep(a), half - 1), half))
        regions.append((b, -1, min(deep(b), half - 1), half))
    if not positive:
        regions.append((A[-1], 1, deep(A[-1]), L))

    vals, lens = [], []
    # one shared log lattice, so tails and sides see the same offsets and
    # their super-level sets end at matching nodes
    lattice = offset_logs(-L, L, step)
    for a, side, lo, hi in regions:
        inner = lattice[(lattice > lo) & (lattice < hi)]
        ells = np.concatenate(([LONG(lo)], inner, [LONG(hi)]))
        d = np.exp(ells)
        if kind == "hilbert":
            v = _hilbert_anchored(f, c_H, a, side, d)
        elif kind == "adjoint-hardy":
            v = _hardy_anchored(f, a, side, ells)
        else:
            v = _commutator_region(f, c_H, a, side, ells, config.quad_tol)
        cv, cl = _region_cells(v, d)
        vals.append(cv)
        lens.append(cl)
    return np.concatenate(vals), np.concatenate(lens)


def _commutator_region(f, c_H, a, side, ells, tol):
    out = np.empty(ells.size, dtype=LONG)
    for j, l in enumerate(ells):
        if a == 0:
            sx, lx = side, l
        else:
            xv = LONG(a) + side * np.exp(l)
            sx, lx = int(np.sign(xv)), np.log(np.abs(xv))
        out[j] = commutator_at_log(f, sx, lx, c_H, tol)
    return out
