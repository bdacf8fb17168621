"""Piecewise-constant functions on the line and closed-form extremal profiles.

A :class:`StepFunction1D` is zero outside ``[breakpoints[0], breakpoints[-1]]``
and equal to ``values[i]`` on ``[breakpoints[i], breakpoints[i+1])``.  Arrays
are float64 unless a ``np.longdouble`` array is passed in, in which case the
extended precision (and exponent range) is kept throughout.
"""

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, InvalidArgument

LONG = np.longdouble


def _common_dtype(*arrays):
    for a in arrays:
        if np.asarray(a).dtype == LONG:
            return LONG
    return np.float64


def _frozen(a):
    a.setflags(write=False)
    return a


class StepFunction1D:
    """Finitely supported step function ``sum_i v_i * chi_[e_i, e_{i+1})``."""

    __slots__ = ("breakpoints", "values")

    def __init__(self, breakpoints, values):
        dtype = _common_dtype(breakpoints, values)
        e = np.array(breakpoints, dtype=dtype)
        v = np.array(values, dtype=dtype)
        if e.ndim != 1 or e.size < 2:
            raise InvalidArgument("need at least two breakpoints")
        if v.shape != (e.size - 1,):
            raise InvalidArgument(
                f"expected {e.size - 1} values for {e.size} breakpoints, got {v.size}"
            )
        if not np.all(np.isfinite(e)):
            raise InvalidArgument("breakpoints must be finite")
        if not np.all(np.isfinite(v)):
            raise InvalidArgument("values must be finite")
        if np.any(np.diff(e) <= 0):
            raise InvalidArgument("breakpoints must be strictly increasing")
        self.breakpoints = _frozen(e)
        self.values = _frozen(v)

    # construction helpers -------------------------------------------------

    @classmethod
    def zero(cls, a=0.0, b=1.0):
        return cls([a, b], [0.0])

    @classmethod
    def from_cells(cls, nodes, func_avg):
        """Step function whose cell values are ``func_avg(lo, hi)``."""
        nodes = np.asarray(nodes)
        return cls(nodes, func_avg(nodes[:-1], nodes[1:]))

    def astype(self, dtype):
        return StepFunction1D(self.breakpoints.astype(dtype), self.values.astype(dtype))

    # basic geometry -------------------------------------------------------

    @property
    def dtype(self):
        return self.breakpoints.dtype

    @property
    def lengths(self):
        return np.diff(self.breakpoints)

    @property
    def midpoints(self):
        e = self.breakpoints
        return 0.5 * (e[:-1] + e[1:])

    @property
    def support(self):
        """Smallest ``(a, b)`` outside of which the function vanishes."""
        nz = np.flatnonzero(self.values)
        if nz.size == 0:
            return None
        return self.breakpoints[nz[0]], self.breakpoints[nz[-1] + 1]

    def __len__(self):
        return self.values.size

    def __repr__(self):
        return f"StepFunction1D(cells={len(self)}, span=[{self.breakpoints[0]}, {self.breakpoints[-1]}])"

    # evaluation -----------------------------------------------------------

    def __call__(self, x):
        x = np.asarray(x, dtype=self.dtype)
        e = self.breakpoints
        idx = np.searchsorted(e, x, side="right") - 1
        inside = (idx >= 0) & (idx < self.values.size)
        out = np.zeros(x.shape, dtype=self.dtype)
        out[inside] = self.values[idx[inside]]
        return out if out.ndim else out[()]

    def primitive(self, x, anchored=False):
        """``F(x) = integral of f over (-inf, x]``, exact, vectorised.

        With ``anchored=True`` the integral is taken from the breakpoint
        nearest 0 instead, accumulating outwards; differences ``F(b)-F(a)``
        then keep full relative precision on tiny cells near the origin.
        """
        e, v = self.breakpoints, self.values
        x = np.asarray(x, dtype=self.dtype)
        m = v * np.diff(e)
        cum = np.zeros(e.size, dtype=self.dtype)
        if anchored:
            k = int(np.argmin(np.abs(e)))
            cum[k + 1 :] = np.cumsum(m[k:])
            cum[:k] = -np.cumsum(m[:k][::-1])[::-1]
        else:
            cum[1:] = np.cumsum(m)
        xc = np.clip(x, e[0], e[-1])
        idx = np.clip(np.searchsorted(e, xc, side="right") - 1, 0, v.size - 1)
        out = cum[idx] + v[idx] * (xc - e[idx])
        return out if out.ndim else out[()]

    def on_grid(self, nodes):
        """The same function re-expressed on ``nodes`` merged with its own breakpoints."""
        nodes = np.union1d(np.asarray(nodes, dtype=self.dtype), self.breakpoints)
        return StepFunction1D(nodes, self(0.5 * (nodes[:-1] + nodes[1:])))

    # algebra ----------------------------------------------------------------

    def __neg__(self):
        return StepFunction1D(self.breakpoints, -self.values)

    def __abs__(self):
        return transform(self, "abs")

    def __mul__(self, c):
        if isinstance(c, StepFunction1D):
            a, b = _merged(self, c)
            return StepFunction1D(a.breakpoints, a.values * b.values)
        return transform(self, "scale", c)

    __rmul__ = __mul__

    def __add__(self, other):
        if isinstance(other, StepFunction1D):
            return transform(self, "add", other)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, StepFunction1D):
            return transform(self, "add", -other)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, StepFunction1D):
            return NotImplemented
        return (
            self.breakpoints.shape == other.breakpoints.shape
            and np.array_equal(self.breakpoints, other.breakpoints)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    def equivalent(self, other, atol=0.0):
        """Pointwise equality regardless of how the cells are split."""
        a, b = _merged(self, other)
        return bool(np.all(np.abs(a.values - b.values) <= atol))

    def simplified(self):
        """Merge neighbouring cells with equal values and trim zero ends."""
        e, v = self.breakpoints, self.values
        keep = np.concatenate(([True], v[1:] != v[:-1]))
        e2 = np.concatenate((e[:-1][keep], e[-1:]))
        v2 = v[keep]
        nz = np.flatnonzero(v2)
        if nz.size == 0:
            return StepFunction1D(e2[:2], [0.0])
        return StepFunction1D(e2[nz[0] : nz[-1] + 2], v2[nz[0] : nz[-1] + 1])

    # serialisation ----------------------------------------------------------

    def to_csv(self, path=None):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["breakpoint", "value"])
        for e, v in zip(self.breakpoints[:-1], self.values):
            w.writerow([_fmt(e), _fmt(v)])
        w.writerow([_fmt(self.breakpoints[-1]), ""])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, source):
        """Read from a path or from CSV text (anything containing a newline)."""
        text = source if "\n" in str(source) else Path(source).read_text()
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [c.strip() for c in rows[0]] != ["breakpoint", "value"]:
            raise InvalidArgument("expected header 'breakpoint,value'")
        rows = [r for r in rows[1:] if r]
        if len(rows) < 2 or rows[-1][1].strip() != "":
            raise InvalidArgument("last row must carry an empty value field")
        e = [float(r[0]) for r in rows]
        v = [float(r[1]) for r in rows[:-1]]
        return cls(e, v)


def _fmt(x):
    return format(float(x), ".17g")


def _merged(f, g):
    """Both functions expressed on the union of their breakpoints."""
    dtype = _common_dtype(f.breakpoints, g.breakpoints)
    nodes = np.union1d(f.breakpoints.astype(dtype), g.breakpoints.astype(dtype))
    mid = 0.5 * (nodes[:-1] + nodes[1:])
    return StepFunction1D(nodes, f(mid)), StepFunction1D(nodes, g(mid))


def indicator(a, b, value=1.0):
    """``value * chi_[a, b)``."""
    return StepFunction1D([a, b], [value])


def from_pieces(pieces):
    """Sum of ``(a, b, value)`` indicator pieces."""
    out = None
    for a, b, v in pieces:
        term = indicator(a, b, v)
        out = term if out is None else out + term
    if out is None:
        raise InvalidArgument("no pieces given")
    return out


def integrate(f, a, b):
    """Exact integral of ``f`` over ``[a, b]``."""
    if not (np.isfinite(a) and np.isfinite(b)):
        raise InvalidArgument("integration limits must be finite")
    if a > b:
        raise InvalidArgument("need a <= b")
    F = f.primitive(np.array([a, b], dtype=f.dtype))
    return F[1] - F[0]


def transform(f, kind, arg=None):
    """Cellwise transforms.

    ``kind`` is one of ``"abs"``, ``"power"`` (``arg`` = exponent r),
    ``"scale"`` (``arg`` = c) or ``"add"`` (``arg`` = another step function).
    Negative powers leave the exterior at zero but refuse zero cells between
    the first and last breakpoint.
    """
    e, v = f.breakpoints, f.values
    if kind == "abs":
        return StepFunction1D(e, np.abs(v))
    if kind == "scale":
        return StepFunction1D(e, v * arg)
    if kind == "add":
        a, b = _merged(f, arg)
        return StepFunction1D(a.breakpoints, a.values + b.values)
    if kind == "power":
        r = float(arg)
        if r == 0:
            return StepFunction1D(e, np.ones_like(v))
        integer = r.is_integer() and r > 0
        if not integer and np.any(v < 0):
            raise DomainError(f"fractional power {r} of a negative cell")
        if r < 0 and np.any(v == 0):
            raise DomainError(f"negative power {r} of a zero cell inside the support")
        return StepFunction1D(e, np.power(v, r))
    raise InvalidArgument(f"unknown transform {kind!r}")


# grids -----------------------------------------------------------------------


def dyadic_log_nodes(window_X, per_octave=8, near_zero_octaves=24, dtype=np.float64):
    """Symmetric grid on ``[-X, X]`` that is log-spaced by octaves.

    Octave ``[2^j, 2^{j+1})`` is split into ``per_octave`` equal parts, so for
    ``X`` a power of two and ``per_octave`` a power of two every node is a
    node of the dyadic lattice rooted at ``[-X, X)``.
    """
    X = float(window_X)
    top = math.floor(math.log2(X))
    js = np.arange(-int(near_zero_octaves), top + 1)
    frac = np.arange(per_octave) / per_octave
    pos = (np.ldexp(1.0, js)[:, None] * (1.0 + frac[None, :])).ravel()
    pos = pos[pos < X]
    pos = np.concatenate((pos, [X])).astype(dtype)
    return np.concatenate((-pos[::-1], np.zeros(1, dtype=dtype), pos))


def log_tail_nodes(log_lo, log_hi, step, dtype=LONG):
    """Positive nodes ``exp(l)`` for ``l`` from ``log_lo`` to ``log_hi``."""
    n = max(int(math.ceil((log_hi - log_lo) / step)), 1)
    ells = np.linspace(log_lo, log_hi, n + 1).astype(dtype)
    return np.exp(ells)


# closed-form profiles ----------------------------------------------------------

_PROFILE_KINDS = (
    "HilbertIndicator",
    "CommutatorSmallX",
    "CommutatorTail",
    "MaximalTail",
    "CZPhi",
    "AdjointHardyIndicator",
)


@dataclass(frozen=True)
class ProfileFunction:
    """Closed-form extremal profiles used as oracles.

    ========================  ===========================================  ===============
    kind                      value                                        domain
    ========================  ===========================================  ===============
    HilbertIndicator(a,b,c)   ``c*ln(|x-a|/|x-b|)``                        x not in {a, b}
    CZPhi(c)                  ``-c*ln(x/(1-x))``                           (0, 1/2)
    CommutatorSmallX(k, x0)   ``k*ln(1/x)**2``                             (0, x0)
    CommutatorTail            ``ln(x)/x``                                  (e, inf)
    MaximalTail(k)            ``ln(x)**(k-1)/x``                           (e, inf)
    AdjointHardyIndicator     ``ln(b/max(a, x))`` for x < b, else 0        (0, inf)
    ========================  ===========================================  ===============

    Outside the domain the profile evaluates to NaN.
    """

    kind: str
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in _PROFILE_KINDS:
            raise InvalidArgument(f"unknown profile kind {self.kind!r}")
        p = self.params
        if self.kind == "HilbertIndicator":
            a, b, c = p
            if not (a < b and c > 0):
                raise InvalidArgument("HilbertIndicator needs a < b and c_H > 0")
        elif self.kind == "AdjointHardyIndicator":
            a, b = p
            if not 0 <= a < b:
                raise InvalidArgument("AdjointHardyIndicator needs 0 <= a < b")
        elif self.kind == "MaximalTail":
            (k,) = p
            if int(k) != k or k < 1:
                raise InvalidArgument("MaximalTail needs an integer k >= 1")
        elif self.kind == "CZPhi":
            (c,) = p
            if c <= 0:
                raise InvalidArgument("c_H must be positive")
        elif self.kind == "CommutatorSmallX":
            kappa, x0 = p
            if kappa <= 0 or not 0 < x0 <= 1:
                raise InvalidArgument("CommutatorSmallX needs kappa > 0 and 0 < x0 <= 1")

    @property
    def domain(self):
        k, p = self.kind, self.params
        if k == "HilbertIndicator":
            return (-math.inf, math.inf)
        if k == "CZPhi":
            return (0.0, 0.5)
        if k == "CommutatorSmallX":
            return (0.0, p[1])
        if k in ("CommutatorTail", "MaximalTail"):
            return (math.e, math.inf)
        return (0.0, math.inf)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        k, p = self.kind, self.params
        lo, hi = self.domain
        with np.errstate(divide="ignore", invalid="ignore"):
            if k == "HilbertIndicator":
                a, b, c = p
                out = c * np.log(np.abs(x - a) / np.abs(x - b))
                out = np.where((x == a) | (x == b), np.nan, out)
            elif k == "CZPhi":
                out = -p[0] * np.log(x / (1.0 - x))
            elif k == "CommutatorSmallX":
                out = p[0] * np.log(1.0 / x) ** 2
            elif k == "CommutatorTail":
                out = np.log(x) / x
            elif k == "MaximalTail":
                out = np.log(x) ** (p[0] - 1) / x
            else:
                a, b = p
                out = np.where(x < b, np.log(b / np.maximum(a, x)), 0.0)
        if k != "HilbertIndicator":
            out = np.where((x > lo) & (x < hi), out, np.nan)
        return out if out.ndim else out[()]
