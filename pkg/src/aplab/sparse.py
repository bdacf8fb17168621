"""Dyadic lattices, sparse families and the sparse operators built on them.

Cubes are addressed by ``(depth, index)``: at depth ``d`` the root
``[r0, r1)`` is cut into ``2**d`` equal half-open intervals.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidArgument
from .funcs1d import StepFunction1D


@dataclass(frozen=True)
class DyadicLattice:
    root: tuple
    max_depth: int = 30

    def __post_init__(self):
        r0, r1 = self.root
        if not r0 < r1:
            raise InvalidArgument("lattice root needs r0 < r1")
        if int(self.max_depth) != self.max_depth or self.max_depth < 0:
            raise InvalidArgument("max_depth must be a non-negative integer")
        object.__setattr__(self, "root", (r0, r1))

    @property
    def length(self):
        return self.root[1] - self.root[0]

    def side(self, depth):
        return np.ldexp(self.length, -int(depth))

    def cube(self, depth, index):
        if not 0 <= depth <= self.max_depth or not 0 <= index < 2**depth:
            raise InvalidArgument(f"cube ({depth}, {index}) is not in the lattice")
        s = self.side(depth)
        lo = self.root[0] + index * s
        return lo, lo + s

    def covers(self, a, b):
        return self.root[0] <= a and b <= self.root[1]

    def containing_index(self, lo, hi, depth):
        """Index of the depth-``depth`` cube containing each ``[lo, hi]``, or -1."""
        lo = np.asarray(lo)
        hi = np.asarray(hi)
        s = self.side(depth)
        idx = np.floor((lo - self.root[0]) / s).astype(np.int64)
        cube_hi = self.root[0] + (idx + 1) * s
        ok = (idx >= 0) & (idx < 2**depth) & (hi <= cube_hi)
        return np.where(ok, idx, -1)

    def cubes_splitting(self, points, depth):
        """Indices of depth-``depth`` cubes having one of ``points`` strictly inside."""
        pts = np.asarray(points)
        s = self.side(depth)
        rel = (pts - self.root[0]) / s
        idx = np.floor(rel).astype(np.int64)
        interior = (rel > idx) & (idx >= 0) & (idx < 2**depth)
        return np.unique(idx[interior])

    def nodes(self, depth):
        return self.root[0] + np.arange(2**depth + 1) * self.side(depth)


# sparse families ---------------------------------------------------------------


@dataclass
class SparseFamily:
    lattice: DyadicLattice
    cubes: list
    portions: dict = field(default_factory=dict)
    eta: float = 0.5

    def __post_init__(self):
        self.cubes = [tuple(int(t) for t in q) for q in self.cubes]
        self.portions = {
            tuple(int(t) for t in q): [tuple(int(t) for t in c) for c in cells]
            for q, cells in self.portions.items()
        }
        if not 0 < self.eta <= 1:
            raise InvalidArgument("eta must lie in (0, 1]")

    def ordered_cubes(self):
        """Cubes in lattice order; all sums run in this order for reproducibility."""
        return sorted(set(self.cubes))

    def to_json(self, path=None):
        doc = {
            "root": [float(self.lattice.root[0]), float(self.lattice.root[1])],
            "max_depth": self.lattice.max_depth,
            "eta": self.eta,
            "cubes": [
                {"depth": d, "index": i, "e_cells": [list(c) for c in self.portions.get((d, i), [])]}
                for d, i in self.ordered_cubes()
            ],
        }
        text = json.dumps(doc, indent=1)
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_json(cls, source):
        text = source if str(source).lstrip().startswith("{") else Path(source).read_text()
        doc = json.loads(text)
        cubes = [(c["depth"], c["index"]) for c in doc["cubes"]]
        depth = doc.get("max_depth", max([d for d, _ in cubes] + [c[0] for q in doc["cubes"] for c in q["e_cells"]] + [0]))
        lattice = DyadicLattice(tuple(doc["root"]), depth)
        portions = {(c["depth"], c["index"]): [tuple(x) for x in c["e_cells"]] for c in doc["cubes"]}
        return cls(lattice, cubes, portions, doc.get("eta", 0.5))


@dataclass
class SparseReport:
    ok: bool
    worst_eta: float
    violations: list


def _union_length(intervals):
    if not intervals:
        return 0.0
    total = 0.0
    cur_lo, cur_hi = None, None
    for lo, hi in sorted(intervals):
        if cur_hi is None or lo > cur_hi:
            if cur_hi is not None:
                total += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
        else:
            cur_hi = max(cur_hi, hi)
    return total + (cur_hi - cur_lo)


def verify_sparse(family):
    lat = family.lattice
    violations = []
    owned = []
    worst = np.inf
    for q in family.ordered_cubes():
        qlo, qhi = lat.cube(*q)
        cells = [lat.cube(*c) for c in family.portions.get(q, [])]
        for c, (lo, hi) in zip(family.portions.get(q, []), cells):
            if lo < qlo or hi > qhi:
                violations.append(f"cell {c} of cube {q} is not inside it")
        measure = _union_length(cells)
        worst = min(worst, measure / (qhi - qlo))
        owned.append((q, cells))
    for i, (q1, c1) in enumerate(owned):
        for q2, c2 in owned[i + 1 :]:
            for a1, b1 in c1:
                if any(a1 < b2 and a2 < b1 for a2, b2 in c2):
                    violations.append(f"portions of {q1} and {q2} overlap")
                    break
    if worst < family.eta:
        violations.append(f"worst ratio {worst:.6g} below eta={family.eta}")
    if not owned:
        worst = 1.0
    return SparseReport(not violations, float(worst), violations)


def tower_family(lattice, depth):
    """``{[r0, r0 + 2^-j |root|) : j <= depth}`` owning their right halves."""
    if depth + 1 > lattice.max_depth:
        raise InvalidArgument("tower deeper than the lattice")
    cubes = [(j, 0) for j in range(depth + 1)]
    portions = {(j, 0): [(j + 1, 1)] for j in range(depth + 1)}
    return SparseFamily(lattice, cubes, portions, eta=0.5)


def single_scale_family(lattice, depth):
    cubes = [(depth, i) for i in range(2**depth)]
    return SparseFamily(lattice, cubes, {q: [q] for q in cubes}, eta=1.0)


def random_family(lattice, rng, n_cubes=12, eta=0.5, cell_depth=None, max_tries=2000):
    """Greedy sparse family: cubes drawn at random, each claiming free cells.

    A cube is accepted when at least ``eta`` of it is still unclaimed at
    resolution ``cell_depth``; it then claims exactly enough of those cells.
    """
    D = lattice.max_depth if cell_depth is None else cell_depth
    free = np.ones(2**D, dtype=bool)
    cubes, portions = [], {}
    tries = 0
    while len(cubes) < n_cubes and tries < max_tries:
        tries += 1
        d = int(rng.integers(0, D - 1))
        i = int(rng.integers(0, 2**d))
        if (d, i) in portions:
            continue
        span = 2 ** (D - d)
        cells = np.flatnonzero(free[i * span : (i + 1) * span]) + i * span
        need = int(np.ceil(eta * span))
        if cells.size < need:
            continue
        take = np.sort(rng.choice(cells, size=need, replace=False))
        free[take] = False
        cubes.append((d, i))
        portions[(d, i)] = [(D, int(c)) for c in take]
    return SparseFamily(lattice, cubes, portions, eta=eta)


# operators ----------------------------------------------------------------------------


def _output_grid(family, *funcs):
    lat = family.lattice
    ends = [lat.cube(*q) for q in family.ordered_cubes()]
    pts = [np.asarray(ends, dtype=float).ravel()] if ends else []
    pts += [np.asarray(f.breakpoints, dtype=float) for f in funcs]
    return np.unique(np.concatenate(pts))


def _cube_mean(g, lo, hi):
    """Mean of step ``g`` over ``[lo, hi)``, exact when ``g`` is constant there."""
    e, v = g.breakpoints, g.values
    i0 = max(np.searchsorted(e, lo, side="right") - 1, 0)
    i1 = min(np.searchsorted(e, hi, side="left"), v.size)
    if lo < e[0] or hi > e[-1] or i0 >= i1:
        return (g.primitive(hi, anchored=True) - g.primitive(lo, anchored=True)) / (hi - lo)
    if np.all(v[i0:i1] == v[i0]):
        return v[i0]
    seg = np.clip(e[i0 : i1 + 1], lo, hi)
    return np.sum(v[i0:i1] * np.diff(seg)) / (hi - lo)


def apply_sparse(family, f):
    """``A_S f = sum_Q <f>_Q chi_Q``, exact on the merged grid."""
    nodes = _output_grid(family, f)
    out = np.zeros(nodes.size - 1)
    for q in family.ordered_cubes():
        lo, hi = family.lattice.cube(*q)
        avg = _cube_mean(f, lo, hi)
        i0, i1 = np.searchsorted(nodes, [lo, hi])
        out[i0:i1] += avg
    return StepFunction1D(nodes, out)


def apply_commutator_sparse(family, b, f, variant="direct"):
    """``T_{b,S} f`` (``direct``) or ``T*_{b,S} f`` (``star``)."""
    if variant not in ("direct", "star"):
        raise InvalidArgument(f"unknown variant {variant!r}")
    r0, r1 = family.lattice.root
    if b.breakpoints[0] > r0 or b.breakpoints[-1] < r1:
        raise InvalidArgument("b must be defined on the whole lattice root")
    nodes = _output_grid(family, b, f)
    mid = 0.5 * (nodes[:-1] + nodes[1:])
    bv = b(mid)
    fv = np.abs(f(mid))
    lens = np.diff(nodes)
    out = np.zeros(nodes.size - 1)
    for q in family.ordered_cubes():
        lo, hi = family.lattice.cube(*q)
        i0, i1 = np.searchsorted(nodes, [lo, hi])
        bq = _cube_mean(b, lo, hi)
        osc = np.abs(bv[i0:i1] - bq)
        if variant == "direct":
            out[i0:i1] += osc * (np.sum(fv[i0:i1] * lens[i0:i1]) / (hi - lo))
        else:
            out[i0:i1] += np.sum(osc * fv[i0:i1] * lens[i0:i1]) / (hi - lo)
    return StepFunction1D(nodes, out)
