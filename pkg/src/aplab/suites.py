"""Verification suites: the module invariants run on seeded corpora."""

import json
import math
from dataclasses import asdict, dataclass, field
from importlib import resources

import numpy as np

from .asymptotics import sharpness_probe
from .config import DEFAULT, bound_Bp
from .errors import InvalidArgument
from .funcs1d import StepFunction1D, indicator
from .norms import lorentz_norm, rearrange, weak_norm_rearranged
from .operators import adjoint_hardy_weak_norm, default_lattice, maximal, sharp_maximal
from .sparse import DyadicLattice, apply_commutator_sparse, tower_family, verify_sparse
from .weights import RdFParams, Weight, ap_constant, rubio_majorant

SUITES = ("rubio", "adjoint-hardy", "rearrangement", "sharp-maximal", "ap-sanity", "sparse-weak")


@dataclass
class Check:
    name: str
    status: str
    measured: float
    bound: float
    margin: float


@dataclass
class SuiteReport:
    suite: str
    checks: list = field(default_factory=list)
    fingerprint: str = ""

    @property
    def ok(self):
        return all(c.status == "pass" for c in self.checks)

    def add(self, name, measured, bound, ok=None):
        """Record ``measured <= bound`` (or an explicit verdict)."""
        measured, bound = float(measured), float(bound)
        ok = (measured <= bound) if ok is None else ok
        self.checks.append(Check(name, "pass" if ok else "fail", measured, bound, bound - measured))

    def to_json(self):
        doc = {"suite": self.suite, "status": "pass" if self.ok else "fail", "fingerprint": self.fingerprint,
               "checks": [asdict(c) for c in self.checks]}
        return json.dumps(doc, indent=1, sort_keys=True, default=_json_float)


def _json_float(x):
    return float(x)


def frozen_constants():
    text = resources.files("aplab").joinpath("data/constants.json").read_text()
    return json.loads(text)


# corpora -------------------------------------------------------------------------------------


def dyadic_steps(rng, n, span=2.0, denom=8, max_cells=6, nonneg=True):
    """Random step functions whose breakpoints are multiples of ``1/denom`` in ``[-span, span]``."""
    grid = np.arange(-span * denom, span * denom + 1) / denom
    out = []
    for _ in range(n):
        k = int(rng.integers(2, max_cells + 2))
        e = np.sort(rng.choice(grid, size=k, replace=False))
        v = rng.uniform(0.0 if nonneg else -2.0, 2.0, k - 1)
        v[rng.random(k - 1) < 0.2] = 0.0
        if not np.any(v != 0):
            v[0] = 1.0
        out.append(StepFunction1D(e, v))
    return out


def positive_steps(rng, n, max_cells=8):
    out = []
    for _ in range(n):
        k = int(rng.integers(2, max_cells + 2))
        e = np.sort(rng.uniform(0.0, 10.0, k))
        e[0] = max(e[0], 1e-3)
        v = rng.exponential(1.0, k - 1)
        v[rng.random(k - 1) < 0.2] = 0.0
        if not np.any(v > 0):
            v[-1] = 1.0
        out.append(StepFunction1D(e, v))
    return out


def rubio_corpus(config, n=20):
    rng = np.random.default_rng(config.seed)
    return [indicator(0.0, 1.0)] + dyadic_steps(rng, n - 1)


# individual suites -----------------------------------------------------------------------------


def suite_rubio(config, n_seeds=20, ps=(1.25, 1.5, 2.0, 4.0)):
    rep = SuiteReport("rubio")
    for i, h in enumerate(rubio_corpus(config, n_seeds)):
        hn = {}
        for p in ps:
            prm = RdFParams(p, bound_Bp(p, config.rdf_bound_rule), config.rdf_terms, config.window_X)
            R = rubio_majorant(h, prm, config)
            body = R.body
            hv = h(body.midpoints)
            rep.add(f"h<=R h={i} p={p:g}", float(np.max(hv - body.values)), 0.0)
            hn[p] = lorentz_norm(h, None, p, "strong")
            rep.add(f"|R|_p<=2|h|_p h={i} p={p:g}", lorentz_norm(body, None, p, "strong"), 2 * hn[p] + 1e-9)
            rep.add(f"[R]_A1<=2B h={i} p={p:g}", ap_constant(R, 1, "dyadic", config=config), 2 * prm.bound_Bp * (1 + 1e-12))
            Mh = maximal(h, nodes=body.breakpoints)
            rep.add(f"|Mh|_p<=B|h|_p h={i} p={p:g}", lorentz_norm(Mh, None, p, "strong"), prm.bound_Bp * hn[p])
    return rep


def suite_adjoint_hardy(config, n=100, ps=(1.5, 2.0, 4.0, 8.0)):
    rep = SuiteReport("adjoint-hardy")
    rng = np.random.default_rng(config.seed + 1)
    for i, g in enumerate(positive_steps(rng, n)):
        gstar = rearrange(g)
        for p in ps:
            lhs = adjoint_hardy_weak_norm(gstar, p)
            rhs = p * lorentz_norm(g, None, p, "weak")
            rep.add(f"S(g*) g={i} p={p:g}", lhs, rhs + 1e-9)
    return rep


def rearrangement_ratio(f, config, delta=0.5, gamma=0.5):
    """``sup_t [f*(t) - f*(2t)]_+ / (M^#_delta f)*(gamma t)`` for the dyadic sharp function."""
    fs = rearrange(f)
    gs = rearrange(sharp_maximal(f, delta, dyadic=True, lattice=default_lattice(config)))
    e = fs.breakpoints
    cuts = np.unique(np.concatenate((e, e / 2, gs.breakpoints / gamma)))
    cuts = cuts[cuts < e[-1]]
    num = np.maximum(fs(cuts) - fs(2 * cuts), 0)
    den = gs(gamma * cuts)
    if np.any((num > 0) & (den <= 0)):
        return math.inf
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(num > 0, num / den, 0.0)
    return float(r.max())


def sharp_weak_ratio(f, p, config, delta=0.5):
    """``||f||_{p,inf} / (p ||M^{#,d}_delta f||_{p,inf})``."""
    g = sharp_maximal(f, delta, dyadic=True, lattice=default_lattice(config))
    return float(lorentz_norm(f, None, p, "weak") / (p * lorentz_norm(g, None, p, "weak")))


def _sharp_corpus(config, n=12):
    rng = np.random.default_rng(config.seed + 2)
    return [indicator(0.0, 1.0)] + dyadic_steps(rng, n - 1, nonneg=False)


def _doubled(config):
    return config.replace(window_X=2 * config.window_X, lattice_depth=config.lattice_depth + 1)


def corpus_rearrangement_ratio(config):
    return max(rearrangement_ratio(f, config) for f in _sharp_corpus(config))


def corpus_sharp_weak_ratio(config, ps=(2.0, 4.0, 8.0, 16.0)):
    return max(sharp_weak_ratio(f, p, config) for f in _sharp_corpus(config) for p in ps)


def _empirical(rep, name, value, doubled, frozen):
    rep.add(f"{name} finite", value, math.inf, ok=math.isfinite(value))
    rel = abs(doubled - value) / value if value else 0.0
    rep.add(f"{name} grid-doubling drift", rel, 0.10)
    rep.add(f"{name} <= 1.1 x frozen", value, 1.1 * frozen)


def suite_rearrangement(config):
    rep = SuiteReport("rearrangement")
    frozen = frozen_constants()["rearrangement_ratio"]["value"]
    _empirical(rep, "rearrangement ratio", corpus_rearrangement_ratio(config),
               corpus_rearrangement_ratio(_doubled(config)), frozen)
    return rep


def suite_sharp_maximal(config):
    rep = SuiteReport("sharp-maximal")
    frozen = frozen_constants()["sharp_weak_ratio"]["value"]
    _empirical(rep, "sharp weak ratio", corpus_sharp_weak_ratio(config), corpus_sharp_weak_ratio(_doubled(config)), frozen)
    return rep


def ap_corpus(config, n=50):
    rng = np.random.default_rng(config.seed + 3)
    out = []
    for _ in range(n):
        k = int(rng.integers(2, 9))
        inner = np.sort(rng.choice(np.arange(-63, 64), size=k, replace=False)) / 16.0
        e = np.concatenate(([-4.0], inner, [4.0]))
        v = np.exp(rng.normal(0.0, 1.5, e.size - 1))
        out.append(Weight(body=StepFunction1D(e, v), ident="corpus"))
    return out


def suite_ap_sanity(config, ps=(1.0, 1.5, 2.0, 4.0)):
    rep = SuiteReport("ap-sanity")
    lat = DyadicLattice((-4.0, 4.0), 12)
    for p in ps:
        rep.add(f"[1]_A{p:g} == 1", abs(ap_constant(Weight.constant(1.0, config.window_X), p) - 1), 0.0)
    for i, w in enumerate(ap_corpus(config)):
        prev = math.inf
        for p in ps:
            b = ap_constant(w, p)
            d = ap_constant(w, p, "dyadic", lattice=lat)
            rep.add(f"w{i} p={p:g} >= 1", 1.0, min(b, d))
            rep.add(f"w{i} p={p:g} dyadic<=brute", d, b * (1 + 1e-12))
            rep.add(f"w{i} p={p:g} monotone", b, prev + 1e-9)
            prev = b
        a1 = ap_constant(w, 1, "dyadic", lattice=lat)
        for theta in (0.25, 0.5, 0.75):
            wt = Weight(body=StepFunction1D(w.body.breakpoints, w.body.values**theta), ident="corpus^theta")
            rep.add(f"w{i} A1 power theta={theta}", ap_constant(wt, 1, "dyadic", lattice=lat), a1**theta + 1e-9)
    return rep


def suite_sparse_weak(config):
    rep = SuiteReport("sparse-weak")
    lat = DyadicLattice((0.0, 1.0), 12)
    fam = tower_family(lat, 10)
    rep.add("tower family sparse", 0.0, 0.0, ok=verify_sparse(fam).ok)
    probe = sharpness_probe("sparse:tower", 2.0)
    rep.add("A_S probe slope <= 1.1", probe.exponent, 1.1)
    f = StepFunction1D([0.0, 0.25, 0.5, 1.0], [1.0, -3.0, 2.0])
    for variant in ("direct", "star"):
        out = apply_commutator_sparse(fam, indicator(0.0, 1.0, 17.0), f, variant)
        rep.add(f"T_b,S constant b ({variant})", float(np.max(np.abs(out.values))), 0.0)
    return rep


_RUNNERS = {
    "rubio": suite_rubio,
    "adjoint-hardy": suite_adjoint_hardy,
    "rearrangement": suite_rearrangement,
    "sharp-maximal": suite_sharp_maximal,
    "ap-sanity": suite_ap_sanity,
    "sparse-weak": suite_sparse_weak,
}


def verify_suite(name, config=DEFAULT):
    if name not in _RUNNERS:
        raise InvalidArgument(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    rep = _RUNNERS[name](config)
    rep.fingerprint = config.fingerprint()
    return rep
