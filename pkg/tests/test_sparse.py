import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aplab import InvalidArgument, StepFunction1D
from aplab.funcs1d import indicator
from aplab.sparse import (
    DyadicLattice,
    SparseFamily,
    apply_commutator_sparse,
    apply_sparse,
    random_family,
    tower_family,
    verify_sparse,
)

LAT = DyadicLattice((0.0, 1.0), 10)


def test_single_cube_is_fully_sparse():
    fam = SparseFamily(LAT, [(0, 0)], {(0, 0): [(0, 0)]}, eta=0.5)
    rep = verify_sparse(fam)
    assert rep.ok and rep.worst_eta == 1.0


def test_nested_pair_worst_ratio():
    # [0,1) owns [1/4,1), [0,1/4) owns itself
    fam = SparseFamily(
        LAT, [(0, 0), (2, 0)], {(0, 0): [(2, 1), (1, 1)], (2, 0): [(2, 0)]}, eta=0.5
    )
    rep = verify_sparse(fam)
    assert rep.ok
    assert rep.worst_eta == pytest.approx(0.75)


def test_overlapping_portions_rejected():
    fam = SparseFamily(LAT, [(0, 0), (1, 0)], {(0, 0): [(1, 0)], (1, 0): [(1, 0)]}, eta=0.5)
    rep = verify_sparse(fam)
    assert not rep.ok
    assert any("overlap" in v for v in rep.violations)


def test_portion_outside_cube_rejected():
    fam = SparseFamily(LAT, [(1, 0)], {(1, 0): [(1, 1)]}, eta=0.5)
    assert not verify_sparse(fam).ok


def test_tower_and_random_families_are_sparse():
    assert verify_sparse(tower_family(LAT, 6)).ok
    fam = random_family(LAT, np.random.default_rng(0), n_cubes=10, eta=0.5, cell_depth=8)
    assert verify_sparse(fam).ok


def test_apply_sparse_example():
    fam = tower_family(LAT, 1)  # cubes [0,1) and [0,1/2)
    out = apply_sparse(fam, indicator(0.0, 0.25))
    assert out(0.1) == pytest.approx(0.25 + 0.5)
    assert out(0.75) == pytest.approx(0.25)
    assert out(1.5) == 0


def test_apply_sparse_self_adjoint():
    fam = tower_family(LAT, 3)
    f, g = indicator(0.0, 0.5), indicator(0.5, 1.0)
    lhs = float(np.sum((apply_sparse(fam, f) * g).values * (apply_sparse(fam, f) * g).lengths))
    Ag = apply_sparse(fam, g) * f
    rhs = float(np.sum(Ag.values * Ag.lengths))
    assert lhs == pytest.approx(0.25) and rhs == pytest.approx(0.25)


def test_commutator_example_both_variants():
    fam = SparseFamily(LAT, [(0, 0)], {(0, 0): [(0, 0)]}, eta=1.0)
    b = StepFunction1D([0.0, 0.5, 1.0], [0.0, 1.0])
    f = indicator(0.0, 1.0)
    for variant in ("direct", "star"):
        out = apply_commutator_sparse(fam, b, f, variant)
        assert out.equivalent(indicator(0.0, 1.0, 0.5), atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.floats(-1e6, 1e6), st.sampled_from(["direct", "star"]))
def test_constant_b_gives_exact_zero(c, variant):
    fam = tower_family(LAT, 5)
    b = indicator(0.0, 1.0, c)
    f = StepFunction1D([0.0, 0.3, 0.7, 1.0], [1.0, -2.0, 5.0])
    out = apply_commutator_sparse(fam, b, f, variant)
    assert np.all(out.values == 0)


@settings(max_examples=40, deadline=None)
@given(st.floats(-100, 100))
def test_commutator_invariant_under_shift_of_b(c):
    fam = tower_family(LAT, 4)
    b = StepFunction1D([0.0, 0.25, 0.5, 1.0], [0.0, 3.0, -1.0])
    f = indicator(0.1, 0.6)
    o1 = apply_commutator_sparse(fam, b, f)
    o2 = apply_commutator_sparse(fam, b + indicator(0.0, 1.0, c), f)
    np.testing.assert_allclose(o2(o1.midpoints), o1(o1.midpoints), atol=1e-10 * (1 + abs(c)))


def test_sparse_operator_is_monotone():
    fam = tower_family(LAT, 5)
    f = indicator(0.0, 0.5)
    g = indicator(0.0, 0.5, 2.0) + indicator(0.5, 1.0)
    a, b = apply_sparse(fam, f), apply_sparse(fam, g)
    x = np.linspace(0, 1, 101)[:-1]
    assert np.all(a(x) <= b(x))


def test_commutator_requires_b_on_root():
    fam = tower_family(LAT, 2)
    with pytest.raises(InvalidArgument):
        apply_commutator_sparse(fam, indicator(0.0, 0.5), indicator(0.0, 1.0))


def test_family_json_roundtrip(tmp_path):
    fam = random_family(LAT, np.random.default_rng(1), n_cubes=6, cell_depth=6)
    text = fam.to_json(tmp_path / "fam.json")
    back = SparseFamily.from_json(tmp_path / "fam.json")
    assert back.ordered_cubes() == fam.ordered_cubes()
    assert back.portions == fam.portions
    assert back.to_json() == text


def test_lattice_containing_index():
    lat = DyadicLattice((-4.0, 4.0), 6)
    assert lat.containing_index(0.5, 0.75, 3) == 4
    assert lat.containing_index(-0.5, 0.5, 3) == -1
    assert lat.containing_index(-0.5, 0.5, 0) == 0
