import random
from fractions import Fraction as Q
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from spectres.algebra import Algebra
from spectres.cuboids import Cuboid, chain_eval
from spectres.joint import COUNTEREXAMPLE_BLOCK, counterexample_factors, group_joint
from spectres.sampling import random_resolution
from spectres.spectral import (LEFT_CONTINUITY, MONOTONE, TOTAL, VANISH, VOLUME,
                               DiscreteSpectralResolution, ExtendedBlock, SpectralError,
                               TabulatedResolution, atom_mass, check_permutation_invariance,
                               check_spectral_resolution, delta_composition, derived_volume,
                               validation_grid, volume)

U = Algebra.unit_interval()
T2 = Algebra.fuzzy_tribe(2)
M2 = Algebra.matrix_effect(2)
X = DiscreteSpectralResolution(1, U, [((0,), Q(1, 20)), ((1,), Q(3, 10)), ((2,), Q(13, 20))])


def block(lo, hi):
    return ExtendedBlock(tuple(lo), tuple(hi))


class TestEvaluation:
    def test_single_atom(self):
        F = DiscreteSpectralResolution(2, U, [((0, 0), Q(1))])
        assert F((Q(1, 100), Q(1, 100))) == 1
        assert F((0, 1)) == 0
        assert F((-1, 5)) == 0

    def test_strict_inequality(self):
        assert X((1,)) == Q(1, 20)
        assert X((Q(105, 100),)) == Q(7, 20)
        assert X((3,)) == 1

    def test_duplicate_points_rejected(self):
        with pytest.raises(SpectralError):
            DiscreteSpectralResolution(1, U, [((0,), Q(1, 2)), ((0,), Q(1, 2))])

    def test_tabulated_snaps_up(self):
        T = TabulatedResolution(U, [(0, 1)], {(Q(0),): Q(0), (Q(1),): Q(1)})
        assert T((Q(1, 2),)) == 1
        assert T((0,)) == 0
        assert T((5,)) == 1


class TestVolume:
    def test_lower_rays(self):
        F = random_resolution(random.Random(3), 2, U)
        b = (Q(1, 3), Q(-1, 5))
        assert volume(F, block((None, None), b)) == F(b)

    def test_empty_block(self):
        assert volume(X, block((1,), (1,))) == 0

    def test_single_atom_block(self):
        assert volume(X, block((Q(1, 2),), (Q(3, 2),))) == Q(3, 10)

    def test_infinite_upper_rejected(self):
        with pytest.raises(SpectralError):
            volume(X, block((0,), (None,)))

    def test_tribe_values(self):
        F = DiscreteSpectralResolution(1, T2, [((0,), (Q(1), Q(1, 4))), ((1,), (Q(0), Q(3, 4)))])
        assert volume(F, block((Q(1, 2),), (2,))) == (0, Q(3, 4))


class TestDerivedVolume:
    def test_all_axes_is_volume(self):
        F = random_resolution(random.Random(11), 3, U)
        lo, hi = (-1, 0, Q(-1, 2)), (1, 2, Q(3, 2))
        bounds = {i: (lo[i], hi[i]) for i in range(3)}
        assert derived_volume(F, [0, 1, 2], {}, bounds) == volume(F, block(lo, hi))

    def test_no_axes_rejected(self):
        with pytest.raises(SpectralError):
            derived_volume(X, [], {0: 0}, {})

    def test_repeated_axes_rejected(self):
        with pytest.raises(SpectralError):
            derived_volume(X, [0, 0], {}, {0: (0, 1)})

    def test_single_axis_is_monotone_difference(self):
        F = random_resolution(random.Random(5), 2, U)
        s2 = Q(1, 2)
        d = derived_volume(F, [0], {1: s2}, {0: (Q(-1), Q(1))})
        assert d == F((1, s2)) - F((-1, s2)) >= 0


def test_permutation_invariance_examples():
    F = random_resolution(random.Random(2), 3, U)
    assert check_permutation_invariance(F, block((-2, -2, -2), (1, 1, 1)))
    assert check_permutation_invariance(F, block((0, 0, 0), (0, 1, 1)))
    assert delta_composition(F, (2, 0, 1), (0, 0, 0), (0, 1, 1)) == 0


resolutions = st.builds(
    lambda seed, n, tribe: random_resolution(random.Random(seed), n, T2 if tribe else U),
    st.integers(0, 10 ** 6), st.integers(1, 3), st.booleans())
grid_q = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@st.composite
def finite_blocks(draw, n):
    lo, hi = [], []
    for _ in range(n):
        a, b = sorted((draw(grid_q), draw(grid_q)))
        lo.append(a)
        hi.append(b)
    return block(lo, hi)


@given(resolutions, st.data())
def test_volume_is_atom_mass(F, data):
    b = data.draw(finite_blocks(F.n))
    assert volume(F, b) == atom_mass(F, b)


@given(resolutions, st.data())
def test_splitting_additivity(F, data):
    b = data.draw(finite_blocks(F.n))
    i = data.draw(st.integers(0, F.n - 1))
    if b.lo[i] == b.hi[i]:
        return
    c = (b.lo[i] + b.hi[i]) / 2
    left = block(b.lo, tuple(c if j == i else h for j, h in enumerate(b.hi)))
    right = block(tuple(c if j == i else a for j, a in enumerate(b.lo)), b.hi)
    assert F.algebra.add(volume(F, left), volume(F, right)) == volume(F, b)


@given(resolutions, st.data())
def test_vertex_chain_consistency(F, data):
    b = data.draw(finite_blocks(F.n))
    # a degenerate block is empty while its cuboid chain is a lower-dimensional face
    if any(a == c for a, c in zip(b.lo, b.hi)):
        return
    assert chain_eval(Cuboid(b.lo, b.hi), F, F.algebra) == volume(F, b)


@settings(max_examples=30)
@given(resolutions, st.data())
def test_partial_compositions_in_unit_interval(F, data):
    alg = F.algebra
    b = data.draw(finite_blocks(F.n))
    fixed_pt = [data.draw(grid_q) for _ in range(F.n)]
    for r in range(1, F.n + 1):
        for axes in product(range(F.n), repeat=r):
            if len(set(axes)) != r or list(axes) != sorted(axes):
                continue
            fixed = {i: fixed_pt[i] for i in range(F.n) if i not in axes}
            d = derived_volume(F, axes, fixed, {i: (b.lo[i], b.hi[i]) for i in axes})
            assert alg.is_positive(d) and alg.leq(d, alg.unit())


@given(resolutions)
def test_valid_resolutions_pass(F):
    report = check_spectral_resolution(F)
    assert report.passed and not report.violations


class TestValidator:
    def test_grid(self):
        assert validation_grid(X) == ((-1, 0, 1, 2, 3),)

    def test_counterexample_volume_violation(self):
        F, report = group_joint(counterexample_factors())
        assert not report.passed
        hits = [v for v in report.by_axiom(VOLUME) if v.block() == COUNTEREXAMPLE_BLOCK]
        assert hits or any(v.value == Q(-1, 20) for v in report.by_axiom(VOLUME))
        assert volume(F, COUNTEREXAMPLE_BLOCK) == Q(-1, 20)

    def test_non_monotone_table(self):
        g = (Q(0), Q(1), Q(2), Q(3))
        vals = {(Q(0),): Q(0), (Q(1),): Q(3, 4), (Q(2),): Q(1, 2), (Q(3),): Q(1)}
        report = check_spectral_resolution(TabulatedResolution(U, [g], vals))
        mono = report.by_axiom(MONOTONE)
        assert mono
        w = mono[0].witness
        assert U.leq(U.zero(), U.sub(vals[w["from"]], vals[w["to"]])) and w["from"] < w["to"]

    def test_wrong_total(self):
        F = DiscreteSpectralResolution(1, U, [((0,), Q(1, 2))])
        report = check_spectral_resolution(F)
        assert [v.value for v in report.by_axiom(TOTAL)] == [Q(1, 2)]

    def test_nonvanishing_table(self):
        g = (Q(0), Q(1))
        T = TabulatedResolution(U, [g], {(Q(0),): Q(1, 4), (Q(1),): Q(1)})
        assert check_spectral_resolution(T).by_axiom(VANISH)

    def test_right_continuous_callable(self):
        class RightContinuous:
            n, algebra = 1, U

            def breakpoints(self):
                return [(Q(0),)]

            def __call__(self, t):
                return Q(1) if t[0] >= 0 else Q(0)

        assert check_spectral_resolution(RightContinuous()).by_axiom(LEFT_CONTINUITY)

    def test_negative_atom(self):
        F = DiscreteSpectralResolution(2, U, [((0, 0), Q(3, 2)), ((1, 1), Q(-1, 2))])
        report = check_spectral_resolution(F)
        assert report.by_axiom(VOLUME)
        for v in report.by_axiom(VOLUME):
            assert volume(F, v.block()) == v.value < 0


class TestMatrices:
    def test_valid_matrix_resolution(self):
        P = ((Q(1), Q(0)), (Q(0), Q(0)))
        R = ((Q(0), Q(0)), (Q(0), Q(1)))
        F = DiscreteSpectralResolution(2, M2, [((0, 0), P), ((1, 1), R)])
        assert check_spectral_resolution(F).passed

    def test_cascade_catches_non_psd_atom(self):
        A = ((Q(1, 2), Q(1, 2)), (Q(1, 2), Q(1, 2)))
        B = ((Q(1, 2), Q(-1, 2)), (Q(-1, 2), Q(1, 2)))
        ok = DiscreteSpectralResolution(1, M2, [((0,), A), ((1,), B)])
        assert check_spectral_resolution(ok, cascade=True).passed
        C = ((Q(1), Q(1)), (Q(1), Q(1, 2)))
        D = ((Q(0), Q(-1)), (Q(-1), Q(1, 2)))
        bad = DiscreteSpectralResolution(1, M2, [((0,), C), ((1,), D)])
        report = check_spectral_resolution(bad)
        assert not report.passed
