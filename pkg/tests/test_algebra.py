import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from osclab.algebra import (DimensionMismatch, LambdaSpec, ad, basis_vector,
                            bracket, cartan, center, derived_ideal,
                            jacobi_residual, ker_ad)


def e(spec, i):
    return basis_vector(spec, i)


class TestLambdaSpec:
    def test_blocks_group_equal_frequencies(self):
        spec = LambdaSpec((1.0, 1.0, 2.0))
        assert spec.blocks == ((1.0, 2), (2.0, 1))
        assert spec.block_indices == ((1, 2), (3,))
        assert spec.n == 3 and spec.dim == 8

    def test_rejects_bad_frequencies(self):
        with pytest.raises(ValueError, match="positive"):
            LambdaSpec((0.0, 1.0))
        with pytest.raises(ValueError, match="positive"):
            LambdaSpec((-1.0,))
        with pytest.raises(ValueError, match="non-decreasing"):
            LambdaSpec((2.0, 1.0))

    def test_json_parsing(self):
        spec = LambdaSpec.from_json({"lambda": [1.0, 1.0, 2.0]})
        assert spec.lambdas == (1.0, 1.0, 2.0)
        with pytest.raises(ValueError, match="lambda"):
            LambdaSpec.from_json({"frequencies": [1.0]})
        with pytest.raises(ValueError, match="non-empty"):
            LambdaSpec.from_json({"lambda": []})
        with pytest.raises(ValueError, match="positive"):
            LambdaSpec.from_json({"lambda": [1.0, -2.0]})


class TestBracket:
    def test_structure_constants_lambda1(self, spec1):
        # [e_-1, e_1] = ec_1 and [e_1, ec_1] = e_0
        np.testing.assert_array_equal(bracket(spec1, e(spec1, 0), e(spec1, 2)),
                                      e(spec1, 3))
        np.testing.assert_array_equal(bracket(spec1, e(spec1, 2), e(spec1, 3)),
                                      e(spec1, 1))

    def test_lambda_scales_the_rotation(self):
        spec = LambdaSpec((2.0,))
        np.testing.assert_array_equal(bracket(spec, e(spec, 0), e(spec, 3)),
                                      -2.0 * e(spec, 2))

    def test_self_bracket_vanishes(self, spec12, rng):
        x = rng.standard_normal(spec12.dim)
        assert np.all(bracket(spec12, x, x) == 0.0)

    def test_antisymmetry_is_exact(self, spec112, rng):
        for _ in range(50):
            x, y = rng.standard_normal((2, spec112.dim))
            lhs = bracket(spec112, x, y)
            rhs = bracket(spec112, y, x)
            assert np.all(lhs + rhs == 0.0)

    def test_rejects_mixed_specs(self, spec1, spec12):
        with pytest.raises(DimensionMismatch):
            bracket(spec1, e(spec1, 0), e(spec12, 0))

    @given(st.integers(1, 8), st.integers(0, 2**31 - 1))
    @settings(max_examples=25, deadline=None)
    def test_jacobi_for_any_size(self, n, seed):
        gen = np.random.default_rng(seed)
        lams = np.sort(gen.uniform(0.3, 4.0, size=n))
        spec = LambdaSpec(tuple(lams))
        x, y, z = gen.standard_normal((3, spec.dim))
        x, y, z = (v / np.linalg.norm(v) for v in (x, y, z))
        assert jacobi_residual(spec, x, y, z) <= 1e-12

    def test_jacobi_on_basis_triples(self, spec12):
        worst = max(jacobi_residual(spec12, e(spec12, a), e(spec12, b), e(spec12, c))
                    for a in range(6) for b in range(6) for c in range(6))
        assert worst <= 1e-13

    def test_jacobi_irrational_frequencies(self, rng):
        spec = LambdaSpec((1.0, np.sqrt(2.0), 3.0))
        worst = 0.0
        for _ in range(100):
            x, y, z = rng.standard_normal((3, spec.dim))
            worst = max(worst, jacobi_residual(spec, x, y, z))
        assert worst <= 1e-12


class TestAdjoint:
    def test_center_element_acts_trivially(self, spec12):
        assert np.all(ad(spec12, e(spec12, 1)) == 0.0)

    def test_ad_e_minus_one_is_a_rotation_generator(self, spec1):
        m = ad(spec1, e(spec1, 0))
        np.testing.assert_array_equal(m @ e(spec1, 2), e(spec1, 3))
        np.testing.assert_array_equal(m @ e(spec1, 3), -e(spec1, 2))

    def test_ad_annihilates_its_argument(self, spec112, rng):
        x = rng.standard_normal(spec112.dim)
        assert np.max(np.abs(ad(spec112, x) @ x)) <= 1e-13


class TestSubspaces:
    def test_distinguished_dimensions(self, spec12):
        assert center(spec12).dim == 1
        assert derived_ideal(spec12).dim == 2 * spec12.n + 1
        assert cartan(spec12).dim == 2

    def test_center_is_spanned_by_e0(self, spec112):
        c = center(spec112)
        assert c.contains(e(spec112, 1))
        assert not c.contains(e(spec112, 0))

    def test_cartan_is_the_kernel_of_ad_e_minus_one(self, spec1):
        c = cartan(spec1)
        assert c.contains(e(spec1, 0)) and c.contains(e(spec1, 1))
        assert not c.contains(e(spec1, 2))
        k = ker_ad(spec1, e(spec1, 0))
        assert k.dim == 2

    def test_center_inside_derived_inside_algebra(self, spec112):
        c, d = center(spec112), derived_ideal(spec112)
        for col in c.basis.T:
            assert d.contains(col)

    def test_derived_ideal_brackets_into_center(self, spec112, rng):
        d, c = derived_ideal(spec112), center(spec112)
        for _ in range(20):
            x = d.project(rng.standard_normal(spec112.dim))
            y = d.project(rng.standard_normal(spec112.dim))
            assert c.contains(bracket(spec112, x, y), tol=1e-10)
