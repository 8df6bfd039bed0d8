import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockpart.core import NTensor, Symmetry, basis_vector, single_part
from fockpart.errors import IncompatibleStates, InvalidCut
from fockpart.tensor import (
    antisymmetrize,
    factor_power,
    flatten,
    otimes,
    single_slot_flattenings,
    symmetrize,
    unflatten,
    vee,
    vee_all,
    wedge,
    wedge_all,
)

from conftest import random_complex, random_tensor, random_vec

e0, e1, e2 = (basis_vector(j, 3) for j in range(3))
f0, f1 = (basis_vector(j, 2) for j in range(2))


def _perm_sign(p):
    return -1 if sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j]) % 2 else 1


def test_otimes_basis():
    t = otimes(f0, f1)
    assert dict(t.entries) == {(0, 1): 1}


def test_otimes_scalar_identity(rng):
    t = random_tensor(rng, 2, 3)
    assert np.allclose(otimes(NTensor.scalar(1.0, 3), t).to_dense(), t.to_dense())


def test_otimes_all_ones():
    plus = single_part([1, 1])
    assert np.allclose(otimes(plus, plus).to_dense(), np.ones((2, 2)))


def test_dim_mismatch():
    for op in (otimes, vee, wedge):
        with pytest.raises(IncompatibleStates):
            op(f0, e0)


def test_vee_basis():
    assert np.allclose(vee(f0, f1).to_dense(), [[0, 1], [1, 0]])


def test_vee_square_is_twice_tensor_square(rng):
    psi = random_vec(rng, 3)
    assert np.allclose(vee(psi, psi).to_dense(), 2 * otimes(psi, psi).to_dense())


def test_vee_three_is_permutation_sum():
    t = vee(vee(e0, e1), e2)
    assert t.symmetry is Symmetry.SYMMETRIC
    expected = {p: 1 for p in itertools.permutations(range(3))}
    assert dict(t.entries) == pytest.approx(expected)
    assert np.allclose(vee_all([e0, e1, e2]).to_dense(), t.to_dense())


def test_wedge_basis():
    assert np.allclose(wedge(f0, f1).to_dense(), [[0, 1], [-1, 0]])


def test_wedge_square_vanishes(rng):
    psi = random_vec(rng, 3)
    assert wedge(psi, psi).is_zero


def test_wedge_three_is_signed_permutation_sum():
    t = wedge(wedge(e0, e1), e2)
    expected = {p: _perm_sign(p) for p in itertools.permutations(range(3))}
    assert dict(t.entries) == pytest.approx(expected)
    assert np.allclose(wedge_all([e0, e1, e2]).to_dense(), t.to_dense())


def test_products_require_tagged_inputs(rng):
    plain = random_tensor(rng, 2, 2)
    with pytest.raises(Exception):
        vee(plain, f0)
    with pytest.raises(Exception):
        wedge(plain, f0)


def test_symmetrize_examples():
    assert np.allclose(symmetrize(otimes(f0, f1)).to_dense(), vee(f0, f1).to_dense())
    assert antisymmetrize(otimes(f0, f0)).is_zero
    twice = symmetrize(symmetrize(otimes(f0, f1)).retagged(Symmetry.NONE))
    assert np.allclose(twice.to_dense(), 2 * vee(f0, f1).to_dense())


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("signed", [False, True])
def test_projector_scaling(rng, n, signed):
    op = antisymmetrize if signed else symmetrize
    t = random_tensor(rng, n, 3)
    once = op(t)
    again = op(once.retagged(Symmetry.NONE))
    assert np.allclose(again.to_dense(), math.factorial(n) * once.to_dense(), atol=1e-10)


def test_factor_power():
    phi = single_part([1, 2])
    assert np.allclose(factor_power(phi, 0).to_dense(), 1)
    assert np.allclose(factor_power(phi, 2, Symmetry.SYMMETRIC).to_dense(), vee(phi, phi).to_dense())
    assert factor_power(phi, 2, Symmetry.ANTISYMMETRIC).is_zero


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1),
       st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_bilinearity(seed, a, b):
    rng = np.random.default_rng(seed)
    x, y, z = (random_vec(rng, 3) for _ in range(3))
    comb = single_part(a * x.amps + b * y.amps)
    for op in (otimes, vee, wedge):
        lhs = op(comb, z).to_dense()
        rhs = a * op(x, z).to_dense() + b * op(y, z).to_dense()
        assert np.allclose(lhs, rhs, atol=1e-12 * (1 + np.abs(rhs).max()))
        lhs = op(z, comb).to_dense()
        rhs = a * op(z, x).to_dense() + b * op(z, y).to_dense()
        assert np.allclose(lhs, rhs, atol=1e-12 * (1 + np.abs(rhs).max()))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_commutation_signs(seed):
    rng = np.random.default_rng(seed)
    x, y = random_vec(rng, 3), random_vec(rng, 3)
    assert np.allclose(wedge(x, y).to_dense(), -wedge(y, x).to_dense())
    assert np.allclose(vee(x, y).to_dense(), vee(y, x).to_dense())


def test_flatten_examples():
    assert np.array_equal(flatten(otimes(f0, f1), [0]).matrix, [[0, 1], [0, 0]])
    assert np.array_equal(flatten(vee(f0, f1), [0]).matrix, [[0, 1], [1, 0]])
    assert np.array_equal(flatten(wedge(f0, f1), [0]).matrix, [[0, 1], [-1, 0]])


def test_flatten_column_order():
    t = NTensor(3, 2, Symmetry.NONE, {(1, 0, 1): 1})
    f = flatten(t, [1])
    # rows: slot 1 = 0; cols: slots (0, 2) = (1, 1) -> 1*2 + 1 = 3
    assert f.matrix[0, 3] == 1 and np.count_nonzero(f.matrix) == 1


def test_flatten_invalid_cuts(rng):
    t = random_tensor(rng, 3, 2)
    for rows in ([], [0, 1, 2], [3]):
        with pytest.raises(InvalidCut):
            flatten(t, rows)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4), st.data())
def test_flatten_roundtrip(seed, n, data):
    rng = np.random.default_rng(seed)
    t = random_tensor(rng, n, 2)
    rows = data.draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=n - 1))
    back = unflatten(flatten(t, rows))
    assert np.array_equal(back.to_dense(), t.to_dense())


def test_single_slot_flattenings_match_flatten(rng):
    t = random_tensor(rng, 3, 2)
    for s, m in enumerate(single_slot_flattenings(t)):
        assert np.allclose(m, flatten(t, [s]).matrix)


def test_random_complex_helper_shape(rng):
    assert random_complex(rng, (2, 3)).shape == (2, 3)
