import cmath
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockpart.core import (
    FockState,
    NTensor,
    Statistics,
    Symmetry,
    embed,
    equal_up_to_phase,
    field_product,
    from_occupations,
    inner_product,
    n_component,
    normalized,
    occupation_amplitudes,
    occupation_state,
    occupation_tensor,
    single_part,
    superpose,
    vacuum,
    zero_state,
)
from fockpart.errors import (
    IncompatibleStates,
    InvalidDimension,
    NotModeOrdered,
    PauliViolation,
    SymmetryViolation,
    TruncationExceeded,
    ZeroState,
)

from conftest import random_state, random_tensor

STATS = list(Statistics)


# -- single_part ---------------------------------------------------------------

def test_single_part_basis_vector():
    v = single_part([1, 0])
    assert v.dim == 2
    assert np.array_equal(v.amps, [1, 0])


def test_single_part_keeps_scale():
    v = single_part([1, 1])
    assert v.norm() == pytest.approx(math.sqrt(2))


def test_single_part_unit_norm_complex():
    assert single_part([0.6, 0.8j]).norm() == pytest.approx(1.0)


def test_single_part_empty_rejected():
    with pytest.raises(InvalidDimension):
        single_part([])


def test_single_part_is_immutable():
    v = single_part([1, 2])
    with pytest.raises(ValueError):
        v.amps[0] = 5


# -- NTensor -------------------------------------------------------------------

def test_ntensor_rejects_bad_keys():
    with pytest.raises(InvalidDimension):
        NTensor(2, 2, Symmetry.NONE, {(0, 2): 1})
    with pytest.raises(InvalidDimension):
        NTensor(2, 2, Symmetry.NONE, {(0,): 1})


def test_ntensor_symmetry_checked():
    with pytest.raises(SymmetryViolation):
        NTensor(2, 2, Symmetry.SYMMETRIC, {(0, 1): 1})
    with pytest.raises(SymmetryViolation):
        NTensor(2, 2, Symmetry.ANTISYMMETRIC, {(0, 1): 1, (1, 0): 1})
    with pytest.raises(SymmetryViolation):
        NTensor(2, 2, Symmetry.ANTISYMMETRIC, {(0, 0): 1})
    NTensor(2, 2, Symmetry.ANTISYMMETRIC, {(0, 1): 1, (1, 0): -1})


def test_ntensor_prunes_tiny_amplitudes():
    t = NTensor(1, 2, Symmetry.NONE, {(0,): 1e-15, (1,): 1})
    assert set(t.entries) == {(1,)}


def test_scalar_tensor_has_empty_key():
    t = NTensor.scalar(2.5, 3)
    assert t.n == 0 and dict(t.entries) == {(): 2.5}


def test_symmetric_difference_survives_cancellation(rng):
    a = random_tensor(rng, 3, 3, Symmetry.SYMMETRIC).scaled(1e6)
    b = a.scaled(1 + 1e-15)
    diff = a - b
    assert diff.symmetry is Symmetry.SYMMETRIC
    assert diff.norm() < 1e-6


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([Symmetry.SYMMETRIC, Symmetry.ANTISYMMETRIC]),
       st.integers(2, 4))
def test_stored_tensors_respect_permutations(seed, symmetry, n):
    rng = np.random.default_rng(seed)
    t = random_tensor(rng, n, 3, symmetry)
    key = tuple(rng.integers(0, 3, size=n))
    perm = rng.permutation(n)
    permuted = tuple(key[p] for p in perm)
    sign = 1
    if symmetry is Symmetry.ANTISYMMETRIC:
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        sign = -1 if inversions % 2 else 1
    assert abs(t[permuted] - sign * t[key]) <= 1e-12 * max(1.0, abs(t[key]))


# -- occupation_state --------------------------------------------------------------

def test_occupation_boson_two_zero():
    s = occupation_state((2, 0), "boson")
    assert s.particle_numbers == [2]
    t = s.component(2)
    assert set(t.entries) == {(0, 0)}
    assert s.norm() == pytest.approx(1.0)


@pytest.mark.parametrize("stats", STATS)
def test_occupation_vacuum(stats):
    s = occupation_state((0, 0), stats)
    assert dict(s.component(0).entries) == {(): 1}


def test_occupation_fermion_pair():
    t = occupation_state((1, 1), "fermion").component(2)
    c = 1 / math.sqrt(2)
    assert t[(0, 1)] == pytest.approx(c)
    assert t[(1, 0)] == pytest.approx(-c)
    assert t.norm() == pytest.approx(1.0)


def test_occupation_fermion_pauli():
    with pytest.raises(PauliViolation):
        occupation_state((2, 0), "fermion")


def test_occupation_distinguishable_is_ordered_monomial():
    t = occupation_state((2, 1), "dist").component(3)
    assert dict(t.entries) == {(0, 0, 1): 1}


def _occupations(dim, top, fermion):
    counts = range(2 if fermion else top + 1)
    return [o for o in itertools.product(counts, repeat=dim) if sum(o) <= top]


@pytest.mark.parametrize("stats", STATS)
def test_occupation_basis_is_orthonormal(stats):
    occs = _occupations(3, 3, stats is Statistics.FERMION)
    states = [occupation_state(o, stats) for o in occs]
    for (i, a), (j, b) in itertools.product(enumerate(states), repeat=2):
        assert abs(inner_product(a, b) - (1.0 if i == j else 0.0)) < 1e-12


# -- superpose / components / inner products ------------------------------------------

def test_superpose_psi_prime():
    s = superpose([(1, occupation_state((2, 0), "boson")), (3, occupation_state((0, 3), "boson"))])
    assert s.particle_numbers == [2, 3]
    assert inner_product(s, s) == pytest.approx(10)


def test_superpose_zero_coefficient_dropped():
    vac = vacuum(2, "boson")
    s = superpose([(1, vac), (0, occupation_state((1, 1), "boson"))])
    assert s.particle_numbers == [0]
    assert inner_product(s, vac) == pytest.approx(1)


def test_superpose_truncated_tmsv():
    s = superpose([(0.5 ** n, occupation_state((n, n), "dist")) for n in range(4)])
    assert s.particle_numbers == [0, 2, 4, 6]
    assert n_component(s, 3).is_zero
    assert n_component(s, 4)[(0, 0, 1, 1)] == pytest.approx(0.25)


def test_superpose_rejects_mixed_spaces():
    with pytest.raises(IncompatibleStates):
        superpose([(1, vacuum(2, "boson")), (1, vacuum(2, "fermion"))])
    with pytest.raises(IncompatibleStates):
        superpose([(1, vacuum(2, "boson")), (1, vacuum(3, "boson"))])


def test_n_component_examples():
    assert dict(n_component(vacuum(1), 0).entries) == {(): 1}
    s = superpose([(1, occupation_state((2, 0), "boson")), (3, occupation_state((0, 3), "boson"))])
    assert set(n_component(s, 2).entries) == {(0, 0)}
    assert n_component(s, 7).is_zero


def test_inner_product_examples():
    assert inner_product(vacuum(2), vacuum(2)) == 1
    f = occupation_state((1, 1), "fermion")
    assert inner_product(f, f) == pytest.approx(1)


def test_inner_product_conjugate_linear_in_first(rng):
    a = random_state(rng, "boson", 3)
    b = random_state(rng, "boson", 3)
    c = 0.3 - 1.2j
    assert inner_product(a.scaled(c), b) == pytest.approx(np.conj(c) * inner_product(a, b))
    assert inner_product(a, b.scaled(c)) == pytest.approx(c * inner_product(a, b))


def test_inner_product_incompatible():
    with pytest.raises(IncompatibleStates):
        inner_product(vacuum(2, "boson"), vacuum(2, "dist"))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(STATS),
       st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False))
def test_grading_is_linear(seed, stats, c1, c2):
    rng = np.random.default_rng(seed)
    a, b = random_state(rng, stats, 3), random_state(rng, stats, 3)
    s = superpose([(c1, a), (c2, b)])
    for n in range(3):
        lhs = n_component(s, n).to_dense()
        rhs = c1 * n_component(a, n).to_dense() + c2 * n_component(b, n).to_dense()
        assert np.allclose(lhs, rhs, atol=1e-12)


# -- equal_up_to_phase -------------------------------------------------------------

def test_equal_up_to_phase_examples():
    a = occupation_state((0, 1), "boson")
    assert equal_up_to_phase(a, a.scaled(cmath.exp(1j * math.pi / 3)))
    assert not equal_up_to_phase(a, occupation_state((1, 0), "boson"))
    psi = superpose([(1, occupation_state((2, 0), "boson")), (3, occupation_state((0, 3), "boson"))])
    assert equal_up_to_phase(psi, psi.scaled(1 / math.sqrt(10)))


def test_equal_up_to_phase_zero_state():
    with pytest.raises(ZeroState):
        equal_up_to_phase(zero_state(2, "boson"), vacuum(2, "boson"))


# -- FockState invariants -------------------------------------------------------------

def test_boson_state_rejects_nonsymmetric_tensor():
    t = NTensor(2, 2, Symmetry.NONE, {(0, 1): 1})
    with pytest.raises(SymmetryViolation):
        FockState(2, Statistics.BOSON, {2: t})


def test_fermion_state_rejects_overfull_component():
    with pytest.raises(PauliViolation):
        FockState(2, Statistics.FERMION, {3: NTensor(3, 2, Symmetry.NONE, {(0, 1, 0): 1})})


def test_fockstate_component_key_must_match():
    with pytest.raises(IncompatibleStates):
        FockState(2, Statistics.BOSON, {1: NTensor.scalar(1, 2)})


def test_fockstate_truncation_bound():
    t = occupation_tensor((3, 0), "boson")
    with pytest.raises(TruncationExceeded):
        FockState(2, Statistics.BOSON, {3: t}, nmax=2)


def test_embed_pads_modes():
    s = embed(occupation_state((1, 1), "fermion"), 4)
    assert s.dim == 4
    assert occupation_amplitudes(s) == pytest.approx({(1, 1, 0, 0): 1})


# -- occupation view ---------------------------------------------------------------

@pytest.mark.parametrize("stats", STATS)
def test_occupation_roundtrip(stats, rng):
    fermion = Statistics.parse(stats) is Statistics.FERMION
    occs = _occupations(3, 3, fermion)
    amps = {o: complex(*rng.standard_normal(2)) for o in occs}
    s = from_occupations(amps, stats)
    back = occupation_amplitudes(s)
    assert set(back) == set(amps)
    for o in amps:
        assert back[o] == pytest.approx(amps[o], abs=1e-12)
    assert s.norm() ** 2 == pytest.approx(sum(abs(a) ** 2 for a in amps.values()))


def test_occupation_view_needs_mode_order():
    t = NTensor(2, 2, Symmetry.NONE, {(1, 0): 1})
    with pytest.raises(NotModeOrdered):
        occupation_amplitudes(FockState(2, Statistics.DISTINGUISHABLE, {2: t}))


def test_field_product_concatenates_modes():
    a = occupation_state((1,), "boson")
    b = occupation_state((2,), "boson")
    s = field_product(a, b)
    assert equal_up_to_phase(s, occupation_state((1, 2), "boson"))


def test_field_product_fermion_bell_pair():
    bell = normalized(from_occupations({(0, 1): 1, (1, 0): 1}, "fermion"))
    s = field_product(bell, bell)
    amps = occupation_amplitudes(s)
    assert set(amps) == {(0, 1, 0, 1), (0, 1, 1, 0), (1, 0, 0, 1), (1, 0, 1, 0)}
