"""Fock-space state containers and the occupation-number view.

A state is stored first-quantized: a graded map ``n -> NTensor`` whose
``n``-th entry is the ``n``-particle component living in the ``n``-fold
tensor power of a ``dim``-mode single-particle space.  The occupation view
(``|n_0, n_1, ...>``) is derived from it.

Scale convention: occupation basis states have unit norm in the full tensor
inner product, so the change of view between occupations and tensors is an
isometry.  Bosonic ``|n_0, n_1, ...>`` stores every distinct arrangement of
the multiset ``0^{n_0} 1^{n_1} ...`` with amplitude ``1/sqrt(N!/prod n_j!)``;
fermionic ones store ``sign(pi)/sqrt(N!)``; distinguishable ones store the
single ordered key ``(0,..,0,1,..,1,..)`` with amplitude 1.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    IncompatibleStates,
    InvalidDimension,
    NotModeOrdered,
    PauliViolation,
    SymmetryViolation,
    TruncationExceeded,
    ZeroState,
)

PRUNE_TOL = 1e-14
"""Amplitudes with modulus below this are dropped after arithmetic."""

SYMMETRY_TOL = 1e-12
"""Relative tolerance of the (anti)symmetry check on stored tensors."""

DEFAULT_NMAX = 8
"""Default truncation of infinite series such as ``sum_n lambda^n |n,n>``."""

MAX_PARTICLES = 32
"""Default particle-number bound carried by a :class:`FockState`."""


class Symmetry(Enum):
    NONE = "none"
    SYMMETRIC = "symmetric"
    ANTISYMMETRIC = "antisymmetric"


class Statistics(Enum):
    DISTINGUISHABLE = "distinguishable"
    BOSON = "boson"
    FERMION = "fermion"

    @property
    def symmetry(self) -> Symmetry:
        return _STAT_SYMMETRY[self]

    @classmethod
    def parse(cls, text: "str | Statistics") -> "Statistics":
        if isinstance(text, Statistics):
            return text
        key = str(text).strip().lower()
        aliases = {"dist": "distinguishable", "bosons": "boson", "fermions": "fermion"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown statistics {text!r}") from None


_STAT_SYMMETRY = {
    Statistics.DISTINGUISHABLE: Symmetry.NONE,
    Statistics.BOSON: Symmetry.SYMMETRIC,
    Statistics.FERMION: Symmetry.ANTISYMMETRIC,
}


# -- small combinatorial helpers ---------------------------------------------

def permutation_sign(seq: Sequence[int]) -> int:
    """Parity of the permutation that sorts ``seq`` (entries assumed distinct)."""
    inversions = sum(
        1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j]
    )
    return -1 if inversions % 2 else 1


def distinct_permutations(seq: Iterable[int]) -> Iterator[tuple]:
    """Yield every distinct ordering of a multiset, in lexicographic order."""
    items = sorted(seq)
    n = len(items)
    while True:
        yield tuple(items)
        i = n - 2
        while i >= 0 and items[i] >= items[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while items[j] <= items[i]:
            j -= 1
        items[i], items[j] = items[j], items[i]
        items[i + 1:] = reversed(items[i + 1:])


def multinomial(counts: Iterable[int]) -> int:
    counts = list(counts)
    out = math.factorial(sum(counts))
    for c in counts:
        out //= math.factorial(c)
    return out


def counts_of(key: Sequence[int], dim: int) -> tuple:
    occ = [0] * dim
    for j in key:
        occ[j] += 1
    return tuple(occ)


def ordered_key(occ: Sequence[int]) -> tuple:
    return tuple(j for j, c in enumerate(occ) for _ in range(c))


# -- single-particle vectors ---------------------------------------------------

@dataclass(frozen=True, eq=False)
class SinglePartVec:
    """Amplitudes of a one-particle vector in the computational basis.

    No normalization is ever applied implicitly.
    """

    amps: np.ndarray

    def __post_init__(self):
        arr = np.array(self.amps, dtype=complex).reshape(-1)
        if arr.size == 0:
            raise InvalidDimension("a single-particle vector needs at least one mode")
        arr.setflags(write=False)
        object.__setattr__(self, "amps", arr)

    @property
    def dim(self) -> int:
        return int(self.amps.size)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def padded(self, dim: int) -> "SinglePartVec":
        if dim < self.dim:
            raise InvalidDimension(f"cannot shrink a {self.dim}-mode vector to {dim} modes")
        return SinglePartVec(np.concatenate([self.amps, np.zeros(dim - self.dim)]))

    def as_tensor(self, symmetry: Symmetry = Symmetry.NONE) -> "NTensor":
        return NTensor.from_dense(self.amps, symmetry)

    def __repr__(self):
        return f"SinglePartVec({np.array2string(self.amps, precision=4)})"


def single_part(amps: Sequence[complex]) -> SinglePartVec:
    """Build a single-particle vector from raw amplitudes."""
    return SinglePartVec(np.asarray(amps, dtype=complex))


def basis_vector(j: int, dim: int) -> SinglePartVec:
    if not 0 <= j < dim:
        raise InvalidDimension(f"mode {j} outside 0..{dim - 1}")
    amps = np.zeros(dim, dtype=complex)
    amps[j] = 1.0
    return SinglePartVec(amps)


# -- n-particle tensors ----------------------------------------------------------

def _check_symmetry(entries: Mapping, symmetry: Symmetry) -> None:
    if symmetry is Symmetry.NONE or not entries:
        return
    scale = max(abs(v) for v in entries.values())
    tol = SYMMETRY_TOL * scale
    groups: dict = defaultdict(dict)
    for key, amp in entries.items():
        groups[tuple(sorted(key))][key] = amp
    for base, members in groups.items():
        if symmetry is Symmetry.SYMMETRIC:
            count = multinomial(counts_of(base, max(base) + 1)) if base else 1
            ref = members.get(base, 0.0)
            bad = any(abs(a - ref) > tol for a in members.values())
        else:
            if len(set(base)) < len(base):
                if any(abs(a) > tol for a in members.values()):
                    raise SymmetryViolation(f"antisymmetric tensor has nonzero repeated key {base}")
                continue
            count = math.factorial(len(base))
            ref = members.get(base, 0.0)
            bad = any(abs(a - permutation_sign(k) * ref) > tol for k, a in members.items())
        if bad or (len(members) < count and abs(ref) > tol):
            raise SymmetryViolation(
                f"entries over index multiset {base} are not {symmetry.value}"
            )


def _orbit_average(entries: dict, symmetry: Symmetry) -> dict:
    """Replace each permutation orbit by its (signed) average."""
    if symmetry is Symmetry.NONE:
        return entries
    signed = symmetry is Symmetry.ANTISYMMETRIC
    sums: dict = defaultdict(complex)
    for key, amp in entries.items():
        base = tuple(sorted(key))
        sums[base] += (permutation_sign(key) if signed else 1) * amp
    out = {}
    for base, total in sums.items():
        if signed and len(set(base)) < len(base):
            continue
        perms = list(distinct_permutations(base))
        mean = total / len(perms)
        for key in perms:
            out[key] = (permutation_sign(key) if signed else 1) * mean
    return out


@dataclass(frozen=True, eq=False)
class NTensor:
    """Sparse ``n``-index complex tensor over ``dim`` modes.

    ``entries`` maps index tuples to amplitudes; missing keys are zero.
    (Anti)symmetric tensors store every index permutation explicitly.
    """

    n: int
    dim: int
    symmetry: Symmetry = Symmetry.NONE
    entries: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 0:
            raise InvalidDimension("particle number must be nonnegative")
        if self.dim < 1:
            raise InvalidDimension("dimension must be positive")
        clean = {}
        for key, amp in dict(self.entries).items():
            key = tuple(int(k) for k in key)
            if len(key) != self.n or any(not 0 <= k < self.dim for k in key):
                raise InvalidDimension(f"key {key} invalid for n={self.n}, dim={self.dim}")
            amp = complex(amp)
            if abs(amp) >= PRUNE_TOL:
                clean[key] = amp
        _check_symmetry(clean, self.symmetry)
        object.__setattr__(self, "entries", MappingProxyType(clean))

    # constructors
    @classmethod
    def zeros(cls, n: int, dim: int, symmetry: Symmetry = Symmetry.NONE) -> "NTensor":
        return cls(n, dim, symmetry, {})

    @classmethod
    def scalar(cls, value: complex, dim: int) -> "NTensor":
        return cls(0, dim, Symmetry.NONE, {(): value})

    @classmethod
    def from_dense(cls, array, symmetry: Symmetry = Symmetry.NONE) -> "NTensor":
        arr = np.asarray(array, dtype=complex)
        if arr.ndim == 0:
            raise InvalidDimension("use NTensor.scalar for zero-particle tensors")
        dim = arr.shape[0]
        if any(s != dim for s in arr.shape):
            raise InvalidDimension(f"tensor shape {arr.shape} is not cubic")
        idx = np.argwhere(np.abs(arr) >= PRUNE_TOL)
        entries = {tuple(int(i) for i in k): arr[tuple(k)] for k in idx}
        return cls(arr.ndim, dim, symmetry, entries)

    # views
    def to_dense(self) -> np.ndarray:
        arr = np.zeros((self.dim,) * self.n, dtype=complex)
        for key, amp in self.entries.items():
            arr[key] = amp
        return arr

    def __getitem__(self, key) -> complex:
        return self.entries.get(tuple(key), 0j)

    @property
    def is_zero(self) -> bool:
        return not self.entries

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.entries.values()))

    def inner(self, other: "NTensor") -> complex:
        """``<self|other>``, conjugate-linear in ``self``."""
        self._check_compatible(other)
        small, big = (self, other) if len(self.entries) <= len(other.entries) else (other, self)
        total = 0j
        for key in small.entries:
            if key in big.entries:
                total += self.entries[key].conjugate() * other.entries[key]
        return total

    # arithmetic
    def _check_compatible(self, other: "NTensor") -> None:
        if self.n != other.n or self.dim != other.dim:
            raise IncompatibleStates(
                f"tensors of shape (n={self.n}, dim={self.dim}) and "
                f"(n={other.n}, dim={other.dim})"
            )

    def scaled(self, c: complex) -> "NTensor":
        return NTensor(self.n, self.dim, self.symmetry,
                       {k: c * a for k, a in self.entries.items()})

    def __mul__(self, c):
        return self.scaled(c)

    __rmul__ = __mul__

    def __neg__(self):
        return self.scaled(-1)

    def __add__(self, other: "NTensor") -> "NTensor":
        self._check_compatible(other)
        out = dict(self.entries)
        for k, a in other.entries.items():
            out[k] = out.get(k, 0j) + a
        symmetry = self.symmetry if self.symmetry is other.symmetry else Symmetry.NONE
        # Cancellation can leave roundoff that is large relative to the sum;
        # both operands are exact members of the tagged subspace, so project.
        return NTensor(self.n, self.dim, symmetry, _orbit_average(out, symmetry))

    def __sub__(self, other: "NTensor") -> "NTensor":
        return self + (-other)

    def retagged(self, symmetry: Symmetry) -> "NTensor":
        """Same entries under another symmetry tag (validated)."""
        return NTensor(self.n, self.dim, symmetry, self.entries)

    def permuted(self, perm: Sequence[int]) -> "NTensor":
        """Tensor ``S`` with ``S[i_0..i_{n-1}] = T[i_perm[0]..i_perm[n-1]]``."""
        inv = np.argsort(perm)
        out = {tuple(key[p] for p in inv): a for key, a in self.entries.items()}
        return NTensor(self.n, self.dim, self.symmetry, out)

    def padded(self, dim: int) -> "NTensor":
        if dim < self.dim:
            raise InvalidDimension(f"cannot shrink a {self.dim}-mode tensor to {dim} modes")
        return NTensor(self.n, dim, self.symmetry, self.entries)

    def allclose(self, other: "NTensor", atol: float = 1e-12) -> bool:
        self._check_compatible(other)
        keys = set(self.entries) | set(other.entries)
        return all(abs(self[k] - other[k]) <= atol for k in keys)

    def __repr__(self):
        return (f"NTensor(n={self.n}, dim={self.dim}, symmetry={self.symmetry.value}, "
                f"nnz={len(self.entries)})")


# -- Fock states ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FockState:
    """Graded Fock vector ``(psi^(0), psi^(1), psi^(2), ...)``.

    Zero components are not stored.  ``nmax`` bounds the particle number that
    ladder operations may reach.
    """

    dim: int
    statistics: Statistics
    components: Mapping = field(default_factory=dict)
    nmax: int | None = None

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidDimension("dimension must be positive")
        stats = Statistics.parse(self.statistics)
        object.__setattr__(self, "statistics", stats)
        clean = {}
        for n, tensor in dict(self.components).items():
            if not isinstance(tensor, NTensor):
                raise TypeError(f"component {n} is not an NTensor")
            if tensor.n != n or tensor.dim != self.dim:
                raise IncompatibleStates(
                    f"component stored at n={n} has n={tensor.n}, dim={tensor.dim}; "
                    f"state dim is {self.dim}"
                )
            if tensor.is_zero:
                continue
            if stats is Statistics.FERMION and n > self.dim:
                raise PauliViolation(f"{n} fermions cannot occupy {self.dim} modes")
            want = stats.symmetry
            if tensor.symmetry is not want:
                if n >= 2 and Symmetry.NONE not in (want, tensor.symmetry):
                    raise SymmetryViolation(
                        f"{tensor.symmetry.value} component in a {stats.value} state")
                tensor = tensor.retagged(want)
            clean[n] = tensor
        top = max(clean, default=0)
        nmax = max(MAX_PARTICLES, top) if self.nmax is None else int(self.nmax)
        if top > nmax:
            raise TruncationExceeded(f"component n={top} exceeds nmax={nmax}")
        object.__setattr__(self, "components", MappingProxyType(dict(sorted(clean.items()))))
        object.__setattr__(self, "nmax", nmax)

    @property
    def particle_numbers(self) -> list:
        return list(self.components)

    @property
    def is_zero(self) -> bool:
        return not self.components

    def component(self, n: int) -> NTensor:
        return n_component(self, n)

    def norm(self) -> float:
        return math.sqrt(sum(t.norm() ** 2 for t in self.components.values()))

    def scaled(self, c: complex) -> "FockState":
        return FockState(self.dim, self.statistics,
                         {n: t.scaled(c) for n, t in self.components.items()}, self.nmax)

    def __mul__(self, c):
        return self.scaled(c)

    __rmul__ = __mul__

    def __add__(self, other: "FockState") -> "FockState":
        return superpose([(1, self), (1, other)])

    def __sub__(self, other: "FockState") -> "FockState":
        return superpose([(1, self), (-1, other)])

    def __repr__(self):
        parts = ", ".join(f"{n}: nnz={len(t.entries)}" for n, t in self.components.items())
        return f"FockState(dim={self.dim}, {self.statistics.value}, {{{parts}}})"


def _check_same_space(a: FockState, b: FockState) -> None:
    if a.dim != b.dim or a.statistics is not b.statistics:
        raise IncompatibleStates(
            f"({a.dim} modes, {a.statistics.value}) vs ({b.dim} modes, {b.statistics.value})"
        )


def vacuum(dim: int, statistics: "Statistics | str" = Statistics.DISTINGUISHABLE) -> FockState:
    return FockState(dim, Statistics.parse(statistics), {0: NTensor.scalar(1.0, dim)})


def zero_state(dim: int, statistics: "Statistics | str") -> FockState:
    return FockState(dim, Statistics.parse(statistics), {})


def state_from_tensor(tensor: NTensor, statistics: "Statistics | str") -> FockState:
    """Fock state whose only nonzero component is ``tensor``."""
    return FockState(tensor.dim, Statistics.parse(statistics), {tensor.n: tensor})


def occupation_tensor(occ: Sequence[int], statistics: "Statistics | str") -> NTensor:
    """Unit-norm first-quantized component of the occupation state ``occ``."""
    stats = Statistics.parse(statistics)
    occ = tuple(int(c) for c in occ)
    dim = len(occ)
    if dim == 0:
        raise InvalidDimension("an occupation needs at least one mode")
    if any(c < 0 for c in occ):
        raise InvalidDimension(f"negative occupation in {occ}")
    if stats is Statistics.FERMION and any(c > 1 for c in occ):
        raise PauliViolation(f"fermionic occupation {occ} puts two particles in one mode")
    key = ordered_key(occ)
    n = len(key)
    if stats is Statistics.DISTINGUISHABLE or n <= 1:
        return NTensor(n, dim, stats.symmetry, {key: 1.0})
    if stats is Statistics.BOSON:
        amp = 1.0 / math.sqrt(multinomial(occ))
        return NTensor(n, dim, Symmetry.SYMMETRIC,
                       {k: amp for k in distinct_permutations(key)})
    amp = 1.0 / math.sqrt(math.factorial(n))
    return NTensor(n, dim, Symmetry.ANTISYMMETRIC,
                   {k: permutation_sign(k) * amp for k in itertools.permutations(key)})


def occupation_state(occ: Sequence[int], statistics: "Statistics | str") -> FockState:
    """The normalized occupation-number basis state ``|n_0, n_1, ...>``."""
    tensor = occupation_tensor(occ, statistics)
    return state_from_tensor(tensor, statistics)


def superpose(terms: Sequence) -> FockState:
    """Linear combination ``sum_k c_k |Psi_k>`` of ``(c_k, Psi_k)`` pairs."""
    terms = list(terms)
    if not terms:
        raise IncompatibleStates("nothing to superpose")
    first = terms[0][1]
    acc: dict = {}
    nmax = first.nmax
    for c, state in terms:
        _check_same_space(first, state)
        nmax = max(nmax, state.nmax)
        if c == 0:
            continue
        for n, t in state.components.items():
            t = t.scaled(c)
            acc[n] = acc[n] + t if n in acc else t
    return FockState(first.dim, first.statistics, acc, nmax)


def n_component(state: FockState, n: int) -> NTensor:
    """The ``n``-particle component, or the zero tensor when absent."""
    if n < 0:
        raise InvalidDimension("particle number must be nonnegative")
    if n in state.components:
        return state.components[n]
    return NTensor.zeros(n, state.dim, state.statistics.symmetry)


def inner_product(a: FockState, b: FockState) -> complex:
    _check_same_space(a, b)
    return sum((a.components[n].inner(b.components[n])
                for n in a.components if n in b.components), 0j)


def normalized(state: FockState) -> FockState:
    norm = state.norm()
    if norm == 0:
        raise ZeroState("cannot normalize the zero state")
    return state.scaled(1.0 / norm)


def equal_up_to_phase(a: FockState, b: FockState, tol: float = 1e-10) -> bool:
    """True iff ``|<a|b>| >= (1 - tol) * |a| * |b|``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    na, nb = a.norm(), b.norm()
    if na == 0 or nb == 0:
        raise ZeroState("phase comparison needs nonzero states")
    return abs(inner_product(a, b)) >= (1 - tol) * na * nb


def embed(state: FockState, dim: int) -> FockState:
    """Same state viewed in a larger mode space (extra modes empty)."""
    if dim == state.dim:
        return state
    return FockState(dim, state.statistics,
                     {n: t.padded(dim) for n, t in state.components.items()}, state.nmax)


# -- occupation view -----------------------------------------------------------

def occupation_amplitudes(state: FockState) -> dict:
    """Coefficients ``<n_0, n_1, ...|Psi>`` over the occupation basis.

    Raises NotModeOrdered for distinguishable tensors with weight outside the
    canonically ordered subspace ``|0>^{n_0} (x) |1>^{n_1} (x) ...``.
    """
    stats = state.statistics
    out = {}
    for n, tensor in state.components.items():
        for key, amp in tensor.entries.items():
            if list(key) != sorted(key):
                if stats is Statistics.DISTINGUISHABLE:
                    raise NotModeOrdered(
                        f"entry {key} of the {n}-particle component is not mode ordered")
                continue
            occ = counts_of(key, state.dim)
            if stats is Statistics.BOSON:
                amp = amp * math.sqrt(multinomial(occ))
            elif stats is Statistics.FERMION:
                amp = amp * math.sqrt(math.factorial(n))
            out[occ] = amp
    return out


def from_occupations(amplitudes: Mapping, statistics: "Statistics | str",
                     dim: int | None = None) -> FockState:
    """Inverse of :func:`occupation_amplitudes`."""
    stats = Statistics.parse(statistics)
    if dim is None:
        dims = {len(o) for o in amplitudes}
        if len(dims) != 1:
            raise IncompatibleStates(f"occupations of mixed lengths {sorted(dims)}")
        dim = dims.pop()
    comps: dict = {}
    for occ, amp in amplitudes.items():
        occ = tuple(occ) + (0,) * (dim - len(occ))
        if amp == 0:
            continue
        t = occupation_tensor(occ, stats).scaled(amp)
        comps[t.n] = comps[t.n] + t if t.n in comps else t
    return FockState(dim, stats, comps)


def field_product(*states: FockState) -> FockState:
    """Mode-wise tensor product of Fock states: modes are concatenated and
    occupation amplitudes multiply."""
    if not states:
        raise IncompatibleStates("empty field product")
    stats = states[0].statistics
    amps = {(): 1.0 + 0j}
    for s in states:
        if s.statistics is not stats:
            raise IncompatibleStates("field product of states with different statistics")
        occ = occupation_amplitudes(s)
        amps = {a + b: x * y for a, x in amps.items() for b, y in occ.items()}
    dim = sum(s.dim for s in states)
    return from_occupations(amps, stats, dim)
