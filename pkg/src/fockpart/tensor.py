"""Tensor products, (anti)symmetrization and matrix flattenings.

Products follow the permutation-sum convention without ``1/n!`` averaging::

    a v b = a (x) b + b (x) a        a ^ b = a (x) b - b (x) a

and the n-ary products are the full permutation sums over all factors, so
``(a v b) v c == a v (b v c)`` is the six-term sum.  Slots are numbered
from 0.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .core import NTensor, SinglePartVec, Symmetry, permutation_sign
from .errors import IncompatibleStates, InvalidCut, SymmetryViolation


def _as_tensor(x) -> NTensor:
    if isinstance(x, SinglePartVec):
        return x.as_tensor()
    if isinstance(x, NTensor):
        return x
    raise TypeError(f"expected NTensor or SinglePartVec, got {type(x).__name__}")


def _check_dims(a: NTensor, b: NTensor) -> None:
    if a.dim != b.dim:
        raise IncompatibleStates(f"dimension mismatch: {a.dim} vs {b.dim}")


def otimes(a, b) -> NTensor:
    """Plain tensor product, ``T[i + j] = A[i] * B[j]``."""
    a, b = _as_tensor(a), _as_tensor(b)
    _check_dims(a, b)
    entries = {ka + kb: x * y for ka, x in a.entries.items() for kb, y in b.entries.items()}
    return NTensor(a.n + b.n, a.dim, Symmetry.NONE, entries)


def _shuffle_product(a: NTensor, b: NTensor, sign: bool) -> NTensor:
    # For (anti)symmetric inputs the full permutation sum of a (x) b equals
    # n_a! n_b! times the sum over shuffles; dividing that out keeps the
    # n-ary product equal to the permutation sum over individual factors.
    n = a.n + b.n
    out: dict = {}
    for pos in itertools.combinations(range(n), a.n):
        rest = [p for p in range(n) if p not in pos]
        order = list(pos) + rest
        s = permutation_sign(order) if sign else 1
        for ka, x in a.entries.items():
            for kb, y in b.entries.items():
                key = [0] * n
                for p, v in zip(pos, ka):
                    key[p] = v
                for p, v in zip(rest, kb):
                    key[p] = v
                key = tuple(key)
                out[key] = out.get(key, 0j) + s * x * y
    symmetry = Symmetry.ANTISYMMETRIC if sign else Symmetry.SYMMETRIC
    return NTensor(n, a.dim, symmetry, out)


def _require(t: NTensor, symmetry: Symmetry, op: str) -> None:
    if t.n >= 2 and t.symmetry is not symmetry:
        raise SymmetryViolation(f"{op} needs {symmetry.value} inputs, got {t.symmetry.value}")


def vee(a, b) -> NTensor:
    """Symmetric tensor product."""
    a, b = _as_tensor(a), _as_tensor(b)
    _check_dims(a, b)
    _require(a, Symmetry.SYMMETRIC, "vee")
    _require(b, Symmetry.SYMMETRIC, "vee")
    return _shuffle_product(a, b, sign=False)


def wedge(a, b) -> NTensor:
    """Antisymmetric tensor product."""
    a, b = _as_tensor(a), _as_tensor(b)
    _check_dims(a, b)
    _require(a, Symmetry.ANTISYMMETRIC, "wedge")
    _require(b, Symmetry.ANTISYMMETRIC, "wedge")
    return _shuffle_product(a, b, sign=True)


def otimes_all(factors: Iterable) -> NTensor:
    return reduce(otimes, [_as_tensor(f) for f in factors])


def vee_all(factors: Iterable) -> NTensor:
    return reduce(vee, [_as_tensor(f) for f in factors])


def wedge_all(factors: Iterable) -> NTensor:
    return reduce(wedge, [_as_tensor(f) for f in factors])


def _permutation_sum(t: NTensor, signed: bool) -> NTensor:
    out: dict = {}
    for perm in itertools.permutations(range(t.n)):
        s = permutation_sign(perm) if signed else 1
        for key, amp in t.entries.items():
            k = tuple(key[p] for p in perm)
            out[k] = out.get(k, 0j) + s * amp
    symmetry = Symmetry.ANTISYMMETRIC if signed else Symmetry.SYMMETRIC
    return NTensor(t.n, t.dim, symmetry, out)


def symmetrize(t: NTensor) -> NTensor:
    """``sum_pi T o pi`` over all slot permutations (no ``1/n!``)."""
    return _permutation_sum(_as_tensor(t), signed=False)


def antisymmetrize(t: NTensor) -> NTensor:
    """``sum_pi sign(pi) T o pi`` over all slot permutations (no ``1/n!``)."""
    return _permutation_sum(_as_tensor(t), signed=True)


@dataclass(frozen=True, eq=False)
class Flattening:
    """Matrix view of a tensor: ``rows`` slots index rows, the rest columns.

    Both row and column multi-indices are row-major in ascending slot order.
    """

    rows: tuple
    n: int
    dim: int
    matrix: np.ndarray

    @property
    def cols(self) -> tuple:
        return tuple(s for s in range(self.n) if s not in self.rows)


def flatten(t: NTensor, rows: Sequence[int]) -> Flattening:
    t = _as_tensor(t)
    rows = tuple(sorted(set(int(r) for r in rows)))
    if not rows or len(rows) >= t.n or any(not 0 <= r < t.n for r in rows):
        raise InvalidCut(f"rows {rows} is not a nonempty proper subset of {t.n} slots")
    cols = tuple(s for s in range(t.n) if s not in rows)
    dense = t.to_dense().transpose(rows + cols)
    matrix = dense.reshape(t.dim ** len(rows), t.dim ** len(cols))
    return Flattening(rows, t.n, t.dim, matrix)


def unflatten(f: Flattening, symmetry: Symmetry = Symmetry.NONE) -> NTensor:
    order = f.rows + f.cols
    dense = f.matrix.reshape((f.dim,) * f.n).transpose(np.argsort(order))
    return NTensor.from_dense(dense, symmetry)


def single_slot_flattenings(t: NTensor) -> list:
    """Matrices of every ``slot | rest`` cut of an ``n >= 2`` tensor."""
    t = _as_tensor(t)
    dense = t.to_dense()
    mats = []
    for s in range(t.n):
        moved = np.moveaxis(dense, s, 0)
        mats.append(moved.reshape(t.dim, t.dim ** (t.n - 1)))
    return mats


def factor_power(phi, n: int, symmetry: Symmetry = Symmetry.NONE) -> NTensor:
    """``phi^{(x) n}``, ``phi^{v n}`` or ``phi^{^ n}`` (``n = 0`` gives 1)."""
    phi = _as_tensor(phi)
    if n == 0:
        return NTensor.scalar(1.0, phi.dim)
    if symmetry is Symmetry.ANTISYMMETRIC and n >= 2:
        return NTensor.zeros(n, phi.dim, Symmetry.ANTISYMMETRIC)
    dense = reduce(np.multiply.outer, [phi.to_dense()] * n)
    scale = math.factorial(n) if symmetry is Symmetry.SYMMETRIC else 1
    return NTensor.from_dense(scale * dense, symmetry)
