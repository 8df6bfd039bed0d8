"""Creation and annihilation operators on Fock vectors.

``create(phi)`` maps the ``n``-particle component ``psi`` to ``P(phi (x) psi)``
where ``P`` is the identity for distinguishable particles and the averaging
(anti)symmetrizer otherwise; no ``sqrt(n+1)`` factor is applied.  For an
(anti)symmetric ``psi``, ``P(phi (x) psi)`` is the (signed) insertion sum of
``phi`` over the ``n+1`` slots divided by ``n+1``.  Along a single mode
``create`` therefore maps ``phi^{(x)n}`` to ``phi^{(x)(n+1)}`` without any
rescaling.

``annihilate(phi)`` contracts ``<phi|`` into slot 0, which is the adjoint of
``create(phi)`` on every statistics' state space.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .core import (
    FockState,
    NTensor,
    SinglePartVec,
    Statistics,
    basis_vector,
    normalized,
    occupation_tensor,
    vacuum,
)
from .errors import IncompatibleStates, InvalidDimension, PauliViolation, TruncationExceeded
from .tensor import factor_power


def _check_vec(phi: SinglePartVec, state: FockState) -> np.ndarray:
    if phi.dim != state.dim:
        raise IncompatibleStates(f"{phi.dim}-mode vector on a {state.dim}-mode state")
    return phi.amps


def _insert(phi: np.ndarray, t: NTensor, signed: bool) -> dict:
    out: dict = {}
    m = t.n + 1
    nz = [(j, c) for j, c in enumerate(phi) if c != 0]
    for key, amp in t.entries.items():
        for k in range(m):
            s = -1 if signed and k % 2 else 1
            for j, c in nz:
                new = key[:k] + (j,) + key[k:]
                out[new] = out.get(new, 0j) + s * c * amp / m
    return out


def create(phi: SinglePartVec, state: FockState) -> FockState:
    """Add one particle in ``phi`` to every component of ``state``."""
    amps = _check_vec(phi, state)
    stats = state.statistics
    if state.components and max(state.components) + 1 > state.nmax:
        raise TruncationExceeded(
            f"creating a particle would exceed the truncation nmax={state.nmax}")
    comps = {}
    for n, t in state.components.items():
        if stats is Statistics.DISTINGUISHABLE:
            entries = {(j,) + key: c * amp
                       for key, amp in t.entries.items()
                       for j, c in enumerate(amps) if c != 0}
        else:
            entries = _insert(amps, t, signed=stats is Statistics.FERMION)
        comps[n + 1] = NTensor(n + 1, state.dim, stats.symmetry, entries)
    return FockState(state.dim, stats, comps, state.nmax)


def annihilate(phi: SinglePartVec, state: FockState) -> FockState:
    """Contract ``<phi|`` into the first slot of every component."""
    amps = np.conj(_check_vec(phi, state))
    comps = {}
    for n, t in state.components.items():
        if n == 0:
            continue
        out: dict = {}
        for key, amp in t.entries.items():
            c = amps[key[0]]
            if c != 0:
                out[key[1:]] = out.get(key[1:], 0j) + c * amp
        comps[n - 1] = NTensor(n - 1, state.dim, state.statistics.symmetry, out)
    return FockState(state.dim, state.statistics, comps, state.nmax)


def mode_monomial(occ: Sequence[int], statistics) -> FockState:
    """``a_0^{+n_0} a_1^{+n_1} ... |vac>`` built by iterated :func:`create`,
    normalized to unit norm.  Agrees with ``occupation_state(occ)``."""
    stats = Statistics.parse(statistics)
    occ = [int(c) for c in occ]
    if not occ:
        raise InvalidDimension("an occupation needs at least one mode")
    if stats is Statistics.FERMION and any(c > 1 for c in occ):
        raise PauliViolation(f"fermionic occupation {tuple(occ)} puts two particles in one mode")
    dim = len(occ)
    state = vacuum(dim, stats)
    for j in reversed(range(dim)):
        for _ in range(occ[j]):
            state = create(basis_vector(j, dim), state)
    return normalized(state)


def mode_series(phi: SinglePartVec, coeffs: Sequence[complex], statistics,
                nmax: int | None = None) -> FockState:
    """Truncated ``sum_n coeffs[n] (a_phi^+)^n |vac>``.

    The ``n``-particle component is ``coeffs[n] * phi^{(x)n}``, which is
    already symmetric; for fermions only ``n <= 1`` is allowed.
    """
    stats = Statistics.parse(statistics)
    coeffs = list(coeffs)
    if nmax is None:
        nmax = len(coeffs) - 1
    if nmax < 0:
        raise InvalidDimension("nmax must be nonnegative")
    if not np.any(phi.amps):
        raise InvalidDimension("mode vector must be nonzero")
    if stats is Statistics.FERMION and nmax > 1:
        raise PauliViolation("a fermionic mode holds at most one excitation")
    coeffs = (coeffs + [0] * (nmax + 1))[: nmax + 1]
    comps = {}
    for n, c in enumerate(coeffs):
        if c == 0:
            continue
        comps[n] = factor_power(phi, n).retagged(stats.symmetry).scaled(c)
    return FockState(phi.dim, stats, comps)


def number_state(n: int, statistics, mode: int = 0, dim: int = 1) -> FockState:
    """``n`` excitations of basis mode ``mode`` (unit norm)."""
    occ = [0] * dim
    occ[mode] = n
    tensor = occupation_tensor(occ, statistics)
    return FockState(dim, Statistics.parse(statistics), {tensor.n: tensor})
