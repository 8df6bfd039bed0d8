"""Named example states with their expected classification.

Infinite sums are truncated at ``nmax`` with amplitudes exactly ``lam**n``
before normalization.  ``phi_product`` truncates each single-mode factor
``|Phi> = sum_{n <= nmax} lam^n |n>`` separately, so the truncated state is
still an exact field product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .classify import Status
from .core import (
    FockState,
    NTensor,
    Statistics,
    Symmetry,
    basis_vector,
    field_product,
    from_occupations,
    normalized,
    state_from_tensor,
    superpose,
)
from .errors import InvalidParameter, PauliViolation, UnknownGalleryState
from .tensor import wedge, wedge_all

F, E = Status.FACTORIZABLE, Status.ENTANGLED

MAX_TRUNCATION = 16


@dataclass(frozen=True)
class GallerySpec:
    """Name, resolved parameters and the expected status per verdict slot.

    ``expected`` lists only the slots with a definite claim; other slots are
    unconstrained.
    """

    name: str
    params: dict = field(default_factory=dict)
    expected: dict = field(default_factory=dict)
    description: str = ""


# -- parameter parsing -------------------------------------------------------------

def _as_int(value, name: str) -> int:
    try:
        f = float(value)
    except (TypeError, ValueError):
        raise InvalidParameter(f"{name} must be an integer, got {value!r}") from None
    if not f.is_integer():
        raise InvalidParameter(f"{name} must be an integer, got {value!r}")
    return int(f)


def _as_complex(value, name: str) -> complex:
    if isinstance(value, str):
        value = value.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(value)
    except (TypeError, ValueError):
        raise InvalidParameter(f"{name} must be a number, got {value!r}") from None


def _lam(params) -> complex:
    lam = _as_complex(params["lambda"], "lambda")
    if not 0 < abs(lam) < 1:
        raise InvalidParameter(f"lambda must satisfy 0 < |lambda| < 1, got {lam}")
    return lam


def _truncation(params) -> int:
    nmax = _as_int(params["nmax"], "nmax")
    if not 1 <= nmax <= MAX_TRUNCATION:
        raise InvalidParameter(f"nmax must lie in 1..{MAX_TRUNCATION}, got {nmax}")
    return nmax


def _positive(params, name) -> int:
    v = _as_int(params[name], name)
    if v < 1:
        raise InvalidParameter(f"{name} must be at least 1, got {v}")
    return v


def _clean_number(z: complex):
    return z.real if z.imag == 0 else z


# -- constructors ------------------------------------------------------------------

def _fock_basis(p):
    stats = Statistics.parse(p["stats"])
    n0 = _as_int(p["n0"], "n0")
    n1 = _as_int(p["n1"], "n1")
    if n0 < 0 or n1 < 0 or n0 + n1 == 0:
        raise InvalidParameter("occupations must be nonnegative and not both zero")
    try:
        state = from_occupations({(n0, n1): 1.0}, stats)
    except PauliViolation as exc:
        raise InvalidParameter(str(exc)) from None
    expected = {"field": F}
    if stats is Statistics.DISTINGUISHABLE:
        expected["particle_dist"] = F
    elif stats is Statistics.BOSON:
        expected["particle_indist_boson"] = F
        expected["particle_identical_boson"] = F if min(n0, n1) == 0 or n0 + n1 == 1 else E
    else:
        expected["particle_fermion"] = F
    params = {"n0": n0, "n1": n1, "stats": stats.value}
    return state, params, expected


def _tmsv(p):
    lam, nmax = _lam(p), _truncation(p)
    amps = {(n, n): lam ** n for n in range(nmax + 1)}
    state = from_occupations(amps, Statistics.DISTINGUISHABLE)
    params = {"lambda": _clean_number(lam), "nmax": nmax}
    return state, params, {"field": E, "particle_dist": F}


def _single_mode_series(lam, nmax, stats) -> FockState:
    return from_occupations({(n,): lam ** n for n in range(nmax + 1)}, stats)


def _phi_product(p):
    lam, nmax = _lam(p), _truncation(p)
    phi = _single_mode_series(lam, nmax, Statistics.DISTINGUISHABLE)
    state = field_product(phi, phi)
    params = {"lambda": _clean_number(lam), "nmax": nmax}
    return state, params, {"field": F, "particle_dist": E}


def _noon_ghz(p):
    lam, nmax = _lam(p), _truncation(p)
    dist = Statistics.DISTINGUISHABLE
    phi = _single_mode_series(lam, nmax, dist)
    vac = from_occupations({(0,): 1.0}, dist)
    state = superpose([(1, field_product(phi, vac)), (1, field_product(vac, phi))])
    params = {"lambda": _clean_number(lam), "nmax": nmax}
    return state, params, {"field": E, "particle_dist": E}


def _boson_psi_prime(p):
    state = from_occupations({(2, 0): 1.0, (0, 3): 3.0}, Statistics.BOSON)
    return state, {}, {"field": E, "particle_indist_boson": F, "particle_identical_boson": F}


def _boson_psi(p):
    state = from_occupations({(1, 1): 1.0, (0, 3): 3 * math.sqrt(2)}, Statistics.BOSON)
    return state, {}, {"field": E, "particle_indist_boson": F, "particle_identical_boson": E}


def _plus_power(stats, k) -> FockState:
    plus = from_occupations({(0,): 1.0, (1,): 1.0}, stats)
    return field_product(*([plus] * k))


def _boson_plus_cubed(p):
    state = _plus_power(Statistics.BOSON, 3)
    return state, {}, {"field": F, "particle_indist_boson": E, "particle_identical_boson": E}


CHI_MATRIX = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=complex)


def _chi_two_boson(p):
    tensor = NTensor.from_dense(CHI_MATRIX, Symmetry.SYMMETRIC)
    state = state_from_tensor(tensor, Statistics.BOSON)
    return state, {}, {"particle_indist_boson": E, "particle_identical_boson": E}


def _x_state(p):
    state = from_occupations({(1, 1, 0): math.sqrt(2), (0, 0, 2): 1.0}, Statistics.BOSON)
    return state, {}, {"field": E, "particle_indist_boson": E, "particle_identical_boson": E}


def _fermion_ghz_w(p):
    L, M = _positive(p, "L"), _positive(p, "M")
    dim = L * M
    if dim > 12:
        raise InvalidParameter(f"L*M must be at most 12, got {dim}")
    terms = []
    for block in range(L):
        vecs = [basis_vector(block * M + k, dim) for k in range(M)]
        t = wedge_all(vecs) if M > 1 else vecs[0].as_tensor(Symmetry.ANTISYMMETRIC)
        terms.append((1, state_from_tensor(t, Statistics.FERMION)))
    state = superpose(terms)
    expected = {"field": E if L >= 2 else F,
                "particle_fermion": E if L >= 2 and M >= 2 else F}
    return state, {"L": L, "M": M}, expected


def _fermion_bell_product(p):
    a = basis_vector(0, 4).amps + basis_vector(1, 4).amps
    b = basis_vector(2, 4).amps + basis_vector(3, 4).amps
    t = wedge(NTensor.from_dense(a), NTensor.from_dense(b))
    return state_from_tensor(t, Statistics.FERMION), {}, {"field": E, "particle_fermion": F}


def _fermion_plus_fourth(p):
    state = _plus_power(Statistics.FERMION, 4)
    return state, {}, {"field": F, "particle_fermion": E}


@dataclass(frozen=True)
class _Entry:
    build: Callable
    defaults: Mapping
    description: str


CATALOG = {
    "fock_basis": _Entry(_fock_basis, {"n0": 1, "n1": 2, "stats": "distinguishable"},
                         "two-mode Fock basis state |n0, n1>"),
    "tmsv": _Entry(_tmsv, {"lambda": 0.5, "nmax": 8},
                   "sum_n lam^n |n, n> (two-mode squeezed vacuum)"),
    "phi_product": _Entry(_phi_product, {"lambda": 0.5, "nmax": 5},
                          "|Phi> (*) |Phi> with |Phi> = sum_n lam^n |n>"),
    "noon_ghz": _Entry(_noon_ghz, {"lambda": 0.5, "nmax": 5},
                       "|Phi> (*) |0> + |0> (*) |Phi> (NOON / GHZ)"),
    "boson_psi_prime": _Entry(_boson_psi_prime, {}, "(|2,0> + 3|0,3>) / sqrt(10)"),
    "boson_psi": _Entry(_boson_psi, {}, "(|1,1> + 3 sqrt(2) |0,3>) / sqrt(19)"),
    "boson_plus_cubed": _Entry(_boson_plus_cubed, {}, "(|0> + |1>)^(*)3, bosons"),
    "chi_two_boson": _Entry(_chi_two_boson, {}, "|0>|1> + |1>|0> + |2>|2>, bosons"),
    "x_state": _Entry(_x_state, {}, "(sqrt(2)|1,1,0> + |0,0,2>) / sqrt(3)"),
    "fermion_ghz_w": _Entry(_fermion_ghz_w, {"L": 2, "M": 2},
                            "sum of L disjoint M-fermion Slater determinants"),
    "fermion_bell_product": _Entry(_fermion_bell_product, {}, "(|0> + |1>) ^ (|2> + |3>)"),
    "fermion_plus_fourth": _Entry(_fermion_plus_fourth, {}, "(|0> + |1>)^(*)4, fermions"),
}

# Instances classified by ``--gallery all``, in output order.
ALL_PRESETS = (
    ("fock_basis", {"n0": 1, "n1": 2, "stats": "distinguishable"}),
    ("fock_basis", {"n0": 2, "n1": 0, "stats": "boson"}),
    ("fock_basis", {"n0": 1, "n1": 1, "stats": "boson"}),
    ("fock_basis", {"n0": 1, "n1": 1, "stats": "fermion"}),
    ("tmsv", {}),
    ("phi_product", {}),
    ("noon_ghz", {}),
    ("boson_psi_prime", {}),
    ("boson_psi", {}),
    ("boson_plus_cubed", {}),
    ("chi_two_boson", {}),
    ("x_state", {}),
    ("fermion_ghz_w", {"L": 2, "M": 2}),
    ("fermion_bell_product", {}),
    ("fermion_plus_fourth", {}),
)


def gallery_names() -> list:
    return list(CATALOG)


def gallery_state(name: str, params: Mapping | None = None) -> tuple:
    """Build the named state; returns ``(normalized state, GallerySpec)``."""
    try:
        entry = CATALOG[name]
    except KeyError:
        raise UnknownGalleryState(name) from None
    params = dict(params or {})
    if "lam" in params:
        params["lambda"] = params.pop("lam")
    unknown = set(params) - set(entry.defaults)
    if unknown:
        raise InvalidParameter(f"{name} takes no parameter(s) {sorted(unknown)}")
    merged = {**entry.defaults, **params}
    state, resolved, expected = entry.build(merged)
    return normalized(state), GallerySpec(name, resolved, expected, entry.description)
