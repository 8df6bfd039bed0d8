"""Field and particle factorizability verdicts.

Every check reduces to numerical ranks of matrices built from the state:

* field: per-mode cuts of the occupation-amplitude tensor;
* distinguishable particles: single-slot flattenings of every component;
* bosons: Takagi rank (n = 2), flattenings or a symmetric rank-one fit
  (n >= 3);
* fermions: Slater rank (n = 2) or the rank of the one-particle reduced
  density matrix (n >= 3).

A rank-based check is Indeterminate only when the decision flips between
the stricter and looser cutoffs reported by :func:`decomp.numerical_rank`.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .core import FockState, NTensor, Statistics, normalized, occupation_amplitudes
from .decomp import (
    ABS_FLOOR,
    TAU_REL,
    RankInfo,
    numerical_rank,
    rank_one_fit,
    slater,
    takagi,
)
from .errors import ZeroState
from .tensor import single_slot_flattenings


class Status(Enum):
    FACTORIZABLE = "factorizable"
    ENTANGLED = "entangled"
    INDETERMINATE = "indeterminate"
    NOT_APPLICABLE = "not_applicable"


SLOTS = (
    "field",
    "particle_dist",
    "particle_indist_boson",
    "particle_identical_boson",
    "particle_fermion",
)

_APPLICABLE = {
    Statistics.DISTINGUISHABLE: {"field", "particle_dist"},
    Statistics.BOSON: {"field", "particle_indist_boson", "particle_identical_boson"},
    Statistics.FERMION: {"field", "particle_fermion"},
}


@dataclass(frozen=True)
class ClassifyConfig:
    tol_rel: float = TAU_REL
    abs_floor: float = ABS_FLOOR
    eps_fit: float = 1e-8
    eps_rej: float = 1e-3
    restarts: int = 16
    max_sweeps: int = 500
    seed: int = 42
    nmax: int | None = None

    def rank(self, values) -> RankInfo:
        return numerical_rank(values, self.tol_rel, self.abs_floor)


@dataclass(frozen=True)
class Verdict:
    status: Status
    witness: dict = field(default_factory=dict)
    marginal: bool = False

    @classmethod
    def not_applicable(cls, statistics: Statistics) -> "Verdict":
        return cls(Status.NOT_APPLICABLE, {"reason": f"{statistics.value} statistics"})


@dataclass(frozen=True)
class Report:
    field: Verdict
    particle_dist: Verdict
    particle_indist_boson: Verdict
    particle_identical_boson: Verdict
    particle_fermion: Verdict
    per_component: list
    config: ClassifyConfig
    statistics: Statistics
    dim: int

    def verdict(self, slot: str) -> Verdict:
        return getattr(self, slot)

    def statuses(self) -> dict:
        return {slot: self.verdict(slot).status for slot in SLOTS}

    @property
    def indeterminate(self) -> bool:
        return any(v is Status.INDETERMINATE for v in self.statuses().values())


# -- helpers ---------------------------------------------------------------------

def _decide(info: RankInfo, ok: Callable[[int], bool]) -> Status:
    lo, hi = ok(info.rank_low), ok(info.rank_high)
    if lo != hi:
        return Status.INDETERMINATE
    return Status.FACTORIZABLE if ok(info.rank) else Status.ENTANGLED


def _decide_all(infos, ok: Callable[[int], bool]) -> Status:
    lo = all(ok(i.rank_low) for i in infos)
    hi = all(ok(i.rank_high) for i in infos)
    if lo != hi:
        return Status.INDETERMINATE
    return Status.FACTORIZABLE if all(ok(i.rank) for i in infos) else Status.ENTANGLED


def _combine(statuses) -> Status:
    statuses = list(statuses)
    if Status.ENTANGLED in statuses:
        return Status.ENTANGLED
    if Status.INDETERMINATE in statuses:
        return Status.INDETERMINATE
    return Status.FACTORIZABLE


def _rank_evidence(infos) -> dict:
    return {
        "ranks": [i.rank for i in infos],
        "margins": [i.margin for i in infos],
    }


def _slot_ranks(t: NTensor, cfg: ClassifyConfig) -> list:
    return [cfg.rank(np.linalg.svd(m, compute_uv=False)) for m in single_slot_flattenings(t)]


def _require_nonzero(state: FockState) -> None:
    if state.is_zero:
        raise ZeroState("cannot classify the zero state")


def _particle_verdict(state: FockState, check, cfg: ClassifyConfig) -> tuple:
    """Run ``check(tensor, cfg) -> (status, marginal, evidence)`` on every
    component; returns the combined verdict and the per-component evidence."""
    _require_nonzero(state)
    rows, statuses, marginal = [], [], False
    for n in state.particle_numbers:
        t = state.component(n)
        if n <= 1:
            status, marg, ev = Status.FACTORIZABLE, False, {"trivial": True}
        else:
            status, marg, ev = check(t, cfg)
        statuses.append(status)
        marginal |= marg
        rows.append({"n": n, "status": status.value, **ev})
    return Verdict(_combine(statuses), {"components": rows}, marginal), rows


# -- field -----------------------------------------------------------------------

def occupation_array(state: FockState) -> np.ndarray:
    """Dense occupation-amplitude tensor, axis ``j`` indexed by ``n_j``."""
    amps = occupation_amplitudes(state)
    shape = tuple(max(occ[j] for occ in amps) + 1 for j in range(state.dim))
    out = np.zeros(shape, dtype=complex)
    for occ, a in amps.items():
        out[occ] = a
    return out


def field_factorizable(state: FockState, config: ClassifyConfig | None = None) -> Verdict:
    """Factorizable iff every ``mode j | other modes`` cut of the occupation
    amplitudes has Schmidt rank 1."""
    cfg = config or ClassifyConfig()
    _require_nonzero(state)
    arr = occupation_array(state)
    infos = []
    for j in range(state.dim):
        m = np.moveaxis(arr, j, 0).reshape(arr.shape[j], -1)
        infos.append(cfg.rank(np.linalg.svd(m, compute_uv=False)))
    status = _decide_all(infos, lambda r: r == 1)
    return Verdict(status, {"mode_ranks": [i.rank for i in infos],
                            "margins": [i.margin for i in infos]},
                   any(i.marginal for i in infos))


# -- distinguishable -----------------------------------------------------------------

def _dist_check(t: NTensor, cfg: ClassifyConfig) -> tuple:
    infos = _slot_ranks(t, cfg)
    return (_decide_all(infos, lambda r: r == 1), any(i.marginal for i in infos),
            _rank_evidence(infos))


def particle_factorizable_dist(state: FockState, config: ClassifyConfig | None = None) -> Verdict:
    if state.statistics is not Statistics.DISTINGUISHABLE:
        return Verdict.not_applicable(state.statistics)
    return _particle_verdict(state, _dist_check, config or ClassifyConfig())[0]


# -- bosons --------------------------------------------------------------------------

def _takagi_info(t: NTensor, cfg: ClassifyConfig) -> RankInfo:
    m = t.to_dense()
    m = 0.5 * (m + m.T)
    return cfg.rank(takagi(m, cfg.tol_rel).values)


def _identical_check(t: NTensor, cfg: ClassifyConfig) -> tuple:
    if t.n == 2:
        info = _takagi_info(t, cfg)
        return (_decide(info, lambda r: r == 1), info.marginal,
                {"takagi_rank": info.rank, "margin": info.margin})
    return _dist_check(t, cfg)


def _indist_check(t: NTensor, cfg: ClassifyConfig) -> tuple:
    if t.n == 2:
        info = _takagi_info(t, cfg)
        return (_decide(info, lambda r: r <= 2), info.marginal,
                {"takagi_rank": info.rank, "margin": info.margin})
    status, marginal, ev = _identical_check(t, cfg)
    if status is Status.FACTORIZABLE:
        return status, marginal, {**ev, "identical": True}
    rng = np.random.default_rng([cfg.seed, t.n])
    _, residual = rank_one_fit(t, rng, cfg.restarts, cfg.max_sweeps)
    if residual < cfg.eps_fit:
        status = Status.FACTORIZABLE
    elif residual >= cfg.eps_rej:
        status = Status.ENTANGLED
    else:
        status = Status.INDETERMINATE
    return status, False, {"residual": residual}


def boson_factorizable_indist(state: FockState, config: ClassifyConfig | None = None) -> Verdict:
    """Every component equals ``psi_1 v ... v psi_n`` for some ``psi_k``."""
    if state.statistics is not Statistics.BOSON:
        return Verdict.not_applicable(state.statistics)
    return _particle_verdict(state, _indist_check, config or ClassifyConfig())[0]


def boson_factorizable_identical(state: FockState, config: ClassifyConfig | None = None) -> Verdict:
    """Every component is proportional to ``psi^{v n}``."""
    if state.statistics is not Statistics.BOSON:
        return Verdict.not_applicable(state.statistics)
    return _particle_verdict(state, _identical_check, config or ClassifyConfig())[0]


# -- fermions ------------------------------------------------------------------------

def _fermion_check(t: NTensor, cfg: ClassifyConfig) -> tuple:
    if t.n == 2:
        dec = slater(t.to_dense(), cfg.tol_rel)
        lo, hi = dec.rank_bounds
        info = RankInfo(dec.rank, dec.margin, dec.marginal, lo, hi)
        return (_decide(info, lambda r: r == 2), info.marginal,
                {"slater_rank": dec.slater_rank, "margin": dec.margin})
    # A single Slater determinant has exactly n equal 1-RDM eigenvalues 1/n;
    # antisymmetry caps each eigenvalue at 1/n, so rank n is sufficient.
    s = np.linalg.svd(single_slot_flattenings(t)[0], compute_uv=False)
    info = cfg.rank(s)
    spectrum = (s ** 2) / np.sum(s ** 2)
    return (_decide(info, lambda r: r == t.n), info.marginal,
            {"rdm_rank": info.rank, "margin": info.margin,
             "rdm_spectrum": [float(x) for x in spectrum[: t.n + 1]]})


def fermion_factorizable(state: FockState, config: ClassifyConfig | None = None) -> Verdict:
    """Every component equals ``psi_1 ^ ... ^ psi_n`` for some ``psi_k``."""
    if state.statistics is not Statistics.FERMION:
        return Verdict.not_applicable(state.statistics)
    return _particle_verdict(state, _fermion_check, config or ClassifyConfig())[0]


# -- report ----------------------------------------------------------------------------

_CHECKS = {
    "particle_dist": _dist_check,
    "particle_indist_boson": _indist_check,
    "particle_identical_boson": _identical_check,
    "particle_fermion": _fermion_check,
}


def classify(state: FockState, config: ClassifyConfig | None = None) -> Report:
    """All applicable verdicts of ``state``; the others are NotApplicable."""
    cfg = config or ClassifyConfig()
    _require_nonzero(state)
    state = normalized(state)
    applicable = _APPLICABLE[state.statistics]
    verdicts = {}
    per_n: dict = {}
    for slot in SLOTS:
        if slot not in applicable:
            verdicts[slot] = Verdict.not_applicable(state.statistics)
        elif slot == "field":
            verdicts[slot] = field_factorizable(state, cfg)
        else:
            verdicts[slot], rows = _particle_verdict(state, _CHECKS[slot], cfg)
            for row in rows:
                row = dict(row)
                per_n.setdefault(row.pop("n"), {})[slot] = row

    ident, indist = verdicts["particle_identical_boson"], verdicts["particle_indist_boson"]
    if ident.status is Status.FACTORIZABLE and indist.status is not Status.FACTORIZABLE:
        verdicts["particle_indist_boson"] = Verdict(
            Status.FACTORIZABLE, {**indist.witness, "implied_by": "particle_identical_boson"},
            indist.marginal)

    per_component = [{"n": n, **per_n[n]} for n in sorted(per_n)]
    return Report(per_component=per_component, config=cfg,
                  statistics=state.statistics, dim=state.dim, **verdicts)


def config_dict(config: ClassifyConfig) -> dict:
    return asdict(config)
