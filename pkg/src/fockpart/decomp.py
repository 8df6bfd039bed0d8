"""Matrix decompositions and rank certificates.

* :func:`schmidt` -- singular value decomposition ``M = U diag(s) V^+``.
* :func:`takagi` -- ``S = U diag(s) U^T`` for complex symmetric ``S``.
* :func:`slater` -- ``A = U (+)_k s_k [[0, 1], [-1, 0]] U^T`` for complex
  antisymmetric ``A``.
* :func:`rank_one_fit` -- alternating least squares fit of a tensor by a
  single product (or its symmetric / antisymmetric closure), refined by
  Levenberg-Marquardt.
* :func:`one_particle_rdm` -- reduced density matrix of one slot.

Numerical ranks count values ``>= tol_rel * values[0]``; any value within a
factor :data:`MARGINAL_FACTOR` of that cutoff marks the decomposition
marginal.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from functools import reduce
from typing import NamedTuple, Sequence

import numpy as np
import scipy.linalg
import scipy.optimize

from .core import NTensor, SinglePartVec, Symmetry, permutation_sign
from .errors import InvalidDimension, SymmetryViolation, ZeroState

TAU_REL = 1e-8
ABS_FLOOR = 1e-12
MARGINAL_FACTOR = 10.0

_CLUSTER_TOL = 1e-6
_NULL_TOL = 1e-13


class DecompKind(Enum):
    SCHMIDT = "schmidt"
    TAKAGI = "takagi"
    SLATER = "slater"


class RankInfo(NamedTuple):
    rank: int
    margin: float
    marginal: bool
    rank_low: int
    rank_high: int


def numerical_rank(values: Sequence[float], tol_rel: float = TAU_REL,
                   abs_floor: float = ABS_FLOOR) -> RankInfo:
    """Rank of a nonincreasing value sequence under a relative cutoff.

    ``rank_low``/``rank_high`` are the ranks at cutoffs ``MARGINAL_FACTOR``
    times stricter/looser; they differ exactly when the decomposition is
    marginal.  ``margin`` is the first discarded value over the last kept
    one (0 when nothing is discarded).
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0 or v[0] < abs_floor:
        return RankInfo(0, 0.0, False, 0, 0)
    cut = tol_rel * v[0]
    rank = int(np.count_nonzero(v >= cut))
    low = int(np.count_nonzero(v >= cut * MARGINAL_FACTOR))
    high = int(np.count_nonzero(v >= cut / MARGINAL_FACTOR))
    margin = float(v[rank] / v[rank - 1]) if rank < v.size else 0.0
    return RankInfo(rank, margin, low != high, low, high)


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Values, factor matrices and numerical rank of a decomposition.

    ``left`` holds ``U``; ``right`` holds ``V`` for Schmidt and is ``None``
    for Takagi and Slater, which use a single unitary.
    """

    kind: DecompKind
    values: np.ndarray
    left: np.ndarray
    right: np.ndarray | None
    rank: int
    margin: float
    marginal: bool
    rank_bounds: tuple

    @property
    def slater_rank(self) -> int:
        if self.kind is not DecompKind.SLATER:
            raise AttributeError("slater_rank is only defined for Slater decompositions")
        return self.rank // 2

    def reconstruct(self) -> np.ndarray:
        u, s = self.left, self.values
        if self.kind is DecompKind.SCHMIDT:
            k = s.size
            return (u[:, :k] * s) @ self.right[:, :k].conj().T
        if self.kind is DecompKind.TAKAGI:
            return (u * s) @ u.T
        return u @ slater_block(s) @ u.T


def slater_block(values: np.ndarray) -> np.ndarray:
    """Block-diagonal ``(+)_k v_{2k} [[0, 1], [-1, 0]]`` padded to ``len(values)``."""
    n = len(values)
    out = np.zeros((n, n), dtype=complex)
    for k in range(n // 2):
        out[2 * k, 2 * k + 1] = values[2 * k]
        out[2 * k + 1, 2 * k] = -values[2 * k]
    return out


def _decomposition(kind, values, left, right, tol_rel, info=None) -> Decomposition:
    info = info or numerical_rank(values, tol_rel)
    return Decomposition(kind, np.asarray(values, dtype=float), left, right,
                         info.rank, info.margin, info.marginal,
                         (info.rank_low, info.rank_high))


def schmidt(matrix, tol_rel: float = TAU_REL) -> Decomposition:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.size == 0:
        raise InvalidDimension("schmidt needs a nonempty matrix")
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    return _decomposition(DecompKind.SCHMIDT, s, u, vh.conj().T, tol_rel)


def _clusters(s: np.ndarray) -> list:
    """Index groups of (near-)degenerate singular values; the trailing
    numerically-null group is flagged ``None``."""
    top = s[0] if s.size else 0.0
    groups, cur = [], [0]
    for i in range(1, s.size):
        if s[cur[-1]] - s[i] <= _CLUSTER_TOL * top:
            cur.append(i)
        else:
            groups.append(cur)
            cur = [i]
    if s.size:
        groups.append(cur)
    out = []
    for g in groups:
        null = top == 0 or s[g[0]] <= _NULL_TOL * top
        out.append((g, null))
    return out


def _nearest_unitary(r: np.ndarray) -> np.ndarray:
    x, _, yh = np.linalg.svd(r)
    return x @ yh


def _check_norm_symmetry(m: np.ndarray, sign: int, what: str) -> None:
    scale = np.linalg.norm(m)
    if np.linalg.norm(m - sign * m.T) > 1e-12 * max(scale, 1e-300):
        raise SymmetryViolation(f"input matrix is not {what}")


def takagi(matrix, tol_rel: float = TAU_REL) -> Decomposition:
    """Takagi factorization of a complex symmetric matrix.

    From ``S = V diag(s) W^+`` every cluster of equal singular values obeys
    ``conj(W_c) = V_c Q`` with ``Q`` symmetric unitary; ``U_c = V_c sqrt(Q)``
    then gives ``S_c = s U_c U_c^T``.
    """
    s_mat = np.asarray(matrix, dtype=complex)
    if s_mat.ndim != 2 or s_mat.shape[0] != s_mat.shape[1]:
        raise InvalidDimension("takagi needs a square matrix")
    _check_norm_symmetry(s_mat, 1, "symmetric")
    v, s, wh = np.linalg.svd(s_mat)
    w = wh.conj().T
    u = v.copy()
    for idx, null in _clusters(s):
        if null:
            continue
        q = v[:, idx].conj().T @ w[:, idx].conj()
        q = 0.5 * (q + q.T)
        r = _nearest_unitary(scipy.linalg.sqrtm(q).astype(complex))
        u[:, idx] = v[:, idx] @ r
    return _decomposition(DecompKind.TAKAGI, s, u, None, tol_rel)


def _antisymmetric_canonical(k: np.ndarray) -> np.ndarray:
    """Unitary ``R`` with ``K = R J R^T`` for antisymmetric unitary ``K``."""
    m = k.shape[0]
    cols: list = []
    while len(cols) < m:
        basis = np.array(cols).T if cols else np.zeros((m, 0))
        proj = np.eye(m) - basis @ basis.conj().T
        j = int(np.argmax(np.linalg.norm(proj, axis=0)))
        r1 = proj[:, j] / np.linalg.norm(proj[:, j])
        r2 = -k @ r1.conj()
        r2 = r2 - basis @ (basis.conj().T @ r2)
        r2 = r2 - r1 * (r1.conj() @ r2)
        r2 /= np.linalg.norm(r2)
        cols.extend([r1, r2])
    return _nearest_unitary(np.array(cols).T)


def _slater_real(a: np.ndarray):
    h = 1j * a
    lam, vecs = np.linalg.eigh(h)
    order = np.argsort(lam)[::-1]
    lam, vecs = lam[order], vecs[:, order]
    top = max(lam[0], 0.0)
    n = a.shape[0]
    cols, vals = [], []
    for i in range(n):
        if lam[i] <= _NULL_TOL * top or top == 0:
            break
        vec = vecs[:, i] * math.sqrt(2)
        cols.extend([vec.imag, vec.real])
        vals.extend([lam[i], lam[i]])
    basis = np.array(cols).T if cols else np.zeros((n, 0))
    if basis.shape[1] < n:
        null = scipy.linalg.null_space(basis.T) if basis.shape[1] else np.eye(n)
        basis = np.hstack([basis, null])
        vals.extend([0.0] * null.shape[1])
    return np.asarray(vals), _nearest_unitary(basis.astype(complex))


def _slater_complex(a: np.ndarray):
    v, s, wh = np.linalg.svd(a)
    w = wh.conj().T
    u = v.copy()
    vals = s.copy()
    for idx, null in _clusters(s):
        if null:
            vals[idx] = 0.0
            continue
        if len(idx) % 2:
            raise SymmetryViolation("singular values of an antisymmetric matrix must pair up")
        q = v[:, idx].conj().T @ w[:, idx].conj()
        kmat = 0.5 * (q.T - q)
        u[:, idx] = v[:, idx] @ _antisymmetric_canonical(_nearest_unitary(kmat))
        for p in range(0, len(idx), 2):
            mean = 0.5 * (s[idx[p]] + s[idx[p + 1]])
            vals[idx[p]] = vals[idx[p + 1]] = mean
    return vals, u


def slater(matrix, tol_rel: float = TAU_REL) -> Decomposition:
    """Slater (Youla) decomposition of a complex antisymmetric matrix.

    Real inputs use the spectrum of the Hermitian matrix ``iA``; complex
    inputs use a unitary congruence assembled from the SVD.
    """
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidDimension("slater needs a square matrix")
    _check_norm_symmetry(a, -1, "antisymmetric")
    if np.allclose(a.imag, 0, atol=0):
        vals, u = _slater_real(a.real)
    else:
        vals, u = _slater_complex(a)
    pairs = vals[0::2][: len(vals) // 2]
    info = numerical_rank(pairs, tol_rel)
    doubled = RankInfo(2 * info.rank, info.margin, info.marginal,
                       2 * info.rank_low, 2 * info.rank_high)
    return _decomposition(DecompKind.SLATER, vals, u, None, tol_rel, doubled)


# -- rank-one fitting -----------------------------------------------------------

def _projector(symmetry: Symmetry, n: int):
    if symmetry is Symmetry.NONE or n <= 1:
        return None
    perms = list(itertools.permutations(range(n)))
    signs = [permutation_sign(p) if symmetry is Symmetry.ANTISYMMETRIC else 1 for p in perms]
    return perms, signs


def _project(x: np.ndarray, proj, lead: int = 0) -> np.ndarray:
    """Average ``x`` over slot permutations of its trailing axes."""
    if proj is None:
        return x
    perms, signs = proj
    head = tuple(range(lead))
    out = np.zeros_like(x)
    for p, s in zip(perms, signs):
        out += s * np.transpose(x, head + tuple(lead + i for i in p))
    return out / len(perms)


def _outer(vectors) -> np.ndarray:
    return reduce(np.multiply.outer, vectors)


def _residual(target, factors, proj) -> float:
    return float(np.linalg.norm(target - _project(_outer(factors), proj)))


def _als(target, factors, proj, max_sweeps, tol, stall=1e-3):
    """Alternating least squares with an extrapolation step after every
    sweep (accepted only when it lowers the residual).  Stops on an absolute
    improvement below ``tol`` or a relative one below ``stall``."""
    n, d = len(factors), factors[0].size
    prev = np.inf
    res = np.inf
    for sweep in range(1, max_sweeps + 1):
        old = [f.copy() for f in factors]
        for k in range(n):
            others = factors[:k] + factors[k + 1:]
            q = _outer(others) if others else np.ones(())
            moved = np.moveaxis(target, k, 0).reshape(d, -1)
            b = moved @ q.reshape(-1).conj()
            if proj is None:
                g = np.eye(d) * np.vdot(q, q).real
            else:
                x = np.multiply.outer(np.eye(d), q)
                x = np.moveaxis(x, 1, 1 + k) if k else x
                px = _project(x, proj, lead=1)
                g = x.reshape(d, -1).conj() @ px.reshape(d, -1).T
            sol, *_ = np.linalg.lstsq(g, b, rcond=None)
            if not np.any(sol):
                return factors, 1.0
            factors[k] = sol
        res = _residual(target, factors, proj)
        step = sweep ** (1 / 3)
        jumped = [f + step * (f - o) for f, o in zip(factors, old)]
        jres = _residual(target, jumped, proj)
        if jres < res:
            factors, res = jumped, jres
        if prev - res < max(tol, stall * res) or res < 1e-15:
            break
        prev = res
    return factors, res


def _jacobian_blocks(factors, proj) -> list:
    """Per-slot matrices ``A_k`` with ``d fit = sum_k A_k d psi_k``."""
    n, d = len(factors), factors[0].size
    blocks = []
    for k in range(n):
        others = factors[:k] + factors[k + 1:]
        q = _outer(others) if others else np.ones(())
        x = np.multiply.outer(np.eye(d), q)
        x = np.moveaxis(x, 1, 1 + k) if k else x
        blocks.append(_project(x, proj, lead=1).reshape(d, -1).T)
    return blocks


def _polish(target, factors, proj, max_nfev: int = 200):
    """Levenberg-Marquardt refinement of an ALS result (analytic Jacobian)."""
    n, d = len(factors), factors[0].size
    flat_target = target.reshape(-1)

    def unpack(x):
        z = x[: n * d] + 1j * x[n * d:]
        return [z[k * d:(k + 1) * d] for k in range(n)]

    def fun(x):
        r = _project(_outer(unpack(x)), proj).reshape(-1) - flat_target
        return np.concatenate([r.real, r.imag])

    def jac(x):
        a = np.hstack(_jacobian_blocks(unpack(x), proj))
        return np.block([[a.real, -a.imag], [a.imag, a.real]])

    z = np.concatenate(factors)
    x0 = np.concatenate([z.real, z.imag])
    sol = scipy.optimize.least_squares(fun, x0, jac=jac, method="lm",
                                       xtol=1e-15, ftol=1e-15, gtol=1e-15,
                                       max_nfev=max_nfev)
    out = unpack(sol.x)
    return out, _residual(target, out, proj)


def _fit_pair(target: np.ndarray, symmetry: Symmetry) -> tuple:
    """Exact best two-slot fit from the truncated SVD, Takagi or Slater form."""
    if symmetry is Symmetry.SYMMETRIC:
        dec = takagi(target)
        s = dec.values
        p, q = boson_pair_factors(_truncated(dec, 2))
        return [p, q], float(np.sqrt(np.sum(s[2:] ** 2)))
    if symmetry is Symmetry.ANTISYMMETRIC:
        dec = slater(target)
        s = dec.values
        u = dec.left
        return [s[0] * u[:, 0], u[:, 1]], float(np.sqrt(np.sum(s[2:] ** 2)))
    u, s, vh = np.linalg.svd(target)
    return [s[0] * u[:, 0], vh[0]], float(np.sqrt(np.sum(s[1:] ** 2)))


def _truncated(dec: Decomposition, k: int) -> Decomposition:
    values = dec.values.copy()
    values[k:] = 0
    return Decomposition(dec.kind, values, dec.left, dec.right, min(dec.rank, k),
                         dec.margin, dec.marginal, dec.rank_bounds)


def rank_one_fit(tensor: NTensor, rng: np.random.Generator | None = None,
                 restarts: int = 16, max_sweeps: int = 500,
                 tol: float = 1e-12) -> tuple:
    """Best-effort rank-one fit of ``tensor``.

    The ansatz is ``psi_1 (x) ... (x) psi_n`` for untagged tensors and
    ``psi_1 v ... v psi_n`` / ``psi_1 ^ ... ^ psi_n`` for symmetric /
    antisymmetric ones.  Returns ``(factors, residual)`` with
    ``residual = |T - fit| / |T|``; the factors reproduce the fit under the
    matching product of :mod:`fockpart.tensor`.
    """
    if tensor.n < 1:
        raise InvalidDimension("rank_one_fit needs n >= 1")
    norm = tensor.norm()
    if norm == 0:
        raise ZeroState("cannot fit the zero tensor")
    if rng is None:
        rng = np.random.default_rng(0)
    n, d = tensor.n, tensor.dim
    target = tensor.to_dense() / norm
    if n == 1:
        return [SinglePartVec(target * norm)], 0.0
    if n == 2:
        factors, res = _fit_pair(target, tensor.symmetry)
        factors[0] = factors[0] * norm
        return [SinglePartVec(f) for f in factors], res
    proj = _projector(tensor.symmetry, n)

    starts = []
    lead = [np.linalg.svd(m, full_matrices=False)[0][:, 0]
            for m in (np.moveaxis(target, k, 0).reshape(d, -1) for k in range(n))]
    starts.append(lead)
    for _ in range(max(restarts - 1, 0)):
        starts.append([rng.standard_normal(d) + 1j * rng.standard_normal(d) for _ in range(n)])

    best_res, best = np.inf, None
    for start in starts:
        factors, res = _als(target, [np.array(f, dtype=complex) for f in start],
                            proj, max_sweeps, tol)
        if res > 1e-14:
            factors, res = min([(factors, res), _polish(target, factors, proj)],
                               key=lambda fr: fr[1])
        if res < best_res:
            best_res, best = res, factors
        if best_res < 1e-14:
            break
    # Permutation-sum convention of the products: P = sum / n!.
    scale = norm / math.factorial(n) if proj is not None else norm
    out = [SinglePartVec(best[0] * scale)] + [SinglePartVec(f) for f in best[1:]]
    return out, float(best_res)


def one_particle_rdm(tensor: NTensor, slot: int = 0) -> np.ndarray:
    """Unit-trace one-particle reduced density matrix of ``slot``."""
    norm = tensor.norm()
    if norm == 0:
        raise ZeroState("reduced density matrix of the zero tensor")
    if tensor.n < 1:
        raise InvalidDimension("reduced density matrix needs n >= 1")
    m = np.moveaxis(tensor.to_dense(), slot, 0).reshape(tensor.dim, -1) / norm
    return m @ m.conj().T


# -- two-particle identities -----------------------------------------------------

class PairBasis(NamedTuple):
    gamma: complex
    e_plus: np.ndarray
    e_minus: np.ndarray


def pair_basis(psi1, psi2) -> PairBasis:
    """Overlap ``gamma = <psi1|psi2>`` and the orthonormal pair
    ``e_pm = (psi1 +- (conj(gamma)/|gamma|) psi2) / sqrt(2 (1 +- |gamma|))``.

    Inputs must be normalized and neither parallel nor orthogonal.
    """
    a = np.asarray(getattr(psi1, "amps", psi1), dtype=complex)
    b = np.asarray(getattr(psi2, "amps", psi2), dtype=complex)
    gamma = complex(np.vdot(a, b))
    g = abs(gamma)
    if g == 0 or g >= 1:
        raise InvalidDimension("vectors must be neither orthogonal nor parallel")
    phase = gamma.conjugate() / g
    e_plus = (a + phase * b) / math.sqrt(2 * (1 + g))
    e_minus = (a - phase * b) / math.sqrt(2 * (1 - g))
    return PairBasis(gamma, e_plus, e_minus)


def two_boson_expansion(psi1, psi2) -> np.ndarray:
    """Normalized ``psi1 v psi2`` rebuilt from identical-particle products::

        (g/|g|) (1+|g|)/sqrt(2(1+|g|^2)) e+ (x) e+
      - (g/|g|) (1-|g|)/sqrt(2(1+|g|^2)) e- (x) e-
    """
    gamma, ep, em = pair_basis(psi1, psi2)
    g = abs(gamma)
    phase = gamma / g
    den = math.sqrt(2 * (1 + g * g))
    return (phase * (1 + g) / den) * np.outer(ep, ep) - (phase * (1 - g) / den) * np.outer(em, em)


def two_fermion_expansion(psi1, psi2) -> np.ndarray:
    """Normalized ``psi1 ^ psi2`` as ``(g/(sqrt2 |g|)) (e- (x) e+ - e+ (x) e-)``."""
    gamma, ep, em = pair_basis(psi1, psi2)
    phase = gamma / abs(gamma)
    return (phase / math.sqrt(2)) * (np.outer(em, ep) - np.outer(ep, em))


def boson_pair_factors(decomposition: Decomposition) -> tuple:
    """Factors ``(psi1, psi2)`` with ``psi1 psi2^T + psi2 psi1^T = S`` for a
    Takagi decomposition of rank <= 2."""
    if decomposition.kind is not DecompKind.TAKAGI:
        raise ValueError("boson_pair_factors needs a Takagi decomposition")
    if decomposition.rank > 2:
        raise ValueError("Takagi rank above two has no symmetric-product form")
    s = np.zeros(2)
    s[: min(2, decomposition.values.size)] = decomposition.values[:2]
    u = decomposition.left
    u1 = u[:, 0]
    u2 = u[:, 1] if u.shape[1] > 1 else np.zeros_like(u1)
    a = math.sqrt(s[0]) * u1 / math.sqrt(2)
    b = 1j * math.sqrt(s[1]) * u2 / math.sqrt(2)
    return a + b, a - b
