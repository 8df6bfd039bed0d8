import itertools

import numpy as np
import pytest

from fockpart.core import FockState, NTensor, SinglePartVec, Statistics, Symmetry, from_occupations
from fockpart.tensor import antisymmetrize, symmetrize


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_vec(rng, dim):
    return SinglePartVec(random_complex(rng, dim))


def random_unitary(rng, dim):
    q, r = np.linalg.qr(random_complex(rng, (dim, dim)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_tensor(rng, n, dim, symmetry=Symmetry.NONE):
    t = NTensor.from_dense(random_complex(rng, (dim,) * n)) if n else NTensor.scalar(1.0, dim)
    if n >= 2 and symmetry is Symmetry.SYMMETRIC:
        return symmetrize(t)
    if n >= 2 and symmetry is Symmetry.ANTISYMMETRIC:
        return antisymmetrize(t)
    return t.retagged(symmetry) if n else t


def random_product_tensor(rng, n, dim, symmetry=Symmetry.NONE):
    """Tensor (anti)symmetrized from a random product of n vectors."""
    vecs = [random_complex(rng, dim) for _ in range(n)]
    dense = vecs[0]
    for v in vecs[1:]:
        dense = np.multiply.outer(dense, v)
    t = NTensor.from_dense(dense)
    if symmetry is Symmetry.SYMMETRIC:
        return symmetrize(t)
    if symmetry is Symmetry.ANTISYMMETRIC:
        return antisymmetrize(t)
    return t


def transform(tensor, u):
    """Apply the same single-particle matrix ``u`` to every slot."""
    if tensor.n == 0:
        return tensor
    dense = tensor.to_dense()
    for axis in range(tensor.n):
        dense = np.moveaxis(np.tensordot(u, dense, axes=([1], [axis])), 0, axis)
    return NTensor.from_dense(dense, tensor.symmetry)


def transform_state(state, u):
    comps = {n: transform(t, u) for n, t in state.components.items()}
    return FockState(state.dim, state.statistics, comps, state.nmax)


def random_state(rng, statistics, dim, max_n=2, product=False):
    """Random state with components n = 0..max_n; ``product`` makes every
    component a (symmetrized) product of single-particle vectors."""
    stats = Statistics.parse(statistics)
    comps = {}
    for n in range(max_n + 1):
        if stats is Statistics.FERMION and n > dim:
            break
        if product and n >= 1:
            t = random_product_tensor(rng, n, dim, stats.symmetry)
        else:
            t = random_tensor(rng, n, dim, stats.symmetry)
        comps[n] = t.scaled(complex(rng.standard_normal() + 1j * rng.standard_normal()))
    return FockState(dim, stats, comps)


def random_ordered_state(rng, statistics, dim=3, top=2, product=False):
    """Random state on the mode-ordered occupation basis with at most ``top``
    particles; ``product`` keeps one occupation per particle number, so every
    component is a single (product) basis tensor."""
    stats = Statistics.parse(statistics)
    counts = range(2 if stats is Statistics.FERMION else top + 1)
    occs = [o for o in itertools.product(counts, repeat=dim) if sum(o) <= top]
    if product:
        by_n = {}
        for o in occs:
            by_n.setdefault(sum(o), o)
        occs = list(by_n.values())
    amps = {o: complex(rng.standard_normal(), rng.standard_normal()) for o in occs}
    return from_occupations(amps, stats)


def random_classifiable_state(rng, statistics, dim=3, product=False):
    """Random state ``classify`` accepts: mode ordered for distinguishable
    particles, a general random state otherwise."""
    if Statistics.parse(statistics) is Statistics.DISTINGUISHABLE:
        return random_ordered_state(rng, statistics, dim, product=product)
    return random_state(rng, statistics, dim, product=product)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# -- acceptance summary ------------------------------------------------------------

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(key, title): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    key, title = marker.args
    if rep.when == "setup" and rep.skipped:
        _CRITERIA[key] = (title, "SKIP")
    elif rep.when == "call":
        if hasattr(rep, "wasxfail"):
            verdict = "FAIL (expected: unattainable as stated, see decisions ledger)" \
                if rep.skipped else "UNEXPECTED PASS"
        else:
            verdict = "PASS" if rep.passed else "FAIL"
        _CRITERIA[key] = (title, verdict)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA, key=lambda k: (int("".join(c for c in k if c.isdigit())), k)):
        title, verdict = _CRITERIA[key]
        terminalreporter.write_line(f"criterion {key:<4} {verdict:<6} {title}")
