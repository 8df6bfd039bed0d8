"""Fock-space states of distinguishable particles, bosons and fermions, and
their classification by field and particle factorizability."""

__version__ = "0.1.0"

from .classify import (
    ClassifyConfig,
    Report,
    Status,
    Verdict,
    boson_factorizable_identical,
    boson_factorizable_indist,
    classify,
    fermion_factorizable,
    field_factorizable,
    particle_factorizable_dist,
)
from .core import (
    FockState,
    NTensor,
    SinglePartVec,
    Statistics,
    Symmetry,
    basis_vector,
    embed,
    equal_up_to_phase,
    field_product,
    from_occupations,
    inner_product,
    n_component,
    normalized,
    occupation_amplitudes,
    occupation_state,
    single_part,
    superpose,
    vacuum,
)
from .decomp import (
    Decomposition,
    DecompKind,
    numerical_rank,
    one_particle_rdm,
    rank_one_fit,
    schmidt,
    slater,
    takagi,
)
from .errors import *  # noqa: F401,F403
from .gallery import GallerySpec, gallery_state
from .ladder import annihilate, create, mode_monomial, mode_series
from .lang import evaluate, parse
from .tensor import antisymmetrize, flatten, otimes, symmetrize, vee, wedge
