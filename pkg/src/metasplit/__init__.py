"""Exact p-adic Hilbert symbols, metaplectic cocycles, quaternion embeddings
and the group cohomology checks around splittings of the metaplectic cover."""

from .errors import *  # noqa: F401,F403
from .hilbert import hilbert, hilbert_conic_oracle, hilbert_q2, hilbert_tame, lemma_f_witness, norm_group
from .metaplectic import (
    Mat2E,
    MetaElem,
    cocycle_gl2,
    cocycle_sl2,
    conjugation_transport,
    kubota_x,
    meta_mul,
    splitting_gl2f,
    verify_cocycle_identity,
)
from .padic import FieldDesc, PadicE, PadicF, is_square, norm, square_classes
from .quaternion import QuatAlg, Quat, embed_L, embed_m2e, sample_sl1, skolem_noether_conjugator, splitting_over_Lx
from .suites import RunConfig, run_suite

__version__ = "0.1.0"
