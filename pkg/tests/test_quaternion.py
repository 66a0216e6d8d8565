import random

import pytest

from metasplit.errors import ExtensionMismatch, NoEmbedding, NotInvertible
from metasplit.hilbert import base_class_ints, hilbert
from metasplit.metaplectic import Mat2E
from metasplit.padic import FieldDesc
from metasplit.quaternion import (
    QuatAlg,
    conjugator_for,
    conjugator_stable,
    embed_L,
    embed_m2e,
    random_quat,
    sample_sl1,
    skolem_noether_conjugator,
    splitting_over_Lx,
)

ALGEBRAS = [QuatAlg.standard(p) for p in (2, 3, 5)]


@pytest.mark.parametrize("D", ALGEBRAS, ids=lambda D: f"Q{D.F.p}")
def test_standard_algebras_are_division(D):
    assert hilbert(D.a, D.b, D.F) == -1
    assert D.is_division()


def test_split_constants_rejected():
    with pytest.raises(ValueError):
        QuatAlg.make(FieldDesc(3), 1, 3)


def test_structure_constants():
    D = ALGEBRAS[1]
    i, j, k = D.i(), D.j(), D.k()
    assert (i * j).is_close(k)
    assert (j * i).is_close(-k)
    assert (i * i).is_close(D.quat(D.a))
    assert (j * j).is_close(D.quat(D.b))


@pytest.mark.parametrize("D", ALGEBRAS, ids=lambda D: f"Q{D.F.p}")
def test_conjugate_and_inverse(D):
    rng = random.Random(D.F.p)
    for _ in range(20):
        q = random_quat(D, rng)
        assert (q * q.conj()).is_close(D.quat(q.nrd()))
        assert (q * q.invert()).is_close(D.one())
        assert not q.nrd().is_zero()


def test_zero_is_not_invertible():
    with pytest.raises(NotInvertible):
        ALGEBRAS[0].quat().invert()


@pytest.mark.parametrize("D", ALGEBRAS, ids=lambda D: f"Q{D.F.p}")
def test_embedding_is_a_ring_map(D):
    E = D.splitting_field
    rng = random.Random(f"emb{D.F.p}")
    assert embed_m2e(D.one()).is_close(Mat2E.identity(E))
    for _ in range(20):
        q1, q2 = random_quat(D, rng), random_quat(D, rng)
        m1, m2 = embed_m2e(q1), embed_m2e(q2)
        assert (m1.det() - E.element(q1.nrd())).is_zero()
        assert embed_m2e(q1 * q2).is_close(m1 @ m2)
        s = embed_m2e(q1 + q2) - m1
        assert s.is_close(m2)


def test_embedding_checks_field():
    D = ALGEBRAS[1]
    with pytest.raises(ExtensionMismatch):
        embed_m2e(D.one(), FieldDesc(3, 3))


def test_embed_L_routes():
    D = ALGEBRAS[1]
    comp = embed_L(3, D, "via_M2F").image
    assert (comp @ comp).is_close(Mat2E.of(comp.field, 3, 0, 0, 3))
    assert embed_L(D.a, D, "via_D").image.is_close(D.i())
    with pytest.raises(NoEmbedding):
        embed_L(4, D)


@pytest.mark.parametrize("D", ALGEBRAS, ids=lambda D: f"Q{D.F.p}")
def test_pure_quaternions_square_to_d(D):
    for d in base_class_ints(D.F)[1:]:
        q = embed_L(d, D, "via_D").image
        assert q.x.is_zero()
        assert (q * q).is_close(D.quat(d))


def test_conjugator_for_equal_embeddings():
    D = ALGEBRAS[0]
    e = embed_m2e(D.i())
    g = skolem_noether_conjugator(e, e)
    assert (g @ e).is_close(e @ g)
    assert not g.det().is_zero()


@pytest.mark.parametrize("D", ALGEBRAS, ids=lambda D: f"Q{D.F.p}")
def test_conjugators(D):
    for d in base_class_ints(D.F)[1:]:
        t, e1, e2 = conjugator_for(D, d)
        a, b = e1.in_m2e(D), e2.in_m2e(D)
        assert (t @ a @ t.inverse()).is_close(b)
        assert conjugator_stable(D, d)


def test_conjugator_matches_closed_form():
    # columns v and M v solve g C = M g for C the companion matrix of d
    D = ALGEBRAS[2]
    t, e1, e2 = conjugator_for(D, 5)
    M = e2.in_m2e(D)
    E = D.splitting_field
    v = Mat2E(E.one(), E.zero(), E.zero(), E.zero())
    g = Mat2E(v.a, (M @ v).a, v.c, (M @ v).c)
    assert (g @ e1.in_m2e(D)).is_close(M @ g)


@pytest.mark.parametrize("p, d", [(2, -1), (2, 10), (3, 2), (3, 6), (5, 5)])
def test_torus_splitting(p, d):
    D = QuatAlg.standard(p)
    cert = splitting_over_Lx(D, d, 30, random.Random(f"{p}:{d}"))
    assert cert.all_passed
    assert len(cert.pairs) == 30
    for i, j, k in cert.pairs:
        assert (cert.elements[i] @ cert.elements[j]).is_close(cert.elements[k])


@pytest.mark.parametrize("D", ALGEBRAS, ids=lambda D: f"Q{D.F.p}")
def test_sl1_samples(D):
    qs = sample_sl1(D, 8, random.Random(0))
    assert len(qs) == 8
    for q in qs:
        assert (q.nrd() - 1).is_zero()
        assert (embed_m2e(q).det() - 1).is_zero()


def test_norm_form_is_anisotropic():
    rng = random.Random(7)
    for D in ALGEBRAS:
        for _ in range(50):
            q = random_quat(D, rng)
            assert q.is_zero() == q.nrd().is_zero()
