"""PBW conditions, the curved dual dga, the filtered algebra U, and the
vanishing lemma."""

import random

import pytest

from koszul_kit.deformations import (
    DeformationData,
    build_U,
    build_cdga,
    pbw_check,
    vanishing_witness,
)
from koszul_kit.errors import CdgaInvariantError, InputError, KoszulKitError
from koszul_kit.linalg import Matrix
from koszul_kit.presentations import truncate_algebra
from koszul_kit.scalars import QQ, Field

from conftest import SEED, heisenberg_deformation, symmetric_presentation, twopoint_deformation


# -- pbw_check ----------------------------------------------------------------


def test_heisenberg_pbw(heis):
    rep = pbw_check(heis)
    assert rep.all_pass
    assert rep.overlap_dim == 1


def test_jacobi_violation_fails_cond2(qq):
    # [x1,x2] = x3, [x1,x3] = x2 perturbed by [x2,x3] = x2: Jacobi fails
    rel = Matrix.from_int_rows(qq, [
        [0, 1, 0, -1, 0, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0, -1, 0, 0],
        [0, 0, 0, 0, 0, 1, 0, -1, 0]])
    alpha = Matrix.from_int_rows(qq, [[0, 0, -1], [0, -1, 0], [0, -1, 0]])
    bad = DeformationData.from_raw(qq, ["x1", "x2", "x3"], rel, alpha,
                                   [qq.zero()] * 3)
    rep = pbw_check(bad)
    assert rep.cond1
    assert not rep.cond2
    assert not rep.all_pass


def test_associative_multiplication_on_full_relations(qq):
    # R = V ⊗ V, alpha an associative product on V: all conditions pass.
    # V = k with x.x = x (idempotent product).
    d = DeformationData.from_raw(qq, ["x"], Matrix.from_int_rows(qq, [[1]]),
                                 Matrix.from_int_rows(qq, [[-1]]), [qq.zero()])
    assert pbw_check(d).all_pass
    # two-dimensional: e.e = e, e.f = f, f.e = 0, f.f = 0 (associative)
    rel = Matrix.from_int_rows(qq, [[1, 0, 0, 0], [0, 1, 0, 0],
                                    [0, 0, 1, 0], [0, 0, 0, 1]])
    alpha = Matrix.from_int_rows(qq, [[-1, 0], [0, -1], [0, 0], [0, 0]])
    d2 = DeformationData.from_raw(qq, ["e", "f"], rel, alpha, [qq.zero()] * 4)
    assert pbw_check(d2).all_pass


# -- build_cdga -----------------------------------------------------------------


def test_heisenberg_cdga_is_ce(heis_world):
    heis, u, cdga = heis_world
    assert cdga.curvature_is_zero
    # d vanishes on x1*, x2*; d(x3*) pairs to -1 against x1 ^ x2, the
    # classical Chevalley-Eilenberg value -x1* ^ x2* as a bilinear form
    f = cdga.field
    assert all(f.is_zero(x) for x in cdga.d(1).column(0))
    assert all(f.is_zero(x) for x in cdga.d(1).column(1))
    col = cdga.d(1).column(2)
    # pairing of d(x3*) against the relation r12 = x1 ox x2 - x2 ox x1
    # under the contragredient pairing
    word = cdga.dual.basis_words[2][0]
    assert word == (0, 1)
    rel = heis.base.relations
    val = f.zero()
    for i, c in enumerate(col):
        w = cdga.dual.basis_words[2][i]
        # <w, r> = r at the swapped pair coordinate
        val = f.add(val, f.mul(c, rel.data[0][w[1] * 3 + w[0]]))
    assert f.eq(val, f.of_int(-1))
    assert cdga.verify() is None


def test_twopoint_cdga_golden(twopoint_world):
    twop, u, cdga = twopoint_world
    f = cdga.field
    assert f.eq(cdga.curvature[0], f.of_int(2))
    for n in range(1, 5):
        val = cdga.d(n).data[0][0]
        if n % 2 == 1:
            assert f.eq(val, f.of_int(-3))
        else:
            assert f.is_zero(val)


def test_trivial_deformation_zero_cdga(sym2):
    data = DeformationData.trivial(sym2)
    cdga = build_cdga(data, 4)
    assert cdga.curvature_is_zero
    for n in range(4):
        assert cdga.d(n).is_zero()


def test_sign_debug_hook_breaks_leibniz(twopoint):
    # the corrupted extension gives d(x*^2) = -6 x*^3 instead of 0
    alg = build_cdga(twopoint, 4, check=False, _sign_debug=True)
    msg = alg.verify()
    assert msg is not None and "Leibniz" in msg
    with pytest.raises(CdgaInvariantError):
        build_cdga(twopoint, 4, _sign_debug=True)


def test_pbw_cdga_equivalence_random_f3():
    f3 = Field(3)
    rng = random.Random(SEED + 17)
    rel = Matrix.from_int_rows(f3, [
        [0, 1, 0, 2, 0, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0, 2, 0, 0],
        [0, 0, 0, 0, 0, 1, 0, 2, 0]])
    agree = both = 0
    for _ in range(40):
        alpha = Matrix(f3, [[f3.of_int(rng.randrange(3)) for _ in range(3)]
                            for _ in range(3)], 3, 3)
        beta = [f3.of_int(rng.randrange(3)) for _ in range(3)]
        data = DeformationData.from_raw(f3, ["x", "y", "z"], rel, alpha, beta)
        bg = pbw_check(data).all_pass
        try:
            build_cdga(data, 4)
            ok = True
        except KoszulKitError:
            ok = False
        assert bg == ok
        agree += 1
        both += bg
    assert agree == 40


# -- build_U ---------------------------------------------------------------------


def test_heisenberg_gr_dims(heis_world, sym3):
    heis, u, _ = heis_world
    alg = truncate_algebra(sym3, 8)
    assert u.gr_dims == [alg.dim_at(n) for n in range(9)]


def test_twopoint_u(twopoint_world):
    twop, u, _ = twopoint_world
    assert u.total_dim == 2
    assert u.gr_dims[:3] == [1, 1, 0]
    # x . x = 3x - 2 in U
    f = u.field
    prod = u.multiply(u.gen_vector(0), u.gen_vector(0))
    expected = [f.add(a, b) for a, b in zip(
        [f.mul(f.of_int(3), c) for c in u.gen_vector(0)],
        [f.mul(f.of_int(-2), c) for c in u.unit_vector()])]
    assert prod == expected


def test_trivial_deformation_u_is_graded(sym2):
    data = DeformationData.trivial(sym2)
    u = build_U(data, 5)
    alg = truncate_algebra(sym2, 5)
    assert u.gr_dims == [alg.dim_at(n) for n in range(6)]
    assert u.check_associativity(4)


def test_u_associativity(heis_world):
    _, u, _ = heis_world
    assert u.check_associativity(4)


def test_non_pbw_gr_dims_drop(qq):
    # alpha violating Jacobi: gr dims fall below the symmetric algebra
    rel = Matrix.from_int_rows(qq, [
        [0, 1, 0, -1, 0, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0, -1, 0, 0],
        [0, 0, 0, 0, 0, 1, 0, -1, 0]])
    alpha = Matrix.from_int_rows(qq, [[0, 0, -1], [0, -1, 0], [0, -1, 0]])
    bad = DeformationData.from_raw(qq, ["x1", "x2", "x3"], rel, alpha,
                                   [qq.zero()] * 3)
    u = build_U(bad, 4)
    sym = [1, 3, 6, 10, 15]
    assert u.gr_dims[0] == 1
    assert any(u.gr_dims[n] < sym[n] for n in range(1, 5))


# -- vanishing witness -------------------------------------------------------------


def test_vanishing_witness(heis, twopoint, sym2):
    assert vanishing_witness(heis)
    assert vanishing_witness(twopoint)
    assert vanishing_witness(DeformationData.trivial(sym2))


def test_weights_constraints(qq):
    rel = Matrix.from_int_rows(qq, [
        [0, 1, 0, -1, 0, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0, -1, 0, 0],
        [0, 0, 0, 0, 0, 1, 0, -1, 0]])
    alpha = Matrix.from_int_rows(qq, [[0, 0, -1], [0, 0, 0], [0, 0, 0]])
    # weights (1,1,2) make [x1,x2] = x3 homogeneous: accepted
    DeformationData.from_raw(qq, ["x1", "x2", "x3"], rel, alpha,
                             [qq.zero()] * 3, weights=[1, 1, 2])
    # all-ones weights make alpha inhomogeneous: rejected
    with pytest.raises(InputError):
        DeformationData.from_raw(qq, ["x1", "x2", "x3"], rel, alpha,
                                 [qq.zero()] * 3, weights=[1, 1, 1])


def test_beta_zero_iff_curvature_zero(heis, twopoint, sym2):
    # augmented case: c = 0 exactly when beta = 0
    f = QQ
    assert build_cdga(heis, 3).curvature_is_zero
    assert build_cdga(DeformationData.trivial(sym2), 3).curvature_is_zero
    assert not build_cdga(twopoint, 3).curvature_is_zero
