"""Modules, complexes, cones, homology, homotopies."""

import random

import pytest

from koszul_kit.complexes import (
    CdgModule,
    ChainMap,
    UComplex,
    UModule,
    cone,
    homology_dims,
    homotopy_identity_holds,
    nullhomotopy,
)
from koszul_kit.deformations import DeformationData, build_cdga
from koszul_kit.errors import CurvedInputError, InputError
from koszul_kit.linalg import Matrix
from koszul_kit.scalars import QQ

from conftest import SEED


def test_trivial_module_requires_beta_zero(heis, twopoint):
    assert UModule.trivial(heis).validate() is None
    with pytest.raises(InputError):
        UModule.trivial(twopoint)


def test_twopoint_simples(twopoint):
    f = QQ
    for a in (1, 2):
        m = UModule(twopoint, 1, [Matrix.from_int_rows(f, [[a]])])
        assert m.validate() is None
    bad = UModule(twopoint, 1, [Matrix.from_int_rows(f, [[5]])])
    assert bad.validate() is not None


def test_g_of_simple_validates(twopoint_world):
    twop, u, cdga = twopoint_world
    f = QQ
    # G(k_1): components (x^q) at degree -q, actions identity times the
    # parity twist, alternating differential 1 (q odd) / 2 (q even)
    dims = {p: 1 for p in range(-4, 1)}
    acts = {p: [Matrix.from_int_rows(f, [[-1]])] for p in range(-4, 0)}
    diffs = {p: Matrix.from_int_rows(f, [[1 if (-p) % 2 == 1 else 2]])
             for p in range(-4, 0)}
    g = CdgModule(cdga, (-4, 0), dims, acts, diffs)
    assert g.validate() is None
    # both maps scaled by a = 1 is invalid when a != b (d^2 gives a^2, not ab)
    bad_diffs = {p: Matrix.from_int_rows(f, [[1]]) for p in range(-4, 0)}
    bad = CdgModule(cdga, (-4, 0), dims, acts, bad_diffs)
    assert bad.validate() is not None
    # alternating 0 / 3 keeps the anti-derivation law (0 + 3 = a + b) but
    # d^2 = 0 != ab: the curvature law is the first to fail
    bad2_diffs = {p: Matrix.from_int_rows(f, [[0 if (-p) % 2 == 1 else 3]])
                  for p in range(-4, 0)}
    bad2 = CdgModule(cdga, (-4, 0), dims, acts, bad2_diffs)
    msg = bad2.validate()
    assert msg is not None and "curvature" in msg


def test_cone_of_identity_acyclic_and_nullhomotopic(heis):
    k = UModule.trivial(heis)
    c = UComplex(heis, (0, 0), {0: k}, {})
    cn = cone(ChainMap.identity(c))
    assert cn.validate() is None
    h, _ = homology_dims(cn, (-2, 1))
    assert all(v == 0 for v in h.values())
    idc, zero = ChainMap.identity(cn), ChainMap.zero(cn, cn)
    hom = nullhomotopy(idc, zero)
    assert hom is not None
    assert homotopy_identity_holds(idc, zero, hom)


def test_cone_of_zero_map(heis):
    k = UModule.trivial(heis)
    c = UComplex(heis, (0, 0), {0: k}, {})
    cn = cone(ChainMap.zero(c, c))
    h, _ = homology_dims(cn, (-2, 1))
    assert h[-1] == 1 and h[0] == 1


def test_homology_exact_two_term(heis):
    f = QQ
    k = UModule.trivial(heis)
    c = UComplex(heis, (0, 1), {0: k, 1: k}, {0: Matrix.identity(f, 1)})
    h, _ = homology_dims(c, (0, 1))
    assert h == {0: 0, 1: 0}


def test_homology_zero_differential(heis):
    k = UModule.trivial(heis)
    k2 = k.direct_sum(k)
    c = UComplex(heis, (0, 1), {0: k2, 1: k}, {0: Matrix.zero(QQ, 1, 2)})
    h, _ = homology_dims(c, (0, 1))
    assert h == {0: 2, 1: 1}


def test_curved_homology_rejected(twopoint_world):
    twop, u, cdga = twopoint_world
    dims = {p: 1 for p in range(-2, 1)}
    acts = {p: [Matrix.from_int_rows(QQ, [[-1]])] for p in range(-2, 0)}
    diffs = {p: Matrix.from_int_rows(QQ, [[1 if (-p) % 2 == 1 else 2]])
             for p in range(-2, 0)}
    g = CdgModule(cdga, (-2, 0), dims, acts, diffs)
    with pytest.raises(CurvedInputError):
        homology_dims(g, (-2, 0))


def test_homology_invariant_under_conjugation(heis):
    rng = random.Random(SEED + 5)
    f = QQ
    k = UModule.trivial(heis)
    k2 = k.direct_sum(k)
    d = Matrix.from_int_rows(f, [[0, 1], [0, 0]])
    c = UComplex(heis, (0, 1), {0: k2, 1: k2}, {0: d})
    h0, _ = homology_dims(c, (0, 1))
    for _ in range(5):
        # conjugate by a random invertible change of basis in each degree
        while True:
            g0 = Matrix.from_int_rows(f, [[rng.randrange(-2, 3) for _ in range(2)]
                                          for _ in range(2)])
            from koszul_kit.linalg import rank
            if rank(g0) == 2:
                break
        gi = _inv(g0)
        c2 = UComplex(heis, (0, 1), {0: k2, 1: k2}, {0: g0.mul(d).mul(gi)})
        h1, _ = homology_dims(c2, (0, 1))
        assert h1 == h0


def _inv(m):
    from koszul_kit.linalg import solve_matrix
    return solve_matrix(m, Matrix.identity(m.field, m.rows))


def test_nullhomotopy_respects_u_linearity(twopoint):
    # k_1 and k_2 are non-isomorphic simples: the identity complex on k_1
    # maps to k_2 only by zero, and s must be U-linear
    f = QQ
    k1 = UModule(twopoint, 1, [Matrix.from_int_rows(f, [[1]])])
    k2 = UModule(twopoint, 1, [Matrix.from_int_rows(f, [[2]])])
    c1 = UComplex(twopoint, (0, 1), {0: k1, 1: k2}, {0: Matrix.zero(f, 1, 1)})
    # id vs id needs s = 0: fine
    hom = nullhomotopy(ChainMap.identity(c1), ChainMap.identity(c1))
    assert hom is not None
    # the map multiplying degree 1 by 1 cannot be nullhomotopic: any
    # homotopy s: k_2 -> k_1 must be U-linear, forcing s = 0
    one = ChainMap(c1, c1, {1: Matrix.identity(f, 1)})
    assert nullhomotopy(one, ChainMap.zero(c1, c1)) is None


def test_shift_negates_differential_and_twists_actions(twopoint_world):
    twop, u, cdga = twopoint_world
    f = QQ
    dims = {p: 1 for p in range(-2, 1)}
    acts = {p: [Matrix.from_int_rows(f, [[-1]])] for p in range(-2, 0)}
    diffs = {p: Matrix.from_int_rows(f, [[1 if (-p) % 2 == 1 else 2]])
             for p in range(-2, 0)}
    g = CdgModule(cdga, (-2, 0), dims, acts, diffs)
    sh = g.shift()
    assert sh.validate() is None
    assert sh.dims == {p - 1: 1 for p in range(-2, 1)}
    assert f.eq(sh.diff(-2).data[0][0], f.of_int(-1))
    assert f.eq(sh.action(-2, 0).data[0][0], f.one())


def test_socle_complex_of_g(sym2_world):
    data, u, cdga = sym2_world
    from koszul_kit.functors import FunctorBounds, apply_G
    k = UModule.trivial(data)
    k2 = k.direct_sum(k)
    d = Matrix.from_int_rows(QQ, [[0, 1], [0, 0]])
    m = UComplex(data, (0, 1), {0: k2, 1: k2}, {0: d})
    g = apply_G(m, cdga, FunctorBounds((-4, 2), 4, 3))
    _, bases, diffs = g.socle_complex()
    assert {p: b.cols for p, b in bases.items() if b.cols} == {0: 2, 1: 2}
    # socle differential is d_M up to base change: rank matches
    from koszul_kit.linalg import rank
    assert rank(diffs[0]) == 1


def test_module_weights_validation(heis):
    f = QQ
    # weight-graded module: U_{<=1}-style with weights 0,1,1,2 and the
    # regular-action pattern; trivial actions are weight-compatible only
    # when declared weights match
    m = UModule(heis, 2, [Matrix.zero(f, 2, 2)] * 3, weights=[0, 7])
    assert m.validate() is None  # zero actions are vacuously homogeneous
    up = Matrix.from_int_rows(f, [[0, 0], [1, 0]])
    m2 = UModule(heis, 2, [up, Matrix.zero(f, 2, 2), Matrix.zero(f, 2, 2)],
                 weights=[0, 7])
    msg = m2.validate()
    assert msg is not None and "weight" in msg


def test_cone_acyclic_iff_nullhomotopic(heis):
    """For bounded complexes, f is a homotopy equivalence iff cone(f) is
    nullhomotopic; here probed through cone(f) acyclic vs id ~ 0."""
    rng = random.Random(SEED + 77)
    f = QQ
    k = UModule.trivial(heis)
    k2 = k.direct_sum(k)
    for _ in range(8):
        a = Matrix(f, [[f.of_int(rng.randrange(-2, 3)) for _ in range(2)]
                       for _ in range(2)], 2, 2)
        c1 = UComplex(heis, (0, 0), {0: k2}, {})
        fmap = ChainMap(c1, c1, {0: a})
        cn = cone(fmap)
        h, _ = homology_dims(cn, (-2, 1))
        acyclic = all(v == 0 for v in h.values())
        hom = nullhomotopy(ChainMap.identity(cn), ChainMap.zero(cn, cn))
        assert acyclic == (hom is not None)
