import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from koszul_kit.deformations import DeformationData, build_U, build_cdga
from koszul_kit.linalg import Matrix
from koszul_kit.presentations import QuadraticPresentation
from koszul_kit.scalars import QQ, Field

SEED = int(os.environ.get("KOSZUL_SEED", "0"))


def symmetric_presentation(field, dim):
    """S(V): relations x_i x_j - x_j x_i for i < j."""
    rows = []
    for i in range(dim):
        for j in range(i + 1, dim):
            row = [field.zero()] * (dim * dim)
            row[i * dim + j] = field.one()
            row[j * dim + i] = field.neg(field.one())
            rows.append(row)
    return QuadraticPresentation(field, [f"x{i+1}" for i in range(dim)],
                                 Matrix(field, rows, len(rows), dim * dim))


def heisenberg_deformation(field):
    """The Heisenberg Lie algebra: [x1, x2] = x3, bracket via x^y -> [y,x]."""
    rel = Matrix.from_int_rows(field, [
        [0, 1, 0, -1, 0, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0, -1, 0, 0],
        [0, 0, 0, 0, 0, 1, 0, -1, 0]])
    alpha = Matrix.from_int_rows(field, [[0, 0, -1], [0, 0, 0], [0, 0, 0]])
    return DeformationData.from_raw(field, ["x1", "x2", "x3"], rel, alpha,
                                    [field.zero()] * 3)


def twopoint_deformation(field, a=1, b=2):
    """U = k[x]/(x^2 - (a+b)x + ab)."""
    s = -(a + b)
    return DeformationData.from_raw(
        field, ["x"], Matrix.from_int_rows(field, [[1]]),
        Matrix.from_int_rows(field, [[s]]), [field.of_int(a * b)])


@pytest.fixture(scope="session")
def qq():
    return QQ


@pytest.fixture(scope="session")
def sym2(qq):
    return symmetric_presentation(qq, 2)


@pytest.fixture(scope="session")
def sym3(qq):
    return symmetric_presentation(qq, 3)


@pytest.fixture(scope="session")
def heis(qq):
    return heisenberg_deformation(qq)


@pytest.fixture(scope="session")
def twopoint(qq):
    return twopoint_deformation(qq)


@pytest.fixture(scope="session")
def sym2_world(qq, sym2):
    """(deformation, U, cdga) for the trivial deformation of S(V), dim 2."""
    data = DeformationData.trivial(sym2)
    return data, build_U(data, 8), build_cdga(data, 5)


@pytest.fixture(scope="session")
def heis_world(heis):
    return heis, build_U(heis, 8), build_cdga(heis, 5)


@pytest.fixture(scope="session")
def twopoint_world(twopoint):
    return twopoint, build_U(twopoint, 4), build_cdga(twopoint, 6)
