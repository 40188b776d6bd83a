import numpy as np
import pytest

from curveortho.curves import circle_curve, fit_interior_map, joukowski_curve
from curveortho.szego import (
    GenericWeight,
    SingularWeight,
    build_szego_pack_generic,
    build_szego_pack_singular,
)


@pytest.fixture(scope="session")
def circle():
    return circle_curve()


@pytest.fixture(scope="session")
def circle_imap(circle):
    return fit_interior_map(circle, z0=0.0, degree=16)


@pytest.fixture(scope="session")
def ellipse():
    return joukowski_curve(0.25)


@pytest.fixture(scope="session")
def ellipse_imap(ellipse):
    return fit_interior_map(ellipse, z0=0.0, degree=72)


@pytest.fixture(scope="session")
def weight_one():
    return GenericWeight(v_coeffs=np.array([1.0 + 0j]))


@pytest.fixture(scope="session")
def weight_half():
    # h(z) = |z - 0.5|^2 on the unit circle; Delta_e singular at |w| = 0.5
    return GenericWeight(v_coeffs=np.array([-0.5 + 0j, 1.0 + 0j]), rho=0.5)


@pytest.fixture(scope="session")
def weight_sqrt_half():
    # h(z) = |z - 0.5| (algebraic singularity, lambda = 1/2, on L_{1/2})
    return SingularWeight(singularities=((0.5 + 0j, 0.5),))


@pytest.fixture(scope="session")
def pack_circle_one(circle, circle_imap, weight_one):
    return build_szego_pack_generic(circle, circle_imap, weight_one)


@pytest.fixture(scope="session")
def pack_circle_half(circle, circle_imap, weight_half):
    return build_szego_pack_generic(circle, circle_imap, weight_half)


@pytest.fixture(scope="session")
def pack_circle_sqrt(circle, circle_imap, weight_sqrt_half):
    return build_szego_pack_singular(circle, circle_imap, weight_sqrt_half)


@pytest.fixture(scope="session")
def pack_ellipse_one(ellipse, ellipse_imap, weight_one):
    return build_szego_pack_generic(ellipse, ellipse_imap, weight_one)
