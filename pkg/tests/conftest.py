import random

import pytest

from aprabe import bilinear, scheme
from aprabe.attrspace import AttributeMatrix


HOSPITAL_LEVELS = (
    ("HospitalA", "HospitalB", "Professor", "Years5"),
    ("Cardiologist", "Gastroenterologist", "∅", "∅"),
)


@pytest.fixture
def rng():
    return random.Random(0xA55E55)


@pytest.fixture(scope="session")
def debug_params():
    return bilinear.gen_params(32, bilinear.DEBUG, random.Random(1001))


@pytest.fixture(scope="session")
def curve_params():
    # 16-bit primes keep the curve arithmetic instant in unit tests
    return bilinear.gen_params(16, bilinear.CURVE, random.Random(1002))


@pytest.fixture(scope="session", params=["debug", "curve"])
def any_params(request, debug_params, curve_params):
    return debug_params if request.param == "debug" else curve_params


@pytest.fixture(scope="session")
def hospital_matrix():
    return AttributeMatrix(HOSPITAL_LEVELS)


@pytest.fixture(scope="session")
def debug_system(debug_params, hospital_matrix):
    pk, msk = scheme.setup(hospital_matrix, debug_params, random.Random(77))
    return pk, msk
