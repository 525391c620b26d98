import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))

from ontominer import load_kb

DEMOS = pathlib.Path(__file__).resolve().parent.parent / "demos"


@pytest.fixture(scope="session")
def bank_kb():
    return load_kb(str(DEMOS / "bank.kb"))


@pytest.fixture(scope="session")
def bank_inverse_kb():
    return load_kb(str(DEMOS / "bank_inverse.kb"))


@pytest.fixture(scope="session")
def pat_kb():
    return load_kb(str(DEMOS / "pat.kb"))


@pytest.fixture(scope="session")
def bank_path():
    return str(DEMOS / "bank.kb")
