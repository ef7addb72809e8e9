from pathlib import Path

import pytest

from generators import WEAKENING, WEAKENING_CS, F
from jtableau.logics import EMPTY_CS, build_cs, parse_logic

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture
def J():
    return parse_logic("J")


@pytest.fixture
def empty_cs():
    return EMPTY_CS


@pytest.fixture
def ex_cs(J):
    return build_cs([F(WEAKENING_CS)], J)


@pytest.fixture
def weakening():
    return F(WEAKENING)


@pytest.fixture
def data_dir():
    return DATA
