import pytest

from dqmf.algebra import FieldConfig
from dqmf.hyperd import DerivationEngine

MAIN_FIELDS = [4, 5, 7, 8, 9]
SMALL_FIELDS = [2, 3]

_engines = {}


def engine_for(q: int) -> DerivationEngine:
    """One engine per field for the whole session so memo tables stay warm."""
    eng = _engines.get(q)
    if eng is None:
        eng = DerivationEngine(FieldConfig.from_q(q))
        _engines[q] = eng
    return eng


@pytest.fixture(params=MAIN_FIELDS, ids=lambda q: f"q{q}")
def q(request):
    return request.param


@pytest.fixture
def cfg(q):
    return FieldConfig.from_q(q)


@pytest.fixture
def engine(q):
    return engine_for(q)
