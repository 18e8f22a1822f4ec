import pytest
from hypothesis import HealthCheck, settings

from efpl.metacheck import load_corpus
from efpl.parser import parse_structure

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

CHAIN = """
universe a b c
fun c/0 -> a
fun s/1: a -> b, b -> c, c -> c
rel E/2 negatable: (a,b) (b,c)
rel Col/1 positive: (a)
"""


@pytest.fixture(scope="session")
def chain():
    return parse_structure(CHAIN)


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()
