import numpy as np
import pytest

from subspec.catalog import catalog_substitution


@pytest.fixture(scope="session")
def tm():
    return catalog_substitution("thue-morse")


@pytest.fixture(scope="session")
def fib():
    return catalog_substitution("fibonacci")


@pytest.fixture(scope="session")
def rs():
    return catalog_substitution("rudin-shapiro")


@pytest.fixture(scope="session")
def pdub():
    return catalog_substitution("period-doubling")


@pytest.fixture(scope="session")
def bij3():
    return catalog_substitution("bijective-3")


@pytest.fixture(scope="session")
def np0111():
    return catalog_substitution("non-pisot-0111")


def random_substitution(rng, d, max_len=4):
    """A random valid substitution on d letters (not necessarily primitive)."""
    from subspec.substitution import Substitution

    rules = tuple(
        tuple(int(x) for x in rng.integers(0, d, int(rng.integers(1, max_len + 1))))
        for _ in range(d)
    )
    return Substitution(tuple(str(i) for i in range(d)), rules)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
