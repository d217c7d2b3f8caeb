import pytest

from primebias import build_primes, classified_counts, make_character


@pytest.fixture(scope="session")
def store_1e5():
    return build_primes(10**5)


@pytest.fixture(scope="session")
def store_1e6():
    return build_primes(10**6)


@pytest.fixture(scope="session")
def store_1e7():
    return build_primes(10**7)


@pytest.fixture(scope="session")
def chi4():
    return make_character(-4)


@pytest.fixture(scope="session")
def chi5():
    return make_character(5)


@pytest.fixture(scope="session")
def counts4_1e7(store_1e7, chi4):
    return classified_counts(store_1e7, chi4)


@pytest.fixture(scope="session")
def counts5_1e7(store_1e7, chi5):
    return classified_counts(store_1e7, chi5)
