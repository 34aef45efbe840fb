import pytest
from click.testing import CliRunner

from decode_energy.app import create_app
from decode_energy.config import TestingConfig
from decode_energy.extensions import init_cache
from decode_energy.models import Dataset
from decode_energy.services.synthetic import four_pe_spec, generate
from tests.helpers import make_record


@pytest.fixture(autouse=True)
def fresh_cache():
    init_cache(TestingConfig)
    yield


@pytest.fixture
def cli():
    return create_app(TestingConfig)


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture(scope="session")
def reference_dataset():
    """500 noiseless records from the published 4-PE specific energies."""
    return generate(four_pe_spec(n_records=500, seed=7))


@pytest.fixture
def small_dataset():
    return Dataset(tuple(
        make_record(f"r{i}", energy=1.0 + i, counts=(100 + 10 * i, 10, 2, 30, 3, 1, 20 + i, 2, 1))
        for i in range(6)
    ))
