import pytest

from aitlab.complexity import TableStore


@pytest.fixture(scope="session")
def store(tmp_path_factory):
    """One table hub for the whole run; tables are tiny and reusable."""
    cache = tmp_path_factory.mktemp("tables")
    return TableStore(cache_dir=cache, budget=4096)
