import pytest

from nialg.variety import Context


@pytest.fixture(scope="session")
def ctx():
    """One engine context for the whole run so consequence-space and
    rewrite-table caches are shared across test modules."""
    return Context()
