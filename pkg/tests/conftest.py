import functools

import pytest

from shiryaev_qsd import make_params, principal_lambda


@functools.lru_cache(maxsize=None)
def _cached_params(A):
    return make_params(principal_lambda(A))


@pytest.fixture(scope="session")
def params_for():
    """Factory fixture: solved-and-normalized parameters for a level A,
    cached across the whole test session."""
    return _cached_params
