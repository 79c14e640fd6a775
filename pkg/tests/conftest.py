import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fractal_spectra import (
    build_pencil,
    compute_meta,
    reference_params,
    validate_params,
)


@pytest.fixture(scope="session")
def ref_params():
    return reference_params()


@pytest.fixture(scope="session")
def ref_meta(ref_params):
    return compute_meta(ref_params)


@pytest.fixture(scope="session")
def leb_params():
    # P(x) = x, the uniform weight
    return validate_params({"a": (0.5, 0.5), "d": (0.5, 0.5), "beta": (0.0, 0.5)})


@pytest.fixture(scope="session")
def pencil_cache(ref_params):
    cache = {}

    def get(depth, params=None):
        key = (depth, params if params is not None else ref_params)
        if key not in cache:
            cache[key] = build_pencil(key[1], depth)
        return cache[key]

    return get
