import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from infusedlasso import _backend, _kernels_py  # noqa: E402

BACKENDS = [_kernels_py]
if _backend.COMPILED:
    BACKENDS.append(_backend.kernels)


@pytest.fixture(params=BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def kern(request):
    """Each available kernel implementation in turn."""
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def write_csv(path, rows):
    with open(path, "w") as fh:
        for r in rows:
            fh.write(",".join(str(c) for c in r) + "\n")
    return path
