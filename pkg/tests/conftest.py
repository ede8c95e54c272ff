import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import framepoint._kernels as kernels


@pytest.fixture(params=kernels.available())
def backend(request):
    """Run a test under each available kernel backend."""
    with kernels.use_backend(request.param):
        yield request.param
