import os
import sys

import pytest


@pytest.fixture(scope="session")
def sqz():
    """The extension module: installed `sqz` package or the build-tree _sqz."""
    try:
        import sqz as module
        return module
    except ImportError:
        pass
    ext_dir = os.environ.get("SQZ_EXT_DIR")
    if not ext_dir:
        pytest.skip("sqz not installed and SQZ_EXT_DIR not set")
    sys.path.insert(0, ext_dir)
    import _sqz as module
    return module
