import os
import shutil

import pytest


@pytest.fixture(scope="session")
def cli():
    path = os.environ.get("CLOCKAOI_CLI") or shutil.which("clockaoi")
    if not path:
        pytest.skip("clockaoi executable not found; set CLOCKAOI_CLI")
    return path
