import os
import shutil
from pathlib import Path

import pytest


@pytest.fixture(scope="session")
def cli():
    path = os.environ.get("KERRMECH_CLI") or shutil.which("kerrmech")
    if not path:
        pytest.skip("kerrmech executable not found (set KERRMECH_CLI)")
    return path


@pytest.fixture(scope="session")
def configs_dir():
    return Path(os.environ.get("KERRMECH_CONFIGS", Path(__file__).resolve().parents[2] / "configs"))


@pytest.fixture
def write_config(tmp_path):
    def write(text, name="run.ini"):
        path = tmp_path / name
        path.write_text(text)
        return path

    return write
