import os
import shutil
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[2]
sys.path.insert(0, str(ROOT / "tests" / "oracles"))
sys.path.insert(0, str(Path(__file__).resolve().parent))


@pytest.fixture(scope="session")
def cli():
    path = os.environ.get("QDTRAJ_CLI") or shutil.which("qdtraj")
    if not path:
        candidate = ROOT / "build" / "tools" / "qdtraj"
        path = str(candidate) if candidate.exists() else None
    if not path:
        pytest.skip("qdtraj command-line tool not found; set QDTRAJ_CLI")
    return path


@pytest.fixture(scope="session")
def fixture_dir():
    return Path(os.environ.get("QDTRAJ_FIXTURE_DIR", ROOT / "tests" / "fixtures"))
