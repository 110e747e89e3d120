"""
Test configuration for pytest.
"""

import sys
from pathlib import Path

import pytest

# Add src directory to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root / "src"))

from quantum.linalg import make_rng  # noqa: E402


@pytest.fixture
def rng():
    """Seeded generator; every test gets the same stream."""
    return make_rng(1234)


@pytest.fixture
def project_dir() -> Path:
    return project_root
