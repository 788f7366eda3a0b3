"""
Shared fixtures.
"""
import pytest

from app.core.config import settings


@pytest.fixture(autouse=True)
def restore_settings():
    """CLI overrides mutate the global settings; put them back after every test."""
    snapshot = settings.model_dump()
    yield
    for field, value in snapshot.items():
        setattr(settings, field, value)
