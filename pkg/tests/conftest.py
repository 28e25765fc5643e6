import logging

import pytest

from shiftlab.core.settings import reset_settings

logger = logging.getLogger(__name__)


@pytest.fixture(autouse=True)
def fresh_settings():
    """Every test starts from (and leaves behind) default settings"""
    reset_settings()
    yield
    reset_settings()
