"""Shared fixtures."""

import logging

import pytest


@pytest.fixture(autouse=True)
def package_logger_propagates():
    """CLI runs attach a rich handler and stop propagation; undo that for caplog."""
    yield
    logger = logging.getLogger("shm_bench")
    logger.handlers.clear()
    logger.propagate = True
    logger.setLevel(logging.NOTSET)
