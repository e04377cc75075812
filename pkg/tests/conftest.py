"""Shared fixtures: the packaged lexicons and small parsing shortcuts."""

from __future__ import annotations

import pytest

from mediocria.lexicons import default_bundle
from mediocria.textmodel import parse_text


@pytest.fixture(scope="session")
def lexicons():
    return default_bundle()


@pytest.fixture()
def parse(lexicons):
    """Parse raw text with the packaged lexicons; doc id defaults to 't'."""
    def _parse(text: str, doc_id: str = "t"):
        return parse_text(doc_id, text, lexicons)
    return _parse


@pytest.fixture()
def seg(parse):
    """First segment of the parsed text, for single-segment transform tests."""
    def _seg(text: str):
        return parse(text).segments[0]
    return _seg
