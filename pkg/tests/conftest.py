"""Fixtures for the primary suite; plain builders live in helpers.py."""

from __future__ import annotations

import pytest

from helpers import write_olid


@pytest.fixture
def tmp_olid(tmp_path):
    """Write OLID rows to a temp file and return its path."""

    def _write(rows: list[str], header: bool = True, name: str = "data.tsv") -> str:
        return write_olid(tmp_path / name, rows, header=header)

    return _write
