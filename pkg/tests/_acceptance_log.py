"""Shared verdict buffer between the acceptance tests and conftest."""

VERDICTS: list[str] = []
