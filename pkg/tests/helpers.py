"""Shared, cached building blocks for the test modules."""

from __future__ import annotations

from functools import lru_cache

from fusionwha import PathWba, derive_r_matrix, field_for_level, frt_quotient, sl2_dimension_graph
from fusionwha.temperley_lieb import closed_form_r

ACCEPTANCE: list[tuple[str, bool, str]] = []


def record(name: str, ok: bool, detail: str = "") -> None:
    ACCEPTANCE.append((name, ok, detail))


@lru_cache(maxsize=None)
def field(r: int, k: int = 1):
    return field_for_level(r, k)


@lru_cache(maxsize=None)
def algebra(r: int) -> PathWba:
    return PathWba(sl2_dimension_graph(r))


@lru_cache(maxsize=None)
def derived(r: int):
    return derive_r_matrix(r)


@lru_cache(maxsize=None)
def closed(r: int):
    return closed_form_r(r)


@lru_cache(maxsize=None)
def quotient(r: int):
    return frt_quotient(sl2_dimension_graph(r), derived(r))


def path(r: int, *vs: int):
    return sl2_dimension_graph(r).path(*vs)
