"""Global resource limits shared by every module."""
from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Limits:
    max_order: int = 8
    monomial_budget: int = 10**6


class BudgetExceeded(ValueError):
    """A symbolic expansion grew past the configured monomial budget."""


_limits = Limits()


def get_limits() -> Limits:
    return _limits


def set_limits(**changes) -> Limits:
    global _limits
    _limits = replace(_limits, **changes)
    return _limits


@contextmanager
def limits(**changes):
    """Temporarily override limits, e.g. ``with limits(max_order=4): ...``."""
    global _limits
    old = _limits
    _limits = replace(old, **changes)
    try:
        yield _limits
    finally:
        _limits = old


def check_order(n: int) -> None:
    cap = _limits.max_order
    if n > cap:
        raise ValueError(f"order {n} exceeds the configured maximum {cap}")
