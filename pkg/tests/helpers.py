import json
import random
import time
from contextlib import contextmanager
from pathlib import Path

from hypothesis import strategies as st

from fequiv.poly import poly_from_json, random_field, random_map, random_point
from fequiv.series import series_from_json
from fequiv.trees import trees_upto

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def trees(max_order: int = 5, colors: int = 1):
    return st.sampled_from(trees_upto(max_order, colors))


def instance(seed: int, dim: int = 2, degree: int = 2, fdegree: int = 2):
    """Random (field, scalar observable, rational point) from one seed."""
    rng = random.Random(seed)
    return random_field(rng, dim, degree), random_map(rng, dim, 1, fdegree), random_point(rng, dim)


def load_series(name: str):
    return series_from_json(json.loads((FIXTURES / name).read_text()))


def load_poly(name: str):
    return poly_from_json(json.loads((FIXTURES / name).read_text()))


ACCEPTANCE: list = []


@contextmanager
def criterion(number: int, title: str, limit: float | None = None):
    """Record one acceptance criterion and print its verdict line."""
    start = time.perf_counter()
    ok = False
    try:
        yield
        elapsed = time.perf_counter() - start
        if limit is not None:
            assert elapsed < limit, f"took {elapsed:.1f} s, limit {limit} s"
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} ({elapsed:.2f} s)"
        ACCEPTANCE.append(line)
        print(line)
