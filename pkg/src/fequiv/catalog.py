"""Named integrators: a bundled JSON catalog, optionally extended by a user file."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .integrate import ExactFlow, PartitionedMethod, SplittingScheme
from .numbers import format_scalar, parse_scalar
from .series import ButcherTableau, PartitionSpec

CATALOG_SCHEMA = "fequiv.catalog/1"
EXACT = "exact"


@dataclass
class Catalog:
    tableaux: dict = field(default_factory=dict)
    splittings: dict = field(default_factory=dict)
    partitioned: dict = field(default_factory=dict)

    def names(self) -> list[str]:
        return sorted(self.tableaux) + sorted(self.splittings) + sorted(self.partitioned) + [EXACT]

    def get(self, name: str, block_sizes=None):
        """Resolve a method name. Partitioned entries need the block sizes of the state."""
        if name == EXACT:
            return ExactFlow()
        if name in self.tableaux:
            return self.tableaux[name]
        if name in self.splittings:
            return self.splittings[name]
        if name in self.partitioned:
            if block_sizes is None:
                raise ValueError(f"partitioned method {name!r} needs block sizes")
            tabs = tuple(self.tableaux[t] for t in self.partitioned[name])
            return PartitionedMethod(tabs, PartitionSpec.from_sizes(block_sizes), name)
        raise KeyError(f"unknown method {name!r}; known: {', '.join(self.names())}")

    def merge(self, obj: dict) -> None:
        if obj.get("schema", CATALOG_SCHEMA) != CATALOG_SCHEMA:
            raise ValueError(f"expected schema {CATALOG_SCHEMA!r}")
        for name, t in obj.get("tableaux", {}).items():
            self.tableaux[name] = ButcherTableau.from_json({**t, "name": name})
        for name, s in obj.get("splittings", {}).items():
            stages = tuple((int(nu), parse_scalar(c)) for nu, c in s["stages"])
            self.splittings[name] = SplittingScheme(stages, int(s["parts"]), name)
        for name, p in obj.get("partitioned", {}).items():
            missing = [t for t in p["tableaux"] if t not in self.tableaux]
            if missing:
                raise ValueError(f"partitioned method {name!r} refers to unknown tableaux {missing}")
            self.partitioned[name] = list(p["tableaux"])


def splitting_to_json(s: SplittingScheme) -> dict:
    return {"parts": s.parts, "stages": [[nu, format_scalar(c)] for nu, c in s.stages]}


def load_catalog(extra: str | Path | None = None) -> Catalog:
    cat = Catalog()
    text = resources.files("fequiv").joinpath("data/methods.json").read_text()
    cat.merge(json.loads(text))
    if extra is not None:
        cat.merge(json.loads(Path(extra).read_text()))
    return cat
