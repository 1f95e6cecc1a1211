"""Variable schema for the broadcast sales table.

The default schema covers the 31 columns of the livestreaming broadcast
table: 30 predictors grouped into popularity / appearance / voice / misc,
plus the GMV sales target. Each variable carries its transform tag and the
observed value bounds, so validation and transformation are driven by data,
not code.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import SchemaError

ROLES = ("target", "predictor")
GROUPS = ("popularity", "appearance", "voice", "misc", "target")
TRANSFORMS = ("log", "log1p", "none")


@dataclass(frozen=True)
class VariableSpec:
    """One column of the broadcast table."""

    name: str
    role: str
    group: str
    transform: str
    lower_bound: float
    upper_bound: float

    def __post_init__(self):
        if self.role not in ROLES:
            raise SchemaError(f"{self.name}: unknown role {self.role!r}")
        if self.group not in GROUPS:
            raise SchemaError(f"{self.name}: unknown group {self.group!r}")
        if self.transform not in TRANSFORMS:
            raise SchemaError(f"{self.name}: unknown transform {self.transform!r}")
        if self.lower_bound > self.upper_bound:
            raise SchemaError(
                f"{self.name}: lower_bound {self.lower_bound} > upper_bound {self.upper_bound}"
            )
        if self.transform == "log" and self.lower_bound <= 0:
            raise SchemaError(
                f"{self.name}: log transform requires a positive lower bound, "
                f"got {self.lower_bound}"
            )


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered collection of variables with exactly one target."""

    variables: tuple[VariableSpec, ...]
    target_name: str = "GMV"

    def __post_init__(self):
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise SchemaError(f"duplicate variable names: {dupes}")
        targets = [v for v in self.variables if v.role == "target"]
        if len(targets) != 1:
            raise SchemaError(f"schema must have exactly one target, found {len(targets)}")
        if targets[0].name != self.target_name:
            raise SchemaError(
                f"target variable is {targets[0].name!r}, expected {self.target_name!r}"
            )

    @property
    def target(self) -> VariableSpec:
        return next(v for v in self.variables if v.role == "target")

    @property
    def predictors(self) -> tuple[VariableSpec, ...]:
        return tuple(v for v in self.variables if v.role == "predictor")

    @property
    def predictor_names(self) -> list[str]:
        return [v.name for v in self.predictors]

    @property
    def names(self) -> list[str]:
        return [v.name for v in self.variables]

    def __getitem__(self, name: str) -> VariableSpec:
        for v in self.variables:
            if v.name == name:
                return v
        raise SchemaError(f"no variable named {name!r}")

    def __contains__(self, name: str) -> bool:
        return any(v.name == name for v in self.variables)

    def predictor_index(self, name: str) -> int:
        for i, v in enumerate(self.predictors):
            if v.name == name:
                return i
        raise SchemaError(f"no predictor named {name!r}")

    def to_dict(self) -> dict:
        return {
            "target_name": self.target_name,
            "variables": [
                {
                    "name": v.name,
                    "role": v.role,
                    "group": v.group,
                    "transform": v.transform,
                    "lower_bound": v.lower_bound,
                    "upper_bound": v.upper_bound,
                }
                for v in self.variables
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureSchema":
        variables = tuple(VariableSpec(**v) for v in d["variables"])
        return cls(variables=variables, target_name=d.get("target_name", "GMV"))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "FeatureSchema":
        return cls.from_dict(json.loads(Path(path).read_text()))


# name, role, group, transform, lower_bound, upper_bound
_DEFAULT_ROWS = [
    ("GMV", "target", "target", "log", 20.0, 361000000.0),
    ("Live_Counts", "predictor", "misc", "none", 1.0, 9.0),
    ("Views", "predictor", "popularity", "log", 4.0, 798267.0),
    ("Likes", "predictor", "popularity", "log", 6.0, 3759455.0),
    ("Comments", "predictor", "popularity", "log", 2.0, 58389.0),
    ("Page_Views", "predictor", "popularity", "log", 16.0, 2412945.0),
    ("Fan_Growth", "predictor", "popularity", "log1p", 0.0, 9218.0),
    ("Wisdom", "predictor", "appearance", "none", 2.0, 45.0),
    ("Distance", "predictor", "appearance", "none", 29.0, 36.0),
    ("Youth", "predictor", "appearance", "none", 11.0, 18.0),
    ("Golden_Triangle", "predictor", "appearance", "none", 58.2, 80.8),
    ("Num_Pul", "predictor", "voice", "log", 410.0, 2052.0),
    ("Num_P", "predictor", "voice", "log", 391.0, 2011.0),
    ("Mean_P", "predictor", "voice", "none", 0.003, 0.0078),
    ("SD_P", "predictor", "voice", "none", 0.00063, 0.0027),
    ("Bw_1", "predictor", "voice", "log", 8.24, 3522.1),
    ("Bw_2", "predictor", "voice", "log", 13.98, 1822.55),
    ("Bw_3", "predictor", "voice", "log", 46.8, 4717.9),
    ("Bw_4", "predictor", "voice", "log", 68.58, 3968.12),
    ("Mean_I", "predictor", "voice", "none", 58.55, 77.64),
    ("Min_I", "predictor", "voice", "none", 29.4, 51.86),
    ("Max_I", "predictor", "voice", "none", 70.72, 87.18),
    ("Service", "predictor", "misc", "none", 4.5, 4.9),
    ("Logistics", "predictor", "misc", "none", 4.5, 4.9),
    ("Activeness", "predictor", "misc", "none", 0.1, 1.0),
    ("Favorite", "predictor", "misc", "log", 105.0, 36500.0),
    ("Enthusiasm", "predictor", "appearance", "none", 60.0, 95.0),
    ("Elegance", "predictor", "appearance", "none", 60.0, 95.0),
    ("Appearance", "predictor", "appearance", "none", 60.0, 95.0),
    ("Streamers", "predictor", "misc", "none", 1.0, 3.0),
    ("Female", "predictor", "misc", "log1p", 0.0, 1.0),
]


def default_schema() -> FeatureSchema:
    """Built-in 31-variable broadcast schema (30 predictors + GMV)."""
    return FeatureSchema(
        variables=tuple(VariableSpec(*row) for row in _DEFAULT_ROWS),
        target_name="GMV",
    )
