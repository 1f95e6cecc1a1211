"""Dataset container, CSV ingestion, validation, transforms and splits."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import (
    ArgumentError,
    DomainError,
    EmptyInputError,
    ParseError,
    SchemaError,
    ValidationError,
)
from .schema import FeatureSchema


@dataclass(frozen=True)
class Dataset:
    """Immutable feature matrix + target vector bound to a schema.

    ``features`` columns follow ``schema.predictors`` order. ``transformed``
    records whether per-variable transforms (and the natural log of the
    target) have been applied.
    """

    schema: FeatureSchema
    features: np.ndarray
    target: np.ndarray
    row_ids: tuple[str, ...]
    transformed: bool = False

    def __post_init__(self):
        X = np.asarray(self.features, dtype=float)
        y = np.asarray(self.target, dtype=float)
        if X.ndim != 2:
            raise ArgumentError("features must be a 2-D matrix")
        if X.shape[0] < 1:
            raise ArgumentError("dataset must contain at least one row")
        if X.shape[1] != len(self.schema.predictors):
            raise SchemaError(
                f"feature matrix has {X.shape[1]} columns, schema declares "
                f"{len(self.schema.predictors)} predictors"
            )
        if y.shape != (X.shape[0],):
            raise ArgumentError("target length must equal the number of rows")
        if len(self.row_ids) != X.shape[0]:
            raise ArgumentError("row_ids length must equal the number of rows")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "target", y)
        object.__setattr__(self, "row_ids", tuple(self.row_ids))

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def p(self) -> int:
        return self.features.shape[1]

    def column(self, name: str) -> np.ndarray:
        return self.features[:, self.schema.predictor_index(name)]

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx, dtype=int)
        return Dataset(
            schema=self.schema,
            features=self.features[idx],
            target=self.target[idx],
            row_ids=tuple(self.row_ids[i] for i in idx),
            transformed=self.transformed,
        )


@dataclass(frozen=True)
class BoundViolation:
    variable: str
    row: int
    value: float
    lower_bound: float
    upper_bound: float


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[BoundViolation, ...]
    nan_rows: tuple[tuple[str, int], ...]  # (variable, row)

    @property
    def clean(self) -> bool:
        return not self.violations and not self.nan_rows


def load_csv(path: str | Path, schema: FeatureSchema | None = None) -> Dataset:
    """Read a comma-separated broadcast table into a raw (untransformed) Dataset.

    Columns are matched by name and reordered to schema order. Raises
    ``SchemaError`` for missing/extra columns, ``ParseError`` for non-numeric
    cells (with 1-based data row numbers) and ``EmptyInputError`` for files
    without data rows.
    """
    if schema is None:
        from .schema import default_schema

        schema = default_schema()
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyInputError(f"{path}: file is empty")
        header = [h.strip() for h in header]
        expected = set(schema.names)
        got = set(header)
        missing = sorted(expected - got)
        extra = sorted(got - expected)
        if missing or extra:
            parts = []
            if missing:
                parts.append(f"missing columns: {missing}")
            if extra:
                parts.append(f"unexpected columns: {extra}")
            raise SchemaError(f"{path}: " + "; ".join(parts))
        col_of = {name: header.index(name) for name in schema.names}
        rows = []
        for r, record in enumerate(reader, start=1):
            if not record or all(not c.strip() for c in record):
                continue
            if len(record) != len(header):
                raise ParseError(
                    f"{path}: row {r} has {len(record)} cells, expected {len(header)}",
                    row=r,
                )
            parsed = []
            for name in schema.names:
                cell = record[col_of[name]].strip()
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise ParseError(
                        f"{path}: cannot parse {cell!r} at row {r}, column {name}",
                        row=r,
                        column=name,
                    )
            rows.append(parsed)
    if not rows:
        raise EmptyInputError(f"{path}: no data rows")
    table = np.asarray(rows, dtype=float)
    target_col = schema.names.index(schema.target_name)
    predictor_cols = [schema.names.index(v.name) for v in schema.predictors]
    return Dataset(
        schema=schema,
        features=table[:, predictor_cols],
        target=table[:, target_col],
        row_ids=tuple(f"row-{i}" for i in range(table.shape[0])),
        transformed=False,
    )


def validate(ds: Dataset, strict: bool = False) -> ValidationReport:
    """Check every variable against its schema bounds and for non-finite cells.

    Bounds are advisory by default; with ``strict=True`` any violation raises
    ``ValidationError``. Only raw (untransformed) datasets are checked against
    the schema bounds.
    """
    violations: list[BoundViolation] = []
    nan_rows: list[tuple[str, int]] = []
    columns = [(v, ds.column(v.name)) for v in ds.schema.predictors]
    columns.append((ds.schema.target, ds.target))
    for spec, col in columns:
        bad = ~np.isfinite(col)
        for r in np.flatnonzero(bad):
            nan_rows.append((spec.name, int(r)))
        if not ds.transformed:
            out = np.flatnonzero(
                np.isfinite(col) & ((col < spec.lower_bound) | (col > spec.upper_bound))
            )
            for r in out:
                violations.append(
                    BoundViolation(
                        variable=spec.name,
                        row=int(r),
                        value=float(col[r]),
                        lower_bound=spec.lower_bound,
                        upper_bound=spec.upper_bound,
                    )
                )
    report = ValidationReport(violations=tuple(violations), nan_rows=tuple(nan_rows))
    if strict and not report.clean:
        raise ValidationError(
            f"validation failed: {len(report.violations)} bound violation(s), "
            f"{len(report.nan_rows)} non-finite cell(s)"
        )
    return report


def transform(ds: Dataset) -> Dataset:
    """Apply per-variable transforms; the target is always natural-logged."""
    if ds.transformed:
        raise ArgumentError("dataset is already transformed")
    X = ds.features.copy()
    for i, spec in enumerate(ds.schema.predictors):
        if spec.transform == "log":
            bad = np.flatnonzero(X[:, i] <= 0)
            if bad.size:
                raise DomainError(
                    f"log of non-positive value at row {int(bad[0])}, "
                    f"variable {spec.name}"
                )
            X[:, i] = np.log(X[:, i])
        elif spec.transform == "log1p":
            bad = np.flatnonzero(X[:, i] < 0)
            if bad.size:
                raise DomainError(
                    f"log1p of negative value at row {int(bad[0])}, "
                    f"variable {spec.name}"
                )
            X[:, i] = np.log1p(X[:, i])
    bad = np.flatnonzero(ds.target <= 0)
    if bad.size:
        raise DomainError(
            f"log of non-positive value at row {int(bad[0])}, "
            f"variable {ds.schema.target_name}"
        )
    y = np.log(ds.target)
    return Dataset(
        schema=ds.schema, features=X, target=y, row_ids=ds.row_ids, transformed=True
    )


def inverse_transform(ds: Dataset) -> Dataset:
    """Undo :func:`transform`; exact to floating-point round-off."""
    if not ds.transformed:
        raise ArgumentError("dataset is not transformed")
    X = ds.features.copy()
    for i, spec in enumerate(ds.schema.predictors):
        if spec.transform == "log":
            X[:, i] = np.exp(X[:, i])
        elif spec.transform == "log1p":
            X[:, i] = np.expm1(X[:, i])
    y = np.exp(ds.target)
    return Dataset(
        schema=ds.schema, features=X, target=y, row_ids=ds.row_ids, transformed=False
    )


def correlation_matrix(ds: Dataset) -> np.ndarray:
    """Pearson correlation of the predictor columns (symmetric, unit diagonal)."""
    if ds.n < 2:
        raise ArgumentError("correlation requires at least 2 rows")
    X = ds.features
    stds = X.std(axis=0)
    zero = np.flatnonzero(stds == 0)
    if zero.size:
        name = ds.schema.predictors[int(zero[0])].name
        raise DomainError(f"zero-variance column: {name}")
    M = np.corrcoef(X, rowvar=False)
    M = np.clip((M + M.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(M, 1.0)
    return M


@dataclass(frozen=True)
class FoldPlan:
    """Disjoint index sets covering 0..n-1, sizes differing by at most 1."""

    k: int
    folds: tuple[np.ndarray, ...]
    seed: int

    @property
    def n(self) -> int:
        return sum(len(f) for f in self.folds)

    def train_test(self, fold: int) -> tuple[np.ndarray, np.ndarray]:
        test = self.folds[fold]
        train = np.concatenate([f for i, f in enumerate(self.folds) if i != fold])
        return np.sort(train), test


def make_folds(n: int, k: int, seed: int) -> FoldPlan:
    """Seeded uniform shuffle, then contiguous chunking into k folds."""
    if k < 2 or k > n:
        raise ArgumentError(f"need 2 <= k <= n, got k={k}, n={n}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    folds = []
    base, rem = divmod(n, k)
    start = 0
    for i in range(k):
        size = base + (1 if i < rem else 0)
        chunk = np.sort(perm[start : start + size])
        chunk.setflags(write=False)
        folds.append(chunk)
        start += size
    return FoldPlan(k=k, folds=tuple(folds), seed=seed)


@dataclass(frozen=True)
class GroupSplit:
    """Rows partitioned by the Female proportion relative to a threshold."""

    female_idx: np.ndarray
    male_idx: np.ndarray
    excluded_idx: np.ndarray
    threshold: float = 0.5


def split_by_gender(ds: Dataset, threshold: float = 0.5) -> GroupSplit:
    """Partition rows into female-dominated / male-dominated / exactly-at-threshold."""
    if "Female" not in ds.schema:
        raise SchemaError("dataset schema has no Female column")
    col = ds.column("Female")
    if ds.transformed:
        # Female is stored as log1p after transform; compare on the raw scale.
        col = np.expm1(col)
    female = np.flatnonzero(col > threshold)
    male = np.flatnonzero(col < threshold)
    excluded = np.flatnonzero(col == threshold)
    for a in (female, male, excluded):
        a.setflags(write=False)
    return GroupSplit(
        female_idx=female, male_idx=male, excluded_idx=excluded, threshold=threshold
    )


def write_csv(ds: Dataset, path: str | Path) -> None:
    """Write a dataset back to CSV in schema column order (raw or transformed as-is)."""
    path = Path(path)
    names = ds.schema.names
    target_name = ds.schema.target_name
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        pred_names = ds.schema.predictor_names
        for i in range(ds.n):
            row = []
            for name in names:
                if name == target_name:
                    row.append(repr(float(ds.target[i])))
                else:
                    row.append(repr(float(ds.features[i, pred_names.index(name)])))
            writer.writerow(row)
