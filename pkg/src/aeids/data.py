"""Tabular flow datasets: CSV ingestion, synthetic generation, relabeling, splits.

A Dataset couples a feature matrix X with a label vector y and the schema
describing both. Labels are raw text before encoding and int64 codes after.
Datasets are immutable once constructed; every operation returns a new one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .errors import DataError
from .validation import rng_from

# Edge-IIoTset traffic classes with their published record counts.
EDGE_IIOT_CLASS_COUNTS: tuple[tuple[str, int], ...] = (
    ("Normal", 1_380_858),
    ("DDoS_UDP", 121_567),
    ("DDoS_ICMP", 67_939),
    ("SQL_injection", 50_826),
    ("DDoS_TCP", 50_062),
    ("Vulnerability", 50_026),
    ("Password", 49_933),
    ("DDoS_HTTP", 49_203),
    ("Uploading", 36_915),
    ("Backdoor", 24_026),
    ("Port_Scanning", 19_983),
    ("XSS", 15_066),
    ("Ransomware", 9_689),
    ("Fingerprinting", 853),
    ("MITM", 358),
)

NORMAL_LABEL = "Normal"
BINARY_CLASS_NAMES = ("Normal", "Attack")

FEATURE_KINDS = ("numeric", "categorical")


@dataclass(frozen=True)
class RecordSchema:
    """Column layout of a flow record file: feature names/kinds plus the label column."""

    feature_names: tuple[str, ...]
    feature_kinds: tuple[str, ...]
    label_column: str

    def __post_init__(self):
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "feature_kinds", tuple(self.feature_kinds))
        if len(set(self.feature_names)) != len(self.feature_names):
            raise ValueError("feature names must be unique")
        if len(self.feature_kinds) != len(self.feature_names):
            raise ValueError("feature_kinds must match feature_names in length")
        for kind in self.feature_kinds:
            if kind not in FEATURE_KINDS:
                raise ValueError(f"unknown feature kind {kind!r}")
        if self.label_column in self.feature_names:
            raise ValueError("label column must not be a feature column")

    @classmethod
    def numeric(cls, feature_names, label_column: str = "label") -> "RecordSchema":
        names = tuple(feature_names)
        return cls(names, ("numeric",) * len(names), label_column)

    @property
    def n_features(self) -> int:
        return len(self.feature_names)


@dataclass(frozen=True)
class Dataset:
    """Immutable (schema, X, y) triple flowing through the pipeline."""

    schema: RecordSchema
    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        if X.ndim != 2:
            raise ValueError("X must be 2-D")
        if X.shape[1] != self.schema.n_features:
            raise ValueError(
                f"X has {X.shape[1]} columns but schema lists {self.schema.n_features}"
            )
        if X.size and not np.isfinite(X).all():
            raise DataError("X contains NaN or Inf values")
        y = np.asarray(self.y)
        if y.ndim != 1 or len(y) != X.shape[0]:
            raise ValueError("y must be 1-D with one entry per row of X")
        if y.dtype.kind in "iu":
            y = y.astype(np.int64, copy=False)
        elif y.dtype.kind in "OUS":
            y = y.astype(str)
        else:
            raise ValueError("y must hold text labels or integer codes")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def label_kind(self) -> str:
        """'text' before label encoding, 'encoded' after."""
        return "encoded" if self.y.dtype.kind in "iu" else "text"

    def select(self, row_indices) -> "Dataset":
        idx = np.asarray(row_indices, dtype=np.int64)
        return Dataset(self.schema, self.X[idx], self.y[idx])

    def replace(self, X=None, y=None, schema=None) -> "Dataset":
        return Dataset(
            self.schema if schema is None else schema,
            self.X if X is None else X,
            self.y if y is None else y,
        )


@dataclass(frozen=True)
class ClassCatalog:
    """Ordered class names with record counts and derived proportions."""

    names: tuple[str, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        if len(self.names) != len(self.counts):
            raise ValueError("names and counts must have the same length")
        if len(set(self.names)) != len(self.names):
            raise ValueError("class names must be unique")
        if any(c < 0 for c in self.counts):
            raise ValueError("class counts must be nonnegative")
        if self.total == 0:
            raise ValueError("catalog must contain at least one record")

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def proportions(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=np.float64) / self.total

    @property
    def n_classes(self) -> int:
        return len(self.names)

    def nonzero_names(self) -> tuple[str, ...]:
        return tuple(n for n, c in zip(self.names, self.counts) if c > 0)

    @classmethod
    def from_labels(cls, y) -> "ClassCatalog":
        y = np.asarray(y).astype(str)
        names, counts = np.unique(y, return_counts=True)
        return cls(tuple(names), tuple(int(c) for c in counts))

    @classmethod
    def from_file(cls, path) -> "ClassCatalog":
        names, counts = [], []
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split(",")
                if len(parts) != 2:
                    raise DataError(
                        f"{path}: line {lineno}: expected 'name,count', got {line!r}"
                    )
                name, count = parts[0].strip(), parts[1].strip()
                try:
                    counts.append(int(count))
                except ValueError:
                    raise DataError(
                        f"{path}: line {lineno}: count {count!r} is not an integer"
                    ) from None
                names.append(name)
        if not names:
            raise DataError(f"{path}: catalog file is empty")
        return cls(tuple(names), tuple(counts))

    def to_file(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for name, count in zip(self.names, self.counts):
                fh.write(f"{name},{count}\n")


EDGE_IIOT_CATALOG = ClassCatalog(
    tuple(n for n, _ in EDGE_IIOT_CLASS_COUNTS),
    tuple(c for _, c in EDGE_IIOT_CLASS_COUNTS),
)


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for a synthetic stand-in dataset: Gaussian cluster per class."""

    n_rows: int
    n_features: int = 24
    catalog: ClassCatalog = field(default_factory=lambda: EDGE_IIOT_CATALOG)
    separation: float = 10.0
    noise_sigma: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.n_rows < 1:
            raise ValueError("n_rows must be positive")
        if self.n_features < 2:
            raise ValueError("n_features must be at least 2")
        if self.separation < 0:
            raise ValueError("separation must be nonnegative")
        if self.noise_sigma <= 0:
            raise ValueError("noise_sigma must be positive")


def largest_remainder(total: int, proportions) -> np.ndarray:
    """Integer allocation of `total` by `proportions` with exact sum.

    Floors the exact shares, then hands the remaining units to the largest
    fractional parts; ties break toward the lower index.
    """
    p = np.asarray(proportions, dtype=np.float64)
    if total < 0:
        raise ValueError("total must be nonnegative")
    if p.ndim != 1 or p.size == 0 or (p < 0).any():
        raise ValueError("proportions must be a nonnegative 1-D vector")
    exact = p * (total / p.sum()) if p.sum() > 0 else np.zeros_like(p)
    counts = np.floor(exact).astype(np.int64)
    remainder = total - int(counts.sum())
    if remainder > 0:
        order = np.argsort(-(exact - counts), kind="stable")
        counts[order[:remainder]] += 1
    return counts


def synth_generate(spec: SynthSpec) -> Dataset:
    """Draw one isotropic Gaussian cluster per catalog class.

    Cluster centers are uniform in [0, separation]^d, deterministically from
    the seed, so raw features land near [0, 1] at separation 1 and are only
    brought back to [0, 1] by the scaler at larger separations.
    """
    catalog = spec.catalog
    counts = largest_remainder(spec.n_rows, catalog.proportions)
    n_nonzero = sum(1 for c in catalog.counts if c > 0)
    if spec.n_rows < n_nonzero:
        raise ValueError(
            f"n_rows={spec.n_rows} is smaller than the {n_nonzero} classes "
            "with nonzero proportion"
        )
    rng = rng_from(spec.seed)
    centers = spec.separation * rng.random((catalog.n_classes, spec.n_features))
    blocks, labels = [], []
    for k, n_k in enumerate(counts):
        if n_k == 0:
            continue
        blocks.append(centers[k] + rng.normal(0.0, spec.noise_sigma, (n_k, spec.n_features)))
        labels.extend([catalog.names[k]] * n_k)
    X = np.vstack(blocks)
    y = np.asarray(labels)
    perm = rng.permutation(spec.n_rows)
    schema = RecordSchema.numeric(
        [f"f{i:02d}" for i in range(spec.n_features)], label_column="label"
    )
    return Dataset(schema, X[perm], y[perm])


def _first_bad_cell(column: pd.Series, coerced: pd.Series) -> tuple[int, str]:
    bad = coerced.isna() & column.notna()
    pos = int(np.flatnonzero(bad.to_numpy())[0])
    return pos, str(column.iloc[pos])


def load_csv(path, schema: RecordSchema) -> Dataset:
    """Read a header-first CSV into a Dataset, validating every numeric cell.

    Error locations use 1-based CSV line numbers (the header is line 1).
    """
    try:
        df = pd.read_csv(path)
    except FileNotFoundError:
        raise DataError(f"{path}: file not found") from None
    except pd.errors.EmptyDataError:
        raise DataError(f"{path}: empty file") from None
    expected = set(schema.feature_names) | {schema.label_column}
    present = set(df.columns)
    missing = sorted(expected - present)
    unexpected = sorted(present - expected)
    if missing:
        raise DataError(f"{path}: missing column(s): {', '.join(missing)}")
    if unexpected:
        raise DataError(f"{path}: unexpected column(s): {', '.join(unexpected)}")
    if len(df) == 0:
        raise DataError(f"{path}: no data rows")

    columns = []
    for name, kind in zip(schema.feature_names, schema.feature_kinds):
        col = df[name]
        if kind == "categorical":
            values = col.astype(str).to_numpy()
            classes = np.unique(values)
            codes = {c: i for i, c in enumerate(classes)}
            columns.append(np.asarray([codes[v] for v in values], dtype=np.float64))
            continue
        if col.dtype.kind in "iuf":
            coerced = col.astype(np.float64)
        else:
            coerced = pd.to_numeric(col, errors="coerce")
            if (coerced.isna() & col.notna()).any():
                pos, value = _first_bad_cell(col, coerced)
                raise DataError(
                    f"{path}: column {name!r}, line {pos + 2}: "
                    f"cannot parse {value!r} as a number"
                )
        values = coerced.to_numpy(dtype=np.float64)
        if np.isnan(values).any():
            pos = int(np.flatnonzero(np.isnan(values))[0])
            raise DataError(f"{path}: column {name!r}, line {pos + 2}: missing value")
        if not np.isfinite(values).all():
            pos = int(np.flatnonzero(~np.isfinite(values))[0])
            raise DataError(f"{path}: column {name!r}, line {pos + 2}: non-finite value")
        columns.append(values)

    X = np.column_stack(columns) if columns else np.empty((len(df), 0))
    y = df[schema.label_column].astype(str).to_numpy()
    return Dataset(schema, X, y)


def infer_schema(path, label_column: str, sniff_rows: int = 1000) -> RecordSchema:
    """Build a schema from a CSV header, sniffing numeric vs categorical kinds."""
    try:
        head = pd.read_csv(path, nrows=sniff_rows)
    except FileNotFoundError:
        raise DataError(f"{path}: file not found") from None
    except pd.errors.EmptyDataError:
        raise DataError(f"{path}: empty file") from None
    if label_column not in head.columns:
        raise DataError(f"{path}: missing column(s): {label_column}")
    names, kinds = [], []
    for name in head.columns:
        if name == label_column:
            continue
        names.append(name)
        if head[name].dtype.kind in "iuf":
            kinds.append("numeric")
        else:
            coerced = pd.to_numeric(head[name], errors="coerce")
            kinds.append("numeric" if not (coerced.isna() & head[name].notna()).any()
                         else "categorical")
    return RecordSchema(tuple(names), tuple(kinds), label_column)


def write_csv(ds: Dataset, path) -> None:
    """Write a Dataset back out in the load_csv column order."""
    df = pd.DataFrame(ds.X, columns=list(ds.schema.feature_names))
    df[ds.schema.label_column] = ds.y
    df.to_csv(path, index=False)


def to_binary(ds: Dataset, normal_label: str = NORMAL_LABEL, universe=None) -> Dataset:
    """Relabel text classes to Normal=0 / Attack=1, preserving rows and X."""
    if ds.label_kind != "text":
        raise DataError("binary relabeling expects text labels, got encoded codes")
    valid = set(EDGE_IIOT_CATALOG.names if universe is None else universe)
    valid.add(normal_label)
    present = set(np.unique(ds.y))
    unknown = sorted(present - valid)
    if unknown:
        raise DataError(f"unknown label value(s): {', '.join(unknown)}")
    y_bin = (ds.y != normal_label).astype(np.int64)
    return ds.replace(y=y_bin)


def stratified_split(ds: Dataset, ratios, seed: int) -> tuple[Dataset, Dataset, Dataset]:
    """Split into (train, val, test) per class with largest-remainder rounding.

    Each class's rows are shuffled by a seed-derived generator and dealt out
    so that every split's class count is within one row of the exact share.
    A nonempty class always contributes at least one row to train.
    """
    ratios = np.asarray(ratios, dtype=np.float64)
    if ratios.shape != (3,) or (ratios <= 0).any():
        raise ValueError("ratios must be three positive numbers")
    if abs(ratios.sum() - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1, got {ratios.sum()!r}")
    rng = rng_from(seed)
    parts: list[list[np.ndarray]] = [[], [], []]
    for value in np.unique(ds.y):
        idx = np.flatnonzero(ds.y == value)
        idx = idx[rng.permutation(len(idx))]
        counts = largest_remainder(len(idx), ratios)
        if counts[0] == 0 and len(idx) > 0:
            donor = int(np.argmax(counts))
            counts[donor] -= 1
            counts[0] += 1
        bounds = np.cumsum(counts)
        parts[0].append(idx[: bounds[0]])
        parts[1].append(idx[bounds[0]: bounds[1]])
        parts[2].append(idx[bounds[1]: bounds[2]])
    splits = []
    for chunks in parts:
        idx = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)
        idx = idx[rng.permutation(len(idx))]
        splits.append(ds.select(idx))
    return splits[0], splits[1], splits[2]
