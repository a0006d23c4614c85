"""Preprocessing chain: constant/correlation filtering, [0, 1] scaling, label
encoding, and inverse-frequency class weights.

Fitted state is immutable after fit(); transform() is pure and may be applied
to row blocks concurrently.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .data import Dataset, RecordSchema
from .errors import DataError
from .validation import as_float_matrix, check_feature_count, check_fitted


class CorrelationFilter(BaseEstimator, TransformerMixin):
    """Drop zero-variance columns, then the later column of every pair whose
    absolute Pearson correlation exceeds the threshold.

    Pair scanning runs over (i, j) with i < j in schema order; column j is
    dropped as soon as any earlier column correlates with it, and the lowest
    such partner is recorded alongside the correlation value.
    """

    def __init__(self, corr_threshold: float = 0.6):
        self.corr_threshold = corr_threshold

    def fit(self, X, y=None, feature_names=None):
        X = as_float_matrix(X)
        if X.shape[0] == 0:
            raise ValueError("cannot fit filter on an empty dataset")
        n_features = X.shape[1]
        if feature_names is None:
            feature_names = tuple(f"x{i}" for i in range(n_features))
        else:
            feature_names = tuple(feature_names)
            if len(feature_names) != n_features:
                raise ValueError("feature_names length must match X columns")

        constant = [j for j in range(n_features) if np.all(X[:, j] == X[0, j])]
        live = [j for j in range(n_features) if j not in set(constant)]

        dropped_corr: dict[int, tuple[str, float]] = {}
        if len(live) >= 2:
            # Two-pass (mean-subtracted) Pearson in double precision.
            corr = np.corrcoef(X[:, live], rowvar=False)
            for a in range(len(live)):
                for b in range(a + 1, len(live)):
                    j = live[b]
                    if j in dropped_corr:
                        continue
                    r = corr[a, b]
                    if abs(r) > self.corr_threshold:
                        dropped_corr[j] = (feature_names[live[a]], float(r))

        self.n_features_in_ = n_features
        self.feature_names_in_ = feature_names
        self.dropped_constant_ = tuple(feature_names[j] for j in constant)
        self.dropped_correlated_ = tuple(
            (feature_names[j], partner, r)
            for j, (partner, r) in sorted(dropped_corr.items())
        )
        removed = set(constant) | set(dropped_corr)
        self.kept_indices_ = tuple(j for j in range(n_features) if j not in removed)
        self.kept_columns_ = tuple(feature_names[j] for j in self.kept_indices_)
        return self

    def transform(self, X):
        check_fitted(self, "kept_indices_")
        X = as_float_matrix(X)
        check_feature_count(X, self.n_features_in_)
        if not self.kept_indices_:
            raise DataError("filter removed every column; nothing left to transform")
        return X[:, self.kept_indices_]


class UnitRangeScaler(BaseEstimator, TransformerMixin):
    """Min-max scaling to [0, 1] on the fitted data.

    Out-of-range values seen later are NOT clipped; values below the training
    minimum map below 0 and values above the maximum map above 1, keeping
    anomalous magnitudes visible.
    """

    def fit(self, X, y=None):
        X = as_float_matrix(X)
        if X.shape[0] == 0:
            raise ValueError("cannot fit scaler on an empty dataset")
        self.data_min_ = X.min(axis=0)
        self.data_max_ = X.max(axis=0)
        flat = np.flatnonzero(self.data_max_ == self.data_min_)
        if flat.size:
            raise ValueError(
                f"column {int(flat[0])} has max == min; "
                "constant columns must be filtered before scaling"
            )
        self.range_ = self.data_max_ - self.data_min_
        return self

    def transform(self, X):
        check_fitted(self, "range_")
        X = as_float_matrix(X)
        check_feature_count(X, len(self.range_))
        return (X - self.data_min_) / self.range_

    def inverse_transform(self, X):
        check_fitted(self, "range_")
        X = as_float_matrix(X)
        check_feature_count(X, len(self.range_))
        return X * self.range_ + self.data_min_


class LabelCodec(BaseEstimator, TransformerMixin):
    """Bijective class-name <-> code map; codes follow sorted-name order."""

    def fit(self, y):
        y = np.asarray(y).astype(str)
        if y.size == 0:
            raise ValueError("cannot fit label codec on empty labels")
        self.classes_ = tuple(sorted(np.unique(y)))
        self._codes = {name: i for i, name in enumerate(self.classes_)}
        return self

    def transform(self, y) -> np.ndarray:
        check_fitted(self, "classes_")
        y = np.asarray(y).astype(str)
        out = np.empty(len(y), dtype=np.int64)
        for i, value in enumerate(y):
            code = self._codes.get(value)
            if code is None:
                raise DataError(f"unseen label value: {value!r}")
            out[i] = code
        return out

    def inverse_transform(self, codes) -> np.ndarray:
        check_fitted(self, "classes_")
        codes = np.asarray(codes, dtype=np.int64)
        if codes.size and (codes.min() < 0 or codes.max() >= len(self.classes_)):
            raise ValueError("code out of range")
        names = np.asarray(self.classes_)
        return names[codes]

    @property
    def n_classes(self) -> int:
        check_fitted(self, "classes_")
        return len(self.classes_)


def class_weights(y, n_classes: int) -> np.ndarray:
    """Balanced inverse-frequency weights w_c = N / (K * n_c).

    The weighted mean over the fitted labels is exactly 1, so the weighted
    reconstruction loss stays on the unweighted scale.
    """
    y = np.asarray(y, dtype=np.int64)
    if n_classes < 1:
        raise ValueError("n_classes must be positive")
    if y.size == 0:
        raise ValueError("cannot derive class weights from empty labels")
    if y.min() < 0 or y.max() >= n_classes:
        raise ValueError("label code out of range")
    counts = np.bincount(y, minlength=n_classes)
    absent = np.flatnonzero(counts == 0)
    if absent.size:
        raise ValueError(
            f"class {int(absent[0])} has no rows; its weight is undefined"
        )
    return len(y) / (n_classes * counts.astype(np.float64))


class Preprocessor(BaseEstimator):
    """Dataset-level composite: filter -> scaler -> label codec.

    Fits on a training Dataset and replays the exact same drops, scaling, and
    encoding on any dataset whose columns are a superset of the fitted ones.
    Already-encoded labels (e.g. after binary relabeling) pass through.
    """

    def __init__(self, corr_threshold: float = 0.6):
        self.corr_threshold = corr_threshold

    def fit(self, ds: Dataset):
        self.filter_ = CorrelationFilter(self.corr_threshold).fit(
            ds.X, feature_names=ds.schema.feature_names
        )
        if not self.filter_.kept_indices_:
            raise DataError("filtering removed every feature column")
        self.scaler_ = UnitRangeScaler().fit(self.filter_.transform(ds.X))
        if ds.label_kind == "text":
            self.codec_ = LabelCodec().fit(ds.y)
        else:
            self.codec_ = None
        self.schema_in_ = ds.schema
        self.output_schema_ = RecordSchema(
            self.filter_.kept_columns_,
            tuple(
                ds.schema.feature_kinds[ds.schema.feature_names.index(name)]
                for name in self.filter_.kept_columns_
            ),
            ds.schema.label_column,
        )
        return self

    @property
    def output_width(self) -> int:
        check_fitted(self, "scaler_")
        return len(self.scaler_.range_)

    @property
    def class_names(self):
        check_fitted(self, "scaler_")
        return self.codec_.classes_ if self.codec_ is not None else None

    def _reorder(self, ds: Dataset) -> np.ndarray:
        """Select the fitted columns, by name, from a superset dataset."""
        if ds.schema.feature_names == self.schema_in_.feature_names:
            return ds.X
        positions = {name: i for i, name in enumerate(ds.schema.feature_names)}
        cols = []
        for name in self.schema_in_.feature_names:
            if name not in positions:
                raise DataError(f"missing column: {name!r}")
            cols.append(positions[name])
        return ds.X[:, cols]

    def transform(self, ds: Dataset) -> Dataset:
        check_fitted(self, "scaler_")
        X = self.scaler_.transform(self.filter_.transform(self._reorder(ds)))
        if ds.label_kind == "text":
            if self.codec_ is None:
                raise DataError(
                    "preprocessor was fitted on encoded labels but received text labels"
                )
            y = self.codec_.transform(ds.y)
        else:
            y = ds.y
        return Dataset(self.output_schema_, X, y)

    def transform_row(self, x_raw: np.ndarray) -> np.ndarray:
        """Single-row fast path; assumes the fitted column order."""
        kept = x_raw[list(self.filter_.kept_indices_)]
        return (kept - self.scaler_.data_min_) / self.scaler_.range_
