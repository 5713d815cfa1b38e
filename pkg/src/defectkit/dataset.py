"""Labeled feature datasets and per-fold standardization."""

from dataclasses import dataclass, field
from typing import List

import numpy as np

from .errors import EmptyDatasetError


@dataclass
class Dataset:
    """Feature matrix (n x p) with binary labels (0 = clean, 1 = defect)."""

    features: np.ndarray
    labels: np.ndarray
    ids: List[str] = field(default_factory=list)

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2:
            raise ValueError("features must be a 2D matrix")
        if self.features.shape[0] == 0:
            raise EmptyDatasetError("dataset has no samples")
        if self.labels.shape != (self.features.shape[0],):
            raise ValueError("labels length must match the number of rows")
        if not np.isin(self.labels, (0, 1)).all():
            raise ValueError("labels must be 0 or 1")
        if not self.ids:
            self.ids = [str(i) for i in range(self.features.shape[0])]
        elif len(self.ids) != self.features.shape[0]:
            raise ValueError("ids length must match the number of rows")

    @property
    def n_samples(self):
        return self.features.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]

    def subset(self, indices):
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(
            self.features[idx],
            self.labels[idx],
            [self.ids[i] for i in idx],
        )


class Standardizer:
    """Column z-scoring with statistics frozen at fit time.

    Constant columns get unit scale so they map to zero instead of NaN.
    """

    def __init__(self, mean, scale):
        self.mean = np.asarray(mean, dtype=np.float64)
        self.scale = np.asarray(scale, dtype=np.float64)

    @classmethod
    def fit(cls, X):
        X = np.asarray(X, dtype=np.float64)
        mean = X.mean(axis=0)
        scale = X.std(axis=0)
        scale[scale == 0.0] = 1.0
        return cls(mean, scale)

    def transform(self, X):
        return (np.asarray(X, dtype=np.float64) - self.mean) / self.scale
