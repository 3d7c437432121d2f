"""scikit-learn compatible wrappers around the functional core.

The three feature extractors are stateless transformers, the edge-based
category classifier is a fit/predict estimator, and ImageRetriever wraps a
whole index behind fit/query. All accept images as RasterImage instances,
paths, encoded bytes, or uint8 arrays.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.exceptions import NotFittedError

from . import edges, eigen, matchpoint
from .engine import SCOPE_AUTO, Technique, QueryResult, query
from .histogram import HsvQuantization, compute_histogram
from .imaging import resize_bilinear, to_grayscale
from .store import (
    CLASSIFY_SIZE,
    IndexConfig,
    IndexFile,
    build_index,
    extract_edge_signature,
    load_index,
    save_index,
)
from .validation import as_image_list, as_raster_image


class ColorHistogramExtractor(TransformerMixin, BaseEstimator):
    """Transform images into normalized HSV color histograms.

    Parameters
    ----------
    bins_h, bins_s, bins_v : int
        Uniform quantization bin counts per HSV channel; the output has
        bins_h * bins_s * bins_v columns.
    """

    def __init__(self, bins_h=8, bins_s=4, bins_v=4):
        self.bins_h = bins_h
        self.bins_s = bins_s
        self.bins_v = bins_v

    def fit(self, X, y=None):
        return self

    def transform(self, X) -> np.ndarray:
        q = HsvQuantization(self.bins_h, self.bins_s, self.bins_v)
        return np.vstack(
            [compute_histogram(img, q).values for img in as_image_list(X)]
        )


class SpectralSignatureExtractor(TransformerMixin, BaseEstimator):
    """Transform images into eigenvalue-spectrum signatures.

    Parameters
    ----------
    side : int
        Images are resized to side x side before the Gram matrix is formed.
    top_k : int
        Number of leading eigenvalues kept per image (output columns).
    """

    def __init__(self, side=eigen.DEFAULT_SIDE, top_k=eigen.DEFAULT_TOP_K):
        self.side = side
        self.top_k = top_k

    def fit(self, X, y=None):
        return self

    def transform(self, X) -> np.ndarray:
        return np.vstack(
            [
                eigen.spectral_signature(img, side=self.side, k=self.top_k).values
                for img in as_image_list(X)
            ]
        )


class MatchPointExtractor(TransformerMixin, BaseEstimator):
    """Transform images into corner-descriptor FeatureSets.

    Output is a list of FeatureSet (descriptor counts vary per image), so
    this composes with the match_features / match_score functions rather
    than with array-based estimators.
    """

    def __init__(
        self,
        harris_k=matchpoint.DEFAULT_HARRIS_K,
        window=matchpoint.DEFAULT_WINDOW,
        rel_threshold=matchpoint.DEFAULT_REL_THRESHOLD,
        nms_radius=matchpoint.DEFAULT_NMS_RADIUS,
        patch=matchpoint.DEFAULT_PATCH,
    ):
        self.harris_k = harris_k
        self.window = window
        self.rel_threshold = rel_threshold
        self.nms_radius = nms_radius
        self.patch = patch

    def fit(self, X, y=None):
        return self

    def transform(self, X) -> list[matchpoint.FeatureSet]:
        out = []
        for img in as_image_list(X):
            gray = to_grayscale(img)
            corners = matchpoint.harris_corners(
                gray,
                k=self.harris_k,
                window=self.window,
                rel_threshold=self.rel_threshold,
                nms_radius=self.nms_radius,
            )
            out.append(matchpoint.extract_descriptors(gray, corners, patch=self.patch))
        return out


class EdgeCategoryClassifier(ClassifierMixin, BaseEstimator):
    """Nearest-centroid classifier over edge orientation/density signatures.

    Parameters
    ----------
    mag_threshold : float
        Sobel magnitude above which a pixel counts as an edge pixel.
    classify_size : int
        Images are resized to this square grayscale size before edge
        extraction so signatures are comparable across resolutions.
    """

    def __init__(self, mag_threshold=edges.DEFAULT_MAG_THRESHOLD, classify_size=CLASSIFY_SIZE):
        self.mag_threshold = mag_threshold
        self.classify_size = classify_size

    def _signature(self, img) -> edges.EdgeSignature:
        gray = resize_bilinear(to_grayscale(img), self.classify_size, self.classify_size)
        return edges.edge_signature(edges.sobel_edges(gray), self.mag_threshold)

    def fit(self, X, y):
        images = as_image_list(X)
        labels = [str(label) for label in y]
        if len(images) != len(labels):
            raise ValueError(f"X and y disagree in length: {len(images)} vs {len(labels)}")
        signatures = [self._signature(img) for img in images]
        self.models_ = edges.train_centroids(list(zip(labels, signatures)))
        self.classes_ = np.array([m.category for m in self.models_])
        return self

    def predict(self, X) -> np.ndarray:
        self._check_fitted()
        return np.array(
            [edges.classify(self._signature(img), self.models_)[0] for img in as_image_list(X)]
        )

    def predict_margin(self, X) -> np.ndarray:
        """Gap between the second-nearest and nearest centroid distances."""
        self._check_fitted()
        return np.array(
            [edges.classify(self._signature(img), self.models_)[1] for img in as_image_list(X)]
        )

    def _check_fitted(self):
        if not hasattr(self, "models_"):
            raise NotFittedError("EdgeCategoryClassifier is not fitted; call fit first")


class ImageRetriever(BaseEstimator):
    """Category-scoped image retrieval over an indexed corpus.

    fit() ingests a directory tree with one subdirectory per category and
    builds the full index (all signatures plus category centroids); query()
    then ranks one category's records (or everything) against a query image.

    Parameters
    ----------
    technique : str or Technique
        Default ranking technique for query(): "histogram", "eigen", or
        "matchpoint".
    config : IndexConfig
        Extraction parameters frozen into the index at fit time.
    top_k : int
        Default result-list length.
    """

    def __init__(self, technique="histogram", config=IndexConfig(), top_k=10):
        self.technique = technique
        self.config = config
        self.top_k = top_k

    def fit(self, X, y=None):
        """Build the index from a corpus root directory."""
        if not isinstance(X, (str, Path)):
            raise TypeError("ImageRetriever.fit expects a corpus root directory path")
        self.index_ = build_index(X, config=self.config)
        return self

    @classmethod
    def from_index(cls, index: IndexFile | str | Path) -> "ImageRetriever":
        """Wrap an already-built (or saved) index."""
        retriever = cls()
        retriever.index_ = index if isinstance(index, IndexFile) else load_index(index)
        return retriever

    def query(self, image, technique=None, top_k=None, scope=SCOPE_AUTO) -> QueryResult:
        self._check_fitted()
        chosen = technique if technique is not None else self.technique
        if not isinstance(chosen, Technique):
            chosen = Technique(chosen)
        return query(
            self.index_,
            as_raster_image(image),
            chosen,
            top_k=top_k if top_k is not None else self.top_k,
            scope=scope,
        )

    def predict(self, X) -> np.ndarray:
        """Auto-classified category per query image."""
        self._check_fitted()
        return np.array(
            [
                edges.classify(
                    extract_edge_signature(img, self.index_.config),
                    self.index_.category_models,
                )[0]
                for img in as_image_list(X)
            ]
        )

    def save(self, path) -> None:
        self._check_fitted()
        save_index(self.index_, path)

    def _check_fitted(self):
        if not hasattr(self, "index_"):
            raise NotFittedError("ImageRetriever is not fitted; call fit or from_index first")
