"""Content-based image retrieval with edge-based category scoping.

Query images are first assigned a database category from their edge
structure, then searched only within that category's index using one of
three interchangeable similarity techniques: HSV color histograms,
eigenvalue spectra of the image Gram matrix, or Harris corner match-point
counts. A benchmark harness times the three techniques against each other.
"""

from .bench import BenchReport, BenchRow, ReportFormat, emit_report, run_benchmark
from .edges import (
    CategoryModel,
    EdgeMap,
    EdgeSignature,
    classify,
    edge_signature,
    sobel_edges,
    train_centroids,
)
from .eigen import (
    EigenResult,
    SpectralSignature,
    eigen_distance,
    gram_matrix,
    jacobi_eigh,
    spectral_signature,
    sym_eigenvalues,
)
from .engine import SCOPE_ALL, SCOPE_AUTO, QueryResult, Technique, query, rank
from .errors import CbirError
from .estimators import (
    ColorHistogramExtractor,
    EdgeCategoryClassifier,
    ImageRetriever,
    MatchPointExtractor,
    SpectralSignatureExtractor,
)
from .histogram import (
    ColorHistogram,
    HistogramMetric,
    HsvQuantization,
    compute_histogram,
    hist_distance,
    quantize_hsv,
)
from .imaging import (
    HsvPixel,
    ImageFormat,
    RasterImage,
    decode_image,
    load_image,
    resize_bilinear,
    rgb_to_hsv,
    to_grayscale,
)
from .matchpoint import (
    Corner,
    FeatureSet,
    MatchList,
    extract_descriptors,
    harris_corners,
    match_features,
    match_score,
)
from .store import (
    IndexConfig,
    IndexFile,
    IndexRecord,
    build_index,
    load_index,
    save_index,
)

__version__ = "0.1.0"

__all__ = [
    "BenchReport",
    "BenchRow",
    "CategoryModel",
    "CbirError",
    "ColorHistogram",
    "ColorHistogramExtractor",
    "Corner",
    "EdgeCategoryClassifier",
    "EdgeMap",
    "EdgeSignature",
    "EigenResult",
    "FeatureSet",
    "HistogramMetric",
    "HsvPixel",
    "HsvQuantization",
    "ImageFormat",
    "ImageRetriever",
    "IndexConfig",
    "IndexFile",
    "IndexRecord",
    "MatchList",
    "MatchPointExtractor",
    "QueryResult",
    "RasterImage",
    "ReportFormat",
    "SCOPE_ALL",
    "SCOPE_AUTO",
    "SpectralSignature",
    "SpectralSignatureExtractor",
    "Technique",
    "build_index",
    "classify",
    "compute_histogram",
    "decode_image",
    "edge_signature",
    "eigen_distance",
    "emit_report",
    "extract_descriptors",
    "gram_matrix",
    "harris_corners",
    "hist_distance",
    "jacobi_eigh",
    "load_image",
    "load_index",
    "match_features",
    "match_score",
    "quantize_hsv",
    "query",
    "rank",
    "resize_bilinear",
    "rgb_to_hsv",
    "run_benchmark",
    "save_index",
    "sobel_edges",
    "spectral_signature",
    "sym_eigenvalues",
    "to_grayscale",
    "train_centroids",
]
