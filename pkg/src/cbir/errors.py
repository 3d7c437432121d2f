"""Exception hierarchy. Every failure mode raised by this package derives
from CbirError so callers (and the CLI) can catch one root type."""


class CbirError(Exception):
    """Base class for all cbir errors."""


# --- imaging ---

class UnsupportedFormatError(CbirError):
    """Byte stream does not start with a known PNG/JPEG/BMP signature."""


class CorruptStreamError(CbirError):
    """Recognized format, but the stream failed to decode."""


class ZeroDimensionError(CbirError):
    """An image dimension of zero was supplied or decoded."""


# --- category classification ---

class ImageTooSmallError(CbirError):
    """Image is smaller than the operator's minimum support."""


class EmptyInputError(CbirError):
    """No training signatures were supplied."""


class TooFewCategoriesError(CbirError):
    """Fewer than two distinct categories present."""


class NoModelsError(CbirError):
    """classify called with an empty model sequence."""


# --- histogram ---

class LengthMismatchError(CbirError):
    """Histograms produced under different quantizations."""


# --- eigen ---

class NotSymmetricError(CbirError):
    """Matrix handed to the symmetric eigensolver is not symmetric."""


class NoConvergenceError(CbirError):
    """Jacobi sweeps exhausted before the off-diagonal norm fell below tolerance."""


class ShapeMismatchError(CbirError):
    """Spectral signatures with different k or resize dimension."""


# --- match points ---

class EvenPatchError(CbirError):
    """Descriptor patch size must be odd."""


class DimensionMismatchError(CbirError):
    """Descriptor sets with different descriptor lengths."""


# --- index store ---

class EmptyCategoryError(CbirError):
    """A category directory yielded no decodable images."""


class BadMagicError(CbirError):
    """File does not begin with the index magic bytes."""


class UnsupportedVersionError(CbirError):
    """Index format version is not readable by this build."""


class TruncatedFileError(CbirError):
    """Index file ended before the declared content."""


class ChecksumMismatchError(CbirError):
    """Index file checksum does not match its content."""


# --- engine ---

class UnknownCategoryError(CbirError):
    """Fixed-scope query names a category absent from the index."""


class EmptyScopeError(CbirError):
    """Selected category has no records."""


# --- bench ---

class AllQueriesFailedError(CbirError):
    """Every benchmark query failed; no averages can be formed."""
