"""Exception types shared across the toolkit."""


class DefectKitError(Exception):
    """Base class for all toolkit errors."""


class UnsupportedFormatError(DefectKitError):
    """Input file is not one of the supported raster formats."""


class CorruptDataError(DefectKitError):
    """File recognized but its payload is truncated or malformed."""


class KernelTooLargeError(DefectKitError):
    """Convolution kernel exceeds the image extent."""


class ImageTooSmallError(DefectKitError):
    """Image smaller than the minimum an operator requires."""


class InvalidParamsError(DefectKitError, ValueError):
    """Edge-detection parameters outside their documented ranges."""


class IndivisibleCellSizeError(DefectKitError):
    """Cell size incompatible with the image dimensions."""


class EmptyDatasetError(DefectKitError):
    """Dataset has no samples."""


class SingleClassError(DefectKitError):
    """Operation needs both classes but only one is present."""


class TooFewSamplesError(DefectKitError):
    """Not enough samples for the requested operation (e.g. k > n)."""


class NonConvergenceError(DefectKitError):
    """Iterative solver hit its iteration cap before meeting tolerance."""


class DimensionMismatchError(DefectKitError):
    """Query vector length does not match the model's predictor count."""


class BadLabelError(DefectKitError):
    """Manifest row carries a label other than 0 or 1."""


class DefectTooLargeError(DefectKitError):
    """Requested patch size cannot contain the largest defect extent."""
