from __future__ import annotations

# Exit codes the CLI maps these to:
#   2 = configuration, 3 = input data, 4 = internal invariant / unexpected failure


class TwinError(Exception):
    exit_code = 4

    def __init__(self, message: str, *, stage: str | None = None):
        super().__init__(message)
        self.stage = stage


class ConfigError(TwinError):
    exit_code = 2


class DataError(TwinError):
    exit_code = 3


class InvariantError(TwinError):
    exit_code = 4


# ---- ingest -------------------------------------------------------------------

class ParseError(DataError):
    pass


class EmptyResultError(DataError):
    pass


class MissingFileError(DataError):
    pass


# ---- geometry -----------------------------------------------------------------

class DegenerateInputError(DataError):
    pass


class DegenerateFitError(DegenerateInputError):
    pass


class FragmentationError(DataError):
    """Alpha too large for the point spacing; `largest` holds the biggest surviving polygon (or None)."""

    def __init__(self, message: str, *, largest=None, stage: str | None = None):
        super().__init__(message, stage=stage)
        self.largest = largest


class InvalidCenterlineError(DataError):
    pass


# ---- extraction ---------------------------------------------------------------

class NoCenterlineError(DataError):
    pass


class EmptyContourError(DataError):
    pass


class EmptyPoleError(DataError):
    pass


class UnlabeledPartsError(DataError):
    pass


class InvalidInstanceError(DataError):
    pass


# ---- storage / meshing --------------------------------------------------------

class ValidationError(DataError):
    def __init__(self, path: str, message: str, *, stage: str | None = None):
        super().__init__(f"{path}: {message}", stage=stage)
        self.path = path
        self.message = message


class TriangulationError(DataError):
    pass


class CorrespondenceError(DataError):
    pass


class SceneSpecError(ConfigError):
    pass
