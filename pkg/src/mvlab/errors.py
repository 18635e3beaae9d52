"""Exception hierarchy shared across the package.

Every error carries a stable machine-readable ``code`` so that callers
(CLI, HTTP service) can map failures without string matching.
"""


class MVLabError(Exception):
    """Base class for all domain errors."""

    code = "E_INTERNAL"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)


class MalformedAnnotationError(MVLabError):
    code = "E_MALFORMED"


class BadTypeError(MVLabError):
    code = "E_BAD_TYPE"


class BadGeometryError(MVLabError):
    code = "E_BAD_GEOMETRY"


class EmptyDisplayError(MVLabError):
    code = "E_EMPTY_DISPLAY"


class AllClippedError(MVLabError):
    code = "E_ALL_CLIPPED"


class EmptyBoxListError(MVLabError):
    code = "E_EMPTY"


class NotRefinedError(MVLabError):
    code = "E_NOT_REFINED"


class EmptyCorpusError(MVLabError):
    code = "E_EMPTY_CORPUS"


class EmptySketchError(MVLabError):
    code = "E_EMPTY_SKETCH"


class MissingTypeError(MVLabError):
    code = "E_MISSING_TYPE"


class TooFewViewsError(MVLabError):
    code = "E_TOO_FEW"


class TemplateTooSmallError(MVLabError):
    code = "E_TEMPLATE_TOO_SMALL"


class DegenerateViewError(MVLabError):
    code = "E_DEGENERATE"


class NoFilesError(MVLabError):
    code = "E_NO_FILES"
