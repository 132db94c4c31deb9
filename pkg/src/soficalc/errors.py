"""Exception hierarchy. ``kind`` is the short machine-readable tag the CLI prints."""


class SoficalcError(Exception):
    kind = "error"
    # exit status used by the command line
    status = 2


class InputError(SoficalcError, ValueError):
    kind = "input"


class ParseError(InputError):
    kind = "parse"


class AlphabetError(InputError):
    kind = "alphabet"


class ShapeError(InputError):
    kind = "shape"


class DiagramError(InputError):
    kind = "diagram"


class ConstructionError(InputError):
    kind = "construction"


class RefusalError(SoficalcError):
    kind = "refusal"
    status = 1


class ProjectivityError(RefusalError):
    kind = "projectivity"


class DeterminismError(RefusalError):
    kind = "determinism"


class BudgetError(RefusalError):
    kind = "budget"

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial or {}
