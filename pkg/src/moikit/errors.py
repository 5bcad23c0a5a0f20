"""Exception hierarchy.

Every domain error carries a stable ``code`` string that the command line
front end reports verbatim in its error JSON.
"""


class MOIError(ValueError):
    code = "MOIError"


class NonHermitianInput(MOIError):
    code = "NonHermitianInput"


class ConvergenceFailure(MOIError):
    code = "ConvergenceFailure"


class InvalidExponent(MOIError):
    code = "InvalidExponent"


class BlockMismatch(MOIError):
    code = "BlockMismatch"


class FrameLengthMismatch(MOIError):
    code = "FrameLengthMismatch"


class NonOrthonormalFrame(MOIError):
    code = "NonOrthonormalFrame"


class InvalidMatrix(MOIError):
    code = "InvalidMatrix"


class InvalidPVM(MOIError):
    code = "InvalidPVM"


class DuplicateLabels(MOIError):
    code = "DuplicateLabels"


class MissingLabel(MOIError):
    code = "MissingLabel"


class EmptyList(MOIError):
    code = "EmptyList"


class ArityMismatch(MOIError):
    code = "ArityMismatch"


class DegreeTooLow(MOIError):
    code = "DegreeTooLow"


class ShapeMismatch(MOIError):
    code = "ShapeMismatch"


class SplitOutOfRange(MOIError):
    code = "SplitOutOfRange"


class ExponentMismatch(MOIError):
    code = "ExponentMismatch"


class LatticeTooLarge(MOIError):
    code = "LatticeTooLarge"


class ConfluentNodesUnsupported(MOIError):
    code = "ConfluentNodesUnsupported"


class UnknownFunction(MOIError):
    code = "UnknownFunction"


class UnknownSuite(MOIError):
    code = "UnknownSuite"
