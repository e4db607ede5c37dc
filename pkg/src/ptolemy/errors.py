"""Exception hierarchy.

Every error raised on purpose by the package derives from `PtolemyError`,
so callers (and the CLI) can separate domain failures from bugs.
"""


class PtolemyError(Exception):
    """Base class for domain errors."""

    code = "error"

    def to_dict(self):
        return {"type": type(self).__name__, "code": self.code, "message": str(self)}


# triangulation input

class MalformedInput(PtolemyError):
    code = "malformed_input"


class NonInvolutiveGluing(PtolemyError):
    code = "non_involutive_gluing"


class UnglueedFace(PtolemyError):
    code = "unglued_face"


# Correctly spelled alias.
UngluedFace = UnglueedFace


class NonOrderPreservingMap(PtolemyError):
    code = "non_order_preserving_map"


class NonOrientable(PtolemyError):
    code = "non_orientable"


class ParityViolation(PtolemyError):
    code = "parity_violation"


class H2TooLarge(PtolemyError):
    code = "h2_too_large"


# variety

class InvalidCocycle(PtolemyError):
    code = "invalid_cocycle"


class UnsupportedFormat(PtolemyError):
    code = "unsupported_format"


# solver

class MissingVariable(PtolemyError):
    code = "missing_variable"


class ParametrizationInconsistent(PtolemyError):
    code = "parametrization_inconsistent"


# bloch

class DegenerateCrossRatio(PtolemyError):
    code = "degenerate_cross_ratio"


class NotAFlattening(PtolemyError):
    code = "not_a_flattening"


# reconstruct

class NonGenericTuple(PtolemyError):
    code = "non_generic_tuple"


class NonGenericMatrix(PtolemyError):
    code = "non_generic_matrix"


class ZeroCoordinate(PtolemyError):
    code = "zero_coordinate"


class RoundTripMismatch(PtolemyError):
    code = "round_trip_mismatch"


class FaceProductMismatch(PtolemyError):
    code = "face_product_mismatch"


class DisconnectedPath(PtolemyError):
    code = "disconnected_path"


# irrep

class NotUnitDeterminant(PtolemyError):
    code = "not_unit_determinant"


class InvalidInputCochain(PtolemyError):
    code = "invalid_input_cochain"


# gluing

class DegenerateShape(PtolemyError):
    code = "degenerate_shape"


class UnknownCurveLabel(PtolemyError):
    code = "unknown_curve_label"


# relations

class PrecisionInsufficient(PtolemyError):
    code = "precision_insufficient"
