"""Exception hierarchy for the explanation engine.

Every contract violation raises a subclass of :class:`ExplanationError`, so
callers (CLI, HTTP service) can map failures to exit codes / status codes in
one place. Error classes carry no state beyond the message.
"""


class ExplanationError(Exception):
    """Base class for all engine errors."""

    #: short machine-readable code used by the HTTP error envelope
    code = "error"


# --- instance / store validation -------------------------------------------

class DimensionMismatch(ExplanationError):
    code = "dimension_mismatch"


class NonFiniteValue(ExplanationError):
    code = "non_finite_value"


class DuplicateId(ExplanationError):
    """Raised by strict inserts; plain upsert replaces instead."""

    code = "duplicate_id"


class ZeroVectorUnderCosine(ExplanationError):
    code = "zero_vector_under_cosine"


class IoFailure(ExplanationError):
    code = "io_failure"


class CorruptFile(ExplanationError):
    code = "corrupt_file"


# --- explainer preconditions -------------------------------------------------

class EmptyCollection(ExplanationError):
    code = "empty_collection"


class MissingLabels(ExplanationError):
    code = "missing_labels"


class TooManyFeaturesForExact(ExplanationError):
    code = "too_many_features_for_exact"


class ClassTooSmall(ExplanationError):
    code = "class_too_small"


class CountExceedsRemaining(ExplanationError):
    code = "count_exceeds_remaining"


class SingleClassCollection(ExplanationError):
    code = "single_class_collection"


class KBelowTwo(ExplanationError):
    code = "k_below_two"


class FewerPointsThanK(ExplanationError):
    code = "fewer_points_than_k"


class UnknownFeature(ExplanationError):
    code = "unknown_feature"


class NoPrototypes(ExplanationError):
    code = "no_prototypes"


class MissingBundleField(ExplanationError):
    code = "missing_bundle_field"


# --- rule engine -------------------------------------------------------------

class UnsupportedCategory(ExplanationError):
    code = "unsupported_category"


class UnknownRow(ExplanationError):
    code = "unknown_row"


class InvalidProfile(ExplanationError):
    code = "invalid_profile"


# --- decision log --------------------------------------------------------------

class MissingValidator(ExplanationError):
    code = "missing_validator"


# --- case harnesses ------------------------------------------------------------

class ApplicantApproved(ExplanationError):
    code = "applicant_approved"


class OutOfRangeEdit(ExplanationError):
    code = "out_of_range_edit"


class EmptyQuadrant(ExplanationError):
    code = "empty_quadrant"


class EmptyText(ExplanationError):
    code = "empty_text"


class EmptyCorpus(ExplanationError):
    code = "empty_corpus"


# --- service -------------------------------------------------------------------

class BadConfig(ExplanationError):
    code = "bad_config"


class PortInUse(ExplanationError):
    code = "port_in_use"


class NotFound(ExplanationError):
    code = "not_found"
