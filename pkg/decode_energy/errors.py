# decode_energy/errors.py
"""
Exception hierarchy for the decode energy toolkit.

Every error carries the exit code the command line surface reports:
    2 - input / parse problems (profiles, dataset files, model files)
    3 - validation problems (bad values, duplicates, bad flags)
    4 - modeling problems (underdetermined fits, numeric issues, missing features)
"""


class DecodeEnergyError(Exception):
    """Base class for all errors raised by this package."""
    exit_code = 1


# ============================================================================
# INPUT ERRORS (exit code 2)
# ============================================================================

class InputError(DecodeEnergyError):
    exit_code = 2


class MalformedProfileError(InputError):
    """A cachegrind file is missing a required line or has an unparseable one."""

    def __init__(self, message, line_number=None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class ProfileArityError(MalformedProfileError):
    """The summary line does not list one count per event name."""


class ProfileParseError(MalformedProfileError):
    """A summary token is not a base-10 integer."""


class UnmappedEventError(InputError):
    """A canonical event name is missing from the profile."""


class DatasetFormatError(InputError):
    """The dataset CSV cannot be read or does not follow the schema."""


class EmptyDatasetError(InputError):
    pass


class ModelFileError(InputError):
    pass


# ============================================================================
# VALIDATION ERRORS (exit code 3)
# ============================================================================

class ValidationError(DecodeEnergyError):
    exit_code = 3


class InvalidEventVectorError(ValidationError):
    """Counts are negative or violate the cache hierarchy."""

    def __init__(self, message, access_class=None):
        self.access_class = access_class
        super().__init__(message)


class DuplicateRecordError(ValidationError):
    def __init__(self, record_id):
        self.record_id = record_id
        super().__init__(f"duplicate record id '{record_id}'")


class InvalidRecordError(ValidationError):
    pass


class InvalidReferenceEnergyError(ValidationError):
    """A measured energy is not strictly positive."""

    def __init__(self, record_id, energy):
        self.record_id = record_id
        super().__init__(
            f"record '{record_id}': measured energy must be positive, got {energy!r}"
        )


class FeatureSetError(ValidationError):
    pass


class FoldCountError(ValidationError):
    pass


class GeneratorSpecError(ValidationError):
    pass


# ============================================================================
# MODELING ERRORS (exit code 4)
# ============================================================================

class ModelingError(DecodeEnergyError):
    exit_code = 4


class UnderdeterminedError(ModelingError):
    """Fewer training records than features."""


class NumericError(ModelingError):
    """Non-finite values reached the solver or came out of it."""


class IncompleteRecordError(ModelingError):
    def __init__(self, record_id, message):
        self.record_id = record_id
        super().__init__(f"record '{record_id}': {message}")


class IncompleteInputError(ModelingError):
    """Prediction input lacks a feature the model needs."""


class DimensionError(ModelingError):
    pass


class DegenerateInputError(ModelingError):
    """A vector has zero variance where a correlation is requested."""
