"""Exception types shared across the package."""


class AqagenError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(AqagenError, ValueError):
    """An argument violated a documented precondition."""


class UndefinedAttributeError(AqagenError):
    """A waveform attribute (brightness/loudness) cannot be computed."""


class BankError(AqagenError):
    """A sound bank could not be loaded."""


class BankEntryError(BankError):
    """One manifest entry failed to load; the message names the file."""

    def __init__(self, path, reason):
        self.path = str(path)
        self.reason = reason
        super().__init__(f"{self.path}: {reason}")


class EmptyBankError(BankError):
    """Loading produced an empty bank."""


class MissingSoundError(AqagenError):
    """A scene sound could not be resolved to a waveform."""


class ProgramError(AqagenError):
    """A question program is structurally malformed.

    Distinct from an ill-posed outcome: ill-posedness is a value produced
    by evaluating a well-formed program, never an exception.
    """


class InvalidBindingError(AqagenError):
    """Template bindings are missing a slot or carry an out-of-domain value."""


class PartialGenerationWarning(UserWarning):
    """Question generation exhausted its attempt budget before the target."""
