"""Exception catalogue shared by every subsystem."""

from __future__ import annotations


class ExpressiveError(Exception):
    """Root of all errors raised by this package."""


# -- type model -------------------------------------------------------------

class DeclarationError(ExpressiveError):
    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class AmbiguousMatch(ExpressiveError):
    pass


class DuplicateInitSequence(DeclarationError):
    pass


class NoUsableConstructor(DeclarationError):
    pass


class UnmatchedConstructorParam(DeclarationError):
    pass


class UnknownType(ExpressiveError):
    pass


# -- object model -----------------------------------------------------------

class ArityMismatch(ExpressiveError):
    pass


class TypeMismatch(ExpressiveError):
    pass


class InitFailed(ExpressiveError):
    def __init__(self, name: str, type_name: str = ""):
        super().__init__(f"init method {name!r} of {type_name or '?'} returned false")
        self.name = name
        self.type_name = type_name


class UnknownProperty(ExpressiveError):
    pass


class ReadOnlyProperty(ExpressiveError):
    pass


# -- streams ----------------------------------------------------------------

class StreamExhausted(ExpressiveError):
    pass


class MalformedBindingName(ExpressiveError):
    pass


class UnregisteredType(ExpressiveError):
    pass


class NonExpressiveValue(ExpressiveError):
    pass


class InterfaceSetMismatch(ExpressiveError):
    pass


class MalformedStream(ExpressiveError):
    pass


# -- formats ----------------------------------------------------------------

class FormatError(ExpressiveError):
    """Base for wire/persisted format errors."""


class MalformedHeader(FormatError):
    pass


class MalformedLine(FormatError):
    pass


class NameLineWithoutTypeLine(FormatError):
    pass


class DataLineWithoutHeader(FormatError):
    pass


class ColumnCountMismatch(FormatError):
    pass


class UnmappedTypeName(FormatError):
    pass


# -- synthesis --------------------------------------------------------------

class ConflictingMemberType(ExpressiveError):
    pass


class InsufficientBinding(ExpressiveError):
    pass


class ShadowingRegisteredType(ExpressiveError):
    pass
