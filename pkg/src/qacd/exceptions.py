"""Exception hierarchy shared by all qacd modules."""


class QacdError(Exception):
    """Base class for errors raised by qacd."""


class ShapeError(QacdError, ValueError):
    """Operand dimensions do not match."""


class SizeError(QacdError, ValueError):
    """A dense operation would exceed the configured size cap."""


class DomainError(QacdError, ValueError):
    """Input lies outside the mathematical domain of the operation."""


class ValidationError(QacdError, ValueError):
    """A quantum object failed its validity checks (PSD, trace, completeness)."""


class CPTPError(ValidationError):
    """A channel is not completely positive and trace preserving."""


class InconsistencyError(QacdError, ValueError):
    """Derived quantities are inconsistent beyond tolerance."""


class PreconditionError(QacdError, ValueError):
    """A closed-form expression was requested outside its stated assumptions."""


class ParseError(QacdError, ValueError):
    """Malformed label, configuration or data file."""
