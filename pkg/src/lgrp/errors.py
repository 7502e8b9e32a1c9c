"""Exception hierarchy shared by every module."""


class LGroupError(Exception):
    """Base class for all errors raised by the package."""

    exit_code = 2


class StructuralError(LGroupError):
    """Malformed input: bad descriptors, mismatched operands, broken preconditions."""


class DescriptorMismatch(StructuralError):
    pass


class UnsupportedRepresentation(StructuralError):
    pass


class PreconditionError(StructuralError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ResourceError(LGroupError):
    """A configured budget (node count, closure size) was exceeded."""

    exit_code = 3

    def __init__(self, message, budget=None):
        super().__init__(message)
        self.budget = budget
