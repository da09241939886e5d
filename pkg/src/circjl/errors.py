"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """A parameter or input violates an operation's preconditions."""


class OutOfDomain(InvalidArgument):
    """A bound was evaluated outside the range where it is defined."""


class RegimeViolation(ValueError):
    """Subgaussian parameters fall outside the regime where the tail bound holds.

    ``failed`` lists the inequalities that do not hold, as readable strings.
    """

    def __init__(self, failed):
        self.failed = list(failed)
        super().__init__("parameter regime violated: " + "; ".join(self.failed))


class PointSetParseError(ValueError):
    """A point-set file could not be parsed. ``location`` is a line or byte offset."""

    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{message} (at {location})"
        super().__init__(message)
