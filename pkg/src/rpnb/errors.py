"""Exception hierarchy shared by all rpnb modules."""


class RpnbError(Exception):
    """Base class for every error raised by this package."""


class InvalidDimensionError(RpnbError, ValueError):
    pass


class InvalidParameterError(RpnbError, ValueError):
    pass


class InvalidClassError(RpnbError, ValueError):
    pass


class InvalidBatchError(RpnbError, ValueError):
    pass


class InvalidDatasetError(RpnbError, ValueError):
    pass


class InvalidInputError(RpnbError, ValueError):
    pass


class InsufficientDataError(RpnbError, ValueError):
    pass


class ParseError(RpnbError, ValueError):
    """A CSV cell could not be parsed; ``row`` and ``column`` are 1-based."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column
