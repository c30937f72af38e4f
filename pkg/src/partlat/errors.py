class DimensionError(ValueError):
    """Two partitions over different ground-set sizes were combined."""


class CapacityError(RuntimeError):
    """A configured size limit was exceeded.

    ``partial`` carries how far the computation got (e.g. the number of
    elements in a closure when it was cut off), or None.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class IntegrityError(RuntimeError):
    """A checkpoint does not match the job that tries to resume from it."""
