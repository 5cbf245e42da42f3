"""Exception hierarchy. Each family maps to one CLI exit code."""


class StegoError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class CapacityError(StegoError):
    exit_code = 3

    def __init__(self, available: int, required: int):
        self.available = available
        self.required = required
        super().__init__(
            f"capacity exceeded: {available} bytes available, {required} bytes required"
        )


class GeometryError(StegoError):
    exit_code = 4


class ImageFormatError(StegoError):
    exit_code = 4


class LossyContainerError(ImageFormatError):
    pass


class KeyFileError(StegoError):
    exit_code = 5
