"""Exception hierarchy.

Every error carries its class name as a machine-readable tag (``err.name``),
which the command-line frontend prints on failure.
"""


class RdheiError(Exception):
    @property
    def name(self) -> str:
        return type(self).__name__


class MalformedFormat(RdheiError):
    pass


class UnsupportedDepth(RdheiError):
    pass


class DimensionError(RdheiError):
    pass


class DimensionMismatch(RdheiError):
    pass


class InconsistentLabels(RdheiError):
    pass


class RangeError(RdheiError):
    pass


class LabelLengthMismatch(RdheiError):
    pass


class DecodeOverrun(RdheiError):
    pass


class CapacityError(RdheiError):
    pass


class LayoutMismatch(RdheiError):
    pass


class MalformedAux(RdheiError):
    pass


class VersionMismatch(MalformedAux):
    pass


class CapacityExceeded(RdheiError):
    pass


class PrefixOutOfRange(RdheiError):
    pass


class KeyFormatError(RdheiError):
    pass
