"""Exception types shared across the package."""


class QRouterError(ValueError):
    """Base class for all domain errors raised by qrouter."""


class InvalidSizeError(QRouterError):
    pass


class SelfLinkError(QRouterError):
    pass


class InvalidNodeError(QRouterError):
    pass


class NotALeakError(QRouterError):
    """Raised when a crosstalk query names the signal channel itself."""


class ChannelRangeError(QRouterError):
    pass


class UnphysicalSpecError(QRouterError):
    """Per-pass probabilities add up to more than one."""


class UnboundedReachError(QRouterError):
    """Lossless fiber: no finite reach limit exists."""


class ConfigError(QRouterError):
    def __init__(self, message, line=None, source=None):
        self.message = message
        self.line = line
        self.source = source
        super().__init__(str(self))

    def __str__(self):
        where = self.source or "<config>"
        if self.line is not None:
            where = f"{where}:{self.line}"
        return f"{where}: {self.message}"
