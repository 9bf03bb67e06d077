"""Exception types shared across the package."""


class QpercError(Exception):
    pass


class CapExceededError(QpercError):
    """An exact routine was asked to handle an instance above its size cap."""


class ConfigError(QpercError, ValueError):
    pass


class ConvergenceError(QpercError, RuntimeError):
    pass


class DisconnectedError(QpercError, ValueError):
    pass
