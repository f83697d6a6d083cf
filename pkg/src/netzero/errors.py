"""Exception hierarchy. Every error raised on purpose derives from NetZeroError."""


class NetZeroError(Exception):
    """Base class for toolkit errors."""


class InputError(NetZeroError, ValueError):
    pass


class InputShape(InputError):
    pass


class EmptyDataset(InputError):
    pass


class EmptyEvent(InputError):
    pass


class UnknownSubLabel(NetZeroError, KeyError):
    def __init__(self, sub_label: str):
        super().__init__(sub_label)
        self.sub_label = sub_label

    def __str__(self) -> str:
        return f"unknown sub-label: {self.sub_label!r}"


class StratificationInfeasible(NetZeroError, ValueError):
    pass


class ConfigError(NetZeroError, ValueError):
    def __init__(self, message: str, fields: dict | None = None):
        super().__init__(message)
        self.fields = dict(fields or {})


class ModelNotFound(NetZeroError, LookupError):
    pass


class ExtractionError(NetZeroError, RuntimeError):
    pass


class MissingPredictions(NetZeroError, ValueError):
    pass


class UnknownSample(NetZeroError, KeyError):
    def __init__(self, sample_id: str):
        super().__init__(sample_id)
        self.sample_id = sample_id

    def __str__(self) -> str:
        return f"unknown sample id: {self.sample_id!r}"


class ModelFailure(NetZeroError, RuntimeError):
    """A classifier raised while labelling a specific sentence."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index
