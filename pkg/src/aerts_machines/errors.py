"""Exception hierarchy shared by all modules."""


class AertsMachinesError(ValueError):
    """Base class for invalid inputs to the simulators."""


class InvalidStateError(AertsMachinesError):
    pass


class InvalidDirectionError(AertsMachinesError):
    pass


class InvalidParameterError(AertsMachinesError):
    pass


class InvalidExpectationError(AertsMachinesError):
    pass


class InvalidExperimentError(AertsMachinesError):
    pass


class ConsumedEntityError(AertsMachinesError):
    """A band that has already been pulled cannot be pulled again."""
