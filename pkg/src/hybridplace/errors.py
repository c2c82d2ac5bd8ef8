class InvalidInputError(ValueError):
    """Malformed arguments: wrong lengths, negative prices, bad fractions."""


class InfeasibleInstanceError(ValueError):
    """The offload threshold exceeds the graph's total hosting."""


class InstanceTooLargeError(ValueError):
    """Exhaustive search refused because the graph has too many nodes."""


class GraphFormatError(ValueError):
    """A graph file could not be parsed."""
