"""Exception hierarchy shared by every layer of the simulator."""


class TropicalError(Exception):
    """Base class for all simulator errors."""


class DimensionMismatch(TropicalError):
    pass


class RangeViolation(TropicalError):
    """A finite value exceeded the configured dynamic range.

    ``iteration`` is filled in by algorithm drivers so the failing loop
    iteration can be reported (0 means matrix programming, before the loop).
    """

    def __init__(self, message, value=None, t_max=None, iteration=None):
        super().__init__(message)
        self.value = value
        self.t_max = t_max
        self.iteration = iteration

    def __str__(self):
        msg = super().__str__()
        if self.iteration is not None:
            msg = f"{msg} (iteration {self.iteration})"
        return msg


class NotOneHot(TropicalError):
    pass


class NotBinary(TropicalError):
    pass


class UninitializedRegister(TropicalError):
    pass


class HazardViolation(TropicalError):
    pass


class MachineError(TropicalError):
    """Unknown register/bank, exhausted register file, malformed instruction."""


class NodeNotFound(TropicalError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class InvalidAlphabet(TropicalError, ValueError):
    pass


class ExprSyntaxError(TropicalError):
    def __init__(self, message, pos):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class UnboundVariable(TropicalError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class GraphParseError(TropicalError, ValueError):
    def __init__(self, message, line):
        super().__init__(f"line {line}: {message}")
        self.line = line


class NegativeWeight(GraphParseError):
    pass
