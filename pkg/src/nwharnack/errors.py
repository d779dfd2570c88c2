"""Exception types shared across the package.

Exceptions fall into two families that the CLI maps to different exit codes:
input errors (bad parameters, bad config) and numerical failures (positivity
loss, non-finite state, no convergence).
"""


class InputError(ValueError):
    """Invalid user-supplied parameters or configuration."""


class NumericalFailure(RuntimeError):
    """A computation broke down (lost positivity, overflowed, did not converge)."""


class ConditionViolated(InputError):
    def __init__(self, condition, message):
        self.condition = condition
        super().__init__(f"condition ({condition}) violated: {message}")


class ConditionAViolated(ConditionViolated):
    def __init__(self, message):
        super().__init__("a", message)


class ConditionBViolated(ConditionViolated):
    def __init__(self, message):
        super().__init__("b", message)


class NonFiniteInput(InputError):
    pass


class WrongBranch(InputError):
    pass


class NonPositiveTime(InputError):
    pass


class BadTimeOrder(InputError):
    pass


class QueryOffGrid(InputError):
    pass


class NonPositiveSample(InputError):
    def __init__(self, node, value):
        self.node = node
        self.value = value
        super().__init__(f"sample at node {node} is not positive ({value!r})")


class PositivityLost(NumericalFailure):
    def __init__(self, t, node):
        self.t = t
        self.node = node
        super().__init__(f"positivity lost at t={t!r}, node {node}")


class NonFiniteState(NumericalFailure):
    def __init__(self, t):
        self.t = t
        super().__init__(f"non-finite state at t={t!r}")


class NotConverged(NumericalFailure):
    def __init__(self, t_max, residual):
        self.t_max = t_max
        self.residual = residual
        super().__init__(f"not converged by t={t_max!r} (residual {residual:.3e})")


class LevelNotCrossed(NumericalFailure):
    pass


class FrontHitBoundaryWindow(NumericalFailure):
    pass


class ConfigError(InputError):
    pass


class ParseError(ConfigError):
    def __init__(self, line, message):
        self.line = line
        super().__init__(f"parse error at line {line}: {message}")


class UnknownKey(ConfigError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown key {name!r}")


class ConstraintViolation(ConfigError):
    pass
