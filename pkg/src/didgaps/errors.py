"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input violates a documented precondition."""


class LeftExtremityError(DomainError):
    """A PMF has no mass at zero, so it cannot be discretely infinitely divisible.

    Shift the law by its left extremity before taking roots.
    """


class OutOfScopeError(DomainError):
    """The request needs an infinite Levy measure, which this routine does not handle."""


class NumericInstabilityError(ArithmeticError):
    pass


class ContainmentError(AssertionError):
    """Simulated values fell outside the predicted support."""

    def __init__(self, violations):
        self.violations = sorted(violations)
        shown = ", ".join(repr(v) for v in self.violations[:20])
        super().__init__(f"{len(self.violations)} realizations outside predicted support: {shown}")
