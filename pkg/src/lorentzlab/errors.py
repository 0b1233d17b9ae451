"""Exception hierarchy."""


class LorentzlabError(Exception):
    """Base class for all library errors."""


class ContractError(LorentzlabError, ValueError):
    """An input violates a documented precondition."""


class EvaluationDomainError(LorentzlabError, ArithmeticError):
    """A field produced a non-finite value at the requested point."""


class DegeneracyError(LorentzlabError, ArithmeticError):
    """A metric or a restriction of it is degenerate."""


class TransversalityError(LorentzlabError, ArithmeticError):
    """Two subspaces fail to be complementary within tolerance."""


class UnsupportedIndexError(LorentzlabError, NotImplementedError):
    """The operation is only implemented for a narrower class of indices."""


class DomainEscapeError(LorentzlabError, ArithmeticError):
    """An integrated leaf left the admissible box."""

    def __init__(self, message: str, point=None):
        super().__init__(message)
        self.point = point


class BlowUpError(LorentzlabError, ArithmeticError):
    """An integration produced non-finite state."""

    def __init__(self, message: str, last_valid_time: float):
        super().__init__(message)
        self.last_valid_time = last_valid_time
