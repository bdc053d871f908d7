"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """A numeric parameter lies outside its admissible range."""


class BranchCutError(ArithmeticError):
    """A matrix logarithm was requested at an eigenvalue on the branch cut."""


class RewritingError(RuntimeError):
    """Rewriting exceeded its step bound; the rule set is suspected non-confluent or non-terminating."""


class HomomorphismError(ValueError):
    """Generator images do not kill a relator.

    ``relator`` is the offending relator word and ``value`` its image.
    """

    def __init__(self, message, relator=None, value=None):
        super().__init__(message)
        self.relator = relator
        self.value = value


class CannotVerifyError(RuntimeError):
    """Equality of group elements is undecidable with the data available."""


class IntegrityError(RuntimeError):
    """A computed quantity contradicts a mathematical guarantee (bug or broken certificate)."""


class GroupDataError(ValueError):
    """A group data file is malformed or fails its consistency checks."""
