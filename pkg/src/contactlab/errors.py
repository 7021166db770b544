"""Exception hierarchy shared by all modules."""


class ContactLabError(Exception):
    """Base class for every error raised by contactlab."""


class OffManifold(ContactLabError):
    pass


class RankDeficient(ContactLabError):
    pass


class DegenerateContact(ContactLabError):
    """Reeb solve residual too large or dα singular on the horizontal space."""


class NotTangent(ContactLabError):
    pass


class DimensionMismatch(ContactLabError):
    pass


class NoConvergence(ContactLabError):
    pass


class GramSingular(ContactLabError):
    """The constraint Gram matrix of Jacobi brackets is singular at the point."""


class NotTangentReeb(ContactLabError):
    pass


class NotContactType(ContactLabError):
    pass


class DenominatorVanishes(ContactLabError):
    pass


class ChartSingular(ContactLabError):
    pass


class ChartDegenerate(ContactLabError):
    pass


class ConfigError(ContactLabError):
    pass


class ParseError(ConfigError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}, column {column})"
        super().__init__(f"{message}{where}")


class ValidationError(ConfigError, ValueError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
