"""Exception hierarchy shared by the devlab modules."""


class DevlabError(Exception):
    """Base class for all devlab errors."""


class RejectReducible(DevlabError, ValueError):
    pass


class RejectNonPositive(DevlabError, ValueError):
    pass


class KeaneViolation(DevlabError, ArithmeticError):
    """The two competing lengths of a Rauzy step coincide; induction is undefined."""


class NonRecurrent(DevlabError, ArithmeticError):
    """A single Rauzy type persisted past the elementary step budget."""


class InconsistentSignature(DevlabError, RuntimeError):
    """Genus/singularity derivations disagree. Indicates a bug, not bad input."""


class NonZeroMean(DevlabError, ValueError):
    pass


class DegenerateSeries(DevlabError, ValueError):
    pass


class RationalAlpha(DevlabError, ArithmeticError):
    pass


class ConfigError(DevlabError, ValueError):
    """Invalid experiment configuration. ``line`` is 1-based when known."""

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
