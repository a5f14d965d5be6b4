"""
Exceptions raised by the rules, procedures, simulator and command line.
"""

__author__ = "Repvote Developers"
__version__ = "0.1"
__status__ = "Alpha"
__date__ = "October 2026"


class RepeatVotingError(Exception):
    """
    Base class for every error raised by repvote.
    """
    pass


class InvalidBallot(RepeatVotingError, ValueError):
    pass


class OverVote(RepeatVotingError, ValueError):
    pass


class IncompatibleTallies(RepeatVotingError, ValueError):
    pass


class WrongDecisionPath(RepeatVotingError, ValueError):
    pass


class RuleArityError(RepeatVotingError, ValueError):
    pass


class DistrictMismatch(RepeatVotingError, ValueError):
    pass


class UnsupportedVariant(RepeatVotingError, ValueError):
    pass


class CalendarError(RepeatVotingError, ValueError):
    pass


class BadSpec(RepeatVotingError, ValueError):
    """
    An invalid rule or electorate parameter. field names the offending
    attribute when it is known.
    """

    def __init__(self, message, field=None):
        self.field = field
        super(BadSpec, self).__init__(message)


class NoViableParty(RepeatVotingError, RuntimeError):
    pass


class EmptyElection(RepeatVotingError, RuntimeError):
    pass


class ConfigError(RepeatVotingError, ValueError):
    """
    A scenario config that cannot be turned into a valid ScenarioConfig.
    """

    def __init__(self, field, message, line=None):
        """
        :param field: Dotted path of the offending field, e.g.
            "rule.quota" or "variants[1]".
        :param message: Human readable description of the problem.
        :param line: 1-based line number in the config text, if known.
        """
        self.field = field
        self.message = message
        self.line = line
        if line is None:
            text = "{}: {}".format(field, message)
        else:
            text = "line {}: {}: {}".format(line, field, message)
        super(ConfigError, self).__init__(text)


class IoError(RepeatVotingError, OSError):
    pass
