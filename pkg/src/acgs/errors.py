"""Shared exception types."""


class AcgsError(Exception):
    """Base class for errors raised by this package."""


class ParseError(AcgsError):
    """Malformed formula or model text."""


class UndecidableConfiguration(AcgsError):
    """A coalition formula was checked on a model containing an iR-typed agent.

    Strategy synthesis for agents with imperfect information and perfect
    recall is undecidable in general, so the checker refuses such instances
    outright instead of risking a wrong answer.
    """


class AlgorithmInapplicable(AcgsError):
    """The requested decision procedure does not cover the given instance."""


class StrategySpaceExceeded(AcgsError):
    """Strategy enumeration would exceed the configured budget."""
