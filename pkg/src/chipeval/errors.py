"""Shared exception types.

Every error the toolbox raises deliberately derives from ChipEvalError so
callers (and the CLI exit-code mapping) can distinguish our failures from
genuine bugs.
"""


class ChipEvalError(Exception):
    """Base class for all toolbox errors."""


# --- interface extraction ---------------------------------------------------

class ParseError(ChipEvalError):
    """Base class for Verilog interface extraction failures."""


class NoModuleFound(ParseError):
    pass


class AmbiguousTop(ParseError):
    pass


class UnresolvedWidth(ParseError):
    pass


class MalformedPortList(ParseError):
    pass


class UnterminatedBlockComment(ParseError):
    pass


# --- stimulus / harness -----------------------------------------------------

class UnsupportedPort(ChipEvalError):
    """Port kind the stimulus/cosim/harness path does not drive (inout)."""


class PlanInvalid(ChipEvalError):
    pass


# --- cosim -------------------------------------------------------------------

class WidthOverflow(ChipEvalError):
    """A concrete value does not fit the declared port width."""


class ProtocolViolation(ChipEvalError):
    """An endpoint broke the lock-step message contract."""


# --- mutation ----------------------------------------------------------------

class NoSitesFound(ChipEvalError):
    pass


class SiteStale(ChipEvalError):
    """The source changed between enumeration and injection."""


class QuotaUnreachable(ChipEvalError):
    def __init__(self, message: str, achieved: dict | None = None):
        super().__init__(message)
        self.achieved = achieved or {}


# --- llm pipeline -------------------------------------------------------------

class ClientError(ChipEvalError):
    """Transport or auth failure talking to the completion endpoint."""


class MalformedResponse(ChipEvalError):
    """The endpoint reply could not be used (e.g. no code block)."""


# --- scoring ------------------------------------------------------------------

class InvalidArgs(ChipEvalError):
    pass


class DivisionByZeroPassRate(ChipEvalError):
    """Cost per pass is undefined: nothing was solved at this budget."""


# --- suite --------------------------------------------------------------------

class EmptyCorpus(ChipEvalError):
    pass


class MissingArtifacts(ChipEvalError):
    pass


# --- vcd ----------------------------------------------------------------------

class InvariantViolation(ChipEvalError):
    pass


class MalformedVcd(ChipEvalError):
    pass


# --- behavioral fallback --------------------------------------------------------

class UnsupportedConstruct(ChipEvalError):
    """Verilog construct outside the behavioral evaluator's subset."""
