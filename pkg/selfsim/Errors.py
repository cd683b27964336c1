#!/usr/bin/env python3
"""
Exception hierarchy for selfsim.

Every error raised on purpose by the package derives from SelfSimError so the
CLI can map it to an exit code; each also derives from the closest builtin so
library callers can catch ValueError/RuntimeError as usual.
"""
# pylint: disable=too-few-public-methods


class SelfSimError(Exception):
    """ Base of all selfsim errors """


class DomainError(SelfSimError, ValueError):
    """ Invalid (N, p), offset, parameter or other out-of-domain input """


class RegimeError(DomainError):
    """ The parameter regime does not support the requested operation """


class RangeError(DomainError):
    """ A requested interval or tolerance lies outside the allowed span """


class ChartError(SelfSimError, ValueError):
    """ An integration path would cross rho=0 or rho=1 """


class SingularityError(SelfSimError, ArithmeticError):
    """ Evaluation requested inside a singular-point guard """


class LiftingError(SelfSimError, ArithmeticError):
    """ The Pruefer amplitude vanished so the angle cannot be lifted """


class IntegrationError(SelfSimError, RuntimeError):
    """ The ODE integrator failed for a reason other than a guard """


class NoRootInBracket(SelfSimError, RuntimeError):
    """ A scan found no usable sign change; carries the scan table """
    def __init__(self, message, table=None):
        super().__init__(message)
        self.table = list(table) if table else []


class ToleranceNotMet(SelfSimError, RuntimeError):
    """ A root was bracketed but could not be refined to tolerance """


class ProfileParseError(SelfSimError, ValueError):
    """ A profile/table file could not be parsed """
    def __init__(self, message, line_no=0):
        super().__init__(f'line {line_no}: {message}' if line_no else message)
        self.line_no = line_no
