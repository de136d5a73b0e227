"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command-line front end:
1 for bad inputs detected before any computation, 2 for numerical failures.
"""


class NhqfiError(Exception):
    exit_code = 2


class PreconditionError(NhqfiError, ValueError):
    exit_code = 1


class NonHermitianGenerator(PreconditionError):
    pass


class RegimeError(PreconditionError):
    pass


class UnsupportedAtEP(PreconditionError):
    pass


class NotAState(PreconditionError):
    pass


class DegenerateState(NhqfiError):
    pass


class SingularDelta(NhqfiError):
    pass


class DegenerateSpectrum(NhqfiError):
    pass


class InconsistentContext(NhqfiError):
    pass


class NearExceptionalPoint(NhqfiError):
    pass


class UnboundedVariance(NhqfiError):
    pass


class AmplitudeOverflow(NhqfiError):
    def __init__(self, message, theta=None):
        super().__init__(message)
        self.theta = theta
