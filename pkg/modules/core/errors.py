"""Exception hierarchy for the witness engine.

Every exception carries the process exit code the CLI reports for it:
  2  configuration / user input error
  3  numeric failure
  4  no sign change inside a contour bracket
"""


class WitnessToolError(Exception):
    """Base class for all errors raised by the engine"""

    exit_code = 1


class ConfigurationError(WitnessToolError):
    """Invalid scenario file, preset name, axis name or configuration value"""

    exit_code = 2

    def __init__(self, message: str, key: str = None):
        super().__init__(message)
        self.key = key


class InvalidParameterError(WitnessToolError):
    """A physical parameter is outside its allowed range"""

    exit_code = 2


class InvalidStateError(WitnessToolError):
    """A Gaussian state failed a structural requirement"""

    exit_code = 2


class NumericalError(WitnessToolError):
    """Base class for numeric failures"""

    exit_code = 3


class PropagatorOverflowError(NumericalError):
    """The matrix exponential of the coupling matrix is not finite"""


class SingularJetMatrixError(NumericalError):
    """Jet elimination met a vanishing constant-term pivot"""


class FactorizationError(NumericalError):
    """R1/T^4 and R2/(1-T)^4 disagree beyond tolerance"""


class DegenerateScenarioError(NumericalError):
    """The selected witness does not depend on the scanned phase"""


class NonClassicalStateError(NumericalError):
    """The covariance matrix admits no positive P distribution to sample"""


class NoSignChangeError(WitnessToolError):
    """The witness keeps one sign over the whole contour bracket"""

    exit_code = 4


class JetDomainError(NumericalError):
    """Division, reciprocal or square root of a jet with a vanishing constant term"""
