import numpy as np


class LinacError(Exception):
    """base class of every error raised by the library"""


class InputError(LinacError, ValueError):
    """malformed arguments: dimension mismatch, violated precondition"""


class SpecFormatError(InputError):
    """action-spec or linearizer file does not follow the format"""


class DomainError(InputError):
    """group parameter s = 0 requested, C* excludes it"""


class NotAPeriodicFlow(LinacError):
    """eigenvalues of the generator are not 2*pi*i times integers"""


class SuspectWeights(NotAPeriodicFlow):
    """integer weights larger than the accepted cap"""


class NilpotentPartDetected(LinacError):
    """linear part is not semisimple, so it cannot come from a C*-action"""


class WeightsUnreliable(LinacError):
    """weight data residual above tolerance, averaging refused"""


class IntegrationFailure(LinacError):
    """complex-time integration stopped before reaching the requested time"""

    def __init__(self, message: str, reached: complex = 0j, steps: int = 0):
        super().__init__(f"{message} (reached z={complex(reached):.6g}, steps={steps})")
        self.reached = complex(reached)
        self.steps = steps


class DegreeTooHighForGrid(LinacError):
    """least squares fit too ill-conditioned for the sample grid"""

    def __init__(self, message: str, condition: float = np.inf):
        super().__init__(message)
        self.condition = condition


class DegenerateLinearizer(LinacError):
    """no radius around the fixed point where the linearizer is injective"""


class NotDicritical(LinacError):
    """saturation extension needs all weights nonzero with one sign"""


class OrbitNeverEntersDomain(LinacError):
    """contraction budget exhausted before the orbit entered the domain"""

    def __init__(self, message: str, budget: int = 0):
        super().__init__(message)
        self.budget = budget
