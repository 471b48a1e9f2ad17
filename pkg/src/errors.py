"""
Exceptions raised by weightlab. Each carries the CLI exit code it maps to.
"""
from .constant import ExitCode


class WeightLabError(Exception):
    exit_code = ExitCode.CHECK_FAILURE

    def to_dict(self) -> dict:
        return {
            "error": type(self).__name__,
            "message": str(self),
            "exit_code": self.exit_code.value,
        }


class AtomAtPoint(WeightLabError):
    """The evaluation point carries an atom of the measure."""


class AtomicPart(WeightLabError):
    """The operation needs an atom-free measure."""


class NonRationalPower(WeightLabError):
    """A density raised to the requested exponent is not rational."""


class SizeLimit(WeightLabError):
    exit_code = ExitCode.RESOURCE_CAP


class NoConvergence(WeightLabError):
    pass


class ScaleRange(WeightLabError):
    """No grid interval within the configured scale range fits."""


class MonotonicityViolation(WeightLabError):
    """Sampled signs of H(gamma_R) on a gap change more than once."""


class UsageError(WeightLabError):
    exit_code = ExitCode.USAGE_ERROR


class ArtifactError(WeightLabError):
    exit_code = ExitCode.USAGE_ERROR
