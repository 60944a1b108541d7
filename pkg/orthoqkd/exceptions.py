from typing import Union

from dbt_common.dataclass_schema import ValidationError
from dbt_common.exceptions import (
    CompilationError,
    DbtInternalError,
    DbtRuntimeError,
    DbtValidationError,
)


class StateValidationError(DbtValidationError):
    """Amplitudes, matrices or operators that break a state invariant."""


class RegisterSizeError(DbtValidationError):
    """A register that is not 1 to 4 qubits wide."""


class MeasurementError(DbtRuntimeError):
    pass


class AttackConfigError(DbtRuntimeError):
    pass


class ProtocolError(DbtRuntimeError):
    pass


class CausalOrderError(DbtInternalError):
    """A classical disclosure was logged before the acknowledgement it depends on."""


class AnalysisError(DbtRuntimeError):
    pass


class ScenarioConfigError(CompilationError):
    def __init__(self, exc: Union[ValidationError, Exception, str]):
        self.exc = exc
        super().__init__(msg=self.get_message())

    def get_message(self) -> str:
        if isinstance(self.exc, ValidationError):
            detail = self.validator_error_message(self.exc)
        elif isinstance(self.exc, DbtRuntimeError):
            detail = self.exc.msg
        else:
            detail = str(self.exc)
        return f"Could not parse scenario config: {detail}"
