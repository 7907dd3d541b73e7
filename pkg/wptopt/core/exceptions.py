# Copyright 2025 The wptopt Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Exception classes for waveform optimization."""

from typing import Any, Dict, Optional


class WptOptError(Exception):
    """
    Base exception for all wptopt errors.

    Carries the underlying exception (if any) and a free-form details
    dictionary so callers can report context without parsing messages.
    """

    def __init__(
        self,
        message: str,
        cause: Optional[Exception] = None,
        details: Optional[Dict[str, Any]] = None
    ) -> None:
        super().__init__(message)
        self.cause = cause
        self.details = details or {}


class ValidationError(WptOptError):
    """
    Exception raised when an input violates a documented precondition.

    This includes non-positive physical parameters, mismatched vector
    lengths and malformed problem data.
    """

    def __init__(
        self,
        message: str,
        field_name: Optional[str] = None,
        field_value: Any = None,
        cause: Optional[Exception] = None
    ) -> None:
        super().__init__(message, cause)
        self.field_name = field_name
        self.field_value = field_value


class DegenerateChannelError(WptOptError):
    """Exception raised when a channel row or effective gain is zero."""

    pass


class UndersampledError(WptOptError):
    """Exception raised when a numeric time average would alias."""

    pass


class ModelError(WptOptError):
    """Exception raised for harvester model failures (poles, bad fits, non-reducible models)."""

    pass


class LpError(WptOptError):
    """Exception raised when a linear program is malformed or the simplex stalls."""

    pass


class SolverError(WptOptError):
    """
    Exception raised when a global solver cannot certify an optimum.

    The best incumbent found so far and the remaining optimality gap are
    attached so a caller can still use the partial result.
    """

    def __init__(
        self,
        message: str,
        incumbent: Any = None,
        gap: Optional[float] = None,
        details: Optional[Dict[str, Any]] = None
    ) -> None:
        super().__init__(message, details=details)
        self.incumbent = incumbent
        self.gap = gap


class ConfigurationError(WptOptError):
    """Exception raised when a scenario configuration violates its schema."""

    def __init__(
        self,
        message: str,
        key: Optional[str] = None,
        cause: Optional[Exception] = None
    ) -> None:
        super().__init__(message, cause)
        self.key = key


class DataFormatError(WptOptError):
    """Exception raised when a CSV file does not match its documented layout."""

    def __init__(
        self,
        message: str,
        path: Optional[str] = None,
        cause: Optional[Exception] = None
    ) -> None:
        super().__init__(message, cause)
        self.path = path
