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


"""Base class for the validated domain records."""

from typing import Any, ClassVar, Type

from pydantic import BaseModel
from pydantic import ValidationError as PydanticValidationError

from .exceptions import ValidationError, WptOptError


class DomainModel(BaseModel):
    """
    Pydantic model whose constructor raises wptopt errors.

    Schema and validator failures surface as ``invalid_error`` naming the
    first offending field, with the pydantic error kept as the cause.
    """

    invalid_error: ClassVar[Type[WptOptError]] = ValidationError

    def __init__(self, **data: Any) -> None:
        try:
            super().__init__(**data)
        except PydanticValidationError as e:
            raise self._translate(e) from e

    @classmethod
    def _translate(cls, e: PydanticValidationError) -> WptOptError:
        first = e.errors()[0]
        field = ".".join(str(part) for part in first["loc"]) or None
        message = f"invalid {cls.__name__}" + (f" field '{field}'" if field else "") + f": {first['msg']}"
        if cls.invalid_error is ValidationError:
            return ValidationError(message, field, first.get("input"), cause=e)
        return cls.invalid_error(message, cause=e, details={"field": field})
