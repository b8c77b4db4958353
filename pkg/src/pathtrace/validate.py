"""Validation units dispatched during the process-validations phase."""

from __future__ import annotations

from dataclasses import dataclass

from .components import ComponentNode


@dataclass(frozen=True)
class ValidationFailure:
    component_id: str
    unit: str
    message: str


class RequiredValidator:
    """Rejects empty values on components marked required="true"."""

    unit = "pathtrace.validate.RequiredValidator"

    def validate(self, node: ComponentNode) -> ValidationFailure | None:
        if node.value == "":
            node.valid = False
            return ValidationFailure(node.id, self.unit, f"{node.id}: value is required")
        return None
