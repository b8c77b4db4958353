"""Conversion units dispatched during the process-validations phase."""

from __future__ import annotations

import re

from .components import ComponentNode
from .validate import ValidationFailure

_INT_RE = re.compile(r"-?\d+\Z")


class IntegerConverter:
    """Checks that a non-empty value reads as a base-10 integer; keeps it as text."""

    unit = "pathtrace.convert.IntegerConverter"

    def convert(self, node: ComponentNode) -> ValidationFailure | None:
        if _INT_RE.match(node.value):
            return None
        node.valid = False
        return ValidationFailure(
            node.id, self.unit, f"{node.id}: '{node.value}' is not an integer"
        )


CONVERTERS = {"int": IntegerConverter()}
