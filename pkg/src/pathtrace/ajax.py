"""The partial-update handler chain.

A ParamInterceptor looks at the request parameters first; presence of
``param2`` routes the update to the SpecialAjaxHandler, which restyles the
target before re-rendering, otherwise the DefaultAjaxHandler re-renders it
unchanged. Exactly one handler runs per update.
"""

from __future__ import annotations

from typing import Callable, Mapping

from .components import ComponentNode, set_attribute

SPECIAL_PARAM = "param2"

Render = Callable[[ComponentNode], str]


class ParamInterceptor:
    unit = "pathtrace.ajax.ParamInterceptor"

    def intercept(self, params: Mapping[str, list[str]]) -> bool:
        return SPECIAL_PARAM in params


class SpecialAjaxHandler:
    unit = "pathtrace.ajax.SpecialAjaxHandler"

    def handle(self, node: ComponentNode, render: Render) -> str:
        set_attribute(node, "styleClass", "special")
        return render(node)


class DefaultAjaxHandler:
    unit = "pathtrace.ajax.DefaultAjaxHandler"

    def handle(self, node: ComponentNode, render: Render) -> str:
        return render(node)
