"""Component instances, the tag registry, and the HTML renderers.

Every attribute write goes through set_attribute, which routes the call
through the dispatcher as a ``set<Name>`` join point on the component's
unit path; renderers are dispatched under their own unit path with method
``encode``. That single funnel is what makes interception complete.
"""

from __future__ import annotations

import configparser
import html
import io
from dataclasses import dataclass, field

from . import model as model_mod
from .interception import dispatch
from .pointcuts import JoinPointId
from .template import SourceLocation, TagNode


class ComponentError(Exception):
    pass


class UnknownTagError(ComponentError):
    def __init__(self, tag: str):
        super().__init__(f"tag {tag!r} is not registered")
        self.tag = tag


class MissingRendererError(ComponentError):
    def __init__(self, renderer_path: str):
        super().__init__(f"no renderer for {renderer_path!r}")
        self.renderer_path = renderer_path


class RegistryError(ComponentError):
    pass


@dataclass
class ComponentNode:
    id: str
    type_path: str
    tag: str
    attributes: dict[str, str] = field(default_factory=dict)
    value: str = ""
    valid: bool = True
    children: list["ComponentNode"] = field(default_factory=list)
    location: SourceLocation | None = None
    binding: str | None = None
    submitted: str | None = None

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()

    def find(self, component_id: str) -> "ComponentNode | None":
        for node in self.walk():
            if node.id == component_id:
                return node
        return None


@dataclass(frozen=True)
class RegistryEntry:
    tag: str
    type_path: str
    renderer_path: str
    tag_unit: str
    attributes: tuple[str, ...]
    defaults: tuple[tuple[str, str], ...]
    input: bool = False


class ComponentRegistry:
    def __init__(self, entries: dict[str, RegistryEntry]):
        self.entries = entries

    def lookup(self, tag: str) -> RegistryEntry:
        entry = self.entries.get(tag)
        if entry is None:
            raise UnknownTagError(tag)
        return entry


def tag_unit_for(type_path: str) -> str:
    """demo.component.html.Calendar -> demo.taglib.CalendarTag"""
    parts = type_path.split(".")
    return f"{parts[0]}.taglib.{parts[-1]}Tag"


def load_component_registry(text: str) -> ComponentRegistry:
    """Parse the components config: one section per tag, key=value pairs.

    Recognized keys: type, renderer, attributes (comma list), input (bool),
    default.<name> = <value>.
    """
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise RegistryError(str(exc)) from exc
    entries: dict[str, RegistryEntry] = {}
    for tag in parser.sections():
        section = parser[tag]
        if "type" not in section or "renderer" not in section:
            raise RegistryError(f"tag {tag!r} needs both 'type' and 'renderer'")
        type_path = section["type"].strip()
        if type_path.count(".") < 2:
            raise RegistryError(f"tag {tag!r}: type path {type_path!r} too short")
        attributes = tuple(
            name.strip() for name in section.get("attributes", "").split(",") if name.strip()
        )
        defaults = tuple(
            (key[len("default."):], section[key])
            for key in section
            if key.startswith("default.")
        )
        entries[tag] = RegistryEntry(
            tag=tag,
            type_path=type_path,
            renderer_path=section["renderer"].strip(),
            tag_unit=tag_unit_for(type_path),
            attributes=attributes,
            defaults=defaults,
            input=section.getboolean("input", fallback=False),
        )
    return ComponentRegistry(entries)


def setter_name(attribute: str) -> str:
    return "set" + attribute[:1].upper() + attribute[1:]


def set_attribute(node: ComponentNode, name: str, value: str) -> ComponentNode:
    jp = JoinPointId(node.type_path, setter_name(name), 1)
    text = str(value)

    def write():
        node.attributes[name] = text
        if name == "id":
            node.id = text
        elif name == "value":
            node.value = text
        return node

    return dispatch(jp, write, args=(text,), target=node, location=node.location)


class IdAllocator:
    """Hands out auto_<n> ids in document order within one view build."""

    def __init__(self):
        self._next = 0

    def allocate(self) -> str:
        self._next += 1
        return f"auto_{self._next}"


def create_component(
    registry: ComponentRegistry, tag: TagNode, ids: IdAllocator | None = None
) -> ComponentNode:
    """Build the component for a template tag, defaults first, then attributes."""
    ids = ids or IdAllocator()
    entry = registry.lookup(tag.tag)
    template_attrs = dict(tag.attributes)
    component_id = template_attrs.get("id") or ids.allocate()
    node = ComponentNode(
        id=component_id, type_path=entry.type_path, tag=tag.name, location=tag.location
    )
    jp = JoinPointId(entry.tag_unit, "createComponent", 0)

    def build():
        for attr_name, attr_value in entry.defaults:
            set_attribute(node, attr_name, attr_value)
        for attr_name, attr_value in template_attrs.items():
            set_attribute(node, attr_name, attr_value)
        if "id" not in template_attrs:
            set_attribute(node, "id", component_id)
        if model_mod.is_value_expression(node.attributes.get("value", "")):
            node.binding = node.attributes["value"]
        return node

    dispatch(jp, build, target=node, location=tag.location)
    for child in tag.children:
        if isinstance(child, TagNode):
            node.children.append(create_component(registry, child, ids))
    return node


def _esc(value: str) -> str:
    return html.escape(value, quote=True)


class InputTextRenderer:
    def encode(self, node: ComponentNode, encode_child) -> str:
        out = io.StringIO()
        out.write(f'<input type="text" id="{_esc(node.id)}" value="{_esc(node.value)}"')
        if "name" in node.attributes:
            out.write(f' name="{_esc(node.attributes["name"])}"')
        style = node.attributes.get("styleClass", "")
        if style:
            out.write(f' class="{_esc(style)}"')
        out.write(f' data-comp="{_esc(node.type_path)}"/>')
        return out.getvalue()


class CalendarRenderer:
    def encode(self, node: ComponentNode, encode_child) -> str:
        style = node.attributes.get("styleClass", "")
        classes = f' class="{_esc(style)}"' if style else ""
        return (
            f'<div id="{_esc(node.id)}"{classes} data-comp="{_esc(node.type_path)}">'
            f'<span class="cal-day">{_esc(node.value)}</span></div>'
        )


class PanelRenderer:
    def encode(self, node: ComponentNode, encode_child) -> str:
        style = node.attributes.get("styleClass", "")
        classes = f' class="{_esc(style)}"' if style else ""
        inner = "".join(encode_child(child) for child in node.children)
        return (
            f'<div id="{_esc(node.id)}"{classes} data-comp="{_esc(node.type_path)}">'
            f"{inner}</div>"
        )


class CommandButtonRenderer:
    def encode(self, node: ComponentNode, encode_child) -> str:
        label = node.value or node.attributes.get("label", "")
        return (
            f'<button type="submit" id="{_esc(node.id)}" name="{_esc(node.id)}" '
            f'value="{_esc(label)}" data-comp="{_esc(node.type_path)}">'
            f"{_esc(label)}</button>"
        )


class MessagesRenderer:
    def encode(self, node: ComponentNode, encode_child) -> str:
        items = "".join(
            f"<li>{_esc(line)}</li>" for line in node.value.split("\n") if line
        )
        return (
            f'<ul id="{_esc(node.id)}" class="messages" '
            f'data-comp="{_esc(node.type_path)}">{items}</ul>'
        )


_RENDERERS = {
    "InputTextRenderer": InputTextRenderer(),
    "CalendarRenderer": CalendarRenderer(),
    "PanelRenderer": PanelRenderer(),
    "CommandButtonRenderer": CommandButtonRenderer(),
    "MessagesRenderer": MessagesRenderer(),
}


def renderer_for(renderer_path: str):
    renderer = _RENDERERS.get(renderer_path.rsplit(".", 1)[-1])
    if renderer is None:
        raise MissingRendererError(renderer_path)
    return renderer


def render_component(node: ComponentNode, registry: ComponentRegistry) -> str:
    entry = registry.lookup(_local_tag(node.tag))
    renderer = renderer_for(entry.renderer_path)
    jp = JoinPointId(entry.renderer_path, "encode", 1)

    def encode():
        return renderer.encode(node, lambda child: render_component(child, registry))

    return dispatch(jp, encode, args=(node,), target=node, location=node.location)


def _local_tag(name: str) -> str:
    return name.split(":", 1)[-1]
