"""Application assembly: config file, registries, navigation, binding table."""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

from . import aop
from .components import ComponentRegistry, load_component_registry
from .interception import BoundAdvice, weave
from .pointcuts import load_aspect_config
from .template import TemplateDocument, parse_template


class AppError(Exception):
    pass


class AppConfigError(AppError):
    pass


class UnknownViewError(AppError):
    def __init__(self, view_id: str):
        super().__init__(f"no such view: {view_id!r}")
        self.view_id = view_id


class NavigationError(AppError):
    pass


@dataclass(frozen=True)
class AppConfig:
    pages_dir: Path
    components_file: Path
    navigation_file: Path
    aspects_file: Path
    instrumentation_default: bool = True
    bind_address: str = "127.0.0.1:8080"
    model_seed: dict[str, str] = field(default_factory=dict)
    overlay_file: Path | None = None


_CONFIG_KEYS = {
    "pages_dir",
    "components_file",
    "navigation_file",
    "aspects_file",
    "instrumentation_default",
    "bind_address",
    "model_seed",
    "overlay_file",
}


def load_app_config(path: str | Path) -> AppConfig:
    """Read app.json; relative paths resolve against the config file's folder."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise AppConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise AppConfigError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise AppConfigError(f"{path}: top-level value must be an object")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise AppConfigError(f"{path}: unknown keys {sorted(unknown)}")
    base = path.parent

    def resolve(key: str) -> Path:
        if key not in data:
            raise AppConfigError(f"{path}: missing key {key!r}")
        return (base / str(data[key])).resolve()

    overlay = data.get("overlay_file")
    config = AppConfig(
        pages_dir=resolve("pages_dir"),
        components_file=resolve("components_file"),
        navigation_file=resolve("navigation_file"),
        aspects_file=resolve("aspects_file"),
        instrumentation_default=bool(data.get("instrumentation_default", True)),
        bind_address=str(data.get("bind_address", "127.0.0.1:8080")),
        model_seed={str(k): str(v) for k, v in dict(data.get("model_seed", {})).items()},
        overlay_file=(base / str(overlay)).resolve() if overlay else None,
    )
    missing = [
        p for p in (config.pages_dir, config.components_file,
                    config.navigation_file, config.aspects_file)
        if not p.exists()
    ]
    if missing:
        raise AppConfigError(f"{path}: missing paths {[str(p) for p in missing]}")
    return config


def load_navigation(text: str) -> dict[tuple[str, str], str]:
    """One rule per line: from<TAB>outcome<TAB>to. Blank and # lines skipped."""
    rules: dict[tuple[str, str], str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = raw.split("\t")
        if len(parts) != 3 or not all(p.strip() for p in parts):
            raise NavigationError(f"line {lineno}: expected from<TAB>outcome<TAB>to")
        key = (parts[0].strip(), parts[1].strip())
        if key in rules:
            raise NavigationError(f"line {lineno}: duplicate rule for {key}")
        rules[key] = parts[2].strip()
    return rules


class NavigationHandler:
    unit = "pathtrace.app.NavigationHandler"

    def __init__(self, rules: dict[tuple[str, str], str]):
        self.rules = rules

    def handle_navigation(self, from_view: str, outcome: str) -> str | None:
        if not outcome:
            return None
        return self.rules.get((from_view, outcome))


class Application:
    """Immutable app wiring plus the one swappable piece: the binding table."""

    def __init__(self, config: AppConfig):
        self.config = config
        self.registry: ComponentRegistry = load_component_registry(
            config.components_file.read_text(encoding="utf-8")
        )
        self.navigation = NavigationHandler(
            load_navigation(config.navigation_file.read_text(encoding="utf-8"))
        )
        self.aspects = aop.default_aspects()
        self._bindings: tuple[BoundAdvice, ...] = self._load_bindings()
        self._template_lock = threading.Lock()
        self._templates: dict[str, TemplateDocument] = {}

    def _load_bindings(self) -> tuple[BoundAdvice, ...]:
        config = load_aspect_config(self.config.aspects_file.read_text(encoding="utf-8"))
        return weave(config, self.aspects)

    @property
    def bindings(self) -> tuple[BoundAdvice, ...]:
        return self._bindings

    def reload_aspects(self) -> tuple[int, int]:
        """Re-read aspects.json; swap the whole table at once. Returns counts."""
        old = self._bindings
        self._bindings = self._load_bindings()
        return len(old), len(self._bindings)

    def template(self, view_id: str) -> TemplateDocument:
        with self._template_lock:
            doc = self._templates.get(view_id)
        if doc is not None:
            return doc
        path = self.config.pages_dir / view_id
        if not path.is_file():
            raise UnknownViewError(view_id)
        doc = parse_template(path.read_text(encoding="utf-8"), view_id)
        with self._template_lock:
            self._templates.setdefault(view_id, doc)
        return doc
