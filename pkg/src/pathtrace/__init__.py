"""Server-side rendering framework with per-component provenance capture."""

from .app import AppConfig, Application, UnknownViewError, load_app_config
from .components import ComponentNode, ComponentRegistry, load_component_registry
from .interception import AdviceProtocolViolation, RequestContext, dispatch, use_context
from .lifecycle import RequestEnvelope, Response, process_request
from .pointcuts import JoinPointId, PointcutExpr, matches, parse_pointcut
from .provenance import (
    PhaseSummary,
    ProvenanceRecord,
    decode_page,
    encode_page,
    strip,
)
from .sessions import SessionStore
from .template import SourceLocation, parse_template, serialize

__version__ = "0.1.0"

__all__ = [
    "AdviceProtocolViolation",
    "AppConfig",
    "Application",
    "ComponentNode",
    "ComponentRegistry",
    "JoinPointId",
    "PhaseSummary",
    "PointcutExpr",
    "ProvenanceRecord",
    "RequestContext",
    "RequestEnvelope",
    "Response",
    "SourceLocation",
    "SessionStore",
    "UnknownViewError",
    "decode_page",
    "dispatch",
    "encode_page",
    "load_app_config",
    "load_component_registry",
    "matches",
    "parse_pointcut",
    "parse_template",
    "process_request",
    "serialize",
    "strip",
    "use_context",
    "__version__",
]
