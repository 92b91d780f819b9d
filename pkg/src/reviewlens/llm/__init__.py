"""Prompt templating, completion transport, caching, and output parsing."""

from .client import (
    Backend,
    ConfigurationError,
    FlakyBackend,
    HttpBackend,
    LlmClient,
    LlmError,
    LlmRequest,
    LlmResponse,
    ProceduralBackend,
    ReplayBackend,
    ResponseCache,
    RetryPolicy,
    ScriptedBackend,
    TransportError,
)
from .parsing import (
    LABEL_TO_SCORE,
    SCORE_TO_LABEL,
    SENTIMENT_LABELS,
    LabelError,
    ParseError,
    SchemaFieldError,
    first_json_object,
    parse_structured,
    score_from_label,
)
from .templates import (
    TEMPLATE_NAMES,
    PromptTemplate,
    RenderError,
    load_template,
    render,
)

__all__ = [
    "Backend",
    "ConfigurationError",
    "FlakyBackend",
    "HttpBackend",
    "LABEL_TO_SCORE",
    "LabelError",
    "LlmClient",
    "LlmError",
    "LlmRequest",
    "LlmResponse",
    "ParseError",
    "ProceduralBackend",
    "PromptTemplate",
    "RenderError",
    "ReplayBackend",
    "ResponseCache",
    "RetryPolicy",
    "SCORE_TO_LABEL",
    "SENTIMENT_LABELS",
    "SchemaFieldError",
    "ScriptedBackend",
    "TEMPLATE_NAMES",
    "TransportError",
    "first_json_object",
    "load_template",
    "parse_structured",
    "render",
    "score_from_label",
]
