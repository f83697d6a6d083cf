"""Zero-shot chat-model baseline for target classification."""

from .client import (
    CacheMiss,
    CachedClient,
    ConstantClient,
    GoldEchoClient,
    HTTPChatClient,
    ScriptedClient,
    TransportError,
    cache_key,
)
from .evaluate import ZeroShotResult, evaluate_zero_shot, query_with_retries
from .prompt import CANONICAL_ANSWERS, PROMPT_TEMPLATE, UNPARSEABLE, LLMVerdict, build_prompt, parse_response

__all__ = [
    "CANONICAL_ANSWERS",
    "CacheMiss",
    "CachedClient",
    "ConstantClient",
    "GoldEchoClient",
    "HTTPChatClient",
    "LLMVerdict",
    "PROMPT_TEMPLATE",
    "ScriptedClient",
    "TransportError",
    "UNPARSEABLE",
    "ZeroShotResult",
    "build_prompt",
    "cache_key",
    "evaluate_zero_shot",
    "parse_response",
    "query_with_retries",
]
