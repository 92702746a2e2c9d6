"""
LLM endpoint client and prompt templates.

Wire contract: one HTTP POST per prompt with JSON body
`{"prompt": str, "max_tokens": int, "model": str}`, answered by
`{"text": str}`. Any hosted model can be put behind this shape with a thin
adapter. The endpoint URL and credential come from `ALIGN_LLM_URL` and
`ALIGN_LLM_KEY`.
"""

import os
import time
from importlib.resources import files
from pathlib import Path
from typing import Literal

import httpx
from pydantic import BaseModel, ConfigDict, Field, SecretStr

from commentary_align.core.errors import EndpointError
from commentary_align.core.logging import get_logger

logger = get_logger(__name__)

ENV_URL = "ALIGN_LLM_URL"
ENV_KEY = "ALIGN_LLM_KEY"

PromptName = Literal["summarize", "predict"]


class LlmEndpointConfig(BaseModel):
    """Where and how to reach the LLM endpoint."""

    model_config = ConfigDict(extra="forbid")

    base_url: str
    model_name: str = "llama-3-8b-instruct"
    api_key: SecretStr | None = Field(default=None, exclude=True)
    timeout_s: float = Field(default=30.0, gt=0.0)
    max_retries: int = Field(default=2, ge=0)
    retry_backoff_s: float = Field(default=0.5, ge=0.0)
    max_tokens: int = Field(default=512, ge=1)
    max_in_flight: int = Field(default=4, ge=1)
    prompt_template_paths: dict[PromptName, Path] = Field(default_factory=dict)

    @classmethod
    def from_env(cls, **overrides) -> "LlmEndpointConfig":
        """Build a config from `ALIGN_LLM_URL` / `ALIGN_LLM_KEY` plus overrides.

        Raises:
            EndpointError: If no URL is given by override or environment.
        """
        base_url = overrides.pop("base_url", None) or os.environ.get(ENV_URL)
        if not base_url:
            raise EndpointError(f"LLM mode needs an endpoint URL (set {ENV_URL})")
        api_key = overrides.pop("api_key", None) or os.environ.get(ENV_KEY)
        return cls(base_url=base_url, api_key=api_key, **overrides)


def load_template(name: PromptName, override: Path | None = None) -> str:
    """Read a prompt template, shipped with the package unless overridden."""
    if override is not None:
        return Path(override).read_text(encoding="utf-8")
    return (files("commentary_align.coarse") / "prompts" / f"{name}.txt").read_text(
        encoding="utf-8"
    )


def render_template(template: str, **values: object) -> str:
    """Substitute `{{name}}` placeholders."""
    rendered = template
    for name, value in values.items():
        rendered = rendered.replace("{{" + name + "}}", str(value))
    return rendered


class LlmClient:
    """Blocking client for the completion endpoint; safe to share across threads."""

    def __init__(
        self, config: LlmEndpointConfig, transport: httpx.BaseTransport | None = None
    ) -> None:
        self.config = config
        headers = {"Content-Type": "application/json"}
        if config.api_key is not None:
            headers["Authorization"] = f"Bearer {config.api_key.get_secret_value()}"
        self._client = httpx.Client(
            timeout=config.timeout_s, headers=headers, transport=transport
        )

    def __enter__(self) -> "LlmClient":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    def close(self) -> None:
        self._client.close()

    def template(self, name: PromptName) -> str:
        return load_template(name, self.config.prompt_template_paths.get(name))

    def complete(self, prompt: str) -> str:
        """Send one prompt and return the reply text.

        Transport failures and HTTP error statuses are retried up to
        `max_retries` times.

        Raises:
            EndpointError: When every attempt failed or the reply is malformed.
        """
        body = {
            "prompt": prompt,
            "max_tokens": self.config.max_tokens,
            "model": self.config.model_name,
        }
        attempts = self.config.max_retries + 1
        last_error: Exception | None = None
        for attempt in range(1, attempts + 1):
            try:
                response = self._client.post(self.config.base_url, json=body)
                response.raise_for_status()
                payload = response.json()
            except (httpx.HTTPError, ValueError) as exc:
                last_error = exc
                logger.warning("LLM request attempt %d/%d failed: %s", attempt, attempts, exc)
                if attempt < attempts and self.config.retry_backoff_s:
                    time.sleep(self.config.retry_backoff_s * attempt)
                continue

            if not isinstance(payload, dict) or not isinstance(payload.get("text"), str):
                raise EndpointError(f"malformed endpoint response: {str(payload)[:200]}")
            return payload["text"]

        raise EndpointError(f"LLM endpoint failed after {attempts} attempts: {last_error}")
