"""Chat backends: one generic HTTP chat-completion client and a replay stub.

Every backend limits concurrent `chat` calls with a semaphore and reports
token usage, estimating it at four characters per token when the provider
does not.
"""
import abc
import dataclasses
import math
import os
import threading
import time
from typing import Callable, Optional, Sequence, Union

import requests
from absl import logging
from squatwatch import utils


class BackendError(RuntimeError):
  """Base class of every backend failure."""
  event = 'backend_error'


class AuthError(BackendError):
  """Credential missing or rejected."""
  event = 'auth_error'


class TransportError(BackendError):
  """The provider could not be reached or kept failing."""
  event = 'transport_error'


class TransportTimeout(TransportError):
  event = 'transport_timeout'


class MalformedReply(BackendError):
  """The provider answered with a body that is not a chat completion."""
  event = 'malformed_reply'


@dataclasses.dataclass(frozen=True)
class LlmRequest:
  system_text: str
  user_text: str
  max_output_tokens: int = 4096
  temperature: float = 0.0
  # 1-indexed attempt of the chunk loop; not sent to the provider.
  attempt: int = 1

  def __post_init__(self):
    if not self.system_text or not self.user_text:
      raise ValueError('request texts must be non-empty')
    if not 0.0 <= self.temperature <= 2.0:
      raise ValueError(f'temperature must be in [0, 2], got {self.temperature}')
    if self.max_output_tokens < 1:
      raise ValueError(
          f'max_output_tokens must be positive, got {self.max_output_tokens}')
    if self.attempt < 1:
      raise ValueError(f'attempt must be positive, got {self.attempt}')


@dataclasses.dataclass(frozen=True)
class LlmResponse:
  text: str
  input_tokens: int
  output_tokens: int
  latency_ms: int

  def __post_init__(self):
    if self.input_tokens < 0 or self.output_tokens < 0:
      raise ValueError(f'token counts must be non-negative, got '
                       f'{self.input_tokens}/{self.output_tokens}')
    if self.latency_ms < 0:
      raise ValueError(f'latency must be non-negative, got {self.latency_ms}')


def estimate_tokens(text: str) -> int:
  return math.ceil(len(text) / 4)


class Backend(abc.ABC):
  """Shareable handle; at most `max_in_flight` calls run at once."""

  def __init__(self, max_in_flight: int = 4):
    if max_in_flight < 1:
      raise ValueError(f'max_in_flight must be positive, got {max_in_flight}')
    self.max_in_flight = max_in_flight
    self._slots = threading.BoundedSemaphore(max_in_flight)

  @property
  @abc.abstractmethod
  def name(self) -> str:
    """Model or backend id, used in logs and summaries."""

  @abc.abstractmethod
  def _complete(self, request: LlmRequest) -> LlmResponse:
    """One completion; latency is filled in by `chat`."""

  def chat(self, request: LlmRequest) -> LlmResponse:
    with self._slots:
      start = time.monotonic()
      response = self._complete(request)
      latency_ms = int((time.monotonic() - start) * 1000)
    return dataclasses.replace(response, latency_ms=latency_ms)


def chat(backend: Backend, request: LlmRequest) -> LlmResponse:
  return backend.chat(request)


class ChatCompletionBackend(Backend):
  """Provider-style `POST {endpoint}/chat/completions` client.

  HTTP 429 and 5xx replies, connection errors and timeouts are retried with
  exponential backoff up to `max_attempts` times. 401 and 403 are auth
  errors; other 4xx replies are not retried.
  """

  def __init__(self, endpoint: str, model: str,
      api_key_env: str = 'SQUATWATCH_API_KEY', max_in_flight: int = 4,
      timeout: float = 60.0, max_attempts: int = 3,
      backoff_seconds: float = 1.0,
      session: Optional[requests.Session] = None,
      sleep: Callable[[float], None] = time.sleep,
      environ: Optional[Callable[[str], Optional[str]]] = None):
    super().__init__(max_in_flight)
    if max_attempts < 1:
      raise ValueError(f'max_attempts must be positive, got {max_attempts}')
    self._url = endpoint.rstrip('/') + '/chat/completions'
    self._model = model
    self._api_key_env = api_key_env
    self._timeout = timeout
    self._max_attempts = max_attempts
    self._backoff_seconds = backoff_seconds
    self._session = session or requests.Session()
    self._sleep = sleep
    self._environ = environ or os.environ.get

  @property
  def name(self) -> str:
    return self._model

  def _payload(self, request: LlmRequest) -> dict:
    return {
        'model': self._model,
        'messages': [
            {'role': 'system', 'content': request.system_text},
            {'role': 'user', 'content': request.user_text},
        ],
        'temperature': request.temperature,
        'max_tokens': request.max_output_tokens,
    }

  def _post(self, request: LlmRequest, api_key: str) -> requests.Response:
    last_error: BackendError = TransportError('no attempt made')
    for attempt in range(1, self._max_attempts + 1):
      if attempt > 1:
        self._sleep(self._backoff_seconds * 2**(attempt - 2))
      try:
        reply = self._session.post(
            self._url, json=self._payload(request),
            headers={'Authorization': f'Bearer {api_key}'},
            timeout=self._timeout)
      except requests.Timeout as e:
        last_error = TransportTimeout(f'{self._url} timed out: {e}')
      except requests.RequestException as e:
        last_error = TransportError(f'{self._url} unreachable: {e}')
      else:
        if reply.status_code in (401, 403):
          raise AuthError(f'{self._url} rejected the credential '
                          f'(HTTP {reply.status_code})')
        if reply.status_code == 429 or reply.status_code >= 500:
          last_error = TransportError(f'{self._url} returned HTTP '
                                      f'{reply.status_code}')
        elif reply.status_code >= 400:
          raise TransportError(
              f'{self._url} returned HTTP {reply.status_code}')
        else:
          return reply
      logging.debug('Chat attempt %d/%d failed: %s', attempt,
                    self._max_attempts, last_error)
    raise last_error

  def _complete(self, request: LlmRequest) -> LlmResponse:
    api_key = self._environ(self._api_key_env)
    if not api_key:
      raise AuthError(f'environment variable {self._api_key_env} is not set')
    reply = self._post(request, api_key)
    try:
      body = reply.json()
      text = body['choices'][0]['message']['content']
    except (ValueError, KeyError, IndexError, TypeError) as e:
      raise MalformedReply(f'not a chat completion: {e}') from e
    if not isinstance(text, str):
      raise MalformedReply(f'completion content is {type(text).__name__}')
    usage = body.get('usage') or {}
    input_tokens = usage.get('prompt_tokens')
    if input_tokens is None:
      input_tokens = estimate_tokens(request.system_text + request.user_text)
    output_tokens = usage.get('completion_tokens')
    if output_tokens is None:
      output_tokens = estimate_tokens(text)
    return LlmResponse(
        text=text,
        input_tokens=int(input_tokens),
        output_tokens=int(output_tokens),
        latency_ms=0)


class ScriptedBackend(Backend):
  """Replays fixed replies in order, repeating the last one.

  An exception in the script is raised instead of replying.
  """

  def __init__(self, replies: Sequence[Union[str, BackendError]],
      max_in_flight: int = 4):
    super().__init__(max_in_flight)
    if not replies:
      raise ValueError('a scripted backend needs at least one reply')
    self._replies = tuple(replies)
    self._lock = threading.Lock()
    self.requests = []

  @property
  def name(self) -> str:
    return 'scripted'

  def _complete(self, request: LlmRequest) -> LlmResponse:
    with self._lock:
      reply = self._replies[min(len(self.requests), len(self._replies) - 1)]
      self.requests.append(request)
    if isinstance(reply, BaseException):
      raise reply
    return LlmResponse(
        text=reply,
        input_tokens=estimate_tokens(request.system_text + request.user_text),
        output_tokens=estimate_tokens(reply),
        latency_ms=0)


def log_failure(error: BackendError, chunk: Optional[int] = None,
    attempt: Optional[int] = None) -> None:
  utils.log_event('trv', error.event, chunk=chunk, level=logging.WARNING,
                  attempt=attempt, error=type(error).__name__)
