"""Validated settings shared by every command."""
import dataclasses
import os
from typing import Mapping, Optional, Tuple

from squatwatch.domains import structure
from squatwatch.llm import oracle
from squatwatch.report import cost as cost_lib

BACKENDS = ('oracle', 'chat')


class ConfigError(ValueError):
  """A setting is out of range or a path the command needs is unreadable."""


def parse_quotas(items) -> Mapping[str, int]:
  """['typo=369', 'bit=136'] -> {'typo': 369, 'bit': 136}."""
  quotas = {}
  for item in items:
    name, sep, count = item.partition('=')
    name = name.strip()
    if not sep or not count.strip().lstrip('-').isdigit():
      raise ConfigError(f'quota must look like type=count, not: {item!r}')
    if name not in structure.TYPE_VOCABULARY:
      raise ConfigError(f'unknown squatting type in quota: {name!r}')
    quotas[name] = int(count)
  return quotas


@dataclasses.dataclass(frozen=True)
class PipelineConfig:
  # Feeds.
  ct_paths: Tuple[str, ...] = ()
  pdns_paths: Tuple[str, ...] = ()
  zone_paths: Tuple[str, ...] = ()
  # First-seen store; empty keeps no history, so every active name is new.
  seen_path: str = ''
  # Tranco-style `rank,domain` list.
  reference_path: str = ''
  # Brands (and must-pass pool) come from the top of the reference list.
  brand_limit: int = 1000
  index_path: str = 'reference.sqwidx'
  embedder: str = 'ngram-hash'
  embedding_endpoint: str = ''
  embedding_api_key_env: str = 'SQUATWATCH_EMBEDDING_API_KEY'
  neighbors: int = 3
  chunk_size: int = 100
  max_attempts: int = 3
  backend: str = 'oracle'
  endpoint: str = ''
  model: str = ''
  api_key_env: str = 'SQUATWATCH_API_KEY'
  max_in_flight: int = 4
  timeout: float = 60.0
  faults: oracle.FaultProfile = oracle.NO_FAULTS
  allowlist_path: str = ''
  dns_check: bool = False
  cost_model: str = 'gpt-3.5'
  input_rate: Optional[float] = None
  output_rate: Optional[float] = None
  input_path: str = ''
  output_path: str = ''
  summary_path: str = ''
  plot_path: str = ''
  dataset_path: str = ''
  quotas: Mapping[str, int] = dataclasses.field(default_factory=dict)
  benign: int = 0
  dnx: bool = True
  trv: bool = True
  seed: int = 0
  # 0 picks the default: processor count for pairing, backend limit for chunks.
  workers: int = 0

  def __post_init__(self):
    """Raises ConfigError if a knob is out of range."""
    positive = ('brand_limit', 'neighbors', 'chunk_size', 'max_attempts',
                'max_in_flight')
    for name in positive:
      value = getattr(self, name)
      if value < 1:
        raise ConfigError(f'{name} must be at least 1, got {value}')
    for name in ('benign', 'workers'):
      value = getattr(self, name)
      if value < 0:
        raise ConfigError(f'{name} must be non-negative, got {value}')
    if self.timeout <= 0:
      raise ConfigError(f'timeout must be positive, got {self.timeout}')
    if self.backend not in BACKENDS:
      raise ConfigError(
          f'backend must be one of {", ".join(BACKENDS)}, not: {self.backend!r}')
    if self.backend == 'chat' and not (self.endpoint and self.model):
      raise ConfigError('the chat backend needs an endpoint and a model')
    for name, count in self.quotas.items():
      if count < 0:
        raise ConfigError(f'quota for {name} must be non-negative, got {count}')
    try:
      self.pricing()
    except ValueError as e:
      raise ConfigError(str(e)) from e

  def pricing(self) -> cost_lib.CostModel:
    return cost_lib.cost_model(self.cost_model, self.input_rate,
                               self.output_rate)

  @property
  def feed_paths(self) -> Tuple[str, ...]:
    return self.ct_paths + self.pdns_paths + self.zone_paths

  def require_readable(self, *fields: str) -> None:
    """Raises ConfigError unless each named path field is a readable file."""
    for field in fields:
      value = getattr(self, field)
      paths = value if isinstance(value, tuple) else (value,)
      for path in paths:
        if not path:
          raise ConfigError(f'--{field} is required for this command')
        if not os.path.isfile(path) or not os.access(path, os.R_OK):
          raise ConfigError(f'--{field}: cannot read {path}')

  def require_set(self, *fields: str) -> None:
    for field in fields:
      if not getattr(self, field):
        raise ConfigError(f'--{field} is required for this command')
