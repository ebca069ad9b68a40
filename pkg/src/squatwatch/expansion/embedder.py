"""Name embedders: a seeded n-gram hashing default and a remote provider."""
import abc
import hashlib
import os
import re
from typing import Callable, Optional, Sequence

import numpy as np
import requests
from absl import logging
from squatwatch.domains import names
from squatwatch.domains import structure
from squatwatch.domains import suffixes

DEFAULT_DIMENSION = 256
DEFAULT_SEED = 0
_NGRAM_SIZES = (2, 3)
_REMOTE_SPEC = re.compile(r'^remote:(?P<model>[^:]+):d(?P<dim>\d+)$')


class EmbeddingError(RuntimeError):
  """The embedding provider could not be reached or answered badly."""


def embedding_text(fqdn: structure.Fqdn) -> str:
  """`s.d` with the suffix dropped, so TLD squats land near their brand."""
  return structure.join_parts(fqdn.s, fqdn.d, '')


class Embedder(abc.ABC):
  """Maps texts to unit vectors of a fixed dimension."""

  @property
  @abc.abstractmethod
  def identity(self) -> str:
    """Stable id; index sidecars are keyed by it."""

  @property
  @abc.abstractmethod
  def dimension(self) -> int:
    """Length of every returned vector."""

  @abc.abstractmethod
  def embed(self, texts: Sequence[str]) -> np.ndarray:
    """Returns a float64 array of shape [len(texts), dimension]."""

  def embed_one(self, text: str) -> np.ndarray:
    return self.embed([text])[0]


def _unit_rows(vectors: np.ndarray) -> np.ndarray:
  norms = np.linalg.norm(vectors, axis=1, keepdims=True)
  zero = norms[:, 0] == 0
  out = np.divide(vectors, norms, out=np.zeros_like(vectors),
                  where=norms != 0)
  # An all-zero row becomes the unit vector along the first axis.
  out[zero, 0] = 1.0
  return out


class NgramHashEmbedder(Embedder):
  """Signed feature hashing of character 2-grams and 3-grams.

  The text is padded as '^' + text + '$'. Each n-gram is hashed with a
  64-bit BLAKE2b keyed by the seed; the hash modulo the dimension picks the
  bucket and its top bit picks the sign. Counts are L2-normalized.
  """

  def __init__(self, dimension: int = DEFAULT_DIMENSION,
      seed: int = DEFAULT_SEED):
    if dimension < 1:
      raise ValueError(f'dimension must be positive, got {dimension}')
    if seed < 0:
      raise ValueError(f'seed must be non-negative, got {seed}')
    self._dimension = dimension
    self._seed = seed
    self._key = seed.to_bytes(8, 'little')

  @property
  def identity(self) -> str:
    return f'ngram-hash-v1:d{self._dimension}:s{self._seed}'

  @property
  def dimension(self) -> int:
    return self._dimension

  def _hash(self, gram: str) -> int:
    digest = hashlib.blake2b(gram.encode('utf-8'), digest_size=8,
                             key=self._key).digest()
    return int.from_bytes(digest, 'little')

  def _accumulate(self, text: str, row: np.ndarray) -> None:
    padded = '^' + text + '$'
    for size in _NGRAM_SIZES:
      for i in range(len(padded) - size + 1):
        value = self._hash(padded[i:i + size])
        row[value % self._dimension] += -1.0 if value >> 63 else 1.0

  def embed(self, texts: Sequence[str]) -> np.ndarray:
    vectors = np.zeros((len(texts), self._dimension), dtype=np.float64)
    for row, text in zip(vectors, texts):
      self._accumulate(text, row)
    return _unit_rows(vectors)


class RemoteEmbedder(Embedder):
  """OpenAI-style `POST {endpoint}/embeddings` provider.

  Returned vectors are unit-normalized; a vector of the wrong length is an
  error, so sidecars keyed by this embedder never mix dimensions.
  """

  def __init__(self, endpoint: str, model: str, dimension: int,
      api_key_env: str = 'SQUATWATCH_EMBEDDING_API_KEY',
      timeout: float = 30.0, batch_size: int = 256,
      session: Optional[requests.Session] = None,
      environ: Optional[Callable[[str], Optional[str]]] = None):
    if dimension < 1:
      raise ValueError(f'dimension must be positive, got {dimension}')
    self._endpoint = endpoint.rstrip('/')
    self._model = model
    self._dimension = dimension
    self._api_key_env = api_key_env
    self._timeout = timeout
    self._batch_size = batch_size
    self._session = session or requests.Session()
    self._environ = environ or os.environ.get

  @property
  def identity(self) -> str:
    return f'remote:{self._model}:d{self._dimension}'

  @property
  def dimension(self) -> int:
    return self._dimension

  def _request(self, texts: Sequence[str], api_key: str) -> np.ndarray:
    try:
      reply = self._session.post(
          f'{self._endpoint}/embeddings',
          headers={'Authorization': f'Bearer {api_key}'},
          json={'model': self._model, 'input': list(texts)},
          timeout=self._timeout)
      reply.raise_for_status()
      data = sorted(reply.json()['data'], key=lambda item: item['index'])
      vectors = np.array([item['embedding'] for item in data],
                         dtype=np.float64)
    except (requests.RequestException, ValueError, KeyError, TypeError) as e:
      raise EmbeddingError(f'embedding request failed: {e}') from e
    if vectors.shape != (len(texts), self._dimension):
      raise EmbeddingError(
          f'expected {len(texts)} vectors of dimension {self._dimension}, '
          f'got shape {vectors.shape}')
    if not np.all(np.isfinite(vectors)):
      raise EmbeddingError('provider returned non-finite values')
    return vectors

  def embed(self, texts: Sequence[str]) -> np.ndarray:
    api_key = self._environ(self._api_key_env)
    if not api_key:
      raise EmbeddingError(
          f'environment variable {self._api_key_env} is not set')
    parts = [np.zeros((0, self._dimension))]
    for start in range(0, len(texts), self._batch_size):
      batch = texts[start:start + self._batch_size]
      logging.debug('Embedding %d texts with %s', len(batch), self.identity)
      parts.append(self._request(batch, api_key))
    return _unit_rows(np.concatenate(parts))


def create_embedder(spec: str, endpoint: str = '',
    api_key_env: str = 'SQUATWATCH_EMBEDDING_API_KEY',
    seed: int = DEFAULT_SEED) -> Embedder:
  """'ngram-hash', 'ngram-hash:d<dim>' or 'remote:<model>:d<dim>'."""
  if spec == 'ngram-hash':
    return NgramHashEmbedder(seed=seed)
  if spec.startswith('ngram-hash:d'):
    return NgramHashEmbedder(int(spec[len('ngram-hash:d'):]), seed=seed)
  match = _REMOTE_SPEC.match(spec)
  if match:
    if not endpoint:
      raise ValueError(f'embedder {spec} needs an endpoint')
    return RemoteEmbedder(endpoint, match['model'], int(match['dim']),
                          api_key_env=api_key_env)
  raise ValueError(f'unknown embedder: {spec!r}')


def embed_local(name: str,
    rules: Optional[suffixes.SuffixRules] = None) -> np.ndarray:
  """Default local embedding of a raw domain name.

  A name without a registrable part ('amazon', 'co.uk') is embedded as
  normalized, like the `d` of a domain under some suffix.
  """
  try:
    text = embedding_text(names.parse(name, rules))
  except names.BareSuffixError:
    text = names.normalize(name)
  return NgramHashEmbedder().embed_one(text)
