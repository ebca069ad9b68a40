"""Exact cosine-similarity index over ranked reference domains.

Sidecar layout (little endian):
  magic b'SQWIDX01' | u32 id length | embedder id (utf-8) | u32 dimension |
  u64 entry count | records of (i64 rank, 256-byte domain, f64[dimension]).
"""
import os
import struct
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from absl import logging
from squatwatch import utils
from squatwatch.domains import names
from squatwatch.domains import suffixes
from squatwatch.expansion import embedder as embedder_lib

MAGIC = b'SQWIDX01'
_DOMAIN_BYTES = 256


class IndexMismatchError(ValueError):
  """Sidecar or query built with another embedder or dimension."""


class CorruptIndexError(ValueError):
  """Sidecar bytes do not follow the sidecar layout."""


def _record_dtype(dimension: int) -> np.dtype:
  return np.dtype([('rank', '<i8'), ('domain', f'S{_DOMAIN_BYTES}'),
                   ('vector', '<f8', (dimension,))])


class ReferenceIndex:
  """Read-only after construction; queries may run concurrently."""

  def __init__(self, embedder_id: str, domains: Sequence[str],
      ranks: Sequence[int], vectors: np.ndarray):
    vectors = np.array(vectors, dtype=np.float64)
    if not domains:
      raise ValueError('reference index needs at least one domain')
    if vectors.ndim != 2 or vectors.shape[0] != len(domains):
      raise ValueError(f'expected {len(domains)} vectors, got shape '
                       f'{vectors.shape}')
    if len(ranks) != len(domains):
      raise ValueError('every domain needs a rank')
    if len(set(domains)) != len(domains):
      raise ValueError('reference domains must be unique')
    if len(set(ranks)) != len(ranks):
      raise ValueError('reference ranks must be unique')
    self.embedder_id = embedder_id
    self.domains: Tuple[str, ...] = tuple(domains)
    self.ranks = np.asarray(ranks, dtype=np.int64)
    self.vectors = vectors
    self.vectors.setflags(write=False)
    self._domain_keys = np.array(self.domains)
    self._rank_of = dict(zip(self.domains, (int(r) for r in self.ranks)))

  @property
  def dimension(self) -> int:
    return self.vectors.shape[1]

  def __len__(self) -> int:
    return len(self.domains)

  def __contains__(self, domain: str) -> bool:
    return domain in self._rank_of

  def rank_of(self, domain: str) -> Optional[int]:
    return self._rank_of.get(domain)

  def vector_of(self, domain: str) -> np.ndarray:
    return self.vectors[self.domains.index(domain)]

  def save(self, path: str) -> None:
    records = np.zeros(len(self), dtype=_record_dtype(self.dimension))
    records['rank'] = self.ranks
    records['domain'] = [d.encode('ascii') for d in self.domains]
    records['vector'] = self.vectors
    identity = self.embedder_id.encode('utf-8')
    header = (MAGIC + struct.pack('<I', len(identity)) + identity +
              struct.pack('<IQ', self.dimension, len(self)))
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    tmp_path = path + '.tmp'
    with open(tmp_path, 'wb') as fh:
      fh.write(header)
      fh.write(records.tobytes())
    os.replace(tmp_path, path)

  @classmethod
  def load(cls, path: str,
      expected: Optional[embedder_lib.Embedder] = None) -> 'ReferenceIndex':
    with open(path, 'rb') as fh:
      blob = fh.read()
    identity, dimension, count, offset = _parse_header(blob)
    if expected is not None:
      _check_identity(identity, dimension, expected)
    dtype = _record_dtype(dimension)
    if len(blob) - offset != count * dtype.itemsize:
      raise CorruptIndexError(
          f'{path}: expected {count} records, found '
          f'{(len(blob) - offset) / dtype.itemsize:g}')
    records = np.frombuffer(blob, dtype=dtype, count=count, offset=offset)
    try:
      domains = [d.decode('ascii') for d in records['domain']]
      return cls(identity, domains, records['rank'].tolist(),
                 np.array(records['vector']))
    except (UnicodeDecodeError, ValueError) as e:
      raise CorruptIndexError(f'{path}: {e}') from e


def _parse_header(blob: bytes) -> Tuple[str, int, int, int]:
  if not blob.startswith(MAGIC):
    raise CorruptIndexError('bad magic bytes')
  try:
    offset = len(MAGIC)
    (id_length,) = struct.unpack_from('<I', blob, offset)
    offset += 4
    identity = blob[offset:offset + id_length].decode('utf-8')
    offset += id_length
    dimension, count = struct.unpack_from('<IQ', blob, offset)
    offset += struct.calcsize('<IQ')
  except (struct.error, UnicodeDecodeError) as e:
    raise CorruptIndexError(f'truncated header: {e}') from e
  if dimension < 1:
    raise CorruptIndexError(f'bad dimension {dimension}')
  return identity, dimension, count, offset


def read_header(path: str) -> Tuple[str, int, int]:
  """(embedder id, dimension, entry count) of a sidecar."""
  with open(path, 'rb') as fh:
    blob = fh.read(4096)
  identity, dimension, count, _ = _parse_header(blob)
  return identity, dimension, count


def _check_identity(identity: str, dimension: int,
    embedder: embedder_lib.Embedder) -> None:
  if identity != embedder.identity or dimension != embedder.dimension:
    raise IndexMismatchError(
        f'sidecar was built by {identity} (d={dimension}), not '
        f'{embedder.identity} (d={embedder.dimension}); rebuild required')


def build_index(reference: Iterable[Tuple[int, str]],
    embedder: embedder_lib.Embedder,
    rules: Optional[suffixes.SuffixRules] = None) -> ReferenceIndex:
  """Embeds each listed registrable domain once, best rank first.

  Raises:
    ValueError: The list is empty or no entry parses.
  """
  domains, ranks, texts = [], [], []
  seen = set()
  skipped = 0
  for rank, raw in sorted(reference):
    try:
      fqdn = names.parse(raw, rules)
    except ValueError:
      skipped += 1
      continue
    domain = fqdn.registrable
    if domain in seen or len(domain) > _DOMAIN_BYTES:
      skipped += 1
      continue
    seen.add(domain)
    domains.append(domain)
    ranks.append(rank)
    texts.append(embedder_lib.embedding_text(names.parse_fqdn(domain, rules)))
  if not domains:
    raise ValueError('reference list is empty')
  if skipped:
    logging.warning('Reference list: skipped %d unparsable or repeated rows',
                    skipped)
  utils.log_event('index', 'embed', entries=len(domains),
                  embedder=embedder.identity)
  return ReferenceIndex(embedder.identity, domains, ranks,
                        embedder.embed(texts))


def ensure_index(path: str, reference: Iterable[Tuple[int, str]],
    embedder: embedder_lib.Embedder,
    rules: Optional[suffixes.SuffixRules] = None) -> ReferenceIndex:
  """Builds and persists the index, replacing a corrupt sidecar.

  Raises:
    IndexMismatchError: An existing sidecar belongs to another embedder.
  """
  if os.path.exists(path):
    try:
      ReferenceIndex.load(path, expected=embedder)
    except CorruptIndexError as e:
      utils.log_event('index', 'corrupt_sidecar', level=logging.WARNING,
                      path=path, error=e)
  index = build_index(reference, embedder, rules)
  index.save(path)
  utils.log_event('index', 'saved', path=path, entries=len(index))
  return index


def nearest(index: ReferenceIndex, query: np.ndarray,
    k: int) -> List[Tuple[str, float]]:
  """Exact top-k by cosine similarity.

  Ties are broken by ascending rank, then domain. Asking for more entries
  than the index holds returns all of them.
  """
  if k < 1:
    raise ValueError(f'k must be at least 1, got {k}')
  query = np.asarray(query, dtype=np.float64)
  if query.shape != (index.dimension,):
    raise IndexMismatchError(
        f'query has shape {query.shape}, index dimension is {index.dimension}')
  similarities = index.vectors @ query
  if k < len(index):
    # Everything tied with the k-th best stays a candidate.
    threshold = np.partition(similarities, len(index) - k)[len(index) - k]
    candidates = np.flatnonzero(similarities >= threshold)
  else:
    candidates = np.arange(len(index))
  order = np.lexsort((index._domain_keys[candidates],
                      index.ranks[candidates], -similarities[candidates]))
  top = candidates[order[:k]]
  return [(index.domains[i], float(similarities[i])) for i in top]
