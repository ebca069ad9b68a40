"""Input-proximate pairs, their global sort and the fixed-size chunks."""
import concurrent.futures
import dataclasses
import os
from typing import Iterable, List, Optional, Sequence, Tuple

from squatwatch import utils
from squatwatch.domains import structure
from squatwatch.expansion import embedder as embedder_lib
from squatwatch.expansion import index as index_lib

DEFAULT_CHUNK_SIZE = 100
_BATCH = 512


@dataclasses.dataclass(frozen=True)
class DomainPair:
  input: structure.Fqdn
  # Nearest reference registrable domain.
  proximate: str
  similarity: float
  # The k nearest references, proximate first.
  neighbors: Tuple[str, ...] = ()

  def __post_init__(self):
    if not -1.0 - 1e-9 <= self.similarity <= 1.0 + 1e-9:
      raise ValueError(f'similarity out of range: {self.similarity}')
    if self.neighbors and self.neighbors[0] != self.proximate:
      raise ValueError(
          f'first neighbor {self.neighbors[0]} is not {self.proximate}')


@dataclasses.dataclass(frozen=True)
class Chunk:
  id: int
  pairs: Tuple[DomainPair, ...]
  # (1-indexed augmented position, must-pass entry), set by injection.
  injected: Tuple[Tuple[int, object], ...] = ()

  def __post_init__(self):
    positions = [position for position, _ in self.injected]
    if any(b <= a for a, b in zip(positions, positions[1:])):
      raise ValueError(f'injected positions must increase: {positions}')

  @property
  def references(self) -> Tuple[str, ...]:
    """Every pair's neighbors, deduplicated in first-seen order."""
    seen = {}
    for pair in self.pairs:
      for domain in pair.neighbors or (pair.proximate,):
        seen.setdefault(domain, None)
    return tuple(seen)


def _pair_batch(batch: Sequence[structure.Fqdn],
    index: index_lib.ReferenceIndex, embedder: embedder_lib.Embedder,
    k: int) -> List[DomainPair]:
  vectors = embedder.embed([embedder_lib.embedding_text(f) for f in batch])
  out = []
  for fqdn, vector in zip(batch, vectors):
    ranked = index_lib.nearest(index, vector, k)
    out.append(DomainPair(input=fqdn, proximate=ranked[0][0],
                          similarity=ranked[0][1],
                          neighbors=tuple(domain for domain, _ in ranked)))
  return out


def pair_inputs(inputs: Iterable[structure.Fqdn],
    index: index_lib.ReferenceIndex, embedder: embedder_lib.Embedder,
    k: int = 1, workers: Optional[int] = None) -> List[DomainPair]:
  """Pairs every input with its nearest reference, keeping exact matches.

  Inputs are deduplicated and processed in name order, so the result does
  not depend on iteration order. `k` neighbors are kept per pair for the
  prompt's reference list.
  """
  ordered = sorted(set(inputs), key=lambda fqdn: fqdn.raw)
  batches = [ordered[i:i + _BATCH] for i in range(0, len(ordered), _BATCH)]
  workers = workers or os.cpu_count() or 1
  with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
    results = pool.map(lambda b: _pair_batch(b, index, embedder, k), batches)
    pairs = [pair for batch in results for pair in batch]
  utils.log_event('dnx', 'paired', pairs=len(pairs), k=k)
  return pairs


def sort_and_chunk(pairs: Iterable[DomainPair],
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    by_proximate: bool = True) -> List[Chunk]:
  """Sorts by (proximate, input) and cuts consecutive chunks.

  With `by_proximate` off the order is by input name alone.
  """
  if chunk_size < 1:
    raise ValueError(f'chunk_size must be at least 1, got {chunk_size}')
  if by_proximate:
    key = lambda pair: (pair.proximate, pair.input.raw)
  else:
    key = lambda pair: pair.input.raw
  ordered = sorted(pairs, key=key)
  return [
      Chunk(id=i, pairs=tuple(ordered[start:start + chunk_size]))
      for i, start in enumerate(range(0, len(ordered), chunk_size))
  ]
