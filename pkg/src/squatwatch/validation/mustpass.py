"""Must-pass control entries and their placement inside a chunk."""
import dataclasses
import enum
import math
from typing import AbstractSet, List, Optional, Sequence, Tuple, Union

from squatwatch.domains import structure
from squatwatch.expansion import pairs as pairs_lib
from squatwatch.squatting import brands as brands_lib
from squatwatch.squatting import detectors

ENTRIES_PER_CHUNK = 4
POOL_SIZE = 100
_FULL_CHUNK = 100


class Expectation(enum.Enum):
  BENIGN = 'benign'
  SQUAT = 'squat'


@dataclasses.dataclass(frozen=True)
class MustPassEntry:
  fqdn: structure.Fqdn
  expected: Expectation
  # Brand the entry was derived from; the expected target of a squat.
  provenance: str

  def __post_init__(self):
    if self.expected is Expectation.BENIGN and self.fqdn.raw != self.provenance:
      raise ValueError(
          f'benign entry {self.fqdn.raw} must be its brand {self.provenance}')
    if self.expected is Expectation.SQUAT and (self.fqdn.registrable
                                               == self.provenance):
      raise ValueError(f'squat entry {self.fqdn.raw} is its own brand')


Augmented = List[Union[pairs_lib.DomainPair, MustPassEntry]]


def item_fqdn(item: Union[pairs_lib.DomainPair, MustPassEntry]) -> structure.Fqdn:
  return item.input if isinstance(item, pairs_lib.DomainPair) else item.fqdn


def _swap(label: str) -> Optional[str]:
  """Adjacent swap from the middle of the label, skipping equal letters."""
  if len(label) < 3:
    return None
  start = max(len(label) // 2 - 1, 0)
  for offset in range(len(label) - 1):
    i = (start + offset) % (len(label) - 1)
    if label[i] != label[i + 1]:
      swapped = label[:i] + label[i + 1] + label[i] + label[i + 2:]
      if structure.is_valid_label(swapped):
        return swapped
  return None


def permutation_squat(brand: brands_lib.Brand) -> Optional[structure.Fqdn]:
  """'amazon.com' -> 'amzaon.com'."""
  swapped = _swap(brand.label)
  if swapped is None:
    return None
  raw = f'{swapped}.{brand.suffix}'
  return structure.Fqdn(s='', d=swapped, sx=brand.suffix, raw=raw)


def select_must_pass(pool: brands_lib.BrandSet, chunk_id: int,
    exclude: AbstractSet[str] = frozenset(),
    detector: Optional[detectors.BaselineDetector] = None
) -> List[MustPassEntry]:
  """Benign, squat, benign, squat from four consecutive pool brands.

  The window starts at `chunk_id * 4` and wraps around the pool. Brands
  whose entries collide with a name in `exclude` are passed over. A brand is
  only usable when the detector attributes its squat back to it; a better
  ranked brand with the same variant would make the expected target wrong.

  Raises:
    ValueError: Fewer than four usable brands.
  """
  detector = detector or detectors.detector_for(pool)
  usable = []
  for brand in pool:
    squat = permutation_squat(brand)
    if squat is None or squat.d in pool.label_index:
      continue
    verdict = detector.detect_with_hybrid(squat)
    if verdict is not None and verdict.target == brand.domain:
      usable.append((brand, squat))
  if len(usable) < ENTRIES_PER_CHUNK:
    raise ValueError(f'must-pass pool needs {ENTRIES_PER_CHUNK} brands, '
                     f'has {len(usable)} usable')
  start = (chunk_id * ENTRIES_PER_CHUNK) % len(usable)
  entries = []
  for offset in range(len(usable)):
    brand, squat = usable[(start + offset) % len(usable)]
    if brand.domain in exclude or squat.raw in exclude:
      continue
    if len(entries) % 2 == 0:
      benign = structure.Fqdn(s='', d=brand.label, sx=brand.suffix,
                              raw=brand.domain)
      entries.append(MustPassEntry(benign, Expectation.BENIGN, brand.domain))
    else:
      entries.append(MustPassEntry(squat, Expectation.SQUAT, brand.domain))
    if len(entries) == ENTRIES_PER_CHUNK:
      return entries
  raise ValueError(f'chunk {chunk_id} leaves fewer than '
                   f'{ENTRIES_PER_CHUNK} usable must-pass brands')


def injection_positions(n: int) -> Tuple[int, ...]:
  """1-indexed positions of the four entries in the n + 4 augmented list."""
  if n >= _FULL_CHUNK:
    step = n // ENTRIES_PER_CHUNK
    return tuple(k * step + 1 for k in range(1, ENTRIES_PER_CHUNK + 1))
  block = math.ceil(n / ENTRIES_PER_CHUNK)
  return tuple(
      min(k * block, n) + k for k in range(1, ENTRIES_PER_CHUNK + 1))


def inject(chunk: pairs_lib.Chunk, entries: Sequence[MustPassEntry]
          ) -> Tuple[Augmented, pairs_lib.Chunk]:
  """Returns the augmented list and the chunk with positions recorded."""
  if len(entries) != ENTRIES_PER_CHUNK:
    raise ValueError(
        f'expected {ENTRIES_PER_CHUNK} must-pass entries, got {len(entries)}')
  positions = injection_positions(len(chunk.pairs))
  augmented: Augmented = list(chunk.pairs)
  for position, entry in zip(positions, entries):
    augmented.insert(position - 1, entry)
  return augmented, dataclasses.replace(
      chunk, injected=tuple(zip(positions, entries)))


def strip(augmented: Augmented,
    chunk: pairs_lib.Chunk) -> List[pairs_lib.DomainPair]:
  """Removes the recorded positions, restoring the chunk's pairs."""
  drop = {position - 1 for position, _ in chunk.injected}
  return [item for i, item in enumerate(augmented) if i not in drop]
