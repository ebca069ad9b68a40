"""Feed record types and per-stream parse accounting."""
import dataclasses
import enum
from typing import FrozenSet


class FeedSource(enum.Enum):
  CT_LOG = 'ct'
  PDNS = 'pdns'
  ZONE = 'zone'


class RrType(enum.Enum):
  NS = 'NS'
  A = 'A'
  AAAA = 'AAAA'


SUPPORTED_RR_TYPES = frozenset(RrType)


@dataclasses.dataclass(frozen=True)
class FeedRecord:
  # Normalized name.
  fqdn: str
  source: FeedSource
  rr_types: FrozenSet[RrType]
  # Seconds since the epoch, UTC. Zero when the feed carries no time.
  observed_at: int

  def __post_init__(self):
    if not self.rr_types <= SUPPORTED_RR_TYPES:
      raise ValueError(f'unsupported record kinds: {set(self.rr_types)}')
    if self.observed_at < 0:
      raise ValueError(f'negative timestamp: {self.observed_at}')


@dataclasses.dataclass
class ParseStats:
  """Line accounting for one stream.

  Every consumed line ends up as parsed, ignored (blank, comment, directive
  or unsupported record kind) or malformed, so the three always sum to
  `lines`. `rejected_names` counts names inside otherwise good lines that
  failed normalization.
  """
  lines: int = 0
  parsed: int = 0
  ignored: int = 0
  malformed: int = 0
  records: int = 0
  rejected_names: int = 0

  def merge(self, other: 'ParseStats') -> 'ParseStats':
    return ParseStats(*(a + b for a, b in zip(dataclasses.astuple(self),
                                              dataclasses.astuple(other))))

  @property
  def skipped(self) -> int:
    return self.ignored + self.malformed
