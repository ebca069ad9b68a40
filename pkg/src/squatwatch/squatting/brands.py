"""Ranked legitimate brand domains, read from a Tranco-style `rank,domain` CSV."""
import csv
import dataclasses
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

from absl import logging
from squatwatch import utils
from squatwatch.domains import names
from squatwatch.domains import suffixes


def read_ranked_list(path: str) -> List[Tuple[int, str]]:
  """Reads `rank,domain` rows; a non-numeric first row is taken as a header."""
  rows = []
  with utils.open_text(path) as fh:
    for line_number, row in enumerate(csv.reader(fh), start=1):
      if not row or not ''.join(row).strip():
        continue
      if len(row) < 2:
        raise ValueError(f'{path}:{line_number}: expected rank,domain')
      rank_text, domain = row[0].strip(), row[1].strip()
      if not rank_text.isdigit():
        if line_number == 1:
          continue
        raise ValueError(f'{path}:{line_number}: bad rank {rank_text!r}')
      rows.append((int(rank_text), domain))
  return rows


@dataclasses.dataclass(frozen=True)
class Brand:
  rank: int
  # Registrable domain, e.g. 'amazon.com'.
  domain: str
  label: str
  suffix: str


class BrandSet:
  """Brands in rank order, unique by registrable label.

  When two list entries share a label ('amazon.com', 'amazon.de') the better
  ranked one is the brand and the other is dropped.
  """

  def __init__(self, brands: Iterable[Brand]):
    self.brands: Tuple[Brand, ...] = tuple(brands)
    self.label_index: Dict[str, Brand] = {}
    self._by_domain: Dict[str, Brand] = {}
    previous_rank = 0
    for brand in self.brands:
      if brand.rank <= previous_rank:
        raise ValueError(f'brand ranks must increase, got {brand.rank} after '
                         f'{previous_rank}')
      if brand.label in self.label_index:
        raise ValueError(f'duplicate brand label: {brand.label}')
      previous_rank = brand.rank
      self.label_index[brand.label] = brand
      self._by_domain[brand.domain] = brand

  @classmethod
  def from_ranked(cls, rows: Iterable[Tuple[int, str]],
      rules: Optional[suffixes.SuffixRules] = None,
      limit: Optional[int] = None) -> 'BrandSet':
    brands = []
    seen_labels = set()
    skipped = 0
    for rank, domain in sorted(rows):
      if limit is not None and len(brands) >= limit:
        break
      try:
        fqdn = names.parse(domain, rules)
      except ValueError:
        skipped += 1
        continue
      if fqdn.d in seen_labels or (brands and rank <= brands[-1].rank):
        skipped += 1
        continue
      seen_labels.add(fqdn.d)
      brands.append(Brand(rank=rank, domain=fqdn.registrable, label=fqdn.d,
                          suffix=fqdn.sx))
    if skipped:
      logging.info('Brand list: skipped %d unparsable or repeated entries',
                   skipped)
    return cls(brands)

  @classmethod
  def load(cls, path: str, limit: Optional[int] = None,
      rules: Optional[suffixes.SuffixRules] = None) -> 'BrandSet':
    return cls.from_ranked(read_ranked_list(path), rules=rules, limit=limit)

  def __iter__(self) -> Iterator[Brand]:
    return iter(self.brands)

  def __len__(self) -> int:
    return len(self.brands)

  def top(self, n: int) -> 'BrandSet':
    return BrandSet(self.brands[:n])

  def get(self, domain: str) -> Optional[Brand]:
    return self._by_domain.get(domain)

  def is_brand(self, registrable_domain: str) -> bool:
    return registrable_domain in self._by_domain

  def suffixes(self) -> Tuple[str, ...]:
    return tuple(sorted({brand.suffix for brand in self.brands}))
