"""Bundled lookup tables used by the generators and detectors."""
import collections
import dataclasses
import functools
import os
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

_DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), 'data')


def _data_path(name: str) -> str:
  return os.path.join(_DATA_DIR, name)


def _read_rows(path: str) -> List[List[str]]:
  rows = []
  with open(path, 'r', encoding='utf-8') as fh:
    for line in fh:
      line = line.rstrip('\n')
      if not line or line.startswith('#'):
        continue
      rows.append(line.split('\t'))
  return rows


def _index(pairs: Iterable[Tuple[str, str]]) -> Dict[str, Tuple[str, ...]]:
  index = collections.defaultdict(list)
  for source, target in pairs:
    if target not in index[source]:
      index[source].append(target)
  return {source: tuple(targets) for source, targets in index.items()}


@dataclasses.dataclass(frozen=True)
class ConfusableTable:
  # (sequence, look-alike) pairs as listed.
  mappings: Tuple[Tuple[str, str], ...]

  def __post_init__(self):
    for source, target in self.mappings:
      if source == target:
        raise ValueError(f'confusable mapping is an identity: {source!r}')
      if source != source.casefold() or target != target.casefold():
        raise ValueError(
            f'confusable mapping is not case-folded: {source!r} -> {target!r}')

  @functools.cached_property
  def index(self) -> Dict[str, Tuple[str, ...]]:
    """Sequence to look-alikes, both directions."""
    return _index(list(self.mappings) + [(t, s) for s, t in self.mappings])

  @classmethod
  def load(cls, path: str = _data_path('confusables.tsv')) -> 'ConfusableTable':
    return cls(mappings=tuple((row[0], row[1]) for row in _read_rows(path)))


@dataclasses.dataclass(frozen=True)
class HomophoneTable:
  pairs: Tuple[Tuple[str, str], ...]

  def __post_init__(self):
    for token, replacement in self.pairs:
      if not token or not replacement or token == replacement:
        raise ValueError(f'bad homophone pair: {token!r} -> {replacement!r}')

  @functools.cached_property
  def index(self) -> Dict[str, Tuple[str, ...]]:
    """Token to replacements; reversed too when the replacement is a word."""
    reverse = [(r, t) for t, r in self.pairs if len(r) >= 2]
    return _index(list(self.pairs) + reverse)

  @classmethod
  def from_pairs(cls, pairs: Sequence[Tuple[str, str]]) -> 'HomophoneTable':
    return cls(pairs=tuple(pairs))

  @classmethod
  def load(cls, path: str = _data_path('homophones.tsv')) -> 'HomophoneTable':
    return cls(pairs=tuple((row[0], row[1]) for row in _read_rows(path)))


def load_keyboard(
    path: str = _data_path('keyboard_qwerty.tsv')) -> Mapping[str, str]:
  return {row[0]: row[1] for row in _read_rows(path)}


def load_keywords(path: str = _data_path('combo_keywords.txt')) -> Tuple[str, ...]:
  return tuple(row[0] for row in _read_rows(path))


@dataclasses.dataclass(frozen=True)
class GeneratorTables:
  """Everything the generators need, loaded once and shared read-only."""
  keyboard: Mapping[str, str]
  confusables: ConfusableTable
  homophones: HomophoneTable
  keywords: Tuple[str, ...]


@functools.lru_cache(maxsize=1)
def default_tables() -> GeneratorTables:
  return GeneratorTables(keyboard=load_keyboard(),
                         confusables=ConfusableTable.load(),
                         homophones=HomophoneTable.load(),
                         keywords=load_keywords())
