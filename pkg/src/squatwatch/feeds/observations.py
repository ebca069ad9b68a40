"""Persistent first-seen store for newly observed names."""
import os
import time
from typing import AbstractSet, Dict, Mapping, Optional, Set

from squatwatch import utils
from squatwatch.domains import structure


class ObservationStore:
  """Sorted `fqdn<TAB>first_seen` file plus its in-memory mirror.

  First-seen values never change once written. The file is rewritten
  atomically, so a failed write leaves both the file and the mirror as they
  were.
  """

  def __init__(self, path: str):
    self.path = path
    self._seen: Dict[str, int] = {}

  @classmethod
  def load(cls, path: str) -> 'ObservationStore':
    store = cls(path)
    if not os.path.exists(path):
      return store
    with open(path, 'r', encoding='utf-8') as fh:
      for line_number, line in enumerate(fh, start=1):
        line = line.rstrip('\n')
        if not line:
          continue
        fqdn, sep, first_seen = line.partition('\t')
        if not sep or not first_seen.isdigit():
          raise ValueError(
              f'{path}:{line_number}: expected fqdn<TAB>first_seen, got {line!r}')
        store._seen[fqdn] = int(first_seen)
    return store

  @property
  def seen(self) -> Mapping[str, int]:
    return dict(self._seen)

  def __contains__(self, fqdn: str) -> bool:
    return fqdn in self._seen

  def __len__(self) -> int:
    return len(self._seen)

  def insert(self, first_seen: Mapping[str, int]) -> None:
    """Adds unseen names; names already present keep their timestamp."""
    updated = dict(self._seen)
    for fqdn, timestamp in first_seen.items():
      updated.setdefault(fqdn, timestamp)
    text = ''.join(f'{fqdn}\t{updated[fqdn]}\n' for fqdn in sorted(updated))
    utils.atomic_write_text(self.path, text)
    self._seen = updated


def new_observed(current: AbstractSet[structure.Fqdn],
    store: ObservationStore, now: Optional[int] = None,
    first_seen: Optional[Mapping[str, int]] = None) -> Set[structure.Fqdn]:
  """Returns names the store has not seen and records them.

  Args:
    current: Names observed in this run.
    store: Loaded observation store; updated in place.
    now: Fallback first-seen time; defaults to the wall clock.
    first_seen: Per-name first-seen times from the feeds, when known.

  Raises:
    OSError: The store could not be written. Nothing is inserted.
  """
  fresh = {fqdn for fqdn in current if fqdn.raw not in store}
  if not fresh:
    return fresh
  now = int(time.time()) if now is None else now
  first_seen = first_seen or {}
  store.insert({fqdn.raw: first_seen.get(fqdn.raw, now) for fqdn in fresh})
  return fresh
