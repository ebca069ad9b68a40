"""Active-use filter over merged feed evidence."""
import collections
from typing import Dict, FrozenSet, Iterable, Optional, Set

from squatwatch.domains import names
from squatwatch.domains import structure
from squatwatch.domains import suffixes
from squatwatch.feeds import records

_ADDRESS_TYPES = frozenset({records.RrType.A, records.RrType.AAAA})


def merge_evidence(
    feed_records: Iterable[records.FeedRecord]
) -> Dict[str, FrozenSet[records.RrType]]:
  """Union of record kinds per name across every source."""
  merged = collections.defaultdict(set)
  for record in feed_records:
    merged[record.fqdn] |= record.rr_types
  return {fqdn: frozenset(kinds) for fqdn, kinds in merged.items()}


def _ancestors(fqdn: structure.Fqdn) -> Iterable[str]:
  """The name's parents down to, and including, its registrable domain."""
  labels = fqdn.subdomain_labels
  for i in range(1, len(labels) + 1):
    yield structure.join_parts('.'.join(labels[i:]), fqdn.d, fqdn.sx)


def filter_active(feed_records: Iterable[records.FeedRecord],
    rules: Optional[suffixes.SuffixRules] = None) -> Set[structure.Fqdn]:
  """Names with an address record and NS evidence.

  A/AAAA must be on the name itself. NS may sit on the name or on any
  ancestor inside the same registrable domain, since a zone delegates once
  at its apex.
  """
  evidence = merge_evidence(feed_records)
  active = set()
  for fqdn_text, kinds in evidence.items():
    if not kinds & _ADDRESS_TYPES:
      continue
    try:
      fqdn = names.parse_fqdn(fqdn_text, rules)
    except names.BareSuffixError:
      continue
    delegated = records.RrType.NS in kinds or any(
        records.RrType.NS in evidence.get(parent, ())
        for parent in _ancestors(fqdn))
    if delegated:
      active.add(fqdn)
  return active
