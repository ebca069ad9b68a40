"""Stream parsers for the three feed formats.

CT:   one JSON object per line, either flat
      {"all_domains": [...], "timestamp": 1704067200}
      or the certstream envelope
      {"message_type": "certificate_update",
       "data": {"leaf_cert": {"all_domains": [...]}, "seen": 1704067200.5}}.
pDNS: tab-separated `fqdn  rrtype  rdata  timestamp`.
Zone: DNS master-file subset with $ORIGIN, $TTL, '@', relative owners and
      owner inheritance from the previous line.

Parsers never raise on bad input; they count it in a ParseStats instead.
"""
import json
import os
import re
from typing import Dict, Iterable, List, Optional, Set, Tuple

import dns.exception
import dns.name
import dns.rdata
import dns.rdataclass
import dns.rdatatype
from absl import logging
from squatwatch.domains import names
from squatwatch.feeds import records

_TTL = re.compile(r'^(\d+[wdhms]?)+$', re.IGNORECASE)
_CLASSES = ('IN', 'CH', 'HS')
_ZONE_FILE_ENDINGS = ('.gz', '.zone', '.txt', '.db')


def _normalize_or_none(raw: str) -> Optional[str]:
  try:
    return names.normalize(raw)
  except names.MalformedNameError:
    return None


def _valid_rdata(rr_type: records.RrType, rdata: str,
    origin: Optional[dns.name.Name] = None) -> bool:
  try:
    dns.rdata.from_text(dns.rdataclass.IN, dns.rdatatype.from_text(
        rr_type.value), rdata, origin=origin)
  except (dns.exception.DNSException, ValueError):
    return False
  return True


def _ct_payload(obj) -> Optional[Tuple[List[str], float]]:
  """Returns (names, seconds) from either CT shape; None if malformed."""
  if not isinstance(obj, dict):
    return None
  if isinstance(obj.get('data'), dict):
    data = obj['data']
    leaf = data.get('leaf_cert')
    if not isinstance(leaf, dict):
      return None
    domains, timestamp = leaf.get('all_domains'), data.get('seen')
  else:
    domains, timestamp = obj.get('all_domains'), obj.get('timestamp')
  if not isinstance(domains, list) or not all(
      isinstance(domain, str) for domain in domains):
    return None
  if isinstance(timestamp, bool) or not isinstance(timestamp, (int, float)):
    return None
  if timestamp < 0:
    return None
  return domains, timestamp


def parse_ct_stream(lines: Iterable[str],
    stats: Optional[records.ParseStats] = None) -> List[records.FeedRecord]:
  """One record per certificate name, wildcard prefix removed."""
  stats = stats if stats is not None else records.ParseStats()
  out = []
  for line in lines:
    stats.lines += 1
    line = line.strip()
    if not line:
      stats.ignored += 1
      continue
    try:
      obj = json.loads(line)
    except ValueError:
      stats.malformed += 1
      continue
    if isinstance(obj, dict) and obj.get('message_type',
        'certificate_update') != 'certificate_update':
      # Heartbeats and other control messages.
      stats.ignored += 1
      continue
    payload = _ct_payload(obj)
    if payload is None:
      stats.malformed += 1
      continue
    domains, timestamp = payload
    stats.parsed += 1
    for domain in domains:
      if domain.startswith('*.'):
        domain = domain[2:]
      fqdn = _normalize_or_none(domain)
      if fqdn is None:
        stats.rejected_names += 1
        continue
      out.append(records.FeedRecord(fqdn=fqdn,
                                    source=records.FeedSource.CT_LOG,
                                    rr_types=frozenset(),
                                    observed_at=int(timestamp)))
  stats.records += len(out)
  return out


def parse_pdns_stream(lines: Iterable[str],
    stats: Optional[records.ParseStats] = None) -> List[records.FeedRecord]:
  """One record per NS/A/AAAA answer line; other kinds are skipped."""
  stats = stats if stats is not None else records.ParseStats()
  out = []
  for line in lines:
    stats.lines += 1
    line = line.rstrip('\r\n')
    if not line.strip() or line.lstrip().startswith('#'):
      stats.ignored += 1
      continue
    columns = line.split('\t')
    if len(columns) != 4:
      stats.malformed += 1
      continue
    raw_name, raw_type, rdata, raw_time = (c.strip() for c in columns)
    try:
      rr_type = records.RrType(raw_type.upper())
    except ValueError:
      stats.ignored += 1
      continue
    try:
      observed_at = int(raw_time)
    except ValueError:
      stats.malformed += 1
      continue
    fqdn = _normalize_or_none(raw_name)
    if fqdn is None:
      stats.rejected_names += 1
      stats.malformed += 1
      continue
    if observed_at < 0 or not _valid_rdata(rr_type, rdata, dns.name.root):
      stats.malformed += 1
      continue
    stats.parsed += 1
    out.append(records.FeedRecord(fqdn=fqdn,
                                  source=records.FeedSource.PDNS,
                                  rr_types=frozenset({rr_type}),
                                  observed_at=observed_at))
  stats.records += len(out)
  return out


def zone_origin_from_path(path: str) -> str:
  """'com.zone', 'com.txt.gz' and 'com' all give 'com.'."""
  base = os.path.basename(path)
  stripped = True
  while stripped:
    stripped = False
    for ending in _ZONE_FILE_ENDINGS:
      if base.endswith(ending) and len(base) > len(ending):
        base = base[:-len(ending)]
        stripped = True
  return base.rstrip('.') + '.'


def _split_ttl_and_class(tokens: List[str]) -> Tuple[List[str], str]:
  """Drops the optional TTL and class (either order) in front of the type."""
  rr_class = 'IN'
  for _ in range(2):
    if tokens and tokens[0].upper() in _CLASSES:
      rr_class = tokens[0].upper()
      tokens = tokens[1:]
    elif tokens and _TTL.match(tokens[0]):
      tokens = tokens[1:]
  return tokens, rr_class


def parse_zone_stream(lines: Iterable[str], origin: Optional[str] = None,
    observed_at: int = 0,
    stats: Optional[records.ParseStats] = None) -> List[records.FeedRecord]:
  """Parses a master-file subset, merging record kinds per owner name.

  Args:
    lines: Zone file lines.
    origin: Initial origin, e.g. 'com.'. `$ORIGIN` lines replace it.
    observed_at: Timestamp assigned to every record (zones carry none).
    stats: Accumulates line accounting when given.

  Returns:
    One record per owner name in first-seen order, with the union of its
    NS/A/AAAA kinds.
  """
  stats = stats if stats is not None else records.ParseStats()
  current_origin = dns.name.from_text(origin) if origin else None
  previous_owner: Optional[dns.name.Name] = None
  merged: Dict[str, Set[records.RrType]] = {}
  for line in lines:
    stats.lines += 1
    text = line.split(';', 1)[0].rstrip()
    if not text.strip():
      stats.ignored += 1
      continue
    tokens = text.split()
    if tokens[0].startswith('$'):
      directive = tokens[0].upper()
      if directive == '$ORIGIN' and len(tokens) == 2:
        try:
          current_origin = dns.name.from_text(tokens[1])
        except dns.exception.DNSException:
          stats.malformed += 1
          continue
      elif directive not in ('$TTL', '$ORIGIN'):
        logging.warning('Ignoring unsupported zone directive %s', directive)
      stats.ignored += 1
      continue

    if text[0].isspace():
      owner = previous_owner
    else:
      owner_text, tokens = tokens[0], tokens[1:]
      try:
        if owner_text == '@':
          owner = current_origin
        else:
          owner = dns.name.from_text(owner_text, current_origin)
      except dns.exception.DNSException:
        owner = None
      if owner is not None and not owner.is_absolute():
        owner = None
    if owner is None:
      stats.malformed += 1
      continue
    previous_owner = owner

    tokens, rr_class = _split_ttl_and_class(tokens)
    if len(tokens) < 2:
      stats.malformed += 1
      continue
    raw_type, rdata = tokens[0].upper(), ' '.join(tokens[1:])
    if rr_class != 'IN':
      stats.ignored += 1
      continue
    try:
      rr_type = records.RrType(raw_type)
    except ValueError:
      stats.ignored += 1
      continue
    if not _valid_rdata(rr_type, rdata, current_origin or dns.name.root):
      stats.malformed += 1
      continue
    fqdn = _normalize_or_none(owner.to_text(omit_final_dot=True))
    if fqdn is None:
      stats.rejected_names += 1
      stats.malformed += 1
      continue
    stats.parsed += 1
    merged.setdefault(fqdn, set()).add(rr_type)

  out = [
      records.FeedRecord(fqdn=fqdn, source=records.FeedSource.ZONE,
                         rr_types=frozenset(kinds), observed_at=observed_at)
      for fqdn, kinds in merged.items()
  ]
  stats.records += len(out)
  return out
