"""Normalization and decomposition of domain names into (s, d, sx) parts."""
import re
from typing import Dict, Mapping, Optional

import idna
from squatwatch.domains import structure
from squatwatch.domains import suffixes

_LABEL_CHARS = re.compile(r'[a-z0-9-]')
_MAX_LABEL_LENGTH = 63


class MalformedNameError(ValueError):
  """A name has an empty or illegal label."""

  def __init__(self, message: str, position: int):
    super().__init__(f'{message} at position {position}')
    self.position = position


class BareSuffixError(ValueError):
  """A name is itself a public suffix and has no registrable label."""


def _ascii_label(label: str, offset: int) -> str:
  if label.isascii():
    return label
  try:
    return idna.encode(label, uts46=True).decode('ascii')
  except idna.IDNAError as e:
    raise MalformedNameError(f'cannot encode label {label!r}: {e}',
                             offset) from e


def normalize(raw: str) -> str:
  """Lowercases, drops the root dot and converts labels to ASCII form.

  Args:
    raw: Domain name as found in a feed or typed by an operator.

  Returns:
    The canonical ASCII form. Applying it twice changes nothing.

  Raises:
    MalformedNameError: A label is empty, too long or has an illegal
      character. `position` is the character offset in `raw`.
  """
  if not raw or not raw.strip():
    raise MalformedNameError('empty name', 0)
  name = raw.strip().lower()
  if name.endswith('.'):
    name = name[:-1]
  labels = []
  offset = 0
  for label in name.split('.'):
    if not label:
      raise MalformedNameError(f'empty label in {raw!r}', offset)
    ascii_label = _ascii_label(label, offset)
    if len(ascii_label) > _MAX_LABEL_LENGTH:
      raise MalformedNameError(f'label longer than 63 in {raw!r}', offset)
    for i, char in enumerate(ascii_label):
      if not _LABEL_CHARS.match(char):
        raise MalformedNameError(f'illegal character {char!r} in {raw!r}',
                                 offset + i)
    labels.append(ascii_label)
    offset += len(label) + 1
  return '.'.join(labels)


def parse_fqdn(raw: str,
               rules: Optional[suffixes.SuffixRules] = None) -> structure.Fqdn:
  """Splits a normalized name at its longest public suffix."""
  rules = rules or suffixes.default_rules()
  sx = rules.public_suffix(raw)
  if sx == raw:
    raise BareSuffixError(f'{raw!r} is a public suffix, not a domain')
  rest = raw[:-(len(sx) + 1)]
  s, _, d = rest.rpartition('.')
  return structure.Fqdn(s=s, d=d, sx=sx, raw=raw)


def parse(raw: str,
          rules: Optional[suffixes.SuffixRules] = None) -> structure.Fqdn:
  """normalize followed by parse_fqdn."""
  return parse_fqdn(normalize(raw), rules)


def to_structured(fqdn: structure.Fqdn) -> Dict[str, str]:
  # Key 's' is always present, empty when there is no subdomain.
  return {'s': fqdn.s, 'd': fqdn.d, 'sx': fqdn.sx}


def reassemble(s: str, d: str, sx: str) -> str:
  return structure.join_parts(s, d, sx)


def from_structured(record: Mapping[str, str]) -> structure.Fqdn:
  """Builds an Fqdn from an {s, d, sx} record without consulting suffix rules.

  Raises:
    ValueError: The parts are missing, not strings or not a valid name.
  """
  try:
    s, d, sx = record['s'], record['d'], record['sx']
  except (KeyError, TypeError) as e:
    raise ValueError(f'record needs keys s, d and sx: {record!r}') from e
  if not all(isinstance(part, str) for part in (s, d, sx)):
    raise ValueError(f'record parts must be strings: {record!r}')
  raw = normalize(reassemble(s, d, sx))
  return structure.Fqdn(s=s.lower(), d=d.lower(), sx=sx.lower(), raw=raw)


def registrable(fqdn: structure.Fqdn) -> str:
  return fqdn.registrable


def display_form(name: str) -> str:
  """Unicode rendering of punycode labels; other labels are unchanged."""
  labels = []
  for label in name.split('.'):
    if label.startswith('xn--'):
      try:
        label = idna.decode(label)
      except idna.IDNAError:
        pass
    labels.append(label)
  return '.'.join(labels)
