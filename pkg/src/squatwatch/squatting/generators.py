"""Variant generators for each squatting technique.

Every generator returns labels (or names) in canonical ASCII form, excludes
its input and drops anything that is not a valid hostname label.
"""
from typing import Iterable, Iterator, Mapping, Optional, Set

import idna
from squatwatch.domains import structure
from squatwatch.squatting import tables

_BIT_MASKS = (1, 2, 4, 8, 16, 32, 64, 128)
_HOSTNAME_CHARS = frozenset('abcdefghijklmnopqrstuvwxyz0123456789-')


def _to_ascii(label: str) -> Optional[str]:
  if label.isascii():
    return label
  try:
    return idna.encode(label).decode('ascii')
  except idna.IDNAError:
    return None


def _keep_valid(label: str, variants: Iterable[str]) -> Set[str]:
  return {
      variant for variant in variants
      if variant != label and structure.is_valid_label(variant)
  }


def _omission(label: str) -> Iterator[str]:
  for i in range(len(label)):
    yield label[:i] + label[i + 1:]


def _permutation(label: str) -> Iterator[str]:
  for i in range(len(label) - 1):
    yield label[:i] + label[i + 1] + label[i] + label[i + 2:]


def _replacement(label: str, keyboard: Mapping[str, str]) -> Iterator[str]:
  for i, char in enumerate(label):
    for neighbour in keyboard.get(char, ''):
      yield label[:i] + neighbour + label[i + 1:]


def _insertion(label: str, keyboard: Mapping[str, str]) -> Iterator[str]:
  for i, char in enumerate(label):
    prefix, suffix = label[:i], label[i + 1:]
    yield prefix + char + char + suffix
    for neighbour in keyboard.get(char, ''):
      yield prefix + neighbour + char + suffix
      yield prefix + char + neighbour + suffix


def gen_typo(label: str, subtype: structure.TypoSubtype,
    keyboard: Optional[Mapping[str, str]] = None) -> Set[str]:
  """Typing-error variants of one subtype.

  MISSING_DOT works at name level: 'www.example.com' typed without its first
  dot registers 'wwwexample', so the variant label is 'www' + label.
  """
  keyboard = keyboard if keyboard is not None else tables.default_tables(
  ).keyboard
  kinds = structure.TypoSubtype
  if subtype is kinds.MISSING_DOT:
    variants = ['www' + label]
  elif subtype is kinds.OMISSION:
    variants = _omission(label) if len(label) > 1 else []
  elif subtype is kinds.PERMUTATION:
    variants = _permutation(label)
  elif subtype is kinds.REPLACEMENT:
    variants = _replacement(label, keyboard)
  elif subtype is kinds.INSERTION:
    variants = _insertion(label, keyboard)
  else:
    raise ValueError(f'unknown typo subtype: {subtype}')
  return _keep_valid(label, variants)


def gen_bit(label: str) -> Set[str]:
  """Single bit flips that land on another hostname character."""
  variants = []
  for i, char in enumerate(label):
    for mask in _BIT_MASKS:
      flipped = chr(ord(char) ^ mask)
      if flipped in _HOSTNAME_CHARS:
        variants.append(label[:i] + flipped + label[i + 1:])
  return _keep_valid(label, variants)


def gen_homo(label: str,
    table: Optional[tables.ConfusableTable] = None) -> Set[str]:
  """One confusable substitution per variant, punycode-encoded if needed."""
  table = table or tables.default_tables().confusables
  variants = []
  for source, lookalikes in table.index.items():
    start = label.find(source)
    while start != -1:
      for lookalike in lookalikes:
        variant = _to_ascii(label[:start] + lookalike + label[start +
                                                                len(source):])
        if variant is not None:
          variants.append(variant)
      start = label.find(source, start + 1)
  return _keep_valid(label, variants)


def gen_sound(label: str,
    homophones: Optional[tables.HomophoneTable] = None) -> Set[str]:
  """Replaces one sound-alike token, scanning left to right, longest first."""
  index = (homophones or tables.default_tables().homophones).index
  longest = max((len(token) for token in index), default=0)
  variants = []
  i = 0
  while i < len(label):
    match = None
    for size in range(min(longest, len(label) - i), 0, -1):
      if label[i:i + size] in index:
        match = label[i:i + size]
        break
    if match is None:
      i += 1
      continue
    for replacement in index[match]:
      variants.append(label[:i] + replacement + label[i + len(match):])
    i += len(match)
  return _keep_valid(label, variants)


def gen_tld(brand: str, tlds: Iterable[str]) -> Set[str]:
  """The brand label under every other suffix in `tlds`."""
  label, _, suffix = brand.partition('.')
  return {f'{label}.{tld}' for tld in tlds if tld != suffix}


def gen_combo(label: str, keywords: Optional[Iterable[str]] = None) -> Set[str]:
  keywords = keywords if keywords is not None else tables.default_tables(
  ).keywords
  variants = []
  for keyword in keywords:
    variants += [label + keyword, keyword + label,
                 f'{label}-{keyword}', f'{keyword}-{label}']
  return _keep_valid(label, variants)


def gen_level(brand: str, carriers: Iterable[str]) -> Set[str]:
  """The brand's full name placed as a subdomain of each carrier domain."""
  return {f'{brand}.{carrier}' for carrier in carriers if carrier != brand}


def gen_lexical(label: str, technique: structure.Technique,
    generator_tables: Optional[tables.GeneratorTables] = None) -> Set[str]:
  """Label-level variants of one technique (typo covers every subtype)."""
  t = generator_tables or tables.default_tables()
  if technique is structure.Technique.TYPO:
    out = set()
    for subtype in structure.TypoSubtype:
      out |= gen_typo(label, subtype, t.keyboard)
    return out
  if technique is structure.Technique.BIT:
    return gen_bit(label)
  if technique is structure.Technique.HOMO:
    return gen_homo(label, t.confusables)
  if technique is structure.Technique.SOUND:
    return gen_sound(label, t.homophones)
  raise ValueError(f'{technique.value} is not a label-level technique')


def gen_hybrid(brand: str, carriers: Iterable[str],
    generator_tables: Optional[tables.GeneratorTables] = None,
    keywords: Optional[Iterable[str]] = None) -> Set[str]:
  """Lexical variant plus keyword, placed as a subdomain of a carrier domain.

  'example.com' with carrier 'domain.example' yields names such as
  'exarnple-secure.domain.example': homograph, combo and level at once.
  """
  t = generator_tables or tables.default_tables()
  keywords = tuple(keywords) if keywords is not None else t.keywords
  label = brand.partition('.')[0]
  lexical = sorted(
      gen_typo(label, structure.TypoSubtype.PERMUTATION, t.keyboard) |
      gen_homo(label, t.confusables))
  out = set()
  for carrier in carriers:
    if carrier.partition('.')[0] == label:
      continue
    for variant in lexical:
      # An IDN label is re-encoded as a whole once the keyword is attached.
      text = idna.decode(variant) if variant.startswith('xn--') else variant
      for keyword in keywords:
        combined = _to_ascii(f'{text}-{keyword}')
        if combined is not None and structure.is_valid_label(combined):
          out.add(f'{combined}.{carrier}')
  return out
