"""Rule-based squatting detection over a brand set.

The baseline checks techniques in a fixed precedence and never reports a
hybrid. `detect_with_hybrid` adds decomposition-based hybrid detection on
top; it is what the mock model knows.
"""
import collections
import functools
from typing import Dict, Iterator, List, Optional, Tuple

import idna
from squatwatch.domains import structure
from squatwatch.squatting import brands as brands_lib
from squatwatch.squatting import generators
from squatwatch.squatting import tables

Technique = structure.Technique
_LEXICAL = (Technique.TYPO, Technique.BIT, Technique.HOMO, Technique.SOUND)
_PRECEDENCE = {technique: i for i, technique in enumerate(Technique)}
# Shorter labels match inside too many unrelated names.
MIN_EMBEDDED_LABEL = 4


def detect_combo(
    fqdn: structure.Fqdn, brand_set: brands_lib.BrandSet
) -> Optional[Tuple[brands_lib.Brand, str]]:
  """(brand, keyword) when `d` is a brand label with extra characters.

  The longest embedded brand label wins, then the better ranked brand.
  """
  return _combo_in(fqdn.d, _combo_candidates(brand_set), brand_set)


@functools.lru_cache(maxsize=8)
def _combo_candidates(
    brand_set: brands_lib.BrandSet) -> Tuple[brands_lib.Brand, ...]:
  eligible = [b for b in brand_set if len(b.label) >= MIN_EMBEDDED_LABEL]
  return tuple(sorted(eligible, key=lambda b: (-len(b.label), b.rank)))


def _combo_in(
    label: str, candidates: Tuple[brands_lib.Brand, ...],
    brand_set: brands_lib.BrandSet) -> Optional[Tuple[brands_lib.Brand, str]]:
  if label in brand_set.label_index:
    return None
  for brand in candidates:
    position = label.find(brand.label)
    if position == -1:
      continue
    residue = label[:position] + '-' + label[position + len(brand.label):]
    keyword = '-'.join(part for part in residue.split('-') if part)
    if keyword:
      return brand, keyword
  return None


def detect_level(fqdn: structure.Fqdn,
    brand_set: brands_lib.BrandSet) -> Optional[brands_lib.Brand]:
  """Brand whose full registrable name sits dot-bounded inside `s`."""
  labels = fqdn.subdomain_labels
  best = None
  for start in range(len(labels)):
    for end in range(start + 2, len(labels) + 1):
      brand = brand_set.get('.'.join(labels[start:end]))
      if brand is None or brand.domain == fqdn.registrable:
        continue
      if best is None or brand.rank < best.rank:
        best = brand
  return best


def _unicode_label(label: str) -> str:
  if label.startswith('xn--'):
    try:
      return idna.decode(label)
    except idna.IDNAError:
      return label
  return label


def _ascii_token(token: str) -> Optional[str]:
  if token.isascii():
    return token
  try:
    return idna.encode(token).decode('ascii')
  except idna.IDNAError:
    return None


class BaselineDetector:
  """Variant indices for every brand, built once and then read-only."""

  def __init__(self, brand_set: brands_lib.BrandSet,
      generator_tables: Optional[tables.GeneratorTables] = None):
    self.brands = brand_set
    self.tables = generator_tables or tables.default_tables()
    # technique -> variant label -> [(brand, typo subtype)] in rank order.
    self._variants: Dict[Technique, Dict[str, List[
        Tuple[brands_lib.Brand, Optional[structure.TypoSubtype]]]]] = {
            technique: collections.defaultdict(list) for technique in _LEXICAL
        }
    for brand in brand_set:
      self._index_brand(brand)
    self._combo_candidates = _combo_candidates(brand_set)

  def _index_brand(self, brand: brands_lib.Brand) -> None:
    typo = self._variants[Technique.TYPO]
    for subtype in structure.TypoSubtype:
      for variant in generators.gen_typo(brand.label, subtype,
                                         self.tables.keyboard):
        entries = typo[variant]
        if not entries or entries[-1][0] is not brand:
          entries.append((brand, subtype))
    for technique in (Technique.BIT, Technique.HOMO, Technique.SOUND):
      for variant in generators.gen_lexical(brand.label, technique,
                                            self.tables):
        self._variants[technique][variant].append((brand, None))

  def lexical_matches(
      self, label: str
  ) -> Iterator[Tuple[Technique, brands_lib.Brand,
                      Optional[structure.TypoSubtype]]]:
    """Every (technique, brand, subtype) whose variants contain `label`."""
    for technique in _LEXICAL:
      for brand, subtype in self._variants[technique].get(label, ()):
        yield technique, brand, subtype

  def detect(
      self, fqdn: structure.Fqdn,
      source: structure.VerdictSource = structure.VerdictSource.BASELINE
  ) -> Optional[structure.Verdict]:
    """First match in precedence Typo, Bit, Homo, Sound, Tld, Level, Combo."""
    if self.brands.is_brand(fqdn.registrable):
      return None

    def verdict(technique, brand, subtype=None, components=()):
      return structure.Verdict(
          fqdn=fqdn,
          squatting_type=structure.SquattingType(technique, subtype,
                                                 components),
          target=brand.domain,
          source=source)

    for technique, brand, subtype in self.lexical_matches(fqdn.d):
      if brand.suffix == fqdn.sx:
        return verdict(technique, brand, subtype)
    brand = self.brands.label_index.get(fqdn.d)
    if brand is not None and brand.suffix != fqdn.sx:
      return verdict(Technique.TLD, brand)
    brand = detect_level(fqdn, self.brands)
    if brand is not None:
      return verdict(Technique.LEVEL, brand)
    combo = _combo_in(fqdn.d, self._combo_candidates, self.brands)
    if combo is not None:
      return verdict(Technique.COMBO, combo[0])
    return None

  def _token_matches(
      self, token: str
  ) -> Iterator[Tuple[Optional[Technique], brands_lib.Brand]]:
    ascii_token = _ascii_token(token)
    if ascii_token is None:
      return
    brand = self.brands.label_index.get(ascii_token)
    if brand is not None and len(brand.label) >= MIN_EMBEDDED_LABEL:
      yield None, brand
    for technique, brand, _ in self.lexical_matches(ascii_token):
      if len(brand.label) >= MIN_EMBEDDED_LABEL:
        yield technique, brand

  def detect_hybrid(
      self, fqdn: structure.Fqdn,
      source: structure.VerdictSource = structure.VerdictSource.ORACLE
  ) -> Optional[structure.Verdict]:
    """Fires when one brand token shows two or more techniques at once.

    `d` and then each subdomain label is split on hyphens (after decoding
    IDN labels). A token that is a brand label, or a lexical variant of one,
    counts its lexical technique, plus combo when the label has other
    tokens, level when it sits in the subdomain, and tld when it is `d`
    under a suffix other than the brand's.
    """
    if self.brands.is_brand(fqdn.registrable):
      return None
    segments = [(fqdn.d, False)]
    segments += [(label, True) for label in fqdn.subdomain_labels]
    for label, in_subdomain in segments:
      tokens = [t for t in _unicode_label(label).split('-') if t]
      for token in tokens:
        for technique, brand in self._token_matches(token):
          found = {technique} if technique is not None else set()
          if len(tokens) > 1:
            found.add(Technique.COMBO)
          if in_subdomain:
            found.add(Technique.LEVEL)
          elif brand.suffix != fqdn.sx:
            found.add(Technique.TLD)
          if len(found) >= 2:
            components = tuple(sorted(found, key=_PRECEDENCE.get))
            return structure.Verdict(
                fqdn=fqdn,
                squatting_type=structure.SquattingType(
                    Technique.HYBRID, components=components),
                target=brand.domain,
                source=source)
    return None

  def detect_with_hybrid(
      self, fqdn: structure.Fqdn,
      source: structure.VerdictSource = structure.VerdictSource.ORACLE
  ) -> Optional[structure.Verdict]:
    return self.detect(fqdn, source) or self.detect_hybrid(fqdn, source)


@functools.lru_cache(maxsize=4)
def detector_for(brand_set: brands_lib.BrandSet) -> BaselineDetector:
  return BaselineDetector(brand_set)


def baseline_detect(
    fqdn: structure.Fqdn, brand_set: brands_lib.BrandSet,
    generator_tables: Optional[tables.GeneratorTables] = None
) -> Optional[structure.Verdict]:
  if generator_tables is None:
    return detector_for(brand_set).detect(fqdn)
  return BaselineDetector(brand_set, generator_tables).detect(fqdn)
